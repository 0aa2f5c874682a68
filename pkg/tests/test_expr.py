import json

import pytest

from matsos import expr as ex


def test_builders_and_operators():
    x, y = ex.var(0), ex.var(1)
    e = (x + 2.0) * y - x / (y + 3.0)
    assert e.nvars == 2
    assert e.kind == "sum"


def test_var_range():
    with pytest.raises(ex.ExprError):
        ex.var(8)
    with pytest.raises(ex.ExprError):
        ex.var(-1)


def test_const_finite():
    with pytest.raises(ex.ExprError):
        ex.const(float("inf"))


def test_intpow_integer_exponent():
    with pytest.raises(ex.ExprError):
        ex.intpow(ex.var(0), 1.5)


def test_immutability():
    e = ex.var(0)
    with pytest.raises(AttributeError):
        e.kind = "const"


@pytest.mark.parametrize(
    "tree",
    [
        ex.var(3),
        ex.const(0.1 + 0.2),
        ex.flat(ex.var(0)),
        ex.flatabs(ex.mul(ex.const(2.0), ex.var(1))),
        ex.bump(ex.var(0) / ex.sqrt(ex.var(1) ** 2 + 1.0)),
        ex.recip(ex.exp(ex.var(2))) + ex.intpow(ex.var(0), -3),
    ],
)
def test_serialization_round_trip(tree):
    s = ex.to_json(tree)
    back = ex.from_json(s)
    assert back == tree
    # bit-exact parameters after a double round trip
    assert ex.to_json(ex.from_json(s)) == s


def test_round_trip_preserves_awkward_floats():
    vals = [0.1, 1e-300, 3.141592653589793, 2**-52, 1.7976931348623157e308]
    for v in vals:
        e = ex.const(v)
        assert ex.from_json(ex.to_json(e)).param == v


def test_from_dict_rejects_garbage():
    with pytest.raises(ex.ExprError):
        ex.from_dict({"kind": "nope"})
    with pytest.raises(ex.ExprError):
        ex.from_dict(["not", "a", "node"])
    with pytest.raises(ex.ExprError):
        ex.from_dict({"kind": "recip", "children": []})


def test_json_is_plain_data():
    tree = ex.flat(ex.var(0)) * ex.bump(ex.var(1))
    d = json.loads(ex.to_json(tree))
    assert d["kind"] == "product"
    assert [c["kind"] for c in d["children"]] == ["flat", "bump"]
