import math

import numpy as np
import pytest

from matsos import expr as ex
from matsos import jets

from oracles import dict_convolve, func_of, recip_chain_table, richardson_derivative

X, Y = ex.var(0), ex.var(1)


def test_square_polynomial():
    j = jets.eval_jet(X**2, [3.0], order=2)
    assert j.value == 9.0
    assert j.derivative((1,)) == 6.0
    assert j.derivative((2,)) == 2.0


def test_flat_primitive_all_zero_at_origin():
    j = jets.eval_jet(ex.flat(X), [0.0], order=4)
    assert all(j.derivative((m,)) == 0.0 for m in range(5))


def test_flatabs_all_zero_at_origin():
    j = jets.eval_jet(ex.flatabs(X), [0.0], order=4)
    assert all(j.derivative((m,)) == 0.0 for m in range(5))


def test_reciprocal_jet_matches_frozen_values():
    # central finite differences with step sweep, Richardson extrapolated,
    # freeze (0.5, -0.25, 0.25) for 1/(2+x) at 0
    j = jets.eval_jet(ex.recip(ex.const(2.0) + X), [0.0], order=2)
    assert j.value == pytest.approx(0.5, abs=1e-15)
    assert j.derivative((1,)) == pytest.approx(-0.25, abs=1e-12)
    assert j.derivative((2,)) == pytest.approx(0.25, abs=1e-12)


def test_order_validation():
    with pytest.raises(ValueError):
        jets.eval_jet(X, [0.0], order=5)
    with pytest.raises(ValueError):
        jets.eval_jet(X, [0.0], order=-1)


def test_variable_count_mismatch():
    with pytest.raises(ex.VariableCountError):
        jets.eval_jet(ex.var(2), [0.0, 1.0], order=1)


def test_singular_domain_errors():
    with pytest.raises(jets.SingularDomainError):
        jets.eval_jet(ex.recip(X), [0.0], order=0)
    with pytest.raises(jets.SingularDomainError):
        jets.eval_jet(ex.recip(X), [-1.0], order=0)  # declared positivity
    with pytest.raises(jets.SingularDomainError):
        jets.eval_jet(ex.sqrt(X), [-0.5], order=0)
    with pytest.raises(jets.SingularDomainError):
        jets.eval_jet(ex.sqrt(X), [0.0], order=1)
    # sqrt at zero is fine for order 0
    assert jets.eval_jet(ex.sqrt(X), [0.0], order=0).value == 0.0


BATTERY = [
    (ex.exp(X * Y), [0.4, -0.3], 2),
    (ex.sqrt(ex.const(2.0) + X), [0.7], 1),
    (ex.recip(ex.const(1.0) + X**2), [0.5], 1),
    (ex.flat(X), [0.6], 1),
    (ex.flat(X), [-0.35], 1),
    (ex.flatabs(X), [0.45], 1),
    (ex.flatabs(X), [-0.52], 1),
    (ex.bump(X), [0.3], 1),
    (ex.bump(X), [-0.62], 1),
    (ex.mul(ex.flat(X), ex.bump(Y), ex.exp(X)), [0.5, 0.2], 2),
    (ex.add(X**3, ex.mul(ex.const(2.0), X, Y), ex.exp(Y)), [0.3, 0.8], 2),
    (ex.intpow(ex.const(1.5) + X, -2), [0.25], 1),
    (ex.sqrt(ex.flat(X) + ex.const(0.5)), [0.4], 1),
]


@pytest.mark.parametrize("expr,point,nv", BATTERY)
def test_jets_match_richardson_fd_to_order_3(expr, point, nv):
    """Every primitive and compositions: orders <= 3 agree with Richardson-
    extrapolated central differences to relative error 1e-6, at points
    bounded away from singularities."""
    jet = jets.eval_jet(expr, point, order=3, nvars=nv)
    f = func_of(expr, nv)
    for mu, val in jet.table().items():
        if sum(mu) > 3:
            continue
        fd = richardson_derivative(f, point, mu, h0=2e-2)
        scale = max(abs(val), abs(fd))
        # 5e-8 absorbs the FD noise floor around exactly-zero derivatives
        assert abs(val - fd) <= max(1e-6 * scale, 5e-8), (mu, val, fd)


@pytest.mark.parametrize(
    "f,g,point,nv",
    [
        (ex.exp(X * Y) + X**3, ex.sqrt(ex.const(2.0) + X) * Y, [0.3, -0.7], 2),
        (ex.flat(X), ex.recip(ex.const(1.0) + X**2), [0.5], 1),
        (X * Y + ex.const(1.0), ex.bump(X) * ex.bump(Y), [0.2, 0.4], 2),
    ],
)
def test_product_rule_is_truncated_convolution(f, g, point, nv):
    """jet(f*g) equals the truncated convolution of jet(f) and jet(g): the
    executable form of the Leibniz rule."""
    jf = jets.eval_jet(f, point, order=4, nvars=nv)
    jg = jets.eval_jet(g, point, order=4, nvars=nv)
    jfg = jets.eval_jet(f * g, point, order=4, nvars=nv)
    conv = dict_convolve(jf.table(), jg.table(), order=4)
    for mu, v in jfg.table().items():
        scale = max(1.0, abs(v))
        assert abs(v - conv[mu]) <= 1e-13 * scale, mu


@pytest.mark.parametrize(
    "h,point",
    [
        (ex.const(2.0) + X**2, 0.8),
        (ex.exp(X), -0.4),
        (ex.const(1.0) + ex.flat(X), 0.5),
        (ex.sqrt(ex.const(3.0) + X), 0.9),
    ],
)
def test_reciprocal_matches_faa_di_bruno(h, point):
    """Jets of 1/h agree with the hand-expanded chain rule to order 3."""
    jh = jets.eval_jet(h, [point], order=3)
    hs = [jh.value] + [jh.derivative((m,)) for m in (1, 2, 3)]
    expected = recip_chain_table(*hs)
    jr = jets.eval_jet(ex.recip(h), [point], order=3)
    got = [jr.value] + [jr.derivative((m,)) for m in (1, 2, 3)]
    assert np.allclose(got, expected, rtol=1e-12, atol=0)


def test_jet_ring_homomorphism_on_sums():
    a, b = ex.exp(X), ex.flat(X)
    pt = [0.37]
    ja = jets.eval_jet(a, pt, 4).table()
    jb = jets.eval_jet(b, pt, 4).table()
    jsum = jets.eval_jet(a + b, pt, 4).table()
    for mu in jsum:
        assert jsum[mu] == pytest.approx(ja[mu] + jb[mu], rel=1e-15)


class TestFlatAnnihilation:
    """flat x polynomial-growth = 0, precomputed on the tree."""

    def setup_method(self):
        x, y, z, t = (ex.var(i) for i in range(4))
        self.r = ex.sqrt(x**2 + y**2 + z**2)
        self.eta = ex.flat(self.r) * ex.bump(t / self.r)

    def test_zero_jets_on_degenerate_slice(self):
        jb = jets.eval_jet_batch(
            self.eta, np.array([[0.0, 0.0, 0.0, 0.5]]), order=4
        )
        assert not jb.invalid[0]
        assert jb.flat_zero[0]
        assert np.abs(jb.coef).max() == 0.0

    def test_matches_direct_value_off_slice(self):
        pt = np.array([[0.1, 0.0, 0.0, 0.05]])
        jb = jets.eval_jet_batch(self.eta, pt, order=0)
        expect = math.exp(-100.0) * math.exp(1.0 - 1.0 / (1.0 - 0.25))
        assert jb.values[0] == pytest.approx(expect, rel=1e-12)

    def test_no_rescue_for_exponential_growth(self):
        # flat(x) * exp(1/x^2) == 1 mathematically; the engine must refuse
        # rather than claim zero
        bad = ex.flat(X) * ex.exp(ex.recip(X**2))
        jb = jets.eval_jet_batch(bad, np.array([[0.0]]), order=0)
        assert jb.invalid[0]

    def test_no_rescue_for_reciprocal_of_flat(self):
        bad = ex.flat(X) * ex.recip(ex.flat(X))
        jb = jets.eval_jet_batch(bad, np.array([[0.0]]), order=0)
        assert jb.invalid[0]


def test_bump_support_and_normalization():
    b = ex.bump(X)
    assert jets.eval_jet(b, [0.0], 2).value == 1.0
    for t in (1.0, -1.0, 1.3):
        j = jets.eval_jet(b, [t], 4)
        assert j.value == 0.0
        assert j.max_abs_of_order(4) == 0.0


def test_batched_matches_single_point():
    e = ex.flat(X) * ex.bump(Y) + ex.sqrt(ex.const(1.0) + X**2)
    pts = np.array([[0.3, 0.1], [0.5, -0.7], [1.2, 0.0]])
    jb = jets.eval_jet_batch(e, pts, order=3, nvars=2)
    for i, p in enumerate(pts):
        ji = jets.eval_jet(e, p, order=3, nvars=2)
        for mu, v in ji.table().items():
            got = jb.derivative(mu)[i]
            assert got == pytest.approx(v, rel=1e-15, abs=1e-300)


def test_shared_memo_consistency():
    shared = ex.flat(X)
    e1 = shared * ex.const(2.0)
    e2 = shared + ex.const(1.0)
    pts = np.array([[0.4]])
    out = jets.eval_entries([e1, e2], pts, order=2)
    v = jets.eval_jet(shared, [0.4], 2).value
    assert out[0].values[0] == pytest.approx(2 * v)
    assert out[1].values[0] == pytest.approx(1 + v)


def test_log_values_exact_under_underflow():
    t = X
    psi = (ex.flat(t) * t**2) ** 4
    pts = np.array([[0.009]])
    lv = jets.eval_log_values(psi, pts)
    expect = 4.0 * (-1.0 / 0.009**2 + 2.0 * math.log(0.009))
    assert lv[0] == pytest.approx(expect, rel=1e-12)
    # plain evaluation underflows to zero there
    vals, ok = jets.eval_values(psi, pts)
    assert ok[0] and vals[0] == 0.0


def test_log_values_sum_uses_logaddexp():
    e = ex.flat(X) + ex.flat(ex.mul(ex.const(2.0), X))
    pts = np.array([[0.1]])
    lv = jets.eval_log_values(e, pts)
    expect = np.logaddexp(-100.0, -25.0)
    assert lv[0] == pytest.approx(expect, rel=1e-12)


def test_log_values_reject_signed_structure():
    with pytest.raises(jets.LogEvalError):
        jets.eval_log_values(X - ex.const(1.0), np.array([[0.5]]))


def test_grid_partitions_merge_deterministically():
    """Evaluating a partitioned batch yields exactly the full-batch tables:
    sweeps can be split across workers with deterministic merges."""
    e = ex.flat(X) * ex.bump(Y) + ex.recip(ex.const(1.5) + X**2)
    pts = np.linspace(-0.9, 0.9, 40).reshape(20, 2)
    full = jets.eval_jet_batch(e, pts, order=3, nvars=2)
    parts = [jets.eval_jet_batch(e, chunk, order=3, nvars=2)
             for chunk in np.array_split(pts, 4)]
    merged = np.concatenate([p.coef for p in parts], axis=1)
    assert (merged == full.coef).all()
    assert (np.concatenate([p.invalid for p in parts]) == full.invalid).all()
