import numpy as np
import pytest

from matsos import expr as ex
from matsos.grids import GridSpec
from matsos.monotone import (
    MonotoneSpec,
    holder_seminorm,
    omega_monotone_check,
    omega_value,
)

X = ex.var(0)


def grid1(**kw):
    kw.setdefault("box", ((-1.0, 1.0),))
    kw.setdefault("resolution", 17)
    kw.setdefault("exclude_radius", 0.1)
    return GridSpec(**kw)


class TestModulus:
    def test_power_modulus(self):
        spec = MonotoneSpec(s=0.5)
        w, clamped = omega_value(spec, np.array([0.0, 0.25, 1.0]))
        assert w.tolist() == [0.0, 0.5, 1.0]
        assert not clamped.any()

    def test_log_modulus(self):
        spec = MonotoneSpec(s=0.0)
        w, _ = omega_value(spec, np.array([1.0, np.exp(-2.0)]))
        assert w[0] == pytest.approx(0.5)
        assert w[1] == pytest.approx(1.0 / 4.0)
        assert spec.kind == "log"

    def test_clamping_above_one(self):
        w, clamped = omega_value(MonotoneSpec(s=0.5), np.array([4.0]))
        assert clamped[0] and w[0] == 1.0

    def test_invariants(self):
        with pytest.raises(ValueError):
            MonotoneSpec(s=1.5)
        with pytest.raises(ValueError):
            MonotoneSpec(s=0.5, C=0.0)


class TestHolderSeminorm:
    def test_constant_is_zero(self):
        assert holder_seminorm(ex.const(3.0), [0.2], (0,), 0.5, grid1()) == 0.0

    def test_second_derivative_of_square_is_constant(self):
        assert holder_seminorm(X**2, [0.4], (2,), 0.3, grid1()) == pytest.approx(
            0.0, abs=1e-9
        )

    def test_sqrt_abs_attains_one(self):
        # |x|^(1/2) = sqrt(sqrt(x^2)); pairs anchored at the center z = 0
        # attain ratio 1; subadditivity of t^(1/2) caps it
        h = ex.sqrt(ex.sqrt(X**2))
        est = holder_seminorm(h, [0.0], (0,), 0.5, grid1())
        assert est == pytest.approx(1.0, abs=0.05)

    def test_monotone_in_pair_count(self):
        h = ex.exp(X)
        grids = [grid1(pairs_per_scale=k) for k in (2, 4, 8)]
        vals = [holder_seminorm(h, [0.3], (1,), 0.5, g) for g in grids]
        assert vals[0] <= vals[1] <= vals[2]

    def test_propagates_singular_sample(self):
        from matsos.jets import SingularDomainError

        with pytest.raises(SingularDomainError) as info:
            holder_seminorm(ex.recip(X), [0.0], (0,), 0.5, grid1())
        assert info.value.point is not None


class TestOmegaMonotone:
    def test_constant_function(self):
        rep = omega_monotone_check(ex.const(1.0), MonotoneSpec(s=0.5), grid1())
        assert rep.verdict == "pass"
        assert rep.worst_ratio == pytest.approx(1.0)

    def test_square_norm_is_linearly_monotone(self):
        # domain kept inside the unit ball so the modulus is never clamped
        g = GridSpec(box=((-0.7, 0.7), (-0.7, 0.7)), resolution=9,
                     exclude_radius=0.2)
        f = ex.var(0) ** 2 + ex.var(1) ** 2
        rep = omega_monotone_check(f, MonotoneSpec(s=1.0), g)
        assert rep.verdict == "pass"
        assert rep.worst_ratio <= 1.0 + 1e-9
        assert rep.counts["clamped"] == 0

    def test_flat_radial_profile(self):
        # exp(-1/|x|) with |y| <= |x| on the ball: monotone radial profile
        f = ex.flatabs(ex.sqrt(ex.var(0) ** 2 + ex.var(1) ** 2))
        g = GridSpec(box=((-1, 1), (-1, 1)), resolution=9, exclude_radius=0.2)
        rep = omega_monotone_check(f, MonotoneSpec(s=1.0), g)
        assert rep.verdict == "pass"

    def test_clamp_counted(self):
        f = ex.const(2.0) + X**2
        rep = omega_monotone_check(f, MonotoneSpec(s=0.5, C=4.0), grid1())
        assert rep.counts["clamped"] > 0

    def test_negative_function_rejected(self):
        with pytest.raises(ValueError):
            omega_monotone_check(-ex.const(1.0), MonotoneSpec(s=0.5), grid1())

    def test_non_monotone_fails(self):
        # f vanishing at x = 1/2 but not at x: the ball around x/2 sees
        # large values while omega(f(x)) is tiny for f(x) small
        f = (X - ex.const(0.5)) ** 2
        rep = omega_monotone_check(f, MonotoneSpec(s=1.0, C=1.0), grid1())
        assert rep.verdict == "fail"
        assert rep.witness is not None
