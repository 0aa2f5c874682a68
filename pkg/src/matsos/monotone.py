"""Holder seminorm estimation and omega-monotonicity checking.

The seminorm of a derivative D^mu h at a point x is the limsup over pairs
y, z -> x of |D^mu h(y) - D^mu h(z)| / |y - z|^delta.  The limsup is scale
local, so pairs are drawn on a geometric ladder of separations around each
center; the sampled maximum is a certified lower bound of the true value
and is monotone in the number of sampled pairs.

A function f is omega-monotone when f(y) <= C * omega(f(x)) for every y in
the ball B(x/2, |x|/2), i.e. controlled by a modulus of its own value one
dyadic step closer to the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .reporting import FAIL, INCONCLUSIVE, PASS, CheckReport, FLAT_FLOOR

__all__ = ["MonotoneSpec", "omega_value", "holder_seminorm", "omega_monotone_check"]


@dataclass(frozen=True)
class MonotoneSpec:
    """Modulus omega_s with constant C: t**s, or 1/(2+ln(1/t)) when s == 0."""

    s: float
    C: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise ValueError("exponent s must lie in [0, 1]")
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError("constant C must be finite and positive")

    @property
    def kind(self):
        return "log" if self.s == 0.0 else "holder"


def omega_value(spec, t):
    """omega_s(t) with arguments above 1 clamped to 1 (and flagged).

    The modulus is only defined on [0, 1]; behavior beyond is unspecified,
    so the checker evaluates at 1 there and reports how many samples were
    clamped.  Returns (values, clamped mask).
    """
    t = np.asarray(t, dtype=float)
    clamped = t > 1.0
    tc = np.minimum(t, 1.0)
    if spec.s == 0.0:
        with np.errstate(divide="ignore"):
            w = np.where(tc > 0, 1.0 / (2.0 + np.log(1.0 / np.where(tc > 0, tc, 1.0))), 0.0)
    else:
        w = tc**spec.s
    return w, clamped


def holder_seminorm(h, x, mu, delta, grid):
    """Sampled lower bound for the seminorm of D^mu h at x.

    Takes the max over sampled pairs (y, z) near x of
    |D^mu h(y) - D^mu h(z)| / |y - z|**delta.  Evaluation failure at any
    sampled point propagates with the offending point.
    """
    mu = tuple(int(k) for k in mu)
    order = sum(mu)
    if order > jets.MAX_ORDER:
        raise ValueError(f"|mu| must be <= {jets.MAX_ORDER}")
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    x = np.asarray(x, dtype=float)
    Y, Z = grid.sample_pairs(x)
    if len(Y) == 0:
        raise ValueError("grid pair-sampling policy produced no pairs")
    nv = len(x)
    if len(mu) != nv:
        raise jets.VariableCountError(
            f"multiindex length {len(mu)} != point dimension {nv}"
        )
    jy = jets.eval_jet_batch(h, Y, order=order, nvars=nv)
    jz = jets.eval_jet_batch(h, Z, order=order, nvars=nv)
    for jb, pts in ((jy, Y), (jz, Z)):
        if jb.invalid.any():
            bad = pts[np.argmax(jb.invalid)]
            raise jets.SingularDomainError("seminorm sample failed", point=bad)
    dy = jy.derivative(mu)
    dz = jz.derivative(mu)
    sep = np.linalg.norm(Y - Z, axis=1)
    ok = sep > 1e-300
    if not ok.any():
        return 0.0
    with np.errstate(divide="ignore"):
        ratios = np.abs(dy[ok] - dz[ok]) / sep[ok] ** delta
    return float(ratios.max())


def omega_monotone_check(f, spec, grid, ball_count=64):
    """Is f(y) <= C * omega(f(x)) for sampled x and sampled y in B(x/2, |x|/2)?

    Reports the sup of f(y) / omega(f(x)); passes when that sup is at most
    C.  Samples with f(x) and the ball values both flat-zero are excluded.
    Samples with f(x) > 1 are evaluated with omega clamped at 1 and counted
    in ``counts['clamped']``.
    """
    centers = grid.sample_points()
    nv = centers.shape[1]
    balls = [grid.ball_points(x / 2.0, np.linalg.norm(x) / 2.0, ball_count) for x in centers]
    allpts = np.concatenate([np.atleast_2d(b) for b in balls] + [centers], axis=0)
    vals, valid = jets.eval_values(f, allpts, nvars=nv)
    if not valid.all():
        bad = allpts[np.argmax(~valid)]
        raise jets.SingularDomainError("monotonicity sample failed", point=bad)
    scale = max(1.0, float(np.abs(vals).max()))
    if vals.min() < -1e-12 * scale:
        raise ValueError("f must be nonnegative on the sampled grid")
    vals = np.maximum(vals, 0.0)
    fx = vals[-len(centers):]
    wvals, clamped = omega_value(spec, fx)
    worst = -np.inf
    witness = None
    evaluated = excluded = 0
    offset = 0
    for i, b in enumerate(balls):
        fy = vals[offset : offset + len(b)]
        offset += len(b)
        w = wvals[i]
        if w < FLAT_FLOOR:
            flat = fy < FLAT_FLOOR
            excluded += int(flat.sum())
            if (~flat).any():
                worst = np.inf
                witness = centers[i].tolist()
                evaluated += int((~flat).sum())
            continue
        ratios = fy / w
        evaluated += len(ratios)
        j = int(np.argmax(ratios))
        if ratios[j] > worst:
            worst = float(ratios[j])
            witness = centers[i].tolist()
    report = CheckReport(
        "omega-monotone",
        INCONCLUSIVE,
        params={"s": spec.s, "C": spec.C, "kind": spec.kind},
        counts={
            "evaluated": evaluated,
            "excluded": excluded,
            "clamped": int(clamped.sum()),
        },
    )
    if evaluated == 0:
        return report
    report.worst_ratio = float(worst)
    report.constant = float(worst)
    report.witness = witness
    report.verdict = PASS if worst <= spec.C * (1.0 + 1e-9) else FAIL
    return report
