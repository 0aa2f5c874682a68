"""Exact mixed partial derivatives of expression trees up to total order 4.

Derivatives are computed by forward propagation of truncated Taylor tables
("jets"), not symbolic expansion: every node maps the jets of its children
to its own jet through truncated series arithmetic, so products realize the
Leibniz rule and compositions realize Faa di Bruno as plain arithmetic.
Tables are batched over sample points (shape ``(ncoef, npts)``), which is
what makes grid sweeps over thousands of points cheap.

Singularities are never silent.  Each point carries three flags:

``invalid``
    evaluation failed there (reciprocal/sqrt domain, overflow, ...);
``poly_singular``
    the failure is a genuine singularity with at most polynomially growing
    jets nearby (1/r-type), as opposed to a domain violation or a
    super-polynomial blowup;
``flat_zero``
    the value is a certified infinite-order zero (a flat or bump primitive
    hit the flat point of its domain).

A product in which one factor is a certified flat zero annihilates siblings
that failed with a polynomially bounded singularity: flat times polynomial
growth is exactly zero, jets included.  This is what lets expressions like
``flat(r) * bump(t/r)`` evaluate to their true zero jets on the set r = 0
instead of erroring.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product as _iproduct

import numpy as np

from .expr import ScalarExpr, VariableCountError

__all__ = [
    "JetSpace",
    "JetBatch",
    "Jet4",
    "eval_jet",
    "eval_jet_batch",
    "eval_entries",
    "eval_values",
    "eval_log_values",
    "SingularDomainError",
    "LogEvalError",
    "MAX_ORDER",
]

MAX_ORDER = 4

_TINY_LOG = -710.0  # exp() underflows to exactly 0.0 below this


class SingularDomainError(ValueError):
    """Evaluation hit a declared singular set or a domain violation."""

    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} at point {np.asarray(point).tolist()}"
        super().__init__(message)
        self.point = point


class LogEvalError(ValueError):
    """Expression structure does not support exact log-space evaluation."""


# ---------------------------------------------------------------------------
# Jet spaces: multiindex enumeration and multiplication tables


@lru_cache(maxsize=None)
def space(nvars, order):
    return JetSpace(nvars, order)


class JetSpace:
    """Multiindex bookkeeping for jets in `nvars` variables up to `order`."""

    def __init__(self, nvars, order):
        if not 1 <= nvars <= 8:
            raise ValueError("nvars must be in 1..8")
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"order must be in 0..{MAX_ORDER}")
        self.nvars = nvars
        self.order = order
        multi = [
            m
            for m in _iproduct(range(order + 1), repeat=nvars)
            if sum(m) <= order
        ]
        multi.sort(key=lambda m: (sum(m), m))
        self.multi = tuple(multi)
        self.ncoef = len(multi)
        self.pos = {m: i for i, m in enumerate(multi)}
        self.total = np.array([sum(m) for m in multi])
        self.fact = np.array(
            [float(math.prod(math.factorial(k) for k in m)) for m in multi]
        )
        trip = []
        for i, mi in enumerate(multi):
            for j, mj in enumerate(multi):
                if sum(mi) + sum(mj) <= order:
                    k = self.pos[tuple(a + b for a, b in zip(mi, mj))]
                    trip.append((k, i, j))
        trip.sort()
        t = np.array(trip, dtype=np.intp).reshape(-1, 3)
        self._mk, self._mi, self._mj = t[:, 0], t[:, 1], t[:, 2]
        # every output row k occurs (k = k + 0), so reduceat groups cover
        # 0..ncoef-1 in order
        assert len(np.unique(self._mk)) == self.ncoef
        self._kstart = np.searchsorted(self._mk, np.arange(self.ncoef))
        if order >= 1:
            eye = np.eye(nvars, dtype=int)
            self.unit = [self.pos[tuple(row)] for row in eye.tolist()]
        else:
            self.unit = []

    def mul(self, a, b):
        """Truncated product of two Taylor-coefficient tables."""
        prod = a[self._mi] * b[self._mj]
        return np.add.reduceat(prod, self._kstart, axis=0)

    def const_table(self, values):
        out = np.zeros((self.ncoef, len(values)))
        out[0] = values
        return out


# ---------------------------------------------------------------------------
# Truncated univariate series helpers, tables of shape (order+1, npts)


def _series_mul(a, b):
    L = a.shape[0]
    out = np.zeros_like(a)
    for k in range(L):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def _series_exp(s):
    """exp of a truncated series, constant term included."""
    L = s.shape[0]
    shat = s.copy()
    shat[0] = 0.0
    out = np.zeros_like(s)
    out[0] = 1.0
    term = out.copy()
    for k in range(1, L):
        term = _series_mul(term, shat) / k
        out += term
    with np.errstate(over="ignore"):
        return out * np.exp(s[0])


def _series_recip(v):
    """1/v as a truncated series; caller guarantees v[0] != 0."""
    L = v.shape[0]
    r = -v / v[0]
    r[0] = 0.0
    out = np.zeros_like(v)
    out[0] = 1.0
    term = out.copy()
    for _ in range(1, L):
        term = _series_mul(term, r)
        out += term
    return out / v[0]


def _binom_series(u0, alpha, L):
    """Taylor table of t**alpha around u0 (u0 > 0 enforced by callers)."""
    out = np.empty((L, len(u0)))
    coeff = np.ones_like(u0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for m in range(L):
            out[m] = coeff * u0 ** (alpha - m)
            coeff = coeff * (alpha - m) / (m + 1)
    return out


# ---------------------------------------------------------------------------
# Batched jets


class JetBatch:
    """Taylor coefficient tables at a batch of points, with validity flags.

    `limit` holds the defined limiting value at invalid points when the
    primitive that failed still has one (sqrt at an interior zero of its
    argument); NaN otherwise.  Flat primitives consult it so that e.g.
    flat(sqrt(x^2+y^2)) is a certified zero jet at the origin.
    """

    __slots__ = ("space", "coef", "invalid", "poly_singular", "flat_zero", "limit")

    def __init__(self, space, coef, invalid, poly_singular, flat_zero, limit=None):
        self.space = space
        self.coef = coef
        self.invalid = invalid
        self.poly_singular = poly_singular
        self.flat_zero = flat_zero
        self.limit = (
            limit if limit is not None else np.full(coef.shape[1], np.nan)
        )

    @property
    def npts(self):
        return self.coef.shape[1]

    @property
    def values(self):
        return self.coef[0]

    def derivatives(self):
        """Derivative table D^mu (Taylor coefficients times mu!)."""
        return self.coef * self.space.fact[:, None]

    def derivative(self, mu):
        mu = tuple(mu)
        sp = self.space
        return self.coef[sp.pos[mu]] * sp.fact[sp.pos[mu]]

    def max_abs_of_order(self, m):
        """max over |mu| = m of |D^mu| per point (0.0 where none)."""
        rows = self.space.total == m
        if not rows.any():
            return np.zeros(self.npts)
        d = np.abs(self.coef[rows] * self.space.fact[rows, None])
        return d.max(axis=0)

    def gradient(self):
        sp = self.space
        return self.coef[sp.unit] * sp.fact[sp.unit, None]


def _new(space, npts):
    return JetBatch(
        space,
        np.zeros((space.ncoef, npts)),
        np.zeros(npts, dtype=bool),
        np.zeros(npts, dtype=bool),
        np.zeros(npts, dtype=bool),
    )


def _scrub(jet):
    """Zero out columns that are invalid or non-finite; flag the latter."""
    bad = ~np.isfinite(jet.coef).all(axis=0)
    newbad = bad & ~jet.invalid
    if newbad.any():
        jet.invalid = jet.invalid | newbad
        jet.poly_singular = jet.poly_singular & ~newbad
    if jet.invalid.any():
        jet.coef[:, jet.invalid] = 0.0
        jet.flat_zero = jet.flat_zero & ~jet.invalid
    return jet


def _eval_node(node, pts, sp, memo):
    got = memo.get(id(node))
    if got is not None:
        return got
    kind = node.kind
    npts = pts.shape[0]
    if kind == "const":
        out = _new(sp, npts)
        out.coef[0] = node.param
    elif kind == "var":
        out = _new(sp, npts)
        out.coef[0] = pts[:, node.param]
        if sp.order >= 1:
            out.coef[sp.unit[node.param]] = 1.0
    elif kind == "sum":
        kids = [_eval_node(c, pts, sp, memo) for c in node.children]
        out = _new(sp, npts)
        for k in kids:
            out.coef += k.coef
            out.invalid |= k.invalid
        out.poly_singular = np.ones(npts, dtype=bool)
        out.flat_zero = np.ones(npts, dtype=bool)
        for k in kids:
            out.poly_singular &= k.poly_singular | ~k.invalid
            out.flat_zero &= k.flat_zero
        out.poly_singular &= out.invalid
        out.flat_zero &= ~out.invalid
        out = _scrub(out)
    elif kind == "product":
        kids = [_eval_node(c, pts, sp, memo) for c in node.children]
        inv_any = np.zeros(npts, dtype=bool)
        flat_any = np.zeros(npts, dtype=bool)
        poly_ok = np.ones(npts, dtype=bool)
        for k in kids:
            inv_any |= k.invalid
            flat_any |= k.flat_zero
            poly_ok &= k.poly_singular | ~k.invalid
        annihilated = flat_any & inv_any & poly_ok
        out = _new(sp, npts)
        out.coef[0] = 1.0
        for k in kids:
            out.coef = sp.mul(out.coef, k.coef)
        out.invalid = inv_any & ~annihilated
        out.poly_singular = poly_ok & out.invalid
        out.flat_zero = flat_any & ~out.invalid
        out.coef[:, annihilated] = 0.0
        out = _scrub(out)
    elif kind == "intpow" and node.param >= 0:
        child = _eval_node(node.children[0], pts, sp, memo)
        out = _new(sp, npts)
        out.coef[0] = 1.0
        base, k = child.coef, node.param
        while k:
            if k & 1:
                out.coef = sp.mul(out.coef, base)
            k >>= 1
            if k:
                base = sp.mul(base, base)
        out.invalid = child.invalid.copy()
        out.poly_singular = child.poly_singular & out.invalid
        out.flat_zero = child.flat_zero & (node.param >= 1) & ~out.invalid
        out = _scrub(out)
    else:
        out = _compose(node, _eval_node(node.children[0], pts, sp, memo), sp)
    memo[id(node)] = out
    return out


def _compose(node, child, sp):
    """Unary primitives via truncated composition with a univariate series."""
    kind = node.kind
    npts = child.npts
    L = sp.order + 1
    u0 = child.values
    inv = child.invalid.copy()
    poly = np.zeros(npts, dtype=bool)
    flatz = np.zeros(npts, dtype=bool)
    ok = ~inv
    series = np.zeros((L, npts))

    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        if kind == "recip":
            sing = ok & (u0 <= 0.0)
            poly = sing & (u0 == 0.0) & ~child.flat_zero
            inv |= sing
            safe = np.where(sing, 1.0, u0)
            for m in range(L):
                series[m] = (-1.0) ** m * safe ** -(m + 1)
        elif kind == "sqrt":
            neg = ok & (u0 < 0.0)
            zero = ok & (u0 == 0.0)
            certified = zero & child.flat_zero
            hard = zero & ~child.flat_zero & (sp.order >= 1)
            inv |= neg | hard
            poly = hard
            flatz = certified
            limit0 = hard
            safe = np.where(u0 <= 0.0, 1.0, u0)
            series = _binom_series(safe, 0.5, L)
            series[:, zero & ~inv] = 0.0
        elif kind == "exp":
            series = np.zeros((L, npts))
            e0 = np.exp(u0)
            f = 1.0
            for m in range(L):
                series[m] = e0 / f
                f *= m + 1
        elif kind == "intpow":  # negative exponent only; k >= 0 handled above
            k = node.param
            zero = ok & (u0 == 0.0)
            poly = zero & ~child.flat_zero
            inv |= zero
            safe = np.where(u0 == 0.0, 1.0, u0)
            series = np.empty((L, npts))
            coeff = np.ones(npts)
            for m in range(L):
                series[m] = coeff * safe ** (k - m)
                coeff = coeff * (k - m) / (m + 1)
        elif kind == "flat":
            rescued = child.invalid & child.poly_singular & (child.limit == 0.0)
            inv &= ~rescued
            zero = (ok & ((u0 == 0.0) | child.flat_zero)) | rescued
            flatz = zero
            safe = np.where(u0 == 0.0, 1.0, u0)
            s = np.empty((L, npts))
            s[0] = -(safe ** -2.0)
            for m in range(1, L):
                s[m] = (-1.0) ** (m + 1) * (m + 1) * safe ** -(2.0 + m)
            dead = s[0] <= _TINY_LOG
            s[:, dead] = 0.0
            series = _series_exp(s)
            series[:, dead] = 0.0
            series[:, zero] = 0.0
        elif kind == "flatabs":
            rescued = child.invalid & child.poly_singular & (child.limit == 0.0)
            inv &= ~rescued
            zero = (ok & ((u0 == 0.0) | child.flat_zero)) | rescued
            flatz = zero
            safe = np.where(u0 == 0.0, 1.0, np.abs(u0))
            sgn = np.where(u0 >= 0.0, 1.0, -1.0)
            s = np.empty((L, npts))
            spow = np.ones(npts)
            for m in range(L):
                s[m] = -((-1.0) ** m) * safe ** -(m + 1.0) * spow
                spow = spow * sgn
            dead = s[0] <= _TINY_LOG
            s[:, dead] = 0.0
            series = _series_exp(s)
            series[:, dead] = 0.0
            series[:, zero] = 0.0
        elif kind == "bump":
            outside = ok & (np.abs(u0) >= 1.0)
            flatz = outside
            safe = np.where(np.abs(u0) >= 1.0, 0.0, u0)
            v = np.zeros((L, npts))
            v[0] = 1.0 - safe ** 2
            if L > 1:
                v[1] = -2.0 * safe
            if L > 2:
                v[2] = -1.0
            w = -_series_recip(v)
            w[0] += 1.0
            series = _series_exp(w)
            series[:, outside] = 0.0
        else:  # pragma: no cover
            raise AssertionError(kind)

    # Horner composition in (u - u0)
    w = child.coef.copy()
    w[0] = 0.0
    coef = sp.const_table(series[L - 1])
    for m in range(L - 2, -1, -1):
        coef = sp.mul(coef, w)
        coef[0] += series[m]
    # Where the child itself failed: reciprocal-type and bounded primitives
    # of a polynomially singular subtree stay polynomially singular; exp of
    # one does not (the blowup can be super-polynomial).
    if kind == "exp":
        carried = np.zeros(npts, dtype=bool)
    else:
        carried = child.poly_singular
    poly = np.where(child.invalid, carried, poly)
    out = JetBatch(sp, coef, inv, poly & inv, flatz & ~inv)
    if kind == "sqrt":
        out.limit[inv & limit0] = 0.0
    out.coef[:, out.flat_zero] = 0.0
    return _scrub(out)


# ---------------------------------------------------------------------------
# Public evaluation API


def _as_points(points, nvars):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] < nvars:
        raise VariableCountError(
            f"points have {pts.shape[1]} coordinates, expression uses {nvars}"
        )
    return pts


def eval_jet_batch(expr, points, order=MAX_ORDER, nvars=None, memo=None):
    """Jets of `expr` at many points; invalid points are masked, not raised.

    Parameters
    ----------
    expr : ScalarExpr
    points : array_like, shape (npts, nvars)
    order : int in 0..4
    nvars : optional variable count override (>= expr.nvars)
    memo : optional dict shared across calls evaluating several expressions
        at the same points with the same order (entries of a matrix function
        share subtrees, which then get evaluated once)
    """
    if not isinstance(expr, ScalarExpr):
        raise TypeError("expr must be a ScalarExpr")
    nv = max(expr.nvars, 1) if nvars is None else nvars
    pts = _as_points(points, nv)
    sp = space(max(nv, 1), order)
    if memo is None:
        memo = {}
    with np.errstate(all="ignore"):
        return _eval_node(expr, pts, sp, memo)


def eval_entries(exprs, points, order=MAX_ORDER, nvars=None):
    """Evaluate several expressions at shared points with a shared memo."""
    nv = nvars if nvars is not None else max([1] + [e.nvars for e in exprs])
    memo = {}
    return [eval_jet_batch(e, points, order, nvars=nv, memo=memo) for e in exprs]


class Jet4:
    """Strict single-point view of a jet: exact D^mu for all |mu| <= order."""

    def __init__(self, space, coef, point):
        self.space = space
        self._coef = coef
        self.point = point

    @property
    def order(self):
        return self.space.order

    @property
    def value(self):
        return float(self._coef[0])

    def derivative(self, mu):
        mu = tuple(int(k) for k in mu)
        if len(mu) != self.space.nvars:
            raise VariableCountError(
                f"multiindex length {len(mu)} != {self.space.nvars} variables"
            )
        i = self.space.pos.get(mu)
        if i is None:
            raise ValueError(f"multiindex {mu} exceeds order {self.space.order}")
        return float(self._coef[i] * self.space.fact[i])

    def table(self):
        d = self._coef * self.space.fact
        return {m: float(d[i]) for i, m in enumerate(self.space.multi)}

    def gradient(self):
        return np.array([self._coef[i] * self.space.fact[i] for i in self.space.unit])

    def max_abs_of_order(self, m):
        rows = self.space.total == m
        if not rows.any():
            return 0.0
        return float(np.max(np.abs(self._coef[rows] * self.space.fact[rows])))


def eval_jet(expr, point, order=MAX_ORDER, nvars=None):
    """Exact partials of `expr` at one point, raising on singular domains."""
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be an integer in 0..{MAX_ORDER}")
    point = np.asarray(point, dtype=float).reshape(-1)
    jb = eval_jet_batch(expr, point[None, :], order, nvars=nvars)
    if jb.invalid[0]:
        raise SingularDomainError("expression undefined", point=point)
    return Jet4(jb.space, jb.coef[:, 0].copy(), point)


def eval_values(expr, points, nvars=None):
    """Values at many points: returns (values, valid mask)."""
    jb = eval_jet_batch(expr, points, order=0, nvars=nvars)
    return jb.values.copy(), ~jb.invalid


# ---------------------------------------------------------------------------
# Exact log-space evaluation for positively-structured expressions


def eval_log_values(expr, points, nvars=None):
    """log(expr) at many points, computed in log space.

    Only defined for expressions built from nonnegative structure: products,
    positive constants, even powers, exp, sqrt, recip, the flat/bump
    primitives, and sums of such.  Exact where ordinary evaluation would
    underflow (flat factors at small arguments).  Raises LogEvalError when
    the structure cannot guarantee a sign.
    """
    nv = max(expr.nvars, 1) if nvars is None else nvars
    pts = _as_points(points, nv)
    return _log_eval(expr, pts)


def _plain_values(expr, pts):
    jb = eval_jet_batch(expr, pts, order=0, nvars=pts.shape[1])
    if jb.invalid.any():
        raise LogEvalError("inner value undefined at some points")
    return jb.values


def _log_eval(node, pts):
    kind = node.kind
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if kind == "const":
            if node.param < 0:
                raise LogEvalError("negative constant")
            return np.full(pts.shape[0], np.log(node.param))
        if kind == "var":
            v = pts[:, node.param]
            if (v < 0).any():
                raise LogEvalError("variable takes negative values")
            return np.log(v)
        if kind == "product":
            return sum(_log_eval(c, pts) for c in node.children)
        if kind == "sum":
            logs = np.stack([_log_eval(c, pts) for c in node.children])
            return np.logaddexp.reduce(logs, axis=0)
        if kind == "intpow":
            k = node.param
            if k % 2 == 0:
                try:
                    return k * _log_eval(node.children[0], pts)
                except LogEvalError:
                    v = _plain_values(node.children[0], pts)
                    return k * np.log(np.abs(v))
            return k * _log_eval(node.children[0], pts)
        if kind == "recip":
            return -_log_eval(node.children[0], pts)
        if kind == "sqrt":
            return 0.5 * _log_eval(node.children[0], pts)
        if kind == "exp":
            return _plain_values(node.children[0], pts)
        if kind == "flat":
            v = _plain_values(node.children[0], pts)
            return np.where(v == 0.0, -np.inf, -1.0 / np.where(v == 0, 1, v) ** 2)
        if kind == "flatabs":
            v = _plain_values(node.children[0], pts)
            return np.where(v == 0.0, -np.inf, -1.0 / np.abs(np.where(v == 0, 1, v)))
        if kind == "bump":
            v = _plain_values(node.children[0], pts)
            inside = np.abs(v) < 1.0
            safe = np.where(inside, v, 0.0)
            return np.where(inside, 1.0 - 1.0 / (1.0 - safe**2), -np.inf)
    raise LogEvalError(f"unsupported node kind {kind!r}")
