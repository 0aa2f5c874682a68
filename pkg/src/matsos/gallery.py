"""Builders and certificates for the concrete example matrix functions.

Everything here is closed-form: the positive-but-not-sum-of-squares
quadratic family, its flat smooth extension on the cylinder, the rank-two
degenerate example, the block assemblies, and the bounded-coefficient
approximation gap estimator.  Certificates are arithmetic identities and
sampled inequalities, not SDP solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import expr as ex
from . import jets
from .grids import GridSpec
from .matfun import StructureTags, SymMatFun, blockdiag
from .reporting import CheckReport, FAIL, PASS, sampled_bound
from .symmat import _jacobi

__all__ = [
    "build_q_lambda",
    "build_q_lambda_dehomogenized",
    "q_lambda_positivity_certificate",
    "q_lambda_non_sos_certificate",
    "NonSosCertificate",
    "FPhiPsiParams",
    "build_f_phi_psi",
    "failure_condition_check",
    "DeltaNuQuery",
    "delta_nu_estimate",
    "c1omega_norm_estimate",
    "build_grushin_2x2",
    "build_nondiag_noncomparable_2x2",
    "build_blocks",
    "GALLERY",
    "list_gallery",
]

LAMBDA_THRESHOLD = 2.0 / 81.0
DEFAULT_LAMBDA = 0.02  # comfortably inside the certificate region


# ---------------------------------------------------------------------------
# The quadratic family: positive definite away from 0, not a sum of squares
# of linear matrix polynomials for small coupling


def build_q_lambda(lam=DEFAULT_LAMBDA):
    """3x3 matrix of homogeneous quadratics in (x, y, z)."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    x, y, z = ex.var(0), ex.var(1), ex.var(2)
    c = ex.const
    return SymMatFun.from_rows(
        [
            [x**2 + c(lam) * y**2 + c(2.0) * z**2, -x * y, -x * z],
            [-x * y, y**2 + c(lam) * z**2 + c(2.0) * x**2, -y * z],
            [-x * z, -y * z, z**2 + c(lam) * x**2 + c(2.0) * y**2],
        ],
        nvars=3,
    )


def build_q_lambda_dehomogenized(lam=DEFAULT_LAMBDA):
    """The same family with z fixed to 1, in variables (x, y)."""
    x, y = ex.var(0), ex.var(1)
    c = ex.const
    return SymMatFun.from_rows(
        [
            [x**2 + c(lam) * y**2 + c(2.0), -x * y, -x],
            [-x * y, y**2 + c(lam) + c(2.0) * x**2, -y],
            [-x, -y, c(1.0) + c(lam) * x**2 + c(2.0) * y**2],
        ],
        nvars=2,
    )


def _fibonacci_sphere(count):
    i = np.arange(count, dtype=float) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    ct = 1.0 - 2.0 * i / count
    st = np.sqrt(np.maximum(1.0 - ct**2, 0.0))
    return np.stack([st * np.cos(phi), st * np.sin(phi), ct], axis=1)


def _q_lambda_values(lam, W):
    x, y, z = W[:, 0], W[:, 1], W[:, 2]
    out = np.empty((len(W), 3, 3))
    out[:, 0, 0] = x**2 + lam * y**2 + 2 * z**2
    out[:, 1, 1] = y**2 + lam * z**2 + 2 * x**2
    out[:, 2, 2] = z**2 + lam * x**2 + 2 * y**2
    out[:, 0, 1] = out[:, 1, 0] = -x * y
    out[:, 0, 2] = out[:, 2, 0] = -x * z
    out[:, 1, 2] = out[:, 2, 1] = -y * z
    return out


def _det_expansion(lam, W):
    """The closed-form determinant expansion of the quadratic family."""
    x2, y2, z2 = W[:, 0] ** 2, W[:, 1] ** 2, W[:, 2] ** 2
    cyc1 = x2 * z2**2 + z2 * y2**2 + y2 * x2**2  # x^2 z^4 + z^2 y^4 + y^2 x^4
    cyc2 = x2 * y2**2 + y2 * z2**2 + z2 * x2**2  # x^2 y^4 + y^2 z^4 + z^2 x^4
    sixth = x2**3 + y2**3 + z2**3
    xyz = x2 * y2 * z2
    return (
        lam**3 * xyz
        + lam**2 * (2.0 * cyc1 + cyc2)
        + 2.0 * lam * (sixth + 2.0 * cyc2 + 3.0 * xyz)
        + 4.0 * (cyc1 + xyz)
    )


def q_lambda_positivity_certificate(lam=DEFAULT_LAMBDA, sphere_count=10_000,
                                    slack_tol=1e-9):
    """Leading-minor lower bounds and the determinant expansion identity.

    On sphere samples, checks
        a11 >= min(lam, 1) |W|^2,
        2x2 leading minor >= min(lam, 2) (x^4 + y^4 + z^4),
        det >= 2 lam (x^6 + y^6 + z^6),
    each with slack >= -slack_tol, and the closed-form determinant
    expansion against the direct determinant to 1e-9 relative.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    W = _fibonacci_sphere(sphere_count)
    Q = _q_lambda_values(lam, W)
    x2, y2, z2 = W[:, 0] ** 2, W[:, 1] ** 2, W[:, 2] ** 2
    det3 = np.linalg.det(Q)
    minor2 = Q[:, 0, 0] * Q[:, 1, 1] - Q[:, 0, 1] ** 2
    slacks = {
        "entry-bound": Q[:, 0, 0] - min(lam, 1.0) * (x2 + y2 + z2),
        "minor-bound": minor2 - min(lam, 2.0) * (x2**2 + y2**2 + z2**2),
        "determinant-bound": det3 - 2.0 * lam * (x2**3 + y2**3 + z2**3),
    }
    expansion = _det_expansion(lam, W)
    rel = np.abs(expansion - det3) / np.maximum(1.0, np.abs(det3))
    worst_rel = float(rel.max())
    min_slacks = {k: float(v.min()) for k, v in slacks.items()}
    ok = all(v >= -slack_tol for v in min_slacks.values()) and worst_rel <= 1e-9
    rep = CheckReport(
        "quadratic-form-positivity",
        PASS if ok else FAIL,
        worst_ratio=worst_rel,
        constant=worst_rel,
        params={"lam": lam, "sphere_count": sphere_count},
        counts={"evaluated": sphere_count, "excluded": 0},
        details={"min_slacks": min_slacks, "det_expansion_rel_error": worst_rel},
    )
    if not ok:
        worst_name = min(min_slacks, key=min_slacks.get)
        rep.witness = W[int(np.argmin(slacks[worst_name]))].tolist()
        rep.details["failing"] = worst_name
    return rep


@dataclass
class NonSosCertificate:
    """Closed-form obstruction to a sum of squares of linear matrix forms.

    Equating coefficients in any hypothetical decomposition pins the
    coefficient-vector norms |m11|^2 = 1, |m13|^2 = 2, |m12|^2 = lam and
    the three mixed sums to -1; Cauchy-Schwarz then forces
    4 <= 18 sqrt(2 lam), impossible for lam < 2/81.
    """

    lam: float
    bound: float
    verdict: str  # "not-SOS-of-linear-forms" | "inconclusive"
    pinned: dict = field(default_factory=dict)

    def to_json_dict(self):
        return {
            "condition": "linear-sos-obstruction",
            "lam": self.lam,
            "bound": self.bound,
            "verdict": self.verdict,
            "pinned": self.pinned,
        }


def q_lambda_non_sos_certificate(lam=DEFAULT_LAMBDA):
    bound = 18.0 * math.sqrt(2.0 * lam)
    verdict = "not-SOS-of-linear-forms" if bound < 4.0 else "inconclusive"
    pinned = {
        "diag_norms_sq": 1.0,
        "corner_norms_sq": 2.0,
        "coupling_norms_sq": lam,
        "mixed_dot_sums": -1.0,
        "threshold": LAMBDA_THRESHOLD,
    }
    return NonSosCertificate(lam, bound, verdict, pinned)


# ---------------------------------------------------------------------------
# The flat smooth extension F on B(0,1) x (-1,1)


@dataclass(frozen=True)
class FPhiPsiParams:
    """Profiles for the flat cylinder example.

    phi, psi, window are callables mapping an argument expression to the
    profile expression; defaults are phi(t) = exp(-1/t^2),
    psi(t) = (phi(t) t^2)^4 and the standard bump window.
    """

    lam: float = DEFAULT_LAMBDA
    phi: callable = ex.flat
    psi: callable = None
    window: callable = ex.bump

    def psi_of(self, t):
        if self.psi is not None:
            return self.psi(t)
        return ex.intpow(ex.mul(self.phi(t), ex.intpow(t, 2)), 4)


def build_f_phi_psi(params=None):
    """phi(t) L(W) + (psi(t) + phi(r) window(t/r)) I3 on (x, y, z, t).

    Diagonally elliptical, flat and smooth on the cylinder; the window
    term keeps the diagonal alive on the slice t = 0, W != 0.
    """
    p = params or FPhiPsiParams()
    X, Y, Z, T = (ex.var(i) for i in range(4))
    L = build_q_lambda(p.lam)
    phi_t = p.phi(T)
    r = ex.sqrt(X**2 + Y**2 + Z**2)
    eta = ex.mul(p.phi(r), p.window(ex.mul(T, ex.recip(r))))
    iso = ex.add(p.psi_of(T), eta)
    entries = {}
    for i in range(3):
        for j in range(i, 3):
            e = ex.mul(phi_t, L.entry(i, j))
            if i == j:
                e = ex.add(e, iso)
            entries[(i, j)] = e
    return SymMatFun(3, 4, entries, StructureTags(degenerate_axes=(0, 1, 2, 3)))


def failure_condition_check(params, beta, grid, cmax=1e6):
    """Obstruction to squares of C^(1,beta) fields: psi <= C phi^(2/beta) t^(4/beta).

    Evaluated in log space on the 1-D grid over t (flat profiles underflow
    long before the asymptotics show otherwise).  Also sweeps
    tau(t) = psi / (phi t^2), reporting its decay over three decades of t
    (the obstruction needs tau -> 0; unbounded tau is the regime the
    decomposition machinery leaves open).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if grid.dim != 1:
        raise ValueError("failure_condition_check sweeps a 1-D grid over t")
    p = params or FPhiPsiParams()
    t = ex.var(0)
    pts = grid.sample_points()
    ts = np.abs(pts[:, 0])
    keep = ts > 0
    pts, ts = pts[keep], ts[keep]
    log_phi = jets.eval_log_values(p.phi(t), pts)
    log_psi = jets.eval_log_values(p.psi_of(t), pts)
    log_ratio = log_psi - (2.0 / beta) * log_phi - (4.0 / beta) * np.log(ts)
    log_tau = log_psi - log_phi - 2.0 * np.log(ts)
    with np.errstate(over="ignore"):
        ratio = np.exp(log_ratio)
    rep = sampled_bound(
        "sos-failure-condition",
        ratio,
        np.ones_like(ratio),
        pts,
        params={"beta": beta},
        cmax=cmax,
        radii=ts,
    )
    t_hi = max(abs(grid.box[0][0]), abs(grid.box[0][1]))
    marks = np.array([[t_hi * 10.0**-k] for k in range(3)])
    tau_marks = (
        jets.eval_log_values(p.psi_of(t), marks)
        - jets.eval_log_values(p.phi(t), marks)
        - 2.0 * np.log(marks[:, 0])
    ) / math.log(10.0)
    decreasing = bool(np.all(np.diff(tau_marks) < 0))
    tau_sup_log = float(log_tau.max())
    rep.details.update(
        {
            "obstruction": "active" if rep.verdict == PASS else "inactive",
            "tau_log10_at_decades": {
                f"t={m[0]:g}": float(v) for m, v in zip(marks, tau_marks)
            },
            "tau_to_zero": decreasing and tau_marks[-1] < -6.0,
            "divergence_condition_fails": bool(tau_sup_log < math.log(cmax)),
            "log10_worst_ratio": float(log_ratio.max() / math.log(10.0)),
        }
    )
    return rep


# ---------------------------------------------------------------------------
# Bounded-coefficient approximation gap on the sphere


@dataclass(frozen=True)
class DeltaNuQuery:
    """Search budget for the approximation-gap estimate.

    c0 bounds every coefficient (the a-priori bound C sqrt(sup L + 1) from
    the certificate argument); reading selects the matrix-dyad objective
    (default) or the literal scalar quadratic-form reading, which is kept
    available because the written definition mixes a matrix with a scalar
    and can vanish by matching at a single sphere point.
    """

    nu: int
    c0: float = 4.0
    sphere_count: int = 400
    multistarts: int = 8
    seed: int = 0
    reading: str = "dyad"

    def __post_init__(self):
        if not 0 <= self.nu <= 16:
            raise ValueError("nu must lie in 0..16")
        if self.c0 <= 0:
            raise ValueError("c0 must be positive")
        if self.reading not in ("dyad", "literal"):
            raise ValueError("reading must be 'dyad' or 'literal'")


def _sphere_matrix_values(L, W):
    vals, ok = L.values(W)
    if not ok.all():
        raise ValueError("matrix function undefined on a sphere sample")
    return vals


def delta_nu_estimate(L, query):
    """Smallest sampled gap between L on the sphere and nu bounded forms.

    dyad reading: min over coefficient vectors f_1..f_nu (|entries| <= c0)
    of the minimum over sphere samples of ||L(W) - sum f f^T||_F.
    literal reading: scalar forms S(W) = f . W against the quadratic form
    W^T L(W) W, objective |W^T L(W) W - sum S(W)^2| minimized.

    Multistart local search (bounded Nelder-Mead); every level seeds with
    the zero-padded best coefficients of nu - 1, so the estimate is
    monotone nonincreasing in nu by construction.
    """
    if L.n != 3:
        raise ValueError("expected a 3x3 quadratic matrix family")
    W = _fibonacci_sphere(query.sphere_count)
    Ls = _sphere_matrix_values(L, W)
    qs = np.einsum("si,sij,sj->s", W, Ls, W)

    def objective(c):
        f = c.reshape(-1, 3)
        if query.reading == "dyad":
            approx = np.einsum("li,lj->ij", f, f)
            gaps = np.linalg.norm(Ls - approx[None, :, :], axis=(1, 2))
        else:
            s = W @ f.T
            gaps = np.abs(qs - (s**2).sum(axis=1))
        return float(gaps.min())

    if query.reading == "dyad":
        base = float(np.linalg.norm(Ls, axis=(1, 2)).min())
    else:
        base = float(np.abs(qs).min())
    best_prev = np.zeros((0, 3))
    best_val = base
    for nu in range(1, query.nu + 1):
        rng = np.random.default_rng((query.seed, nu))
        starts = [np.vstack([best_prev, np.zeros((1, 3))])]
        for _ in range(query.multistarts - 1):
            starts.append(rng.uniform(-query.c0, query.c0, size=(nu, 3)))
        level_best_val = np.inf
        level_best = None
        bounds = [(-query.c0, query.c0)] * (3 * nu)
        for s0 in starts:
            res = minimize(
                objective,
                s0.ravel(),
                method="Nelder-Mead",
                bounds=bounds,
                options={"maxiter": 400 * nu, "fatol": 1e-12, "xatol": 1e-10},
            )
            cand = min(objective(s0.ravel()), float(res.fun))
            vec = res.x if res.fun <= objective(s0.ravel()) else s0.ravel()
            if cand < level_best_val:
                level_best_val = cand
                level_best = vec.reshape(nu, 3)
        best_prev = level_best
        best_val = min(best_val, level_best_val)
    return float(best_val)


# ---------------------------------------------------------------------------
# Norm functional on the unit ball


def c1omega_norm_estimate(h, omega, grid, pair_centers=6):
    """sup |h| + sup |grad h| + sampled sup |grad h(W) - grad h(W')| / omega(|W - W'|).

    h is a list of expressions (a vector field; wrap a scalar in a list);
    omega is a callable modulus.  Samples are the grid points inside the
    closed unit ball; the result is a lower bound of the true norm.
    """
    if isinstance(h, ex.ScalarExpr):
        h = [h]
    pts = grid.sample_points()
    pts = pts[np.linalg.norm(pts, axis=1) <= 1.0 + 1e-12]
    if len(pts) == 0:
        raise ValueError("grid has no samples in the unit ball")
    nv = pts.shape[1]
    sup_h = 0.0
    sup_grad = 0.0
    grads = []
    for comp in h:
        jb = jets.eval_jet_batch(comp, pts, order=1, nvars=nv)
        if jb.invalid.any():
            raise jets.SingularDomainError(
                "norm sample failed", point=pts[np.argmax(jb.invalid)]
            )
        grads.append(jb.gradient())
    vals = np.stack(
        [jets.eval_values(comp, pts, nvars=nv)[0] for comp in h], axis=0
    )
    sup_h = float(np.linalg.norm(vals, axis=0).max())
    G = np.stack(grads, axis=0)  # (ncomp, nvars, npts)
    sup_grad = float(np.sqrt((G**2).sum(axis=(0, 1))).max())
    centers = pts[:: max(1, len(pts) // pair_centers)][:pair_centers]
    holder = 0.0
    for x in centers:
        Y, Z = grid.sample_pairs(x)
        inside = (np.linalg.norm(Y, axis=1) <= 1.0) & (np.linalg.norm(Z, axis=1) <= 1.0)
        Y, Z = Y[inside], Z[inside]
        if len(Y) == 0:
            continue
        gy = np.stack(
            [jets.eval_jet_batch(c, Y, order=1, nvars=nv).gradient() for c in h]
        )
        gz = np.stack(
            [jets.eval_jet_batch(c, Z, order=1, nvars=nv).gradient() for c in h]
        )
        sep = np.linalg.norm(Y - Z, axis=1)
        ok = sep > 1e-300
        if not ok.any():
            continue
        num = np.sqrt(((gy - gz) ** 2).sum(axis=(0, 1)))[ok]
        den = np.array([omega(s) for s in sep[ok]])
        good = den > 0
        if good.any():
            holder = max(holder, float((num[good] / den[good]).max()))
    return sup_h + sup_grad + holder


# ---------------------------------------------------------------------------
# Small named examples and the block assemblies


def build_grushin_2x2(gamma=0.5):
    """[[1, g f], [g f, f^2]] with f = exp(-1/x^2): rank-two degenerate,
    a sum of two smooth dyads, never subordinate."""
    if not 0 < abs(gamma) < 1:
        raise ValueError("gamma must satisfy 0 < |gamma| < 1")
    f = ex.flat(ex.var(0))
    g = ex.const(gamma)
    return SymMatFun.from_rows(
        [[ex.ONE, ex.mul(g, f)], [ex.mul(g, f), ex.mul(f, f)]],
        nvars=1,
        tags=StructureTags(degenerate_axes=(0,)),
    )


def build_nondiag_noncomparable_2x2():
    """[[1, 1 - f], [1 - f, 1]]: positive definite off the origin but not
    comparable to any diagonal matrix function."""
    f = ex.flat(ex.var(0))
    off = ex.add(ex.ONE, ex.mul(ex.const(-1.0), f))
    return SymMatFun.from_rows([[ex.ONE, off], [off, ex.ONE]], nvars=1)


def _second_profile(t):
    return ex.flatabs(t)


def build_blocks(kind, params=None):
    """The three block assemblies built from the flat cylinder example.

    M7: blockdiag(I4, F) on 7 variables; the comparability pattern of the
        diagonal is (1, 1, 1, 1, f, f, f) with f the trace of F.
    N8: blockdiag(M7, G) on 8 variables, G built from a second flat
        profile exp(-1/|t|) incomparable with exp(-1/t^2); no admissible
        final block survives any permutation.
    P7: blockdiag(I5, diag(f, g)) with declared diagonal comparability
        pattern (1, 1, 1, 1, 1, f, g); defaults take radially flat f, g
        (any pair of elliptical flat smooth non-decomposable functions
        serves).
    """
    p = params or FPhiPsiParams()
    if kind == "M7":
        eye4 = SymMatFun.constant(np.eye(4), nvars=7)
        F = build_f_phi_psi(p)
        M = blockdiag([eye4, F], nvars=7,
                      tags=StructureTags(degenerate_axes=(0, 1, 2, 3),
                                         constant_blocks=((0, 4),)))
        return M
    if kind == "N8":
        M = build_blocks("M7", p)
        q = FPhiPsiParams(lam=p.lam, phi=_second_profile, window=p.window)
        G = build_f_phi_psi(q)
        return blockdiag([M, G], nvars=8,
                         tags=StructureTags(degenerate_axes=(0, 1, 2, 3),
                                            constant_blocks=((0, 4),)))
    if kind == "P7":
        prm = params if isinstance(params, dict) else {}
        r5sq = ex.add(*[ex.intpow(ex.var(i), 2) for i in range(5)])
        f = prm.get("f", ex.flat(ex.sqrt(r5sq)))
        g = prm.get("g", ex.flatabs(ex.sqrt(r5sq)))
        eye5 = SymMatFun.constant(np.eye(5), nvars=7)
        tail = SymMatFun.from_rows([[f, ex.ZERO], [ex.ZERO, g]], nvars=7)
        return blockdiag(
            [eye5, tail],
            nvars=7,
            tags=StructureTags(degenerate_axes=(0, 1, 2, 3, 4),
                               constant_blocks=((0, 5),)),
        )
    raise ValueError(f"unknown block kind {kind!r}; use M7, N8 or P7")


def block_trace_comparability(M, grid, cmax=1e6):
    """M7 against blockdiag(I4, trace(F) I3): sampled bracket constants."""
    F = M.submatrix(range(4, 7))
    tr = ex.add(*[F.entry(i, i) for i in range(3)])
    pts = grid.sample_points()
    vals, ok = M.values(pts)
    tvals, tok = jets.eval_values(tr, pts, nvars=M.nvars)
    use = ok & tok & (tvals > 1e-300)
    lhs, rhs = [], []
    for s in np.where(use)[0]:
        ref = np.diag([1.0] * 4 + [tvals[s]] * 3)
        d = 1.0 / np.sqrt(np.diag(ref))
        B = vals[s] * d[:, None] * d[None, :]
        w, _ = _jacobi(B)
        lhs.append(w[-1])
        rhs.append(max(w[0], 0.0))
    return sampled_bound(
        "block-trace-comparability",
        np.array(lhs),
        np.array(rhs),
        pts[use],
        cmax=cmax,
        excluded=int((~use).sum()),
    )


def incomparable_profiles_check(grid):
    """The two flat profiles of N8 have unbounded mutual ratio: the sampled
    sup of exp(-1/|t|) / exp(-1/t^2) diverges toward the origin."""
    t = ex.var(0)
    pts = grid.sample_points()
    la = jets.eval_log_values(ex.flatabs(t), pts)
    lb = jets.eval_log_values(ex.flat(t), pts)
    ratio = np.exp(np.minimum(la - lb, 700.0))
    return sampled_bound(
        "flat-profile-incomparability",
        ratio,
        np.ones_like(ratio),
        pts,
        cmax=1e6,
    )


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class GalleryItem:
    name: str
    anchor: str
    dimension: int
    nvars: int
    param_schema: dict
    build: callable
    default_grid: callable


def _grid1(scale=1.0, seed=0):
    return GridSpec(box=((-1.0, 1.0),), resolution=int(81 * scale) | 1,
                    exclude_radius=0.05, seed=seed)


def _grid2(scale=1.0, seed=0):
    return GridSpec(box=((-1.0, 1.0), (-1.0, 1.0)),
                    resolution=int(21 * scale) | 1, exclude_radius=0.05,
                    seed=seed)


def _grid3(scale=1.0, seed=0):
    return GridSpec(box=((-1.0, 1.0),) * 3, resolution=int(9 * scale) | 1,
                    exclude_radius=0.05, seed=seed)


def _grid4(scale=1.0, seed=0):
    from .grids import Exclusion

    return GridSpec(
        box=((-0.9, 0.9),) * 3 + ((-0.9, 0.9),),
        resolution=int(7 * scale) | 1,
        exclusions=(
            Exclusion(0.05, axes=(0, 1, 2)),
            Exclusion(0.2, axes=(3,)),
        ),
        seed=seed,
    )


def _grid7(scale=1.0, seed=0):
    return GridSpec(box=((-0.9, 0.9),) * 7, resolution=3, max_points=600,
                    exclude_radius=0.05, seed=seed)


def _grid8(scale=1.0, seed=0):
    return GridSpec(box=((-0.9, 0.9),) * 8, resolution=3, max_points=500,
                    exclude_radius=0.05, seed=seed)


GALLERY = {
    item.name: item
    for item in [
        GalleryItem(
            "block-M7",
            "identity block over a flat 3x3 tail; decomposable only down to"
            " the flat block",
            7, 7,
            {"lam": {"type": "number", "default": DEFAULT_LAMBDA}},
            lambda prm: build_blocks("M7", FPhiPsiParams(lam=prm.get("lam", DEFAULT_LAMBDA))),
            _grid7,
        ),
        GalleryItem(
            "block-N8",
            "two flat tails with incomparable profiles; no admissible final"
            " block under any permutation",
            10, 8,
            {"lam": {"type": "number", "default": DEFAULT_LAMBDA}},
            lambda prm: build_blocks("N8", FPhiPsiParams(lam=prm.get("lam", DEFAULT_LAMBDA))),
            _grid8,
        ),
        GalleryItem(
            "block-P7",
            "identity block over two incomparable scalar flats on the"
            " diagonal",
            7, 7,
            {},
            lambda prm: build_blocks("P7", prm),
            _grid7,
        ),
        GalleryItem(
            "f-phi-psi",
            "flat cylinder example: sharp off-diagonal differential bounds,"
            " obstruction to squares of C^{1,beta} fields",
            3, 4,
            {"lam": {"type": "number", "default": DEFAULT_LAMBDA}},
            lambda prm: build_f_phi_psi(FPhiPsiParams(lam=prm.get("lam", DEFAULT_LAMBDA))),
            _grid4,
        ),
        GalleryItem(
            "grushin-2x2",
            "rank-two degenerate matrix: sum of two smooth dyads, never"
            " subordinate",
            2, 1,
            {"gamma": {"type": "number", "default": 0.5}},
            lambda prm: build_grushin_2x2(prm.get("gamma", 0.5)),
            _grid1,
        ),
        GalleryItem(
            "nondiag-noncomparable-2x2",
            "positive definite off the origin yet comparable to no diagonal"
            " matrix function",
            2, 1,
            {},
            lambda prm: build_nondiag_noncomparable_2x2(),
            _grid1,
        ),
        GalleryItem(
            "q-lambda",
            "positive quadratic matrix family that is no sum of squares of"
            " linear matrix forms below the coupling threshold",
            3, 3,
            {"lam": {"type": "number", "default": DEFAULT_LAMBDA}},
            lambda prm: build_q_lambda(prm.get("lam", DEFAULT_LAMBDA)),
            _grid3,
        ),
        GalleryItem(
            "q-lambda-dehomogenized",
            "the quadratic family on the affine slice z = 1",
            3, 2,
            {"lam": {"type": "number", "default": DEFAULT_LAMBDA}},
            lambda prm: build_q_lambda_dehomogenized(prm.get("lam", DEFAULT_LAMBDA)),
            _grid2,
        ),
    ]
}


def list_gallery():
    """Stable, alphabetized catalog of the named examples."""
    out = []
    for name in sorted(GALLERY):
        item = GALLERY[name]
        out.append(
            {
                "name": item.name,
                "anchor": item.anchor,
                "dimension": item.dimension,
                "nvars": item.nvars,
                "params": item.param_schema,
            }
        )
    return out
