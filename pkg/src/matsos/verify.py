"""Sampled verification of every decomposition hypothesis.

Each checker sweeps a grid, evaluates exact jets of the matrix entries, and
reduces the hypothesis to sup-ratio statements (see `matsos.reporting` for
the shared pass/fail conventions: flat 0/0 samples are excluded and
counted, and a pass needs both a bounded sup and no divergence trend
toward the origin).

The pipeline runs the checks in dependency order, refuses to decompose on
a hard failure (naming the failed family), and otherwise peels the matrix,
assembles the vector fields, and attaches the residual-block certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .decompose import (
    ScalarSosBackend,
    SquareDecomposition,
    assemble_vector_fields,
    default_delta_prime,
    iterated_sd,
)
from .reporting import (
    CheckReport,
    DEFAULT_CMAX,
    FAIL,
    FLAT_FLOOR,
    INCONCLUSIVE,
    PASS,
    merge_reports,
    sampled_bound,
)
from .symmat import _jacobi

__all__ = [
    "HypothesisRefusal",
    "diag_elliptic_check",
    "subordinate_check",
    "strong_check",
    "scalar_sos_hypothesis_check",
    "quasiconformal_check",
    "grushin_type_check",
    "decomposition_pipeline",
    "PipelineResult",
]

# Off-diagonal entries of an underflowed-but-comparable row are at most
# sqrt(flat floor) times the largest diagonal entry; beyond that the row is
# genuinely incomparable to the diagonal.
ROW_FLAT_FLOOR = 1e-150


class HypothesisRefusal(RuntimeError):
    """A hypothesis check failed hard; the pipeline refuses to decompose."""

    def __init__(self, failed_family, reports):
        super().__init__(f"hypothesis check failed: {failed_family}")
        self.failed_family = failed_family
        self.reports = reports


def _matrix_samples(A, grid):
    pts = grid.sample_points()
    vals, valid = A.values(pts)
    return pts, vals, valid


def _active_indices(a):
    """Indices kept for a single sample after dropping flat directions.

    Returns (indices, ok): a diagonal entry below the flat floor is dropped
    when its whole row is consistently flat; ok=False flags a flat diagonal
    against a non-flat off-diagonal entry, which no comparability constant
    survives.
    """
    n = a.shape[0]
    keep = []
    for i in range(n):
        if a[i, i] >= FLAT_FLOOR:
            keep.append(i)
            continue
        row = np.abs(np.delete(a[i], i))
        if row.size and row.max() > ROW_FLAT_FLOOR:
            return None, False
    return keep, True


def diag_elliptic_check(A, grid, cmax=DEFAULT_CMAX):
    """Positivity off the origin plus comparability to the own diagonal.

    Passes when the minimum eigenvalue is positive at every usable sample
    and a single pair (beta, alpha) brackets D^{-1/2} A D^{-1/2} across the
    grid with alpha/beta below the cap and no divergence toward the origin.
    Reports the tightest (beta, alpha).
    """
    pts, vals, valid = _matrix_samples(A, grid)
    betas, alphas, used_pts = [], [], []
    excluded = int((~valid).sum())
    bad_row_witness = None
    pd_witness = None
    pd_min = None
    for s in range(len(pts)):
        if not valid[s]:
            continue
        a = vals[s]
        keep, ok = _active_indices(a)
        if not ok:
            bad_row_witness = pts[s].tolist()
            continue
        if not keep:
            excluded += 1
            continue
        sub = a[np.ix_(keep, keep)]
        w, _ = _jacobi(sub)
        if w[0] <= 0 and pd_witness is None:
            pd_witness = pts[s].tolist()
            pd_min = float(w[0])
        d = np.sqrt(np.maximum(np.diag(sub), FLAT_FLOOR))
        B = sub / d[:, None] / d[None, :]
        wb, _ = _jacobi(B)
        betas.append(wb[0])
        alphas.append(wb[-1])
        used_pts.append(pts[s])
    if not betas:
        report = CheckReport("diagonal-comparability", INCONCLUSIVE,
                             counts={"evaluated": 0, "excluded": excluded})
        if bad_row_witness is not None:
            report.verdict = FAIL
            report.witness = bad_row_witness
            report.details["reason"] = "flat-diagonal-vs-nonflat-offdiagonal"
        return report
    betas = np.array(betas)
    alphas = np.array(alphas)
    used_pts = np.array(used_pts)
    rep = sampled_bound(
        "diagonal-comparability",
        alphas,
        np.maximum(betas, 0.0),
        used_pts,
        cmax=cmax,
        excluded=excluded,
    )
    beta, alpha = float(betas.min()), float(alphas.max())
    rep.details["beta"] = beta
    rep.details["alpha"] = alpha
    if rep.verdict == PASS and (beta <= 0 or alpha / beta > cmax):
        rep.verdict = FAIL
        rep.details["reason"] = "global-bracket-cap"
    if pd_witness is not None:
        rep.verdict = FAIL
        rep.witness = pd_witness
        rep.details["reason"] = "not-positive-definite"
        rep.details["min_eigenvalue"] = pd_min
    if bad_row_witness is not None:
        rep.verdict = FAIL
        rep.witness = bad_row_witness
        rep.details["reason"] = "flat-diagonal-vs-nonflat-offdiagonal"
    rep.worst_ratio = alpha / beta if beta > 0 else float("inf")
    rep.constant = rep.worst_ratio
    return rep


def subordinate_check(A, grid, cmax=DEFAULT_CMAX):
    """First derivatives of the matrix controlled by its quadratic form.

    Two independent routes are evaluated: the quadratic-form ratio
    sup_xi |(d_k A) xi|^2 / (xi^T A xi) via the eigenvalue pencil, and the
    entrywise criterion |grad a_ij|^2 <= C min(a_ii, a_jj).  Their verdicts
    agree on diagonally elliptical instances (that equivalence is covered
    by the test suite); the merged report carries both.
    """
    pts = grid.sample_points()
    ejets, valid = A.entry_jets(pts, order=1)
    n = A.n
    nv = A.nvars
    excluded = int((~valid).sum())
    use = np.where(valid)[0]
    avals = np.zeros((len(use), n, n))
    grads = np.zeros((len(use), nv, n, n))
    for (i, j), jb in ejets.items():
        avals[:, i, j] = avals[:, j, i] = jb.values[use]
        g = jb.gradient()[:, use]
        grads[:, :, i, j] = grads[:, :, j, i] = g.T
    qf_ratios = np.zeros(len(use))
    flat = np.zeros(len(use), dtype=bool)
    for s in range(len(use)):
        a = avals[s]
        gmax = np.abs(grads[s]).max() if nv else 0.0
        amax = np.abs(a).max()
        if amax < FLAT_FLOOR and gmax < FLAT_FLOOR:
            flat[s] = True
            continue
        if amax < FLAT_FLOOR:
            qf_ratios[s] = np.inf
            continue
        w, v = _jacobi(a)
        w = np.maximum(w, FLAT_FLOOR)
        ratio = 0.0
        for k in range(nv):
            Bk = grads[s, k]
            G = Bk.T @ Bk
            T = (v.T @ G @ v) / np.sqrt(w)[:, None] / np.sqrt(w)[None, :]
            if not np.isfinite(T).all():
                ratio = np.inf
                break
            wt, _ = _jacobi(T)
            ratio = max(ratio, float(wt[-1]))
        qf_ratios[s] = ratio
    qf_pts = pts[use][~flat]
    rep_qf = sampled_bound(
        "subordinate-quadratic-form",
        qf_ratios[~flat],
        np.ones((~flat).sum()),
        qf_pts,
        cmax=cmax,
        excluded=excluded + int(flat.sum()),
    )
    if rep_qf.worst_ratio is not None:
        rep_qf.constant = float(np.sqrt(max(rep_qf.worst_ratio, 0.0)))
        rep_qf.params["constant_is"] = "Gamma = sqrt(worst_ratio)"
    lhs, rhs, where = [], [], []
    for i in range(n):
        for j in range(i, n):
            g2 = (grads[:, :, i, j] ** 2).sum(axis=1)
            m = np.minimum(avals[:, i, i], avals[:, j, j])
            lhs.append(g2)
            rhs.append(m)
            where.append(pts[use])
    rep_ew = sampled_bound(
        "subordinate-entrywise",
        np.concatenate(lhs),
        np.concatenate(rhs),
        np.concatenate(where),
        cmax=cmax,
    )
    merged = merge_reports("subordinate", [rep_qf, rep_ew])
    merged.details["verdict_agreement"] = rep_qf.verdict == rep_ew.verdict
    return merged


def _delta_from_prime(dprime):
    """Invert dprime = 2 d (1 + d) / (2 + d) for the seminorm exponent."""
    b = 2.0 - dprime
    return (-b + np.sqrt(b * b + 16.0 * dprime)) / 4.0


def strong_check(
    A,
    ell,
    epsilon,
    delta_p,
    delta_pp,
    grid,
    delta=None,
    cmax=DEFAULT_CMAX,
    seminorm_centers=4,
    seminorm_cap=1e3,
):
    """The six differential-inequality families on entries up to order 4.

    For diagonal entries a_kk (k <= ell):
        |D^mu a_kk| <= C a_kk^([1 - |mu| eps]_+ + delta');  seminorm of
        order-4 derivatives bounded.
    For off-diagonal entries, with m_k = min_{s<=k} a_ss:
        inner (k < j <= ell):  |D^mu a_kj| <= C m_j^([1/2 + (2-|mu|) eps]_+ + delta'')
        cross (k <= ell < j):  same with m_k;  plus the two order-4
        seminorm families.

    The exponent is evaluated at the given epsilon where the base is <= 1;
    samples with base > 1 are checked at epsilon pinned to 1/4 (making them
    epsilon-independent) and counted separately.  Epsilon may lie anywhere
    in (0, 1) here so the sharpness regime below 1/4 can be expressed; the
    decomposition pipeline itself enforces [1/4, 1).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 1 <= ell <= A.n:
        raise ValueError("ell must lie in 1..n")
    pts = grid.sample_points()
    ejets, valid = A.entry_jets(pts, order=4)
    use = np.where(valid)[0]
    excluded = int((~valid).sum())
    upts = pts[use]
    n = A.n
    diag = np.stack([ejets[(i, i)].values[use] for i in range(n)], axis=1)
    mins = np.minimum.accumulate(diag, axis=1)

    def power_family(cond, pairs, base_fn):
        lhs_all, rhs_all, pt_all = [], [], []
        pinned = 0
        flat_pairs = 0
        for (k, j) in pairs:
            base = np.maximum(base_fn(k, j), 0.0)
            jb = ejets[(min(k, j), max(k, j))]
            offdiag = k != j
            orders = range(0 if offdiag else 1, 5)
            for m in orders:
                dmax = jb.max_abs_of_order(m)[use]
                if offdiag:
                    e_free = max(0.5 + (2 - m) * epsilon, 0.0) + delta_pp
                    e_pin = max(0.5 + (2 - m) * 0.25, 0.0) + delta_pp
                else:
                    e_free = max(1.0 - m * epsilon, 0.0) + delta_p
                    e_pin = max(1.0 - m * 0.25, 0.0) + delta_p
                expo = np.where(base <= 1.0, e_free, e_pin)
                pinned += int((base > 1.0).sum())
                with np.errstate(invalid="ignore"):
                    rhs = base**expo
                # an underflowed base against a representable-but-flat
                # derivative is a 0/0 sample in disguise
                keep = ~((base < FLAT_FLOOR) & (dmax < ROW_FLAT_FLOOR))
                flat_pairs += int((~keep).sum())
                lhs_all.append(dmax[keep])
                rhs_all.append(rhs[keep])
                pt_all.append(upts[keep])
        if not lhs_all:
            return CheckReport(cond, PASS, params={"vacuous": True},
                               counts={"evaluated": 0, "excluded": 0})
        rep = sampled_bound(
            cond,
            np.concatenate(lhs_all),
            np.concatenate(rhs_all),
            np.concatenate(pt_all),
            cmax=cmax,
            excluded=excluded + flat_pairs,
        )
        rep.details["pinned_base_gt1"] = pinned
        return rep

    d_sem = _delta_from_prime(delta_p) if delta is None else delta
    two_delta = min(2.0 * d_sem, 1.0)

    def seminorm_family(cond, pairs):
        if not pairs:
            return CheckReport(cond, PASS, params={"vacuous": True},
                               counts={"evaluated": 0, "excluded": 0})
        centers = upts[:: max(1, len(upts) // seminorm_centers)][:seminorm_centers]
        mus = [tuple(4 if a == b else 0 for a in range(A.nvars)) for b in range(A.nvars)]
        if A.nvars >= 2:
            mu = [0] * A.nvars
            mu[0], mu[1] = 2, 2
            mus.append(tuple(mu))
        entries = [A.entry(min(k, j), max(k, j)) for (k, j) in pairs]
        worst, wit = 0.0, None
        count = 0
        for x in centers:
            Y, Z = grid.sample_pairs(x)
            sep = np.linalg.norm(Y - Z, axis=1)
            ok0 = sep > 1e-300
            memo_y, memo_z = {}, {}
            for e in entries:
                jy = jets.eval_jet_batch(e, Y, order=4, nvars=A.nvars, memo=memo_y)
                jz = jets.eval_jet_batch(e, Z, order=4, nvars=A.nvars, memo=memo_z)
                ok = ok0 & ~jy.invalid & ~jz.invalid
                if not ok.any():
                    continue
                for mu in mus:
                    dy, dz = jy.derivative(mu)[ok], jz.derivative(mu)[ok]
                    est = float(
                        (np.abs(dy - dz) / sep[ok] ** two_delta).max()
                    )
                    count += 1
                    if est > worst:
                        worst, wit = est, x.tolist()
        rep = CheckReport(cond, PASS if worst <= seminorm_cap else FAIL,
                          worst_ratio=worst, constant=worst, witness=wit,
                          params={"holder_exponent": two_delta},
                          counts={"evaluated": count, "excluded": 0})
        return rep

    diag_pairs = [(k, k) for k in range(min(ell, n))]
    inner_pairs = [(k, j) for k in range(ell) for j in range(k + 1, ell)]
    cross_pairs = [(k, j) for k in range(ell) for j in range(ell, n)]
    reps = [
        power_family("diagonal-power-bound", diag_pairs,
                     lambda k, j: diag[:, k]),
        seminorm_family("diagonal-seminorm-bound", diag_pairs),
        power_family("offdiag-inner-power-bound", inner_pairs,
                     lambda k, j: mins[:, j]),
        seminorm_family("offdiag-inner-seminorm-bound", inner_pairs),
        power_family("offdiag-cross-power-bound", cross_pairs,
                     lambda k, j: mins[:, k]),
        seminorm_family("offdiag-cross-seminorm-bound", cross_pairs),
    ]
    merged = merge_reports(
        "strongly-c4",
        reps,
        params={
            "ell": ell,
            "epsilon": epsilon,
            "delta": d_sem,
            "delta_prime": delta_p,
            "delta_pprime": delta_pp,
        },
    )
    merged.details["family_verdicts"] = {r.condition: r.verdict for r in reps}
    return merged


def scalar_sos_hypothesis_check(f, delta, grid, nvars=None, cmax=DEFAULT_CMAX):
    """Second/fourth derivative power bounds admitting a scalar SOS.

    Reports sup |grad^2 f| / f^(2 delta (1+delta) / (2+delta)) and
    sup |grad^4 f| / f^(delta / (2+delta)); passes when both stay finite
    (capped, no divergence trend) over the punctured grid.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    nv = nvars or max(1, f.nvars)
    pts = grid.sample_points()
    jb = jets.eval_jet_batch(f, pts, order=4, nvars=nv)
    ok = ~jb.invalid
    excluded = int((~ok).sum())
    fv = np.maximum(jb.values[ok], 0.0)
    e2 = 2.0 * delta * (1.0 + delta) / (2.0 + delta)
    e4 = delta / (2.0 + delta)
    reps = [
        sampled_bound(
            "second-derivative-power-bound",
            jb.max_abs_of_order(2)[ok],
            fv**e2,
            pts[ok],
            params={"exponent": e2},
            cmax=cmax,
            excluded=excluded,
        ),
        sampled_bound(
            "fourth-derivative-power-bound",
            jb.max_abs_of_order(4)[ok],
            fv**e4,
            pts[ok],
            params={"exponent": e4},
            cmax=cmax,
        ),
    ]
    return merge_reports(
        "scalar-sos-hypotheses", reps, params={"delta": delta}
    )


def quasiconformal_check(Q, grid, reference=None, cmax=DEFAULT_CMAX):
    """Eigenvalues nonnegative and mutually comparable with one ratio K.

    With a reference diagonal entry supplied, also checks the stronger
    comparability of the block to reference * identity and reports the
    bracket (beta, alpha).
    """
    if Q.n == 0:
        return CheckReport("quasiconformal", PASS, worst_ratio=1.0, constant=1.0,
                           counts={"evaluated": 0, "excluded": 0},
                           params={"empty_block": True})
    pts, vals, valid = _matrix_samples(Q, grid)
    lmins, lmaxs, upts = [], [], []
    excluded = int((~valid).sum())
    refvals = None
    if reference is not None:
        refvals, refok = jets.eval_values(reference, pts, nvars=Q.nvars)
        refvals = np.where(refok, refvals, np.nan)
    neg_witness = None
    for s in range(len(pts)):
        if not valid[s]:
            continue
        w, _ = _jacobi(vals[s])
        scale = max(np.abs(vals[s]).max(), FLAT_FLOOR)
        if w[0] < -1e-10 * scale:
            neg_witness = pts[s].tolist()
            break
        if w[-1] < FLAT_FLOOR:
            excluded += 1
            continue
        lmins.append(max(w[0], 0.0))
        lmaxs.append(w[-1])
        upts.append(s)
    if neg_witness is not None:
        return CheckReport(
            "quasiconformal", FAIL, witness=neg_witness,
            details={"reason": "negative-eigenvalue"},
            counts={"evaluated": len(lmins) + 1, "excluded": excluded},
        )
    if not lmins:
        return CheckReport("quasiconformal", INCONCLUSIVE,
                           counts={"evaluated": 0, "excluded": excluded})
    lmins = np.array(lmins)
    lmaxs = np.array(lmaxs)
    spts = pts[upts]
    rep = sampled_bound("quasiconformal", lmaxs, lmins, spts, cmax=cmax,
                        excluded=excluded)
    rep.details["K"] = rep.worst_ratio
    reps = [rep]
    if refvals is not None:
        ref = refvals[upts]
        okref = np.isfinite(ref) & (ref > FLAT_FLOOR)
        if okref.any():
            lo = sampled_bound(
                "residual-pivot-comparability-upper",
                lmaxs[okref], ref[okref], spts[okref], cmax=cmax,
            )
            hi = sampled_bound(
                "residual-pivot-comparability-lower",
                ref[okref], lmins[okref], spts[okref], cmax=cmax,
            )
            with np.errstate(divide="ignore"):
                lo.details["alpha"] = float((lmaxs[okref] / ref[okref]).max())
                hi.details["beta"] = float((lmins[okref] / ref[okref]).min())
            reps += [lo, hi]
    if len(reps) == 1:
        return rep
    merged = merge_reports("quasiconformal", reps)
    merged.details["K"] = rep.worst_ratio
    return merged


def grushin_type_check(A, grid, degenerate_axes, ratio_cap=100.0, fibers=6):
    """Singular exactly where the declared coordinates vanish, diagonal
    entries varying only in them (up to bounded ratio).

    `degenerate_axes` names the variables carrying the degeneracy: the
    singular set is {x : x_a = 0 for all a in degenerate_axes} and each
    diagonal entry must be comparable to a function of those variables
    alone.
    """
    axes = sorted(set(int(a) for a in degenerate_axes))
    if not axes or any(not 0 <= a < A.nvars for a in axes):
        raise ValueError("degenerate_axes must name variables of A")
    pts = grid.sample_points()
    on_pts = pts.copy()
    on_pts[:, axes] = 0.0
    on_vals, on_ok = A.values(on_pts)
    sing_ok = True
    witness = None
    for s in range(len(on_pts)):
        if not on_ok[s]:
            continue
        w, _ = _jacobi(on_vals[s])
        scale = max(np.abs(on_vals[s]).max(), 1.0)
        if w[0] > 1e-10 * scale:
            sing_ok = False
            witness = on_pts[s].tolist()
            break
    off_vals, off_ok = A.values(pts)
    pd_ok = True
    rad = grid.exclusions[0].radius if grid.exclusions else 0.05
    for s in range(len(pts)):
        if not off_ok[s]:
            continue
        if np.linalg.norm(pts[s, axes]) < rad:
            continue
        w, _ = _jacobi(off_vals[s])
        if w[0] <= 0:
            pd_ok = False
            witness = pts[s].tolist()
            break
    comp = sorted(set(range(A.nvars)) - set(axes))
    worst = 1.0
    if comp:
        rng = np.random.default_rng(grid.seed)
        centers = pts[:: max(1, len(pts) // fibers)][:fibers]
        lo = np.array([grid.box[c][0] for c in comp])
        hi = np.array([grid.box[c][1] for c in comp])
        for x in centers:
            fiber = np.repeat(x[None, :], 16, axis=0)
            fiber[:, comp] = lo + rng.random((16, len(comp))) * (hi - lo)
            fvals, fok = A.values(fiber)
            for i in range(A.n):
                d = fvals[fok][:, i, i]
                d = d[d > FLAT_FLOOR]
                if len(d) >= 2:
                    worst = max(worst, float(d.max() / d.min()))
    verdict = PASS if (sing_ok and pd_ok and worst <= ratio_cap) else FAIL
    return CheckReport(
        "grushin-type",
        verdict,
        worst_ratio=worst,
        constant=worst,
        witness=witness,
        params={"degenerate_axes": axes, "ratio_cap": ratio_cap},
        details={"singular_on_subspace": sing_ok, "positive_off_subspace": pd_ok},
    )


RESIDUAL_GATE = "residual-subordinaticity-gate"


@dataclass
class PipelineResult:
    decomposition: SquareDecomposition | None
    reports: list = field(default_factory=list)

    @property
    def passed(self):
        # The residual gate only decides whether subordinaticity of the
        # residual is additionally claimed; its failure is not a failure
        # of the decomposition.
        return all(
            r.verdict != FAIL for r in self.reports if r.condition != RESIDUAL_GATE
        )

    def report_map(self):
        return {r.condition: r for r in self.reports}


def decomposition_pipeline(
    A,
    p,
    epsilon,
    delta,
    delta_pp,
    grid,
    backend=None,
    force=False,
    cmax=DEFAULT_CMAX,
    tail_ratio_cap=100.0,
):
    """Hypothesis checks, then peeling and vector-field assembly.

    Runs the diagonal-comparability check, the strong differential families
    at ell = p-1, and the pivot-tail comparability a_pp ~ ... ~ a_nn; any
    hard failure raises HypothesisRefusal naming the failed family (unless
    `force`).  On success returns the decomposition with certificates plus
    the residual quasiconformality report and, when the strong families
    also hold at ell = p, the subordinaticity report of the residual.

    p = 1 peels nothing: the matrix itself is the residual block and only
    the comparability and quasiconformal checks run.
    """
    n = A.n
    if not 1 <= p <= n + 1:
        raise ValueError(f"p must lie in 1..{n + 1}")
    if not 0.25 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [1/4, 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    delta_p = default_delta_prime(delta)
    backend = backend or ScalarSosBackend(delta=delta, epsilon=epsilon)
    reports = []

    def refuse(name):
        if not force:
            raise HypothesisRefusal(name, reports)

    rep = diag_elliptic_check(A, grid, cmax=cmax)
    reports.append(rep)
    if rep.verdict == FAIL:
        refuse("diagonal-comparability")

    if p >= 2:
        rep = strong_check(A, p - 1, epsilon, delta_p, delta_pp, grid,
                           delta=delta, cmax=cmax)
        reports.append(rep)
        if rep.verdict == FAIL:
            fams = rep.details.get("family_verdicts", {})
            bad = [k for k, v in fams.items() if v == FAIL]
            refuse(bad[0] if bad else "strongly-c4")

    if 2 <= p <= n:
        pts = grid.sample_points()
        dvals, dok = A.values(pts)
        lhs, rhs, where = [], [], []
        for j in range(p, n):
            lhs.append(dvals[dok][:, j, j])
            rhs.append(dvals[dok][:, p - 1, p - 1])
            lhs.append(dvals[dok][:, p - 1, p - 1])
            rhs.append(dvals[dok][:, j, j])
            where += [pts[dok], pts[dok]]
        if lhs:
            rep = sampled_bound(
                "pivot-tail-comparability",
                np.concatenate(lhs),
                np.concatenate(rhs),
                np.concatenate(where),
                cmax=tail_ratio_cap,
                params={"ratio_cap": tail_ratio_cap},
            )
        else:
            rep = CheckReport("pivot-tail-comparability", PASS,
                              params={"vacuous": True},
                              counts={"evaluated": 0, "excluded": 0})
        reports.append(rep)
        if rep.verdict == FAIL:
            refuse("pivot-tail-comparability")

    if p == 1:
        dec = SquareDecomposition(matrix=A, depth=1, residual=A)
        rep = quasiconformal_check(A, grid, cmax=cmax)
        reports.append(rep)
        return PipelineResult(dec, reports)

    dec = iterated_sd(A, p, grid)
    dec = assemble_vector_fields(dec, backend, grid, epsilon=epsilon,
                                 delta=delta, delta2=delta_pp)
    ref_entry = A.entry(p - 1, p - 1) if p <= n else None
    rep = quasiconformal_check(dec.residual, grid, reference=ref_entry, cmax=cmax)
    reports.append(rep)
    if p <= n:
        rep_p = strong_check(A, p, epsilon, delta_p, delta_pp, grid,
                             delta=delta, cmax=cmax)
        rep_p.condition = RESIDUAL_GATE
        rep_p.params["gates"] = "residual subordinaticity claim"
        reports.append(rep_p)
        if rep_p.verdict == PASS:
            reports.append(subordinate_check(dec.residual, grid, cmax=cmax))
    return PipelineResult(dec, reports)
