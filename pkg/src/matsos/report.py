"""Declarative run configuration and machine-readable reports.

A run configuration is a JSON object with a versioned schema: a matrix
function (a gallery reference with parameters, or inline expression
trees), a pipeline selection, decomposition parameters, a sampling grid
and a seed.  Reports echo the configuration and are byte-identical across
reruns of the same (config, seed) apart from the timing field.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .decompose import ScalarSosBackend, assemble_vector_fields, iterated_sd
from .gallery import (
    GALLERY,
    block_trace_comparability,
    failure_condition_check,
    incomparable_profiles_check,
    list_gallery,
    q_lambda_non_sos_certificate,
    q_lambda_positivity_certificate,
)
from .grids import Exclusion, GridSpec
from .matfun import SymMatFun
from .reporting import FAIL
from .verify import (
    HypothesisRefusal,
    RESIDUAL_GATE,
    decomposition_pipeline,
    diag_elliptic_check,
    quasiconformal_check,
    strong_check,
    subordinate_check,
)

SCHEMA_VERSION = 1

PIPELINES = ("decompose", "verify", "gallery", "all")

CONFIG_SCHEMA = {
    "schema_version": SCHEMA_VERSION,
    "type": "object",
    "fields": {
        "version": {"type": "integer", "const": SCHEMA_VERSION},
        "matrix": {
            "type": "object",
            "oneOf": [
                {
                    "gallery": "name from the catalog (see the list command)",
                    "params": "object of per-item parameters",
                },
                {
                    "dimension": "integer >= 1",
                    "nvars": "integer in 1..8",
                    "entries": "dimension x dimension array of expression trees",
                },
            ],
        },
        "pipeline": {"type": "string", "enum": list(PIPELINES)},
        "params": {
            "type": "object",
            "fields": {
                "p": "integer in 2..dimension+1",
                "epsilon": "number in [0.25, 1)",
                "delta": "number in (0, 1)",
                "delta2": "number in (0, 1)",
                "backend": "principal-sqrt | split-by-sign-cell",
            },
        },
        "grid": {
            "type": "object",
            "fields": {
                "box": "list of [lo, hi] per variable",
                "resolution": "integer >= 2",
                "exclude_radius": "number >= 0",
                "exclusions": "list of {radius, axes}",
                "max_points": "integer",
                "seed": "integer",
            },
        },
        "seed": {"type": "integer"},
        "out": {"type": "string", "optional": True},
    },
}


class ConfigError(ValueError):
    def __init__(self, field, reason):
        super().__init__(f"config field {field!r}: {reason}")
        self.field = field
        self.reason = reason


def _require(cond, field, reason):
    if not cond:
        raise ConfigError(field, reason)


def parse_grid(d, nvars, scale=1.0, seed=0):
    if d is None:
        d = {}
    box = d.get("box")
    if box is None:
        box = [[-1.0, 1.0]] * nvars
    _require(isinstance(box, list) and len(box) == nvars, "grid.box",
             f"need {nvars} [lo, hi] pairs")
    exclusions = []
    for i, e in enumerate(d.get("exclusions", [])):
        _require(isinstance(e, dict) and "radius" in e, f"grid.exclusions[{i}]",
                 "need an object with 'radius' (and optional 'axes')")
        axes = e.get("axes")
        exclusions.append(Exclusion(float(e["radius"]),
                                    tuple(axes) if axes is not None else None))
    res = int(d.get("resolution", 9) * scale)
    return GridSpec(
        box=tuple((float(lo), float(hi)) for lo, hi in box),
        resolution=max(res, 2),
        exclude_radius=float(d.get("exclude_radius",
                                   0.05 if not exclusions else 0.0)),
        exclusions=tuple(exclusions),
        max_points=int(d.get("max_points", 4096)),
        seed=int(d.get("seed", seed)),
    )


def validate_config(cfg):
    """Normalize and range-check a configuration dict."""
    _require(isinstance(cfg, dict), "<root>", "configuration must be an object")
    version = cfg.get("version", SCHEMA_VERSION)
    _require(version == SCHEMA_VERSION, "version",
             f"unsupported schema version {version!r}")
    matrix = cfg.get("matrix")
    _require(isinstance(matrix, dict), "matrix", "required object")
    if "gallery" in matrix:
        name = matrix["gallery"]
        _require(name in GALLERY, "matrix.gallery",
                 f"unknown gallery item {name!r}; see the list command")
        params = matrix.get("params", {})
        _require(isinstance(params, dict), "matrix.params", "must be an object")
    else:
        for key in ("dimension", "nvars", "entries"):
            _require(key in matrix, f"matrix.{key}", "required for inline matrices")
        _require(1 <= int(matrix["nvars"]) <= 8, "matrix.nvars", "must lie in 1..8")
    pipeline = cfg.get("pipeline", "all")
    _require(pipeline in PIPELINES, "pipeline", f"must be one of {PIPELINES}")
    params = cfg.get("params", {})
    _require(isinstance(params, dict), "params", "must be an object")
    eps = float(params.get("epsilon", 0.25))
    _require(0.25 <= eps < 1.0, "params.epsilon", "must lie in [0.25, 1)")
    delta = float(params.get("delta", 0.1))
    _require(0.0 < delta < 1.0, "params.delta", "must lie in (0, 1)")
    delta2 = float(params.get("delta2", 2.0 * delta))
    _require(0.0 < delta2 < 1.0, "params.delta2", "must lie in (0, 1)")
    backend = params.get("backend", "principal-sqrt")
    _require(backend in ("principal-sqrt", "split-by-sign-cell"),
             "params.backend", "unknown backend")
    return cfg


def build_matrix(cfg):
    matrix = cfg["matrix"]
    if "gallery" in matrix:
        item = GALLERY[matrix["gallery"]]
        return item.build(matrix.get("params", {})), item
    A = SymMatFun.from_json_dict(matrix)
    return A, None


def _check_p(p, n):
    _require(2 <= p <= n + 1, "params.p", f"must lie in 2..{n + 1}")
    return p


def _gallery_checks(name, A, cfg, grid, params):
    """Item-specific certificate batteries for the gallery pipeline."""
    gparams = cfg["matrix"].get("params", {})
    checks, extras = [], []
    if name in ("q-lambda", "q-lambda-dehomogenized"):
        lam = float(gparams.get("lam", 0.02))
        checks.append(q_lambda_positivity_certificate(lam))
        extras.append(q_lambda_non_sos_certificate(lam).to_json_dict())
        checks.append(diag_elliptic_check(A, grid))
        if name == "q-lambda":
            checks.append(subordinate_check(A, grid))
    elif name == "grushin-2x2":
        res = decomposition_pipeline(A, 2, params["epsilon"], params["delta"],
                                     params["delta2"], grid,
                                     backend=params["backend"])
        checks += res.reports
        extras.append({"decomposition": res.decomposition.to_json_dict()})
    elif name == "nondiag-noncomparable-2x2":
        checks.append(diag_elliptic_check(A, grid))
    elif name == "f-phi-psi":
        checks.append(diag_elliptic_check(A, grid))
        dp = 0.01
        checks.append(strong_check(A, 3, 0.3, dp, 0.01, grid))
        rep = strong_check(A, 3, 0.2, dp, 0.01, grid)
        rep.condition = "strongly-c4-sharpness-offdiag"
        checks.append(rep)
        tgrid = GridSpec(box=((0.003, 0.9),), resolution=200, exclude_radius=0.0)
        checks.append(failure_condition_check(None, 0.5, tgrid))
    elif name == "block-M7":
        checks.append(diag_elliptic_check(A, grid))
        checks.append(block_trace_comparability(A, grid))
    elif name == "block-N8":
        checks.append(diag_elliptic_check(A, grid))
        tgrid = GridSpec(box=((0.01, 0.9),), resolution=200, exclude_radius=0.0)
        checks.append(incomparable_profiles_check(tgrid))
    elif name == "block-P7":
        checks.append(diag_elliptic_check(A, grid))
        checks.append(quasiconformal_check(A, grid))
    else:  # pragma: no cover
        checks.append(diag_elliptic_check(A, grid))
    return checks, extras


def run_config(cfg, threads=1, grid_scale=1.0):
    """Execute a validated configuration; returns (report dict, exit code).

    Exit code 0 when every check passed, 2 on a hypothesis refusal or a
    failed certificate, 1 on execution errors (raised by the caller).
    """
    cfg = validate_config(cfg)
    t0 = time.monotonic()
    seed = int(cfg.get("seed", 0))
    A, item = build_matrix(cfg)
    grid_cfg = cfg.get("grid")
    if grid_cfg is None and item is not None:
        grid = item.default_grid(grid_scale, seed)
    else:
        grid = parse_grid(grid_cfg, A.nvars, grid_scale, seed)
    p = cfg.get("params", {})
    params = {
        "p": int(p.get("p", min(2, A.n + 1))),
        "epsilon": float(p.get("epsilon", 0.25)),
        "delta": float(p.get("delta", 0.1)),
        "delta2": float(p.get("delta2", 0.2)),
        "backend": ScalarSosBackend(
            name=p.get("backend", "principal-sqrt"),
            delta=float(p.get("delta", 0.1)),
            epsilon=float(p.get("epsilon", 0.25)),
        ),
    }
    pipeline = cfg.get("pipeline", "all")
    checks, extras = [], []
    decomposition = None
    refusal = None
    if pipeline == "gallery":
        _require(item is not None, "pipeline",
                 "gallery pipeline needs a gallery matrix")
        checks, extras = _gallery_checks(item.name, A, cfg, grid, params)
    elif pipeline == "verify":
        jobs = [
            lambda: diag_elliptic_check(A, grid),
            lambda: subordinate_check(A, grid),
            lambda: quasiconformal_check(A, grid),
        ]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                checks = [f.result() for f in [pool.submit(j) for j in jobs]]
        else:
            checks = [j() for j in jobs]
    elif pipeline == "decompose":
        pp = _check_p(params["p"], A.n)
        dec = iterated_sd(A, pp, grid)
        decomposition = assemble_vector_fields(
            dec, params["backend"], grid,
            epsilon=params["epsilon"], delta=params["delta"],
            delta2=params["delta2"],
        )
    else:  # all
        pp = _check_p(params["p"], A.n)
        try:
            res = decomposition_pipeline(
                A, pp, params["epsilon"], params["delta"], params["delta2"],
                grid, backend=params["backend"])
            checks = res.reports
            decomposition = res.decomposition
        except HypothesisRefusal as r:
            refusal = r.failed_family
            checks = r.reports
    report = {
        "tool": "matsos",
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "seed": seed,
        "checks": [c.to_json_dict() for c in checks],
        "gallery_certificates": extras,
        "refusal": refusal,
        "decomposition": (
            decomposition.to_json_dict() if decomposition is not None else None
        ),
        "counts": {
            "checks": len(checks),
            "failed": sum(1 for c in checks if c.verdict == FAIL),
            "grid_points": int(len(grid.sample_points())),
            "samples_evaluated": sum(
                c.counts.get("evaluated", 0) for c in checks
            ),
            "samples_excluded": sum(
                c.counts.get("excluded", 0) for c in checks
            ),
        },
        "timing": {"seconds": time.monotonic() - t0},
    }
    hard_failed = any(
        c.verdict == FAIL and c.condition != RESIDUAL_GATE for c in checks
    )
    code = 2 if (refusal is not None or hard_failed) else 0
    return report, code


def dump_report(report, sort_keys=True):
    return json.dumps(report, sort_keys=sort_keys, indent=2) + "\n"


def catalog_json():
    return json.dumps(list_gallery(), sort_keys=True, indent=2) + "\n"


def schema_json():
    return json.dumps(CONFIG_SCHEMA, sort_keys=True, indent=2) + "\n"
