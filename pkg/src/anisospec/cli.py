"""Command-line driver: ``anisospec <command> --config <file> [overrides]``.

A config is a JSON object with four keys::

    {"command": "sweep",
     "theta":   {"kind": "radial_power", "gamma": 4, "params": {"sigma": 2}},
     "numeric": {"betas": [0.1, 0.05], "L": "auto", "tol": 1e-11},
     "output":  {"dir": "runs/g4", "formats": ["csv", "json", "plotdata"]}}

Every run writes its artifacts atomically and finishes with
``manifest.json`` (config hash, toolkit version, wall time, grid provenance).

Exit status: 0 when every hard assertion of the command holds, 1 when one
fails, 2 for usage or schema errors, 3 when a numerical solve did not
converge (artifacts are kept and flagged).
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import __version__
from .asym import (higher_eigenvalue_deficits, desym_gap, fit_power_law, lambda_reference,
                   localization_report, negative_scan, parity_split, sweep)
from .discretize import GridPolicy, trapezoid_grid, nystrom
from .eigen import top_k
from .kernels import KernelSpec, alpha_to_beta, rescale_beta_to_alpha
from .theta import ThetaSpec, validate

log = logging.getLogger("anisospec")

COMMANDS = ("model-eigs", "top-eigs", "sweep", "fit", "desym-gap", "localization",
            "parity", "conjecture", "negative-scan", "validate-theta")
FORMATS = ("csv", "json", "plotdata")

EXIT_OK, EXIT_ASSERT, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3

_pos_list = {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "theta"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "theta": {
            "type": "object",
            "required": ["kind", "gamma", "params"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["radial_power", "abs_sum", "custom"]},
                "gamma": {"type": "number", "exclusiveMinimum": 0},
                "params": {"type": "object"},
            },
        },
        "numeric": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "betas": {"type": "array", "items": {"type": "number", "minimum": 0},
                          "minItems": 1},
                "alphas": _pos_list,
                "n": {"type": "integer", "minimum": 2},
                "L": {"oneOf": [{"type": "number", "exclusiveMinimum": 0},
                                {"const": "auto"}]},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "k": {"type": "integer", "minimum": 1},
                "vark": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "points_per_width": {"type": "number", "exclusiveMinimum": 0},
                "tail_ratio": {"type": "number", "exclusiveMinimum": 1},
                "L_min": {"type": "number", "exclusiveMinimum": 0},
                "L_max": {"type": "number", "exclusiveMinimum": 0},
                "n_max": {"type": "integer", "minimum": 2},
                "n_check_max": {"type": "integer", "minimum": 2},
                "check": {"type": "boolean"},
                "Ls": _pos_list,
                "reference_n": {"type": "integer", "minimum": 8},
                "potential_scales": {"type": "array", "items": {"type": "number", "minimum": 0},
                                     "minItems": 1},
                "radii": _pos_list,
                "j_max": {"type": "integer", "minimum": 1, "maximum": 6},
                "window": {"oneOf": [{"enum": ["half", "all"]},
                                     {"type": "array", "items": {"type": "number"},
                                      "minItems": 2, "maxItems": 2}]},
                "input": {"type": "string"},
                "samples": {"type": "integer", "minimum": 64},
                "growth_tol": {"type": "number", "exclusiveMinimum": 0},
                "target": {"type": "number"},
                "target_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": list(FORMATS)},
                            "uniqueItems": True},
            },
        },
    },
}

# schemas of the exploratory report artifacts
REPORT_SCHEMAS = {
    "conjecture": {
        "type": "object",
        "required": ["betas", "alphas", "rows", "flags"],
        "properties": {
            "betas": _pos_list, "alphas": _pos_list,
            "flags": {"type": "array", "items": {"type": "string"}},
            "rows": {"type": "array", "minItems": 1, "items": {
                "type": "object",
                "required": ["j", "lambda_j", "rescaled", "relative_mismatch", "flags"],
                "properties": {"j": {"type": "integer", "minimum": 1},
                               "lambda_j": {"type": "number"},
                               "rescaled": {"type": "array", "items": {"type": "number"}},
                               "relative_mismatch": {"type": "number", "minimum": 0}}}},
        },
    },
    "negative-scan": {
        "type": "object",
        "required": ["rows"],
        "properties": {"rows": {"type": "array", "minItems": 1, "items": {
            "type": "object",
            "required": ["beta", "alpha", "n", "L", "min_eig", "min_eig_refined", "delta"],
            "properties": {"beta": {"type": "number", "minimum": 0},
                           "alpha": {"type": ["number", "null"]},
                           "n": {"type": "integer"}, "L": {"type": "number"},
                           "min_eig": {"type": "number"},
                           "min_eig_refined": {"type": ["number", "null"]},
                           "delta": {"type": ["number", "null"], "minimum": 0}}}}},
    },
}

_NONCONVERGED_FLAGS = ("lanczos_not_converged", "residual_above_tol", "grid_not_converged")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# config


@dataclass
class ExperimentConfig:
    command: str
    theta: dict
    numeric: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(d, CONFIG_SCHEMA)
            ThetaSpec.from_dict(d["theta"])
        except (jsonschema.ValidationError, ValueError, TypeError) as exc:
            msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
            raise UsageError(f"invalid config: {msg}") from exc
        d = copy.deepcopy(d)
        return cls(d["command"], d["theta"], d.get("numeric", {}), d.get("output", {}))

    def to_dict(self) -> dict:
        return {"command": self.command, "theta": copy.deepcopy(self.theta),
                "numeric": copy.deepcopy(self.numeric), "output": copy.deepcopy(self.output)}

    @property
    def theta_spec(self) -> ThetaSpec:
        return ThetaSpec.from_dict(self.theta)

    def semantic_hash(self) -> str:
        """sha256 of everything that affects the numbers (output location excluded)."""
        sem = {"command": self.command, "theta": self.theta, "numeric": self.numeric}
        blob = json.dumps(sem, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    @property
    def seed(self) -> int:
        return int(self.semantic_hash()[:8], 16)

    @property
    def formats(self) -> list[str]:
        return list(self.output.get("formats", FORMATS))

    @property
    def outdir(self) -> str:
        return self.output.get("dir", f"anisospec-{self.command}")

    def betas(self) -> list[float]:
        num = self.numeric
        if "betas" in num:
            return [float(b) for b in num["betas"]]
        if "alphas" in num:
            g = self.theta_spec.gamma
            return [alpha_to_beta(float(a), g) for a in num["alphas"]]
        raise UsageError(f"{self.command} needs numeric.betas or numeric.alphas")

    def policy(self) -> GridPolicy:
        num = self.numeric
        kw = {k: num[k] for k in ("points_per_width", "tail_ratio", "L_min", "L_max",
                                  "n_max", "n_check_max", "n") if k in num}
        if num.get("L", "auto") != "auto":
            kw["L"] = float(num["L"])
        return GridPolicy(**kw)


def load_config(path: str, overrides: argparse.Namespace | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    if overrides is not None:
        num = raw.setdefault("numeric", {})
        if overrides.beta is not None:
            num["betas"] = [overrides.beta]
            num.pop("alphas", None)
        if overrides.n is not None:
            num["n"] = overrides.n
        if overrides.L is not None:
            num["L"] = overrides.L
        if overrides.out is not None:
            raw.setdefault("output", {})["dir"] = overrides.out
    return ExperimentConfig.from_dict(raw)


# ---------------------------------------------------------------------------
# atomic artifact writing


def atomic_write(path: str, data: str | bytes) -> str:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: str, obj) -> str:
    return atomic_write(path, json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n")


def write_csv(path: str, rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(r[c])) if isinstance(r[c], (float, np.floating)) else r[c]
                    for c in columns])
    return atomic_write(path, buf.getvalue())


def emit_plotdata(curves: dict, outdir: str, prefix: str = "") -> list[str]:
    """Write each curve ``name -> (x, y)`` as two-column text ``<prefix><name>.dat``."""
    if not curves:
        raise ValueError("nothing to plot: empty report")
    paths = []
    for name, (x, y) in curves.items():
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size == 0 or x.size != y.size:
            raise ValueError(f"curve {name!r} is empty or ragged")
        text = "".join(f"{a!r} {b!r}\n" for a, b in zip(x.tolist(), y.tolist()))
        paths.append(atomic_write(os.path.join(outdir, f"{prefix}{name}.dat"), text))
    return paths


def sweep_curves(records, lambda1: float | None = None) -> dict:
    if not records:
        raise ValueError("nothing to plot: empty record list")
    curves = {
        "loglog_deficit": ([math.log(r.beta) for r in records],
                           [math.log(r.deficit) for r in records]),
        "rescaled_deficit": ([r.alpha for r in records],
                             [r.rescaled_deficit for r in records]),
    }
    if lambda1 is not None:
        a = [r.alpha for r in records]
        curves["lambda1_reference"] = ([min(a), max(a)], [lambda1, lambda1])
    return curves


def localization_curves(reports) -> dict:
    """One curve per radius: alpha against the spatial-mass deficit."""
    if not reports:
        raise ValueError("nothing to plot: empty report")
    curves = {}
    for i, R in enumerate(r.R for r in reports[0].rows):
        curves[f"spatial_deficit_R{R:g}"] = ([rep.alpha for rep in reports],
                                             [rep.rows[i].spatial_deficit for rep in reports])
    return curves


# ---------------------------------------------------------------------------
# commands


@dataclass
class Outcome:
    report: dict
    rows: list[dict] = field(default_factory=list)
    columns: list[str] = field(default_factory=list)
    curves: dict = field(default_factory=dict)
    assertions: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    provenance: list[dict] = field(default_factory=list)
    manifest_extra: dict = field(default_factory=dict)


SWEEP_COLUMNS = ["beta", "alpha", "n", "L", "mu", "deficit", "rescaled_deficit"]


def _reference(cfg: ExperimentConfig, theta: ThetaSpec, k: int = 1, scale: float = 1.0):
    num = cfg.numeric
    return lambda_reference(theta, k=k, n=num.get("reference_n", 2048),
                            Ls=num.get("Ls", (20.0, 30.0, 40.0)), potential_scale=scale)


def _record_flags(records) -> list[str]:
    return [f"beta={r.beta!r}: {f}" for r in records for f in r.flags]


def _provenance(records) -> list[dict]:
    return [{"beta": r.beta, "alpha": r.alpha, "n": r.n, "L": r.L, "scheme": r.grid.scheme}
            for r in records]


def _run_sweep(cfg, theta):
    num = cfg.numeric
    return sweep(theta, cfg.betas(), cfg.policy(), tol=num.get("tol", 1e-11),
                 check=num.get("check", True), seed=cfg.seed, vark=num.get("vark", 0.5))


def cmd_model_eigs(cfg, theta):
    k = cfg.numeric.get("k", 1)
    scales = cfg.numeric.get("potential_scales", [1.0])
    rows, reps, ok = [], [], True
    for s in scales:
        ref = _reference(cfg, theta, k, float(s))
        reps.append(ref.to_dict())
        ok &= ref.accepted or s == 0
        for j in range(k):
            row = {"potential_scale": float(s), "j": j + 1,
                   "extrapolated": float(ref.extrapolated[j])}
            for i, L in enumerate(ref.Ls):
                row[f"L{L:g}"] = float(ref.values[i, j])
            rows.append(row)
    cols = list(rows[0].keys())
    curves = {f"model_eigs_scale{s:g}": (np.arange(1, k + 1), [r["extrapolated"] for r in rows
                                                              if r["potential_scale"] == s])
              for s in map(float, scales)}
    extra = {}
    if "target" in cfg.numeric:
        # which potential scales reproduce a quoted lowest eigenvalue
        target = float(cfg.numeric["target"])
        tol = float(cfg.numeric.get("target_tol", 2e-2))
        lam1 = {float(r["potential_scale"]): r["extrapolated"] for r in rows if r["j"] == 1}
        extra["target_comparison"] = {
            "target": target, "tolerance": tol,
            "lambda1_by_scale": {f"{s:g}": v for s, v in lam1.items()},
            "matching_scales": [s for s, v in lam1.items() if abs(v - target) <= tol]}
    report = {"references": reps, **extra}
    return Outcome(report, rows, cols, curves, {"reference_accepted": bool(ok)},
                   manifest_extra=extra)


def cmd_top_eigs(cfg, theta):
    num = cfg.numeric
    k = num.get("k", 1)
    policy = cfg.policy()
    rows, prov, flags = [], [], []
    vec_dir = os.path.join(cfg.outdir, "vectors")
    for b in cfg.betas():
        alpha = rescale_beta_to_alpha(b, theta.gamma)
        n, L = policy.resolve(alpha, theta)
        log.info("resolved grid for beta=%g: n=%d L=%g", b, n, L)
        res = top_k(nystrom(KernelSpec.B(alpha, theta), trapezoid_grid(L, n)), k,
                    num.get("tol", 1e-11), seed=cfg.seed)
        flags += [f"beta={b!r}: {f}" for f in res.flags]
        for j, p in enumerate(res.pairs):
            rows.append({"beta": b, "alpha": alpha, "n": n, "L": L, "j": j + 1,
                         "value": p.value, "residual": p.residual})
        os.makedirs(vec_dir, exist_ok=True)
        res.top.export(os.path.join(vec_dir, f"psi_beta{b:.6g}"))
        prov.append({"beta": b, "alpha": alpha, "n": n, "L": L, "scheme": "trapezoid_uniform"})
    cols = ["beta", "alpha", "n", "L", "j", "value", "residual"]
    return Outcome({"rows": rows}, rows, cols, {}, {}, flags, prov)


def cmd_sweep(cfg, theta):
    recs = _run_sweep(cfg, theta)
    ref = _reference(cfg, theta)
    fit = fit_power_law(recs) if len(recs) >= 4 else None
    perron = all(r.perron.passed for r in recs)
    report = {"records": [r.to_dict() for r in recs], "lambda1": ref.lambda1,
              "reference": ref.to_dict(), "fit": fit.to_dict() if fit else None}
    return Outcome(report, [r.row() for r in recs], SWEEP_COLUMNS,
                   sweep_curves(recs, ref.lambda1), {"perron_certified": perron},
                   _record_flags(recs), _provenance(recs))


def _read_sweep_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise UsageError(f"{path} holds no records")
    return [float(r["beta"]) for r in rows], [float(r["deficit"]) for r in rows]


def cmd_fit(cfg, theta):
    num = cfg.numeric
    window = num.get("window", "half")
    window = tuple(window) if isinstance(window, list) else window
    if "input" in num:
        betas, deficits = _read_sweep_csv(num["input"])
        fit = fit_power_law(betas=betas, deficits=deficits, window=window, gamma=theta.gamma)
        recs = []
    else:
        recs = _run_sweep(cfg, theta)
        fit = fit_power_law(recs, window=window)
    rows = [{"beta": b, "deficit": d, "rescaled_deficit": r}
            for b, d, r in zip(fit.betas, fit.deficits, fit.rescaled)]
    curves = {"fit_window_loglog": (np.log(fit.betas), np.log(fit.deficits))}
    return Outcome({"fit": fit.to_dict(), "target_exponent": 2 / (theta.gamma + 1)}, rows,
                   ["beta", "deficit", "rescaled_deficit"], curves, {},
                   _record_flags(recs), _provenance(recs))


def cmd_desym_gap(cfg, theta):
    rep = desym_gap(theta, cfg.betas(), cfg.policy(), cfg.numeric.get("growth_tol", 0.10))
    rows = [r.__dict__ for r in rep.rows]
    prov = [{"beta": r.beta, "alpha": r.alpha, "n": r.n, "L": r.L,
             "scheme": "trapezoid_uniform"} for r in rep.rows]
    curves = {"desym_ratio": ([r.beta for r in rep.rows], [r.ratio for r in rep.rows])}
    return Outcome(rep.to_dict(), rows, ["beta", "alpha", "n", "L", "norm_diff", "ratio"],
                   curves, {"ratio_bounded": rep.bounded}, [], prov)


def cmd_localization(cfg, theta):
    radii = cfg.numeric.get("radii", [2.0, 4.0, 8.0])
    recs = _run_sweep(cfg, theta)
    ref = _reference(cfg, theta)
    reps = [localization_report(r, ref.lambda1, radii) for r in recs]
    rows = [{"alpha": rep.alpha, "R": row.R, "spatial_mass": row.spatial_mass,
             "spatial_deficit": row.spatial_deficit,
             "fourier_mass": "" if row.fourier_mass is None else row.fourier_mass}
            for rep in reps for row in rep.rows]
    return Outcome({"lambda1": ref.lambda1, "reports": [r.to_dict() for r in reps]}, rows,
                   ["alpha", "R", "spatial_mass", "spatial_deficit", "fourier_mass"],
                   localization_curves(reps), {"fourier_bound": all(r.fourier_ok for r in reps)},
                   _record_flags(recs), _provenance(recs))


def cmd_parity(cfg, theta):
    if not theta.is_even:
        raise UsageError("parity needs an even Theta")
    k = cfg.numeric.get("k", 3)
    reps = [parity_split(theta, b, cfg.policy(), k) for b in cfg.betas()]
    rows = [{"beta": r.beta, "j": j + 1, "even": r.even[j], "odd": r.odd[j]}
            for r in reps for j in range(len(r.even))]
    ok = all(r.even_top_exceeds_odd for r in reps)
    split_ok = all(r.full_check_error is None or r.full_check_error <= 1e-10 for r in reps)
    prov = [{"beta": r.beta, "alpha": r.alpha, "n": r.n, "L": r.L,
             "scheme": "trapezoid_uniform"} for r in reps]
    return Outcome({"reports": [r.to_dict() for r in reps]}, rows, ["beta", "j", "even", "odd"],
                   {}, {"even_top_exceeds_odd": ok, "block_spectrum_matches": split_ok}, [], prov)


def cmd_conjecture(cfg, theta):
    j_max = cfg.numeric.get("j_max", 3)
    ref = _reference(cfg, theta, k=j_max)
    rep = higher_eigenvalue_deficits(theta, cfg.betas(), j_max, cfg.policy(), ref,
                        tol=cfg.numeric.get("tol", 1e-11))
    rows = [{"j": row.j, "beta": b, "alpha": a, "rescaled_deficit": v, "lambda_j": row.lambda_j}
            for row in rep.rows for b, a, v in zip(rep.betas, rep.alphas, row.rescaled)]
    curves = {f"rescaled_j{row.j}": (rep.alphas, row.rescaled) for row in rep.rows}
    return Outcome(rep.to_dict(), rows, ["j", "beta", "alpha", "rescaled_deficit", "lambda_j"],
                   curves, {}, list(rep.flags))


def cmd_negative_scan(cfg, theta):
    num = cfg.numeric
    kw = {k: num[k] for k in ("points_per_width", "tail_ratio", "L_min", "L_max", "n")
          if k in num}
    policy = GridPolicy(n_max=num.get("n_max", 2048), **kw)
    rep = negative_scan(theta, cfg.betas(), policy)
    rows = [{k: ("" if v is None else v) for k, v in r.__dict__.items()} for r in rep.rows]
    prov = [{"beta": r.beta, "alpha": r.alpha, "n": r.n, "L": r.L,
             "scheme": "trapezoid_uniform"} for r in rep.rows]
    return Outcome(rep.to_dict(), rows, list(rep.rows[0].__dict__), {}, {}, [], prov)


def cmd_validate_theta(cfg, theta):
    rep = validate(theta, cfg.numeric.get("samples", 256), seed=cfg.seed % 2**32)
    return Outcome(rep.to_dict(), [], [], {}, {"theta_valid": rep.passed}, [])


HANDLERS = {
    "model-eigs": cmd_model_eigs, "top-eigs": cmd_top_eigs, "sweep": cmd_sweep,
    "fit": cmd_fit, "desym-gap": cmd_desym_gap, "localization": cmd_localization,
    "parity": cmd_parity, "conjecture": cmd_conjecture, "negative-scan": cmd_negative_scan,
    "validate-theta": cmd_validate_theta,
}


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment, write its artifacts and return the exit status."""
    theta = cfg.theta_spec
    stem = cfg.command.replace("-", "_")
    out = cfg.outdir
    t0 = time.perf_counter()
    outcome = HANDLERS[cfg.command](cfg, theta)
    wall = time.perf_counter() - t0
    files = []
    if "json" in cfg.formats:
        files.append(write_json(os.path.join(out, f"{stem}.json"), outcome.report))
    if "csv" in cfg.formats and outcome.rows:
        files.append(write_csv(os.path.join(out, f"{stem}.csv"), outcome.rows,
                               outcome.columns))
    if "plotdata" in cfg.formats and outcome.curves:
        files += emit_plotdata(outcome.curves, os.path.join(out, "plotdata"), f"{stem}_")
    nonconverged = [f for f in outcome.flags if any(t in f for t in _NONCONVERGED_FLAGS)]
    failed = [name for name, ok in outcome.assertions.items() if not ok]
    if nonconverged:
        status = EXIT_NONCONVERGED
    elif failed:
        status = EXIT_ASSERT
    else:
        status = EXIT_OK
    manifest = {
        "command": cfg.command, "config": cfg.to_dict(), "config_hash": cfg.semantic_hash(),
        "seed": cfg.seed, "version": __version__, "wall_time_s": wall,
        "grid_provenance": outcome.provenance, "assertions": outcome.assertions,
        "failed_assertions": failed, "flags": outcome.flags,
        "partial": bool(nonconverged), "exit_status": status,
        "artifacts": sorted(os.path.relpath(f, out) for f in files),
        **outcome.manifest_extra,
    }
    write_json(os.path.join(out, "manifest.json"), manifest)
    for name, ok in outcome.assertions.items():
        log.info("assertion %s: %s", name, "pass" if ok else "FAIL")
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anisospec",
                                description="Spectral experiments for anisotropic Cauchy kernels.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--beta", type=float, help="run a single beta instead of the config list")
    p.add_argument("--n", type=int, help="fixed grid size")
    p.add_argument("--L", type=float, help="fixed cutoff")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args)
        if cfg.command != args.command:
            raise UsageError(f"config is for {cfg.command!r}, not {args.command!r}")
        return run(cfg)
    except (UsageError, ValueError) as exc:
        print(f"anisospec: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
