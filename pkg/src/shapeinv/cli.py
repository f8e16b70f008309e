"""Command-line front end: spectrum, verify, wavefunction, scan, general-check.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from importlib import metadata
from pathlib import Path

import numpy as np

from . import models, oracle, wavefunction as wf
from .config import ConfigError, RunConfig, load
from .shape import (UNBOUNDED, Sinh, bound_state_count, closed_form_spectrum,
                    erratum_sinh_energy, spectrum_by_iteration)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


# model assembly ----------------------------------------------------------------

def physical_1d(cfg: RunConfig, **over) -> models.PhysicalParams1D:
    p = {k: cfg.param(k) for k in ("mu", "omega", "hbar", "beta", "gamma")}
    p.update(over)
    return models.PhysicalParams1D(**p)


def physical_radial(cfg: RunConfig, **over) -> models.PhysicalParamsRadial:
    keys = ("mu", "omega", "hbar", "beta", "beta_prime", "D", "L2", "gamma")
    p = {k: cfg.param(k) for k in keys}
    p.update(over)
    return models.PhysicalParamsRadial(**p)


def sinh_setup(cfg: RunConfig, **over):
    """(family, energy offset, potential operator or None)."""
    p = {k: cfg.param(k) for k in ("a", "b", "g", "gamma_pot")}
    p.update(over)
    if p["gamma_pot"] is not None:
        if p["g"] is not None:
            raise ConfigError("give either g or gamma_pot for the sinh model, not both")
        spec = models.SinhPotentialSpec(p["a"], p["b"], p["gamma_pot"])
        mp = models.sinh_from_potential(spec)
        return mp.family, mp.energy_offset, models.sinh_potential_operator(spec)
    if p["g"] is None:
        raise ConfigError("the sinh model needs g or gamma_pot")
    fam = Sinh(p["a"], p["b"], p["g"]).validate()
    return fam, 0.0, None


def mapping_for(cfg: RunConfig, **over):
    if cfg.model == "oscillator1d":
        return models.map_1d(physical_1d(cfg, **over))
    if cfg.model == "radial":
        return models.map_radial(physical_radial(cfg, **over))
    raise ConfigError(f"model {cfg.model!r} has no physical mapping")


def _sinh_levels(fam, k_max):
    count = bound_state_count(fam)
    n = k_max + 1 if count is UNBOUNDED else min(k_max + 1, int(count))
    return n, count


# commands ------------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig) -> dict:
    rows, notes = [], []
    if cfg.model in ("oscillator1d", "radial"):
        mp = mapping_for(cfg)
        cf = closed_form_spectrum(mp.family, cfg.k_max).values
        it = spectrum_by_iteration(mp.family, cfg.k_max).values
        E = 0.5 * mp.hbar_omega * (mp.m * it + mp.energy_offset)
        for k in range(cfg.k_max + 1):
            row = {"k": k, "lambda_closed_form": cf[k], "lambda_iteration": it[k],
                   "energy": E[k]}
            if cfg.model == "oscillator1d":
                row["energy_known_formula"] = models.deformed_oscillator_energy(
                    physical_1d(cfg), k)
            rows.append(row)
        meta = {"family": repr(mp.family), "m": mp.m, "energy_offset": mp.energy_offset}
        if mp.diagnostics:
            meta["diagnostics"] = {k: (list(v) if isinstance(v, tuple) else v)
                                   for k, v in mp.diagnostics.items()}
        return _report("spectrum", cfg, rows, meta, notes)
    if cfg.model == "sinh":
        fam, offset, _ = sinh_setup(cfg)
        n, count = _sinh_levels(fam, cfg.k_max)
        cf = closed_form_spectrum(fam, max(n - 1, 0)).values
        it = spectrum_by_iteration(fam, max(n - 1, 0)).values
        for k in range(n):
            rows.append({"k": k, "status": "bound", "lambda_closed_form": cf[k],
                         "lambda_iteration": it[k], "energy": cf[k] + offset,
                         "superseded_formula": erratum_sinh_energy(
                             float(fam.a), float(fam.b), float(fam.g), k)})
        if count is not UNBOUNDED and count <= cfg.k_max:
            rows.append({"k": int(count), "status": "tower ends", "lambda_closed_form": None,
                         "lambda_iteration": None, "energy": None, "superseded_formula": None})
        notes.append("sinh levels follow a k (2g + (b - a) k); the column "
                     "superseded_formula is k(2g-b)(b-a) - k^2 (a-b)^2, which disagrees "
                     "with the composed operator (negative for every k >= 1 at b = 0)")
        meta = {"family": repr(fam), "bound_state_count": _count_repr(count),
                "energy_offset": offset}
        return _report("spectrum", cfg, rows, meta, notes)
    raise ConfigError("spectrum is not defined for the general model; use general-check")


def _count_repr(count):
    return "unbounded" if count is UNBOUNDED else int(count)


def _oracle_values(cfg: RunConfig, n: int):
    o = cfg.oracle
    if o.N < 64 or n > o.N // 4:
        raise ConfigError(f"oracle grid N={o.N} too small for {n} levels (need N >= 64, "
                          f"levels <= N/4)")
    if cfg.model in ("oscillator1d", "radial"):
        mp = mapping_for(cfg)
        op = (models.oscillator_1d_operator(physical_1d(cfg)) if cfg.model == "oscillator1d"
              else models.radial_operator(physical_radial(cfg)))
        res = oracle.solve(op, n, o.N, x_max=o.x_max)
        return 0.5 * mp.hbar_omega * np.asarray(res.eigenvalues), res
    fam, offset, pot = sinh_setup(cfg)
    op = pot if pot is not None else oracle.family_operator(fam)
    res = oracle.solve(op, n, o.N, x_max=o.x_max, continued=o.continued)
    return np.asarray(res.eigenvalues), res


def _analytic_values(cfg: RunConfig, n: int):
    if cfg.model in ("oscillator1d", "radial"):
        return mapping_for(cfg).energies(n - 1)
    fam, offset, _ = sinh_setup(cfg)
    return closed_form_spectrum(fam, n - 1).values + offset


def cmd_verify(cfg: RunConfig) -> dict:
    if cfg.model == "general":
        raise ConfigError("verify is not defined for the general model; use general-check")
    n = cfg.k_max + 1
    notes, meta = [], {}
    if cfg.model == "sinh":
        fam, _, _ = sinh_setup(cfg)
        n, count = _sinh_levels(fam, cfg.k_max)
        meta["bound_state_count"] = _count_repr(count)
        meta["superseded_formula"] = [erratum_sinh_energy(float(fam.a), float(fam.b),
                                                          float(fam.g), k) for k in range(n)]
        notes.append("superseded sinh formula listed for comparison only")
    analytic = np.asarray(cfg.reference if cfg.reference is not None
                          else _analytic_values(cfg, n), dtype=float)
    if len(analytic) < n:
        raise ConfigError(f"reference has {len(analytic)} values, need {n}")
    analytic = analytic[:n]
    if cfg.oracle.compare_to == "closed-form":
        numeric = _analytic_values(cfg, n)
        meta["numeric_source"] = "closed-form"
    else:
        numeric, res = _oracle_values(cfg, n)
        meta.update({"numeric_source": "oracle", "N": res.N, "N_companion": res.N_companion,
                     "richardson_error": list(res.errors)})
    comp = oracle.compare(list(analytic), list(numeric), cfg.oracle.tol, n)
    rows = [{"k": c.k, "analytic": c.analytic, "numeric": c.numeric,
             "rel_error": c.rel_error, "pass": c.passed} for c in comp.levels]
    meta.update({"tol": comp.tol, "passed": comp.passed, "worst_level": comp.worst,
                 "max_error": comp.max_error})
    report = _report("verify", cfg, rows, meta, notes)
    report["exit_code"] = EXIT_OK if comp.passed else EXIT_FAIL
    return report


def _family_for_state(cfg: RunConfig):
    if cfg.model in ("oscillator1d", "radial"):
        return mapping_for(cfg).family
    if cfg.model == "sinh":
        return sinh_setup(cfg)[0]
    raise ConfigError("wavefunction is not defined for the general model")


def cmd_wavefunction(cfg: RunConfig) -> dict:
    fam = _family_for_state(cfg)
    k = cfg.wavefunction.k
    if k < 0:
        raise ConfigError("wavefunction.k must be >= 0")
    if isinstance(fam, Sinh):
        count = bound_state_count(fam)
        if count is not UNBOUNDED and k >= count:
            raise ConfigError(f"k={k} is beyond the sinh tower of {int(count)} bound states")
    phi = wf.normalize(wf.excited_state(fam, k), wf.COVARIANT)
    smp = wf.sample(phi, cfg.wavefunction.samples)
    exact = phi(smp.x)
    res = wf.eigen_residual(fam, k)
    rows = [{"x": x, "q": q, "value": v, "measure_weight": w}
            for x, q, v, w in zip(smp.x, smp.q, smp.values, smp.measure_weights)]
    meta = {"k": k, "family": repr(fam), "eigenvalue": res["eigenvalue"],
            "eigen_residual_exact": res["exact"], "eigen_residual_pointwise": res["pointwise"],
            "node_count": wf.node_count(phi), "sample_max_deviation":
                float(np.max(np.abs(smp.values - exact)))}
    return _report("wavefunction", cfg, rows, meta, [])


def _scan_row(cfg: RunConfig, value: float) -> dict:
    p = cfg.scan.param
    if cfg.model == "sinh":
        fam, offset, _ = sinh_setup(cfg, **{p: value})
        n, _ = _sinh_levels(fam, cfg.k_max)
        E = list(closed_form_spectrum(fam, n - 1).values + offset)
    else:
        E = list(mapping_for(cfg, **{p: value}).energies(cfg.k_max))
    E += [None] * (cfg.k_max + 1 - len(E))
    row = {p: value}
    row.update({f"E_{k}": e for k, e in enumerate(E)})
    return row


def cmd_scan(cfg: RunConfig) -> dict:
    if cfg.scan is None or not cfg.scan.values:
        raise ConfigError("scan needs a non-empty scan.values range")
    if cfg.model == "general":
        raise ConfigError("scan is not defined for the general model")
    # rows are independent; map keeps input order
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(lambda v: _scan_row(cfg, v), cfg.scan.values))
    return _report("scan", cfg, rows, {"param": cfg.scan.param}, [])


def cmd_general_check(cfg: RunConfig) -> dict:
    if cfg.model != "general":
        raise ConfigError("general-check needs model 'general'")
    kind = cfg.param("g")
    if kind is None:
        raise ConfigError("params.g must name a function")
    alpha, beta_gen = cfg.param("alpha"), cfg.param("beta_gen")
    if alpha is None or beta_gen is None:
        raise ConfigError("params.alpha and params.beta_gen are required")
    spec = models.general_spec(kind, alpha, beta_gen, cfg.param("c"))
    lo, hi = cfg.param("domain")
    rep = models.build_general_pair(spec, models.Domain(lo, hi, "finite"), seed=cfg.seed)
    rows = [{"g": kind, "alpha": alpha, "beta_gen": beta_gen, "c": cfg.param("c"),
             "max_residual": rep.max_residual, "n_points": rep.n_points, "min_F": rep.min_F,
             "pass": rep.passed}]
    report = _report("general-check", cfg, rows, {"passed": rep.passed}, [])
    report["exit_code"] = EXIT_OK if rep.passed else EXIT_FAIL
    return report


COMMANDS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "wavefunction": cmd_wavefunction,
    "scan": cmd_scan,
    "general-check": cmd_general_check,
}


# emission -----------------------------------------------------------------------

def _clean(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, np.bool_):
        v = bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _report(command, cfg, rows, meta, notes) -> dict:
    return {
        "command": command,
        "model": cfg.model,
        "rows": _clean(rows),
        "metadata": _clean(dict(meta, config_hash=cfg.digest(),
                                versions={"artifact": _version(),
                                          "numpy": np.__version__})),
        "notes": list(notes),
        "exit_code": EXIT_OK,
    }


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v + 0.0, ".17g")  # + 0.0 folds -0.0 into 0
    return str(v)


def to_csv(rows) -> str:
    if not rows:
        return ""
    header = list(rows[0])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r.get(h)) for h in header])
    return buf.getvalue()


def to_json(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def emit(report: dict, fmt: str, out_dir=None, stream=None) -> None:
    stream = stream or sys.stdout
    name = report["command"]
    body = to_csv(report["rows"]) if fmt == "csv" else to_json(report)
    if out_dir is None:
        stream.write(body)
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.{fmt}").write_text(body, encoding="utf-8", newline="\n")
    if fmt == "csv":
        meta = {k: v for k, v in report.items() if k != "rows"}
        (out / f"{name}.meta.json").write_text(to_json(meta), encoding="utf-8", newline="\n")


# entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shapeinv",
                                 description="Exact ladder spectra of minimal-length models "
                                             "with a finite-difference cross-check.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", default=None, help="output directory (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="json")
    ap.add_argument("--levels", type=int, default=None, help="override k_max")
    ap.add_argument("--grid", type=int, default=None, help="override oracle N")
    ap.add_argument("--seed", type=int, default=None, help="override seed")
    return ap


def _diagnostic(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def run(argv=None, stdout=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load(args.config)
        if args.levels is not None:
            if args.levels < 0:
                raise ConfigError("--levels must be >= 0")
            cfg = replace(cfg, k_max=args.levels)
        if args.grid is not None:
            cfg = replace(cfg, oracle=replace(cfg.oracle, N=args.grid))
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        report = COMMANDS[args.command](cfg)
    except (ConfigError, ValueError, TypeError) as exc:
        _diagnostic(type(exc).__name__, str(exc))
        return EXIT_USAGE
    emit(report, args.format, args.out or cfg.out, stdout)
    return report["exit_code"]


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
