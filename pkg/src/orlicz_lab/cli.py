"""Command-line front end: run a config, emit fixtures, diff reports.

Every run writes one schema-versioned JSON report plus CSV sidecars into
the output directory.  Reports are byte-stable for a fixed config and
seed; wall-clock facts live only under the "meta" key, which the compare
mode strips before diffing.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import difflib
import json
import os
import sys
import time
from typing import Any, Mapping, Optional

import numpy as np

from . import __version__, criteria, essnorm, orlicz, wct, young
from . import space as sp
from .config import (COMMANDS, SCHEMA_VERSION, ExperimentConfig, load_config)
from .errors import ConfigError, OrliczLabError

FIXTURES = ("example-2-10", "example-2-11", "lpq-divergent", "lpq-bounded",
            "essnorm-limsup")
STRICT_VERDICTS = ("violated", "diverges")
DEFAULT_KS = (1, 2, 4, 8, 16, 32, 64)


# -- serialization ----------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if np.isnan(f):
            return "nan"
        if np.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


def _canonical(doc: Any) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _report_entry(rep: criteria.CriterionReport) -> dict:
    return {"criterion_id": rep.criterion_id, "quantity": rep.quantity,
            "verdict": rep.verdict, "bound": rep.bound,
            "details": dict(rep.details)}


def _trace_rows(reports) -> list:
    rows = []
    for rep in reports:
        for label, term in rep.per_atom_trace:
            rows.append((rep.criterion_id, label, term))
    return rows


# -- parameter plumbing -----------------------------------------------------


def _param_float(cfg: ExperimentConfig, key: str, default=None,
                 required: bool = False) -> Optional[float]:
    val = cfg.params.get(key, default)
    if val is None:
        if required:
            raise ConfigError(f"params.{key}: required for command "
                              f"{cfg.command}")
        return None
    try:
        return float(val)
    except (TypeError, ValueError):
        raise ConfigError(f"params.{key}: expected a number") from None


def _param_int(cfg: ExperimentConfig, key: str, default: int) -> int:
    val = cfg.params.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"params.{key}: expected an integer")
    return val


def _cert_grid(cfg: ExperimentConfig) -> Optional[np.ndarray]:
    spec = cfg.params.get("cert_grid")
    if spec is None:
        return None
    if isinstance(spec, Mapping):
        try:
            return np.geomspace(float(spec["lo"]), float(spec["hi"]),
                                int(spec.get("n", 64)))
        except KeyError as exc:
            raise ConfigError(f"params.cert_grid: missing {exc.args[0]!r}") \
                from None
    if isinstance(spec, list):
        return np.asarray([float(v) for v in spec])
    raise ConfigError("params.cert_grid: expected an object with lo/hi/n "
                      "or a list of points")


def _need_finite(cfg: ExperimentConfig):
    if cfg.space is None or cfg.alg is None:
        raise ConfigError(f"space: command {cfg.command} needs a finite "
                          "measure space")
    return cfg.space, cfg.alg


def _need_weight(cfg: ExperimentConfig) -> sp.MeasurableFn:
    if cfg.weight is None:
        raise ConfigError(f"weight: required for command {cfg.command}")
    return cfg.weight


# -- command handlers -------------------------------------------------------


def _cmd_young(cfg: ExperimentConfig):
    yf = cfg.young_default("name", "phi")
    xs = cfg.params.get("x")
    if xs is None:
        raise ConfigError("params.x: required for command young")
    arr = np.atleast_1d(np.asarray(xs, dtype=float))
    what = cfg.params.get("what", "eval")
    if what not in ("eval", "conjugate", "inverse"):
        raise ConfigError("params.what: must be eval | conjugate | inverse")
    target = young.conjugate(yf) if what == "conjugate" else yf
    vals = target.inverse_many(arr) if what == "inverse" \
        else target.eval_many(arr)
    results = {"name": yf.describe(), "what": what,
               "x": arr, "values": vals,
               "value": float(vals[0]) if vals.size == 1 else None}
    sidecars = [("young_values.csv", ("x", "value"), list(zip(arr, vals)))]
    return results, sidecars


def _cmd_norm(cfg: ExperimentConfig):
    space, _ = _need_finite(cfg)
    u = _need_weight(cfg)
    phi = cfg.young_default("young", "phi")
    res = orlicz.lux_norm(phi, u)
    results = {"young": phi.describe(), "lux_norm": res.value,
               "modular_at_value": res.modular_at_value,
               "iterations": res.iterations,
               "modular": orlicz.modular(phi, u)}
    rows = list(zip((c.cell_id for c in space.cells), space.masses, u.arr))
    return results, [("norm_cells.csv", ("cell_id", "mass", "value"), rows)]


def _cmd_condexp(cfg: ExperimentConfig):
    space, alg = _need_finite(cfg)
    u = _need_weight(cfg)
    e = sp.cond_exp(u, alg)
    block_mass = np.bincount(alg.cell_block, weights=space.masses,
                             minlength=len(alg.blocks))
    rows = []
    blocks_out = []
    for bi, blk in enumerate(alg.blocks):
        cell_idx = int(np.argmax(alg.cell_block == bi))
        val = float(e.arr[cell_idx])
        blocks_out.append({"label": blk.label, "kind": blk.kind,
                           "value": val, "mass": float(block_mass[bi])})
        rows.append((blk.label, blk.kind, block_mass[bi], val))
    results = {"blocks": blocks_out, "total_mass": float(space.masses.sum())}
    return results, [("condexp_blocks.csv",
                      ("label", "kind", "mass", "value"), rows)]


def _cmd_opnorm(cfg: ExperimentConfig):
    _, alg = _need_finite(cfg)
    u = _need_weight(cfg)
    phi = cfg.young_default("phi", "phi")
    psi = cfg.params.get("psi")
    psi = cfg.young(str(psi), "params.psi") if psi is not None else phi
    kind = cfg.params.get("kind", "wct")
    op = wct.OperatorSpec(u, alg, phi, psi, kind=kind)
    est = wct.op_norm_lower(op, strategy=cfg.params.get("strategy", "all"),
                            budget=_param_int(cfg, "budget", 200),
                            seed=cfg.seed)
    results = {"phi": phi.describe(), "psi": psi.describe(), "kind": kind,
               "lower_bound": est.lower_bound,
               "candidates_tried": est.candidates_tried}
    rows = []
    if est.witness is not None:
        rows = list(zip((c.cell_id for c in op.space.cells),
                        est.witness.arr))
    return results, [("opnorm_witness.csv", ("cell_id", "value"), rows)]


def _criteria_reports(cfg: ExperimentConfig, which: str):
    atoms = cfg.atom_source
    u = None if cfg.symbolic is not None else _need_weight(cfg)
    if which == "lp_lq":
        p = _param_float(cfg, "p", required=True)
        q = _param_float(cfg, "q", required=True)
        return [criteria.lp_lq_check(p, q, u, atoms)]
    phi = cfg.young_default("phi", "phi")
    psi = cfg.young_default("psi", "psi")
    if which == "thm22":
        _, alg = _need_finite(cfg)
        reps = criteria.thm22_check(u, phi, psi, alg,
                                    finite_measure=bool(
                                        cfg.params.get("finite_measure", True)),
                                    gch_c=_param_float(cfg, "gch_C"))
        return list(reps)
    if which == "thm23":
        variant = cfg.params.get("variant", "necessity")
        theta = cfg.young_default("theta", "theta",
                                  required=(variant == "sufficiency"))
        return [criteria.thm23_check(u, phi, psi, atoms, variant=variant,
                                     theta=theta)]
    if which == "prop24":
        theta = cfg.young_default("theta", "theta", required=False)
        return [criteria.prop24_check(u, phi, psi, atoms, theta=theta,
                                      gch_c=_param_float(cfg, "gch_C"))]
    if which == "thm28":
        _, alg = _need_finite(cfg)
        theta = cfg.young_default("theta", "theta")
        reps = criteria.thm28_check(u, phi, psi, theta, alg,
                                    gch_c=_param_float(cfg, "gch_C"),
                                    cert_grid=_cert_grid(cfg))
        return list(reps)
    raise ConfigError("params.which: must be thm22 | thm23 | prop24 "
                      "| lp_lq | thm28")


def _cmd_criteria(cfg: ExperimentConfig):
    which = cfg.params.get("which")
    if which is None:
        raise ConfigError("params.which: required for command criteria")
    reports = _criteria_reports(cfg, str(which))
    results = {"which": which,
               "reports": [_report_entry(r) for r in reports]}
    return results, [("criteria_trace.csv",
                      ("criterion_id", "atom", "term"), _trace_rows(reports))]


def _cmd_essnorm(cfg: ExperimentConfig):
    phi = cfg.young_default("phi", "phi")
    if cfg.symbolic is not None:
        target, alg = cfg.symbolic, None
    else:
        _, alg = _need_finite(cfg)
        target = _need_weight(cfg)
    sw = essnorm.ess_norm_sandwich(
        target, phi, alg, gch_C=_param_float(cfg, "gch_C", 1.0),
        masses_to_zero=cfg.params.get("masses_to_zero"),
        no_convergent_subsequence=cfg.params.get("no_convergent_subsequence"))
    ks = [int(k) for k in cfg.params.get("ks", DEFAULT_KS)]
    curve = essnorm.truncation_distance_curve(
        target, phi, ks, alg, budget=_param_int(cfg, "budget", 120))
    results = {
        "phi": phi.describe(),
        "sandwich": {"lower": sw.lower, "upper": sw.upper,
                     "gch_C": sw.gch_C, "hypotheses": sw.hypotheses},
        "lower_beta": {"beta": sw.lower_beta.beta,
                       "source": sw.lower_beta.source,
                       "details": dict(sw.lower_beta.details)},
        "upper_beta": {"beta": sw.upper_beta.beta,
                       "source": sw.upper_beta.source,
                       "details": dict(sw.upper_beta.details)},
        "curve": [[k, d] for k, d in curve],
    }
    eps = _param_float(cfg, "eps")
    if eps is not None:
        h = target if alg is None else essnorm.criterion_function(
            target, phi, alg)
        rep = essnorm.level_set(h, eps, alg)
        results["level"] = {"eps": rep.epsilon, "members": list(rep.members),
                            "classification": rep.classification}
    return results, [("essnorm_curve.csv", ("k", "distance"), list(curve))]


def _cmd_gch(cfg: ExperimentConfig):
    _, alg = _need_finite(cfg)
    phi = cfg.young_default("phi", "phi")
    samples = _param_int(cfg, "samples", 200)
    est, pair = criteria.gch_constant(phi, alg, samples=samples,
                                      seed=cfg.seed)
    bound = _param_float(cfg, "gch_C")
    results = {"phi": phi.describe(), "estimate": est, "samples": samples,
               "bound": bound,
               "within_bound": (est <= bound + 1e-9) if bound is not None
               else None}
    rows = list(zip((c.cell_id for c in alg.space.cells),
                    pair[0].arr, pair[1].arr))
    return results, [("gch_witness.csv", ("cell_id", "f", "g"), rows)]


# -- verify-all battery -----------------------------------------------------


def _young_checks(cfg: ExperimentConfig, add) -> None:
    # nested numeric conjugations price each grid point; composed specs can
    # shrink the battery grid without touching the library-wide default
    grid_n = _param_int(cfg, "young_grid_n", young.GRID_POINTS)
    grid = young.standard_grid(n=grid_n)
    aa = np.geomspace(1e-6, 1e6, min(64, grid_n))
    for name, yf in cfg.young_specs.items():
        bi = young.conjugate(young.conjugate(yf))
        with np.errstate(over="ignore", invalid="ignore"):
            a = yf.eval_many(grid)
            b = bi.eval_many(grid)
            rel_all = np.abs(a - b) / np.maximum(1.0, np.abs(a))
        ok = np.isfinite(a) & np.isfinite(b) & (np.abs(a) < 1e290) \
            & (np.abs(b) < 1e290)
        rel = float(rel_all[ok].max()) if ok.any() else 0.0
        add(f"young.{name}.biconjugate",
            "pass" if rel <= 1e-6 else "fail", max_rel_err=rel)
        prod = yf.inverse_many(aa) * young.conjugate(yf).inverse_many(aa)
        bad = int((~((prod > aa) & (prod <= 2.0 * aa + 1e-8))).sum())
        add(f"young.{name}.inverse-bracket",
            "pass" if bad == 0 else "fail", violations=bad)


def _condexp_checks(cfg: ExperimentConfig, add) -> None:
    space, alg = cfg.space, cfg.alg
    phi = cfg.young_default("phi", "phi", required=False) \
        or young.power(2.0)
    rng = np.random.default_rng(cfg.seed)
    n_fns = _param_int(cfg, "n_fns", 50)
    n_cells = len(space.cells)
    defects = {k: 0.0 for k in ("averaging", "pull-out", "jensen",
                                "positivity", "support", "idempotence",
                                "contraction")}
    fails = {k: 0 for k in defects}

    def note(key, defect, bad):
        defects[key] = max(defects[key], float(defect))
        if bad:
            fails[key] += 1

    for _ in range(n_fns):
        f = sp.fn_from_array(space, rng.normal(0.0, 1.0, n_cells))
        ef = sp.cond_exp(f, alg)
        bsum_f = np.bincount(alg.cell_block, weights=f.arr * space.masses,
                             minlength=len(alg.blocks))
        bsum_e = np.bincount(alg.cell_block, weights=ef.arr * space.masses,
                             minlength=len(alg.blocks))
        d = np.abs(bsum_f - bsum_e).max()
        note("averaging", d, d > 1e-10 * max(1.0, np.abs(bsum_f).max()))

        gb = rng.normal(0.0, 1.0, len(alg.blocks))
        g = sp.fn_from_array(space, gb[alg.cell_block])
        lhs = sp.cond_exp(g * f, alg).arr
        rhs = g.arr * ef.arr
        d = np.abs(lhs - rhs).max()
        note("pull-out", d, d > 1e-10 * max(1.0, np.abs(rhs).max()))

        with np.errstate(over="ignore", invalid="ignore"):
            jl = phi.eval_many(np.abs(sp.cond_exp(f, alg).arr))
            jr = sp.cond_exp(sp.fn_from_array(
                space, phi.eval_many(np.abs(f.arr))), alg).arr
        mask = np.isfinite(jl) & np.isfinite(jr)
        d = float((jl - jr)[mask].max()) if mask.any() else 0.0
        note("jensen", d, d > 1e-9 * max(1.0, np.abs(jr[mask]).max()
                                         if mask.any() else 1.0))

        pos = sp.cond_exp(f.abs(), alg).arr
        note("positivity", -pos.min(), pos.min() < -1e-12)

        dead = rng.integers(0, len(alg.blocks))
        fz = np.where(alg.cell_block == dead, 0.0, f.arr)
        ez = sp.cond_exp(sp.fn_from_array(space, fz), alg).arr
        d = np.abs(ez[alg.cell_block == dead]).max()
        note("support", d, d > 0.0)

        eef = sp.cond_exp(ef, alg).arr
        d = np.abs(eef - ef.arr).max()
        note("idempotence", d, d > 1e-12 * max(1.0, np.abs(ef.arr).max()))

        nf = orlicz.lux_norm(phi, f).value
        ne = orlicz.lux_norm(phi, ef).value
        note("contraction", ne - nf, ne > nf * (1.0 + 1e-9) + 1e-12)

    for key in defects:
        add(f"condexp.{key}", "pass" if fails[key] == 0 else "fail",
            n_fns=n_fns, max_defect=defects[key], failures=fails[key])


def _cmd_verify_all(cfg: ExperimentConfig):
    checks: list[dict] = []
    sidecars: list[tuple] = []

    def add(name, status, **info):
        checks.append({"check": name, "status": status, **info})

    _young_checks(cfg, add)

    if cfg.space is not None:
        add("space.mass", "pass",
            total=float(cfg.space.masses.sum()),
            n_cells=len(cfg.space.cells), n_blocks=len(cfg.alg.blocks))
        _condexp_checks(cfg, add)
        if cfg.young_specs:
            phi = cfg.young_default("phi", "phi")
            est, _ = criteria.gch_constant(
                phi, cfg.alg, samples=_param_int(cfg, "gch_samples", 200),
                seed=cfg.seed)
            bound = _param_float(cfg, "gch_C")
            status = "pass"
            if bound is not None and est > bound + 1e-9:
                status = "fail"
            add("gch.estimate", status, estimate=est, bound=bound)

    def info_reports(label, reports):
        for rep in reports:
            add(f"criteria.{rep.criterion_id}", "info",
                verdict=rep.verdict, quantity=rep.quantity, bound=rep.bound)
        sidecars.append((f"{label}_trace.csv",
                         ("criterion_id", "atom", "term"),
                         _trace_rows(reports)))

    have_pair = {"phi", "psi"} <= set(cfg.young_specs) or \
        len(cfg.young_specs) >= 2
    if cfg.space is not None and cfg.weight is not None and have_pair:
        phi = cfg.young_default("phi", "phi")
        psi = cfg.young_default("psi", "psi")
        info_reports("thm22", criteria.thm22_check(
            cfg.weight, phi, psi, cfg.alg,
            gch_c=_param_float(cfg, "gch_C")))
        info_reports("thm23", [criteria.thm23_check(
            cfg.weight, phi, psi, (cfg.space, cfg.alg))])
        theta = cfg.young_default("theta", "theta", required=False)
        if theta is not None and "theta" in cfg.young_specs:
            info_reports("thm28", criteria.thm28_check(
                cfg.weight, phi, psi, theta, cfg.alg,
                gch_c=_param_float(cfg, "gch_C"),
                cert_grid=_cert_grid(cfg)))

    if cfg.symbolic is not None:
        if "p" in cfg.params and "q" in cfg.params:
            info_reports("lp_lq", [criteria.lp_lq_check(
                _param_float(cfg, "p", required=True),
                _param_float(cfg, "q", required=True),
                None, cfg.symbolic)])
        if have_pair:
            phi = cfg.young_default("phi", "phi")
            psi = cfg.young_default("psi", "psi")
            theta = cfg.young_default("theta", "theta", required=False)
            if "theta" not in cfg.young_specs:
                theta = None
            info_reports("prop24", [criteria.prop24_check(
                None, phi, psi, cfg.symbolic, theta=theta,
                gch_c=_param_float(cfg, "gch_C"))])
        b = essnorm.beta(cfg.symbolic)
        add("essnorm.beta", "info", beta=b.beta, source=b.source)

    results = {"checks": checks,
               "n_pass": sum(c["status"] == "pass" for c in checks),
               "n_fail": sum(c["status"] == "fail" for c in checks)}
    return results, sidecars


HANDLERS = {
    "young": _cmd_young,
    "norm": _cmd_norm,
    "condexp": _cmd_condexp,
    "opnorm": _cmd_opnorm,
    "criteria": _cmd_criteria,
    "essnorm": _cmd_essnorm,
    "gch": _cmd_gch,
    "verify-all": _cmd_verify_all,
}


# -- fixtures ---------------------------------------------------------------


def fixture_config(name: str) -> dict:
    if name == "example-2-10":
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "verify-all",
            "seed": 7,
            "young": {
                "phi": {"family": "exp_power", "p": 2},
                "psi": {"family": "power_scaled", "p": 2},
                "theta": {"family": "entropy", "p": 2},
            },
            "space": {"builder": "symmetric", "n_cells": 100},
            "weight": {"expression": "exp(n)"},
            "params": {"gch_C": 4.0,
                       "cert_grid": {"lo": 1e-3, "hi": 1.0, "n": 64}},
        }
    if name == "example-2-11":
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "verify-all",
            "seed": 7,
            "young": {
                "phi": {"family": "exp_quartic"},
                "psi": {"family": "log_quotient"},
                "theta": {"family": "compose_of",
                          "outer": {"family": "conjugate_of",
                                    "of": {"family": "exp_quartic"}},
                          "inner": {"family": "power", "p": 2},
                          "invert_inner": False},
            },
            "space": {"builder": "rotation", "n": 4,
                      "cells_per_interval": 25},
            "weight": {"expression": "1 + n/2"},
            "params": {"cert_grid": {"lo": 1e-3, "hi": 1.0, "n": 64},
                       "young_grid_n": 16},
        }
    if name == "lpq-divergent":
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "criteria",
            "seed": 7,
            "space": {"builder": "symbolic", "mass_fn": "2^(-n)",
                      "value_fn": "1", "n_max": 200},
            "params": {"which": "lp_lq", "p": 2, "q": 3},
        }
    if name == "lpq-bounded":
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "criteria",
            "seed": 7,
            "space": {"builder": "symbolic", "mass_fn": "2^(-n)",
                      "value_fn": "2^(-n)", "n_max": 200},
            "params": {"which": "lp_lq", "p": 2, "q": 3},
        }
    if name == "essnorm-limsup":
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "essnorm",
            "seed": 7,
            "young": {"phi": {"family": "power_scaled", "p": 2}},
            "space": {"builder": "symbolic", "mass_fn": "1/(n*(n+1))",
                      "value_fn": "1 + 1/n"},
            "params": {"ks": list(DEFAULT_KS)},
        }
    raise ConfigError(f"unknown fixture {name!r}; choose from {FIXTURES}")


def emit_fixture(name: str, output_dir: str = ".") -> str:
    doc = fixture_config(name)
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, f"{name}.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_canonical(doc))
    return path


# -- top-level flows --------------------------------------------------------


def _scan_verdicts(obj: Any) -> list:
    found = []
    if isinstance(obj, Mapping):
        for key, val in obj.items():
            if key == "verdict" and val in STRICT_VERDICTS:
                found.append(val)
            else:
                found.extend(_scan_verdicts(val))
    elif isinstance(obj, (list, tuple)):
        for val in obj:
            found.extend(_scan_verdicts(val))
    return found


def _summary_lines(cfg: ExperimentConfig, results: Mapping) -> list:
    lines = []
    for rep in results.get("reports", []):
        lines.append(f"{rep['criterion_id']}: {rep['verdict']} "
                     f"quantity={rep['quantity']} bound={rep['bound']}")
    for chk in results.get("checks", []):
        extra = ""
        if "verdict" in chk:
            extra = f" verdict={chk['verdict']}"
        lines.append(f"{chk['check']}: {chk['status']}{extra}")
    if "sandwich" in results:
        swc = results["sandwich"]
        lines.append(f"sandwich: [{swc['lower']}, {swc['upper']}] "
                     f"C={swc['gch_C']}")
    if "value" in results and results["value"] is not None:
        lines.append(f"value: {results['value']}")
    return lines


def run_config(path: str, seed: Optional[int] = None,
               output_dir: Optional[str] = None,
               strict: bool = False) -> int:
    cfg = load_config(path, seed=seed, output_dir=output_dir)
    t0 = time.perf_counter()
    results, sidecars = HANDLERS[cfg.command](cfg)
    runtime = time.perf_counter() - t0
    out_dir = cfg.output_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "seed": cfg.seed,
        "results": results,
        "meta": {
            "timestamp": datetime.datetime.now(
                datetime.timezone.utc).isoformat(),
            "runtime_s": round(runtime, 6),
            "version": __version__,
        },
    }
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(_canonical(report))
    for fname, header, rows in sidecars:
        _write_csv(os.path.join(out_dir, fname), header,
                   [tuple(_jsonable(v) for v in row) for row in rows])
    for line in _summary_lines(cfg, results):
        print(line)
    print(f"report: {report_path}")
    fails = [c for c in results.get("checks", [])
             if c.get("status") == "fail"]
    if fails:
        print(f"{len(fails)} check(s) failed", file=sys.stderr)
        return 1
    if strict and _scan_verdicts(results):
        return 2
    return 0


def compare_reports(path_a: str, path_b: str) -> int:
    docs = []
    for path in (path_a, path_b):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"compare: cannot read {path}: {exc}") from None
        if isinstance(doc, dict):
            doc.pop("meta", None)
        docs.append(_canonical(doc))
    if docs[0] == docs[1]:
        print("reports identical (meta excluded)")
        return 0
    diff = difflib.unified_diff(docs[0].splitlines(), docs[1].splitlines(),
                                fromfile=path_a, tofile=path_b, lineterm="")
    shown = 0
    for line in diff:
        print(line)
        shown += 1
        if shown >= 40:
            print("... diff truncated")
            break
    return 1


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="orlicz-lab",
        description="Run Orlicz-space operator experiments from JSON "
                    "configs and emit deterministic reports.")
    parser.add_argument("--config", metavar="PATH",
                        help="run the experiment described by this config")
    parser.add_argument("--emit-fixture", choices=FIXTURES,
                        metavar="NAME", dest="emit_fixture",
                        help=f"write a ready-to-run config; one of {FIXTURES}")
    parser.add_argument("--compare", nargs=2, metavar=("A", "B"),
                        help="diff two reports, ignoring the meta field")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--strict", action="store_true",
                        help="exit 2 when any verdict is violated/diverges")
    parser.add_argument("--output-dir", default=None,
                        help="where reports, sidecars, fixtures go")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    chosen = [x for x in (args.config, args.emit_fixture, args.compare)
              if x is not None]
    if len(chosen) != 1:
        print("error: give exactly one of --config, --emit-fixture, "
              "--compare", file=sys.stderr)
        return 1
    try:
        if args.config is not None:
            return run_config(args.config, seed=args.seed,
                              output_dir=args.output_dir,
                              strict=args.strict)
        if args.emit_fixture is not None:
            path = emit_fixture(args.emit_fixture,
                                args.output_dir or ".")
            print(f"wrote {path}")
            return 0
        return compare_reports(*args.compare)
    except (ConfigError, OrliczLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
