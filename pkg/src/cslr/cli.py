"""Command-line front end: JSON experiment configs drive data generation,
recovery, benchmark sweeps, and result comparison.

Subcommands: gen, recover, bench, compare. Exit codes: 0 success, 1 compare
tolerances exceeded, 2 config error, 3 data error, 4 solver failure. All
grids travel in the CSLR1 binary format; results are CSV (full %.17g
precision, '.' decimal) and JSON manifests without timestamps so reruns are
byte-comparable.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import jsonschema
import numpy as np

from .baselines import (
    BaselineConfig,
    ap_prox_solve,
    ap_solve,
    irls_direct,
    svt_solve,
    svt_uv_solve,
)
from .giraf import (
    ConfigError,
    SolverConfig,
    SolverError,
    admm_ls,
    cg_ls,
    filter_update,
    giraf_solve,
)
from .grids import ComplexGrid, GridFormatError, IndexBox, load_grid, save_grid
from .lifting import BudgetError, LiftingSpec, gram_surrogate
from .models import (
    RectPhantom,
    SamplingOp,
    add_noise,
    dirac_fourier,
    gradient_weighting,
    nmse,
    pwc_phantom,
    random_diracs,
    random_mask,
    rect_fourier,
    snr_db,
)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_SOLVER = 4


class ConfigurationError(Exception):
    """Structurally valid JSON that does not describe a runnable experiment."""


class DataError(Exception):
    """Input files that exist but do not fit together."""


_BOX_SCHEMA = {
    "type": "object",
    "properties": {
        "offset": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "extent": {"type": "array", "items": {"type": "integer", "minimum": 1},
                   "minItems": 1},
    },
    "required": ["offset", "extent"],
    "additionalProperties": False,
}

_SIGNAL_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["dirac", "rects", "file"]},
        "r": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "min_separation": {"type": "number", "exclusiveMinimum": 0},
        "amplitude_range": {"type": "array", "items": {"type": "number"},
                            "minItems": 2, "maxItems": 2},
        "preset": {"enum": ["pwc1"]},
        "rects": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "amplitude": {"type": "number"},
                    "bounds": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "array", "items": {"type": "number"},
                                  "minItems": 2, "maxItems": 2},
                    },
                },
                "required": ["amplitude", "bounds"],
                "additionalProperties": False,
            },
        },
        "truth": {"type": "string"},
        "mask": {"type": "string"},
        "measured": {"type": "string"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_SOLVER_SCHEMA = {
    "type": "object",
    "properties": {
        "algorithm": {"enum": ["giraf", "irls", "ap", "ap_prox", "svt", "svt_uv"]},
        "label": {"type": "string"},
        "p": {"type": "number"},
        "lam": {"type": ["number", "null"]},
        "rank_r": {"type": "integer", "minimum": 1},
        "beta": {"type": "number"},
        "equality": {"type": "boolean"},
        "max_iters": {"type": "integer", "minimum": 1},
        "outer_iters": {"type": "integer", "minimum": 1},
        "tol": {"type": "number"},
        "eps0": {"anyOf": [{"type": "number"}, {"const": "auto"}]},
        "eta": {"type": "number"},
        "eps_min": {"type": ["number", "null"]},
        "ls_solver": {"enum": ["admm", "cg"]},
        "inner_iters": {"type": "integer", "minimum": 1},
        "delta": {"type": "number"},
        "cg_tol": {"type": "number"},
        "oversample": {"type": "boolean"},
        "oversample_factor": {"type": ["number", "null"]},
        "track_cost": {"type": "boolean"},
        "seed": {"type": "integer"},
    },
    "required": ["algorithm"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "data_box": _BOX_SCHEMA,
        "filter_box": _BOX_SCHEMA,
        "weighting": {"enum": ["identity", "gradient"]},
        "signal": _SIGNAL_SCHEMA,
        "sampling": {
            "type": "object",
            "properties": {
                "usf": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "seed": {"type": "integer"},
                "force_dc": {"type": "boolean"},
            },
            "required": ["usf", "seed"],
            "additionalProperties": False,
        },
        "noise": {
            "type": ["object", "null"],
            "properties": {
                "snr_db": {"type": "number"},
                "seed": {"type": "integer"},
            },
            "required": ["snr_db", "seed"],
            "additionalProperties": False,
        },
        "solver": _SOLVER_SCHEMA,
        "timing": {"enum": ["wall", "none"]},
        "sweep": {
            "type": "object",
            "properties": {
                "protocol": {"enum": ["tol", "subproblem"]},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "seeds": {"type": "array", "items": {"type": "integer"},
                          "minItems": 1},
                "usf": {"type": "array", "minItems": 1,
                        "items": {"type": "number", "exclusiveMinimum": 0,
                                  "maximum": 1}},
                "solvers": {"type": "array", "items": _SOLVER_SCHEMA,
                            "minItems": 1},
                "reference_iters": {"type": "integer", "minimum": 1},
            },
            "required": ["solvers"],
            "additionalProperties": False,
        },
    },
    "required": ["name", "data_box", "filter_box", "weighting", "signal"],
    "additionalProperties": False,
}

_GIRAF_KEYS = {"p", "lam", "eps0", "eta", "eps_min", "outer_iters", "ls_solver",
               "inner_iters", "delta", "cg_tol", "oversample",
               "oversample_factor", "track_cost"}
_BASELINE_KEYS = {"p", "lam", "rank_r", "beta", "equality", "max_iters", "tol",
                  "eps0", "eta", "eps_min", "inner_iters", "cg_tol", "seed"}
_BASELINE_SOLVERS = {
    "irls": irls_direct,
    "ap": ap_solve,
    "ap_prox": ap_prox_solve,
    "svt": svt_solve,
    "svt_uv": svt_uv_solve,
}


def _fmt(v) -> str:
    """CSV cell: full-precision floats, bare ints, markers pass through."""
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(c) for c in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def load_config(path) -> dict:
    with open(path) as f:
        config = json.load(f)
    jsonschema.validate(config, CONFIG_SCHEMA)
    return config


def _box(section: dict) -> IndexBox:
    if len(section["offset"]) != len(section["extent"]):
        raise ConfigurationError("box offset and extent lengths differ")
    return IndexBox(tuple(section["offset"]), tuple(section["extent"]))


def _build_spec(config: dict) -> LiftingSpec:
    data_box = _box(config["data_box"])
    filter_box = _box(config["filter_box"])
    if config["weighting"] == "gradient":
        return LiftingSpec(data_box, filter_box,
                           weightings=gradient_weighting(data_box.ndim))
    return LiftingSpec(data_box, filter_box)


def _require(section: dict, keys, where: str) -> None:
    missing = [k for k in keys if k not in section]
    if missing:
        raise ConfigurationError(f"{where} requires {missing}")


def _build_truth(config: dict, shift: int) -> ComplexGrid:
    sig = config["signal"]
    box = _box(config["data_box"])
    if sig["kind"] == "dirac":
        _require(sig, ("r", "seed", "min_separation"), "dirac signal")
        amp = tuple(sig.get("amplitude_range", (0.5, 1.5)))
        signal = random_diracs(sig["r"], sig["seed"] + shift,
                               sig["min_separation"], amp)
        return dirac_fourier(signal, box)
    if sig["kind"] == "rects":
        if ("preset" in sig) == ("rects" in sig):
            raise ConfigurationError(
                "rects signal needs exactly one of 'preset' or 'rects'")
        if "preset" in sig:
            phantom = pwc_phantom()
        else:
            phantom = RectPhantom(tuple(
                (r["amplitude"], tuple(tuple(b) for b in r["bounds"]))
                for r in sig["rects"]))
        return rect_fourier(phantom, box)
    raise ConfigurationError("signal kind 'file' carries no generative model")


def _mask_from_grid(grid: ComplexGrid) -> np.ndarray:
    vals = grid.values
    ok = (vals == 0) | (vals == 1)
    if not np.all(ok):
        raise DataError("mask grid entries must be exactly 0 or 1")
    return vals.real > 0.5


def _build_instance(config: dict, shift: int):
    """Resolve the config to (ground truth or None, sampling operator)."""
    sig = config["signal"]
    box = _box(config["data_box"])
    if sig["kind"] == "file":
        _require(sig, ("mask", "measured"), "file signal")
        truth = load_grid(sig["truth"]) if "truth" in sig else None
        mask_grid = load_grid(sig["mask"])
        measured = load_grid(sig["measured"])
        for g, name in ((truth, "truth"), (mask_grid, "mask"), (measured, "measured")):
            if g is not None and g.box != box:
                raise DataError(f"{name} grid box does not match the data box")
        try:
            sampling = SamplingOp(_mask_from_grid(mask_grid), measured)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
        return truth, sampling
    _require(config, ("sampling",), "generative signal")
    truth = _build_truth(config, shift)
    samp = config["sampling"]
    mask = random_mask(box, samp["usf"], samp["seed"] + shift,
                       force_dc=samp.get("force_dc", False))
    sampling = SamplingOp.measure(truth, mask)
    noise = config.get("noise")
    if noise:
        noisy = add_noise(sampling.b, noise["snr_db"], noise["seed"] + shift,
                          mask=mask)
        sampling = SamplingOp(mask, noisy)
    return truth, sampling


def _resolved_config(config: dict, shift: int) -> dict:
    """Echo of the config with the seed shift folded in, for manifests."""
    out = copy.deepcopy(config)
    out.setdefault("timing", "wall")
    sig = out["signal"]
    if "seed" in sig:
        sig["seed"] += shift
    if "sampling" in out:
        out["sampling"]["seed"] += shift
    if out.get("noise"):
        out["noise"]["seed"] += shift
    return out


def _entry_label(entry: dict) -> str:
    if "label" in entry:
        return entry["label"]
    alg = entry["algorithm"]
    if alg in ("giraf", "irls"):
        return f"{alg}{entry.get('p', 0.0):g}"
    return alg


def _resolve_solver(entry: dict):
    """Solver entry -> (callable, config dataclass)."""
    alg = entry["algorithm"]
    fields = {k: v for k, v in entry.items() if k not in ("algorithm", "label")}
    if alg == "giraf":
        unknown = sorted(set(fields) - _GIRAF_KEYS)
        if unknown:
            raise ConfigurationError(f"fields {unknown} not valid for giraf")
        cfg = SolverConfig(**fields)
        cfg.validate()
        return giraf_solve, cfg
    unknown = sorted(set(fields) - _BASELINE_KEYS)
    if unknown:
        raise ConfigurationError(f"fields {unknown} not valid for {alg}")
    cfg = BaselineConfig(algorithm=alg, **fields)
    cfg.validate()
    return _BASELINE_SOLVERS[alg], cfg


def _zero_time(trace, timing: str):
    if timing != "none":
        return trace
    for rec in trace.records:
        rec.seconds = 0.0
    trace.phase_seconds = {k: 0.0 for k in trace.phase_seconds}
    return trace


def _trace_rows(trace, with_nmse: bool):
    for rec in trace.records:
        row = [rec.iteration, rec.eps]
        if with_nmse:
            row.append(rec.nmse)
        row.extend([rec.cost, rec.sigma_min, rec.sigma_max, rec.seconds])
        yield row


def _summary(trace, truth) -> dict:
    final_nmse = trace.final_nmse
    return {
        "algorithm": trace.algorithm,
        "iterations": len(trace.records),
        "final_nmse": final_nmse,
        "final_snr_db": None if truth is None else snr_db(trace.x, truth),
        "wall_seconds": trace.records[-1].seconds if trace.records else 0.0,
        "phase_seconds": dict(trace.phase_seconds),
        "eps0": trace.eps0,
    }


def cmd_gen(config: dict, out: Path, shift: int) -> int:
    if config["signal"]["kind"] == "file":
        raise ConfigurationError("gen needs a generative signal, not 'file'")
    truth, sampling = _build_instance(config, shift)
    out.mkdir(parents=True, exist_ok=True)
    save_grid(truth, out / "truth.cslr")
    mask_grid = ComplexGrid(truth.box, sampling.mask.astype(np.complex128))
    save_grid(mask_grid, out / "mask.cslr")
    save_grid(sampling.b, out / "measured.cslr")
    manifest = {
        "command": "gen",
        "config": _resolved_config(config, shift),
        "seed_shift": shift,
        "outputs": ["mask.cslr", "measured.cslr", "truth.cslr"],
    }
    _write_json(out / "manifest.json", manifest)
    return EXIT_OK


def cmd_recover(config: dict, out: Path, shift: int) -> int:
    _require(config, ("solver",), "recover")
    spec = _build_spec(config)
    truth, sampling = _build_instance(config, shift)
    solve, solver_cfg = _resolve_solver(config["solver"])
    timing = config.get("timing", "wall")
    trace = solve(spec, sampling, solver_cfg, ground_truth=truth)
    _zero_time(trace, timing)

    out.mkdir(parents=True, exist_ok=True)
    save_grid(trace.x, out / "recovered.cslr")
    with_nmse = truth is not None
    header = ("iter,eps,nmse,cost,sigma_min,sigma_max,seconds" if with_nmse
              else "iter,eps,cost,sigma_min,sigma_max,seconds")
    _write_csv(out / "trace.csv", header, _trace_rows(trace, with_nmse))
    _write_json(out / "summary.json", _summary(trace, truth))
    manifest = {
        "command": "recover",
        "config": _resolved_config(config, shift),
        "seed_shift": shift,
        "resolved_solver": {"algorithm": config["solver"]["algorithm"],
                            **asdict(solver_cfg)},
        "outputs": ["recovered.cslr", "summary.json", "trace.csv"],
    }
    _write_json(out / "manifest.json", manifest)
    return EXIT_OK


def _tol_row(config, entry, usf, seed, tol, timing):
    label = _entry_label(entry)
    key = (config["name"], label, float(entry.get("p", 0.0)), usf, seed)
    run_cfg = copy.deepcopy(config)
    run_cfg["sampling"]["usf"] = usf
    try:
        spec = _build_spec(run_cfg)
        truth, sampling = _build_instance(run_cfg, seed)
        solve, solver_cfg = _resolve_solver(entry)
        trace = solve(spec, sampling, solver_cfg, ground_truth=truth)
    except (BudgetError, MemoryError):
        return key, key + ("Mem", "Mem", "Mem")
    _zero_time(trace, timing)
    hit = next((r for r in trace.records
                if r.nmse is not None and r.nmse <= tol), None)
    if hit is None:
        return key, key + ("Inf", "Inf", trace.final_nmse)
    return key, key + (hit.iteration, hit.seconds, trace.final_nmse)


def _bench_tol(config: dict, out: Path, shift: int, threads: int) -> int:
    if config["signal"]["kind"] == "file":
        raise ConfigurationError("bench needs a generative signal")
    _require(config, ("sampling",), "bench")
    sweep = config["sweep"]
    timing = config.get("timing", "wall")
    tol = sweep.get("tol", 1e-4)
    seeds = [s + shift for s in sweep.get("seeds", [0])]
    usfs = sweep.get("usf", [config["sampling"]["usf"]])
    for entry in sweep["solvers"]:
        _resolve_solver(entry)  # fail fast on any bad entry
    tasks = [(entry, usf, seed)
             for entry in sweep["solvers"] for usf in usfs for seed in seeds]

    def run(task):
        entry, usf, seed = task
        return _tol_row(config, entry, usf, seed, tol, timing)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    rows = [row for _, row in sorted(results, key=lambda kr: kr[0])]

    out.mkdir(parents=True, exist_ok=True)
    header = "dataset,algorithm,p,usf,seed,iters_to_tol,seconds_to_tol,final_nmse"
    _write_csv(out / "bench.csv", header, rows)
    manifest = {
        "command": "bench",
        "config": _resolved_config(config, shift),
        "seed_shift": shift,
        "protocol": "tol",
        "tol": tol,
        "outputs": ["bench.csv"],
        "rows": len(rows),
    }
    _write_json(out / "manifest.json", manifest)
    return EXIT_OK


def _bench_subproblem(config: dict, out: Path, shift: int) -> int:
    """Inner-solver study: freeze the weighted least-squares problem at the
    zero-filled iterate and log each solver's normalized squared distance to
    a tight conjugate-gradient reference against time."""
    _require(config, ("solver",), "subproblem bench")
    base = config["solver"]
    if base["algorithm"] != "giraf":
        raise ConfigurationError("subproblem bench studies the giraf inner step")
    if base.get("lam") is None:
        raise ConfigurationError("subproblem bench needs solver.lam")
    sweep = config["sweep"]
    timing = config.get("timing", "wall")
    lam = float(base["lam"])
    p = float(base.get("p", 0.0))

    spec = _build_spec(config)
    truth, sampling = _build_instance(config, shift)
    x0 = sampling.zero_filled()
    eps0 = base.get("eps0", "auto")
    if eps0 == "auto":
        w = np.linalg.eigvalsh(gram_surrogate(spec, x0))
        eps0 = max(float(w[-1]), 0.0) / 100.0
    state = filter_update(spec, x0, float(eps0), p)
    ref_iters = sweep.get("reference_iters", 4000)
    reference = cg_ls(spec, sampling, state.d, lam, p, iters=ref_iters, tol=1e-16)
    ref_vals = reference.values
    ref_norm = float(np.linalg.norm(ref_vals) ** 2)
    if ref_norm == 0:
        raise SolverError("subproblem reference solution is zero")

    rows = []
    for entry in sweep["solvers"]:
        if entry["algorithm"] != "giraf":
            raise ConfigurationError("subproblem entries must be giraf solvers")
        extra = sorted(set(entry) - {"algorithm", "label", "ls_solver", "delta",
                                     "inner_iters", "cg_tol"})
        if extra:
            raise ConfigurationError(f"fields {extra} not valid for a subproblem entry")
        ls = entry.get("ls_solver", "admm")
        iters = entry.get("inner_iters", 200)
        delta = entry.get("delta", 10.0)
        label = entry.get("label") or (f"admm-delta{delta:g}" if ls == "admm" else "cg")
        samples = []
        start = time.perf_counter()

        def log(it, xvals):
            sec = 0.0 if timing == "none" else time.perf_counter() - start
            dist = float(np.linalg.norm(xvals - ref_vals) ** 2) / ref_norm
            samples.append((it, sec, dist))

        if ls == "admm":
            admm_ls(spec, sampling, state.d, lam, p, iters=iters, delta=delta,
                    callback=log)
        else:
            cg_ls(spec, sampling, state.d, lam, p, iters=iters,
                  tol=entry.get("cg_tol", 0.0), callback=log)
        rows.extend((config["name"], label, it, sec, dist)
                    for it, sec, dist in samples)

    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "subproblem.csv", "dataset,solver,iter,seconds,nmsd", rows)
    manifest = {
        "command": "bench",
        "config": _resolved_config(config, shift),
        "seed_shift": shift,
        "protocol": "subproblem",
        "eps0": float(eps0),
        "reference_iters": ref_iters,
        "outputs": ["subproblem.csv"],
        "rows": len(rows),
    }
    _write_json(out / "manifest.json", manifest)
    return EXIT_OK


def cmd_bench(config: dict, out: Path, shift: int, threads: int) -> int:
    _require(config, ("sweep",), "bench")
    protocol = config["sweep"].get("protocol", "tol")
    if protocol == "subproblem":
        return _bench_subproblem(config, out, shift)
    return _bench_tol(config, out, shift, threads)


def cmd_compare(paths, truth_path, tol, max_diff, nmse_diff) -> int:
    if len(paths) < 2:
        raise ConfigurationError("compare needs at least two grid files")
    grids = [(p, load_grid(p)) for p in paths]
    box = grids[0][1].box
    for p, g in grids[1:]:
        if g.box != box:
            raise DataError(f"grid box of {p} does not match {paths[0]}")
    truth = None
    if truth_path is not None:
        truth = load_grid(truth_path)
        if truth.box != box:
            raise DataError("truth grid box does not match the inputs")

    ok = True
    lines = []
    errors = {}
    if truth is not None:
        lines.append("file,nmse,snr_db")
        for p, g in grids:
            e = nmse(g, truth)
            errors[p] = e
            lines.append(f"{p},{_fmt(e)},{_fmt(snr_db(g, truth))}")
            if tol is not None and not e <= tol:
                ok = False
        lines.append("")
    lines.append("file_a,file_b,max_abs_diff" +
                 (",nmse_diff" if truth is not None else ""))
    for i, (pa, ga) in enumerate(grids):
        for pb, gb in grids[i + 1:]:
            d = float(np.max(np.abs(ga.values - gb.values)))
            row = f"{pa},{pb},{_fmt(d)}"
            if max_diff is not None and not d <= max_diff:
                ok = False
            if truth is not None:
                de = abs(errors[pa] - errors[pb])
                row += f",{_fmt(de)}"
                if nmse_diff is not None and not de <= nmse_diff:
                    ok = False
            lines.append(row)
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_TOLERANCE


def _emit_error(code: int, exc: Exception) -> None:
    payload = {"error": {"exit_code": code, "type": type(exc).__name__,
                         "message": str(exc)}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cslr",
        description="Structured low-rank recovery experiments: generate "
                    "fixtures, run solvers, benchmark sweeps, compare results.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (("gen", "write ground truth, mask, and measurements"),
                      ("recover", "run one solver and write its outputs"),
                      ("bench", "run a solver sweep and write a results CSV")):
        sp = sub.add_parser(name, help=doc)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker pool size for sweeps")
        sp.add_argument("--seed", type=int, default=0,
                        help="shift added to every seed in the config")
    cp = sub.add_parser("compare", help="compare recovered grids")
    cp.add_argument("files", nargs="+", help="CSLR1 grid files")
    cp.add_argument("--truth", help="ground-truth CSLR1 grid")
    cp.add_argument("--tol", type=float,
                    help="largest acceptable NMSE against the truth")
    cp.add_argument("--max-diff", type=float,
                    help="largest acceptable entrywise difference between inputs")
    cp.add_argument("--nmse-diff", type=float,
                    help="largest acceptable pairwise NMSE difference")
    args = parser.parse_args(argv)

    try:
        if args.command == "compare":
            return cmd_compare(args.files, args.truth, args.tol,
                               args.max_diff, args.nmse_diff)
        config = load_config(args.config)
        out = Path(args.out)
        if args.command == "gen":
            return cmd_gen(config, out, args.seed)
        if args.command == "recover":
            return cmd_recover(config, out, args.seed)
        return cmd_bench(config, out, args.seed, args.threads)
    except (json.JSONDecodeError, jsonschema.ValidationError,
            ConfigurationError, ConfigError, ValueError) as exc:
        _emit_error(EXIT_CONFIG, exc)
        return EXIT_CONFIG
    except (DataError, GridFormatError, FileNotFoundError,
            IsADirectoryError) as exc:
        _emit_error(EXIT_DATA, exc)
        return EXIT_DATA
    except (SolverError, BudgetError, MemoryError) as exc:
        _emit_error(EXIT_SOLVER, exc)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
