"""Command line entry points.

Four subcommands cover the workflow end to end::

    relsys simulate --spec system.cfg --seed 7 --out runs/sim
    relsys fit runs/sim/sample.csv --kind series --k 3 --seed 11 --out runs/fit
    relsys reliability runs/fit --level 0.95 --out runs/bands
    relsys study --grid subset.cfg --replicates 20 --seed 3 --out runs/study

Every command writes its artifacts plus a ``manifest.json`` capturing the
seed, the effective configuration, input and output digests, and
per-component diagnostics.  Rerunning with the same inputs reproduces
every file byte for byte; only the manifest's ``timestamps`` entry moves.

Seeds come exclusively from ``--seed`` flags or config files (default 0);
no environment variable is consulted.  Exit codes: 0 success (including
fits that stop at the iteration cap with ``converged`` false), 1 usage
error, 2 malformed data, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import functools
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .curves import TimeGrid, mean_time_posterior, reliability_band, system_band
from .dists import GeneratorSpec, weibull_from_moments
from .errors import DataError, NumericalError, UnsolvableError, UsageError
from .mcem import ComponentFit, FitConfig, SystemFit, fit_component, fit_system
from .sampler import McmcConfig, PosteriorDraws
from .simlab import generate_system_sample, grid_specs, run_scenario
from .streams import RandomStream

__all__ = ["main"]

_KINDS = ("series", "parallel")
_SIDES = ("right", "left")
_METHODS = ("hpd", "quantile")

# default chain settings; per-iteration chains re-burn at a tenth of the
# final burn-in
_DEF_V = 4.0
_DEF_NP = 1000
_DEF_BURNIN = 10_000
_DEF_THIN = 10
_DEF_TOL = 1e-3
_DEF_MAX_ITER = 200


class _Parser(argparse.ArgumentParser):
    """Argument parser whose failures exit 1 rather than argparse's 2."""

    def error(self, message):
        raise UsageError(message)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _convert(conv, name: str, raw: str):
    try:
        return conv(raw)
    except ValueError:
        kind = {int: "integer", float: "number"}.get(conv, conv.__name__)
        raise UsageError(f"config value {name}={raw!r} is not a valid {kind}") from None


def _load_config(path: str | None, allowed: dict[str, type]) -> dict:
    """Read a flat key=value file and convert values to their flag types."""
    if path is None:
        return {}
    out = {}
    for key, value in io.read_config(path).items():
        if key not in allowed:
            raise UsageError(f"{path}: unknown config key {key!r}")
        out[key] = _convert(allowed[key], key, value)
    return out


def _effective(flag_value, cfg: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    return cfg.get(key, default)


def _require_positive(name: str, value, minimum=None) -> None:
    bad = (value <= 0) if minimum is None else (value < minimum)
    if bad:
        bound = "positive" if minimum is None else f">= {minimum}"
        raise UsageError(f"{name} must be {bound}, got {value}")


def _write_manifest(
    out: Path,
    *,
    command: str,
    seed: int | None,
    config: dict,
    inputs: dict,
    outputs: Sequence[str],
    started: str,
    components: list | None = None,
    extras: dict | None = None,
) -> None:
    manifest = {
        "command": command,
        "seed": seed,
        "config": config,
        "inputs": inputs,
        "outputs": {name: io.sha256_file(out / name) for name in outputs},
        "timestamps": {"started": started, "finished": _now()},
    }
    if components is not None:
        manifest["components"] = components
    if extras:
        manifest.update(extras)
    io.write_json(out / "manifest.json", manifest)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- simulate

_COMPONENT_KEY = re.compile(r"component(\d+)\.(family|mean|variance)\Z")


def _parse_system_spec(path: str) -> tuple[str, int, int | None, list[GeneratorSpec]]:
    """Parse a simulate spec file into (kind, n, seed, generators)."""
    raw = io.read_config(path)
    kind = n = seed = None
    fields: dict[int, dict[str, str]] = {}
    for key, value in raw.items():
        if key == "kind":
            kind = value
        elif key == "n":
            n = _convert(int, "n", value)
        elif key == "seed":
            seed = _convert(int, "seed", value)
        else:
            m = _COMPONENT_KEY.match(key)
            if m is None:
                raise UsageError(f"{path}: unknown key {key!r}")
            fields.setdefault(int(m.group(1)), {})[m.group(2)] = value
    if kind is None:
        raise UsageError(f"{path}: missing key 'kind'")
    if kind not in _KINDS:
        raise UsageError(f"{path}: kind must be one of {_KINDS}, got {kind!r}")
    if n is None:
        raise UsageError(f"{path}: missing key 'n'")
    if n < 1:
        raise UsageError(f"{path}: n must be >= 1, got {n}")
    if not fields:
        raise UsageError(
            f"{path}: no component entries (expected component1.family=... etc.)"
        )
    k = max(fields)
    generators = []
    for j in range(1, k + 1):
        got = fields.get(j)
        if got is None:
            raise UsageError(
                f"{path}: component {j} is missing (components must be numbered 1..{k})"
            )
        missing = [f for f in ("family", "mean", "variance") if f not in got]
        if missing:
            raise UsageError(f"{path}: component {j} is missing {', '.join(missing)}")
        try:
            generators.append(
                GeneratorSpec(
                    got["family"],
                    _convert(float, f"component{j}.mean", got["mean"]),
                    _convert(float, f"component{j}.variance", got["variance"]),
                )
            )
        except ValueError as e:
            raise UsageError(f"{path}: component {j}: {e}") from None
    for j, g in enumerate(generators, start=1):
        if g.family == "weibull":
            # resolve the moment inversion up front so failures name the
            # component instead of surfacing mid-sampling
            try:
                weibull_from_moments(g.mean, g.variance)
            except UnsolvableError as e:
                raise UnsolvableError(f"component {j}: {e}") from None
    return kind, n, seed, generators


def cmd_simulate(args) -> int:
    started = _now()
    kind, n, spec_seed, generators = _parse_system_spec(args.spec)
    seed = _effective(args.seed, {"seed": spec_seed} if spec_seed is not None else {}, "seed", 0)
    if seed < 0:
        raise UsageError(f"--seed must be non-negative, got {seed}")
    k = len(generators)
    sample = generate_system_sample(generators, kind, n, RandomStream(seed).generator())
    out = _out_dir(args)
    io.write_table(
        out / "sample.csv",
        io.SYSTEM_HEADER,
        ((o.time, o.cause) for o in sample.observations),
    )
    counts = [0] * k
    for o in sample.observations:
        counts[o.cause - 1] += 1
    censoring_pct = [100.0 * (1.0 - counts[j] / n) for j in range(k)]
    for j, pct in enumerate(censoring_pct, start=1):
        print(f"component {j}: {counts[j - 1]} failures observed, {pct:.1f}% censored")
    _write_manifest(
        out,
        command="simulate",
        seed=seed,
        config={
            "kind": kind,
            "n": n,
            "components": [
                {"family": g.family, "mean": g.mean, "variance": g.variance}
                for g in generators
            ],
        },
        inputs={Path(args.spec).name: io.sha256_file(args.spec)},
        outputs=["sample.csv"],
        started=started,
        extras={"achieved_censoring_pct": censoring_pct},
    )
    return 0


# --------------------------------------------------------------------- fit

_FIT_KEYS = {
    "kind": str,
    "k": int,
    "side": str,
    "v": float,
    "np": int,
    "burnin": int,
    "thin": int,
    "tol": float,
    "max-iter": int,
    "seed": int,
}


def _fit_settings(args) -> dict:
    cfg = _load_config(args.config, _FIT_KEYS)
    s = {
        "kind": _effective(args.kind, cfg, "kind", None),
        "k": _effective(args.k, cfg, "k", None),
        "side": _effective(args.side, cfg, "side", None),
        "v": _effective(args.v, cfg, "v", _DEF_V),
        "np": _effective(args.n_p, cfg, "np", _DEF_NP),
        "burnin": _effective(args.burnin, cfg, "burnin", _DEF_BURNIN),
        "thin": _effective(args.thin, cfg, "thin", _DEF_THIN),
        "tol": _effective(args.tol, cfg, "tol", _DEF_TOL),
        "max-iter": _effective(args.max_iter, cfg, "max-iter", _DEF_MAX_ITER),
        "seed": _effective(args.seed, cfg, "seed", 0),
    }
    if s["kind"] is not None and s["kind"] not in _KINDS:
        raise UsageError(f"--kind must be one of {_KINDS}, got {s['kind']!r}")
    if s["side"] is not None and s["side"] not in _SIDES:
        raise UsageError(f"--side must be one of {_SIDES}, got {s['side']!r}")
    if s["k"] is not None:
        _require_positive("--k", s["k"], minimum=1)
    _require_positive("--v", s["v"])
    _require_positive("--np", s["np"], minimum=1)
    _require_positive("--burnin", s["burnin"], minimum=0)
    _require_positive("--thin", s["thin"], minimum=1)
    _require_positive("--tol", s["tol"])
    _require_positive("--max-iter", s["max-iter"], minimum=1)
    _require_positive("--seed", s["seed"], minimum=0)
    return s


def _fit_config(s: dict) -> FitConfig:
    return FitConfig(
        prior_variance=s["v"],
        tol=s["tol"],
        max_iter=s["max-iter"],
        mcmc=McmcConfig(n_p=s["np"], burn_in=s["burnin"] // 10, thin=s["thin"]),
        final_mcmc=McmcConfig(n_p=s["np"], burn_in=s["burnin"], thin=s["thin"]),
    )


def cmd_fit(args) -> int:
    started = _now()
    s = _fit_settings(args)
    input_digest = io.sha256_file(args.data)
    header = io.read_header(args.data)
    cfg = _fit_config(s)
    seed = s["seed"]
    if header == io.SYSTEM_HEADER:
        if s["kind"] is None:
            raise UsageError("data has a 'time,cause' header; --kind is required")
        if s["k"] is None:
            raise UsageError("data has a 'time,cause' header; --k is required")
        sample = io.read_system_csv(args.data, s["kind"], s["k"])
        times = [o.time for o in sample.observations]
        fits = fit_system(sample, cfg, RandomStream(seed)).components
        label = s["kind"]
    elif header == io.COMPONENT_HEADER:
        if s["side"] is None:
            raise UsageError("data has a 'time,event' header; --side is required")
        comp = io.read_component_csv(args.data, s["side"])
        times = [r.time for r in comp.records]
        fits = (fit_component(comp, cfg, RandomStream(seed).child(0)),)
        label = "component"
    else:
        raise DataError(
            f"{args.data}: unrecognized header {','.join(header)!r}; "
            "expected time,cause or time,event"
        )
    k = len(fits)

    out = _out_dir(args)
    outputs = []
    components = []
    hyper_components = []
    for j, f in enumerate(fits, start=1):
        name = io.draws_filename(j)
        io.write_draws_csv(out / name, j, f.draws)
        outputs.append(name)
        mean_time, sd_time = mean_time_posterior(f.draws)
        hyper_components.append(
            {
                "component": j,
                "m_beta": f.m_beta,
                "m_eta": f.m_eta,
                "mean_time": mean_time,
                "sd_time": sd_time,
                "converged": f.converged,
                "iterations": len(f.em_trace) - 1,
                "acceptance_rate": f.draws.acceptance_rate,
                "step_final": f.draws.step_final,
                "lag1_beta": f.draws.lag1_beta,
                "lag1_eta": f.draws.lag1_eta,
                "warnings": list(f.warnings),
            }
        )
        components.append(
            {
                "component": j,
                "converged": f.converged,
                "acceptance_rate": f.draws.acceptance_rate,
            }
        )
        state = "converged" if f.converged else "NOT converged"
        print(
            f"component {j}: m_beta={f.m_beta:.6g} m_eta={f.m_eta:.6g} "
            f"mean_time={mean_time:.6g} ({state}, "
            f"acceptance {f.draws.acceptance_rate:.2f})"
        )
        for w in f.warnings:
            print(f"component {j}: warning: {w}", file=sys.stderr)
    io.write_trace_csv(out / "em_trace.csv", fits)
    outputs.append("em_trace.csv")
    hyper = {
        "kind": label,
        "k": k,
        "t99": float(np.percentile(np.asarray(times), 99.0)),
        "components": hyper_components,
    }
    if label == "component":
        hyper["side"] = s["side"]
    io.write_json(out / "hyper_estimates.json", hyper)
    outputs.append("hyper_estimates.json")

    config = {key: s[key] for key in ("v", "np", "burnin", "thin", "tol", "max-iter")}
    config["kind"] = label
    config["k"] = k
    if label == "component":
        config["side"] = s["side"]
    _write_manifest(
        out,
        command="fit",
        seed=seed,
        config=config,
        inputs={Path(args.data).name: input_digest},
        outputs=outputs,
        started=started,
        components=components,
    )
    return 0


# ------------------------------------------------------------- reliability

_REL_KEYS = {
    "grid-max": float,
    "grid-points": int,
    "level": float,
    "method": str,
}


def _draws_shell(params, meta: dict) -> ComponentFit:
    """Rebuild the fit objects band computation needs from saved files."""
    d = PosteriorDraws(
        draws=params,
        acceptance_rate=float(meta.get("acceptance_rate", math.nan)),
        step_final=float(meta.get("step_final", math.nan)),
        lag1_beta=float(meta.get("lag1_beta", math.nan)),
        lag1_eta=float(meta.get("lag1_eta", math.nan)),
        warnings=(),
    )
    return ComponentFit(
        m_beta=float(meta.get("m_beta", math.nan)),
        m_eta=float(meta.get("m_eta", math.nan)),
        draws=d,
        em_trace=(),
        converged=bool(meta.get("converged", True)),
        warnings=(),
    )


def cmd_reliability(args) -> int:
    started = _now()
    cfg = _load_config(args.config, _REL_KEYS)
    grid_max = _effective(args.grid_max, cfg, "grid-max", None)
    grid_points = _effective(args.grid_points, cfg, "grid-points", 200)
    level = _effective(args.level, cfg, "level", 0.95)
    method = _effective(args.method, cfg, "method", "hpd")
    if not 0.0 < level < 1.0:
        raise UsageError(f"--level must lie strictly between 0 and 1, got {level}")
    if method not in _METHODS:
        raise UsageError(f"--method must be one of {_METHODS}, got {method!r}")
    _require_positive("--grid-points", grid_points, minimum=1)

    src = Path(args.draws)
    hyper_path = src / "hyper_estimates.json"
    if not hyper_path.exists():
        raise DataError(
            f"{src}: missing hyper_estimates.json (expected a fit output directory)"
        )
    hyper = io.read_json(hyper_path)
    try:
        kind = hyper["kind"]
        k = int(hyper["k"])
    except (KeyError, TypeError, ValueError):
        raise DataError(f"{hyper_path}: missing or malformed 'kind'/'k' entries") from None
    if k < 1:
        raise DataError(f"{hyper_path}: k must be >= 1, got {k}")
    expected = [io.draws_filename(j) for j in range(1, k + 1)]
    missing = [name for name in expected if not (src / name).exists()]
    if missing:
        raise DataError(
            f"{src}: missing draws files: expected {', '.join(expected)}; "
            f"absent: {', '.join(missing)}"
        )

    if grid_max is None:
        t99 = hyper.get("t99")
        if not isinstance(t99, (int, float)) or not t99 > 0.0:
            raise UsageError(
                "--grid-max is required (no usable 't99' anchor in hyper_estimates.json)"
            )
        grid_max = float(t99)
    if not (math.isfinite(grid_max) and grid_max > 0.0):
        raise UsageError(f"--grid-max must be finite and positive, got {grid_max}")
    grid = (
        TimeGrid((float(grid_max),))
        if grid_points == 1
        else TimeGrid.regular(float(grid_max), grid_points)
    )

    metas = hyper.get("components") or []
    comp_fits = []
    inputs = {hyper_path.name: io.sha256_file(hyper_path)}
    for j in range(1, k + 1):
        name = io.draws_filename(j)
        params = io.read_draws_csv(src / name, j)
        meta = metas[j - 1] if j - 1 < len(metas) and isinstance(metas[j - 1], dict) else {}
        comp_fits.append(_draws_shell(params, meta))
        inputs[name] = io.sha256_file(src / name)

    out = _out_dir(args)
    outputs = []
    for j, f in enumerate(comp_fits, start=1):
        band = reliability_band(f.draws, grid, level=level, method=method)
        name = f"band_component{j}.csv"
        io.write_band_csv(out / name, band)
        outputs.append(name)
    # a single-component fit composes as a one-element series (identity)
    sys_kind = kind if kind in _KINDS else "series"
    try:
        sband = system_band(
            SystemFit(sys_kind, tuple(comp_fits)), grid, level=level, method=method
        )
    except ValueError as e:
        raise DataError(f"{src}: {e}") from None
    io.write_band_csv(out / "band_system.csv", sband)
    outputs.append("band_system.csv")
    print(f"wrote {len(outputs)} bands on {grid.n} time points up to {grid_max:.6g}")

    _write_manifest(
        out,
        command="reliability",
        seed=None,
        config={
            "grid-max": float(grid_max),
            "grid-points": grid_points,
            "level": level,
            "method": method,
            "kind": kind,
            "k": k,
        },
        inputs=inputs,
        outputs=outputs,
        started=started,
    )
    return 0


# ------------------------------------------------------------------- study

_STUDY_GRID_KEYS = {
    "families": str,
    "sides": str,
    "means": str,
    "censor-fractions": str,
    "sizes": str,
    "variance": float,
    "replicates": int,
}


def _split(raw: str, conv, name: str, path: str) -> tuple:
    items = [c.strip() for c in raw.split(",") if c.strip()]
    if not items:
        raise UsageError(f"{path}: {name} lists no values")
    return tuple(_convert(conv, name, c) for c in items)


def _grid_settings(grid_arg: str, replicates: int) -> tuple[dict, dict]:
    """Resolve --grid into grid_specs keyword arguments.

    Returns (kwargs, inputs) where inputs maps a subset file to its digest.
    """
    if grid_arg == "full":
        return {"replicates": replicates}, {}
    cfg = _load_config(grid_arg, _STUDY_GRID_KEYS)
    kwargs: dict = {"replicates": cfg.get("replicates", replicates)}
    if "families" in cfg:
        kwargs["families"] = _split(cfg["families"], str, "families", grid_arg)
    if "sides" in cfg:
        sides = _split(cfg["sides"], str, "sides", grid_arg)
        for side in sides:
            if side not in _SIDES:
                raise UsageError(f"{grid_arg}: side must be one of {_SIDES}, got {side!r}")
        kwargs["sides"] = sides
    if "means" in cfg:
        kwargs["means"] = _split(cfg["means"], float, "means", grid_arg)
    if "censor-fractions" in cfg:
        kwargs["censor_fractions"] = _split(
            cfg["censor-fractions"], float, "censor-fractions", grid_arg
        )
    if "sizes" in cfg:
        kwargs["sizes"] = _split(cfg["sizes"], int, "sizes", grid_arg)
    if "variance" in cfg:
        kwargs["variance"] = cfg["variance"]
    return kwargs, {Path(grid_arg).name: io.sha256_file(grid_arg)}


def cmd_study(args) -> int:
    started = _now()
    replicates = args.replicates if args.replicates is not None else 100
    _require_positive("--replicates", replicates, minimum=1)
    seed = args.seed if args.seed is not None else 0
    _require_positive("--seed", seed, minimum=0)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    _require_positive("--workers", workers, minimum=1)

    chain = argparse.Namespace(
        config=None,
        kind=None,
        k=None,
        side=None,
        v=args.v,
        n_p=args.n_p,
        burnin=args.burnin,
        thin=args.thin,
        tol=args.tol,
        max_iter=args.max_iter,
        seed=None,
    )
    s = _fit_settings(chain)
    cfg = _fit_config(s)

    kwargs, inputs = _grid_settings(args.grid, replicates)
    if args.replicates is not None:
        kwargs["replicates"] = replicates
    try:
        specs = grid_specs(**kwargs)
    except ValueError as e:
        raise UsageError(f"invalid study grid: {e}") from None
    replicates = kwargs["replicates"]

    master = RandomStream(seed)
    runner = functools.partial(run_scenario, cfg=cfg, source=master)
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(runner, specs))
    else:
        results = tuple(runner(spec) for spec in specs)

    for r in results:
        line = (
            f"{r.spec.side} {r.spec.generator.family} "
            f"censor={r.spec.censor_fraction * 100:.0f}% mean={r.spec.true_mean:g} "
            f"n={r.spec.n}: bias={r.bias:.4f} mse={r.mse:.4f}"
        )
        if r.n_failed:
            line += f" ({r.n_failed} of {replicates} replicates failed)"
        print(line)

    out = _out_dir(args)
    io.write_study_csv(out / "study.csv", results)
    # record the subset file by name; its content digest sits under inputs
    config = {
        "grid": args.grid if args.grid == "full" else Path(args.grid).name,
        "replicates": replicates,
        "workers": workers,
        **{key: s[key] for key in ("v", "np", "burnin", "thin", "tol", "max-iter")},
    }
    _write_manifest(
        out,
        command="study",
        seed=seed,
        config=config,
        inputs=inputs,
        outputs=["study.csv"],
        started=started,
        extras={
            "cells": len(results),
            "failed_replicates": sum(r.n_failed for r in results),
        },
    )
    return 0


# -------------------------------------------------------------------- main


def _add_chain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--v", type=float, default=None, help="prior variance (default 4)")
    p.add_argument(
        "--np",
        dest="n_p",
        type=int,
        default=None,
        help="posterior draws kept per chain (default 1000)",
    )
    p.add_argument(
        "--burnin",
        type=int,
        default=None,
        help="final-chain burn-in; per-iteration chains use a tenth (default 10000)",
    )
    p.add_argument(
        "--thin", type=int, default=None, help="keep every thin-th state (default 10)"
    )
    p.add_argument(
        "--tol",
        type=float,
        default=None,
        help="stop when both prior means move less than this (default 1e-3)",
    )
    p.add_argument(
        "--max-iter",
        dest="max_iter",
        type=int,
        default=None,
        help="cap on EM iterations (default 200)",
    )


def _build_parser() -> _Parser:
    p = _Parser(
        prog="relsys",
        description="Hierarchical Bayesian reliability estimation for masked "
        "series/parallel failure data.",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="command", parser_class=_Parser)

    sim = sub.add_parser(
        "simulate",
        help="draw a masked system failure sample",
        description="Draw a masked failure sample from configured component "
        "lifetime distributions and write it as a time,cause CSV.",
    )
    sim.add_argument("--spec", required=True, help="flat key=value system description")
    sim.add_argument("--seed", type=int, default=None, help="root seed (default 0)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser(
        "fit",
        help="estimate the hierarchical model from a failure CSV",
        description="Fit per-component Weibull posteriors from a masked system "
        "sample (time,cause) or a pre-decomposed component sample (time,event).",
    )
    fit.add_argument("data", help="failure sample CSV")
    fit.add_argument("--config", default=None, help="flat key=value defaults; flags override")
    fit.add_argument("--kind", choices=_KINDS, default=None, help="system structure")
    fit.add_argument("--k", type=int, default=None, help="number of components")
    fit.add_argument(
        "--side",
        choices=_SIDES,
        default=None,
        help="censoring side for time,event data",
    )
    _add_chain_flags(fit)
    fit.add_argument("--seed", type=int, default=None, help="root seed (default 0)")
    fit.add_argument("--out", required=True, help="output directory")
    fit.set_defaults(func=cmd_fit)

    rel = sub.add_parser(
        "reliability",
        help="turn saved posterior draws into reliability bands",
        description="Read a fit output directory and write pointwise credible "
        "bands for each component and for the system curve.",
    )
    rel.add_argument("draws", help="fit output directory")
    rel.add_argument("--config", default=None, help="flat key=value defaults; flags override")
    rel.add_argument(
        "--grid-max",
        dest="grid_max",
        type=float,
        default=None,
        help="largest grid time (default: the fit's 99th-percentile anchor)",
    )
    rel.add_argument(
        "--grid-points",
        dest="grid_points",
        type=int,
        default=None,
        help="number of grid times from 0 (default 200)",
    )
    rel.add_argument("--level", type=float, default=None, help="credible level (default 0.95)")
    rel.add_argument(
        "--method",
        choices=_METHODS,
        default=None,
        help="interval rule (default hpd)",
    )
    rel.add_argument("--out", required=True, help="output directory")
    rel.set_defaults(func=cmd_reliability)

    study = sub.add_parser(
        "study",
        help="run the bias/MSE simulation grid",
        description="Replicate censored-sampling scenarios over a grid of "
        "generators, censoring fractions and sample sizes, and tabulate bias "
        "and mean squared error of the posterior-mean lifetime.",
    )
    study.add_argument(
        "--grid",
        default="full",
        help="'full' or a flat key=value subset file "
        "(families/sides/means/censor-fractions/sizes/variance)",
    )
    study.add_argument(
        "--replicates", type=int, default=None, help="replicates per cell (default 100)"
    )
    _add_chain_flags(study)
    study.add_argument("--seed", type=int, default=None, help="root seed (default 0)")
    study.add_argument(
        "--workers",
        type=int,
        default=None,
        help="process pool size for cells (default: CPU count)",
    )
    study.add_argument("--out", required=True, help="output directory")
    study.set_defaults(func=cmd_study)

    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
