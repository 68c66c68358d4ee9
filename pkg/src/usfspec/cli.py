"""Command-line front end: ``usfspec {simulate,crb,estimate,sweep,verify}``.

Configuration is a JSON object (see ``configs/``). Keys::

    components    list of {"amplitude", "frequency", "phase"} (frequency in rad/s)
    threshold     folding threshold lambda
    epsilon       alternative to threshold: lambda = sum(amplitudes) - epsilon
    step, count, noise_sigma, seed
    psnr_grid_db, trials, order, pencil, workers     (sweep / estimate)
    description   free text, ignored

``--set key=value`` overrides a key (value parsed as JSON when possible);
``components.<i>.<field>`` addresses one component field. Unknown keys are
errors. Exit codes: 0 success, 2 configuration/validation error, 3 estimation
failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, presets
from .bounds import (
    SingularFim,
    crb_closed_form,
    crb_conventional,
    crb_fim,
    noise_model,
)
from .errors import RankDeficient, SnapError, ValidationError
from .estimator import estimate
from .experiments import SweepConfig, classify_regions, run_sweep
from .io import load_trace, provenance, trace_to_csv, trace_to_json, write_csv, write_json
from .oracles import run_checks
from .signal import SamplingConfig, SoSParams, acquire, residue

EXIT_OK, EXIT_CONFIG, EXIT_ESTIMATION = 0, 2, 3

CONFIG_KEYS = {
    "components", "threshold", "epsilon", "step", "count", "noise_sigma", "seed",
    "psnr_grid_db", "trials", "order", "pencil", "workers", "description",
}
COMPONENT_KEYS = {"amplitude", "frequency", "phase"}
FULL_TRIALS = 10000


class ConfigError(ValidationError):
    pass


def default_config() -> dict:
    """Single-tone preset used when no ``--config`` is given."""
    p = presets.fig1_params()
    return {
        "components": p.to_dict()["components"],
        "epsilon": presets.FIG1_EPSILON,
        "step": 1.0,
        "count": presets.N_SAMPLES,
        "noise_sigma": 0.1,
        "seed": 0,
        "psnr_grid_db": list(presets.PSNR_GRID_DB),
        "trials": 1000,
    }


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, item: str) -> None:
    key, sep, raw = item.partition("=")
    if not sep:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    value = _parse_value(raw)
    parts = key.split(".")
    if parts[0] not in CONFIG_KEYS:
        raise ConfigError(f"unknown config key {parts[0]!r}")
    if len(parts) == 1:
        cfg[key] = value
        return
    if parts[0] != "components" or len(parts) != 3 or parts[2] not in COMPONENT_KEYS:
        raise ConfigError(f"cannot address {key!r}; use components.<index>.<amplitude|frequency|phase>")
    try:
        cfg["components"][int(parts[1])][parts[2]] = value
    except (KeyError, IndexError, ValueError):
        raise ConfigError(f"no component {parts[1]!r} in config") from None


def load_config(args) -> dict:
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    else:
        cfg = default_config()
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    cfg = copy.deepcopy(cfg)
    for item in args.set or []:
        apply_override(cfg, item)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        cfg["trials"] = args.trials
    if getattr(args, "full", False):
        cfg["trials"] = FULL_TRIALS
    return cfg


def build_params(cfg: dict) -> SoSParams:
    comps = cfg.get("components")
    if not isinstance(comps, list):
        raise ConfigError("config needs a 'components' list")
    for c in comps:
        if not isinstance(c, dict) or set(c) != COMPONENT_KEYS:
            raise ConfigError(f"component {c!r} must have exactly the keys {sorted(COMPONENT_KEYS)}")
    try:
        return SoSParams.from_dict({"components": comps})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ConfigError(f"bad component values: {exc}") from None


def build_sampling(cfg: dict, params: SoSParams) -> SamplingConfig:
    threshold = cfg.get("threshold")
    if threshold is None:
        if cfg.get("epsilon") is None:
            raise ConfigError("config needs 'threshold' or 'epsilon'")
        threshold = params.l1_amplitude - cfg["epsilon"]
    elif cfg.get("epsilon") is not None:
        raise ConfigError("give either 'threshold' or 'epsilon', not both")
    if threshold == "inf":
        threshold = float("inf")
    try:
        return SamplingConfig(
            threshold=float(threshold),
            step=float(cfg.get("step", 1.0)),
            count=cfg.get("count", presets.N_SAMPLES),
            noise_sigma=float(cfg.get("noise_sigma", 0.0)),
            seed=cfg.get("seed", 0),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ConfigError(str(exc)) from None


def _stem(out: str | None, default: str) -> Path:
    p = Path(out or default)
    return p.with_suffix("") if p.suffix.lower() in (".csv", ".json") else p


def _emit_json(obj, out, verbose):
    if out:
        write_json(out, obj)
        if verbose:
            print(f"wrote {out}")
    else:
        print(json.dumps(obj, indent=2))


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    params = build_params(cfg)
    sampling = build_sampling(cfg, params)
    trace = acquire(params, sampling)
    stem = _stem(args.out, "trace")
    trace_to_csv(trace, stem.with_suffix(".csv"))
    trace_to_json(trace, stem.with_suffix(".json"))
    if args.verbose:
        res = residue(params, sampling)
        print(f"wrote {stem}.csv and {stem}.json: N={sampling.count}, lambda={sampling.threshold!r}, "
              f"sigma={sampling.noise_sigma!r}, M={res.fold_count}")
    return EXIT_OK


def cmd_crb(args) -> int:
    cfg = load_config(args)
    params = build_params(cfg)
    sampling = build_sampling(cfg, params)
    sigma = sampling.noise_sigma
    if not sigma > 0:
        raise ConfigError("crb needs noise_sigma > 0")
    N, T = sampling.count, sampling.step
    out = {"provenance": provenance(cfg, sampling.seed), "K": params.K, "N": N, "noise_sigma": sigma}
    if params.K == 1:
        a, w, _ = params.components[0]
        out["closed_form"] = crb_closed_form(a, w * T, sigma, N).to_dict()
    else:
        out["note"] = "closed-form asymptotic bounds are single-tone only; see fim"
    out["fim"] = crb_fim(params, sampling)[1].to_dict()
    out["conventional"] = crb_conventional(params, sigma, T, N).to_dict()
    try:
        res = residue(params, sampling)
        nm = noise_model(res, N, sampling.threshold, sigma) if np.isfinite(sampling.threshold) else None
        out["folds"] = {"M": res.fold_count, "instants": res.indices.tolist()}
        if nm is not None:
            out["noise_model"] = {"p": nm.p, "q": nm.q, "e2": nm.e2}
    except SnapError as exc:
        out["folds"] = {"error": str(exc)}
    _emit_json(out, args.out, args.verbose)
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = load_config(args)
    if args.trace:
        try:
            trace = load_trace(args.trace)
        except (OSError, KeyError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ConfigError(f"cannot read trace {args.trace}: {exc}") from None
        K = cfg.get("order") or (trace.truth.K if trace.truth is not None else None)
        if K is None:
            K = len(cfg["components"])
    else:
        params = build_params(cfg)
        trace = acquire(params, build_sampling(cfg, params))
        K = cfg.get("order") or params.K
    code = EXIT_OK
    try:
        result = estimate(trace, int(K), cfg.get("pencil"))
    except RankDeficient as exc:
        result, code = exc.result, EXIT_ESTIMATION
        print(f"RankDeficient: {exc}", file=sys.stderr)
    out = {"provenance": provenance(cfg, trace.config.seed), **result.to_dict(), "rank_deficient": code != EXIT_OK}
    _emit_json(out, args.out, args.verbose)
    return code


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    params = build_params(cfg)
    sampling = build_sampling(cfg, params)
    sweep = SweepConfig(
        params,
        sampling,
        tuple(cfg.get("psnr_grid_db", presets.PSNR_GRID_DB)),
        int(cfg.get("trials", 1000)),
        cfg.get("order"),
        cfg.get("pencil"),
        int(args.workers or cfg.get("workers", 1)),
        keep_estimates=args.scatter,
    )
    result = run_sweep(sweep)
    stem = _stem(args.out, "sweep")
    prov = provenance(sweep.to_dict(), sampling.seed)
    write_csv(stem.with_suffix(".csv"), result.csv_header(), result.csv_rows(), prov)
    envelope = {"provenance": prov, **result.to_dict()}
    if params.K == 1 and len(sweep.psnr_grid_db) >= 5:
        regions = classify_regions(result)
        envelope["regions"] = {"low_db": regions.low, "high_db": regions.high}
    write_json(stem.with_suffix(".json"), envelope)
    if args.scatter:
        header = ["psnr_db", "trial"] + [f"omegaT_{k + 1}" for k in range(params.K)]
        rows = [
            [p, t, *result.estimates[g, t]]
            for g, p in enumerate(result.psnr_db)
            for t in range(sweep.trials)
        ]
        write_csv(Path(f"{stem}_estimates.csv"), header, rows, prov)
    if args.verbose:
        print(f"wrote {stem}.csv and {stem}.json ({sweep.trials} trials/point, M={result.fold_count})")
        for g, p in enumerate(result.psnr_db):
            mse = 10 * np.log10(result.mse[g, 1])
            crb = 10 * np.log10(result.crb_closed[g, 1])
            print(f"  {p:5.1f} dB  mse(wT) dB {np.round(mse, 2)}  crb dB {np.round(crb, 2)}  failures {result.failures[g]}")
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_checks(inject_fault=args.inject_fault)
    width = max(len(c.name) for c in checks)
    for c in checks:
        line = f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}"
        if args.verbose:
            line += f"  worst={c.worst:.3e}  tol={c.tolerance:.1e}  {c.detail}"
        print(line)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="usfspec", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output path (stem for multi-file outputs)")
    common.add_argument("--seed", type=int, help="top-level random seed")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    common.add_argument("--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="write a folded trace (CSV + JSON)").set_defaults(func=cmd_simulate)
    sub.add_parser("crb", parents=[common], help="compute CRB reports").set_defaults(func=cmd_crb)
    p = sub.add_parser("estimate", parents=[common], help="matrix-pencil estimate from a trace")
    p.add_argument("trace", nargs="?", help="trace CSV/JSON; simulated from the config when omitted")
    p.set_defaults(func=cmd_estimate)
    p = sub.add_parser("sweep", parents=[common], help="Monte Carlo PSNR sweep")
    p.add_argument("--trials", type=int, help="trials per PSNR point")
    p.add_argument("--full", action="store_true", help=f"use {FULL_TRIALS} trials per point")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--scatter", action="store_true", help="also write per-trial frequency estimates")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("verify", parents=[common], help="run the numerical oracle checks")
    p.add_argument("--inject-fault", action="store_true", help="perturb implementations so checks must fail")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, SnapError, SingularFim) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
