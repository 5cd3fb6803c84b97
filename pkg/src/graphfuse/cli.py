"""Command-line entry point.

Subcommands: simulate (write a sampled series as an edge list),
features (raw and optionally standardized feature values of a series),
detect (sweep an observed series for anomalies), power (Monte Carlo
power study), table2 (per-subset-size detection agreement at one time).
A JSON config file can supply any flag's value; explicit flags win.
Exit codes: 0 success, 1 usage or validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .fusion import WeightScheme
from .harness import (
    ExperimentSpec,
    best_subset,
    detect_series,
    run_power,
    scheme_comparison_table,
)
from .invariants import FEATURE_NAMES, series_features
from .io import (
    detection_rows,
    emit_results,
    feature_rows,
    parse_edge_list,
    power_result_rows,
    table2_rows,
    write_edge_list,
)
from .simulate import KappaParams, SeededRng, sample_series
from .temporal import WindowParams, normalize

log = logging.getLogger("graphfuse")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we want exit 1
        raise _UsageError(message)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in str(text).split(","))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(","))


def _build_parser() -> _Parser:
    parser = _Parser(prog="graphfuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file supplying default flag values")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=["csv", "json"], help="output format (default csv)")
        p.add_argument("--verbose", action="store_true", help="log progress to stderr")

    p = sub.add_parser("simulate", help="sample a series and write it as an edge list")
    add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--t-star", dest="t_star", type=int)
    p.add_argument("--t-max", dest="t_max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int)

    p = sub.add_parser("features", help="feature values of an edge-list series")
    add_common(p)
    p.add_argument("--input", help="edge-list file")
    p.add_argument("--ell", type=int, help="also emit windowed z-scores with this window")
    p.add_argument("--sigma-cap", dest="sigma_cap", type=float)
    p.add_argument("--cc-literal", dest="cc_literal", action="store_true", default=None)
    p.add_argument("--n", type=int, help="override the vertex count")
    p.add_argument("--label-map", dest="label_map")

    p = sub.add_parser("detect", help="anomaly sweep over an edge-list series")
    add_common(p)
    p.add_argument("--input")
    p.add_argument("--ell", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--scheme", choices=["equal", "adaptive", "both"])
    p.add_argument("--subset", type=_ints, help="1-based feature ids, e.g. 1,2")
    p.add_argument("--sigma-cap", dest="sigma_cap", type=float)
    p.add_argument("--vertex-standardize", dest="vertex_standardize", action="store_true", default=None)
    p.add_argument("--no-vertex-standardize", dest="vertex_standardize", action="store_false", default=None)
    p.add_argument("--cc-literal", dest="cc_literal", action="store_true", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--label-map", dest="label_map")

    p = sub.add_parser("power", help="Monte Carlo power study on the planted-change model")
    add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--q-grid", dest="q_grid", type=_floats)
    p.add_argument("--t-star", dest="t_star", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--scheme", choices=["equal", "adaptive", "both"])
    p.add_argument("--subset", type=_ints)
    p.add_argument("--best-subset", dest="best_subset", type=int, help="search all subsets of this size")
    p.add_argument("--no-individual", dest="individual", action="store_false", default=None)
    p.add_argument("--sigma-cap", dest="sigma_cap", type=float)
    p.add_argument("--cc-literal", dest="cc_literal", action="store_true", default=None)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("table2", help="detection agreement over all subsets at one time step")
    add_common(p)
    p.add_argument("--input")
    p.add_argument("--t-star", dest="t_star", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma-cap", dest="sigma_cap", type=float)
    p.add_argument("--vertex-standardize", dest="vertex_standardize", action="store_true", default=None)
    p.add_argument("--no-vertex-standardize", dest="vertex_standardize", action="store_false", default=None)
    p.add_argument("--cc-literal", dest="cc_literal", action="store_true", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--label-map", dest="label_map")

    return parser


_DEFAULTS: dict[str, dict] = {
    "simulate": {
        "n": 50, "p": 0.01, "m": 6, "q": None, "t_star": None, "t_max": 12,
        "seed": 0, "stream": 0, "out": None, "format": "csv",
    },
    "features": {
        "input": None, "ell": None, "sigma_cap": 10.0, "cc_literal": False,
        "n": None, "label_map": None, "out": None, "format": "csv",
    },
    "detect": {
        "input": None, "ell": 5, "alpha": 0.05, "scheme": "both",
        "subset": (1, 2), "sigma_cap": 10.0, "vertex_standardize": True,
        "cc_literal": False, "n": None, "label_map": None, "out": None, "format": "csv",
    },
    "power": {
        "n": 50, "p": 0.01, "m": 6, "q": 0.3, "q_grid": None, "t_star": None,
        "M": 10_000, "alpha": 0.05, "ell": 5, "scheme": "adaptive",
        "subset": (1, 2), "best_subset": None, "individual": True,
        "sigma_cap": 10.0, "cc_literal": False, "seed": 0, "out": None, "format": "csv",
    },
    "table2": {
        "input": None, "t_star": None, "ell": 5, "alpha": 0.05,
        "sigma_cap": 10.0, "vertex_standardize": True, "cc_literal": False,
        "n": None, "label_map": None, "out": None, "format": "csv",
    },
}


def _resolve(args: argparse.Namespace) -> dict:
    """Merge flag values over config file values over built-in defaults."""
    defaults = dict(_DEFAULTS[args.command])
    if args.config:
        with Path(args.config).open("r", encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise _UsageError(f"config file {args.config} must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in defaults:
                raise _UsageError(f"config key {key!r} unknown for {args.command!r}")
            if key in ("subset",) and value is not None:
                value = tuple(int(x) for x in (value if isinstance(value, list) else _ints(value)))
            if key == "q_grid" and value is not None:
                value = tuple(float(x) for x in (value if isinstance(value, list) else _floats(value)))
            defaults[key] = value
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            defaults[key] = flag
    return defaults


def _schemes(kind: str) -> list[str]:
    return ["equal", "adaptive"] if kind == "both" else [kind]


def _require(cfg: dict, *keys: str) -> None:
    for k in keys:
        if cfg[k] is None:
            raise _UsageError(f"--{k.replace('_', '-')} is required")


def _validated(builder):
    """Parameter construction errors are usage errors, not runtime ones."""
    try:
        return builder()
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _cmd_simulate(cfg: dict) -> int:
    _require(cfg, "out")
    q = cfg["q"] if cfg["q"] is not None else cfg["p"]
    t_star = cfg["t_star"] if cfg["t_star"] is not None else cfg["t_max"] + 1
    params = _validated(lambda: KappaParams(
        n=cfg["n"], p=cfg["p"], m=cfg["m"], q=q, t_star=t_star, t_max=cfg["t_max"]
    ))
    series = sample_series(params, SeededRng(cfg["seed"], cfg["stream"]))
    write_edge_list(series, cfg["out"])
    log.info("wrote %d time steps to %s", len(series), cfg["out"])
    return 0


def _cmd_features(cfg: dict) -> int:
    _require(cfg, "input", "out")
    parsed = parse_edge_list(cfg["input"], n=cfg["n"], label_map_path=cfg["label_map"])
    raw = series_features(parsed.series, cc_literal=cfg["cc_literal"])
    t_values = [parsed.time_label(t) for t in range(1, len(parsed.series) + 1)]
    normalized = None
    if cfg["ell"] is not None:
        window = _validated(lambda: WindowParams(cfg["ell"], cfg["sigma_cap"]))
        normalized = normalize(raw, window).s
    rows = feature_rows(t_values, raw, normalized)
    emit_results(rows, cfg["out"], cfg["format"], config=_echo(cfg))
    return 0


def _cmd_detect(cfg: dict) -> int:
    _require(cfg, "input", "out")
    _validated(lambda: WindowParams(cfg["ell"], cfg["sigma_cap"]))
    _validated(lambda: WeightScheme(_schemes(cfg["scheme"])[0], tuple(cfg["subset"])))
    parsed = parse_edge_list(cfg["input"], n=cfg["n"], label_map_path=cfg["label_map"])
    t_labels = [parsed.time_label(t) for t in range(1, len(parsed.series) + 1)]
    results = detect_series(
        parsed.series,
        cfg["ell"],
        cfg["alpha"],
        _schemes(cfg["scheme"]),
        [tuple(cfg["subset"])],
        sigma_cap=cfg["sigma_cap"],
        vertex_standardized=cfg["vertex_standardize"],
        cc_literal=cfg["cc_literal"],
        t_labels=t_labels,
    )
    emit_results(detection_rows(results), cfg["out"], cfg["format"], config=_echo(cfg))
    flagged = sorted({r.t for r in results if r.reject})
    log.info("flagged %d time steps: %s", len(flagged), flagged)
    return 0


def _cmd_power(cfg: dict) -> int:
    _require(cfg, "out")
    ell = cfg["ell"]
    t_star = cfg["t_star"] if cfg["t_star"] is not None else ell + 7
    kappa = _validated(lambda: KappaParams(
        n=cfg["n"], p=cfg["p"], m=cfg["m"], q=cfg["q"], t_star=t_star, t_max=t_star
    ))
    subset = tuple(cfg["subset"])
    schemes = _validated(lambda: tuple(
        WeightScheme(kind, subset) for kind in _schemes(cfg["scheme"])
    ))
    spec = _validated(lambda: ExperimentSpec(
        kappa=kappa,
        q_grid=cfg["q_grid"],
        M=cfg["M"],
        alpha=cfg["alpha"],
        ell=ell,
        schemes=schemes,
        subset_mode="fixed" if cfg["best_subset"] is None else "best-of-d'",
        seed=cfg["seed"],
        sigma_cap=cfg["sigma_cap"],
        include_individual=cfg["individual"],
        cc_literal=cfg["cc_literal"],
    ))
    if cfg["best_subset"] is not None:
        kind = cfg["scheme"] if cfg["scheme"] != "both" else "adaptive"
        chosen, result = best_subset(spec, cfg["best_subset"], kind)
        log.info("best subset of size %d: %s", cfg["best_subset"], chosen)
        emit_results(power_result_rows([result]), cfg["out"], cfg["format"], config=_echo(cfg))
        return 0
    collected = []
    try:
        results = run_power(spec, progress=collected.append)
    except Exception:
        if collected:  # flush what finished before the failure
            partial = power_result_rows(collected)
            partial.append({k: ("FAILED" if k == "scheme" else "") for k in partial[0]})
            emit_results(partial, cfg["out"], cfg["format"], config=_echo(cfg))
            log.error("run failed; %d partial results flushed to %s", len(collected), cfg["out"])
        raise
    emit_results(power_result_rows(results), cfg["out"], cfg["format"], config=_echo(cfg))
    return 0


def _cmd_table2(cfg: dict) -> int:
    _require(cfg, "input", "t_star", "out")
    parsed = parse_edge_list(cfg["input"], n=cfg["n"], label_map_path=cfg["label_map"])
    internal_t = cfg["t_star"] - parsed.t_start + 1
    rows = scheme_comparison_table(
        parsed.series,
        internal_t,
        cfg["alpha"],
        cfg["ell"],
        sigma_cap=cfg["sigma_cap"],
        vertex_standardized=cfg["vertex_standardize"],
        cc_literal=cfg["cc_literal"],
    )
    emit_results(table2_rows(rows), cfg["out"], cfg["format"], config=_echo(cfg))
    return 0


def _echo(cfg: dict) -> dict:
    safe = {}
    for k, v in sorted(cfg.items()):
        if k in ("out", "format"):
            continue
        safe[k] = list(v) if isinstance(v, tuple) else v
    return safe


_COMMANDS = {
    "simulate": _cmd_simulate,
    "features": _cmd_features,
    "detect": _cmd_detect,
    "power": _cmd_power,
    "table2": _cmd_table2,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("run 'graphfuse --help' for usage", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    log.info("command=%s config=%s", args.command, json.dumps(_echo(cfg), sort_keys=True))

    try:
        return _COMMANDS[args.command](cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
