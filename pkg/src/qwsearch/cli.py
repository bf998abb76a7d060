"""Command-line front end.

Exit codes: 0 success, 1 computational or I/O failure, 2 usage error.
Data goes to files under ``--out`` and to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import rng
from .evolution import (
    DEFAULT_GRID,
    SearchSetup,
    default_time_grid,
    detuning_experiment,
    phi_counterexample,
    probability_series,
)
from .experiments import PRule, SweepConfig, emit_figure1_data, run_sweep
from .graph import GraphFormatError, complete_bipartite, complete_graph, load_edge_list, sample_er
from .spectral import (
    DEFAULT_C,
    SpectralDecomposition,
    bound_report,
    compute_rates,
    eig_sym,
    exact_rate,
    h1_gap,
    resonant_rate,
)

log = logging.getLogger("qwsearch")

SUBCOMMANDS = ("sweep", "bounds", "evolve", "demo-phi", "demo-detune", "laplacian-gap")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    options: dict
    config_path: Optional[str] = None
    overrides: dict = field(default_factory=dict)
    output_dir: Path = Path("qwsearch-out")
    base_seed: int = 0
    verbosity: int = 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _marked(text: str):
    if text == "random":
        return "random"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--marked takes 'random' or a vertex index, got {text!r}") from None


def _pair(text: str) -> tuple[int, int]:
    vals = _int_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected 'm,k', got {text!r}")
    return vals[0], vals[1]


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key = value file whose keys mirror flag names")
    parser.add_argument("--out", metavar="DIR", default="qwsearch-out", help="output directory (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=0, help="base 64-bit seed (default: %(default)s)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more diagnostics on stderr")


def _graph_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--graph", metavar="FILE", help="edge-list file; otherwise an ER graph is sampled")
    parser.add_argument("--n", type=_int_list, help="vertex count of the sampled ER graph")
    parser.add_argument("--p", type=_float_list, help="edge probability of the sampled ER graph")
    parser.add_argument("--p-exp", type=_float_list, help="use p = n**-a")
    parser.add_argument("--p-logfactor", type=_float_list, help="use p = c ln(n)/n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwsearch", description="CTQW spatial search on Erdos-Renyi graphs")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", required=True)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep over (n, p) cells with per-trial curves")
    _common(p)
    p.add_argument("--n", type=_int_list, help="comma-separated vertex counts")
    p.add_argument("--p", type=_float_list, help="explicit edge probabilities")
    p.add_argument("--p-exp", type=_float_list, help="exponents a for p = n**-a")
    p.add_argument("--p-logfactor", type=_float_list, help="factors c for p = c ln(n)/n")
    p.add_argument("--trials", type=int, default=10, help="graphs per (n, p) cell (default: %(default)s)")
    p.add_argument("--rate", default="both", help="exact | simplified | resonant | both | all (default: %(default)s)")
    p.add_argument("--marked", type=_marked, default="random", help="'random' or a fixed vertex index")
    p.add_argument("--C", type=float, default=DEFAULT_C, help="lambda_1 bound constant (default: %(default)s)")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="time-grid points (default: %(default)s)")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: available CPUs)")
    p.add_argument("--max-rejections", type=int, default=50,
                   help="disconnected samples tolerated per trial before a cell fails (default: %(default)s)")

    p = sub.add_parser("bounds", help="concentration-bound report for one graph")
    _common(p)
    _graph_source(p)
    p.add_argument("--C", type=float, default=DEFAULT_C, help="lambda_1 bound constant (default: %(default)s)")

    p = sub.add_parser("evolve", help="success-probability curve for one search")
    _common(p)
    _graph_source(p)
    p.add_argument("--rate", "--gamma", dest="rate", default="exact",
                   help="exact | simplified | resonant | custom=<x> | <x> (default: %(default)s)")
    p.add_argument("--marked", type=_marked, default="random", help="'random' or a vertex index")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="time-grid points (default: %(default)s)")

    p = sub.add_parser("demo-phi", help="near-uniform state that cannot find its tail vertices")
    _common(p)
    p.add_argument("--n", type=int, default=10, help="vertex count (default: %(default)s)")
    p.add_argument("--f", type=int, default=2, help="tail size (default: %(default)s)")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="time-grid points (default: %(default)s)")

    p = sub.add_parser("demo-detune", help="search quality under a detuned transition rate")
    _common(p)
    _graph_source(p)
    p.add_argument("--marked", type=_marked, default="random", help="'random' or a vertex index")
    p.add_argument("--deltas", type=_float_list, default=None,
                   help="relative detunings (default: 0, 0.1/sqrt(n), 1/ln(n))")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="time-grid points (default: %(default)s)")

    p = sub.add_parser("laplacian-gap", help="spectral gap of I - c * normalized Laplacian")
    _common(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--bipartite", type=_pair, metavar="M,K", help="complete bipartite K_{m,k}")
    src.add_argument("--complete", type=int, metavar="N", help="complete graph K_n")
    src.add_argument("--graph", metavar="FILE", help="edge-list file")
    p.add_argument("--coeff", type=float, default=1.0, help="coefficient c (default: %(default)s)")

    return parser


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[qwsearch]\n" + fh.read(), source=path)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return dict(cp["qwsearch"])


def _apply_config(parser: argparse.ArgumentParser, subparser: argparse.ArgumentParser, path: str) -> dict:
    values = _read_config(path)
    by_dest = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_dest[opt[2:]] = action
    defaults = {}
    for key, raw in values.items():
        action = by_dest.get(key.replace("_", "-")) or by_dest.get(key)
        if action is None or action.dest in ("config", "help"):
            parser.error(f"unknown key {key!r} in config file {path}")
        try:
            defaults[action.dest] = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            parser.error(f"bad value for {key!r} in config file {path}: {exc}")
    subparser.set_defaults(**defaults)
    return defaults


def parse_args(argv: Sequence[str] | None = None) -> CliConfig:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(argv)
    file_values = {}
    if getattr(ns, "config", None):
        subparser = parser._subparsers._group_actions[0].choices[ns.subcommand]
        try:
            file_values = _apply_config(parser, subparser, ns.config)
        except UsageError as exc:
            parser.error(str(exc))
        ns = parser.parse_args(argv)
    options = vars(ns).copy()
    sub = options.pop("subcommand")
    overrides = {k: v for k, v in options.items() if k in file_values and file_values[k] != v}
    return CliConfig(
        subcommand=sub,
        options=options,
        config_path=options.get("config"),
        overrides=overrides,
        output_dir=Path(options.get("out") or "qwsearch-out"),
        base_seed=int(options.get("seed") or 0),
        verbosity=int(options.get("verbose") or 0),
    )


def _p_rule(opts: dict) -> PRule:
    chosen = [(k, opts.get(k)) for k in ("p", "p_exp", "p_logfactor") if opts.get(k)]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --p, --p-exp, --p-logfactor")
    key, vals = chosen[0]
    return PRule({"p": "list", "p_exp": "exp", "p_logfactor": "logfactor"}[key], tuple(vals))


def _single_graph(opts: dict, seed: int):
    if opts.get("graph"):
        return load_edge_list(opts["graph"])
    ns = opts.get("n") or []
    if len(ns) != 1:
        raise UsageError("give --graph FILE or a single --n with one of --p/--p-exp/--p-logfactor")
    n = ns[0]
    ps = _p_rule(opts).probabilities(n)
    if len(ps) != 1:
        raise UsageError("a single graph needs a single edge probability")
    return sample_er(n, ps[0], seed)


def _pick_marked(policy, n: int, seed: int) -> int:
    if policy == "random":
        return rng.randbelow(rng.derive_seed(seed, rng.MARK_TAG), n)
    if not 0 <= policy < n:
        raise ValueError(f"marked vertex {policy} out of range for n={n}")
    return policy


def _gamma(rate: str, graph, decomp: SpectralDecomposition, marked: int) -> tuple[float, str]:
    if rate == "exact":
        return exact_rate(graph, decomp), "exact"
    if rate == "simplified":
        return compute_rates(graph, decomp=decomp).gamma_simple, "simplified"
    if rate == "resonant":
        return resonant_rate(decomp, marked)[0], "resonant"
    text = rate[len("custom="):] if rate.startswith("custom=") else rate
    try:
        return float(text), "custom"
    except ValueError:
        raise UsageError(f"--rate takes exact, simplified, resonant, custom=<x> or a number; got {rate!r}") from None


def _sweep_rates(rate: str) -> tuple:
    table = {
        "exact": ("exact",),
        "simplified": ("simplified",),
        "resonant": ("resonant",),
        "both": ("exact", "simplified"),
        "all": ("exact", "simplified", "resonant"),
    }
    if rate not in table:
        raise UsageError(f"sweep --rate takes one of {', '.join(table)}; got {rate!r}")
    return table[rate]


def _out_dir(cfg: CliConfig) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg.output_dir


def _cmd_sweep(cfg: CliConfig, out) -> int:
    o = cfg.options
    if not o.get("n"):
        raise UsageError("sweep needs --n")
    sweep_cfg = SweepConfig(
        n_list=tuple(o["n"]),
        p_rule=_p_rule(o),
        trials_per_cell=o["trials"],
        base_seed=cfg.base_seed,
        rate_kinds=_sweep_rates(o["rate"]),
        marked_policy=o["marked"],
        C=o["C"],
        time_grid_size=o["grid"],
        threads=o.get("threads"),
        max_rejections=o["max_rejections"],
    )
    report = run_sweep(sweep_cfg)
    emit_figure1_data(report, _out_dir(cfg))
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "p", "rate_kind", "trials", "mean_pmax", "std_pmax", "mean_tstar", "rejections"])
    for row in report.summary_rows():
        writer.writerow([row[k] for k in ("n", "p", "rate_kind", "trials", "mean_pmax", "std_pmax", "mean_tstar", "rejections")])
    for comp in report.comparisons():
        log.info("n=%d p=%.5g exact-simplified=%.4f close=%s larger_discrepancy=%s",
                 comp["n"], comp["p"], comp["difference"], comp["close"], comp["larger_discrepancy"])
    return 1 if any(c.failed for c in report.cells) else 0


def _cmd_bounds(cfg: CliConfig, out) -> int:
    g = _single_graph(cfg.options, cfg.base_seed)
    rep = bound_report(g, cfg.options["C"])
    d = _out_dir(cfg)
    (d / "bounds.json").write_text(rep.to_json() + "\n", encoding="utf-8")
    (d / "bounds.csv").write_text(rep.to_csv(), encoding="utf-8")
    out.write(rep.to_json() + "\n")
    return 0


def _cmd_evolve(cfg: CliConfig, out) -> int:
    o = cfg.options
    g = _single_graph(o, cfg.base_seed)
    decomp = eig_sym(g.as_float())
    w = _pick_marked(o["marked"], g.n, cfg.base_seed)
    gamma, kind = _gamma(o["rate"], g, decomp, w)
    series = probability_series(SearchSetup(g, gamma, w, kind), default_time_grid(g.n, o["grid"]))
    series.write_csv(_out_dir(cfg) / "series.csv", comments={
        "n": g.n, "p": repr(g.p_nominal), "seed": g.seed, "rate_kind": kind,
        "gamma": repr(gamma), "marked": w,
    })
    out.write(f"marked={w} gamma={gamma!r} t_star={series.t_star!r} p_max={series.p_max!r}\n")
    return 0


def _cmd_demo_phi(cfg: CliConfig, out) -> int:
    o = cfg.options
    n, f = o["n"], o["f"]
    _, rep = phi_counterexample(n, f, default_time_grid(n, o["grid"]))
    payload = {
        "n": n, "f": f, "overlap": rep.overlap, "expected_overlap": rep.expected_overlap,
        "tail_bound": rep.tail_bound, "baseline": rep.baseline,
    }
    (_out_dir(cfg) / "phi.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    out.write(f"overlap={rep.overlap!r}\ntail_bound={rep.tail_bound!r}\n")
    return 0


def _cmd_demo_detune(cfg: CliConfig, out) -> int:
    o = cfg.options
    g = _single_graph(o, cfg.base_seed)
    w = _pick_marked(o["marked"], g.n, cfg.base_seed)
    deltas = o["deltas"] if o["deltas"] is not None else [0.0, 0.1 / math.sqrt(g.n), 1.0 / math.log(g.n)]
    points = detuning_experiment(g, w, deltas, o["grid"])
    with open(_out_dir(cfg) / "detune.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["delta", "gamma", "t_star", "p_max"])
        for pt in points:
            writer.writerow([repr(pt.delta), repr(pt.gamma), repr(pt.t_star), repr(pt.p_max)])
    for pt in points:
        out.write(f"delta={pt.delta!r} t_star={pt.t_star!r} p_max={pt.p_max!r}\n")
    return 0


def _cmd_laplacian_gap(cfg: CliConfig, out) -> int:
    o = cfg.options
    if o.get("bipartite"):
        g = complete_bipartite(*o["bipartite"])
    elif o.get("complete"):
        g = complete_graph(o["complete"])
    else:
        g = load_edge_list(o["graph"])
    gap = h1_gap(g, o["coeff"])
    out.write(f"{round(gap, 12) + 0.0}\n")
    return 0


COMMANDS = {
    "sweep": _cmd_sweep,
    "bounds": _cmd_bounds,
    "evolve": _cmd_evolve,
    "demo-phi": _cmd_demo_phi,
    "demo-detune": _cmd_demo_detune,
    "laplacian-gap": _cmd_laplacian_gap,
}


def dispatch(cfg: CliConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    logging.basicConfig(
        level=logging.WARNING - 10 * min(cfg.verbosity, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[cfg.subcommand](cfg, out)
    except UsageError as exc:
        print(f"qwsearch {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"qwsearch {cfg.subcommand}: {exc}", file=sys.stderr)
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
