# main.py

"""
rscavity command line.

Usage: python main.py <command> [options]

Data goes to stdout (or --output), status lines to stderr.
"""

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import load_dotenv

load_dotenv()

from rscavity.api import experiments, tables, verify                      # noqa: E402
from rscavity.api.manifest import Payload, RunManifest, render           # noqa: E402
from rscavity.api.selftest import cmd_selftest                           # noqa: E402
from rscavity.utils.errors import InputError, InvariantError, RSCavityError  # noqa: E402
from rscavity.utils.run_logger import RunLogger                          # noqa: E402

FULL_POP = 1_000_000
DESK_POP = 100_000

# left out of the manifest: outputs do not depend on them
_NOT_PARAMETERS = {"handler", "command", "subcommand", "action", "threads", "quiet", "format", "output", "seed"}


def _status(args: argparse.Namespace, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _pop(args: argparse.Namespace) -> int:
    if args.pop is not None:
        return args.pop
    return DESK_POP if args.desk else FULL_POP


def _mc(args: argparse.Namespace) -> int:
    if args.mc is not None:
        return args.mc
    return DESK_POP if args.desk else FULL_POP


# ── Handlers ─────────────────────────────────────────────────────────

def run_thresholds(args) -> Payload:
    return tables.cmd_thresholds(args.k, args.d)


def run_table1(args) -> Payload:
    ks = list(range(2, args.k_max + 1))
    _status(args, f"📊 Solving thresholds for k = 2..{args.k_max}")
    return tables.cmd_table1(ks, args.decimals)


def run_figure1(args) -> Payload:
    _status(args, f"🔍 Population dynamics on d ∈ [{args.d_min}, {args.d_max}] step {args.step}, N = {_pop(args)}")
    table = tables.cmd_figure1(args.k, args.d_min, args.d_max, args.step, _pop(args), args.iters, _mc(args),
                               args.seed, args.threads)
    _status(args, f"📊 Trend slope of the Bethe estimate: {tables.trend_statistic(table):+.4f}")
    return table


def run_popdyn(args) -> Payload:
    report = experiments.cmd_popdyn(args.d, args.k, _pop(args), args.iters, args.seed, args.save, args.threads)
    if not report["cauchy"]:
        _status(args, "⚠️ W₁ steps did not decrease over the run")
    return report


def run_bethe(args) -> Payload:
    return experiments.cmd_bethe(args.d, args.k, _pop(args), args.iters, _mc(args), args.seed, args.beta,
                                 args.population, args.threads)


def run_count(args) -> Payload:
    return experiments.cmd_count(args.path, args.literals, args.beta, args.marginals, not args.lenient, args.cap)


def run_verify(args) -> Payload:
    _status(args, f"🔍 Exact counts on {args.samples} formulas per n, Bethe with N = {_pop(args)}")
    report = verify.cmd_verify(args.d, args.k, args.n, args.samples, _pop(args), args.iters, _mc(args),
                               args.seed, args.trend, args.cap, args.threads)
    _status(args, f"📊 gap = {report['gap']:+.4f}, satisfiable {report['satisfiable_rate']:.1%}")
    return report


def run_increment(args) -> Payload:
    return verify.cmd_increment(args.d, args.k, args.n, args.samples, _pop(args), args.iters, _mc(args),
                                args.seed, args.cap, args.threads)


def run_pulp_run(args) -> Payload:
    return experiments.cmd_pulp_run(args.path, args.literals, not args.lenient)


def run_pulp_heights(args) -> Payload:
    return experiments.cmd_pulp_heights(args.path, not args.lenient)


def run_pulp_tail(args) -> Payload:
    return experiments.cmd_pulp_tail(args.d, args.k, args.h_max, args.depth, args.trials, args.seed,
                                     args.method, args.threads)


def run_pulp_sizes(args) -> Payload:
    return experiments.cmd_pulp_sizes(args.d, args.k, args.n, args.trials, args.literals, args.seed,
                                      args.check_bound, args.cap, args.threads)


def run_tree_marginal(args) -> Payload:
    return experiments.cmd_tree_marginal(args.d, args.k, args.depth, args.seed, args.tree, args.cap)


def run_tree_boundary_gap(args) -> Payload:
    return experiments.cmd_tree_boundary_gap(args.d, args.k, args.depth, args.trials, args.seed, args.threads)


def run_uniq_contraction(args) -> Payload:
    report = experiments.cmd_uniq_contraction(args.d, args.k, _pop(args), args.trials, args.seed,
                                              args.truncation, args.threads)
    if report["skipped"]:
        _status(args, f"⚠️ {report['skipped']} trial(s) skipped with identical inputs")
    if report["within_constant"] is None:
        _status(args, "⚠️ no trial produced a ratio, the estimate is undefined")
    return report


def _load_reference(path: Optional[str]) -> Optional[Dict[int, tuple]]:
    if not path:
        return None
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        return {int(k): tuple(float(v) for v in values) for k, values in raw.items()}
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"cannot read reference constants from {path}: {exc}") from exc


def run_selftest(args) -> Payload:
    report = cmd_selftest(args.seed, _load_reference(args.reference))
    for check in report["checks"]:
        _status(args, f"{'✅' if check['passed'] else '❌'} {check['name']}: {check['detail']}")
    return report


def run_logs_stats(args) -> Payload:
    return RunLogger().recent_stats(args.days)


# ── Parser ───────────────────────────────────────────────────────────

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: RSCAVITY_THREADS or CPU count)")
    p.add_argument("--quiet", action="store_true", help="suppress status lines on stderr")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--output", default=None, help="write data here instead of stdout")


def _density(p: argparse.ArgumentParser, d: float = 1.0, k: int = 3) -> None:
    p.add_argument("--d", type=float, default=d)
    p.add_argument("--k", type=int, default=k)


def _population(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pop", type=int, default=None, help=f"population size (default {FULL_POP}, {DESK_POP} with --desk)")
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--mc", type=int, default=None, help="Monte Carlo samples for the Bethe functional")
    p.add_argument("--desk", action="store_true", help="desk-scale preset: N = mc = 10^5")


def _leaf(sub, name: str, handler, command: str, help_text: str) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help_text)
    _common(p)
    p.set_defaults(handler=handler, command=command)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rscavity", description="Replica-symmetric analysis of random k-SAT")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = _leaf(sub, "thresholds", run_thresholds, "thresholds", "d_giant, d_MS, d_con, d_pure for one k")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--d", type=float, default=None, help="also report the moment bounds at this density")

    p = _leaf(sub, "table1", run_table1, "table1", "threshold table for k = 2..k_max")
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--decimals", type=int, default=4)

    p = _leaf(sub, "figure1", run_figure1, "figure1", "Bethe estimate vs moment bounds over a density grid")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--d-min", type=float, default=0.0)
    p.add_argument("--d-max", type=float, default=1.2)
    p.add_argument("--step", type=float, default=0.2)
    _population(p)

    p = _leaf(sub, "popdyn", run_popdyn, "popdyn", "iterate BP_{d,k} from δ_{1/2}")
    _density(p)
    _population(p)
    p.add_argument("--save", default=None, help="write the final population (.f64 + .json sidecar)")

    p = _leaf(sub, "bethe", run_bethe, "bethe", "Bethe free entropy of the iterated population")
    _density(p)
    _population(p)
    p.add_argument("--beta", type=float, default=None, help="finite-β functional")
    p.add_argument("--population", default=None, help="load a saved population instead of iterating")

    p = _leaf(sub, "count", run_count, "count", "exact model count of a DIMACS file")
    p.add_argument("path")
    p.add_argument("--literals", default=None, help="condition on literals, e.g. 1,-3")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--marginals", action="store_true")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--cap", type=int, default=None)

    p = _leaf(sub, "verify", run_verify, "verify", "exact (1/n)·log Z against the Bethe value")
    _density(p)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--trend", type=int, nargs="+", default=[12, 16, 20])
    p.add_argument("--cap", type=int, default=None)
    _population(p)

    p = _leaf(sub, "increment", run_increment, "increment", "coupled increment of E log(Z∨1)")
    _density(p)
    p.add_argument("--n", type=int, default=18)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--cap", type=int, default=None)
    _population(p)

    pulp = sub.add_parser("pulp", help="pure literal elimination and PULP").add_subparsers(dest="action", required=True)
    p = _leaf(pulp, "run", run_pulp_run, "pulp run", "PULP closure of a literal set")
    p.add_argument("path")
    p.add_argument("--literals", required=True)
    p.add_argument("--lenient", action="store_true")
    p = _leaf(pulp, "heights", run_pulp_heights, "pulp heights", "heights of every literal")
    p.add_argument("path")
    p.add_argument("--lenient", action="store_true")
    p = _leaf(pulp, "tail", run_pulp_tail, "pulp tail", "Monte Carlo root-height tail on GW trees")
    _density(p)
    p.add_argument("--h-max", type=int, default=4)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--method", choices=["tree", "formula"], default="tree")
    p = _leaf(pulp, "sizes", run_pulp_sizes, "pulp sizes", "closure sizes on random formulas")
    _density(p)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--literals", type=int, default=2)
    p.add_argument("--check-bound", action="store_true")
    p.add_argument("--cap", type=int, default=None)

    tree = sub.add_parser("tree", help="Galton–Watson tree computations").add_subparsers(dest="action", required=True)
    p = _leaf(tree, "marginal", run_tree_marginal, "tree marginal", "exact and recursive root marginals")
    _density(p)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--tree", default=None, help="edge-list file instead of a sampled tree")
    p.add_argument("--cap", type=int, default=None)
    p = _leaf(tree, "boundary-gap", run_tree_boundary_gap, "tree boundary-gap", "τ⁺ boundary influence per depth")
    _density(p)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--trials", type=int, default=10_000)

    uniq = sub.add_parser("uniq", help="typed operator LL⋆").add_subparsers(dest="action", required=True)
    p = _leaf(uniq, "contraction", run_uniq_contraction, "uniq contraction", "coupled dist_d contraction ratio")
    _density(p)
    p.add_argument("--pop", type=int, default=DESK_POP)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--truncation", type=float, default=None)

    p = _leaf(sub, "selftest", run_selftest, "selftest", "run the invariant suite")
    p.add_argument("--reference", default=None, help="JSON {k: [d_giant, d_ms, d_con, d_pure]} overriding the table")

    logs = sub.add_parser("logs", help="run log").add_subparsers(dest="action", required=True)
    p = _leaf(logs, "stats", run_logs_stats, "logs stats", "aggregate of recent runs")
    p.add_argument("--days", type=int, default=7)

    return parser


# ── Entry point ──────────────────────────────────────────────────────

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    manifest = RunManifest(
        command=args.command,
        parameters={k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PARAMETERS},
        seed=args.seed,
    )
    exit_code, error = 0, None
    start = time.perf_counter()
    try:
        payload = args.handler(args)
        text = render(payload, manifest, args.format)
        if args.output:
            Path(args.output).parent.mkdir(parents=True, exist_ok=True)
            Path(args.output).write_text(text, encoding="utf-8")
            _status(args, f"✅ {args.command}: wrote {args.output}")
        else:
            sys.stdout.write(text)
        if args.command == "selftest" and not payload["passed"]:
            raise InvariantError("failed invariants: " + ", ".join(payload["failed"]))
    except RSCavityError as exc:
        exit_code, error = exc.exit_code, str(exc)
        print(f"❌ {exc}", file=sys.stderr)
    except Exception as exc:
        exit_code, error = 1, f"{type(exc).__name__}: {exc}"
        print(f"❌ unexpected error: {error}", file=sys.stderr)
    finally:
        manifest.wall_time = round(time.perf_counter() - start, 6)
        try:
            RunLogger().log_run(manifest.model_dump(), exit_code, error)
        except OSError as exc:
            _status(args, f"⚠️ run log not written: {exc}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
