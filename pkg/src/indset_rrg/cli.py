"""Command-line front end: ``indset-rrg {run,batch,fit,verify,trace}``.

Exit codes: 0 ok, 1 usage error, 2 verification failure, 3 data error.
Result files start with the schema line ``# indset-rrg v1``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import rng
from .deferred import RunResult, p_fraction_trace, run
from .pairing import GraphConfig
from .stats import (
    MEAN_SE,
    SAMPLE_SD,
    STDERR_MODES,
    DataError,
    fit_summaries,
    plot_columns,
    read_points,
    summarize,
)
from .verify import StaticGraph, check_run, exact_mis, verify_solution

SCHEMA = "# indset-rrg v1"
MAX_N = 10**8

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_count(text: str) -> int:
    """Integer that may be written as ``1e6`` or ``2.5e5``."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def memory_estimate(n: int, d: int) -> int:
    """Rough peak bytes of one run: three int32 arrays per point plus per-vertex state."""
    return 12 * n * d + 96 * n


def make_config(d: int, n: int, seed: int, force: bool = False) -> GraphConfig:
    if n > MAX_N and not force:
        gib = memory_estimate(n, d) / 2**30
        raise UsageError(f"N={n} exceeds {MAX_N} (about {gib:.1f} GiB per run); pass --force to run anyway")
    try:
        return GraphConfig(n, d, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def one_run(config: GraphConfig, verify: bool) -> tuple[RunResult, str]:
    result, state = run(config, keep_state=True)
    verdict = check_run(state) if verify else "ok"
    return result, verdict


# --------------------------------------------------------------------------
# plans


@dataclass(frozen=True)
class ExperimentPlan:
    degrees: tuple[int, ...]
    sizes: tuple[int, ...]
    samples: int = 1
    seed: int = 0
    out: str | None = None
    verify: bool = False
    trace: bool = False

    def items(self):
        """``(d, N, index, seed)`` in a fixed order: d, then N, then index."""
        for d in self.degrees:
            for n in self.sizes:
                for k in range(self.samples):
                    yield d, n, k, rng.run_seed(self.seed, d, n, k)


_PLAN_KEYS = {"d", "n", "samples", "seed", "out", "verify", "trace"}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(parse_count(t) for t in text.replace(",", " ").split())
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc)) from None


def read_plan(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in _PLAN_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_plan(args) -> ExperimentPlan:
    values = read_plan(args.plan) if args.plan else {}
    degrees = tuple(args.d) if args.d else _int_list(values.get("d", ""))
    sizes = tuple(args.n) if args.n else _int_list(values.get("n", ""))
    if not degrees or not sizes:
        raise UsageError("batch needs at least one degree (--d) and one size (--n)")
    samples = args.samples if args.samples is not None else _int_list(values.get("samples", "1"))[0]
    seed = args.seed if args.seed is not None else _int_list(values.get("seed", "0"))[0]
    if samples < 1:
        raise UsageError("samples must be at least 1")
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    plan = ExperimentPlan(
        degrees=degrees,
        sizes=sizes,
        samples=samples,
        seed=seed,
        out=args.out or values.get("out"),
        verify=args.verify or _parse_bool(values.get("verify", "false")),
        trace=_parse_bool(values.get("trace", "false")),
    )
    if plan.trace and not plan.out:
        raise UsageError("trace = true needs an output file")
    for d in plan.degrees:
        for n in plan.sizes:
            make_config(d, n, 0, force=args.force)
    return plan


def _batch_item(item, verify):
    d, n, k, seed = item
    try:
        result, verdict = one_run(GraphConfig(n, d, seed), verify)
    except Exception as exc:  # recorded as an error row, the batch goes on
        return item, None, f"{type(exc).__name__}: {exc}"
    return item, result, verdict


def run_plan(plan: ExperimentPlan, jobs: int = 1):
    """Execute every run of ``plan``; yields ``(item, result, verdict)`` in plan order."""
    items = list(plan.items())
    if jobs <= 1 or len(items) <= 1:
        for item in items:
            yield _batch_item(item, plan.verify)
        return
    from concurrent.futures import ProcessPoolExecutor
    from functools import partial

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(partial(_batch_item, verify=plan.verify), items)


# --------------------------------------------------------------------------
# subcommands


def _open_out(path, append: bool):
    """Open a result file, writing the schema and column lines when it is new."""
    p = Path(path)
    fresh = not append or not p.exists() or p.stat().st_size == 0
    fh = open(p, "a" if append else "w", newline="\n")
    if fresh:
        fh.write(f"{SCHEMA}\n{RunResult.CSV_HEADER}\n")
        fh.flush()
    return fh


def cmd_run(args) -> int:
    config = make_config(args.d, args.n, args.seed, args.force)
    result, verdict = one_run(config, args.verify)
    print(RunResult.CSV_HEADER)
    print(result.csv_row())
    if args.out:
        with _open_out(args.out, append=True) as fh:
            fh.write(result.csv_row() + "\n")
    if args.verify:
        print(f"# verify: {verdict}", file=sys.stderr if verdict != "ok" else sys.stdout)
        if verdict != "ok":
            return EXIT_VERIFY
    return EXIT_OK


def cmd_batch(args) -> int:
    plan = build_plan(args)
    jobs = args.jobs or os.cpu_count() or 1
    out = _open_out(plan.out, append=False) if plan.out else None
    results, failures = [], 0
    trace = None
    if plan.trace:
        trace = open(f"{plan.out}.trace.csv", "w", newline="\n")
        trace.write(f"{SCHEMA}\nd,N,seed,total_p_fraction\n")
    if out is None:
        print(SCHEMA)
        print(RunResult.CSV_HEADER)
    try:
        for (d, n, k, seed), result, verdict in run_plan(plan, jobs):
            if result is None or verdict != "ok":
                failures += 1
                line = f"# error d={d} N={n} index={k} seed={seed}: {verdict}"
            else:
                results.append(result)
                line = result.csv_row()
                if trace is not None:
                    trace.write(f"{d},{n},{seed},{result.stats['p_events'] / n:.9g}\n")
            if out is not None:
                out.write(line + "\n")
                out.flush()
            else:
                print(line, flush=True)
    finally:
        if out is not None:
            out.close()
        if trace is not None:
            trace.close()
    stream = sys.stderr if out is None else sys.stdout
    for s in summarize(results):
        sd = "undefined (single sample)" if s.count < 2 else f"{s.sd:.3g}"
        se = "undefined" if s.count < 2 else f"{s.stderr:.3g}"
        print(f"# d={s.d} N={s.n} count={s.count} mean={s.mean:.9g} sd={sd} stderr={se}", file=stream)
    if failures:
        print(f"# {failures} run(s) failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_fit(args) -> int:
    d, summaries = read_points(args.csv, d=args.d, stderr_mode=args.stderr_mode)
    fit = fit_summaries(summaries, d=d, scale_covariance=args.scale_covariance)
    print(json.dumps(fit.report(), indent=2))
    if args.columns:
        pts = [(s.n, s.mean, s.stderr) for s in summaries]
        with open(args.columns, "w", newline="\n") as fh:
            fh.write("N,x,mean,stderr,fitted\n")
            for row in plot_columns(fit, pts):
                fh.write(f"{row['N']},{row['x']:.12g},{row['mean']:.9g},{row['stderr']:.6g},{row['fitted']:.9g}\n")
    return EXIT_OK


def _read_ids(path) -> list[int]:
    ids = []
    for line in Path(path).read_text().split():
        ids.append(int(line))
    return ids


def cmd_verify(args) -> int:
    if args.edges:
        if args.independent is None:
            raise UsageError("--edges needs --independent")
        try:
            g = StaticGraph.from_edge_file(args.edges, n=args.n)
            ind = _read_ids(args.independent)
        except (OSError, ValueError) as exc:
            raise DataError(str(exc)) from None
        cover = _read_ids(args.cover) if args.cover else sorted(set(range(g.n)) - set(ind))
        verdict = verify_solution(g, ind, cover)
        print(f"verify: {verdict}")
        if verdict == "ok" and args.exact:
            best = exact_mis(g)
            print(f"exact_mis: {best} (solution size {len(ind)})")
        return EXIT_OK if verdict == "ok" else EXIT_VERIFY
    if args.d is None or args.n is None:
        raise UsageError("verify needs either --edges/--independent or --d/--n/--seed")
    config = make_config(args.d, args.n, args.seed, args.force)
    result, state = run(config, keep_state=True)
    verdict = check_run(state)
    print(result.csv_row())
    print(f"verify: {verdict}")
    if args.edges_out:
        state.pairing.write_edge_list(args.edges_out)
    if verdict == "ok" and args.exact:
        best = exact_mis(StaticGraph.from_edges(config.n_vertices, state.pairing.edges()))
        print(f"exact_mis: {best} (solution size {result.i_size})")
        if result.i_size > best:
            return EXIT_VERIFY
    return EXIT_OK if verdict == "ok" else EXIT_VERIFY


def cmd_trace(args) -> int:
    config = make_config(args.d, args.n, args.seed, args.force)
    links, frac, total = p_fraction_trace(config)
    fh = open(args.out, "w", newline="\n") if args.out else sys.stdout
    try:
        fh.write(f"{SCHEMA}\n# d={config.degree} N={config.n_vertices} seed={config.seed} total_p_fraction={total:.9g}\n")
        fh.write("links,p_fraction\n")
        for x, y in zip(links, frac):
            fh.write(f"{int(x)},{y:.9g}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="indset-rrg", description="Independent sets on random regular graphs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_flags(p, required=True):
        p.add_argument("--d", type=int, required=required, help="degree (>= 3)")
        p.add_argument("--n", type=parse_count, required=required, help="number of vertices, e.g. 1e6")
        p.add_argument("--seed", type=parse_count, default=0)
        p.add_argument("--force", action="store_true", help=f"allow N above {MAX_N}")

    p = sub.add_parser("run", help="one run, printed as a CSV row")
    graph_flags(p)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", help="append the row to this CSV")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="many runs from flags or a key=value plan file")
    p.add_argument("--plan", help="plan file with keys d, n, samples, seed, out, verify, trace")
    p.add_argument("--d", type=int, nargs="+")
    p.add_argument("--n", type=parse_count, nargs="+")
    p.add_argument("--samples", type=parse_count)
    p.add_argument("--seed", type=parse_count, help="base seed; run k uses seed XOR mix(d, N, k)")
    p.add_argument("--jobs", type=int, help="worker processes (default: logical cores)")
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("fit", help="extrapolate alpha(N) = a / ln N + alpha_inf")
    p.add_argument("csv", help="run CSV or summary CSV (d,N,count,mean,sd)")
    p.add_argument("--d", type=int)
    p.add_argument(
        "--stderr-mode",
        choices=STDERR_MODES,
        default=SAMPLE_SD,
        help=f"summary CSVs: '{SAMPLE_SD}' divides sd by sqrt(count), '{MEAN_SE}' takes it as is",
    )
    p.add_argument("--scale-covariance", action="store_true", help="rescale the covariance by chi^2/dof")
    p.add_argument("--columns", help="write x=1/ln N, mean, stderr and fitted line to this CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="check a run, or an edge list with a given independent set")
    graph_flags(p, required=False)
    p.add_argument("--edges", help="edge list file ('u v' per line)")
    p.add_argument("--independent", help="file with the independent-set vertex ids")
    p.add_argument("--cover", help="file with the cover vertex ids (default: the complement)")
    p.add_argument("--edges-out", help="write the generated graph as an edge list")
    p.add_argument("--exact", action="store_true", help="also compare with the exact optimum (n <= 40)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trace", help="fraction of P labels versus inserted links, as CSV")
    graph_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"indset-rrg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"indset-rrg: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
