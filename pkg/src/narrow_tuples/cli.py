"""Command-line entry point: ``narrow-tuples <command> ...``.

Commands
  solve          adaptive local search for one k
  sieve          one classical baseline
  bench          compare methods over several k and runs
  verify         check a tuple file against every prime <= k
  oracle         exhaustive optimum for small k
  improve        continue the local search from a tuple file
  sieve-context  dump the candidate set V and the effective primes P

Exit codes: 0 success, 1 solver or verification failure, 2 usage error.
"""

import argparse
import csv
import dataclasses
import logging
import sys
import time

import numpy as np

from .baselines import METHOD_NAMES, SieveMethod
from .context import build_context, context_containing, default_range
from .core import diameter, read_tuple_file, write_tuple_file
from .rals import SIEVES, TRACE_HEADER, RalsConfig, SolutionDatabase, landscape_snapshot, rals_solve
from .verify import ORACLE_MAX_K, brute_force_optimal, full_verify

DEFAULT_SEED = 0

# flag name -> RalsConfig field
SOLVER_FLAGS = {
    "T": "T",
    "regions": "regions",
    "gamma": "gamma",
    "nt": "tournament",
    "nl": "n_shifts",
    "beta": "beta",
    "level": "level",
    "ni1": "n_insert1",
    "ni2": "n_insert2",
    "ns1": "n_remove1",
    "ns2": "n_remove2",
    "seed": "seed",
    "U": "U",
    "sieve": "sieve",
}

BENCH_COLUMNS = ("method", "k", "runs", "min_d", "mean_d", "mean_seconds", "succ_rate")


class UsageError(Exception):
    pass


class Failure(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return values


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            values[key.strip()] = value.strip()
    return values


def _coerce(field: str, raw):
    kind = {f.name: f.type for f in dataclasses.fields(RalsConfig)}[field]
    if not isinstance(raw, str):
        return raw
    if "bool" in str(kind):
        return raw.lower() in ("1", "true", "yes", "on")
    if field == "U" and raw.lower() in ("", "none"):
        return None
    if "int" in str(kind):
        return int(raw)
    if "float" in str(kind):
        return float(raw)
    return raw


def make_config(args, **fixed) -> RalsConfig:
    """Merge defaults < preset < config file < flags."""
    field_names = {f.name for f in dataclasses.fields(RalsConfig)}
    values = dict(RalsConfig.PRESETS.get(args.preset or "basever", {}))
    if args.preset and args.preset not in RalsConfig.PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}")
    if getattr(args, "config", None):
        for key, raw in read_config_file(args.config).items():
            field = SOLVER_FLAGS.get(key, key)
            if field not in field_names:
                raise UsageError(f"unknown config key {key!r}")
            values[field] = raw
    for flag, field in SOLVER_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[field] = value
    values.setdefault("seed", DEFAULT_SEED)
    values.update(fixed)
    try:
        return RalsConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def write_verified(path, H, k: int, comment: str | None = None) -> None:
    """Write a tuple file, refusing anything that fails verification."""
    verdict = full_verify(H, k)
    if not verdict:
        raise Failure(f"refusing to write a tuple that covers every class mod {verdict.failing_prime}")
    write_tuple_file(path, H, comment)
    back = read_tuple_file(path)
    if back != tuple(H) or not full_verify(back, k):
        raise Failure(f"{path} did not round-trip")


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


# -- commands --------------------------------------------------------------------

def cmd_solve(args) -> int:
    config = make_config(args)
    result = rals_solve(args.k, config)
    H = result.normalized()
    out = args.out or f"H{args.k}.txt"
    write_verified(out, H, args.k, f"rals seed={config.seed} T={config.T}")
    if args.trace:
        _write_csv(args.trace, TRACE_HEADER, (row.csv() for row in result.trace))
    if args.landscape:
        _write_csv(args.landscape, "v,f_v", (f"{v},{d}" for v, d in landscape_snapshot(result.db)))
    print(f"{args.k},{diameter(H)},{result.seconds:.3f}")
    return 0


def cmd_sieve(args) -> int:
    params = {}
    if args.tau is not None:
        params["tau"] = args.tau
    if args.shift is not None:
        params["shift"] = args.shift
    try:
        method = SieveMethod(args.method, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    started = time.perf_counter()
    H = method.run(args.k)
    seconds = time.perf_counter() - started
    if args.out:
        write_verified(args.out, H, args.k, f"method={args.method}")
    elif not full_verify(H, args.k):
        raise Failure(f"{args.method} produced an inadmissible tuple")
    line = f"{args.method},{args.k},{diameter(H)},{seconds:.3f}"
    if args.csv:
        with open(args.csv, "a") as fh:
            fh.write(line + "\n")
    print(line)
    return 0


def _bench_runs(method: str, k: int, runs: int, args):
    """Yield (diameter, seconds) per run; baselines are deterministic and run once."""
    if method != "rals":
        started = time.perf_counter()
        H = SieveMethod(method).run(k)
        if not full_verify(H, k):
            raise Failure(f"{method} produced an inadmissible tuple at k={k}")
        yield diameter(H), time.perf_counter() - started
        return
    base = make_config(args)
    for r in range(runs):
        config = base.replace(seed=base.seed + r)
        result = rals_solve(k, config)
        if not full_verify(result.best, k):
            raise Failure(f"rals produced an inadmissible tuple at k={k}")
        yield result.diameter, result.seconds


def cmd_bench(args) -> int:
    if not args.k_list:
        raise UsageError("--k-list is empty")
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m != "rals" and m not in METHOD_NAMES:
            raise UsageError(f"unknown method {m!r}")
    targets = args.target or []
    if targets and len(targets) != len(args.k_list):
        raise UsageError("--target needs one value per k")
    columns = [c for c in BENCH_COLUMNS if not (args.no_time and c == "mean_seconds")]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for method in methods:
            for i, k in enumerate(args.k_list):
                got = list(_bench_runs(method, k, args.runs, args))
                ds = np.array([d for d, _ in got])
                row = {
                    "method": method, "k": k, "runs": len(got),
                    "min_d": int(ds.min()), "mean_d": f"{ds.mean():.2f}",
                    "mean_seconds": f"{np.mean([s for _, s in got]):.3f}",
                    "succ_rate": f"{np.mean(ds <= targets[i]):.3f}" if targets else "",
                }
                writer.writerow([row[c] for c in columns])
                out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_verify(args) -> int:
    H = read_tuple_file(args.file)
    k = args.k if args.k is not None else len(H)
    if len(H) != k:
        print(f"fail: {len(H)} elements, expected {k}")
        return 1
    verdict = full_verify(H, k)
    if verdict:
        print(f"ok k={k} diameter={diameter(H)}")
        return 0
    print(f"fail: every class mod {verdict.failing_prime} is covered")
    return 1


def cmd_oracle(args) -> int:
    if args.k > ORACLE_MAX_K:
        raise UsageError(f"the oracle is limited to k <= {ORACLE_MAX_K}")
    try:
        d, H = brute_force_optimal(args.k, args.cap)
    except ValueError as exc:
        print(f"fail: {exc}")
        return 1
    if args.out:
        write_verified(args.out, H, args.k, "exhaustive optimum")
    print(f"{args.k},{d},{' '.join(map(str, H))}")
    return 0


def cmd_improve(args) -> int:
    H = read_tuple_file(args.file)
    k = len(H)
    if not full_verify(H, k):
        raise Failure(f"{args.file} is not admissible")
    config = make_config(args)
    try:
        context, shift = context_containing(H, k)
    except ValueError as exc:
        raise Failure(str(exc)) from None
    db = SolutionDatabase(k, context.U, config.regions, config.check)
    db.save([h + shift for h in H])
    result = rals_solve(k, config, context=context, db=db)
    best = result.normalized()
    out = args.out or args.file
    write_verified(out, best, k, f"improved from d={diameter(H)} seed={config.seed} T={config.T}")
    print(f"{k},{diameter(best)},{result.seconds:.3f}")
    return 0


def cmd_sieve_context(args) -> int:
    U = args.U if args.U is not None else default_range(args.k)
    try:
        ctx = build_context(args.k, U, args.pattern, args.origin)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = [
        f"# k={args.k} U={U} pattern={args.pattern} origin={args.origin} |V|={len(ctx.V)}",
        "P_R " + " ".join(map(str, ctx.P_R)),
        "P_L " + " ".join(map(str, ctx.P_L)),
        "P " + " ".join(map(str, ctx.P)),
        "V " + " ".join(map(str, ctx.V.tolist())),
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser ----------------------------------------------------------------------

def _solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("search parameters (flags > --config > --preset > defaults)")
    g.add_argument("--preset", choices=sorted(RalsConfig.PRESETS), help="basever (default) or best")
    g.add_argument("--config", metavar="FILE", help="key=value file; keys are flag or field names")
    g.add_argument("--T", type=int, help="iterations (default 1000)")
    g.add_argument("--regions", type=int, help="database regions N_R (20)")
    g.add_argument("--gamma", type=float, help="chance of a uniform pick (0.01)")
    g.add_argument("--nt", type=int, help="tournament size (4)")
    g.add_argument("--nl", type=int, help="shift steps per iteration (10)")
    g.add_argument("--beta", type=float, help="worsening-shift exponent (1.0)")
    g.add_argument("--level", type=int, choices=(0, 1, 2), help="insert-move level (2)")
    g.add_argument("--ni1", type=int, help="insert budget of the first pass (500)")
    g.add_argument("--ni2", type=int, help="insert budget of the second pass (0; 10 in best)")
    g.add_argument("--ns1", type=int, help="ends trimmed in the first pass (1)")
    g.add_argument("--ns2", type=int, help="ends trimmed in the second pass (2)")
    g.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")
    g.add_argument("--U", type=int, help="candidate range [0, U]")
    g.add_argument("--sieve", choices=SIEVES, help="candidate set (auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="narrow-tuples", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="adaptive local search",
                       epilog=f"trace CSV: {TRACE_HEADER}; landscape CSV: v,f_v; "
                              "stdout: k,diameter,seconds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", help="tuple file (default H<k>.txt)")
    p.add_argument("--trace", metavar="CSV")
    p.add_argument("--landscape", metavar="CSV")
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sieve", help="classical baseline",
                       epilog="stdout and --csv: method,k,diameter,seconds")
    p.add_argument("--method", required=True, help=", ".join(METHOD_NAMES))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tau", type=float, help="greedy threshold constant (shifted-greedy)")
    p.add_argument("--shift", type=int, help="fixed shift s (shifted methods)")
    p.add_argument("--out", help="tuple file")
    p.add_argument("--csv", help="append the record to this CSV")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("bench", help="compare methods",
                       epilog="CSV: " + ",".join(BENCH_COLUMNS) + "; succ_rate is the share of runs "
                              "at or below --target, blank without one")
    p.add_argument("--k-list", type=_int_list, required=True)
    p.add_argument("--methods", default="rals", help="comma list of baselines and/or rals")
    p.add_argument("--runs", type=int, default=1, help="rals runs per k, seeds seed..seed+runs-1")
    p.add_argument("--target", type=_int_list, help="target diameter per k")
    p.add_argument("--no-time", action="store_true", help="omit timings for a deterministic CSV")
    p.add_argument("--out", help="CSV path (default stdout)")
    _solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="check a tuple file")
    p.add_argument("file")
    p.add_argument("--k", type=int, help="expected size (default: the file's length)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help=f"exhaustive optimum, k <= {ORACLE_MAX_K}")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cap", type=int, help="largest diameter searched")
    p.add_argument("--out", help="tuple file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("improve", help="search onward from a tuple file")
    p.add_argument("file")
    p.add_argument("--out", help="tuple file (default: overwrite the input)")
    _solver_flags(p)
    p.set_defaults(func=cmd_improve)

    p = sub.add_parser("sieve-context", help="dump V and the prime sets")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--U", type=int)
    p.add_argument("--pattern", choices=("hr", "schinzel"), default="hr")
    p.add_argument("--origin", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sieve_context)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "runs", 1) < 1:
        parser.error("--runs must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (Failure, RuntimeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
