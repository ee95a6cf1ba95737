"""
CLI tool for geometric independent-set experiments.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path to enable imports when running as script
PACKAGE_DIR = Path(__file__).parent
if str(PACKAGE_DIR) not in sys.path:
    sys.path.insert(0, str(PACKAGE_DIR))

from utils.config import ALGORITHMS, BENCH_CONFIG, EXIT_CODES, LP_CONFIG, ROUNDING_CONFIG
from utils.helpers import dump_json, parse_int_list
from src.bench import bench, failure_count, write_report
from src.conflict_graph import build_discrete, build_geometric, is_independent
from src.exceptions import (
    IncompatibleAlgorithm, InvalidParameters, MissingPoints,
    NoUnionBound, TooLarge, WeightedInstanceError,
)
from src.generator import KINDS, CorpusSpec, generate, generate_corpus
from src.local_search import verify_locally_optimal
from src.models import (
    Instance, SelectionResult, errors_only, load_instance, normalize_ids,
    serialize_instance, strip_contained, validate,
)
from solvers import SolveParams, get_solver
from database import get_db

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """Log to stderr (stdout carries reports) and optionally to a file."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (RuntimeError, ArithmeticError)):
        return EXIT_CODES["solver_failure"]
    if isinstance(error, TooLarge):
        return EXIT_CODES["resource_cap"]
    if isinstance(error, (IncompatibleAlgorithm, NoUnionBound, MissingPoints, WeightedInstanceError)):
        return EXIT_CODES["incompatible"]
    return EXIT_CODES["validation"]


def load_checked(path: str) -> Instance:
    """Load, validate and relabel an instance; raises InvalidParameters on hard violations."""
    instance = load_instance(path)
    violations = validate(instance)
    for v in violations:
        if v.severity == "warning":
            logger.warning(f"{path}: {v}")
    errors = errors_only(violations)
    if errors:
        for v in errors:
            logger.error(f"{path}: {v}")
        raise InvalidParameters(f"{path} failed validation with {len(errors)} errors")
    return normalize_ids(instance)


def params_from_args(args: argparse.Namespace) -> SolveParams:
    return SolveParams(
        b=args.b,
        tau=args.tau,
        c_tau=args.c_tau,
        eps=args.eps,
        seed=args.seed,
        derandomize=args.derandomize,
        oracle=args.oracle,
        method=args.method,
        max_exchanges=args.max_exchanges,
    )


def emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(f"✅ Wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ============================================================
# SUBCOMMANDS
# ============================================================

def cmd_generate(args: argparse.Namespace) -> int:
    instance = generate(args.kind, args.n, args.density, args.seed, unit=args.unit, points=args.points)
    emit(serialize_instance(instance), args.out)
    return EXIT_CODES["ok"]


def cmd_run(args: argparse.Namespace) -> int:
    instance = load_checked(args.instance)
    removed = frozenset()
    if args.strip_contained:
        instance, removed = strip_contained(instance)

    report = get_solver(args.algorithm, params_from_args(args)).solve(instance)
    data = report.to_dict()
    if args.strip_contained:
        data["removed"] = sorted(removed)
    emit(dump_json(data), args.out)
    if report.truncated:
        logger.warning("Result was truncated by an iteration or exchange cap")
        return EXIT_CODES["resource_cap"]
    return EXIT_CODES["ok"]


def cmd_bench(args: argparse.Namespace) -> int:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for algorithm in algorithms:
        if algorithm not in ALGORITHMS:
            raise InvalidParameters(f"Unknown algorithm: {algorithm}. Available: {ALGORITHMS}")
    seeds = parse_int_list(args.seeds)

    if args.instances:
        corpus = [(Path(p).stem, load_checked(p)) for p in args.instances]
        description = ",".join(p for p in args.instances)
    else:
        spec = CorpusSpec(kind=args.kind, n=args.n, density=args.density, count=args.count,
                          seed=args.corpus_seed, unit=args.unit, points=args.points)
        corpus = generate_corpus(spec)
        description = f"{spec.kind} n={spec.n} density={spec.density:g} count={spec.count} seed={spec.seed}"

    db = get_db(args.db) if args.db else None
    run_id = db.start_bench_log(description, algorithms, seeds) if db else None
    try:
        report = bench(corpus, algorithms, seeds, params_from_args(args), workers=args.workers)
    except Exception as e:
        if db:
            db.update_bench_log(run_id, status='failed', error_message=str(e))
        raise

    text = write_report(report, args.out)
    if not args.out:
        sys.stdout.write(text)
    failures = failure_count(report)
    if db:
        written = db.add_results(run_id, report)
        db.update_bench_log(run_id, rows_written=written, failures=failures, status='completed')
    if args.out:
        print(f"\n✅ Wrote {len(report)} rows to {args.out} ({failures} failed trials)", file=sys.stderr)
    return EXIT_CODES["ok"]


def verify_selection(instance: Instance, selection: SelectionResult, b: Optional[int] = None) -> List[str]:
    """Problems found when re-checking a selection and its trace against the instance."""
    problems = []
    trace = selection.trace
    chosen = list(selection.chosen)
    if any(i < 0 or i >= instance.n for i in chosen):
        return [f"ids outside 0..{instance.n - 1}: {chosen}"]

    if instance.points is not None and trace.get("mode") == "discrete":
        graph = build_discrete(instance)
    else:
        graph = build_geometric(instance)
    if not is_independent(graph, chosen):
        problems.append("selection is not independent")

    weight = instance.weight_of(chosen)
    if abs(weight - selection.total_weight) > 1e-9 * max(1.0, abs(weight)):
        problems.append(f"total_weight {selection.total_weight} != recomputed {weight}")

    decisions = trace.get("decisions")
    if decisions:
        kept = sorted(d["id"] for d in decisions if d["in_I"])
        if trace.get("algorithm") == "lp-round" and kept != chosen:
            problems.append("trace decisions disagree with the chosen set")
        if any(d["in_I"] and not d["in_C"] for d in decisions):
            problems.append("trace keeps an object whose coin came up tails")

    if trace.get("algorithm") == "local-search" and not problems:
        radius = b if b is not None else trace.get("b", 1)
        step = verify_locally_optimal(graph, chosen, radius)
        if step is not None:
            problems.append(f"not {radius}-locally optimal: insert {list(step[0])}, delete {list(step[1])}")
    return problems


def cmd_verify(args: argparse.Namespace) -> int:
    instance = load_checked(args.instance)
    data = json.loads(Path(args.result).read_text())
    selection = SelectionResult(
        chosen=tuple(int(i) for i in data["chosen"]),
        total_weight=float(data.get("total_weight", data.get("weight", 0.0))),
        trace=dict(data.get("trace", {})),
    )
    problems = verify_selection(instance, selection, args.b)
    if problems:
        for problem in problems:
            print(f"❌ {problem}")
        return EXIT_CODES["validation"]
    print(f"✅ {len(selection.chosen)} objects, weight {selection.total_weight:g}: verified")
    return EXIT_CODES["ok"]


def cmd_stats(args: argparse.Namespace) -> int:
    db = get_db(args.db)
    stats = db.get_bench_stats()
    print("\n📊 Bench Statistics:")
    print(f"  Runs: {stats['total_runs']}")
    print(f"  Result rows: {stats['total_results']}")
    print(f"  Failed trials: {stats['failures']}")
    print("\n  By Algorithm:")
    for algorithm, row in stats['by_algorithm'].items():
        to_lp = row['mean_ratio_to_lp']
        to_oracle = row['mean_ratio_to_oracle']
        print(f"    {algorithm}: {row['count']} rows, "
              f"ratio/LP {to_lp if to_lp is None else f'{to_lp:.4f}'}, "
              f"ratio/OPT {to_oracle if to_oracle is None else f'{to_oracle:.4f}'}")
    print("\n  By Family:")
    for family, count in stats['by_family'].items():
        print(f"    {family}: {count}")
    return EXIT_CODES["ok"]


# ============================================================
# PARSER
# ============================================================

def add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--b', type=int, help='Local-search exchange radius (default: from the family)')
    parser.add_argument('--tau', type=float, help='Rounding parameter tau (default: c_tau * rho)')
    parser.add_argument('--c-tau', type=float, default=ROUNDING_CONFIG['c_tau'],
                        help=f"Constant in the automatic tau (default: {ROUNDING_CONFIG['c_tau']:g})")
    parser.add_argument('--eps', type=float, default=LP_CONFIG['eps'],
                        help=f"LP accuracy (default: {LP_CONFIG['eps']:g})")
    parser.add_argument('--seed', type=int, default=ROUNDING_CONFIG['seed'], help='Rounding seed')
    parser.add_argument('--derandomize', action='store_true', help='Use conditional expectations instead of coins')
    parser.add_argument('--oracle', action='store_true', help='Also compute the exact optimum (n <= 30)')
    parser.add_argument('--method', choices=['highs', 'mwu'], default=LP_CONFIG['method'], help='LP engine')
    parser.add_argument('--max-exchanges', type=int, help='Cap on local-search exchanges')


def add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--kind', choices=list(KINDS), default='disks', help='Shape kind')
    parser.add_argument('--n', type=int, default=50, help='Objects per instance (default: 50)')
    parser.add_argument('--density', type=float, default=3.0, help='Target mean overlap degree (default: 3)')
    parser.add_argument('--unit', action='store_true', help='Unit weights')
    parser.add_argument('--points', type=int, default=0, help='Size of a uniform discrete point set')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Geometric maximum independent set: local search, LP rounding, rectangles',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python run_mwis.py generate --kind disks --n 50 --density 3 --seed 7 --out data/disks.json
  python run_mwis.py run data/disks.json --algorithm lp-round --seed 1 --oracle
  python run_mwis.py bench --kind rects --n 200 --count 10 --algorithms rectangles --seeds 0-4 --out data/rects.csv
  python run_mwis.py verify data/disks.json data/result.json
  python run_mwis.py stats --db data/results.db
        """
    )
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    parser.add_argument('--log-file', type=str, help='Also write the log to this file')
    sub = parser.add_subparsers(dest='command')

    gen = sub.add_parser('generate', help='Generate a seeded random instance')
    add_corpus_flags(gen)
    gen.add_argument('--seed', type=int, default=0, help='Instance seed')
    gen.add_argument('--out', type=str, help='Output JSON path (default: stdout)')

    run = sub.add_parser('run', help='Run one algorithm on an instance')
    run.add_argument('instance', type=str, help='Instance JSON path')
    run.add_argument('--algorithm', '-a', choices=ALGORITHMS, required=True)
    run.add_argument('--strip-contained', action='store_true',
                     help='Drop objects containing another object first (unit weights only)')
    run.add_argument('--out', type=str, help='Output JSON path (default: stdout)')
    add_solver_flags(run)

    ben = sub.add_parser('bench', help='Run a seeded experiment grid and write a CSV report')
    add_corpus_flags(ben)
    ben.add_argument('--count', type=int, default=10, help='Number of generated instances (default: 10)')
    ben.add_argument('--corpus-seed', type=int, default=0, help='Seed of the generated corpus')
    ben.add_argument('--instances', nargs='+', help='Instance JSON files instead of a generated corpus')
    ben.add_argument('--algorithms', type=str, default='lp-round', help='Comma-separated algorithm names')
    ben.add_argument('--seeds', type=str, default='0', help="Seeds, e.g. '0-9' or '1,4,7'")
    ben.add_argument('--workers', type=int, default=BENCH_CONFIG['workers'], help='Worker threads')
    ben.add_argument('--db', type=str, help='Also store the run in this sqlite file')
    ben.add_argument('--out', type=str, help='Output CSV path (default: stdout)')
    add_solver_flags(ben)

    ver = sub.add_parser('verify', help='Re-check a result file against its instance')
    ver.add_argument('instance', type=str, help='Instance JSON path')
    ver.add_argument('result', type=str, help='Result JSON written by run')
    ver.add_argument('--b', type=int, help='Exchange radius for the local-optimality check')

    sta = sub.add_parser('stats', help='Show stored bench statistics')
    sta.add_argument('--db', type=str, required=True, help='sqlite file written by bench --db')

    return parser


COMMANDS = {
    'generate': cmd_generate,
    'run': cmd_run,
    'bench': cmd_bench,
    'verify': cmd_verify,
    'stats': cmd_stats,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.log_file)

    if not args.command:
        parser.print_help()
        print("\n⚠️  Please specify a command: generate, run, bench, verify or stats")
        return EXIT_CODES["validation"]

    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError, KeyError, RuntimeError, ArithmeticError) as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed ({type(e).__name__}): {e}")
        return code


if __name__ == '__main__':
    sys.exit(main())
