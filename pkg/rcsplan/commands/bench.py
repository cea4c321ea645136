import logging
import sys

from rcsplan.config import Settings
from rcsplan.errors import EXIT_OK
from rcsplan.services.suites import SUITES, run_suite

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="run a generated benchmark suite and emit CSV")
    parser.add_argument("suite", choices=list(SUITES))
    parser.add_argument("--seed", type=int, help="scene generator seed (default RCS_SEED)")
    parser.add_argument("--out", metavar="CSV", help="write the table here instead of stdout")
    parser.add_argument("--no-astar", action="store_true", help="skip the grid A* comparator")
    parser.add_argument("--no-timings", action="store_true", help="leave timing columns empty")
    parser.set_defaults(handler=cmd_bench)


def cmd_bench(args, settings: Settings) -> int:
    seed = settings.seed if args.seed is None else args.seed
    logger.info("running suite %s with seed %d", args.suite, seed)
    table = run_suite(args.suite, seed, astar=not args.no_astar, timings=not args.no_timings)
    header = f"# suite={args.suite} seed={seed}\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(header)
            table.to_csv(f, index=False)
    else:
        sys.stdout.write(header)
        table.to_csv(sys.stdout, index=False)
    return EXIT_OK
