import json
import logging
import math
import sys

from rcsplan.config import Settings
from rcsplan.errors import (
    EXIT_NO_PATH,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_VIOLATION,
    CommandError,
    InvalidScene,
    NoPath,
)
from rcsplan.services.baseline_astar import relative_difference
from rcsplan.services.geometry import AngularInterval
from rcsplan.services.planner import PathResult
from rcsplan.services.planning import RcsPlanner
from rcsplan.services.scene import parse_xy

logger = logging.getLogger(__name__)


def add_arrival_flags(parser) -> None:
    parser.add_argument("--arrive-from", type=float, metavar="DEG",
                        help="counter-clockwise start of the allowed arrival directions")
    parser.add_argument("--arrive-to", type=float, metavar="DEG",
                        help="counter-clockwise end of the allowed arrival directions")


def arrival_range(args):
    """Arrival interval from the --arrive-* flags, or None"""
    if args.arrive_from is None and args.arrive_to is None:
        return None
    if args.arrive_from is None or args.arrive_to is None:
        raise CommandError(EXIT_PARSE, "--arrive-from and --arrive-to must be given together")
    return AngularInterval.between(math.radians(args.arrive_from), math.radians(args.arrive_to))


def path_document(path: PathResult) -> dict:
    return {
        "length": path.length,
        "polyline": [[p.x, p.y] for p in path.polyline],
        "edges": list(path.edge_sequence),
    }


def print_path(path: PathResult, out=None) -> None:
    out = out or sys.stdout
    print(f"d={path.length:.10g}", file=out)
    print("path=" + json.dumps([[p.x, p.y] for p in path.polyline]), file=out)


def register(subparsers) -> None:
    parser = subparsers.add_parser("plan", help="plan one path through a scene file")
    parser.add_argument("scene", help="scene JSON file")
    parser.add_argument("--target", type=parse_xy, metavar="X,Y", help="override the scene target")
    add_arrival_flags(parser)
    parser.add_argument("--svg", metavar="PATH", help="write an SVG rendering")
    parser.add_argument("--out", metavar="PATH", help="write the polyline as JSON")
    parser.add_argument("--check", action="store_true", help="verify the path and fail on violations")
    parser.add_argument("--astar", action="store_true", help="also run the grid A* comparator")
    parser.add_argument("--simplify", type=float, metavar="TOL", help="simplify obstacles first")
    parser.set_defaults(handler=cmd_plan)


def cmd_plan(args, settings: Settings) -> int:
    """Plan from the scene source to its target and print the length"""
    theta = arrival_range(args)
    try:
        planner = RcsPlanner.from_file(args.scene, settings, simplify=args.simplify)
        path = planner.plan(args.target, theta)
    except InvalidScene as e:
        raise CommandError(EXIT_PARSE, str(e))
    except NoPath as e:
        raise CommandError(EXIT_NO_PATH, str(e))
    except ValueError as e:
        raise CommandError(EXIT_PARSE, str(e))

    print_path(path)
    routes = [path]
    if args.astar:
        try:
            grid = planner.astar(args.target)
        except NoPath as e:
            logger.warning("grid A* found no path: %s", e)
        else:
            routes.append(grid)
            print(f"astar_d={grid.length:.10g}")
            print(f"relative_difference={relative_difference(path.length, grid.length):.1f}")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump(path_document(path), f, indent=2)
    if args.svg:
        planner.render(routes, args.svg, None if args.target is None else [args.target])

    if args.check:
        violations = planner.check(path, args.target)
        if violations:
            for v in violations:
                print(f"violation {v.kind.value} at {v.index}: {v.detail}", file=sys.stderr)
            raise CommandError(EXIT_VIOLATION, f"{len(violations)} requirement violations")
    return EXIT_OK
