import logging
import time

from rcsplan.commands.plan import add_arrival_flags, arrival_range, print_path
from rcsplan.config import Settings
from rcsplan.errors import (
    EXIT_INDEX,
    EXIT_NO_PATH,
    EXIT_OK,
    EXIT_PARSE,
    CommandError,
    IndexMismatch,
    InvalidScene,
    NoPath,
)
from rcsplan.services.planning import RcsPlanner
from rcsplan.services.query_index import load_index, save_index
from rcsplan.services.scene import load_scene, parse_xy

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("preprocess", help="build a reusable index for the scene source")
    parser.add_argument("scene", help="scene JSON file")
    parser.add_argument("index", help="index file to write")
    parser.add_argument("--simplify", type=float, metavar="TOL", help="simplify obstacles first")
    parser.set_defaults(handler=cmd_preprocess)

    parser = subparsers.add_parser("query", help="answer target queries from an index")
    parser.add_argument("index", help="index file written by preprocess")
    parser.add_argument("--target", type=parse_xy, action="append", required=True, metavar="X,Y")
    parser.add_argument("--scene", help="scene file the index must belong to")
    add_arrival_flags(parser)
    parser.add_argument("--svg", metavar="PATH", help="write an SVG rendering of all routes")
    parser.set_defaults(handler=cmd_query)


def cmd_preprocess(args, settings: Settings) -> int:
    try:
        planner = RcsPlanner.from_file(args.scene, settings, simplify=args.simplify)
        start = time.perf_counter()
        ix = planner.preprocess()
        elapsed = (time.perf_counter() - start) * 1000.0
    except InvalidScene as e:
        raise CommandError(EXIT_PARSE, str(e))
    save_index(ix, args.index)
    print(f"nodes={ix.graph.node_count} edges={ix.graph.edge_count} split_ranges={ix.split_ranges}")
    print(f"preprocessing_ms={elapsed:.3f}")
    return EXIT_OK


def cmd_query(args, settings: Settings) -> int:
    """Answer every --target from one loaded index"""
    theta = arrival_range(args)
    try:
        scene = load_scene(args.scene) if args.scene else None
        ix = load_index(args.index, scene)
        planner = RcsPlanner(ix.scene, settings)
        planner.use_index(ix)
    except IndexMismatch as e:
        raise CommandError(EXIT_INDEX, str(e))
    except InvalidScene as e:
        raise CommandError(EXIT_PARSE, str(e))

    routes = []
    for t in args.target:
        start = time.perf_counter()
        try:
            path = planner.query(t, theta)
        except InvalidScene as e:
            raise CommandError(EXIT_PARSE, str(e))
        except NoPath as e:
            raise CommandError(EXIT_NO_PATH, str(e))
        elapsed = (time.perf_counter() - start) * 1000.0
        routes.append(path)
        print(f"target={t.x:g},{t.y:g}")
        print_path(path)
        print(f"query_ms={elapsed:.3f}")

    if args.svg:
        planner.render(routes, args.svg, args.target)
    return EXIT_OK
