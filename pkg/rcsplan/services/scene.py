"""Scene type and the JSON scene file.

A scene file looks like:

    {
      "units": "m",
      "l": 50,
      "alpha_degrees": 30,
      "source": [0, 0],
      "target": [100, 0],
      "obstacles": [[[10, 10], [20, 10], [15, 18]], [[40, -5], [40, 5]]]
    }

Obstacles with two vertices are rods (single segments).
"""
import hashlib
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

import shapely
from shapely.geometry import LineString, Point, Polygon

from rcsplan.errors import InvalidScene, SourceInsideObstacle, TargetInsideObstacle
from rcsplan.services.geometry import Point2
from rcsplan.services.occlusion import SegmentSet

logger = logging.getLogger(__name__)

Ring = Tuple[Point2, ...]


def _point(value, name: str) -> Point2:
    try:
        x, y = (float(c) for c in value)
    except (TypeError, ValueError) as e:
        raise InvalidScene(f"{name} must be an [x, y] pair, got {value!r}") from e
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InvalidScene(f"{name} has non-finite coordinates")
    return Point2(x, y)


@dataclass(frozen=True)
class Scene:
    obstacles: Tuple[Ring, ...]
    source: Point2
    target: Optional[Point2]
    l: float
    alpha: float
    units: str = "scene units"

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(
            tuple(_point(p, "obstacle vertex") for p in ring) for ring in self.obstacles))
        object.__setattr__(self, "source", _point(self.source, "source"))
        if self.target is not None:
            object.__setattr__(self, "target", _point(self.target, "target"))
        if not (math.isfinite(self.l) and self.l > 0.0):
            raise InvalidScene(f"minimum leg length must be positive, got {self.l}")
        if not 0.0 < self.alpha < math.pi:
            raise InvalidScene(f"maximum turning angle must lie in (0, 180) degrees, got {math.degrees(self.alpha)}")

    @property
    def vertex_count(self) -> int:
        return sum(len(ring) for ring in self.obstacles)

    def vertices(self) -> Iterator[Tuple[Point2, int]]:
        """Obstacle vertices in file order with their obstacle index"""
        for index, ring in enumerate(self.obstacles):
            for p in ring:
                yield p, index

    def geometries(self) -> List:
        geoms = []
        for ring in self.obstacles:
            if len(ring) == 2:
                geoms.append(LineString(ring))
            else:
                geoms.append(Polygon(ring))
        return geoms

    def regions(self):
        """Union of polygon interiors (rods excluded), or None"""
        polys = [g for g in self.geometries() if isinstance(g, Polygon)]
        return shapely.multipolygons(polys) if polys else None

    def segment_set(self) -> SegmentSet:
        return SegmentSet.from_obstacles(self.obstacles)

    def validate(self) -> "Scene":
        """Check obstacle geometry and free-space endpoints; returns self"""
        for index, ring in enumerate(self.obstacles):
            if len(ring) < 2:
                raise InvalidScene(f"obstacle {index} needs at least two vertices")
        geoms = self.geometries()
        for index, (ring, geom) in enumerate(zip(self.obstacles, geoms)):
            if len(ring) == 2:
                if geom.length <= 0.0:
                    raise InvalidScene(f"rod obstacle {index} has zero length")
            elif not geom.is_valid or geom.area <= 0.0:
                raise InvalidScene(f"obstacle {index} is not a simple polygon: {shapely.is_valid_reason(geom)}")
        if len(geoms) > 1:
            tree = shapely.STRtree(geoms)
            left, right = tree.query(geoms, predicate="intersects")
            clashes = [(int(a), int(b)) for a, b in zip(left, right) if a < b]
            if clashes:
                raise InvalidScene(f"obstacles {clashes[0][0]} and {clashes[0][1]} are not disjoint")
        self.check_free(self.source, SourceInsideObstacle, "source")
        if self.target is not None:
            self.check_free(self.target, TargetInsideObstacle, "target")
        return self

    def check_free(self, p: Point2, error=InvalidScene, name: str = "point") -> None:
        here = Point(p)
        for index, geom in enumerate(self.geometries()):
            if geom.intersects(here):
                raise error(f"{name} {tuple(p)} lies in obstacle {index}")

    def with_target(self, target: Optional[Point2]) -> "Scene":
        return replace(self, target=None if target is None else Point2(*target))

    def without_target(self) -> "Scene":
        return replace(self, target=None)

    def scaled(self, factor: float) -> "Scene":
        """Scale every coordinate and the minimum leg length"""
        def s(p):
            return Point2(p.x * factor, p.y * factor)
        return replace(
            self,
            obstacles=tuple(tuple(s(p) for p in ring) for ring in self.obstacles),
            source=s(self.source),
            target=None if self.target is None else s(self.target),
            l=self.l * factor,
        )

    def simplified(self, tolerance: float) -> "Scene":
        """Drop obstacle vertices with shapely's topology-preserving simplify"""
        rings = []
        for ring, geom in zip(self.obstacles, self.geometries()):
            if len(ring) <= 3:
                rings.append(ring)
                continue
            simple = geom.simplify(tolerance, preserve_topology=True)
            coords = list(simple.exterior.coords)[:-1]
            rings.append(tuple(Point2(*c) for c in coords) if len(coords) >= 3 else ring)
        result = replace(self, obstacles=tuple(rings)).validate()
        logger.info("simplified obstacles from %d to %d vertices", self.vertex_count, result.vertex_count)
        return result

    def fingerprint(self) -> str:
        """Digest of the target-free scene"""
        payload = scene_to_dict(self.without_target())
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_scene(data: dict) -> Scene:
    """Build and validate a Scene from a decoded scene document"""
    if not isinstance(data, dict):
        raise InvalidScene("scene document must be a JSON object")
    try:
        obstacles = [[_point(p, "obstacle vertex") for p in ring] for ring in data.get("obstacles", [])]
        target = data.get("target")
        scene = Scene(
            obstacles=tuple(tuple(ring) for ring in obstacles),
            source=_point(data["source"], "source"),
            target=None if target is None else _point(target, "target"),
            l=float(data["l"]),
            alpha=math.radians(float(data["alpha_degrees"])),
            units=str(data.get("units", "scene units")),
        )
    except KeyError as e:
        raise InvalidScene(f"scene is missing field {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidScene):
            raise
        raise InvalidScene(f"malformed scene: {e}") from e
    return scene.validate()


def scene_to_dict(scene: Scene) -> dict:
    data = {
        "units": scene.units,
        "l": scene.l,
        "alpha_degrees": math.degrees(scene.alpha),
        "source": [scene.source.x, scene.source.y],
        "obstacles": [[[p.x, p.y] for p in ring] for ring in scene.obstacles],
    }
    if scene.target is not None:
        data["target"] = [scene.target.x, scene.target.y]
    return data


def load_scene(path) -> Scene:
    try:
        text = Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except OSError as e:
        raise InvalidScene(f"cannot read scene {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InvalidScene(f"scene {path} is not valid JSON: {e}") from e
    return parse_scene(data)


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2), encoding="utf-8")


def parse_xy(text: str) -> Point2:
    """Parse an 'x,y' command-line pair"""
    parts: Sequence[str] = text.split(",")
    if len(parts) != 2:
        raise InvalidScene(f"expected x,y but got {text!r}")
    return _point(parts, "point")
