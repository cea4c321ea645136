import logging
from typing import Iterable, List, Optional, Sequence

from rcsplan.config import Settings
from rcsplan.services.baseline_astar import astar_plan
from rcsplan.services.geometry import AngularInterval, Point2
from rcsplan.services.graph import PlannerGraph, build_graph
from rcsplan.services.occlusion import build_index
from rcsplan.services.planner import PathResult, SearchStats, Violation, check_path, plan, plan_directional
from rcsplan.services.query_index import PlannerIndex, preprocess, query
from rcsplan.services.render import render_svg
from rcsplan.services.scene import Scene, load_scene

logger = logging.getLogger(__name__)


class RcsPlanner:
    """One scene, one occlusion index, any number of planning calls."""

    def __init__(self, scene: Scene, settings: Optional[Settings] = None, accelerated: bool = True):
        self.scene = scene.validate()
        self.settings = settings or Settings.from_env()
        self.occlusion = build_index(scene.segment_set(), scene.regions(), accelerated=accelerated)
        self.index: Optional[PlannerIndex] = None
        self.stats = SearchStats()

    @classmethod
    def from_file(cls, path, settings: Optional[Settings] = None, simplify: Optional[float] = None) -> "RcsPlanner":
        scene = load_scene(path)
        if simplify:
            scene = scene.simplified(simplify)
        return cls(scene, settings)

    def _scene_for(self, target: Optional[Point2]) -> Scene:
        scene = self.scene if target is None else self.scene.with_target(target)
        if scene.target is None:
            raise ValueError("no target given and the scene has none")
        return scene

    def graph(self, target: Optional[Point2] = None) -> PlannerGraph:
        return build_graph(self._scene_for(target), self.occlusion, workers=self.settings.workers)

    def plan(self, target: Optional[Point2] = None, theta: Optional[AngularInterval] = None) -> PathResult:
        """Single-shot planning from the scene source"""
        g = self.graph(target)
        self.stats = SearchStats()
        if theta is None:
            return plan(g, stats=self.stats)
        return plan_directional(g, g.source, g.target, theta, stats=self.stats)

    def preprocess(self) -> PlannerIndex:
        if self.index is None:
            self.index = preprocess(self.scene, self.occlusion, workers=self.settings.workers)
        return self.index

    def use_index(self, ix: PlannerIndex) -> None:
        self.index = ix

    def query(self, target: Point2, theta: Optional[AngularInterval] = None) -> PathResult:
        return query(self.preprocess(), target, self.occlusion, theta)

    def astar(self, target: Optional[Point2] = None, resolution: Optional[float] = None,
              headings: int = 72) -> PathResult:
        scene = self._scene_for(target)
        if resolution is None:
            resolution = default_resolution(scene)
        return astar_plan(scene, resolution, headings, self.settings.astar_max_expansions, idx=self.occlusion)

    def check(self, path: PathResult, target: Optional[Point2] = None) -> List[Violation]:
        violations = check_path(self._scene_for(target), path)
        for v in violations:
            logger.debug("violation %s at %d: %s", v.kind.value, v.index, v.detail)
        return violations

    def render(self, routes: Iterable[PathResult], path=None, targets: Optional[Sequence[Point2]] = None) -> str:
        return render_svg(self.scene, routes, path, targets)


def default_resolution(scene: Scene) -> float:
    """Grid step for the A* comparator: a quarter leg, capped at 80 cells across the scene"""
    pts = [p for ring in scene.obstacles for p in ring] + [scene.source]
    if scene.target is not None:
        pts.append(scene.target)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    extent = max(max(xs) - min(xs), max(ys) - min(ys), scene.l)
    return max(scene.l / 4.0, extent / 80.0)
