"""SVG export of a scene and planned routes."""
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence
from xml.etree import ElementTree as ET

from rcsplan.services.geometry import Point2
from rcsplan.services.planner import PathResult
from rcsplan.services.scene import Scene

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
ROUTE_COLOURS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")


def _bounds(scene: Scene, routes, targets):
    xs = [scene.source.x] + [p.x for ring in scene.obstacles for p in ring] + [t.x for t in targets]
    ys = [scene.source.y] + [p.y for ring in scene.obstacles for p in ring] + [t.y for t in targets]
    for route in routes:
        xs.extend(p.x for p in route.polyline)
        ys.extend(p.y for p in route.polyline)
    return min(xs), min(ys), max(xs), max(ys)


def render_svg(scene: Scene, routes: Iterable[PathResult] = (), path: Optional[str] = None,
               targets: Optional[Sequence[Point2]] = None) -> str:
    """Render obstacles, routes and endpoint markers; y grows upwards.

    `targets` replaces the scene target marker, one circle per point.
    """
    routes = list(routes)
    if targets is None:
        targets = [] if scene.target is None else [scene.target]
    x0, y0, x1, y1 = _bounds(scene, routes, targets)
    margin = 0.05 * max(x1 - x0, y1 - y0, scene.l)
    x0, y0, x1, y1 = x0 - margin, y0 - margin, x1 + margin, y1 + margin
    stroke = max(x1 - x0, y1 - y0) / 400.0

    root = ET.Element("svg", {
        "xmlns": SVG_NS,
        "version": "1.1",
        "viewBox": f"{x0:g} {-y1:g} {x1 - x0:g} {y1 - y0:g}",
    })
    # flip y so scene coordinates read like a map
    layer = ET.SubElement(root, "g", {"transform": "scale(1,-1)"})

    for i, ring in enumerate(scene.obstacles):
        ET.SubElement(layer, "polygon", {
            "id": f"obstacle-{i}",
            "points": " ".join(f"{p.x:g},{p.y:g}" for p in ring),
            "fill": "#bbbbbb",
            "stroke": "#444444",
            "stroke-width": f"{stroke:g}",
        })

    for i, route in enumerate(routes):
        pts = route.polyline
        d = "M " + " L ".join(f"{p.x:.6f},{p.y:.6f}" for p in pts)
        ET.SubElement(layer, "path", {
            "id": f"route-{i}",
            "d": d,
            "fill": "none",
            "stroke": ROUTE_COLOURS[i % len(ROUTE_COLOURS)],
            "stroke-width": f"{2 * stroke:g}",
        })

    markers = [("source", scene.source, "#2ca02c")]
    for i, t in enumerate(targets):
        markers.append(("target" if len(targets) == 1 else f"target-{i}", t, "#d62728"))
    for name, p, colour in markers:
        ET.SubElement(layer, "circle", {
            "id": name,
            "cx": f"{p.x:g}",
            "cy": f"{p.y:g}",
            "r": f"{4 * stroke:g}",
            "fill": colour,
        })

    text = ET.tostring(root, encoding="unicode")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info("wrote %s", path)
    return text
