"""Regular chains of segments and angular-interval arithmetic.

A regular chain joins two anchor points with k turning points, equal legs of
length e and every turn equal to alpha, all to the same side. Curvature +1
turns counter-clockwise; curvature -1 is obtained by negating alpha in every
formula.
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from rcsplan.config import ANGLE_EPS, DEGENERATE_EPS
from rcsplan.errors import DegenerateAnchors

TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float

    def distance(self, other: "Point2") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)


def normalize_angle(a: float) -> float:
    """Wrap an angle into [0, 2pi)"""
    wrapped = math.fmod(a, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def turn_angle(a: float, b: float) -> float:
    """Signed smallest rotation taking direction a to direction b, in (-pi, pi]"""
    d = normalize_angle(b - a)
    return d - TWO_PI if d > math.pi else d


def direction(p: Point2, q: Point2) -> float:
    return normalize_angle(math.atan2(q.y - p.y, q.x - p.x))


@dataclass(frozen=True)
class AngularInterval:
    """Counter-clockwise range of directions [start, start + width]."""

    start: float
    width: float

    def __post_init__(self):
        if not (0.0 <= self.width <= TWO_PI + ANGLE_EPS):
            raise ValueError(f"interval width {self.width} outside [0, 2pi]")
        object.__setattr__(self, "start", normalize_angle(self.start))
        object.__setattr__(self, "width", min(self.width, TWO_PI))

    @classmethod
    def full(cls) -> "AngularInterval":
        return cls(0.0, TWO_PI)

    @classmethod
    def around(cls, center: float, half_width: float) -> "AngularInterval":
        return cls(center - half_width, 2.0 * half_width)

    @classmethod
    def between(cls, lo: float, hi: float) -> "AngularInterval":
        """Counter-clockwise sweep from lo to hi; equal bounds give the full circle"""
        width = normalize_angle(hi - lo)
        if width == 0.0:
            width = TWO_PI
        return cls(lo, width)

    @property
    def end(self) -> float:
        return normalize_angle(self.start + self.width)

    @property
    def is_full(self) -> bool:
        return self.width >= TWO_PI - ANGLE_EPS

    def contains(self, angle: float, eps: float = ANGLE_EPS) -> bool:
        if self.is_full:
            return True
        d = normalize_angle(angle - self.start)
        return d <= self.width + eps or d >= TWO_PI - eps

    def __contains__(self, angle: float) -> bool:
        return self.contains(angle)

    def pieces(self) -> List[Tuple[float, float]]:
        """Non-wrapping pieces covering the interval, inside [0, 2pi]"""
        if self.is_full:
            return [(0.0, TWO_PI)]
        hi = self.start + self.width
        # rounding can push a piece ending at 2pi a hair past it
        if hi <= TWO_PI + 1e-12:
            return [(self.start, min(hi, TWO_PI))]
        return [(0.0, hi - TWO_PI), (self.start, TWO_PI)]

    def subtract(self, others: Iterable["AngularInterval"], min_width: float = 1e-12) -> List["AngularInterval"]:
        """Parts of this interval not covered by any of `others`"""
        covered = sorted(p for other in others for p in other.pieces())
        gaps: List[Tuple[float, float]] = []
        for lo, hi in self.pieces():
            cursor = lo
            for c_lo, c_hi in covered:
                if c_hi <= cursor or c_lo >= hi:
                    continue
                if c_lo > cursor:
                    gaps.append((cursor, c_lo))
                cursor = max(cursor, c_hi)
                if cursor >= hi:
                    break
            if cursor < hi:
                gaps.append((cursor, hi))
        return join_pieces(gaps, min_width)


def join_pieces(pieces: List[Tuple[float, float]], min_width: float = 1e-12) -> List["AngularInterval"]:
    """Turn linear pieces in [0, 2pi] back into intervals, joining across zero"""
    pieces = sorted((lo, hi) for lo, hi in pieces if hi - lo > min_width)
    if not pieces:
        return []
    if len(pieces) > 1 and pieces[0][0] <= 0.0 and pieces[-1][1] >= TWO_PI:
        first = pieces.pop(0)
        last = pieces.pop()
        wrapped = AngularInterval(last[0], (last[1] - last[0]) + (first[1] - first[0]))
        return sorted([AngularInterval(lo, hi - lo) for lo, hi in pieces] + [wrapped], key=lambda i: i.start)
    return [AngularInterval(lo, hi - lo) for lo, hi in pieces]


@dataclass(frozen=True)
class RegularChain:
    start: Point2
    end: Point2
    k: int
    curvature: int
    alpha: float
    e: float
    beta: float
    vertices: Tuple[Point2, ...]

    @property
    def total_length(self) -> float:
        return (self.k + 1) * self.e

    @property
    def signed_alpha(self) -> float:
        return self.alpha * self.curvature

    def traversal(self, from_start: bool) -> Tuple[Point2, ...]:
        return self.vertices if from_start else self.vertices[::-1]


def max_turning_points(alpha: float) -> int:
    """Largest k keeping the chain a proper part of the regular polygon"""
    return math.ceil(TWO_PI / alpha - 1e-9) - 2


def build_chain(u: Point2, v: Point2, k: int, alpha: float, curvature: int) -> Optional[RegularChain]:
    """Closed-form regular chain from u to v; None when infeasible"""
    u, v = Point2(*u), Point2(*v)
    if not 0.0 < alpha < math.pi:
        raise ValueError(f"alpha {alpha} outside (0, pi)")
    if k < 0 or curvature not in (1, -1):
        raise ValueError(f"bad chain parameters k={k} curvature={curvature}")
    dx, dy = v.x - u.x, v.y - u.y
    chord = math.hypot(dx, dy)
    if chord < DEGENERATE_EPS:
        raise DegenerateAnchors(f"anchors {u} and {v} coincide")
    if k > max_turning_points(alpha):
        return None

    a = alpha * curvature
    gamma = math.atan2(dy, dx)
    theta = k * a / 2.0
    beta = gamma - (a + theta)

    if k == 0:
        return RegularChain(u, v, 0, curvature, alpha, chord, beta, (u, v))

    angles = np.arange(1, k + 2) * a + beta
    cos, sin = np.cos(angles), np.sin(angles)
    cx, sy = float(cos.sum()), float(sin.sum())
    if max(abs(cx), abs(sy)) < DEGENERATE_EPS:
        return None
    e = dx / cx if abs(cx) >= abs(sy) else dy / sy
    if e <= 0.0:
        return None

    xs = u.x + e * np.cumsum(cos)
    ys = u.y + e * np.cumsum(sin)
    turning = tuple(Point2(float(x), float(y)) for x, y in zip(xs[:-1], ys[:-1]))
    return RegularChain(u, v, k, curvature, alpha, e, beta, (u,) + turning + (v,))


def enumerate_chains(u: Point2, v: Point2, alpha: float, l: float) -> List[RegularChain]:
    """All candidate chains from u to v with legs of at least l, by increasing k"""
    if l <= 0.0:
        raise ValueError(f"minimum leg length must be positive, got {l}")
    u, v = Point2(*u), Point2(*v)
    chains: List[RegularChain] = []
    straight = build_chain(u, v, 0, alpha, 1)
    if straight.e >= l:
        chains.append(straight)

    open_branches = [1, -1]
    k = 1
    while open_branches and k <= max_turning_points(alpha):
        for curvature in list(open_branches):
            chain = build_chain(u, v, k, alpha, curvature)
            if chain is None or chain.e < l:
                open_branches.remove(curvature)
                continue
            chains.append(chain)
        k += 1
    return chains


def departure_angle(c: RegularChain, from_start: bool) -> float:
    """Direction of the first traversed segment"""
    if from_start:
        return normalize_angle(c.signed_alpha + c.beta)
    return normalize_angle((c.k + 1) * c.signed_alpha + c.beta + math.pi)


def arrival_angle(c: RegularChain, from_start: bool) -> float:
    """Direction of the last traversed segment"""
    if from_start:
        return normalize_angle((c.k + 1) * c.signed_alpha + c.beta)
    return normalize_angle(c.signed_alpha + c.beta + math.pi)


def vlr(c: RegularChain, from_start: bool, alpha: float) -> AngularInterval:
    """Valid leave range: departures reachable by one turn of at most alpha"""
    return AngularInterval.around(arrival_angle(c, from_start), alpha)
