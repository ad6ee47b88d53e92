"""Room geometry: layout representation, spatial queries, and layout file IO.

Coordinates are metres. The room is an axis-aligned rectangle containing
axis-aligned rectangular obstacles, point supports (bed rails, chair arms,
grab bars), named goal locations, and named initial poses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import yaml

LAYOUT_SCHEMA_VERSION = 1


class LayoutError(ValueError):
    """Raised when a layout file or layout definition is invalid."""


@dataclass(frozen=True)
class Point2:
    """A 2D point in metres."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise LayoutError(f"non-finite point ({self.x}, {self.y})")

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x0, x1] x [y0, y1]."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x0, self.y0, self.x1, self.y1)):
            raise LayoutError("non-finite rectangle")
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise LayoutError(f"degenerate rectangle {self}")

    def contains(self, p: Point2) -> bool:
        """Closed-boundary containment."""
        return self.x0 <= p.x <= self.x1 and self.y0 <= p.y <= self.y1

    def contains_strict(self, p: Point2) -> bool:
        """Open-boundary containment (interior only)."""
        return self.x0 < p.x < self.x1 and self.y0 < p.y < self.y1

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def center(self) -> Point2:
        return Point2(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))


@dataclass(frozen=True)
class RoomLayout:
    """Immutable room description shared by the fall model, generator, and planner.

    Invariants (checked on construction): every support, goal, and initial
    pose lies inside the bounds and outside every obstacle; goal ids are
    unique and at least one goal exists.
    """

    bounds: Rect
    obstacles: tuple[Rect, ...] = ()
    supports: tuple[Point2, ...] = ()
    goals: tuple[tuple[str, Point2], ...] = ()
    initial_poses: tuple[tuple[str, Point2], ...] = ()
    support_dist_max: float = 4.0  # sentinel distance when no supports exist

    def __post_init__(self):
        if not self.goals:
            raise LayoutError("layout needs at least one goal")
        ids = [gid for gid, _ in self.goals]
        if len(set(ids)) != len(ids):
            raise LayoutError(f"duplicate goal ids in {ids}")
        for label, p in self._named_points():
            if not is_free(p, self):
                raise LayoutError(f"{label} at ({p.x}, {p.y}) is not in free space")
        if self.support_dist_max <= 0:
            raise LayoutError("support_dist_max must be positive")

    def _named_points(self):
        for i, p in enumerate(self.supports):
            yield f"support[{i}]", p
        for gid, p in self.goals:
            yield f"goal '{gid}'", p
        for name, p in self.initial_poses:
            yield f"initial pose '{name}'", p

    def goal_ids(self) -> list[str]:
        """Goal ids in sorted order (the canonical iteration order)."""
        return sorted(gid for gid, _ in self.goals)

    def goal_point(self, goal_id: str) -> Point2:
        for gid, p in self.goals:
            if gid == goal_id:
                return p
        raise KeyError(f"unknown goal id {goal_id!r}")

    def initial_pose(self, name: str) -> Point2:
        for n, p in self.initial_poses:
            if n == name:
                return p
        raise KeyError(f"unknown initial pose {name!r}")

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        """Clamp a coordinate pair into the room bounds."""
        b = self.bounds
        return (min(max(x, b.x0), b.x1), min(max(y, b.y0), b.y1))


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered 2D states sampled every ``dt`` seconds."""

    states: tuple[Point2, ...]
    dt: float

    def __post_init__(self):
        if not self.states:
            raise LayoutError("trajectory needs at least one state")
        if self.dt <= 0:
            raise LayoutError("trajectory dt must be positive")

    def __len__(self) -> int:
        return len(self.states)


def distance_to_nearest_support(p: Point2, layout: RoomLayout) -> float:
    """Euclidean distance from ``p`` to the closest support point.

    Returns ``layout.support_dist_max`` when the layout has no supports,
    keeping downstream fall scores bounded.
    """
    if not layout.supports:
        return layout.support_dist_max
    return min(p.dist(s) for s in layout.supports)


def is_free(p: Point2, layout: RoomLayout) -> bool:
    """True iff ``p`` is inside the bounds and strictly outside every obstacle."""
    if not layout.bounds.contains(p):
        return False
    return not any(ob.contains_strict(p) for ob in layout.obstacles)


def segment_free(a: Point2, b: Point2, layout: RoomLayout, step: float = 0.05) -> bool:
    """Check the segment a->b for collisions by sampling at spacing <= ``step``."""
    if step <= 0:
        raise ValueError("step must be positive")
    length = a.dist(b)
    n = max(1, math.ceil(length / step))
    for i in range(n + 1):
        t = i / n
        p = Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        if not is_free(p, layout):
            return False
    return True


# --- layout file IO -------------------------------------------------------
#
# Layout files are YAML:
#
#   schema_version: 1
#   bounds: [x0, y0, x1, y1]
#   obstacles:
#     - [x0, y0, x1, y1]
#   supports:
#     - [x, y]
#   goals:
#     door: [x, y]
#   initial_poses:
#     bed_right: [x, y]
#   support_dist_max: 4.0        # optional
#   fall_model: {...}            # optional, parsed by walkaid.fallmodel

def layout_to_dict(layout: RoomLayout) -> dict:
    return {
        "schema_version": LAYOUT_SCHEMA_VERSION,
        "bounds": [layout.bounds.x0, layout.bounds.y0, layout.bounds.x1, layout.bounds.y1],
        "obstacles": [[r.x0, r.y0, r.x1, r.y1] for r in layout.obstacles],
        "supports": [[p.x, p.y] for p in layout.supports],
        "goals": {gid: [p.x, p.y] for gid, p in layout.goals},
        "initial_poses": {name: [p.x, p.y] for name, p in layout.initial_poses},
        "support_dist_max": layout.support_dist_max,
    }


def layout_from_dict(data: dict, source: str = "<dict>") -> RoomLayout:
    try:
        version = data["schema_version"]
        if version != LAYOUT_SCHEMA_VERSION:
            raise LayoutError(f"{source}: unsupported schema_version {version}")
        bounds = Rect(*[float(v) for v in data["bounds"]])
        obstacles = tuple(Rect(*[float(v) for v in r]) for r in data.get("obstacles", []))
        supports = tuple(Point2(float(x), float(y)) for x, y in data.get("supports", []))
        goals = tuple(sorted(
            (str(gid), Point2(float(x), float(y)))
            for gid, (x, y) in data["goals"].items()
        ))
        poses = tuple(sorted(
            (str(name), Point2(float(x), float(y)))
            for name, (x, y) in data.get("initial_poses", {}).items()
        ))
        dmax = float(data.get("support_dist_max", 4.0))
    except LayoutError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise LayoutError(f"{source}: malformed layout ({exc})") from exc
    return RoomLayout(bounds=bounds, obstacles=obstacles, supports=supports,
                      goals=goals, initial_poses=poses, support_dist_max=dmax)


def load_layout(path) -> RoomLayout:
    """Load a RoomLayout from a YAML layout file."""
    with open(path) as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise LayoutError(f"{path}: layout file must contain a mapping")
    return layout_from_dict(data, source=str(path))


def save_layout(layout: RoomLayout, path) -> None:
    with open(path, "w") as f:
        yaml.safe_dump(layout_to_dict(layout), f, sort_keys=True)
