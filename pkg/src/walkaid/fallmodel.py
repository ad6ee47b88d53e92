"""Parametric fall-score surrogate.

Maps a patient state to a score in [0, 1] that grows with the distance to the
nearest support, via a logistic curve rescaled to hit 0 at distance 0 and 1 at
saturation. Holding the walker multiplies the score by ``aided_scale`` with a
small floor for the walker's own limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .room import Point2, RoomLayout, Trajectory, distance_to_nearest_support


@dataclass(frozen=True)
class FallParams:
    d_max: float = 2.0        # metres; score saturates at 1 here
    steepness: float = 6.0    # logistic slope
    aided_scale: float = 0.3  # multiplier while holding the walker
    aided_floor: float = 0.05

    def __post_init__(self):
        if self.d_max <= 0:
            raise ValueError(f"d_max must be positive, got {self.d_max}")
        if self.steepness <= 0:
            raise ValueError(f"steepness must be positive, got {self.steepness}")
        if not 0.0 <= self.aided_floor <= self.aided_scale <= 1.0:
            raise ValueError(
                f"need 0 <= aided_floor <= aided_scale <= 1, got "
                f"floor={self.aided_floor}, scale={self.aided_scale}")

    @classmethod
    def from_dict(cls, data: dict) -> "FallParams":
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return {"d_max": self.d_max, "steepness": self.steepness,
                "aided_scale": self.aided_scale, "aided_floor": self.aided_floor}


def _curve(x: np.ndarray, steepness: float) -> np.ndarray:
    """Logistic in [0,1] rescaled so the curve passes (0,0), (0.5,0.5), (1,1)."""
    lo = 1.0 / (1.0 + math.exp(0.5 * steepness))
    raw = 1.0 / (1.0 + np.exp(-steepness * (x - 0.5)))
    return (raw - lo) / (1.0 - 2.0 * lo)


def score_from_distance(d, params: FallParams):
    """Unaided score as a function of support distance (array-friendly)."""
    x = np.clip(np.asarray(d, dtype=float) / params.d_max, 0.0, 1.0)
    return _curve(x, params.steepness)


def score_unaided(p: Point2, layout: RoomLayout, params: FallParams) -> float:
    d = distance_to_nearest_support(p, layout)
    return float(score_from_distance(d, params))


def score_aided(p: Point2, layout: RoomLayout, params: FallParams) -> float:
    return max(params.aided_floor, params.aided_scale * score_unaided(p, layout, params))


def support_distances(points: np.ndarray, layout: RoomLayout) -> np.ndarray:
    """Distance to the nearest support for an (..., 2) array of points."""
    points = np.asarray(points, dtype=float)
    if not layout.supports:
        return np.full(points.shape[:-1], layout.support_dist_max)
    supports = np.array([[s.x, s.y] for s in layout.supports])
    diff = points[..., None, :] - supports  # (..., n_supports, 2)
    return np.sqrt(np.sum(diff * diff, axis=-1)).min(axis=-1)


def scores_unaided(points: np.ndarray, layout: RoomLayout, params: FallParams) -> np.ndarray:
    return score_from_distance(support_distances(points, layout), params)


def scores_aided(points: np.ndarray, layout: RoomLayout, params: FallParams) -> np.ndarray:
    return np.maximum(params.aided_floor,
                      params.aided_scale * scores_unaided(points, layout, params))


def trajectory_scores(traj: Trajectory, intervention_index: int,
                      layout: RoomLayout, params: FallParams) -> np.ndarray:
    """Per-step scores: unaided before the intervention index, aided from it on.

    ``intervention_index`` may equal len(traj), meaning no intervention.
    """
    n = len(traj)
    if not 0 <= intervention_index <= n:
        raise ValueError(f"intervention index {intervention_index} outside [0, {n}]")
    pts = np.array([[p.x, p.y] for p in traj.states])
    unaided = scores_unaided(pts, layout, params)
    aided = np.maximum(params.aided_floor, params.aided_scale * unaided)
    out = unaided.copy()
    out[intervention_index:] = aided[intervention_index:]
    return out
