"""Monte Carlo rollout of future patient trajectories from the GP mixture.

Rollouts are open-loop: each sampled trajectory feeds its own state back as
the next GP input, so the ensemble keeps the mixture's multimodality. Sampled
states are clamped to the room bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intent import IntentBelief
from .mixture import GpMixture
from .room import Point2, RoomLayout
from .seeding import child


@dataclass(frozen=True)
class PredictionConfig:
    """Ensemble size and lookahead length."""

    k: int = 50
    horizon: int = 40

    def __post_init__(self):
        if self.k < 1 or self.horizon < 1:
            raise ValueError("k and horizon must be >= 1")


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """K sampled futures for one goal; index 0 of each is the current state."""

    goal: str
    trajectories: np.ndarray  # (k, horizon + 1, 2)
    weight: float

    def __post_init__(self):
        if self.trajectories.ndim != 3 or self.trajectories.shape[2] != 2:
            raise ValueError("trajectories must have shape (k, horizon + 1, 2)")
        if self.trajectories.shape[0] < 1:
            raise ValueError("ensemble needs at least one trajectory")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight must be in [0, 1], got {self.weight}")

    @property
    def k(self) -> int:
        return self.trajectories.shape[0]

    @property
    def horizon(self) -> int:
        return self.trajectories.shape[1] - 1


def rollout(mixture: GpMixture, goal: str, start: Point2, layout: RoomLayout,
            horizon: int, k: int, seed, weight: float = 1.0,
            aided: bool = False) -> TrajectoryEnsemble:
    """Sample k trajectories of ``horizon`` steps for one goal.

    Each step draws the per-coordinate delta from the GP posterior at the
    trajectory's current state. Deterministic given the seed.
    """
    if horizon < 1 or k < 1:
        raise ValueError("horizon and k must be >= 1")
    rng = np.random.default_rng(seed)
    b = layout.bounds
    lo = np.array([b.x0, b.y0])
    hi = np.array([b.x1, b.y1])

    out = np.empty((k, horizon + 1, 2))
    states = np.tile([start.x, start.y], (k, 1))
    out[:, 0, :] = states
    for t in range(horizon):
        mean, var = mixture.step_distribution(goal, states, aided=aided)
        delta = mean + np.sqrt(var) * rng.standard_normal((k, 2))
        states = np.clip(states + delta, lo, hi)
        out[:, t + 1, :] = states
    return TrajectoryEnsemble(goal=goal, trajectories=out, weight=weight)


def predict_all(mixture: GpMixture, belief: IntentBelief, start: Point2,
                layout: RoomLayout, horizon: int, k: int, seed,
                aided: bool = False) -> list[TrajectoryEnsemble]:
    """One ensemble per goal (sorted by goal id), weighted by the belief."""
    goals = sorted(belief.goal_ids())
    return [
        rollout(mixture, goal, start, layout, horizon, k, child(seed, i),
                weight=belief.prob(goal), aided=aided)
        for i, goal in enumerate(goals)
    ]
