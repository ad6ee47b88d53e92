"""Recursive Bayesian goal inference with a forgetting factor.

The belief over goals is updated from each observed one-step transition:
posterior score = transition likelihood x prior^(1 - forgetting), computed in
log-space, floored relative to the best goal, and renormalized each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mixture import GpMixture
from .room import Point2

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class IntentBelief:
    """Normalized probability over goal ids.

    ``degenerate`` flags an update whose likelihoods all underflowed, in which
    case the configured prior was returned instead.
    """

    probs: tuple[tuple[str, float], ...]
    degenerate: bool = False

    def __post_init__(self):
        total = 0.0
        for gid, p in self.probs:
            if not (p >= 0.0 and math.isfinite(p)):
                raise ValueError(f"invalid probability {p} for goal {gid!r}")
            total += p
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"belief sums to {total}, not 1")

    @classmethod
    def from_dict(cls, probs: dict[str, float], degenerate: bool = False) -> "IntentBelief":
        return cls(tuple(sorted(probs.items())), degenerate=degenerate)

    @classmethod
    def uniform(cls, goal_ids) -> "IntentBelief":
        ids = sorted(goal_ids)
        return cls(tuple((gid, 1.0 / len(ids)) for gid in ids))

    def as_dict(self) -> dict[str, float]:
        return dict(self.probs)

    def prob(self, goal_id: str) -> float:
        for gid, p in self.probs:
            if gid == goal_id:
                return p
        raise KeyError(f"unknown goal id {goal_id!r}")

    def goal_ids(self) -> list[str]:
        return [gid for gid, _ in self.probs]


@dataclass(frozen=True)
class IntentConfig:
    """Filter settings: forgetting in [0, 1), relative probability floor."""

    forgetting: float = 0.1
    prior: IntentBelief | None = None
    prob_floor: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.forgetting < 1.0:
            raise ValueError(f"forgetting must be in [0, 1), got {self.forgetting}")
        if not 0.0 < self.prob_floor <= 1e-3:
            raise ValueError(f"prob_floor must be in (0, 1e-3], got {self.prob_floor}")


def update(belief: IntentBelief, prev: Point2, curr: Point2,
           mixture: GpMixture, cfg: IntentConfig) -> IntentBelief:
    """One Bayes step from the observed transition prev -> curr.

    Scores are computed in log-space, floored at prob_floor x the best score,
    then normalized. If every likelihood underflows the configured prior (or a
    uniform belief) is returned with the degenerate flag set.
    """
    ids = belief.goal_ids()
    keep = 1.0 - cfg.forgetting
    scores = []
    for gid in ids:
        loglik = mixture.log_step_density(gid, prev, curr)
        logprior = math.log(belief.prob(gid)) if belief.prob(gid) > 0.0 else -math.inf
        scores.append(loglik + keep * logprior)

    best = max(scores)
    if not math.isfinite(best):
        fallback = cfg.prior if cfg.prior is not None else IntentBelief.uniform(ids)
        return IntentBelief(fallback.probs, degenerate=True)

    floor = best + math.log(cfg.prob_floor)
    weights = [math.exp(max(s, floor) - best) for s in scores]
    total = sum(weights)
    return IntentBelief(tuple((gid, w / total) for gid, w in zip(ids, weights)))


def map_goal(belief: IntentBelief) -> str:
    """Most probable goal; ties go to the lexicographically smallest id."""
    best_id, best_p = None, -1.0
    for gid, p in sorted(belief.probs):
        if p > best_p:
            best_id, best_p = gid, p
    return best_id
