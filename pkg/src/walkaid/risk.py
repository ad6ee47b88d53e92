"""Risk metrics over weighted empirical cost distributions.

Conventions: ``tail`` (q) is the fraction of worst (highest-cost) outcomes
averaged by CVaR. The discrete CVaR splits the boundary atom fractionally, so
the coherence properties (translation equivariance, positive homogeneity,
monotonicity between expectation and worst case) hold exactly on samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class EmpiricalDist:
    """Finite cost values with nonnegative weights summing to 1."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        if values.size == 0 or values.shape != weights.shape:
            raise ValueError("values and weights must be equal-length and nonempty")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and nonnegative")
        if abs(float(weights.sum()) - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights sum to {weights.sum()}, not 1")

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDist":
        values = np.asarray(values, dtype=float).ravel()
        return cls(values, np.full(values.size, 1.0 / values.size))


@dataclass(frozen=True)
class RiskConfig:
    """CVaR tail fraction q in (0, 1] and combined-metric weight beta >= 0."""

    tail: float = 0.1
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.tail <= 1.0:
            raise ValueError(f"tail must be in (0, 1], got {self.tail}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")


def expected(d: EmpiricalDist) -> float:
    return float(d.weights @ d.values)


def worst_case(d: EmpiricalDist) -> float:
    """Largest value carrying positive weight."""
    return float(d.values[d.weights > 0.0].max())


def var(d: EmpiricalDist, q: float) -> float:
    """Smallest attained value z with P[Z > z] <= q.

    The exceedance probability of each candidate is formed by direct
    summation of the weights strictly above it, mirroring the defining
    enumeration.
    """
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must be in (0, 1], got {q}")
    attained = np.unique(d.values[d.weights > 0.0])
    for z in attained:
        if float(d.weights[d.values > z].sum()) <= q:
            return float(z)
    return float(attained[-1])  # unreachable: the max always satisfies P = 0


def cvar(d: EmpiricalDist, q: float) -> float:
    """Weighted mean of the worst-q tail, splitting the boundary atom."""
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must be in (0, 1], got {q}")
    if q == 1.0:
        return expected(d)
    order = np.argsort(-d.values, kind="stable")
    acc = 0.0
    num = 0.0
    for i in order:
        w = float(d.weights[i])
        if w <= 0.0:
            continue
        take = min(w, q - acc)
        num += take * float(d.values[i])
        acc += take
        if acc >= q:
            break
    return num / acc


def combined(d: EmpiricalDist, cfg: RiskConfig) -> float:
    """Expected value plus beta times the worst-tail CVaR."""
    return expected(d) + cfg.beta * cvar(d, cfg.tail)
