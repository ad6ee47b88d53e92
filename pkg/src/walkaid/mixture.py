"""Per-goal GP mixture over one-step motion deltas.

Each goal gets an independent model per coordinate; their product forms the
2D one-step transition density. An optional second model set describes motion
with the mobility aid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import gp
from .gp import FitConfig, GpHyperparams, GpModel
from .room import Point2

MIXTURE_SCHEMA_VERSION = 1

ModelPair = tuple[GpModel, GpModel]


class MissingModelError(KeyError):
    """Requested a goal the mixture has no trained models for."""


@dataclass
class GpMixture:
    """Maps goal-id -> (model_x, model_y); optionally a second aided set."""

    models: dict[str, ModelPair]
    aided_models: dict[str, ModelPair] | None = None

    def goal_ids(self) -> list[str]:
        return sorted(self.models)

    def pair(self, goal: str, aided: bool = False) -> ModelPair:
        source = self.aided_models if (aided and self.aided_models) else self.models
        try:
            return source[goal]
        except KeyError:
            raise MissingModelError(f"no trained models for goal {goal!r}") from None

    def step_distribution(self, goal: str, states: np.ndarray,
                          aided: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Latent delta mean and variance at each state, both shaped (m, 2)."""
        mx, my = self.pair(goal, aided)
        states = np.atleast_2d(states)
        mean_x, var_x = gp.predict_batch(mx, states)
        mean_y, var_y = gp.predict_batch(my, states)
        return np.stack([mean_x, mean_y], axis=1), np.stack([var_x, var_y], axis=1)

    def log_step_density(self, goal: str, prev: Point2, curr: Point2,
                         aided: bool = False) -> float:
        """Log density of the observed transition prev -> curr under ``goal``.

        Evaluated as the product of the per-coordinate predictive densities of
        the observed delta; observation noise is included in the variance.
        """
        mx, my = self.pair(goal, aided)
        state = np.array([[prev.x, prev.y]])
        out = 0.0
        for model, delta in ((mx, curr.x - prev.x), (my, curr.y - prev.y)):
            mean, var = gp.predict_batch(model, state)
            v = float(var[0]) + model.hyperparams.noise_variance
            out += -0.5 * math.log(2.0 * math.pi * v) - 0.5 * (delta - float(mean[0])) ** 2 / v
        return out


@dataclass(frozen=True)
class TrainConfig:
    """Mixture training settings (subsampling keeps exact GP solves fast)."""

    fit: FitConfig = field(default_factory=FitConfig)
    init: GpHyperparams = field(default_factory=GpHyperparams)
    max_points: int = 160
    seed: int = 0


def train_mixture(dataset, aided_dataset=None, cfg: TrainConfig | None = None) -> GpMixture:
    """Fit per-goal, per-coordinate GPs to a delta dataset.

    ``dataset`` is a patientgen.DeltaDataset. Rows are subsampled (without
    replacement, deterministic in cfg.seed) down to cfg.max_points per goal,
    with the same rows feeding both coordinate models.
    """
    cfg = cfg or TrainConfig()
    models = _fit_goal_models(dataset, cfg)
    aided = _fit_goal_models(aided_dataset, cfg) if aided_dataset is not None else None
    return GpMixture(models=models, aided_models=aided)


def _fit_goal_models(dataset, cfg: TrainConfig) -> dict[str, ModelPair]:
    models: dict[str, ModelPair] = {}
    for goal in dataset.goal_set():
        states, deltas = dataset.for_goal(goal)
        n = states.shape[0]
        if n > cfg.max_points:
            rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
            idx = np.sort(rng.choice(n, size=cfg.max_points, replace=False))
            states, deltas = states[idx], deltas[idx]
        mx = gp.fit(states, deltas[:, 0], init=cfg.init, cfg=cfg.fit)
        my = gp.fit(states, deltas[:, 1], init=cfg.init, cfg=cfg.fit)
        models[goal] = (mx, my)
    return models


# --- serialization ----------------------------------------------------------

def _model_to_dict(model: GpModel) -> dict:
    h = model.hyperparams
    return {
        "signal_variance": h.signal_variance,
        "length_scales": list(h.length_scales),
        "noise_variance": h.noise_variance,
        "inputs": model.inputs.tolist(),
        "targets": model.targets.tolist(),
    }


def _model_from_dict(data: dict) -> GpModel:
    h = GpHyperparams(
        signal_variance=float(data["signal_variance"]),
        length_scales=tuple(float(v) for v in data["length_scales"]),
        noise_variance=float(data["noise_variance"]),
    )
    return GpModel(np.array(data["inputs"], dtype=float).reshape(-1, 2),
                   np.array(data["targets"], dtype=float), h)


def _set_to_dict(models: dict[str, ModelPair]) -> dict:
    return {goal: {"x": _model_to_dict(mx), "y": _model_to_dict(my)}
            for goal, (mx, my) in sorted(models.items())}


def _set_from_dict(data: dict) -> dict[str, ModelPair]:
    return {goal: (_model_from_dict(d["x"]), _model_from_dict(d["y"]))
            for goal, d in data.items()}


def save_mixture(mix: GpMixture, path) -> None:
    """Write a mixture (hyperparameters + training data) to a JSON file."""
    doc = {
        "schema_version": MIXTURE_SCHEMA_VERSION,
        "models": _set_to_dict(mix.models),
        "aided_models": _set_to_dict(mix.aided_models) if mix.aided_models else None,
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True)


def load_mixture(path) -> GpMixture:
    """Reload a mixture saved by save_mixture (factorizations are rebuilt)."""
    with open(path) as f:
        doc = json.load(f)
    version = doc.get("schema_version")
    if version != MIXTURE_SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported mixture schema_version {version}")
    aided = doc.get("aided_models")
    return GpMixture(models=_set_from_dict(doc["models"]),
                     aided_models=_set_from_dict(aided) if aided else None)
