"""MAP and fixed linear aggregation scores."""

import math

import numpy as np

from .model import CsbmInstance

__all__ = "phi_max", "prior_logit", "map_scores", "linear_scores", "predict_labels", "misclass_rate"


def phi_max(s, gamma: float) -> np.ndarray:
    """clip(s, -gamma, gamma), sign-flipped for negative gamma."""
    bound = abs(gamma)
    return math.copysign(1.0, gamma) * np.clip(s, -bound, bound) if gamma else np.zeros_like(s, dtype=np.float64)


def prior_logit(prior: float) -> float:
    if not 0 < prior < 1:
        raise ValueError(f"Prior must lie in (0, 1), got {prior}")
    return math.log(prior / (1 - prior))


def map_scores(instance: CsbmInstance, gammas, prior: float) -> np.ndarray:
    """logit(pi) + s + sum_m A_m phi_max(s; gamma_m)."""
    gammas = np.asarray(gammas, dtype=np.float64)
    if len(gammas) != len(instance.adjacency):
        raise ValueError(f"{len(gammas)} gates for {len(instance.adjacency)} metapaths")
    z = prior_logit(prior) + instance.scores.astype(np.float64)
    for adjacency, gamma in zip(instance.adjacency, gammas):
        if gamma:
            z = z + adjacency @ phi_max(instance.scores, float(gamma))
    return z


def linear_scores(instance: CsbmInstance, prior: float) -> np.ndarray:
    """logit(pi) + s + sum_m A_m s."""
    z = prior_logit(prior) + instance.scores.astype(np.float64)
    for adjacency in instance.adjacency:
        z = z + adjacency @ instance.scores
    return z


def predict_labels(z) -> np.ndarray:
    """sign(z) with sign(0) = +1."""
    return np.where(np.asarray(z) >= 0, 1, -1)


def misclass_rate(z, labels) -> float:
    labels = np.asarray(labels)
    if len(labels) != len(z):
        raise ValueError(f"{len(z)} scores for {len(labels)} labels")
    return float(np.mean(predict_labels(z) != labels))
