"""Synthetic metapath-wise contextual SBM laboratory.

Instances carry +-1 labels, Gaussian feature scores and one symmetric 0/1
adjacency per metapath. Clip-gated MAP aggregation is compared against fixed
linear aggregation.
"""

from .estimate import estimate_gamma
from .experiments import (
    CROSSOVER_PRESET,
    DEFAULT_N_GRID,
    REGIMES,
    CrossoverResult,
    GatingResult,
    average_vs_absolute_homophily,
    crossover_experiment,
    detect_crossover,
    gating_experiment,
    gating_report,
)
from .model import CsbmInstance, CsbmSpec, MetapathSpec, sample
from .scoring import linear_scores, map_scores, misclass_rate, phi_max, predict_labels
from .snr import SnrReport, gamma_alpha, rho_gate, rho_lin, snr

__all__ = (
    "CROSSOVER_PRESET",
    "DEFAULT_N_GRID",
    "REGIMES",
    "CrossoverResult",
    "CsbmInstance",
    "CsbmSpec",
    "GatingResult",
    "MetapathSpec",
    "SnrReport",
    "average_vs_absolute_homophily",
    "crossover_experiment",
    "detect_crossover",
    "estimate_gamma",
    "gamma_alpha",
    "gating_experiment",
    "gating_report",
    "linear_scores",
    "map_scores",
    "misclass_rate",
    "phi_max",
    "predict_labels",
    "rho_gate",
    "rho_lin",
    "sample",
    "snr",
)
