"""Metapath-level signal-to-noise proxies for linear and gated aggregation."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import CsbmSpec
from .scoring import phi_max

__all__ = "SnrReport", "gamma_alpha", "bookkeeping_variance", "rho_lin", "rho_gate", "gated_variance", "snr"

logger = logging.getLogger(__name__)


def gamma_alpha(p: float, q: float) -> tuple[float, float]:
    """(ln(p/q), (p-q)/(p+q)); the second equals tanh(gamma/2)."""
    if not (0 < p < 1 and 0 < q < 1):
        raise ValueError(f"Edge probabilities must lie in (0, 1), got p={p}, q={q}")
    return math.log(p / q), (p - q) / (p + q)


def bookkeeping_variance(delta: float) -> float:
    """Largest class-conditional variance of the score plus delta^2/4."""
    return 1.0 + delta**2 / 4


def rho_lin(degrees, alphas, delta: float, sigma2: float, *, coupling: float = 1.0) -> float:
    """(sum d a delta)^2 / (coupling * sum d sigma2)."""
    degrees = np.asarray(degrees, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    denominator = coupling * float(np.sum(degrees * sigma2))
    if denominator <= 0:
        return 0.0
    return float(np.sum(degrees * alphas * delta)) ** 2 / denominator


def rho_gate(degrees, alphas, gammas, variances, *, coupling: float = 1.0) -> float:
    """(sum d a gamma)^2 / (coupling * sum d var); 0 when every gate is off."""
    degrees = np.asarray(degrees, dtype=np.float64)
    gammas = np.asarray(gammas, dtype=np.float64)
    if not np.any(gammas):
        return 0.0
    denominator = coupling * float(np.sum(degrees * np.asarray(variances, dtype=np.float64)))
    if denominator <= 0:
        return 0.0
    return float(np.sum(degrees * np.asarray(alphas) * gammas)) ** 2 / denominator


def gated_variance(gamma: float, delta: float, samples: int, rng: np.random.Generator) -> float:
    """Max over classes of Var(phi_max(score; gamma) | label), by Monte Carlo."""
    if gamma == 0:
        return 0.0
    worst = 0.0
    for label in (1, -1):
        draws = label * delta / 2 + rng.standard_normal(samples)
        worst = max(worst, float(np.var(phi_max(draws, gamma))))
    return worst


@dataclass(frozen=True)
class SnrReport:
    degrees: np.ndarray
    gammas: np.ndarray
    alphas: np.ndarray
    variances: np.ndarray
    sigma2: float
    rho_lin: float
    rho_gate: float

    def as_dict(self) -> dict:
        return {
            "rho_lin": self.rho_lin,
            "rho_gate": self.rho_gate,
            "sigma2": self.sigma2,
            "metapaths": [
                {"degree": float(d), "gamma": float(g), "alpha": float(a), "gated_variance": float(v)}
                for d, g, a, v in zip(self.degrees, self.gammas, self.alphas, self.variances)
            ],
        }


def snr(spec: CsbmSpec, mc_samples: int = 20_000, seed: int = 0) -> SnrReport:
    """Both proxies for a spec, with coupling 1 and gated variances from `mc_samples` draws per class."""
    if mc_samples < 1000:
        raise ValueError("mc_samples must be at least 1000")

    degrees = spec.degrees()
    gammas = spec.gammas()
    alphas = np.tanh(gammas / 2)
    rng = np.random.default_rng([seed, 0x5A12])
    variances = np.array([gated_variance(float(g), spec.delta, mc_samples, rng) for g in gammas])
    sigma2 = bookkeeping_variance(spec.delta)

    report = SnrReport(
        degrees=degrees,
        gammas=gammas,
        alphas=alphas,
        variances=variances,
        sigma2=sigma2,
        rho_lin=rho_lin(degrees, alphas, spec.delta, sigma2),
        rho_gate=rho_gate(degrees, alphas, gammas, variances),
    )
    logger.debug("SNR proxies: linear %.4g, gated %.4g", report.rho_lin, report.rho_gate)
    return report
