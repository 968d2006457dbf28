"""Metapath-wise contextual stochastic block model."""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, Field, model_validator

__all__ = "MetapathSpec", "CsbmSpec", "CsbmInstance", "sample"

logger = logging.getLogger(__name__)


class MetapathSpec(BaseModel):
    """Edge probabilities (p, q), or a gate gamma with an expected degree converted on use."""

    model_config = {"frozen": True, "extra": "forbid"}

    p: float | None = Field(default=None, ge=0, le=1)
    q: float | None = Field(default=None, ge=0, le=1)
    gamma: float | None = None
    degree: float | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_form(self) -> "MetapathSpec":
        explicit = self.p is not None and self.q is not None
        gated = self.gamma is not None and self.degree is not None
        if explicit == gated:
            raise ValueError("give either (p, q) or (gamma, degree)")
        return self


class CsbmSpec(BaseModel):
    """n nodes, label prior pi, score separation delta and metapath edge models.

    Scores are Normal(+-delta/2, 1) given the label.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    n: int = Field(default=2000, ge=1)
    prior: float = Field(default=0.5, ge=0, le=1)
    delta: float = Field(default=2.0, ge=0)
    metapaths: tuple[MetapathSpec, ...] = ()
    seed: int = 0

    @property
    def same_share(self) -> float:
        """Probability that two random nodes share a label."""
        return self.prior**2 + (1 - self.prior) ** 2

    def probabilities(self) -> list[tuple[float, float]]:
        """(p_m, q_m) per metapath; (gamma, d) solves d = (n-1)(s p + (1-s) q) with p = q e^gamma."""
        out = []
        for m in self.metapaths:
            if m.p is not None:
                out.append((m.p, m.q))
                continue
            s = self.same_share
            q = m.degree / (max(self.n - 1, 1) * (s * math.exp(m.gamma) + 1 - s))
            p = q * math.exp(m.gamma)
            if p > 1 or q > 1:
                raise ValueError(f"Degree {m.degree} with gamma {m.gamma} needs edge probabilities above 1")
            out.append((p, q))
        return out

    def degrees(self) -> np.ndarray:
        s = self.same_share
        return np.array([(self.n - 1) * (s * p + (1 - s) * q) for p, q in self.probabilities()])

    def gammas(self) -> np.ndarray:
        """True gates ln(p/q); 0 when both vanish."""
        out = []
        for p, q in self.probabilities():
            if p == q:
                out.append(0.0)
            elif p == 0 or q == 0:
                out.append(math.copysign(math.inf, p - q))
            else:
                out.append(math.log(p / q))
        return np.array(out)

    def with_metapaths(self, *extra: MetapathSpec) -> "CsbmSpec":
        return self.model_copy(update={"metapaths": (*self.metapaths, *extra)})


@dataclass(frozen=True)
class CsbmInstance:
    spec: CsbmSpec
    labels: np.ndarray
    scores: np.ndarray
    adjacency: list[sp.csr_array]

    @property
    def n(self) -> int:
        return len(self.labels)


def _edges(rng: np.random.Generator, same: np.ndarray, p: float, q: float) -> sp.csr_array:
    n = len(same)
    if p == 0 and q == 0:
        return sp.csr_array((n, n))
    draws = rng.random((n, n), dtype=np.float32)
    hits = np.triu(draws < np.where(same, np.float32(p), np.float32(q)), k=1)
    upper = sp.coo_array(hits.astype(np.float64))
    matrix = (upper + upper.T).tocsr()
    matrix.sort_indices()
    return matrix


def sample(spec: CsbmSpec, seed: int | None = None) -> CsbmInstance:
    """Labels ~ Bernoulli(pi) on {-1, +1}, Gaussian scores, independent edges per metapath.

    Labels and scores come from stream 0 of the seed, metapath m from stream m + 1,
    so appending a metapath leaves the earlier draws untouched.
    """
    seed = spec.seed if seed is None else seed
    rng = np.random.default_rng([seed, 0])
    labels = np.where(rng.random(spec.n) < spec.prior, 1, -1).astype(np.int64)
    scores = labels * spec.delta / 2 + rng.standard_normal(spec.n)

    same = labels[:, None] == labels[None, :]
    adjacency = []
    for m, (p, q) in enumerate(spec.probabilities()):
        adjacency.append(_edges(np.random.default_rng([seed, m + 1]), same, p, q))
    return CsbmInstance(spec, labels, scores, adjacency)
