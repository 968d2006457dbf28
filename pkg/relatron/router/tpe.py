"""Search spaces and a per-dimension Parzen (TPE-style) suggester."""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.special import logsumexp
from scipy.stats import norm

from ..bank.records import ConfigValue
from ..errors import EmptySearchSpace, RoutingError
from ..util.hashing import keyed_generator

__all__ = "Categorical", "Numeric", "SearchSpace", "Trial", "suggest_tpe", "config_distance"

logger = logging.getLogger(__name__)

MIN_BANDWIDTH = 0.01
ENUMERATION_LIMIT = 100_000
MISSING = "none"


class Categorical(BaseModel):
    model_config = {"frozen": True, "extra": "forbid"}

    values: tuple[ConfigValue, ...] = Field(..., min_length=1)


class Numeric(BaseModel):
    model_config = {"frozen": True, "extra": "forbid"}

    low: float
    high: float
    log: bool = False
    integer: bool = False

    @model_validator(mode="after")
    def check_bounds(self) -> "Numeric":
        if not self.low < self.high:
            raise ValueError(f"low {self.low} must be below high {self.high}")
        if self.log and self.low <= 0:
            raise ValueError("log-scaled dimensions need a positive lower bound")
        return self

    def forward(self, value: float) -> float:
        return math.log(value) if self.log else float(value)

    def inverse(self, value: float) -> float | int:
        value = math.exp(value) if self.log else float(value)
        value = min(max(value, self.low), self.high)
        return int(round(value)) if self.integer else value

    @property
    def span(self) -> tuple[float, float]:
        return self.forward(self.low), self.forward(self.high)


Dimension = Categorical | Numeric


@dataclass
class SearchSpace:
    """Named dimensions, optionally with a finite catalog of allowed configs."""

    dimensions: dict[str, Dimension]
    catalog: list[dict] | None = None

    def __post_init__(self):
        if not self.dimensions:
            raise EmptySearchSpace("Search space has no dimensions")
        if self.catalog is not None and not self.catalog:
            raise EmptySearchSpace("Search space catalog is empty")

    def contains(self, config: dict) -> bool:
        for name, dim in self.dimensions.items():
            value = config.get(name)
            if isinstance(dim, Categorical):
                if value not in dim.values:
                    return False
            elif value is None or not dim.low <= value <= dim.high:
                return False
        return True

    def sample_uniform(self, rng: np.random.Generator) -> dict:
        config = {}
        for name, dim in self.dimensions.items():
            if isinstance(dim, Categorical):
                config[name] = dim.values[int(rng.integers(len(dim.values)))]
            else:
                lo, hi = dim.span
                config[name] = dim.inverse(rng.uniform(lo, hi))
        return config

    @property
    def finite(self) -> bool:
        return all(isinstance(d, Categorical) for d in self.dimensions.values())

    def enumerate(self) -> list[dict] | None:
        """Every config of a finite space (the catalog when given); None when infinite or too large."""
        if self.catalog is not None:
            return list(self.catalog)
        if not self.finite:
            return None
        sizes = [len(d.values) for d in self.dimensions.values()]
        if math.prod(sizes) > ENUMERATION_LIMIT:
            return None
        names = list(self.dimensions)
        return [dict(zip(names, combo)) for combo in itertools.product(*(d.values for d in self.dimensions.values()))]

    @classmethod
    def from_catalog(cls, configs: list[dict]) -> "SearchSpace":
        """Categorical space over the observed values; absent keys read as "none"."""
        if not configs:
            raise EmptySearchSpace("Cannot build a search space from no configs")
        names = sorted({key for config in configs for key in config})
        filled = [{name: config.get(name, MISSING) for name in names} for config in configs]
        dims = {}
        for name in names:
            values = []
            for config in filled:
                if config[name] not in values:
                    values.append(config[name])
            dims[name] = Categorical(values=tuple(sorted(values, key=lambda v: (type(v).__name__, v))))
        return cls(dims, filled)


def config_distance(space: SearchSpace, a: dict, b: dict) -> float:
    """Mismatch count on categorical dimensions plus range-scaled gaps on numeric ones."""
    total = 0.0
    for name, dim in space.dimensions.items():
        if isinstance(dim, Categorical):
            total += float(a.get(name) != b.get(name))
        else:
            lo, hi = dim.span
            total += abs(dim.forward(a[name]) - dim.forward(b[name])) / (hi - lo)
    return total


@dataclass(frozen=True)
class Trial:
    config: dict
    value: float
    higher_is_better: bool = True

    @property
    def oriented(self) -> float:
        return self.value if self.higher_is_better else -self.value


@dataclass
class _Parzen:
    """Density of one dimension: smoothed counts, or Gaussian kernels mixed with a uniform prior."""

    dim: Dimension
    points: list = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.dim, Categorical):
            counts = np.ones(len(self.dim.values))
            for value in self.points:
                if value in self.dim.values:
                    counts[self.dim.values.index(value)] += 1
            self.log_probs = np.log(counts / counts.sum())
        else:
            lo, hi = self.dim.span
            self.mus = np.array([self.dim.forward(v) for v in self.points], dtype=np.float64)
            sigma = float(self.mus.std()) if len(self.mus) > 1 else 0.0
            bandwidth = 1.06 * sigma * max(len(self.mus), 1) ** (-1 / 5)
            self.bandwidth = max(bandwidth, MIN_BANDWIDTH * (hi - lo))
            self.log_weight = -math.log(len(self.mus) + 1)

    def logpdf(self, value) -> float:
        if isinstance(self.dim, Categorical):
            return float(self.log_probs[self.dim.values.index(value)]) if value in self.dim.values else -np.inf
        lo, hi = self.dim.span
        x = self.dim.forward(value)
        terms = [self.log_weight - math.log(hi - lo)]
        if len(self.mus):
            terms.extend(self.log_weight + norm.logpdf(x, loc=self.mus, scale=self.bandwidth))
        return float(logsumexp(terms))

    def sample(self, rng: np.random.Generator):
        if isinstance(self.dim, Categorical):
            return self.dim.values[int(rng.choice(len(self.dim.values), p=np.exp(self.log_probs)))]
        lo, hi = self.dim.span
        component = int(rng.integers(len(self.mus) + 1))
        if component == len(self.mus):
            x = rng.uniform(lo, hi)
        else:
            x = rng.normal(self.mus[component], self.bandwidth)
        return self.dim.inverse(min(max(x, lo), hi))


def suggest_tpe(
    space: SearchSpace,
    history: list[Trial],
    n: int = 1,
    *,
    gamma: float = 0.25,
    n_candidates: int = 24,
    startup: int = 5,
    seed: int = 0,
) -> list[dict]:
    """Suggest `n` configs.

    With fewer than `startup` trials the suggestions are uniform. Otherwise the
    history splits at the gamma quantile into good and bad trials, candidates are
    drawn from the good densities and the top-n by summed log density ratio win.
    """
    if n < 1:
        raise RoutingError(f"Need at least one suggestion, got {n}")
    rng = keyed_generator(seed, len(history))
    if len(history) < startup:
        return [space.sample_uniform(rng) for _ in range(n)]

    ordered = sorted(history, key=lambda t: -t.oriented)
    n_good = max(1, math.ceil(gamma * len(ordered)))
    good, bad = ordered[:n_good], ordered[n_good:]

    good_density = {name: _Parzen(dim, [t.config.get(name) for t in good]) for name, dim in space.dimensions.items()}
    bad_density = {name: _Parzen(dim, [t.config.get(name) for t in bad]) for name, dim in space.dimensions.items()}

    scored: list[tuple[float, int, dict]] = []
    for k in range(max(n_candidates, n)):
        candidate = {name: density.sample(rng) for name, density in good_density.items()}
        score = sum(good_density[name].logpdf(v) - bad_density[name].logpdf(v) for name, v in candidate.items())
        scored.append((score, k, candidate))

    scored.sort(key=lambda item: (-item[0], item[1]))
    suggestions, seen = [], set()
    for _, _, candidate in scored:
        key = tuple(sorted((k, repr(v)) for k, v in candidate.items()))
        if key not in seen:
            seen.add(key)
            suggestions.append(candidate)
        if len(suggestions) == n:
            break
    while len(suggestions) < n:
        suggestions.append(space.sample_uniform(rng))
    return suggestions
