"""Published, ordered task-embedding feature catalog."""

from dataclasses import dataclass

from ..errors import RoutingError
from ..sketch.affinity import probe_names

__all__ = (
    "REGISTRY_VERSION",
    "BASE_FEATURES",
    "HEURISTIC_FEATURES",
    "BUDGET_FEATURE",
    "FeatureRegistry",
)

REGISTRY_VERSION = "1.0"

BASE_FEATURES = (
    "h_adjs_corr_mean",
    "h_adjs_corr_max",
    "h_adjs_corr_min",
    "h_adjs_corr_mode",
    "h_adjs_corr_weighted_mean",
    "lag1_autocorr_corr",
    "lag2_autocorr_corr",
    "mean_same_class_ratio_ignore",
    "adjusted_mean_same_class_ratio",
    "sparsity_ratio",
    "mean_past_task_nodes",
    "log_total_rows",
)

HEURISTIC_FEATURES = ("entity_mean_val", "entity_median_val", "entity_mean_train", "entity_median_train")

BUDGET_FEATURE = "budget"


@dataclass(frozen=True)
class FeatureRegistry:
    names: tuple[str, ...] = BASE_FEATURES
    version: str = REGISTRY_VERSION

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise RoutingError("Feature registry names must be unique")

    def __len__(self) -> int:
        return len(self.names)

    @property
    def has_budget(self) -> bool:
        return BUDGET_FEATURE in self.names

    @property
    def base(self) -> "FeatureRegistry":
        """The registry without the budget slot."""
        return FeatureRegistry(tuple(n for n in self.names if n != BUDGET_FEATURE), self.version)

    def with_budget(self) -> "FeatureRegistry":
        return self if self.has_budget else FeatureRegistry((*self.names, BUDGET_FEATURE), self.version)

    @classmethod
    def default(cls, *, probes: bool = False, heuristics: bool = False, budget: bool = False) -> "FeatureRegistry":
        names = list(BASE_FEATURES)
        if probes:
            names.extend(probe_names())
        if heuristics:
            names.extend(HEURISTIC_FEATURES)
        if budget:
            names.append(BUDGET_FEATURE)
        return cls(tuple(names))
