"""Label kernels for temporally aggregated labels."""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import DegenerateLabels
from ..rdb.task import EntityLabelSummary

__all__ = ("LabelKernel",)


@dataclass(frozen=True)
class LabelKernel:
    """K(a, b): dot product of probability vectors, or Pearson-style standardized product.

    For `pearson`, mu and sigma2 are computed over labeled nodes, not over edges.
    """

    kind: Literal["dot", "pearson"]
    mu: float = 0.0
    sigma2: float = 1.0

    @classmethod
    def dot(cls) -> "LabelKernel":
        return cls("dot")

    @classmethod
    def pearson(cls, values: np.ndarray) -> "LabelKernel":
        values = np.asarray(values, dtype=np.float64).ravel()
        if len(values) == 0:
            raise DegenerateLabels("No labeled nodes to standardize over")
        mu = float(values.mean())
        sigma2 = float(values.var())
        if not sigma2 > 1e-300:
            raise DegenerateLabels("Regression labels have zero variance")
        return cls("pearson", mu, sigma2)

    @classmethod
    def for_summary(cls, summary: EntityLabelSummary) -> "LabelKernel":
        if summary.classification:
            return cls.dot()
        return cls.pearson(summary.means[:, 0])

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Row-wise kernel values for (n, C) label matrices."""
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        if self.kind == "dot":
            return np.einsum("ij,ij->i", a, b)
        return ((a[:, 0] - self.mu) * (b[:, 0] - self.mu)) / self.sigma2
