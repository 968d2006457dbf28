"""Sketch configuration and result containers."""

import hashlib
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

__all__ = "SketchConfig", "PathFeatureMatrix", "PathBag", "kernel_estimate", "bag_inner"

PathBag = dict[tuple[int, ...], float]


class SketchConfig(BaseModel):
    """Width d, horizon T, length weights a_l, endpoint restriction for beta, mode and seed."""

    model_config = {"frozen": True, "extra": "forbid"}

    width: int = Field(default=64, ge=1)
    horizon: int = Field(default=3, ge=1)
    length_weights: tuple[float, ...] | None = None
    endpoint_type: str | None = None
    mode: Literal["dense", "tensor"] = "dense"
    seed: int = 0

    @model_validator(mode="after")
    def check_weights(self) -> "SketchConfig":
        if self.length_weights is not None:
            if len(self.length_weights) != self.horizon:
                raise ValueError(f"length_weights needs {self.horizon} entries, got {len(self.length_weights)}")
            if not all(math.isfinite(a) for a in self.length_weights):
                raise ValueError("length_weights must be finite")
        return self

    def length_weight(self, length: int) -> float:
        """a_l for 1 <= l <= T; defaults to 1."""
        if self.length_weights is None:
            return 1.0
        return float(self.length_weights[length - 1])

    def endpoint_weight(self, node_type: str) -> float:
        """beta for nodes of a type: 1 everywhere, or only on `endpoint_type`."""
        if self.endpoint_type is None or self.endpoint_type == node_type:
            return 1.0
        return 0.0

    def fingerprint(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class PathFeatureMatrix:
    """One sketch row z(s) per source, in source order."""

    sources: list[tuple[str, int]]
    matrix: np.ndarray
    fingerprint: str

    @property
    def width(self) -> int:
        return self.matrix.shape[1]

    def to_frame(self, source_ids: list | None = None) -> pd.DataFrame:
        ids = source_ids if source_ids is not None else [f"{t}:{i}" for t, i in self.sources]
        frame = pd.DataFrame(self.matrix, columns=[f"f{k}" for k in range(self.width)])
        frame.insert(0, "source_id", ids)
        return frame


def kernel_estimate(features: PathFeatureMatrix, i: int, j: int) -> float:
    """(1/d) z(s_i) . z(s_j)."""
    return float(features.matrix[i] @ features.matrix[j]) / features.width


def bag_inner(a: PathBag, b: PathBag) -> float:
    """Exact inner product of two path bags."""
    if len(b) < len(a):
        a, b = b, a
    return float(sum(w * b[seq] for seq, w in a.items() if seq in b))


def as_array(bag: PathBag) -> tuple[list[tuple[int, ...]], np.ndarray]:
    keys = sorted(bag)
    return keys, np.array([bag[k] for k in keys], dtype=np.float64)
