"""Post-selection among top validation checkpoints by landscape vote."""

import logging
from dataclasses import dataclass

from ..errors import CrossFamilyComparison, SurfaceError
from .metrics import LandscapeMetrics

__all__ = "Candidate", "landscape_votes", "post_select"

logger = logging.getLogger(__name__)

MAX_CANDIDATES = 3


@dataclass(frozen=True)
class Candidate:
    id: str
    val_score: float
    higher_is_better: bool
    metrics: LandscapeMetrics
    family: str | None = None


def landscape_votes(candidates: list[Candidate]) -> list[int]:
    """One vote per metric to the smallest value; tied minima each get one."""
    votes = [0] * len(candidates)
    for name in ("p1", "p2", "pbar"):
        values = [getattr(c.metrics, name) for c in candidates]
        best = min(values)
        for k, value in enumerate(values):
            if value == best:
                votes[k] += 1
    return votes


def post_select(candidates: list[Candidate]) -> str:
    """Hard vote over P1, P2 and Pbar.

    Ties go to the better validation score, then the lower Pbar, then input order.

    Raises:
        CrossFamilyComparison: when candidates carry different family tags.
    """
    if not 1 <= len(candidates) <= MAX_CANDIDATES:
        raise SurfaceError(f"Post-selection takes 1 to {MAX_CANDIDATES} candidates, got {len(candidates)}")
    families = {c.family for c in candidates if c.family is not None}
    if len(families) > 1:
        raise CrossFamilyComparison(f"Candidates span families {sorted(families)}")

    votes = landscape_votes(candidates)

    def key(k: int):
        c = candidates[k]
        val = -c.val_score if c.higher_is_better else c.val_score
        return (-votes[k], val, c.metrics.pbar, k)

    chosen = candidates[min(range(len(candidates)), key=key)]
    logger.debug("Post-selection votes %s -> %s", dict(zip((c.id for c in candidates), votes)), chosen.id)
    return chosen.id
