"""Budgeted replay search over a performance bank or a callback objective."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..bank.records import Bank, config_signature
from ..errors import EmptySearchSpace, RoutingError
from ..landscape.metrics import LandscapeMetrics
from ..landscape.select import Candidate, post_select
from ..util.hashing import keyed_generator
from .tpe import SearchSpace, Trial, config_distance, suggest_tpe

__all__ = "TrialOutcome", "BankEvaluator", "CallbackEvaluator", "HpoResult", "replay_hpo"

logger = logging.getLogger(__name__)

TOP_CANDIDATES = 3


@dataclass(frozen=True)
class TrialOutcome:
    config: dict
    val: float
    test: float | None = None
    family: str | None = None
    landscape: LandscapeMetrics | None = None


def _landscape(data: dict | None) -> LandscapeMetrics | None:
    if not data:
        return None
    return LandscapeMetrics(p1=float(data["P1"]), p2=float(data["P2"]), pbar=float(data["Pbar"]))


class BankEvaluator:
    """Looks trials up in the bank records of one task.

    Configs carry a "family" key. Records sharing a signature (seeds excluded)
    are averaged.
    """

    def __init__(self, bank: Bank, task: str, family: str | None = None, *, exclusions=("seed",)):
        records = bank.for_task(task, family)
        if not records:
            raise EmptySearchSpace(f"No {family or 'bank'} records for task {task!r}")
        self.task = task
        self.higher_is_better = bool(records[0].higher_is_better)

        grouped: dict[str, list] = {}
        for record in records:
            config = {**{k: v for k, v in record.config.items() if k not in set(exclusions)}, "family": record.family}
            grouped.setdefault(config_signature(config, ()), []).append((config, record))

        self._outcomes: dict[str, TrialOutcome] = {}
        for signature, members in grouped.items():
            config, first = members[0]
            landscape = next((r.landscape for _, r in members if r.landscape), None)
            self._outcomes[signature] = TrialOutcome(
                config=config,
                val=float(np.mean([r.val_score for _, r in members])),
                test=float(np.mean([r.test_score for _, r in members])),
                family=first.family,
                landscape=_landscape(landscape),
            )
        self._aligned = list(self._outcomes.values())
        self.space = SearchSpace.from_catalog([o.config for o in self._aligned])

    def evaluate(self, config: dict) -> TrialOutcome:
        """The outcome of the catalog config nearest to `config` (first on ties)."""
        distances = [config_distance(self.space, c, config) for c in self.space.catalog]
        return self._aligned[int(np.argmin(distances))]

    def best_possible(self) -> TrialOutcome:
        sign = 1 if self.higher_is_better else -1
        return max(self._outcomes.values(), key=lambda o: sign * o.val)


class CallbackEvaluator:
    """Wraps an objective returning a val score or a (val, test) pair."""

    def __init__(
        self,
        space: SearchSpace,
        objective: Callable[[dict], float | tuple[float, float]],
        *,
        higher_is_better: bool = True,
    ):
        self.space = space
        self.objective = objective
        self.higher_is_better = higher_is_better

    def evaluate(self, config: dict) -> TrialOutcome:
        result = self.objective(config)
        if isinstance(result, tuple):
            return TrialOutcome(config, float(result[0]), float(result[1]))
        return TrialOutcome(config, float(result))


@dataclass
class HpoResult:
    generator: str
    budget: int
    best_config: dict
    best_val: float
    best_test: float | None
    chosen_by: Literal["val", "landscape"]
    family: str | None
    trajectory: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "generator": self.generator,
            "budget": self.budget,
            "best_config": self.best_config,
            "best_val": self.best_val,
            "best_test": self.best_test,
            "chosen_by": self.chosen_by,
            "family": self.family,
            "trajectory": self.trajectory,
        }


def _key(config: dict) -> tuple:
    return tuple(sorted((k, repr(v)) for k, v in config.items()))


def replay_hpo(
    evaluator: BankEvaluator | CallbackEvaluator,
    budget: int,
    generator: Literal["random", "tpe"] = "tpe",
    *,
    seed: int = 0,
    gamma: float = 0.25,
    n_candidates: int = 24,
    startup: int = 5,
    landscape_select: bool = True,
    family: str | None = None,
) -> HpoResult:
    """Run `budget` trials and pick the best by validation score.

    In a finite space every suggestion maps to the nearest untried config, so a
    budget equal to the space size is exhaustive. When landscape metrics are
    attached to the val-best trial and every same-family trial in the top three,
    post-selection among those decides; otherwise validation does.
    """
    if budget < 1:
        raise RoutingError(f"Budget must be at least 1, got {budget}")
    if generator not in ("random", "tpe"):
        raise RoutingError(f"Unknown generator {generator!r}")

    space = evaluator.space
    catalog = space.enumerate()
    sign = 1 if evaluator.higher_is_better else -1
    rng = keyed_generator(seed, 0x4E50)

    history: list[Trial] = []
    outcomes: list[TrialOutcome] = []
    tried: set[tuple] = set()
    trajectory: list[dict] = []

    for step in range(budget):
        if catalog is not None and len(tried) == len(catalog):
            logger.debug("Space exhausted after %d trials", step)
            break
        if generator == "random":
            config = space.sample_uniform(rng)
        else:
            config = suggest_tpe(
                space, history, 1, gamma=gamma, n_candidates=n_candidates, startup=startup, seed=seed
            )[0]
        if catalog is not None:
            untried = [c for c in catalog if _key(c) not in tried]
            config = min(untried, key=lambda c: config_distance(space, c, config))
        tried.add(_key(config))

        outcome = evaluator.evaluate(config)
        outcomes.append(outcome)
        history.append(Trial(config, outcome.val, evaluator.higher_is_better))
        best_so_far = max(o.val * sign for o in outcomes) * sign
        trajectory.append(
            {"step": step, "config": config, "val": outcome.val, "test": outcome.test, "best_val": best_so_far}
        )

    ranked = sorted(range(len(outcomes)), key=lambda k: (-sign * outcomes[k].val, k))
    chosen, chosen_by = ranked[0], "val"

    if landscape_select:
        top_family = outcomes[ranked[0]].family
        top = [k for k in ranked[:TOP_CANDIDATES] if outcomes[k].family == top_family]
        # Every candidate, the val-best included, must carry metrics.
        if len(top) > 1 and all(outcomes[k].landscape for k in top):
            candidates = [
                Candidate(str(k), outcomes[k].val, evaluator.higher_is_better, outcomes[k].landscape, outcomes[k].family)
                for k in top
            ]
            chosen, chosen_by = int(post_select(candidates)), "landscape"

    best = outcomes[chosen]
    logger.debug("%s search picked trial %d (%s) after %d trials", generator, chosen, chosen_by, len(outcomes))
    return HpoResult(
        generator=generator,
        budget=budget,
        best_config=best.config,
        best_val=best.val,
        best_test=best.test,
        chosen_by=chosen_by,
        family=family if family is not None else best.family,
        trajectory=trajectory,
    )
