"""Task embeddings, meta-classifier routing and budgeted replay search."""

from .agreement import Agreement, Projection, embedding_similarity, similarity_agreement, train_projection
from .analysis import GapCorrelation, gap_correlation
from .embedding import Normalizer, TaskEmbedding, assemble_embedding, load_embeddings, save_embeddings
from .heuristics import entity_heuristics, entity_mean_heuristic
from .hpo import BankEvaluator, CallbackEvaluator, HpoResult, TrialOutcome, replay_hpo
from .meta import (
    LooReport,
    MetaClassifier,
    RouteDecision,
    anchor_ratio_rule,
    fit_meta,
    fit_meta_labels,
    loo_eval,
    loo_eval_labels,
    predict,
    route,
)
from .registry import BASE_FEATURES, REGISTRY_VERSION, FeatureRegistry
from .temporal import temporal_autocorr
from .tpe import Categorical, Numeric, SearchSpace, Trial, suggest_tpe
from .walks import WalkFeatures, walk_features

__all__ = (
    "Agreement",
    "BASE_FEATURES",
    "BankEvaluator",
    "CallbackEvaluator",
    "Categorical",
    "FeatureRegistry",
    "GapCorrelation",
    "HpoResult",
    "LooReport",
    "MetaClassifier",
    "Normalizer",
    "Numeric",
    "Projection",
    "REGISTRY_VERSION",
    "RouteDecision",
    "SearchSpace",
    "TaskEmbedding",
    "Trial",
    "TrialOutcome",
    "WalkFeatures",
    "anchor_ratio_rule",
    "assemble_embedding",
    "embedding_similarity",
    "entity_heuristics",
    "entity_mean_heuristic",
    "fit_meta",
    "fit_meta_labels",
    "gap_correlation",
    "load_embeddings",
    "loo_eval",
    "loo_eval_labels",
    "predict",
    "replay_hpo",
    "route",
    "save_embeddings",
    "similarity_agreement",
    "suggest_tpe",
    "temporal_autocorr",
    "train_projection",
    "walk_features",
)
