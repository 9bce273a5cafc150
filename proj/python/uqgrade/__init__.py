"""Uncertainty measures for repeated LLM gradings and the benchmarks over them."""

from ._uqgrade import (
    METHODS,
    auarc,
    auerc,
    auroc,
    c_index,
    categorical_entropy,
    change_ratio,
    compute,
    correlate,
    eccentricity,
    eigen_uncertainty,
    evaluate_method,
    eval_scores,
    fsd,
    jaccard_similarity,
    mar,
    nad,
    numset,
    parse_responses,
    pearson,
    report,
    semantic_entropy,
    spearman,
    stability,
    stepwise_spearman,
)

__all__ = [name for name in dir() if not name.startswith("_")]
