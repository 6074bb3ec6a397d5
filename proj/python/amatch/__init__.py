"""Anchor matching transformer: sparse feature matching with an anchor bottleneck."""

from ._amatch import (
    Error,
    Model,
    Problem,
    augment_dustbin,
    baseline_precision,
    extract_matches,
    flops_amatformer,
    flops_sgmnet,
    flops_superglue,
    generate_problem,
    nn_baseline,
    precision,
    sinkhorn,
    train,
)

__all__ = [
    "Error",
    "Model",
    "Problem",
    "augment_dustbin",
    "baseline_precision",
    "extract_matches",
    "flops_amatformer",
    "flops_sgmnet",
    "flops_superglue",
    "generate_problem",
    "nn_baseline",
    "precision",
    "sinkhorn",
    "train",
]
