"""
Features Module

MFCC functionals, spectral sparsity, log-Mel segments, standardization and PCA.
"""

from .extractors import (
    EXTRACTORS,
    FeatureKind,
    FeatureVector,
    MelSegment,
    dump_features,
    extract,
    feature_matrix,
    features_frame,
    mel_pooled,
    mel_segment_pooled,
    mel_segments,
    mfcc_matrix,
    mfcc_stats,
    sparsity_features,
    stack_features,
)
from .sparsity import gamma_shape_mle, gamma_shape_mle_columns
from .transforms import (
    Pca95,
    PcaState,
    Standardizer,
    StandardizerState,
    apply_pca,
    apply_standardizer,
    fit_pca_95,
    fit_standardizer,
)

__all__ = [
    "EXTRACTORS",
    "FeatureKind",
    "FeatureVector",
    "MelSegment",
    "Pca95",
    "PcaState",
    "Standardizer",
    "StandardizerState",
    "apply_pca",
    "apply_standardizer",
    "dump_features",
    "extract",
    "feature_matrix",
    "features_frame",
    "fit_pca_95",
    "fit_standardizer",
    "gamma_shape_mle",
    "gamma_shape_mle_columns",
    "mel_pooled",
    "mel_segment_pooled",
    "mel_segments",
    "mfcc_matrix",
    "mfcc_stats",
    "sparsity_features",
    "stack_features",
]
