"""Vector arithmetic, normalization operators and similarity measures."""

from .normalizers import NormalizerKind, holonorm, holonorm_inverse, normalize
from .similarity import cosine, holonorm_similarity, similarity_score

__all__ = [
    "NormalizerKind",
    "holonorm",
    "holonorm_inverse",
    "normalize",
    "cosine",
    "holonorm_similarity",
    "similarity_score",
]
