"""Hill equation discriminant, stability charts and oracle checks."""

from ._core import (
    HillwalshError,
    SingularityError,
    classify,
    delta,
    grid,
    integration_operator,
    interlacing,
    monodromy_matrix,
    samples,
    singularity_index,
    walsh_matrix,
)

CLASS_NAMES = ("stable", "unstable", "transition", "singular")

__all__ = [
    "CLASS_NAMES",
    "HillwalshError",
    "SingularityError",
    "classify",
    "delta",
    "grid",
    "integration_operator",
    "interlacing",
    "monodromy_matrix",
    "samples",
    "singularity_index",
    "walsh_matrix",
]
