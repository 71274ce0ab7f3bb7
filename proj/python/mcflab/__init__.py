"""Geometric flows, entropy and linking invariants for curves and surfaces."""

from ._mcflab import (
    Error,
    __version__,
    circle,
    deform_to_convex,
    entropy,
    is_generalized_mobius,
    lambda_invariant,
    linking_number,
    load_mesh,
    mcf,
    mobius_strip,
    disk,
    icosphere,
    shrinker_residual,
    total_curvature,
    trefoil,
    twisted_quadrilateral,
    vision_number,
    csf,
)

__all__ = [
    "Error",
    "__version__",
    "circle",
    "csf",
    "deform_to_convex",
    "disk",
    "entropy",
    "icosphere",
    "is_generalized_mobius",
    "lambda_invariant",
    "linking_number",
    "load_mesh",
    "mcf",
    "mobius_strip",
    "shrinker_residual",
    "total_curvature",
    "trefoil",
    "twisted_quadrilateral",
    "vision_number",
]
