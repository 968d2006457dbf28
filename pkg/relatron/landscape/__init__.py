"""Loss-landscape indicators and checkpoint post-selection."""

from .metrics import LandscapeMetrics, barrier, landscape_metrics, p1, p2, pbar, projected_hessian
from .select import Candidate, landscape_votes, post_select
from .surface import LossSurfaceGrid, Ray, demo_surface, load_surface, surface_from_dict

__all__ = (
    "Candidate",
    "LandscapeMetrics",
    "LossSurfaceGrid",
    "Ray",
    "barrier",
    "demo_surface",
    "landscape_metrics",
    "landscape_votes",
    "load_surface",
    "p1",
    "p2",
    "pbar",
    "post_select",
    "projected_hessian",
    "surface_from_dict",
)
