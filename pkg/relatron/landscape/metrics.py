"""Sharpness and barrier indicators of a loss surface."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..errors import IrregularGrid, MissingRays
from .surface import RAY_POINTS, LossSurfaceGrid

__all__ = "LandscapeMetrics", "p1", "p2", "pbar", "barrier", "landscape_metrics"

logger = logging.getLogger(__name__)

SPACING_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LandscapeMetrics:
    """P1 worst slope, P2 top curvature at the center, Pbar departure barrier.

    `interpolated` counts grid points whose ray was approximated on the grid.
    """

    p1: float
    p2: float
    pbar: float
    rays_used: int = 0
    interpolated: int = 0

    @property
    def approximate(self) -> bool:
        return self.interpolated > 0

    def as_dict(self) -> dict:
        return {
            "P1": self.p1,
            "P2": self.p2,
            "Pbar": self.pbar,
            "rays_used": self.rays_used,
            "interpolated": self.interpolated,
        }


def p1(grid: LossSurfaceGrid) -> float:
    """Largest |ΔL| / distance over 4-neighbor pairs."""
    loss = grid.loss
    slope_s = np.abs(np.diff(loss, axis=0)) / np.diff(grid.s)[:, None]
    slope_t = np.abs(np.diff(loss, axis=1)) / np.diff(grid.t)[None, :]
    return float(max(slope_s.max(), slope_t.max()))


def _step(coords: np.ndarray, center: int) -> float:
    if center == 0 or center == len(coords) - 1:
        raise IrregularGrid("Center has no neighbor on both sides")
    left, right = coords[center] - coords[center - 1], coords[center + 1] - coords[center]
    if abs(left - right) > SPACING_TOLERANCE * max(abs(left), abs(right)):
        raise IrregularGrid(f"Non-uniform spacing around the center ({left} vs {right})")
    return float(right)


def projected_hessian(grid: LossSurfaceGrid) -> np.ndarray:
    """Central second differences at (0, 0)."""
    ci, cj = grid.center
    hs, ht = _step(grid.s, ci), _step(grid.t, cj)
    L = grid.loss
    l_ss = (L[ci + 1, cj] - 2 * L[ci, cj] + L[ci - 1, cj]) / hs**2
    l_tt = (L[ci, cj + 1] - 2 * L[ci, cj] + L[ci, cj - 1]) / ht**2
    l_st = (L[ci + 1, cj + 1] - L[ci + 1, cj - 1] - L[ci - 1, cj + 1] + L[ci - 1, cj - 1]) / (4 * hs * ht)
    return np.array([[l_ss, l_st], [l_st, l_tt]])


def p2(grid: LossSurfaceGrid) -> float:
    """Largest eigenvalue of the projected Hessian, closed form for 2x2."""
    h = projected_hessian(grid)
    trace = h[0, 0] + h[1, 1]
    det = h[0, 0] * h[1, 1] - h[0, 1] ** 2
    return float((trace + np.sqrt(max(trace**2 - 4 * det, 0.0))) / 2)


def barrier(ray_losses: np.ndarray, base_loss: float, end_loss: float) -> float:
    """max_t L(t) - max(L(w0), L_ij), clamped at 0."""
    return max(0.0, float(np.max(ray_losses)) - max(base_loss, end_loss))


def pbar(grid: LossSurfaceGrid, *, interpolate: bool = False) -> tuple[float, int]:
    """Largest barrier over grid points, plus the number of interpolated rays.

    Without `interpolate`, every boundary point needs a sampled ray. With it,
    points lacking rays use bilinear interpolation along the straight segment.

    Raises:
        MissingRays: when boundary rays are missing and interpolation is off.
    """
    if not interpolate:
        missing = [p for p in grid.boundary() if p not in grid.rays]
        if missing:
            raise MissingRays(f"{len(missing)} boundary points lack rays, e.g. {missing[0]}")

    ci, cj = grid.center
    value = 0.0
    for ray in grid.rays.values():
        value = max(value, barrier(ray.losses, grid.base_loss, grid.loss[ray.i, ray.j]))

    interpolated = 0
    if interpolate:
        surface = RegularGridInterpolator((grid.s, grid.t), grid.loss, method="linear")
        ts = np.linspace(0.0, 1.0, RAY_POINTS)
        ns, nt = grid.shape
        for i in range(ns):
            for j in range(nt):
                if (i, j) == (ci, cj) or (i, j) in grid.rays:
                    continue
                points = np.column_stack([ts * grid.s[i], ts * grid.t[j]])
                value = max(value, barrier(surface(points), grid.base_loss, grid.loss[i, j]))
                interpolated += 1
        if interpolated:
            logger.debug("Interpolated %d rays for Pbar", interpolated)

    return value, interpolated


def landscape_metrics(grid: LossSurfaceGrid, *, interpolate: bool = False) -> LandscapeMetrics:
    value, interpolated = pbar(grid, interpolate=interpolate)
    return LandscapeMetrics(
        p1=p1(grid), p2=p2(grid), pbar=value, rays_used=len(grid.rays), interpolated=interpolated
    )
