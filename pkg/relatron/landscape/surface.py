"""Two-dimensional loss surfaces with ray samples."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from ..errors import InconsistentRay, MissingCenter, NonMonotoneGrid, SurfaceError
from ..util.io import read_json

__all__ = "RAY_POINTS", "Ray", "LossSurfaceGrid", "load_surface", "surface_from_dict", "demo_surface"

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9

RAY_POINTS = 21


@dataclass(frozen=True)
class Ray:
    """Losses along w0 + t (w_ij - w0) for t in [0, 1]."""

    i: int
    j: int
    ts: np.ndarray
    losses: np.ndarray


@dataclass
class LossSurfaceGrid:
    rho: float
    s: np.ndarray
    t: np.ndarray
    loss: np.ndarray
    base_loss: float
    family: Literal["rdl", "dfs"] | None = None
    rays: dict[tuple[int, int], Ray] = field(default_factory=dict)

    @property
    def center(self) -> tuple[int, int]:
        return int(np.flatnonzero(self.s == 0)[0]), int(np.flatnonzero(self.t == 0)[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.loss.shape

    def boundary(self) -> list[tuple[int, int]]:
        ns, nt = self.shape
        return [(i, j) for i in range(ns) for j in range(nt) if i in (0, ns - 1) or j in (0, nt - 1)]

    def scaled(self, factor: float) -> "LossSurfaceGrid":
        rays = {key: Ray(r.i, r.j, r.ts, r.losses * factor) for key, r in self.rays.items()}
        return LossSurfaceGrid(self.rho, self.s, self.t, self.loss * factor, self.base_loss * factor, self.family, rays)

    def transposed(self) -> "LossSurfaceGrid":
        rays = {(r.j, r.i): Ray(r.j, r.i, r.ts, r.losses) for r in self.rays.values()}
        return LossSurfaceGrid(self.rho, self.t, self.s, self.loss.T.copy(), self.base_loss, self.family, rays)

    def validate(self) -> "LossSurfaceGrid":
        """Check the grid and ray invariants, raising the matching SurfaceError."""
        if self.loss.shape != (len(self.s), len(self.t)):
            raise SurfaceError(f"Loss matrix shape {self.loss.shape} does not match {len(self.s)}x{len(self.t)} grid")
        if len(self.s) < 3 or len(self.t) < 3:
            raise SurfaceError(f"Grid must be at least 3x3, got {len(self.s)}x{len(self.t)}")

        for axis, coords in (("s", self.s), ("t", self.t)):
            if np.any(np.diff(coords) <= 0):
                raise NonMonotoneGrid(f"Coordinates {axis} are not strictly increasing")
            if not np.any(coords == 0):
                raise MissingCenter(f"Coordinates {axis} do not contain 0")
            if not np.allclose(coords, -coords[::-1], rtol=0, atol=TOLERANCE):
                raise NonMonotoneGrid(f"Coordinates {axis} are not symmetric about 0")

        if not np.all(np.isfinite(self.loss)):
            raise SurfaceError("Loss grid contains non-finite values")
        ci, cj = self.center
        if abs(self.loss[ci, cj] - self.base_loss) > TOLERANCE:
            raise SurfaceError(f"Center loss {self.loss[ci, cj]} differs from base loss {self.base_loss}")

        for (i, j), ray in self.rays.items():
            if not (0 <= i < len(self.s) and 0 <= j < len(self.t)):
                raise InconsistentRay(f"Ray ({i}, {j}) lies outside the grid")
            if len(ray.ts) != len(ray.losses) or len(ray.ts) < 2:
                raise InconsistentRay(f"Ray ({i}, {j}) needs matching ts and losses with at least 2 samples")
            if ray.ts[0] != 0 or ray.ts[-1] != 1 or np.any(np.diff(ray.ts) <= 0):
                raise InconsistentRay(f"Ray ({i}, {j}) must sample increasing t from 0 to 1")
            if not np.all(np.isfinite(ray.losses)):
                raise InconsistentRay(f"Ray ({i}, {j}) contains non-finite losses")
            if abs(ray.losses[0] - self.base_loss) > TOLERANCE:
                raise InconsistentRay(f"Ray ({i}, {j}) starts at {ray.losses[0]}, base loss is {self.base_loss}")
            if abs(ray.losses[-1] - self.loss[i, j]) > TOLERANCE:
                raise InconsistentRay(f"Ray ({i}, {j}) ends at {ray.losses[-1]}, grid value is {self.loss[i, j]}")
        return self

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "s": self.s.tolist(),
            "t": self.t.tolist(),
            "L": self.loss.tolist(),
            "base_loss": self.base_loss,
            "family": self.family,
            "rays": [
                {"i": r.i, "j": r.j, "ts": r.ts.tolist(), "Ls": r.losses.tolist()} for _, r in sorted(self.rays.items())
            ],
        }


def surface_from_dict(data: dict) -> LossSurfaceGrid:
    try:
        rays = {}
        for entry in data.get("rays", []) or []:
            i, j = int(entry["i"]), int(entry["j"])
            rays[(i, j)] = Ray(i, j, np.asarray(entry["ts"], dtype=np.float64), np.asarray(entry["Ls"], dtype=np.float64))
        family = data.get("family")
        if family not in (None, "rdl", "dfs"):
            raise SurfaceError(f"Unknown model family {family!r}")
        grid = LossSurfaceGrid(
            rho=float(data["rho"]),
            s=np.asarray(data["s"], dtype=np.float64),
            t=np.asarray(data["t"], dtype=np.float64),
            loss=np.asarray(data["L"], dtype=np.float64),
            base_loss=float(data["base_loss"]),
            family=family,
            rays=rays,
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, SurfaceError):
            raise
        raise SurfaceError(f"Malformed surface: {e}") from e
    return grid.validate()


def load_surface(path: Path | str) -> LossSurfaceGrid:
    """Read and validate a surface JSON file."""
    path = Path(path)
    if not path.is_file():
        raise SurfaceError(f"Surface file {path} does not exist")
    grid = surface_from_dict(read_json(path))
    logger.debug("Loaded %dx%d surface with %d rays from %s", *grid.shape, len(grid.rays), path)
    return grid


def _surface_function(kind: str, a: float, b: float, c: float, height: float, radius: float):
    if kind == "quadratic":
        return lambda s, t: a * s**2 + b * t**2
    if kind == "quartic":
        return lambda s, t: s**4 + t**4 + a * s**2 + b * t**2
    if kind == "plane":
        return lambda s, t: c * s
    if kind == "saddle":
        return lambda s, t: c * s * t
    if kind == "bump":
        width = radius / 8

        def bump(s, t):
            r = np.sqrt(s**2 + t**2)
            return 0.1 * r**2 + height * np.exp(-(((r - radius / 2) / width) ** 2) / 2)

        return bump
    raise SurfaceError(f"Unknown demo surface kind {kind!r}")


def demo_surface(
    kind: str = "quadratic",
    *,
    spacing: float = 0.1,
    radius: float = 1.0,
    a: float = 1.0,
    b: float = 3.0,
    c: float = 1.0,
    height: float = 5.0,
    family: Literal["rdl", "dfs"] | None = None,
) -> LossSurfaceGrid:
    """Analytic surface on a symmetric grid with exact rays to every non-center point.

    Kinds: quadratic a s² + b t², quartic s⁴ + t⁴ + a s² + b t², plane c s,
    saddle c s t and bump (a ring of `height` at half the radius).
    """
    if spacing <= 0:
        raise SurfaceError(f"Spacing must be positive, got {spacing}")
    n = max(1, int(round(radius / spacing)))
    coords = np.arange(-n, n + 1) * spacing
    coords[n] = 0.0
    f = _surface_function(kind, a, b, c, height, n * spacing)

    ss, tt = np.meshgrid(coords, coords, indexing="ij")
    loss = f(ss, tt)
    base = float(f(0.0, 0.0))
    loss[n, n] = base

    ts = np.linspace(0.0, 1.0, RAY_POINTS)
    rays = {}
    for i in range(len(coords)):
        for j in range(len(coords)):
            if (i, j) == (n, n):
                continue
            losses = f(ts * coords[i], ts * coords[j])
            losses[0], losses[-1] = base, loss[i, j]
            rays[(i, j)] = Ray(i, j, ts, losses)

    return LossSurfaceGrid(float(n * spacing), coords, coords.copy(), loss, base, family, rays).validate()
