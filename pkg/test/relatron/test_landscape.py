"""Tests for loss surfaces, landscape indicators and post-selection."""

import json

import pytest

from relatron.errors import (
    CrossFamilyComparison,
    InconsistentRay,
    MissingCenter,
    MissingRays,
    NonMonotoneGrid,
    SurfaceError,
)
from relatron.landscape import (
    Candidate,
    LandscapeMetrics,
    demo_surface,
    landscape_metrics,
    landscape_votes,
    load_surface,
    post_select,
    surface_from_dict,
)


def small_quadratic():
    return demo_surface("quadratic", spacing=0.01, radius=0.05)


class TestSurface:
    """Test surface validation and loading."""

    def test_demo_shape(self):
        grid = small_quadratic()
        assert grid.shape == (11, 11)
        assert grid.center == (5, 5)
        assert len(grid.rays) == 120

    def test_round_trip_through_file(self, tmp_path):
        path = tmp_path / "surface.json"
        path.write_text(json.dumps(small_quadratic().as_dict()))
        grid = load_surface(path)
        assert landscape_metrics(grid).p2 == pytest.approx(6.0, rel=1e-6)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SurfaceError):
            load_surface(tmp_path / "nope.json")

    def test_non_monotone(self):
        data = small_quadratic().as_dict()
        data["s"][1], data["s"][2] = data["s"][2], data["s"][1]
        with pytest.raises(NonMonotoneGrid):
            surface_from_dict(data)

    def test_missing_center(self):
        data = {
            "rho": 1.0,
            "s": [-1.0, -0.5, 0.5, 1.0],
            "t": [-1.0, -0.5, 0.5, 1.0],
            "L": [[0.0] * 4] * 4,
            "base_loss": 0.0,
        }
        with pytest.raises(MissingCenter):
            surface_from_dict(data)

    def test_inconsistent_ray(self):
        data = small_quadratic().as_dict()
        data["rays"][0]["Ls"][-1] += 1.0
        with pytest.raises(InconsistentRay):
            surface_from_dict(data)

    def test_center_must_match_base_loss(self):
        data = small_quadratic().as_dict()
        data["base_loss"] = 1.0
        with pytest.raises(SurfaceError):
            surface_from_dict(data)

    def test_unknown_family(self):
        data = small_quadratic().as_dict()
        data["family"] = "gnn"
        with pytest.raises(SurfaceError):
            surface_from_dict(data)

    def test_unknown_kind(self):
        with pytest.raises(SurfaceError):
            demo_surface("ridge")


class TestMetrics:
    """Test P1, P2 and Pbar."""

    def test_quadratic_curvature(self):
        metrics = landscape_metrics(small_quadratic())
        assert metrics.p2 == pytest.approx(6.0, rel=1e-6)
        assert metrics.pbar == 0.0

    def test_plane(self):
        metrics = landscape_metrics(demo_surface("plane"))
        assert metrics.p1 == pytest.approx(1.0)
        assert metrics.p2 == pytest.approx(0.0, abs=1e-9)
        assert metrics.pbar == 0.0

    def test_saddle(self):
        assert landscape_metrics(demo_surface("saddle")).p2 == pytest.approx(1.0)

    def test_bump_barrier(self):
        assert landscape_metrics(demo_surface("bump")).pbar > 1.0

    def test_scaling_scales_metrics(self):
        grid = demo_surface("quartic")
        base = landscape_metrics(grid)
        scaled = landscape_metrics(grid.scaled(3.0))
        assert scaled.p1 == pytest.approx(3 * base.p1)
        assert scaled.p2 == pytest.approx(3 * base.p2)
        assert scaled.pbar == pytest.approx(3 * base.pbar, abs=1e-12)

    def test_transpose_keeps_metrics(self):
        grid = demo_surface("bump")
        base = landscape_metrics(grid)
        flipped = landscape_metrics(grid.transposed())
        assert flipped.p1 == pytest.approx(base.p1)
        assert flipped.p2 == pytest.approx(base.p2)
        assert flipped.pbar == pytest.approx(base.pbar)

    def test_missing_boundary_ray(self):
        grid = small_quadratic()
        del grid.rays[(0, 0)]
        with pytest.raises(MissingRays):
            landscape_metrics(grid)

    def test_interpolated_ray(self):
        grid = small_quadratic()
        del grid.rays[(0, 0)]
        metrics = landscape_metrics(grid, interpolate=True)
        assert metrics.interpolated == 1
        assert metrics.approximate
        assert metrics.as_dict()["rays_used"] == 119


def candidate(id, val, p1, p2, pbar, family="rdl", higher_is_better=True):
    return Candidate(id, val, higher_is_better, LandscapeMetrics(p1, p2, pbar), family)


class TestPostSelect:
    """Test post-selection by landscape vote."""

    def test_majority_vote(self):
        chosen = post_select(
            [candidate("a", 0.90, 1.0, 1.0, 1.0), candidate("b", 0.89, 0.5, 0.5, 2.0), candidate("c", 0.88, 2.0, 2.0, 0.1)]
        )
        assert chosen == "b"

    def test_vote_tie_goes_to_validation(self):
        candidates = [candidate("a", 0.80, 1.0, 2.0, 0.0), candidate("b", 0.85, 2.0, 1.0, 0.0)]
        assert landscape_votes(candidates) == [2, 2]
        assert post_select(candidates) == "b"

    def test_lower_is_better_validation(self):
        candidates = [
            candidate("a", 0.30, 1.0, 2.0, 0.0, higher_is_better=False),
            candidate("b", 0.20, 2.0, 1.0, 0.0, higher_is_better=False),
        ]
        assert post_select(candidates) == "b"

    def test_full_tie_goes_to_input_order(self):
        candidates = [candidate("a", 0.8, 1.0, 1.0, 0.0), candidate("b", 0.8, 1.0, 1.0, 0.0)]
        assert post_select(candidates) == "a"

    def test_cross_family(self):
        with pytest.raises(CrossFamilyComparison):
            post_select([candidate("a", 0.8, 1, 1, 0), candidate("b", 0.7, 1, 1, 0, family="dfs")])

    def test_too_many_candidates(self):
        with pytest.raises(SurfaceError):
            post_select([candidate(str(k), 0.5, 1, 1, 0) for k in range(4)])
