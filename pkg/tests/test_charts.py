"""Tests for the affine chart systems: construction, counting and smoothness."""

import os
import sys
from dataclasses import replace
from unittest.mock import patch

import pytest

# Add project root to sys.path to allow importing src modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

try:
    from src.charts import (
        ChartKind,
        build_chart,
        chart_to_json,
        chart_vs_variety_dim,
        count_chart_points,
        elimination_audit,
        jacobian_certify,
        pivot_profile,
        rank_identity_violations,
        rank_stratified_count,
    )
    from src.exceptions import BadParametersError, BoundExceededError, PiModularExcludedError
except ImportError as e:
    raise ImportError(
        "Failed to import modules. Ensure the src directory is structured correctly and accessible."
    ) from e


@pytest.fixture
def z_singular():
    """Z chart with h = 1, t - h = 2, unit in V11."""
    return build_chart(ChartKind.Z_CHART, 6, 1, t=3)


@pytest.fixture
def z_smooth():
    """Z chart with h = 0, t = 2."""
    return build_chart(ChartKind.Z_CHART, 4, 0, t=2)


class TestBuildChart:
    """Test the shapes of the equation systems."""

    def test_z_chart_shape(self, z_singular):
        """Blocks of sizes h, h, t-h, t-h and one 2x2 minor."""
        sizes = {name: len(block) for name, block in z_singular.blocks}
        assert sizes == {"V11": 1, "V12": 1, "V21": 2, "Z23": 2}
        assert len(z_singular.equations) == 2
        assert z_singular.claimed_dim == 4

    def test_z_chart_without_minors(self):
        """t - h = 1 leaves only the unit equation."""
        c = build_chart(ChartKind.Z_CHART, 5, 1, t=2)
        assert len(c.variables) == 4
        assert len(c.equations) == 1

    def test_y_chart_shape(self):
        """V'11 of size h - t and Z2 of size n - 2h."""
        c = build_chart(ChartKind.Y_CHART, 5, 2, t=0)
        assert [len(b) for _, b in c.blocks] == [2, 1]
        assert c.claimed_dim == 2

    def test_intersection_chart_shape(self):
        """V'11 of size h - t2 and Z23 of size t1 - h."""
        c = build_chart(ChartKind.INTERSECTION, 5, 1, t1=2, t2=0)
        assert len(c.variables) == 2
        assert c.claimed_dim == 1

    def test_flip_changes_minor(self, z_smooth):
        """H reverses the Z23 column inside the minors."""
        unflipped = build_chart(ChartKind.Z_CHART, 4, 0, t=2, flip=False)
        assert unflipped.equations[0] == z_smooth.equations[0]
        assert unflipped.equations[1] != z_smooth.equations[1]
        assert not unflipped.flip

    @pytest.mark.parametrize(
        "kind,n,h,types",
        [
            (ChartKind.Z_CHART, 5, 2, {"t": 2}),
            (ChartKind.Y_CHART, 5, 1, {"t": 1}),
            (ChartKind.INTERSECTION, 5, 1, {"t1": 1, "t2": 0}),
            (ChartKind.Z_CHART, 5, 1, {"t": 2, "pivot": 4}),
        ],
    )
    def test_invalid_parameters(self, kind, n, h, types):
        """Out-of-range types and pivots are rejected."""
        with pytest.raises(BadParametersError):
            build_chart(kind, n, h, **types)

    def test_pi_modular(self):
        """n = 4, h = 2 is excluded before the chart is built."""
        with pytest.raises(PiModularExcludedError):
            build_chart(ChartKind.Y_CHART, 4, 2, t=0)

    def test_json(self, z_smooth):
        """Equations serialize as exponent vectors with integer coefficients."""
        data = chart_to_json(z_smooth)
        assert data["kind"] == "Z_chart"
        assert data["variables"] == ["v21_0", "v21_1", "z23_0", "z23_1"]
        assert sorted(data["equations"][0]) == [[[0, 0, 0, 0], -1], [[1, 0, 0, 0], 1]]
        assert len(data["equations"][1]) == 2


class TestCounting:
    """Test point counts against closed forms."""

    @pytest.mark.parametrize("m,expected", [(1, 27), (2, 729)])
    def test_affine_z_chart(self, m, expected):
        """t - h = 1, h = 1: A^3."""
        c = build_chart(ChartKind.Z_CHART, 5, 1, t=2)
        assert count_chart_points(c, m, method="brute") == expected

    def test_singular_z_chart_brute(self, z_singular):
        """Unit in V11: q · |rank ≤ 1 matrices of size 2x2| = 3 · 33."""
        assert count_chart_points(z_singular, 1, method="brute") == 99
        assert rank_stratified_count(z_singular, 3) == 99

    def test_pivot_profile(self):
        """Counts agree within each pivot block and differ across blocks for t - h = 2."""
        profile = pivot_profile(ChartKind.Z_CHART, 6, 1, 1, t=3)
        assert profile == {0: 99, 1: 99, 2: 81, 3: 81}

    def test_pivot_independence_y_chart(self):
        """Every pivot of a Y chart gives q^{n-h-t-1}."""
        profile = pivot_profile(ChartKind.Y_CHART, 5, 2, 1, t=0)
        assert set(profile.values()) == {9}

    @pytest.mark.parametrize("m", [1, 2])
    def test_y_chart_count(self, m):
        """(n, h, t) = (5, 2, 1): A^1."""
        c = build_chart(ChartKind.Y_CHART, 5, 2, t=1)
        assert count_chart_points(c, m) == 3**m

    def test_flip_invariance(self, z_singular):
        """H is invertible, so the flip does not change the count."""
        unflipped = build_chart(ChartKind.Z_CHART, 6, 1, t=3, flip=False)
        assert count_chart_points(unflipped, 1) == count_chart_points(z_singular, 1)

    def test_rank_identity(self, z_singular):
        """Minors vanish exactly on rank ≤ 1 blocks."""
        assert rank_identity_violations(z_singular, 1) == 0
        unflipped = build_chart(ChartKind.Z_CHART, 6, 1, t=3, flip=False)
        assert rank_identity_violations(unflipped, 1) == 0

    def test_bound_and_fallback(self, z_singular):
        """Brute force refuses above the bound; auto falls back to the closed count."""
        with patch("src.charts.CHART_ASSIGNMENT_BOUND", 5):
            with pytest.raises(BoundExceededError):
                count_chart_points(z_singular, 1, method="brute")
            assert count_chart_points(z_singular, 1, method="auto") == 99

    def test_unknown_method(self, z_smooth):
        """Unknown methods raise ValueError."""
        with pytest.raises(ValueError):
            count_chart_points(z_smooth, 1, method="guess")


class TestJacobian:
    """Test smooth/singular certification."""

    def test_singular_witness_at_minor_origin(self, z_singular):
        """The origin of the minor block is singular."""
        cert = jacobian_certify(z_singular, 1)
        assert not cert.smooth
        assert cert.witness == {"v11_0": 1, "v21_0": 0, "v21_1": 0, "z23_0": 0, "z23_1": 0}

    @pytest.mark.parametrize(
        "chart",
        [
            build_chart(ChartKind.Z_CHART, 4, 0, t=2),
            build_chart(ChartKind.Z_CHART, 6, 1, t=3, pivot=2),
            build_chart(ChartKind.Y_CHART, 5, 2, t=0),
            build_chart(ChartKind.INTERSECTION, 5, 1, t1=2, t2=0),
        ],
    )
    def test_smooth_charts(self, chart):
        """h = 0 charts, unit-in-V21 charts, Y and intersection charts are smooth."""
        cert = jacobian_certify(chart, 1)
        assert cert.smooth
        assert cert.to_json()["status"] == "smooth_everywhere"

    def test_sampled_mode(self, z_smooth):
        """Sampled certification checks at most the sample size."""
        cert = jacobian_certify(z_smooth, 2, mode="sampled", sample_size=10)
        assert cert.mode == "sampled"
        assert cert.checked == 10
        assert cert.smooth

    def test_unknown_mode(self, z_smooth):
        """Unknown modes raise ValueError."""
        with pytest.raises(ValueError):
            jacobian_certify(z_smooth, 1, mode="fast")


class TestDimensions:
    """Test growth-rate dimensions of charts."""

    def test_z_chart_dimension(self, z_smooth):
        """(t, h) = (2, 0) has dimension 2."""
        report = chart_vs_variety_dim(z_smooth, 3, 2)
        assert report.counts == {1: 9, 2: 81}
        assert report.estimated_dim == 2
        assert report.leading_ok

    def test_intersection_dimension(self):
        """(t1, t2, h) = (2, 0, 1) has dimension 1."""
        c = build_chart(ChartKind.INTERSECTION, 5, 1, t1=2, t2=0)
        report = chart_vs_variety_dim(c, 3, 2)
        assert report.estimated_dim == 1
        assert report.model == "intersection_chart"


class TestEliminationAudit:
    """Test the replay of the elimination from lattice-chain coordinates to each chart."""

    @pytest.mark.parametrize(
        "kind,n,h,types,pivot",
        [
            (ChartKind.Z_CHART, 3, 0, {"t": 1}, 0),
            (ChartKind.Z_CHART, 4, 0, {"t": 2}, 1),
            (ChartKind.Z_CHART, 5, 1, {"t": 2}, 0),
            (ChartKind.Z_CHART, 5, 1, {"t": 2}, 2),
            (ChartKind.Z_CHART, 6, 1, {"t": 3}, 3),
            (ChartKind.Y_CHART, 3, 1, {"t": 0}, 0),
            (ChartKind.Y_CHART, 5, 2, {"t": 1}, 0),
            (ChartKind.Y_CHART, 5, 2, {"t": 0}, 1),
            (ChartKind.INTERSECTION, 5, 1, {"t1": 2, "t2": 0}, 0),
            (ChartKind.INTERSECTION, 7, 2, {"t1": 3, "t2": 0}, 1),
        ],
    )
    def test_every_step_holds(self, kind, n, h, types, pivot):
        """Each intermediate ideal checks out and the chain ends on the chart's ideal."""
        audit = elimination_audit(build_chart(kind, n, h, pivot=pivot, **types))
        assert audit.passed, audit.to_json()
        assert audit.steps[-1].name == "chart_ideal"
        assert audit.steps[-1].detail["same_ideal"]
        assert audit.steps[-1].detail["stray_variables"] == []

    def test_z_chart_step_order(self, z_singular):
        """The Z chart replays the unit, norm, relation, containment and trace steps in order."""
        audit = elimination_audit(z_singular)
        assert [s.name for s in audit.steps] == [
            "unit_eliminates_z21_z22",
            "hermitian_norm_vanishes",
            "z1_from_relation",
            "lambda1_containment",
            "lambda2_containment",
            "dual_containment",
            "trace_condition",
            "chart_ideal",
        ]
        assert audit.steps[0].detail["eliminated"] == ["z21_0", "z21_1"]
        assert audit.steps[5].detail["zeroed"] == ["v23_0", "v23_1"]

    def test_y_chart_determines_z14(self):
        """Z'14 is solved from the relation and only depends on chart variables."""
        audit = elimination_audit(build_chart(ChartKind.Y_CHART, 5, 2, t=1))
        steps = {s.name: s for s in audit.steps}
        assert steps["z14_from_relation"].detail["determined"] == ["z14_0"]
        assert steps["y1_symmetry"].passed
        assert steps["lambda1_rows"].passed

    def test_dropped_minor_fails_at_chart_ideal(self, z_singular):
        """A chart missing its minor does not generate the eliminated ideal."""
        tampered = replace(z_singular, equations=z_singular.equations[:1])
        audit = elimination_audit(tampered)
        assert not audit.passed
        assert audit.first_failure.name == "chart_ideal"
        assert not audit.first_failure.detail["same_ideal"]

    def test_json(self, z_smooth):
        """The audit serialises kind, params and every step."""
        data = elimination_audit(z_smooth).to_json()
        assert data["kind"] == "Z_chart"
        assert data["params"] == {"n": 4, "h": 0, "t": 2, "pivot": 0}
        assert data["passed"] is True
        assert all(step["passed"] for step in data["steps"])

    def test_unflipped_chart_refused(self):
        """The elimination lands on H Z23, so flip=False is rejected."""
        with pytest.raises(BadParametersError):
            elimination_audit(build_chart(ChartKind.Z_CHART, 4, 0, t=2, flip=False))

    @pytest.mark.parametrize("p", [2, 9, 3.0])
    def test_invalid_prime(self, z_smooth, p):
        """The residue characteristic must be an odd prime."""
        with pytest.raises(BadParametersError):
            elimination_audit(z_smooth, p)  # type: ignore  # Invalid type for testing
