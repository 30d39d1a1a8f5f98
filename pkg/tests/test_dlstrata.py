"""Tests for the Deligne–Lusztig point models and dimension estimates."""

import os
import sys

import pytest

# Add project root to sys.path to allow importing src modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

try:
    from src.dlstrata import (
        Model,
        claimed_dimension,
        count_points,
        enumerate_R,
        enumerate_Rprime,
        enumerate_Rprime_bracket,
        enumerate_S,
        enumerate_Sprime,
        estimate_dimension,
        fiber_census,
        fixed_locus,
        index_identity_violations,
        interpolate_counts,
        model_counts,
        rprime_two_way_count,
        sprime_count_identity,
    )
    from src.exceptions import (
        BadParametersError,
        InsufficientDataError,
        NotRationalError,
        SpaceMismatchError,
        WittIndexTooSmallError,
    )
    from src.formspace import (
        make_subspace,
        orthogonal_quotient,
        standard_orthogonal,
        standard_symplectic,
        whole_space,
    )
    from src.gf import field_descriptor
    from src.lattices import base_lattice, hermitian_ambient
except ImportError as e:
    raise ImportError(
        "Failed to import modules. Ensure the src directory is structured correctly and accessible."
    ) from e


@pytest.fixture
def f3():
    return field_descriptor(3)


@pytest.fixture
def sp2(f3):
    """V_Λ for a type-2 anchor (t = 1)."""
    return standard_symplectic(2, f3)


@pytest.fixture
def sp4(f3):
    """V_Λ for a type-4 anchor (t = 2)."""
    return standard_symplectic(4, f3)


@pytest.fixture
def orth3():
    """V_{Λ₀^♯} at n = 3 (t = 0)."""
    return orthogonal_quotient(base_lattice(hermitian_ambient(3, 1, 3)))


class TestSPrime:
    """Test S and S' enumeration."""

    @pytest.mark.parametrize("m,expected", [(1, 4), (2, 10)])
    def test_t1_h0_is_projective_line(self, sp2, m, expected):
        """For t = 1, h = 0 every line counts and U' is forced to be zero."""
        assert count_points(enumerate_S(sp2, 0, m)) == expected
        assert count_points(enumerate_Sprime(sp2, 0, m)) == expected

    def test_t2_h0_rational_level(self, sp4):
        """At m = 1 all 40 Lagrangians are fixed, each with a P^1 of partners."""
        points = list(enumerate_S(sp4, 0, 1))
        assert len(points) == 40
        assert len(fixed_locus(points)) == 40
        assert count_points(enumerate_Sprime(sp4, 0, 1)) == 160

    def test_h_out_of_range(self, sp4):
        """h must be below t."""
        with pytest.raises(BadParametersError):
            list(enumerate_S(sp4, 2, 1))

    def test_requires_symplectic(self, orth3):
        """S lives on symplectic spaces only."""
        with pytest.raises(SpaceMismatchError):
            list(enumerate_S(orth3, 0, 1))


class TestFiberLaw:
    """Test the fibers of S' → S."""

    @pytest.mark.parametrize("h,m", [(0, 1), (0, 2), (1, 1), (1, 2)])
    def test_census_passes(self, sp4, h, m):
        """Fixed U carry a projective space of partners, others exactly one."""
        census = fiber_census(sp4, h, m)
        assert census.passed
        sprime, predicted = sprime_count_identity(census, 3)
        assert sprime == predicted
        assert sprime == count_points(enumerate_Sprime(sp4, h, m))

    def test_census_counts_t2_h1(self, sp4):
        """At (t, h) = (2, 1), m = 1: 40 fixed lines, each under 13 planes."""
        census = fiber_census(sp4, 1, 1)
        assert census.s_count == census.fixed_count == 40
        assert census.sprime_count == 520

    @pytest.mark.parametrize("m", [1, 2])
    def test_index_identity(self, sp4, m):
        """[U^♯ : U^♯ ∩ ΦU^♯] = [U : U ∩ ΦU] for every isotropic U."""
        checked, bad = index_identity_violations(sp4, m)
        assert checked > 0
        assert bad == []


class TestRPrime:
    """Test R, R' and the bracket model."""

    @pytest.mark.parametrize("m,expected", [(1, 4), (2, 10)])
    def test_conic_points(self, orth3, m, expected):
        """At n = 3, h = 1 the points are the isotropic lines of a conic."""
        assert count_points(enumerate_R(orth3, 1, m)) == expected
        assert count_points(enumerate_Rprime(orth3, 1, m)) == expected

    @pytest.mark.parametrize("m", [1, 2])
    def test_two_way_count(self, orth3, m):
        """Pair enumeration and fiber summation agree."""
        pairs, summed = rprime_two_way_count(orth3, 1, m)
        assert pairs == summed

    def test_bracket_with_whole_space(self, orth3):
        """With W the whole space the bracket model is R'."""
        W = whole_space(orth3, 1)
        bracket = {pt.key for pt in enumerate_Rprime_bracket(orth3, W, 1, 2)}
        full = {pt.key for pt in enumerate_Rprime(orth3, 1, 2)}
        assert bracket == full

    def test_bracket_needs_rational_w(self, orth3):
        """A non-rational W is rejected."""
        W = make_subspace(orth3, 2, [[1, 3, 0]])
        with pytest.raises(NotRationalError):
            list(enumerate_Rprime_bracket(orth3, W, 1, 2))

    def test_t_not_below_h(self, orth3):
        """R needs t < h."""
        with pytest.raises(BadParametersError):
            list(enumerate_R(orth3, 0, 1))

    def test_witt_index_too_small(self, f3):
        """An isotropic dimension above half the space is refused."""
        line = standard_orthogonal(1, f3, n=3)
        with pytest.raises(WittIndexTooSmallError, match="maximal isotropic dimension 0 over F̄"):
            list(enumerate_R(line, 2, 1))


class TestDimensionEstimates:
    """Test growth-rate dimension estimates."""

    def test_projective_plane(self):
        """(13, 91) at q = 3 grows like a surface."""
        report = estimate_dimension({1: 13, 2: 91}, 3, claimed_dim=2)
        assert report.estimated_dim == 2
        assert report.leading_ok

    def test_constant_counts(self):
        """Constant counts have dimension zero."""
        assert estimate_dimension({1: 7, 2: 7}, 3).estimated_dim == 0

    def test_claim_outside_band(self):
        """A claim far from the growth fails the leading-term check."""
        assert not estimate_dimension({1: 13, 2: 91}, 3, claimed_dim=4).leading_ok

    def test_insufficient_data(self):
        """A zero count breaks the only consecutive pair."""
        with pytest.raises(InsufficientDataError):
            estimate_dimension({1: 0, 2: 5}, 3)

    def test_rprime_model_counts(self, orth3):
        """R' at n = 3, h = 1 is a curve."""
        counts = model_counts(Model.R_PRIME, orth3, 1, [1, 2])
        claimed = claimed_dimension(Model.R_PRIME, 3, 1, 0)
        report = estimate_dimension(counts, 3, claimed_dim=claimed, model=Model.R_PRIME.value)
        assert claimed == 1
        assert report.estimated_dim == 1
        assert report.leading_ok
        assert report.to_json()["counts"] == {"1": 4, "2": 10}

    def test_bracket_needs_w(self, orth3):
        """The bracket model needs its rational subspace."""
        with pytest.raises(BadParametersError):
            model_counts(Model.R_PRIME_BRACKET, orth3, 1, [1])

    def test_interpolation(self):
        """Counts of P^2 interpolate to Q^2 + Q + 1."""
        assert interpolate_counts({1: 13, 2: 91, 3: 757}, 3) == "Q**2 + Q + 1"

    def test_interpolation_needs_two_levels(self):
        """One level is not enough to interpolate."""
        with pytest.raises(InsufficientDataError):
            interpolate_counts({1: 13}, 3)
