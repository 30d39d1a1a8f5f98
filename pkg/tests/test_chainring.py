"""Tests for the truncated ramified chain ring."""

import os
import sys

import pytest

# Add project root to sys.path to allow importing src modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

try:
    from src.chainring import (
        INFINITY,
        conjugate,
        divide_by_pi_power,
        enumerate_ring,
        from_json,
        multiply_by_pi,
        one,
        pi_valuation,
        residue,
        ring_arith,
        ring_descriptor,
        ring_element,
        sigma,
        sigma_inverse,
        teichmuller,
        to_json,
        truncate,
        uniformizer,
        unit_inverse,
        zero,
    )
    from src.exceptions import (
        BadParametersError,
        BoundExceededError,
        DescriptorMismatchError,
        DivisionByZeroError,
    )
except ImportError as e:
    raise ImportError(
        "Failed to import modules. Ensure the src directory is structured correctly and accessible."
    ) from e


@pytest.fixture
def R4():
    """R_{4,1}: π^4 = 0 over Z/9."""
    return ring_descriptor(3, 4)


@pytest.fixture
def R4_2():
    """R_{4,2}: coefficients in GR(9, 2)."""
    return ring_descriptor(3, 4, 2)


class TestRingDescriptor:
    """Test descriptor validation."""

    def test_basic_parameters(self, R4):
        """k is N/2 and the order is p^{N m}."""
        assert R4.k == 2
        assert R4.modulus == 9
        assert R4.order == 81

    @pytest.mark.parametrize("p,N", [(2, 4), (4, 4), (3, 3), (3, 0)])
    def test_invalid_parameters(self, p, N):
        """Even primes, composites and odd or tiny N are rejected."""
        with pytest.raises(BadParametersError):
            ring_descriptor(p, N)

    def test_invalid_type(self):
        """Non-integer parameters raise TypeError."""
        with pytest.raises(TypeError):
            ring_descriptor(3.0, 4)  # type: ignore  # Invalid type for testing

    def test_type_checked_after_caching(self, R4):
        """A float characteristic is refused even once ring_descriptor(3, 4) is cached."""
        assert ring_descriptor(3, 4) is R4
        with pytest.raises(TypeError):
            ring_descriptor(3.0, 4)  # type: ignore  # Invalid type for testing


class TestRingArith:
    """Test ring operations."""

    def test_pi_squared_is_p(self, R4):
        """π·π = p."""
        pi = uniformizer(R4)
        assert pi * pi == ring_element(R4, 3)

    def test_pi_nilpotent(self, R4):
        """π^4 = 0 in R_4."""
        pi = uniformizer(R4)
        assert (pi * pi * pi * pi).is_zero()

    def test_add_sub_neg(self, R4):
        """Subtraction is addition of the negative."""
        a = ring_element(R4, 5, 7)
        b = ring_element(R4, 8, 2)
        assert a - b == a + (-b)
        assert (a - a).is_zero()

    def test_unknown_operation(self, R4):
        """Unknown operation names raise ValueError."""
        with pytest.raises(ValueError):
            ring_arith(one(R4), one(R4), "pow")

    def test_descriptor_mismatch(self, R4):
        """Elements of different rings do not combine."""
        other = ring_descriptor(3, 6)
        with pytest.raises(DescriptorMismatchError):
            one(R4) + one(other)

    def test_multiplication_commutes(self, R4_2):
        """Products in R_{4,2} commute."""
        a = ring_element(R4_2, [1, 2], [0, 1])
        b = ring_element(R4_2, [4, 0], [5, 3])
        assert a * b == b * a


class TestValuationAndDivision:
    """Test π-adic valuation, truncation and division."""

    @pytest.mark.parametrize(
        "a0,a1,expected",
        [(1, 0, 0), (0, 1, 1), (3, 0, 2), (0, 3, 3), (3, 1, 1)],
    )
    def test_pi_valuation(self, R4, a0, a1, expected):
        """Valuation is the smallest π-adic digit position."""
        assert pi_valuation(ring_element(R4, a0, a1)) == expected

    def test_valuation_of_zero(self, R4):
        """Zero has infinite valuation."""
        assert pi_valuation(zero(R4)) == INFINITY

    def test_truncate_mod_pi(self, R4):
        """Truncation at 1 keeps the residue digit only."""
        a = ring_element(R4, 7, 5)
        assert truncate(a, 1) == ring_element(R4, 1, 0)

    def test_multiply_then_divide(self, R4):
        """Dividing π^2·a by π^2 recovers a up to its top digits."""
        a = ring_element(R4, 2, 1)
        shifted = multiply_by_pi(a, 2)
        assert multiply_by_pi(divide_by_pi_power(shifted, 2), 2) == shifted

    def test_divide_not_divisible(self, R4):
        """A unit is not divisible by π."""
        with pytest.raises(DivisionByZeroError):
            divide_by_pi_power(one(R4), 1)

    def test_unit_inverse(self, R4):
        """u·u^{-1} = 1 for a unit with a π component."""
        u = ring_element(R4, 2, 4)
        assert u * unit_inverse(u) == one(R4)

    def test_non_unit_has_no_inverse(self, R4):
        """π is not invertible."""
        with pytest.raises(DivisionByZeroError):
            unit_inverse(uniformizer(R4))


class TestAutomorphisms:
    """Test conjugation and the Frobenius lift."""

    def test_conjugate_negates_pi(self, R4):
        """conj(π) = -π and conjugation is an involution."""
        pi = uniformizer(R4)
        assert conjugate(pi) == -pi
        a = ring_element(R4, 4, 7)
        assert conjugate(conjugate(a)) == a

    def test_norm_is_conjugation_invariant(self, R4):
        """a·conj(a) is fixed by conjugation."""
        a = ring_element(R4, 4, 7)
        norm = a * conjugate(a)
        assert conjugate(norm) == norm

    def test_sigma_fixes_pi(self, R4_2):
        """σ fixes π and is a ring homomorphism."""
        pi = uniformizer(R4_2)
        assert sigma(pi) == pi
        a = ring_element(R4_2, [1, 2], [3, 1])
        b = ring_element(R4_2, [0, 1], [2, 2])
        assert sigma(a * b) == sigma(a) * sigma(b)

    def test_sigma_inverse(self, R4_2):
        """σ^{-1}(σ(a)) = a."""
        a = ring_element(R4_2, [5, 2], [3, 1])
        assert sigma_inverse(sigma(a)) == a

    def test_sigma_trivial_for_m1(self, R4):
        """Over Z/9 the Frobenius lift is the identity."""
        a = ring_element(R4, 5, 2)
        assert sigma(a) == a

    def test_teichmuller_is_multiplicative_lift(self, R4_2):
        """The lift has the right residue and is fixed by x ↦ x^{q^m}."""
        t = teichmuller(R4_2, 4)
        assert residue(t) == 4
        power = t
        for _ in range(8):
            power = power * t
        assert power == t


class TestEnumerationAndJson:
    """Test enumeration and JSON encoding."""

    def test_enumerate_ring_size(self, R4):
        """Every element appears once."""
        elements = list(enumerate_ring(R4))
        assert len(elements) == 81
        assert len(set(elements)) == 81

    def test_enumerate_bound(self, R4):
        """A small bound stops enumeration."""
        with pytest.raises(BoundExceededError):
            list(enumerate_ring(R4, bound=10))

    def test_json_encoding(self, R4_2):
        """Elements encode as their two coefficient vectors."""
        a = ring_element(R4_2, [5, 2], [3, 1])
        assert to_json(a) == [[5, 2], [3, 1]]
        assert from_json(R4_2, to_json(a)) == a
