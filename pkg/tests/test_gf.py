"""Tests for finite field arithmetic and the matrix helpers."""

import os
import sys

import numpy as np
import pytest

# Add project root to sys.path to allow importing src modules
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

try:
    from src.exceptions import (
        BadParametersError,
        BoundExceededError,
        DescriptorMismatchError,
        DivisionByZeroError,
    )
    from src.gf import (
        base_field_codes,
        default_modulus,
        det,
        element,
        embedding_table,
        enumerate_field,
        field_arith,
        field_class,
        field_descriptor,
        frobenius,
        frobenius_matrix,
        inverse,
        is_square,
        mat_mul,
        multiplicative_order,
        nullspace,
        primitive_element,
        rank,
        rref,
        solve,
        to_codes,
    )
except ImportError as e:
    raise ImportError(
        "Failed to import modules. Ensure the src directory is structured correctly and accessible."
    ) from e


@pytest.fixture
def f3():
    return field_descriptor(3)


@pytest.fixture
def f9_i():
    """F_9 presented as F_3[x]/(x^2 + 1)."""
    return field_descriptor(3, 1, 2, modulus=(1, 0, 1))


class TestFieldArith:
    """Test the basic field operations."""

    def test_add_in_f3(self, f3):
        """2 + 2 = 1 in characteristic 3."""
        assert field_arith(element(f3, 2), element(f3, 2), "add") == element(f3, 1)

    def test_inverse_in_f3(self, f3):
        """2 is its own inverse in F_3."""
        assert field_arith(element(f3, 2), None, "inv") == element(f3, 2)

    def test_defining_relation(self, f9_i):
        """x * x = -1 when the modulus is x^2 + 1."""
        x = element(f9_i, (0, 1))
        assert (x * x).coefficients == (2, 0)

    def test_operators(self, f9_i):
        """Operator overloads agree with field_arith."""
        a = element(f9_i, (1, 2))
        b = element(f9_i, (2, 2))
        assert a + b == field_arith(a, b, "add")
        assert a - b + b == a
        assert (a / b) * b == a
        assert -a + a == element(f9_i, 0)
        assert a**8 == element(f9_i, 1)

    def test_inverse_of_zero(self, f3):
        """Inverting zero raises DivisionByZeroError."""
        with pytest.raises(DivisionByZeroError):
            field_arith(element(f3, 0), None, "inv")

    def test_descriptor_mismatch(self, f3, f9_i):
        """Operands from different fields are rejected."""
        with pytest.raises(DescriptorMismatchError):
            field_arith(element(f3, 1), element(f9_i, 1), "add")

    def test_unknown_operation(self, f3):
        """Unknown operation names raise ValueError."""
        with pytest.raises(ValueError):
            field_arith(element(f3, 1), element(f3, 1), "pow")


class TestFieldDescriptor:
    """Test descriptor validation."""

    @pytest.mark.parametrize("p", [2, 9, 1])
    def test_bad_prime(self, p):
        """Even or composite characteristics are rejected."""
        with pytest.raises(BadParametersError):
            field_descriptor(p)

    def test_reducible_modulus(self):
        """x^2 - 1 is rejected as a modulus."""
        with pytest.raises(BadParametersError):
            field_descriptor(3, 1, 2, modulus=(2, 0, 1))

    def test_order_bound(self):
        """3^7 exceeds the default bound."""
        with pytest.raises(BoundExceededError):
            field_descriptor(3, 1, 7)

    def test_invalid_type(self):
        """Non-integer parameters raise TypeError."""
        with pytest.raises(TypeError):
            field_descriptor("3")  # type: ignore  # Invalid type for testing

    def test_default_modulus_is_monic(self):
        """The chosen modulus is monic of degree r*m."""
        desc = field_descriptor(5, 1, 2)
        assert len(desc.modulus) == 3
        assert desc.modulus[-1] == 1

    def test_default_modulus_is_smallest_primitive(self):
        """Over F_3 the first primitive quadratic is x^2 + x + 2."""
        assert default_modulus(3, 2) == (2, 1, 1)
        assert field_descriptor(3, 1, 2).modulus == (2, 1, 1)

    def test_type_checked_after_caching(self):
        """A float argument is refused even once the integer one is cached."""
        assert default_modulus(3, 2) == (2, 1, 1)
        field_descriptor(3, 1, 2)
        with pytest.raises(TypeError):
            default_modulus(3.0, 2)  # type: ignore  # Invalid type for testing
        with pytest.raises(TypeError):
            field_descriptor(3.0, 1, 2)  # type: ignore  # Invalid type for testing


class TestFrobenius:
    """Test the q-power Frobenius."""

    def test_fixes_base_field(self, f9_i):
        """Frobenius fixes the constant 2."""
        assert frobenius(element(f9_i, 2)) == element(f9_i, 2)

    def test_conjugates_generator(self, f9_i):
        """x^3 = -x when x^2 = -1."""
        x = element(f9_i, (0, 1))
        assert frobenius(x).coefficients == (0, 2)

    def test_order_m(self):
        """The m-fold iterate is the identity."""
        desc = field_descriptor(3, 1, 3)
        for a in enumerate_field(desc):
            b = a
            for _ in range(3):
                b = frobenius(b)
            assert b == a

    @pytest.mark.parametrize("args", [(3, 1, 2), (3, 1, 3), (3, 1, 4), (5, 1, 2)])
    def test_automorphism(self, args):
        """Frobenius respects sums and products on all pairs."""
        desc = field_descriptor(*args)
        GF = field_class(desc)
        x, y = np.meshgrid(np.arange(desc.order), np.arange(desc.order))
        fx, fy = frobenius_matrix(desc, x), frobenius_matrix(desc, y)
        assert np.array_equal(frobenius_matrix(desc, to_codes(GF(x) * GF(y))), to_codes(GF(fx) * GF(fy)))
        assert np.array_equal(frobenius_matrix(desc, to_codes(GF(x) + GF(y))), to_codes(GF(fx) + GF(fy)))

    def test_fixed_field_prime_base(self):
        """Over F_3 the fixed field of F_27 is the constants."""
        desc = field_descriptor(3, 1, 3)
        assert set(base_field_codes(desc).tolist()) == {0, 1, 2}

    def test_fixed_field_matches_embedding(self):
        """With q = 9 the fixed field of F_81 is the embedded F_9."""
        small = field_descriptor(3, 2, 1)
        big = field_descriptor(3, 2, 2)
        assert set(base_field_codes(big).tolist()) == set(embedding_table(small, big).tolist())


class TestEnumeration:
    """Test field enumeration and the multiplicative group."""

    @pytest.mark.parametrize("args,count", [((3, 1, 1), 3), ((3, 1, 2), 9), ((5, 1, 2), 25)])
    def test_counts(self, args, count):
        """Each element is produced exactly once."""
        codes = [a.code for a in enumerate_field(field_descriptor(*args))]
        assert len(codes) == count
        assert len(set(codes)) == count

    def test_bound(self, f9_i):
        """Enumeration refuses fields above the bound."""
        with pytest.raises(BoundExceededError):
            list(enumerate_field(f9_i, bound=5))

    @pytest.mark.parametrize("args", [(3, 1, 2), (3, 1, 4), (5, 1, 2), (3, 2, 2)])
    def test_cyclic_group(self, args):
        """A generator of order q^m - 1 exists."""
        desc = field_descriptor(*args)
        assert multiplicative_order(primitive_element(desc)) == desc.order - 1

    def test_squares(self, f3):
        """1 is a square in F_3 and 2 is not."""
        assert is_square(f3, 1)
        assert not is_square(f3, 2)


class TestMatrixHelpers:
    """Test the vectorised linear algebra over F_q."""

    def test_rref_and_rank(self, f3):
        """A rank-one matrix reduces to a single row."""
        GF = field_class(f3)
        R, pivots = rref(GF, np.array([[2, 1], [1, 2]]))
        assert pivots == (0,)
        assert R.tolist() == [[1, 2]]
        assert rank(GF, np.array([[1, 0], [0, 1]])) == 2

    def test_nullspace(self, f3):
        """Kernel vectors are annihilated."""
        GF = field_class(f3)
        A = np.array([[1, 1, 0]])
        K = nullspace(GF, A)
        assert K.shape == (2, 3)
        assert not mat_mul(GF, A, K.T).any()

    def test_inverse(self, f3):
        """Inverse of an upper unitriangular matrix."""
        GF = field_class(f3)
        inv = inverse(GF, np.array([[1, 1], [0, 1]]))
        assert inv.tolist() == [[1, 2], [0, 1]]

    def test_singular_inverse(self, f3):
        """Singular matrices have no inverse."""
        with pytest.raises(DivisionByZeroError):
            inverse(field_class(f3), np.array([[1, 2], [2, 1]]))

    def test_det(self, f3):
        """Determinants over F_3."""
        GF = field_class(f3)
        assert det(GF, np.array([[1, 2], [2, 1]])) == 0
        assert det(GF, np.array([[1, 1], [0, 2]])) == 2
        assert det(GF, np.array([[0, 1], [1, 0]])) == 2

    def test_solve(self, f3):
        """Row-space coordinates are found, and missing vectors give None."""
        GF = field_class(f3)
        assert solve(GF, np.array([[1, 0, 0], [0, 1, 0]]), np.array([2, 1, 0])).tolist() == [2, 1]
        assert solve(GF, np.array([[1, 0, 0]]), np.array([0, 1, 0])) is None

    def test_nullspace_of_invertible_matrix(self, f3):
        """A full-rank square matrix has a zero kernel."""
        K = nullspace(field_class(f3), np.array([[1, 1], [0, 1]]))
        assert K.shape == (0, 2)

    def test_solve_square(self, f9_i):
        """Over F_9 the square case returns the unique row solution."""
        GF = field_class(f9_i)
        A = np.array([[1, 3], [0, 1]])
        x = solve(GF, A, np.array([1, 0]))
        assert mat_mul(GF, x[None, :], A).tolist() == [[1, 0]]
