"""Exact arithmetic in F_q and its extensions F_{q^m}, with the q-power Frobenius.

Elements are encoded as integers in [0, q^m): the base-p digits of the code are the
coefficients of the element on the polynomial basis 1, x, ..., x^{rm-1}.  This is the
integer representation of galois FieldArrays, so code matrices convert to and from
``field_class(desc)`` arrays without translation and all the linear algebra below runs
on galois.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Optional, Sequence, Tuple, Type

import galois
import numpy as np
import sympy

from src.config import FIELD_ORDER_BOUND
from src.exceptions import (
    BadParametersError,
    BoundExceededError,
    DescriptorMismatchError,
    DivisionByZeroError,
)

logger = logging.getLogger(__name__)

Coefficients = Tuple[int, ...]
CodeMatrix = np.ndarray
FieldClass = Type[galois.FieldArray]


@dataclass(frozen=True)
class FieldDescriptor:
    """F_{q^m} with q = p^r, presented as F_p[x]/(modulus)."""

    p: int
    r: int
    m: int
    modulus: Coefficients  # monic, lowest degree first

    @property
    def q(self) -> int:
        return int(self.p**self.r)

    @property
    def degree(self) -> int:
        return self.r * self.m

    @property
    def order(self) -> int:
        return int(self.p**self.degree)

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "m": self.m, "modulus": list(self.modulus)}


def _poly(modulus: Sequence[int], p: int) -> galois.Poly:
    return galois.Poly(list(reversed(modulus)), field=galois.GF(p))


@lru_cache(maxsize=None)
def _primitive_modulus(p: int, degree: int) -> Coefficients:
    poly = galois.primitive_poly(p, degree)
    return tuple(int(c) for c in reversed(poly.coeffs))


def default_modulus(p: int, degree: int) -> Coefficients:
    """Smallest monic primitive polynomial of the given degree over F_p.

    "Smallest" orders the lower coefficients as a base-p number, which makes the choice
    reproducible across runs.

    Raises:
        TypeError: If p or degree is not an int
    """
    if not isinstance(p, int) or not isinstance(degree, int):
        raise TypeError(f"p and degree must be int, got {type(p).__name__}, {type(degree).__name__}")
    return _primitive_modulus(p, degree)


def field_descriptor(
    p: int,
    r: int = 1,
    m: int = 1,
    modulus: Optional[Coefficients] = None,
    bound: int = FIELD_ORDER_BOUND,
) -> FieldDescriptor:
    """Build the descriptor of F_{q^m}, q = p^r.

    Args:
        p: Odd prime
        r: Degree of F_q over F_p
        m: Degree of F_{q^m} over F_q
        modulus: Optional explicit monic irreducible modulus of degree r*m
        bound: Largest admissible field order

    Returns:
        Validated FieldDescriptor

    Raises:
        BadParametersError: If p is not an odd prime or the modulus is invalid
        BoundExceededError: If q^m exceeds the bound
        TypeError: If the parameters are not integers

    Example:
        >>> field_descriptor(3, 1, 2).order
        9
    """
    for name, value in (("p", p), ("r", r), ("m", m)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise TypeError(f"{name} must be int, got {type(value).__name__}")
    if p == 2 or not sympy.isprime(p):
        raise BadParametersError(f"p must be an odd prime, got {p}", {"p": p})
    if r < 1 or m < 1:
        raise BadParametersError(f"r and m must be positive, got r={r}, m={m}")
    if p ** (r * m) > bound:
        raise BoundExceededError(
            f"Field order {p}^{r * m} exceeds bound {bound}", {"p": p, "r": r, "m": m}
        )
    degree = r * m
    if modulus is None:
        modulus = default_modulus(p, degree)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != degree + 1 or modulus[-1] != 1:
            raise BadParametersError(f"Modulus must be monic of degree {degree}")
        if not _poly(modulus, p).is_irreducible():
            raise BadParametersError(f"Modulus {modulus} is reducible over F_{p}")
    return FieldDescriptor(p=p, r=r, m=m, modulus=modulus)


@lru_cache(maxsize=None)
def field_class(desc: FieldDescriptor) -> FieldClass:
    """The galois FieldArray class of F_{q^m} in the descriptor's presentation."""
    logger.debug("Building galois field F_%d^%d", desc.p, desc.degree)
    if desc.degree == 1:
        return galois.GF(desc.p)
    return galois.GF(desc.order, irreducible_poly=_poly(desc.modulus, desc.p))


def to_codes(x: galois.FieldArray) -> CodeMatrix:
    return np.asarray(x.view(np.ndarray), dtype=np.int64)


@dataclass(frozen=True)
class FieldElement:
    """Element of F_{q^m} in canonical code form."""

    desc: FieldDescriptor
    code: int

    @property
    def value(self) -> galois.FieldArray:
        return field_class(self.desc)(self.code)

    @property
    def coefficients(self) -> Coefficients:
        return tuple(int(c) for c in reversed(self.value.vector()))

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"Expected FieldElement, got {type(other).__name__}")
        if other.desc != self.desc:
            raise DescriptorMismatchError("Field elements from different descriptors")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "add")

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "sub")

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, other, "mul")

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return field_arith(self, field_arith(other, None, "inv"), "mul")

    def __neg__(self) -> "FieldElement":
        return field_arith(self, None, "neg")

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return field_arith(self, None, "inv") ** (-e)
        return FieldElement(self.desc, int(self.value**e))

    def __repr__(self) -> str:
        return f"FieldElement({self.coefficients})"


def element(desc: FieldDescriptor, value: object) -> FieldElement:
    """Build an element from an integer (read mod p) or a coefficient vector."""
    if isinstance(value, int):
        return FieldElement(desc, value % desc.p)
    if isinstance(value, (list, tuple)):
        coeffs = [int(c) % desc.p for c in value]
        if len(coeffs) > desc.degree:
            raise BadParametersError(f"Too many coefficients for degree {desc.degree}")
        padded = coeffs + [0] * (desc.degree - len(coeffs))
        return FieldElement(desc, int(field_class(desc).Vector(list(reversed(padded)))))
    raise TypeError(f"Cannot build a field element from {type(value).__name__}")


def field_arith(a: FieldElement, b: Optional[FieldElement], op: str) -> FieldElement:
    """Apply one field operation.

    Args:
        a: First operand
        b: Second operand (ignored for inv and neg)
        op: One of "add", "sub", "mul", "inv", "neg"

    Returns:
        Canonical result

    Raises:
        DescriptorMismatchError: If the operands live in different fields
        DivisionByZeroError: If zero is inverted
        ValueError: If op is unknown

    Example:
        >>> F3 = field_descriptor(3)
        >>> field_arith(element(F3, 2), element(F3, 2), "add").code
        1
    """
    if op == "inv":
        if a.code == 0:
            raise DivisionByZeroError("Inverse of zero")
        return FieldElement(a.desc, int(np.reciprocal(a.value)))
    if op == "neg":
        return FieldElement(a.desc, int(-a.value))
    if b is None:
        raise ValueError(f"Operation {op} needs two operands")
    a._check(b)
    if op == "add":
        return FieldElement(a.desc, int(a.value + b.value))
    if op == "sub":
        return FieldElement(a.desc, int(a.value - b.value))
    if op == "mul":
        return FieldElement(a.desc, int(a.value * b.value))
    raise ValueError(f"Unknown field operation: {op}")


def frobenius(a: FieldElement, times: int = 1) -> FieldElement:
    """Return a^(q^times); negative `times` applies the inverse."""
    return FieldElement(a.desc, int(a.value ** (a.desc.q ** (times % a.desc.m))))


def enumerate_field(desc: FieldDescriptor, bound: int = FIELD_ORDER_BOUND) -> Iterator[FieldElement]:
    """Yield every element of F_{q^m} once, by increasing code.

    Raises:
        BoundExceededError: If q^m exceeds the bound
    """
    if desc.order > bound:
        raise BoundExceededError(f"Field of order {desc.order} exceeds bound {bound}")
    for code in range(desc.order):
        yield FieldElement(desc, code)


def primitive_element(desc: FieldDescriptor) -> FieldElement:
    return FieldElement(desc, int(field_class(desc).primitive_element))


def multiplicative_order(a: FieldElement) -> int:
    if a.code == 0:
        raise DivisionByZeroError("Zero has no multiplicative order")
    return int(a.value.multiplicative_order())


def is_square(desc: FieldDescriptor, code: int) -> bool:
    return bool(field_class(desc)(code).is_square())


@lru_cache(maxsize=None)
def embedding_table(small: FieldDescriptor, big: FieldDescriptor) -> np.ndarray:
    """Codes in `big` of the elements of `small` under a fixed embedding.

    For a prime `small` the embedding is the identity on constants.  Otherwise the
    generator x of `small` goes to the smallest-code root of its modulus in `big`.
    """
    if small.p != big.p or big.degree % small.degree != 0:
        raise DescriptorMismatchError("No embedding between these fields")
    if small.degree == 1:
        return np.arange(small.order, dtype=np.int64)
    GF = field_class(big)
    root = GF(int(to_codes(galois.Poly(list(reversed(small.modulus)), field=GF).roots()).min()))
    # rows of `digits` hold the coefficients of each small element, lowest degree first
    digits = to_codes(field_class(small).elements.vector())[:, ::-1]
    powers = GF([int(root**i) for i in range(small.degree)])
    return to_codes(GF(digits) @ powers)


def embed_base(big: FieldDescriptor, a: FieldElement) -> FieldElement:
    """Embed an element of a subfield into `big`."""
    return FieldElement(big, int(embedding_table(a.desc, big)[a.code]))


def base_field_codes(desc: FieldDescriptor) -> np.ndarray:
    """Codes of the Frobenius-fixed subfield F_q inside F_{q^m}."""
    x = field_class(desc).elements
    return np.nonzero(x**desc.q == x)[0]


# Matrix helpers over F_{q^m}; matrices are int64 arrays of element codes.


def mat_mul(GF: FieldClass, A: CodeMatrix, B: CodeMatrix) -> CodeMatrix:
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    return to_codes(GF(A) @ GF(B))


def rref(GF: FieldClass, A: CodeMatrix) -> Tuple[CodeMatrix, Tuple[int, ...]]:
    """Reduced row echelon form; zero rows dropped.

    Returns:
        Tuple of the reduced matrix and its pivot columns
    """
    R = np.atleast_2d(np.asarray(A, dtype=np.int64))
    if R.size == 0:
        return R[:0], ()
    R = to_codes(GF(R).row_reduce())
    R = R[R.any(axis=1)]
    return R, tuple(int(np.flatnonzero(row)[0]) for row in R)


def rank(GF: FieldClass, A: CodeMatrix) -> int:
    if np.size(A) == 0:
        return 0
    return int(np.linalg.matrix_rank(GF(np.atleast_2d(A))))


def nullspace(GF: FieldClass, A: CodeMatrix, cols: Optional[int] = None) -> CodeMatrix:
    """Basis (as rows, in rref) of the right kernel {x : A x = 0}."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    ncols = A.shape[1] if cols is None else cols
    if A.shape[0] == 0 or A.size == 0:
        return np.eye(ncols, dtype=np.int64)
    K = to_codes(GF(A).null_space())
    if K.shape[0] == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    return rref(GF, K)[0]


def inverse(GF: FieldClass, A: CodeMatrix) -> CodeMatrix:
    try:
        return to_codes(np.linalg.inv(GF(A)))
    except (np.linalg.LinAlgError, ZeroDivisionError) as e:
        raise DivisionByZeroError("Matrix is singular") from e


def det(GF: FieldClass, A: CodeMatrix) -> int:
    """Determinant code of a square matrix."""
    if np.shape(A)[0] == 0:
        return 1
    return int(np.linalg.det(GF(A)))


def lift_matrix(small: FieldDescriptor, big: FieldDescriptor, A: CodeMatrix) -> CodeMatrix:
    """Entrywise embedding of a matrix over a subfield."""
    return embedding_table(small, big)[np.asarray(A, dtype=np.int64)]


def solve(GF: FieldClass, A: CodeMatrix, b: CodeMatrix) -> Optional[CodeMatrix]:
    """One solution x of x A = b (row convention), or None when b is not in the row space.

    A need not be square, so this reads x off the reduced form of [A^T | b^T] instead of
    calling np.linalg.solve.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    b = np.asarray(b, dtype=np.int64).reshape(1, -1)
    k = A.shape[0]
    if A.shape == (A.shape[1], A.shape[1]) and rank(GF, A) == k:
        return to_codes(np.linalg.solve(GF(A.T), GF(b[0])))
    R, pivots = rref(GF, np.concatenate([A.T, b.T], axis=1))
    if k in pivots:
        return None
    x = np.zeros(k, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = R[row, k]
    return x


def frobenius_matrix(desc: FieldDescriptor, A: CodeMatrix, times: int = 1) -> CodeMatrix:
    """Entrywise q-power Frobenius; negative `times` applies the inverse."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return A
    return to_codes(field_class(desc)(A) ** (desc.q ** (times % desc.m)))


def enumerate_echelon(desc: FieldDescriptor, d: int, dim: int) -> Iterator[CodeMatrix]:
    """Yield every d-dimensional subspace of F^dim once, as its reduced echelon matrix.

    Pivot patterns come in lexicographic order, free entries in code order.
    """
    if d < 0 or d > dim:
        return
    if d == 0:
        yield np.zeros((0, dim), dtype=np.int64)
        return
    for pivots in combinations(range(dim), d):
        pivot_set = set(pivots)
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, dim) if c not in pivot_set]
        for values in product(range(desc.order), repeat=len(free)):
            M = np.zeros((d, dim), dtype=np.int64)
            for i, pc in enumerate(pivots):
                M[i, pc] = 1
            for (i, c), v in zip(free, values):
                M[i, c] = v
            yield M


def gaussian_binomial(n: int, k: int, Q: int) -> int:
    """Number of k-dimensional subspaces of F_Q^n."""
    if k < 0 or k > n:
        return 0
    num, den = 1, 1
    for i in range(k):
        num *= Q ** (n - i) - 1
        den *= Q ** (i + 1) - 1
    return num // den
