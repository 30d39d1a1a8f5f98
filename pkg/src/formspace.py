"""Finite form spaces attached to vertex lattices and their subspaces.

V_Λ = Λ^♯ / Λ carries the symplectic form <x, y> = π·h(x̃, ỹ) mod π and
V_{Λ^♯} = π^{-1}Λ / Λ^♯ the symmetric form (x, y) = p·h(x̃, ỹ) mod π.  Subspaces over
F_{q^m} are kept as reduced echelon matrices of field codes.
"""

import logging
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from enum import Enum
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from src.chainring import divide_by_pi_power, pi_valuation, residue
from src.config import GRASSMANNIAN_CAP
from src.exceptions import (
    BadParametersError,
    BoundExceededError,
    NotSandwichedError,
    NotVertexError,
    SpaceMismatchError,
    WindowOverflowError,
    ZeroDimError,
    ZeroTypeError,
)
from src.gf import (
    FieldDescriptor,
    det,
    embedding_table,
    enumerate_echelon,
    field_descriptor,
    frobenius_matrix,
    gaussian_binomial,
    is_square,
    mat_mul,
    nullspace,
    rank,
    field_class,
    rref,
)
from src.lattices import (
    LatticeModule,
    SandwichQuotient,
    extend,
    fits_window,
    hermitian_dual,
    hermitian_pairing,
    is_vertex,
    lattice_type,
    scale_by_pi,
)

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, ...], ...]


class FormKind(Enum):
    """Kind of the bilinear form on a quotient."""

    SYMPLECTIC = "symplectic"
    ORTHOGONAL = "orthogonal"


class OrthogonalType(Enum):
    """Isometry type of a nondegenerate symmetric form over a finite field."""

    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


# offset δ in the isotropic subspace count for each orthogonal type
_TYPE_OFFSET = {OrthogonalType.HYPERBOLIC: 0, OrthogonalType.PARABOLIC: 1, OrthogonalType.ELLIPTIC: 2}


@dataclass(frozen=True)
class FormSpace:
    """A nondegenerate symplectic or symmetric space over F_q."""

    kind: FormKind
    dim: int
    gram: Matrix
    field: FieldDescriptor
    n: Optional[int] = None
    lattice: Optional[LatticeModule] = None
    quotient: Optional[SandwichQuotient] = dataclass_field(default=None, compare=False, hash=False, repr=False)

    @property
    def gram_matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64).reshape(self.dim, self.dim)

    @property
    def t(self) -> int:
        """Half the type of the anchoring vertex lattice."""
        if self.kind is FormKind.SYMPLECTIC:
            return self.dim // 2
        if self.n is None:
            raise BadParametersError("Orthogonal space has no ambient dimension to recover t")
        return (self.n - self.dim) // 2


@dataclass(frozen=True)
class Subspace:
    """Reduced echelon presentation of a subspace of a form space at level m."""

    space: FormSpace
    m: int
    basis: Matrix

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(len(self.basis), self.space.dim)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, m={self.m}, basis={self.basis})"


def level_field(space: FormSpace, m: int) -> FieldDescriptor:
    base = space.field
    return field_descriptor(base.p, base.r, m)


def gram_at_level(space: FormSpace, m: int) -> np.ndarray:
    """Gram matrix with entries embedded in F_{q^m}.

    Raises:
        TypeError: If m is not an int
    """
    if not isinstance(m, int) or isinstance(m, bool):
        raise TypeError(f"m must be int, got {type(m).__name__}")
    return _gram_at_level(space, m)


@lru_cache(maxsize=None)
def _gram_at_level(space: FormSpace, m: int) -> np.ndarray:
    return embedding_table(space.field, level_field(space, m))[space.gram_matrix]


def _as_matrix(rows: Union[np.ndarray, Sequence[Sequence[int]]], dim: int) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, dim), dtype=np.int64)
    return np.atleast_2d(arr)


def make_subspace(space: FormSpace, m: int, rows: Union[np.ndarray, Sequence[Sequence[int]]]) -> Subspace:
    """Row span of `rows` (codes in F_{q^m}) as a canonical Subspace."""
    arr = _as_matrix(rows, space.dim)
    if arr.shape[0]:
        arr, _ = rref(field_class(level_field(space, m)), arr)
    return Subspace(space, m, tuple(tuple(int(c) for c in row) for row in arr))


def whole_space(space: FormSpace, m: int) -> Subspace:
    return make_subspace(space, m, np.eye(space.dim, dtype=np.int64))


def zero_subspace(space: FormSpace, m: int) -> Subspace:
    return Subspace(space, m, ())


def _check_pair(U: Subspace, W: Subspace) -> None:
    if U.space != W.space or U.m != W.m:
        raise SpaceMismatchError("Subspaces of different spaces or levels")


def dual(U: Subspace) -> Subspace:
    """U^⊥ with respect to the form."""
    sp = U.space
    GF = field_class(level_field(sp, U.m))
    if U.dim == 0:
        return whole_space(sp, U.m)
    return make_subspace(sp, U.m, nullspace(GF, mat_mul(GF, U.matrix, gram_at_level(sp, U.m)), sp.dim))


def frobenius(U: Subspace, times: int = 1) -> Subspace:
    """Φ^times(U), entrywise q-power; negative `times` inverts."""
    return make_subspace(U.space, U.m, frobenius_matrix(level_field(U.space, U.m), U.matrix, times))


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    _check_pair(U, W)
    return make_subspace(U.space, U.m, np.concatenate([U.matrix, W.matrix], axis=0))


def intersect(U: Subspace, W: Subspace) -> Subspace:
    """U ∩ W as the common kernel of the annihilators."""
    _check_pair(U, W)
    GF = field_class(level_field(U.space, U.m))
    dim = U.space.dim
    ann = [nullspace(GF, X.matrix, dim) if X.dim else np.zeros((0, dim), dtype=np.int64) for X in (U, W)]
    stacked = np.concatenate(ann, axis=0)
    if stacked.shape[0] == 0:
        return whole_space(U.space, U.m)
    return make_subspace(U.space, U.m, nullspace(GF, stacked, dim))


def contains(U: Subspace, W: Subspace) -> bool:
    """True iff W ⊆ U."""
    _check_pair(U, W)
    if W.dim == 0:
        return True
    GF = field_class(level_field(U.space, U.m))
    return rank(GF, np.concatenate([U.matrix, W.matrix], axis=0)) == U.dim


def subspace_ops(U: Subspace, W: Optional[Subspace], op: str) -> Union[Subspace, bool]:
    """Dispatch one of "intersect", "sum", "dual", "frobenius", "contains".

    Raises:
        SpaceMismatchError: If U and W live in different spaces or levels
        ValueError: If op is unknown
    """
    if op == "dual":
        return dual(U)
    if op == "frobenius":
        return frobenius(U)
    if W is None:
        raise ValueError(f"Operation {op} needs two subspaces")
    if op == "intersect":
        return intersect(U, W)
    if op == "sum":
        return subspace_sum(U, W)
    if op == "contains":
        return contains(U, W)
    raise ValueError(f"Unknown subspace operation: {op}")


def is_isotropic(U: Subspace) -> bool:
    if U.dim == 0:
        return True
    GF = field_class(level_field(U.space, U.m))
    B = U.matrix
    return not mat_mul(GF, mat_mul(GF, B, gram_at_level(U.space, U.m)), B.T).any()


def is_rational(U: Subspace) -> bool:
    return frobenius(U) == U


# Enumeration


def enumerate_subspaces(space: FormSpace, m: int, d: int, constraint: str = "any") -> Iterator[Subspace]:
    """Yield each d-subspace (or isotropic d-subspace) over F_{q^m} once, in echelon order.

    Raises:
        BoundExceededError: If the Gaussian binomial exceeds the cap
        ValueError: If constraint is unknown
    """
    Q = level_field(space, m).order
    candidates = gaussian_binomial(space.dim, d, Q)
    if candidates > GRASSMANNIAN_CAP:
        raise BoundExceededError(
            f"Grassmannian Gr({d}, {space.dim}) over F_{Q} has {candidates} points, above {GRASSMANNIAN_CAP}",
            {"d": d, "dim": space.dim, "Q": Q},
        )
    if constraint == "any":
        for M in enumerate_echelon(level_field(space, m), d, space.dim):
            yield Subspace(space, m, tuple(tuple(int(c) for c in row) for row in M))
    elif constraint == "isotropic":
        yield from _isotropic_echelon(space, m, d)
    else:
        raise ValueError(f"Unknown subspace constraint: {constraint}")


def _isotropic_echelon(space: FormSpace, m: int, d: int) -> Iterator[Subspace]:
    """Echelon enumeration that prunes as soon as a new row breaks isotropy."""
    dim = space.dim
    if d > dim:
        return
    if d == 0:
        yield Subspace(space, m, ())
        return
    desc = level_field(space, m)
    GF = field_class(desc)
    G = gram_at_level(space, m)

    def pairing(x: np.ndarray, y: np.ndarray) -> int:
        return int(mat_mul(GF, mat_mul(GF, x[None, :], G), y[:, None])[0, 0])

    for pivots in combinations(range(dim), d):
        pivot_set = set(pivots)

        def extend_rows(rows: List[np.ndarray]) -> Iterator[List[np.ndarray]]:
            i = len(rows)
            if i == d:
                yield rows
                return
            pc = pivots[i]
            free = [c for c in range(pc + 1, dim) if c not in pivot_set]
            for values in product(range(desc.order), repeat=len(free)):
                row = np.zeros(dim, dtype=np.int64)
                row[pc] = 1
                row[free] = values
                if pairing(row, row) != 0:
                    continue
                if any(pairing(prev, row) != 0 for prev in rows):
                    continue
                yield from extend_rows(rows + [row])

        for rows in extend_rows([]):
            yield Subspace(space, m, tuple(tuple(int(c) for c in r) for r in rows))


def projective_count(dim: int, Q: int) -> int:
    """|P^{dim-1}(F_Q)|; zero for dim ≤ 0."""
    if dim <= 0:
        return 0
    return (Q**dim - 1) // (Q - 1)


def discriminant(space: FormSpace) -> int:
    """Determinant code of the Gram matrix over F_q."""
    return det(field_class(space.field), space.gram_matrix)


def orthogonal_type(space: FormSpace, m: int = 1) -> OrthogonalType:
    """Hyperbolic or elliptic for even dimension (by the signed discriminant), else parabolic."""
    if space.kind is not FormKind.ORTHOGONAL:
        raise SpaceMismatchError("Only orthogonal spaces have an orthogonal type")
    if space.dim % 2:
        return OrthogonalType.PARABOLIC
    desc = level_field(space, m)
    GF = field_class(desc)
    d = int(embedding_table(space.field, desc)[discriminant(space)])
    if (space.dim // 2) % 2:
        d = int(-GF(d))
    return OrthogonalType.HYPERBOLIC if is_square(desc, d) else OrthogonalType.ELLIPTIC


def witt_index(space: FormSpace, m: int = 1) -> int:
    if space.kind is FormKind.SYMPLECTIC:
        return space.dim // 2
    kind = orthogonal_type(space, m)
    if kind is OrthogonalType.ELLIPTIC:
        return space.dim // 2 - 1
    return space.dim // 2


def isotropic_count(space: FormSpace, m: int, d: int) -> int:
    """Closed count of isotropic d-subspaces over F_{q^m}.

    Example:
        >>> isotropic_count(standard_symplectic(4, field_descriptor(3)), 1, 1)
        40
    """
    Q = level_field(space, m).order
    if space.kind is FormKind.SYMPLECTIC:
        t = space.dim // 2
        count = gaussian_binomial(t, d, Q)
        for i in range(d):
            count *= Q ** (t - i) + 1
        return count
    kind = orthogonal_type(space, m)
    w = witt_index(space, m)
    delta = _TYPE_OFFSET[kind]
    count = gaussian_binomial(w, d, Q)
    for i in range(d):
        count *= Q ** (w - i - 1 + delta) + 1
    return count


# Spaces


def standard_symplectic(dim: int, base: FieldDescriptor) -> FormSpace:
    """Symplectic space with e_i paired to e_{dim+1-i}."""
    if dim <= 0 or dim % 2:
        raise BadParametersError(f"Symplectic dimension must be positive and even, got {dim}")
    GF = field_class(base)
    gram = [[0] * dim for _ in range(dim)]
    for i in range(dim):
        gram[i][dim - 1 - i] = 1 if i < dim // 2 else int(-GF(1))
    return FormSpace(FormKind.SYMPLECTIC, dim, tuple(tuple(r) for r in gram), base)


def standard_orthogonal(dim: int, base: FieldDescriptor, n: Optional[int] = None) -> FormSpace:
    """Orthogonal space with antidiagonal unit Gram matrix."""
    if dim <= 0:
        raise ZeroDimError(f"Orthogonal dimension must be positive, got {dim}")
    gram = tuple(tuple(1 if i + j == dim - 1 else 0 for j in range(dim)) for i in range(dim))
    return FormSpace(FormKind.ORTHOGONAL, dim, gram, base, n=n)


def _form_digit(quotient: SandwichQuotient, digit: int) -> Matrix:
    amb = quotient.ambient
    GF = field_class(quotient.field)
    sign_negative = amb.a % 2 == 1
    gram = []
    for x in quotient.lifts:
        row = []
        for y in quotient.lifts:
            s = hermitian_pairing(amb, x, y)
            if pi_valuation(s) < digit:
                raise NotVertexError("Form value is not integral on the quotient")
            code = residue(divide_by_pi_power(s, digit))
            row.append(int(-GF(code)) if sign_negative else code)
        gram.append(tuple(row))
    return tuple(gram)


@lru_cache(maxsize=1024)
def symplectic_quotient(lattice: LatticeModule) -> FormSpace:
    """V_Λ = Λ^♯/Λ with <x, y> = π h(x̃, ỹ) mod π.

    Raises:
        NotVertexError: If Λ is not a vertex lattice
        ZeroTypeError: If Λ has type 0
    """
    if lattice.ambient.m != 1:
        raise BadParametersError("Quotient spaces are built from rational lattices")
    if not is_vertex(lattice):
        raise NotVertexError("Symplectic quotient needs a vertex lattice")
    if lattice_type(lattice) == 0:
        raise ZeroTypeError("Type-0 lattice has a zero symplectic quotient")
    quotient = SandwichQuotient(lattice, hermitian_dual(lattice))
    gram = _form_digit(quotient, lattice.ambient.K - 1)
    return FormSpace(FormKind.SYMPLECTIC, quotient.dim, gram, quotient.field, lattice.ambient.n, lattice, quotient)


@lru_cache(maxsize=1024)
def orthogonal_quotient(lattice: LatticeModule) -> FormSpace:
    """V_{Λ^♯} = π^{-1}Λ/Λ^♯ with (x, y) = p h(x̃, ỹ) mod π.

    Raises:
        NotVertexError: If Λ is not a vertex lattice
        ZeroDimError: If Λ has type n
        WindowOverflowError: If π^{-1}Λ leaves the window
    """
    if lattice.ambient.m != 1:
        raise BadParametersError("Quotient spaces are built from rational lattices")
    if not is_vertex(lattice):
        raise NotVertexError("Orthogonal quotient needs a vertex lattice")
    if lattice_type(lattice) == lattice.ambient.n:
        raise ZeroDimError("Orthogonal quotient of a type-n lattice is zero")
    if not fits_window(lattice, -1):
        raise WindowOverflowError("π^{-1}Λ leaves the window")
    quotient = SandwichQuotient(hermitian_dual(lattice), scale_by_pi(lattice, -1))
    gram = _form_digit(quotient, lattice.ambient.K - 2)
    return FormSpace(FormKind.ORTHOGONAL, quotient.dim, gram, quotient.field, lattice.ambient.n, lattice, quotient)


@lru_cache(maxsize=1024)
def quotient_at_level(space: FormSpace, m: int) -> SandwichQuotient:
    """The lattice quotient behind `space`, base-changed to level m."""
    if space.quotient is None:
        raise BadParametersError("Form space does not come from a lattice")
    base = space.quotient
    if m == 1:
        return base
    return SandwichQuotient(extend(base.lower, m), extend(base.upper, m))


def lattice_of_subspace(lattice: LatticeModule, U: Subspace) -> LatticeModule:
    """Preimage of U in Λ^♯ (symplectic) or π^{-1}Λ (orthogonal) at the level of U.

    Raises:
        NotSandwichedError: If U does not belong to a quotient of this lattice
    """
    if U.space.lattice != lattice:
        raise NotSandwichedError("Subspace does not live in a quotient of this lattice")
    return quotient_at_level(U.space, U.m).preimage(U.matrix)


def subspace_of_lattice(lattice: LatticeModule, M: LatticeModule, kind: FormKind = FormKind.SYMPLECTIC) -> Subspace:
    """Image of a sandwiched lattice M in the quotient of Λ of the given kind.

    Raises:
        NotSandwichedError: If M is not between the quotient's lattices
    """
    space = symplectic_quotient(lattice) if kind is FormKind.SYMPLECTIC else orthogonal_quotient(lattice)
    m = M.ambient.m
    return make_subspace(space, m, quotient_at_level(space, m).image(M))


# Serialization


def space_to_json(space: FormSpace) -> dict:
    data = {
        "kind": space.kind.value,
        "dim": space.dim,
        "q": space.field.q,
        "m": space.field.m,
        "gram": [list(r) for r in space.gram],
        "discriminant": discriminant(space),
    }
    if space.kind is FormKind.ORTHOGONAL:
        data["orthogonal_type"] = orthogonal_type(space).value
    return data


def space_from_json(data: dict) -> FormSpace:
    """Rebuild a stand-alone space (without lattice provenance).

    Raises:
        ValueError: If a key is missing or q is not a prime power
    """
    missing = [key for key in ("kind", "dim", "q", "gram") if key not in data]
    if missing:
        raise ValueError(f"Missing form space keys: {', '.join(missing)}")
    q = int(data["q"])

    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise ValueError(f"q must be a prime power, got {q}")
    (p, r), = factors.items()
    gram = tuple(tuple(int(c) for c in row) for row in data["gram"])
    return FormSpace(FormKind(data["kind"]), int(data["dim"]), gram, field_descriptor(int(p), int(r)))


def subspace_to_json(U: Subspace) -> dict:
    return {"dim": U.dim, "m": U.m, "basis": [list(r) for r in U.basis]}


def subspace_from_json(space: FormSpace, data: dict) -> Subspace:
    return make_subspace(space, int(data.get("m", 1)), data["basis"])
