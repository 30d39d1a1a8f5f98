"""O_F-lattices in the split hermitian space C = F^n, inside a precision window.

A lattice L with π^a Λ₀ ⊆ L ⊆ π^{-a} Λ₀ is stored through the module L / π^a Λ₀ of
(π^{-a} Λ₀) / (π^a Λ₀) ≅ (O_F / π^{2a})^n: a vector x is recorded as y = π^a x mod π^{2a}.
Submodules are kept in Howell normal form, so equality of lattices is equality of rows.

The hermitian form is h(x, x') = conj(x)^T H x' with H the antidiagonal unit matrix; in
window coordinates h(x, x') = (-1)^a π^{-2a} conj(y)^T H y'.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.chainring import (
    INFINITY,
    ChainRingDescriptor,
    ChainRingElement,
    conjugate,
    divide_by_pi_power,
    from_residue,
    multiply_by_pi,
    one,
    pi_valuation,
    residue,
    ring_descriptor,
    ring_element,
    sigma,
    sigma_inverse,
    truncate,
    unit_inverse,
    zero,
)
from src.config import (
    GRASSMANNIAN_CAP,
    HOWELL_TABLEAU_BOUND,
    MAX_VERTEX_RANK,
    MAX_VERTEX_WINDOW,
    VERTEX_PRIMES,
)
from src.exceptions import (
    BadParametersError,
    BoundExceededError,
    DescriptorMismatchError,
    NotIntegralError,
    NotRationalError,
    NotSandwichedError,
    NotVertexError,
    PiModularExcludedError,
    WindowOverflowError,
)
from src.gf import FieldDescriptor, enumerate_echelon, field_class, gaussian_binomial, rref

logger = logging.getLogger(__name__)

Row = Tuple[ChainRingElement, ...]
Pivot = Tuple[int, int]  # (column, π-valuation of the pivot entry)
LatticeKey = Tuple[Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...], ...]


@dataclass(frozen=True)
class HermitianAmbient:
    """The split hermitian space F^n with window exponent a, at coefficient level m."""

    n: int
    a: int
    ring: ChainRingDescriptor

    @property
    def K(self) -> int:
        """π-adic precision of window coordinates."""
        return 2 * self.a

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def m(self) -> int:
        return self.ring.m

    @property
    def residue_field(self) -> FieldDescriptor:
        return self.ring.residue_field

    @property
    def gram(self) -> Tuple[Row, ...]:
        """Antidiagonal unit Gram matrix."""
        n = self.n
        return tuple(
            tuple(one(self.ring) if i + j == n - 1 else zero(self.ring) for j in range(n))
            for i in range(n)
        )

    def at_level(self, m: int) -> "HermitianAmbient":
        return hermitian_ambient(self.n, self.a, self.p, m)


def hermitian_ambient(n: int, a: int, p: int, m: int = 1) -> HermitianAmbient:
    """Validated ambient space with ring precision N = 2a + 2.

    Raises:
        BadParametersError: If n < 3 or a < 1
        TypeError: If n, a, p or m is not an int
    """
    for name, value in (("n", n), ("a", a), ("p", p), ("m", m)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise TypeError(f"{name} must be int, got {type(value).__name__}")
    return _hermitian_ambient(n, a, p, m)


@lru_cache(maxsize=None)
def _hermitian_ambient(n: int, a: int, p: int, m: int) -> HermitianAmbient:
    if n < 3:
        raise BadParametersError(f"n must be at least 3, got {n}", {"n": n})
    if a < 1:
        raise BadParametersError(f"Window exponent must be positive, got {a}", {"a": a})
    return HermitianAmbient(n=n, a=a, ring=ring_descriptor(p, 2 * a + 2, m))


def check_splitting_level(n: int, h: int) -> None:
    """Validate 0 ≤ h ≤ ⌊n/2⌋ outside the π-modular case.

    Raises:
        PiModularExcludedError: If n is even and 2h = n
        BadParametersError: If h is out of range
    """
    if h < 0 or 2 * h > n:
        raise BadParametersError(f"h must lie in [0, {n // 2}], got {h}", {"n": n, "h": h})
    if n % 2 == 0 and 2 * h == n:
        raise PiModularExcludedError("π-modular case excluded", {"n": n, "h": h})


# Row arithmetic modulo π^K


def _is_zero_row(row: Sequence[ChainRingElement]) -> bool:
    return all(e.is_zero() for e in row)


def _truncate_row(row: Sequence[ChainRingElement], K: int) -> Row:
    return tuple(truncate(e, K) for e in row)


def _scale_row(c: ChainRingElement, row: Row, K: int) -> Row:
    return tuple(truncate(c * e, K) for e in row)


def _axpy(row: Row, c: ChainRingElement, other: Row, K: int) -> Row:
    """row - c * other."""
    return tuple(truncate(x - c * y, K) for x, y in zip(row, other))


def howell_form(rows: Sequence[Sequence[ChainRingElement]], K: int) -> Tuple[Tuple[Row, ...], Tuple[Pivot, ...]]:
    """Howell normal form of the submodule of (R/π^K)^c generated by `rows`.

    Each pivot entry is exactly π^v; entries above a pivot are canonical residues mod
    π^v; zero rows are dropped.  Two generating sets give the same output iff they
    generate the same submodule.

    Args:
        rows: Generators, all of the same length
        K: Working precision

    Returns:
        Tuple of the normal-form rows and their (column, valuation) pivots
    """
    pending: List[Row] = [_truncate_row(r, K) for r in rows]
    pending = [r for r in pending if not _is_zero_row(r)]
    if not pending:
        return (), ()
    ncols = len(pending[0])
    out_rows: List[Row] = []
    pivots: List[Pivot] = []
    for c in range(ncols):
        best, best_v = -1, INFINITY
        for idx, r in enumerate(pending):
            v = pi_valuation(r[c])
            if v < best_v:
                best, best_v = idx, v
        if best < 0:
            continue
        v = int(best_v)
        row = pending.pop(best)
        row = _scale_row(unit_inverse(divide_by_pi_power(row[c], v)), row, K)
        survivors: List[Row] = []
        for r in pending:
            if not r[c].is_zero():
                r = _axpy(r, divide_by_pi_power(r[c], v), row, K)
            if not _is_zero_row(r):
                survivors.append(r)
        if v > 0:
            annihilated = tuple(truncate(multiply_by_pi(e, K - v), K) for e in row)
            if not _is_zero_row(annihilated):
                survivors.append(annihilated)
        pending = survivors
        out_rows.append(row)
        pivots.append((c, v))
    for i, (c, v) in enumerate(pivots):
        for j in range(i):
            e = out_rows[j][c]
            canon = truncate(e, v)
            if canon != e:
                out_rows[j] = _axpy(out_rows[j], divide_by_pi_power(e - canon, v), out_rows[i], K)
    return tuple(out_rows), tuple(pivots)


def reduce_vector(rows: Sequence[Row], pivots: Sequence[Pivot], x: Sequence[ChainRingElement], K: int) -> Row:
    """Normal form of x modulo the span of a Howell form; zero iff x is in the span."""
    out = _truncate_row(x, K)
    for row, (c, v) in zip(rows, pivots):
        e = out[c]
        canon = truncate(e, v)
        if canon != e:
            out = _axpy(out, divide_by_pi_power(e - canon, v), row, K)
    return out


def left_kernel(matrix: Sequence[Sequence[ChainRingElement]], K: int) -> List[Row]:
    """Generators of {w : w·A = 0} for an r × c matrix A over R/π^K."""
    r = len(matrix)
    if r == 0:
        return []
    desc = matrix[0][0].desc if matrix[0] else None
    if desc is None:
        raise BadParametersError("left_kernel needs a non-empty matrix")
    c = len(matrix[0])
    augmented = [
        tuple(matrix[i]) + tuple(one(desc) if i == j else zero(desc) for j in range(r))
        for i in range(r)
    ]
    rows, _ = howell_form(augmented, K)
    return [row[c:] for row in rows if _is_zero_row(row[:c])]


# Lattices


@dataclass(frozen=True)
class LatticeModule:
    """Canonical presentation of L / π^a Λ₀ for a window lattice L."""

    ambient: HermitianAmbient
    rows: Tuple[Row, ...]
    pivots: Tuple[Pivot, ...]

    @property
    def key(self) -> LatticeKey:
        return tuple(tuple((e.a0, e.a1) for e in row) for row in self.rows)

    @property
    def length(self) -> int:
        """Length of L / π^a Λ₀ as an O_F-module."""
        return sum(self.ambient.K - v for _, v in self.pivots)

    def __lt__(self, other: "LatticeModule") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"LatticeModule(n={self.ambient.n}, m={self.ambient.m}, pivots={self.pivots})"


def _coerce_vector(amb: HermitianAmbient, vec: Sequence[object]) -> Row:
    out = []
    for e in vec:
        if isinstance(e, ChainRingElement):
            if e.desc != amb.ring:
                raise DescriptorMismatchError("Vector entry from a different ring")
            out.append(e)
        elif isinstance(e, int):
            out.append(ring_element(amb.ring, e))
        else:
            raise TypeError(f"Vector entries must be int or ChainRingElement, got {type(e).__name__}")
    if len(out) != amb.n:
        raise BadParametersError(f"Vector of length {len(out)} in dimension {amb.n}")
    return tuple(out)


def lattice_from_generators(amb: HermitianAmbient, generators: Sequence[Sequence[object]]) -> LatticeModule:
    """Lattice π^a Λ₀ + span of the given window-coordinate vectors."""
    rows, pivots = howell_form([_coerce_vector(amb, g) for g in generators], amb.K)
    return LatticeModule(amb, rows, pivots)


def scaled_lattice(amb: HermitianAmbient, exponents: Sequence[int]) -> LatticeModule:
    """span{π^{e_i} e_i}.

    Raises:
        WindowOverflowError: If some exponent lies outside [-a, a]
    """
    if len(exponents) != amb.n:
        raise BadParametersError(f"Need {amb.n} exponents, got {len(exponents)}")
    if any(e < -amb.a or e > amb.a for e in exponents):
        raise WindowOverflowError(f"Exponents {list(exponents)} leave the window ±{amb.a}")
    gens = []
    for i, e in enumerate(exponents):
        vec = [zero(amb.ring)] * amb.n
        vec[i] = multiply_by_pi(one(amb.ring), amb.a + e)
        gens.append(vec)
    return lattice_from_generators(amb, gens)


def standard_lattice(amb: HermitianAmbient, i: int) -> LatticeModule:
    """Λ_i = π^{-k} span{π^{-1}e_1, ..., π^{-1}e_j, e_{j+1}, ..., e_n} for i = kn + j.

    Raises:
        WindowOverflowError: If Λ_i is not inside the window

    Example:
        >>> amb = hermitian_ambient(4, 1, 3)
        >>> standard_lattice(amb, 4) == scale_by_pi(standard_lattice(amb, 0), -1)
        True
    """
    k, j = divmod(i, amb.n)
    exponents = [-k - 1 if col < j else -k for col in range(amb.n)]
    return scaled_lattice(amb, exponents)


def base_lattice(amb: HermitianAmbient) -> LatticeModule:
    return standard_lattice(amb, 0)


def contains_vectors(L: LatticeModule, vectors: Sequence[Sequence[ChainRingElement]]) -> bool:
    K = L.ambient.K
    return all(_is_zero_row(reduce_vector(L.rows, L.pivots, v, K)) for v in vectors)


def contains(L: LatticeModule, M: LatticeModule) -> bool:
    """True iff M ⊆ L."""
    _check_same(L, M)
    return contains_vectors(L, M.rows)


def _check_same(L: LatticeModule, M: LatticeModule) -> None:
    if L.ambient != M.ambient:
        raise DescriptorMismatchError("Lattices live in different ambient spaces")


def lattice_sum(L: LatticeModule, M: LatticeModule) -> LatticeModule:
    """Smallest lattice containing L and M."""
    _check_same(L, M)
    rows, pivots = howell_form(list(L.rows) + list(M.rows), L.ambient.K)
    return LatticeModule(L.ambient, rows, pivots)


def lattice_intersect(L: LatticeModule, M: LatticeModule) -> LatticeModule:
    """Largest lattice contained in L and M, by a Zassenhaus-style Howell reduction."""
    _check_same(L, M)
    amb = L.ambient
    n, z = amb.n, zero(amb.ring)
    stacked = [tuple(r) + tuple(r) for r in L.rows] + [tuple(r) + (z,) * n for r in M.rows]
    rows, _ = howell_form(stacked, amb.K)
    meet = [row[n:] for row in rows if _is_zero_row(row[:n])]
    out_rows, pivots = howell_form(meet, amb.K)
    return LatticeModule(amb, out_rows, pivots)


def hermitian_pairing(amb: HermitianAmbient, y: Sequence[ChainRingElement], y2: Sequence[ChainRingElement]) -> ChainRingElement:
    """conj(y)^T H y2 for window coordinates; h(x, x2) is (-1)^a π^{-2a} times this."""
    n = amb.n
    acc = zero(amb.ring)
    for j in range(n):
        acc = acc + conjugate(y[j]) * y2[n - 1 - j]
    return acc


@lru_cache(maxsize=4096)
def hermitian_dual(L: LatticeModule) -> LatticeModule:
    """L^♯ = {x : h(x, L) ⊆ O_F}; window lattices have window duals.

    Example:
        >>> amb = hermitian_ambient(3, 1, 3)
        >>> hermitian_dual(base_lattice(amb)) == base_lattice(amb)
        True
    """
    amb = L.ambient
    n = amb.n
    if not L.rows:
        return scaled_lattice(amb, [-amb.a] * n)
    # column i holds the functional y' -> conj(y_i)^T H y'
    functionals = [tuple(conjugate(y[n - 1 - j]) for j in range(n)) for y in L.rows]
    matrix = [tuple(f[j] for f in functionals) for j in range(n)]
    kernel = left_kernel(matrix, amb.K)
    rows, pivots = howell_form(kernel, amb.K)
    return LatticeModule(amb, rows, pivots)


def scale_by_pi(L: LatticeModule, k: int = 1, clip: bool = False) -> LatticeModule:
    """π^k L.

    With clip=True the result is π^k L + π^a Λ₀ when π^k L leaves the window on the
    small side; leaving it on the large side always raises.

    Raises:
        WindowOverflowError: If π^k L is not inside the window
    """
    amb = L.ambient
    K = amb.K
    if k == 0:
        return L
    if k > 0:
        if not clip and not fits_window(L, k):
            raise WindowOverflowError(f"π^{k}L leaves the window", {"k": k})
        gens = [tuple(truncate(multiply_by_pi(e, k), K) for e in row) for row in L.rows]
        rows, pivots = howell_form(gens, K)
        return LatticeModule(amb, rows, pivots)
    e = -k
    if not fits_window(L, k):
        raise WindowOverflowError(f"π^{k}L leaves the window", {"k": k})
    gens = [tuple(divide_by_pi_power(x, e) for x in row) for row in L.rows]
    floor = multiply_by_pi(one(amb.ring), K - e)
    for i in range(amb.n):
        vec = [zero(amb.ring)] * amb.n
        vec[i] = floor
        gens.append(tuple(vec))
    rows, pivots = howell_form(gens, K)
    return LatticeModule(amb, rows, pivots)


def fits_window(L: LatticeModule, k: int) -> bool:
    """Whether π^k L lies inside the window."""
    amb = L.ambient
    if k > 0:
        if k > 2 * amb.a:
            return False
        unit = multiply_by_pi(one(amb.ring), amb.K - k)
        units = []
        for i in range(amb.n):
            vec = [zero(amb.ring)] * amb.n
            vec[i] = unit
            units.append(vec)
        return contains_vectors(L, units)
    return all(pi_valuation(e) >= -k for row in L.rows for e in row)


def length(L: LatticeModule) -> int:
    return L.length


def is_integral(L: LatticeModule) -> bool:
    """L ⊆ L^♯."""
    return contains(hermitian_dual(L), L)


def lattice_type(L: LatticeModule) -> int:
    """length(L^♯ / L).

    Raises:
        NotIntegralError: If L is not contained in its dual
    """
    dual = hermitian_dual(L)
    if not contains(dual, L):
        raise NotIntegralError("Lattice is not contained in its dual")
    return dual.length - L.length


def is_vertex(L: LatticeModule) -> bool:
    """πL^♯ ⊆ L ⊆ L^♯."""
    dual = hermitian_dual(L)
    if not contains(dual, L):
        return False
    K = L.ambient.K
    return contains_vectors(L, [tuple(truncate(multiply_by_pi(e, 1), K) for e in row) for row in dual.rows])


def extend(L: LatticeModule, m: int) -> LatticeModule:
    """Base change of a rational lattice to coefficient level m."""
    if L.ambient.m == m:
        return L
    if L.ambient.m != 1:
        raise NotRationalError("Only rational lattices can be extended")
    target = L.ambient.at_level(m)
    rows = tuple(tuple(ring_element(target.ring, e.a0[0], e.a1[0]) for e in row) for row in L.rows)
    return LatticeModule(target, rows, L.pivots)


def _apply_entrywise(L: LatticeModule, inverse: bool) -> LatticeModule:
    op = sigma_inverse if inverse else sigma
    gens = [tuple(op(e) for e in row) for row in L.rows]
    rows, pivots = howell_form(gens, L.ambient.K)
    return LatticeModule(L.ambient, rows, pivots)


def tau(L: LatticeModule) -> LatticeModule:
    """Entrywise σ in the rational basis."""
    if L.ambient.m == 1:
        return L
    return _apply_entrywise(L, inverse=False)


def tau_inverse(L: LatticeModule) -> LatticeModule:
    if L.ambient.m == 1:
        return L
    return _apply_entrywise(L, inverse=True)


def tau_vectors(amb: HermitianAmbient, vectors: Sequence[Row], inverse: bool = False) -> List[Row]:
    op = sigma_inverse if inverse else sigma
    return [tuple(op(e) for e in v) for v in vectors]


def is_rational(L: LatticeModule) -> bool:
    return tau(L) == L


def descend(L: LatticeModule) -> LatticeModule:
    """The rational lattice L ∩ C of a τ-stable lattice, at level 1.

    Raises:
        NotRationalError: If L is not τ-stable
    """
    if L.ambient.m == 1:
        return L
    if not is_rational(L):
        raise NotRationalError("Lattice is not τ-stable")
    base = L.ambient.at_level(1)
    rows = []
    for row in L.rows:
        if any(any(e.a0[1:]) or any(e.a1[1:]) for e in row):
            raise NotRationalError("Howell form of a τ-stable lattice has irrational entries")
        rows.append(tuple(ring_element(base.ring, e.a0[0], e.a1[0]) for e in row))
    return LatticeModule(base, tuple(rows), L.pivots)


def to_json(L: LatticeModule) -> dict:
    amb = L.ambient
    return {
        "n": amb.n,
        "a": amb.a,
        "p": amb.p,
        "m": amb.m,
        "rows": [[[list(e.a0), list(e.a1)] for e in row] for row in L.rows],
    }


def from_json(data: dict) -> LatticeModule:
    """Rebuild a lattice from its JSON object.

    Raises:
        ValueError: If a required key is missing
    """
    missing = [key for key in ("n", "a", "p", "m", "rows") if key not in data]
    if missing:
        raise ValueError(f"Missing lattice keys: {', '.join(missing)}")
    amb = hermitian_ambient(int(data["n"]), int(data["a"]), int(data["p"]), int(data["m"]))
    gens = [[ring_element(amb.ring, e[0], e[1]) for e in row] for row in data["rows"]]
    return lattice_from_generators(amb, gens)


# Quotients upper / lower with π·upper ⊆ lower


class SandwichQuotient:
    """The F_{p^m}-vector space upper / lower for lattices with π·upper ⊆ lower ⊆ upper."""

    def __init__(self, lower: LatticeModule, upper: LatticeModule) -> None:
        _check_same(lower, upper)
        amb = lower.ambient
        K = amb.K
        if not contains(upper, lower):
            raise NotSandwichedError("Lower lattice is not contained in the upper one")
        pi_upper = [tuple(truncate(multiply_by_pi(e, 1), K) for e in row) for row in upper.rows]
        if not contains_vectors(lower, pi_upper):
            raise NotSandwichedError("π·upper is not contained in lower")
        self.lower = lower
        self.upper = upper
        self.ambient = amb
        self.field = amb.residue_field
        self.dim = upper.length - lower.length

        lifts: List[Row] = []
        current = lower
        for row in upper.rows:
            if len(lifts) == self.dim:
                break
            if not contains_vectors(current, [row]):
                lifts.append(row)
                current = lattice_from_generators(amb, list(current.rows) + [row])
        self.lifts: Tuple[Row, ...] = tuple(lifts)

        d, n = self.dim, amb.n
        z, o = zero(amb.ring), one(amb.ring)
        augmented = [tuple(b) + tuple(o if i == j else z for j in range(d)) for i, b in enumerate(lifts)]
        augmented += [tuple(r) + (z,) * d for r in lower.rows]
        self._aug_rows, self._aug_pivots = howell_form(augmented, K)
        self._n = n

    def contains(self, M: LatticeModule) -> bool:
        return contains(M, self.lower) and contains(self.upper, M)

    def coordinates(self, x: Sequence[ChainRingElement]) -> np.ndarray:
        """Codes c with x ≡ Σ c_i b_i mod lower, for a vector x of upper."""
        amb = self.ambient
        z = zero(amb.ring)
        padded = tuple(x) + (z,) * self.dim
        rem = reduce_vector(self._aug_rows, self._aug_pivots, padded, amb.K)
        if not _is_zero_row(rem[: self._n]):
            raise NotSandwichedError("Vector does not lie in the upper lattice")
        return np.array([residue(-w) for w in rem[self._n :]], dtype=np.int64)

    def lift(self, coords: Sequence[int]) -> Row:
        amb = self.ambient
        K = amb.K
        acc = tuple(zero(amb.ring) for _ in range(amb.n))
        for c, b in zip(coords, self.lifts):
            if c:
                acc = tuple(truncate(x + from_residue(amb.ring, int(c)) * y, K) for x, y in zip(acc, b))
        return acc

    def preimage(self, basis: np.ndarray) -> LatticeModule:
        """lower + lifts of the rows of `basis` (codes in F_{p^m})."""
        basis = np.atleast_2d(np.asarray(basis, dtype=np.int64))
        gens = list(self.lower.rows) + [self.lift(row) for row in basis if row.size and row.any()]
        return lattice_from_generators(self.ambient, gens)

    def image(self, M: LatticeModule) -> np.ndarray:
        """Reduced echelon basis of M / lower.

        Raises:
            NotSandwichedError: If M is not between lower and upper
        """
        if not self.contains(M):
            raise NotSandwichedError("Lattice is not between lower and upper")
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        coords = [self.coordinates(row) for row in M.rows]
        if not coords:
            return np.zeros((0, self.dim), dtype=np.int64)
        R, _ = rref(field_class(self.field), np.array(coords, dtype=np.int64))
        return R


# Vertex lattice enumeration


def _check_enumeration_bounds(amb: HermitianAmbient) -> None:
    if amb.n > MAX_VERTEX_RANK or amb.p not in VERTEX_PRIMES or amb.a > MAX_VERTEX_WINDOW:
        raise BoundExceededError(
            f"Vertex enumeration is limited to n ≤ {MAX_VERTEX_RANK}, p in {VERTEX_PRIMES}, a ≤ {MAX_VERTEX_WINDOW}",
            {"n": amb.n, "p": amb.p, "a": amb.a},
        )


def _subspaces_of(quotient: SandwichQuotient, dims: Sequence[int]) -> Iterator[LatticeModule]:
    for d in dims:
        for basis in enumerate_echelon(quotient.field, d, quotient.dim):
            yield quotient.preimage(basis)


def vertex_neighbours(L: LatticeModule) -> Iterator[LatticeModule]:
    """Vertex lattices obtained from L by one step up or one step down inside the window.

    Up-steps are lines of L^♯/L; down-steps are hyperplanes of L/(πL^♯ + π^a Λ₀).
    """
    dual = hermitian_dual(L)
    if dual.length > L.length:
        for N in _subspaces_of(SandwichQuotient(L, dual), [1]):
            if is_vertex(N):
                yield N
    lower = scale_by_pi(dual, 1, clip=True)
    if L.length > lower.length:
        quotient = SandwichQuotient(lower, L)
        for N in _subspaces_of(quotient, [quotient.dim - 1]):
            if is_vertex(N):
                yield N


def _vertex_search(amb: HermitianAmbient) -> List[LatticeModule]:
    start = base_lattice(amb)
    seen: Dict[LatticeKey, LatticeModule] = {start.key: start}
    queue = deque([start])
    while queue:
        L = queue.popleft()
        for N in vertex_neighbours(L):
            if N.key not in seen:
                seen[N.key] = N
                queue.append(N)
    logger.debug("Vertex search at n=%d, a=%d found %d lattices", amb.n, amb.a, len(seen))
    return list(seen.values())


def _vertices_above(above: LatticeModule) -> List[LatticeModule]:
    if not is_vertex(above):
        raise NotVertexError("Lower bound of the enumeration is not a vertex lattice")
    quotient = SandwichQuotient(above, hermitian_dual(above))
    total = sum(gaussian_binomial(quotient.dim, d, quotient.field.order) for d in range(quotient.dim + 1))
    if total > GRASSMANNIAN_CAP:
        raise BoundExceededError(f"{total} intermediate subspaces exceed the cap {GRASSMANNIAN_CAP}")
    return [N for N in _subspaces_of(quotient, range(quotient.dim + 1)) if is_vertex(N)]


def _canonical_residues(amb: HermitianAmbient, v: int) -> List[ChainRingElement]:
    ring = amb.ring
    m0 = ring.p ** ((v + 1) // 2)
    m1 = ring.p ** (v // 2)
    out = []
    for c0 in product(range(m0), repeat=ring.m):
        for c1 in product(range(m1), repeat=ring.m):
            out.append(ring_element(ring, list(c0), list(c1)))
    return out


def window_lattices(amb: HermitianAmbient, bound: int = HOWELL_TABLEAU_BOUND) -> Iterator[LatticeModule]:
    """Every lattice of the window, by brute force over Howell tableaux.

    Candidate tableaux (pivot columns, pivot valuations, canonical entries) are generated
    and the fixed points of howell_form are kept.

    Raises:
        BoundExceededError: If the number of tableaux exceeds the bound
    """
    n, K = amb.n, amb.K
    residues = {v: _canonical_residues(amb, v) for v in range(K + 1)}
    shapes = []
    total = 0
    for size in range(n + 1):
        for cols in combinations(range(n), size):
            for vals in product(range(K), repeat=size):
                slots: List[Tuple[int, int, List[ChainRingElement]]] = []
                for i, ci in enumerate(cols):
                    for c in range(ci + 1, n):
                        if c in cols:
                            slots.append((i, c, residues[vals[cols.index(c)]]))
                        else:
                            slots.append((i, c, residues[K]))
                count = 1
                for _, _, choices in slots:
                    count *= len(choices)
                total += count
                shapes.append((cols, vals, slots))
    if total > bound:
        raise BoundExceededError(f"{total} Howell tableaux exceed the bound {bound}", {"n": n, "a": amb.a})
    z = zero(amb.ring)
    for cols, vals, slots in shapes:
        for choice in product(*[s[2] for s in slots]):
            rows = [[z] * n for _ in cols]
            for i, (ci, v) in enumerate(zip(cols, vals)):
                rows[i][ci] = multiply_by_pi(one(amb.ring), v)
            for (i, c, _), e in zip(slots, choice):
                rows[i][c] = e
            built = tuple(tuple(r) for r in rows)
            canon, pivots = howell_form(built, K)
            if canon == built and tuple(c for c, _ in pivots) == cols:
                yield LatticeModule(amb, canon, pivots)


def enumerate_vertex_lattices(
    amb: HermitianAmbient,
    type_filter: Optional[int] = None,
    above: Optional[LatticeModule] = None,
    method: str = "search",
) -> Iterator[LatticeModule]:
    """Yield each vertex lattice of the window once, sorted by Howell rows.

    Args:
        amb: Rational ambient space
        type_filter: Only lattices of this type
        above: Only lattices containing this vertex lattice
        method: "search" (neighbour search, or subspace lifting when `above` is given)
            or "brute" (all Howell tableaux)

    Raises:
        BoundExceededError: Outside n ≤ 6, p in (3, 5), a ≤ 2
        ValueError: If method is unknown
    """
    _check_enumeration_bounds(amb)
    if amb.m != 1:
        raise BadParametersError("Vertex lattices are enumerated at level m = 1")
    if type_filter is not None and type_filter % 2:
        return
    if method == "brute":
        found = [L for L in window_lattices(amb) if is_vertex(L)]
        if above is not None:
            found = [L for L in found if contains(L, above)]
    elif method == "search":
        found = _vertices_above(above) if above is not None else _vertex_search(amb)
    else:
        raise ValueError(f"Unknown enumeration method: {method}")
    for L in sorted(found, key=lambda lat: lat.key):
        if type_filter is None or lattice_type(L) == type_filter:
            yield L
