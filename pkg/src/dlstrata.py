"""Point enumeration for the Deligne–Lusztig type varieties built on form spaces.

S_Λ: isotropic (t-h)-subspaces U of the symplectic V_Λ with dim(U ∩ ΦU) ≥ t-h-1.
S'_Λ: pairs (U, U') with U ∈ S_Λ and U' a (t+h-1)-subspace of U^♯ ∩ Φ(U^♯).
R_{Λ^♯}: isotropic (h-t)-subspaces of the orthogonal V_{Λ^♯} with dim(U ∩ ΦU) ≥ h-t-1.
R'_{Λ^♯}: pairs (U, U') with U ∈ R and U' an (h-t-1)-subspace of U ∩ ΦU.
R'_{[Λ₁,Λ₂]}: the pairs of R'_{Λ₂^♯} with U inside the rational subspace W.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import sympy

from src.exceptions import (
    BadParametersError,
    InsufficientDataError,
    NotRationalError,
    SpaceMismatchError,
    WittIndexTooSmallError,
)
from src.formspace import (
    FormKind,
    FormSpace,
    Subspace,
    dual,
    enumerate_subspaces,
    frobenius,
    intersect,
    is_isotropic,
    level_field,
    make_subspace,
    projective_count,
)
from src.gf import enumerate_echelon, field_class, gaussian_binomial, mat_mul

logger = logging.getLogger(__name__)


class Model(Enum):
    """Which variety a quotient-model point belongs to."""

    S_PRIME = "S'"
    R_PRIME = "R'"
    R_PRIME_BRACKET = "R'_bracket"


@dataclass(frozen=True)
class StratumPointQ:
    """A pair (U, U') of the quotient model."""

    U: Subspace
    Uprime: Subspace
    model: Model

    @property
    def key(self) -> Tuple:
        return (self.U.basis, self.Uprime.basis)


@dataclass
class CountReport:
    """Point counts over F_{q^m} and the dimension they suggest."""

    model: str
    params: Dict[str, int]
    counts: Dict[int, int]
    estimated_dim: int
    claimed_dim: Optional[int]
    leading_ok: bool
    polynomial: Optional[str] = None

    def to_json(self) -> dict:
        data = {
            "model": self.model,
            "params": dict(self.params),
            "counts": {str(m): c for m, c in sorted(self.counts.items())},
            "estimated_dim": self.estimated_dim,
            "claimed_dim": self.claimed_dim,
            "leading_ok": self.leading_ok,
        }
        if self.polynomial is not None:
            data["polynomial"] = self.polynomial
        return data


@dataclass
class FiberCensus:
    """Fibers of (U, U') ↦ U over S_Λ, checked against the projective-space law."""

    t: int
    h: int
    m: int
    s_count: int = 0
    fixed_count: int = 0
    sprime_count: int = 0
    violations: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _defect_ok(U: Subspace, bound: int) -> bool:
    return intersect(U, frobenius(U)).dim >= bound


def subspaces_within(X: Subspace, d: int) -> Iterator[Subspace]:
    """Every d-subspace of X, via echelon coordinates on the basis of X."""
    if d < 0 or d > X.dim:
        return
    if d == 0:
        yield Subspace(X.space, X.m, ())
        return
    GF = field_class(level_field(X.space, X.m))
    basis = X.matrix
    for coords in enumerate_echelon(level_field(X.space, X.m), d, X.dim):
        yield make_subspace(X.space, X.m, mat_mul(GF, coords, basis))


def _require_kind(space: FormSpace, kind: FormKind) -> None:
    if space.kind is not kind:
        raise SpaceMismatchError(f"Expected a {kind.value} space, got {space.kind.value}")


def enumerate_S(spV: FormSpace, h: int, m: int) -> Iterator[Subspace]:
    """Isotropic (t-h)-subspaces U with dim(U ∩ ΦU) ≥ t-h-1.

    Raises:
        BadParametersError: If h is not in [0, t)
        BoundExceededError: If the Grassmannian is above the cap
    """
    _require_kind(spV, FormKind.SYMPLECTIC)
    t = spV.dim // 2
    if h < 0 or h >= t:
        raise BadParametersError(f"S needs 0 ≤ h < t, got h={h}, t={t}", {"h": h, "t": t})
    d = t - h
    for U in enumerate_subspaces(spV, m, d, "isotropic"):
        if _defect_ok(U, d - 1):
            yield U


def enumerate_Sprime(spV: FormSpace, h: int, m: int) -> Iterator[StratumPointQ]:
    """Pairs (U, U') with U ∈ S and U' a (t+h-1)-subspace of U^♯ ∩ Φ(U^♯)."""
    t = spV.dim // 2
    for U in enumerate_S(spV, h, m):
        Ud = dual(U)
        X = intersect(Ud, frobenius(Ud))
        for Up in subspaces_within(X, t + h - 1):
            yield StratumPointQ(U, Up, Model.S_PRIME)


def _check_orthogonal(spV: FormSpace, h: int) -> int:
    _require_kind(spV, FormKind.ORTHOGONAL)
    t = spV.t
    if t >= h:
        raise BadParametersError(f"R needs t < h, got t={t}, h={h}", {"t": t, "h": h})
    if h - t > spV.dim // 2:
        raise WittIndexTooSmallError(
            f"Isotropic dimension {h - t} exceeds the maximal isotropic dimension {spV.dim // 2} over F̄",
            {"h": h, "t": t, "dim": spV.dim},
        )
    return t


def enumerate_R(spV: FormSpace, h: int, m: int) -> Iterator[Subspace]:
    """Isotropic (h-t)-subspaces U of the orthogonal space with dim(U ∩ ΦU) ≥ h-t-1.

    Raises:
        BadParametersError: If t ≥ h
        WittIndexTooSmallError: If h-t exceeds the Witt index
    """
    t = _check_orthogonal(spV, h)
    d = h - t
    for U in enumerate_subspaces(spV, m, d, "isotropic"):
        if _defect_ok(U, d - 1):
            yield U


def enumerate_Rprime(spV: FormSpace, h: int, m: int) -> Iterator[StratumPointQ]:
    """Pairs (U, U') with U ∈ R and U' an (h-t-1)-subspace of U ∩ ΦU."""
    t = spV.t
    for U in enumerate_R(spV, h, m):
        for Up in subspaces_within(intersect(U, frobenius(U)), h - t - 1):
            yield StratumPointQ(U, Up, Model.R_PRIME)


def enumerate_Rprime_bracket(spV: FormSpace, W: Subspace, h: int, m: int) -> Iterator[StratumPointQ]:
    """The pairs of R' with U ⊆ W for a rational subspace W.

    Raises:
        NotRationalError: If W is not Φ-stable
    """
    t = _check_orthogonal(spV, h)
    if W.space != spV:
        raise SpaceMismatchError("W does not live in this orthogonal space")
    Wm = make_subspace(spV, m, W.matrix) if W.m != m else W
    if frobenius(Wm) != Wm:
        raise NotRationalError("W is not Frobenius-stable")
    d = h - t
    for U in subspaces_within(Wm, d):
        if not is_isotropic(U) or not _defect_ok(U, d - 1):
            continue
        for Up in subspaces_within(intersect(U, frobenius(U)), d - 1):
            yield StratumPointQ(U, Up, Model.R_PRIME_BRACKET)


def fixed_locus(points: Sequence[Subspace]) -> List[Subspace]:
    """The Φ-fixed members of a list of subspaces."""
    return [U for U in points if frobenius(U) == U]


def fiber_census(spV: FormSpace, h: int, m: int) -> FiberCensus:
    """Count U' over every U ∈ S and compare with the projective-space law.

    A Φ-fixed U must carry |P^{t+h-1}(F_{q^m})| partners, any other U exactly one, namely
    U^♯ ∩ Φ(U^♯).
    """
    t = spV.dim // 2
    Q = level_field(spV, m).order
    census = FiberCensus(t=t, h=h, m=m)
    expected_fixed = projective_count(t + h, Q)
    for U in enumerate_S(spV, h, m):
        census.s_count += 1
        Ud = dual(U)
        X = intersect(Ud, frobenius(Ud))
        partners = list(subspaces_within(X, t + h - 1))
        census.sprime_count += len(partners)
        fixed = frobenius(U) == U
        if fixed:
            census.fixed_count += 1
            if len(partners) != expected_fixed:
                census.violations.append({"U": [list(r) for r in U.basis], "partners": len(partners), "expected": expected_fixed})
        elif len(partners) != 1 or partners[0] != X:
            census.violations.append({"U": [list(r) for r in U.basis], "partners": len(partners), "expected": 1})
    logger.debug("Fiber census t=%d h=%d m=%d: |S|=%d |T|=%d", t, h, m, census.s_count, census.fixed_count)
    return census


def sprime_count_identity(census: FiberCensus, q: int) -> Tuple[int, int]:
    """(|S'|, |S \\ T| + |T|·|P^{t+h-1}|); equal when the fiber law holds."""
    Q = q**census.m
    predicted = (census.s_count - census.fixed_count) + census.fixed_count * projective_count(census.t + census.h, Q)
    return census.sprime_count, predicted


def rprime_two_way_count(spV: FormSpace, h: int, m: int) -> Tuple[int, int]:
    """|R'| by pair enumeration and by summing Gaussian binomials over R."""
    t = spV.t
    Q = level_field(spV, m).order
    pairs = sum(1 for _ in enumerate_Rprime(spV, h, m))
    summed = sum(gaussian_binomial(intersect(U, frobenius(U)).dim, h - t - 1, Q) for U in enumerate_R(spV, h, m))
    return pairs, summed


def index_identity_violations(spV: FormSpace, m: int) -> Tuple[int, List[Subspace]]:
    """Check [U^♯ : U^♯ ∩ Φ(U^♯)] = [U : U ∩ ΦU] on every isotropic U.

    Returns:
        Tuple of the number of subspaces checked and the violating ones
    """
    _require_kind(spV, FormKind.SYMPLECTIC)
    checked = 0
    bad: List[Subspace] = []
    for d in range(1, spV.dim // 2 + 1):
        for U in enumerate_subspaces(spV, m, d, "isotropic"):
            checked += 1
            Ud = dual(U)
            left = Ud.dim - intersect(Ud, frobenius(Ud)).dim
            right = U.dim - intersect(U, frobenius(U)).dim
            if left != right:
                bad.append(U)
    return checked, bad


def estimate_dimension(
    counts: Mapping[int, int],
    q: int,
    claimed_dim: Optional[int] = None,
    model: str = "",
    params: Optional[Mapping[str, int]] = None,
) -> CountReport:
    """Dimension suggested by the growth of point counts.

    Uses the largest consecutive pair m, m+1 with nonzero counts:
    estimated_dim = round(log_q(c_{m+1} / c_m)); leading_ok iff the ratio lies within a
    factor 4 of q^d for the claimed d (or the estimate when no claim is given).

    Raises:
        InsufficientDataError: If no consecutive pair of nonzero counts exists

    Example:
        >>> estimate_dimension({1: 13, 2: 91}, 3).estimated_dim
        2
    """
    levels = sorted(m for m, c in counts.items() if c > 0)
    pairs = [m for m in levels if m + 1 in levels]
    if not pairs:
        raise InsufficientDataError("Need nonzero counts at two consecutive levels", {"levels": levels})
    m = pairs[-1]
    ratio = counts[m + 1] / counts[m]
    estimated = int(round(math.log(ratio, q)))
    d = estimated if claimed_dim is None else claimed_dim
    leading_ok = q**d / 4 <= ratio <= 4 * q**d
    return CountReport(
        model=model,
        params=dict(params or {}),
        counts=dict(counts),
        estimated_dim=estimated,
        claimed_dim=claimed_dim,
        leading_ok=bool(leading_ok),
    )


def interpolate_counts(counts: Mapping[int, int], q: int) -> str:
    """Interpolating polynomial of the counts in Q = q^m (an experiment, never asserted)."""
    Q = sympy.Symbol("Q")
    points = [(q**m, c) for m, c in sorted(counts.items())]
    if len(points) < 2:
        raise InsufficientDataError("Interpolation needs at least two levels")
    return str(sympy.expand(sympy.interpolate(points, Q)))


def count_points(points: Iterator[object]) -> int:
    return sum(1 for _ in points)


def model_counts(
    model: Model,
    spV: FormSpace,
    h: int,
    levels: Sequence[int],
    W: Optional[Subspace] = None,
) -> Dict[int, int]:
    """|X(F_{q^m})| for each requested level."""
    counts: Dict[int, int] = {}
    for m in levels:
        if model is Model.S_PRIME:
            counts[m] = count_points(enumerate_Sprime(spV, h, m))
        elif model is Model.R_PRIME:
            counts[m] = count_points(enumerate_Rprime(spV, h, m))
        else:
            if W is None:
                raise BadParametersError("The bracket model needs W")
            counts[m] = count_points(enumerate_Rprime_bracket(spV, W, h, m))
        logger.debug("%s h=%d m=%d: %d points", model.value, h, m, counts[m])
    return counts


def claimed_dimension(model: Model, n: int, h: int, t: int, t2: Optional[int] = None) -> int:
    """t+h for S', n-t-h-1 for R', t₁-t₂-1 for the bracket (t = t₁)."""
    if model is Model.S_PRIME:
        return t + h
    if model is Model.R_PRIME:
        return n - t - h - 1
    if t2 is None:
        raise BadParametersError("The bracket model needs t₂")
    return t - t2 - 1
