"""κ-points of the Bruhat–Tits strata Z(Λ) and Y(Λ^♯) of the splitting model.

A point over F_{q^m} is a pair (M, M') of lattices at coefficient level m. Two models
produce them:

* the raw model enumerates sandwiched candidates and re-checks every Dieudonné-lattice
  condition over the chain ring (τ = entrywise σ, Π = π, V = Π∘τ^{-1});
* the quotient model goes through S'_Λ / R'_{Λ^♯} and the maps f_Z, f_Y.

Intersections of strata are compared as sets of canonical (M, M') Howell keys.
"""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from src.chainring import multiply_by_pi, truncate
from src.config import GRASSMANNIAN_CAP, PAIR_SAMPLE_SIZE
from src.dlstrata import (
    Model,
    StratumPointQ,
    enumerate_Rprime,
    enumerate_Rprime_bracket,
    enumerate_Sprime,
)
from src.exceptions import (
    BadParametersError,
    BoundExceededError,
    NotStableError,
    WindowOverflowError,
)
from src.formspace import (
    FormKind,
    frobenius,
    make_subspace,
    orthogonal_quotient,
    projective_count,
    quotient_at_level,
    subspace_of_lattice,
    symplectic_quotient,
)
from src.gf import enumerate_echelon, field_class, gaussian_binomial, mat_mul
from src.lattices import (
    HermitianAmbient,
    LatticeModule,
    Row,
    SandwichQuotient,
    check_splitting_level,
    contains,
    contains_vectors,
    descend,
    enumerate_vertex_lattices,
    extend,
    fits_window,
    hermitian_ambient,
    hermitian_dual,
    is_vertex,
    lattice_intersect,
    lattice_sum,
    lattice_type,
    scale_by_pi,
    standard_lattice,
    tau,
    tau_inverse,
    tau_vectors,
)
from src.lattices import to_json as lattice_to_json
from src.utils.verification import EXHAUSTIVE, SAMPLED, CheckResult

logger = logging.getLogger(__name__)

PointKey = Tuple[Any, Any]


class Stratum(Enum):
    Z = "Z"
    Y = "Y"


@dataclass(frozen=True)
class DieudonnePair:
    """A pair (M, M') at level m anchored at the rational vertex lattice Λ."""

    M: LatticeModule
    Mprime: LatticeModule
    anchor: LatticeModule
    stratum: Stratum

    @property
    def key(self) -> PointKey:
        return (self.M.key, self.Mprime.key)

    @property
    def m(self) -> int:
        return self.M.ambient.m

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum.value,
            "M": lattice_to_json(self.M),
            "Mprime": lattice_to_json(self.Mprime),
        }


StratumPoint = Union[DieudonnePair, StratumPointQ]


@dataclass
class StratumSet:
    """Canonically ordered, duplicate-free set of stratum points.

    Attributes:
        points: Points sorted by key
        params: Anchor type, h, m and the model that produced the points
        candidates: Number of candidates examined (raw model only)
        automatic_violations: Failures of conditions that hold automatically on
            Z-sandwiched candidates
    """

    points: Tuple[StratumPoint, ...]
    params: Dict[str, Any]
    candidates: int = 0
    automatic_violations: int = 0
    _keys: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self) -> None:
        unique: Dict[Any, StratumPoint] = {}
        for pt in self.points:
            unique.setdefault(pt.key, pt)
        self.points = tuple(unique[k] for k in sorted(unique))
        self._keys = frozenset(unique)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[StratumPoint]:
        return iter(self.points)

    def __contains__(self, key: object) -> bool:
        return key in self._keys

    def keys(self) -> frozenset:
        return self._keys


# Raw Dieudonné conditions


def _pi_times(rows: Sequence[Row], K: int) -> List[Row]:
    return [tuple(truncate(multiply_by_pi(e, 1), K) for e in row) for row in rows]


def lattice_conditions(M: LatticeModule, h: int) -> Dict[str, bool]:
    """Conditions on M alone: ΠM^♯ ⊂ M ⊂ M^♯ of index 2h, ΠM ⊂ τ^{-1}M ⊂ Π^{-1}M, M ⊂^{≤1} M + τM."""
    K = M.ambient.K
    Md = hermitian_dual(M)
    tinv = tau_inverse(M)
    return {
        "vertex_index": contains(Md, M)
        and contains_vectors(M, _pi_times(Md.rows, K))
        and Md.length - M.length == 2 * h,
        "tau_lower": contains_vectors(tinv, _pi_times(M.rows, K)),
        "tau_upper": contains_vectors(M, _pi_times(tau_vectors(M.ambient, M.rows, inverse=True), K)),
        "tau_defect": lattice_sum(M, tau(M)).length - M.length <= 1,
    }


def pair_conditions(M: LatticeModule, Mprime: LatticeModule) -> Dict[str, bool]:
    """Conditions tying M' to M: VM^♯ ⊂ M' ⊂ τ^{-1}(M^♯) ∩ M^♯ with length(M^♯/M') = 1."""
    K = M.ambient.K
    Md = hermitian_dual(M)
    inside = contains(Md, Mprime)
    return {
        "v_lower": contains_vectors(Mprime, _pi_times(tau_vectors(M.ambient, Md.rows, inverse=True), K)),
        "mprime_upper": inside and contains(tau_inverse(Md), Mprime),
        "colength_one": inside and Md.length - Mprime.length == 1,
    }


def sandwich_conditions(pt: DieudonnePair) -> Dict[str, bool]:
    """The stratum-wise sandwiches of M and M' around the anchor."""
    m = pt.m
    L = extend(pt.anchor, m)
    Ld = extend(hermitian_dual(pt.anchor), m)
    M, Mp = pt.M, pt.Mprime
    Md = hermitian_dual(M)
    if Ld.length - L.length == Md.length - M.length:
        # type-2h anchor: M = Λ̆, M' constrained only by the pair conditions
        return {"sandwich_M": M == L, "sandwich_Mprime": contains(Md, Mp)}
    if pt.stratum is Stratum.Z:
        return {
            "sandwich_M": contains(M, L) and contains(Ld, Md),
            "sandwich_Mprime": contains(Mp, L) and contains(Md, Mp),
        }
    return {
        "sandwich_M": contains(L, M) and contains(Md, Ld),
        "sandwich_Mprime": contains(Mp, Ld) and contains(Md, Mp),
    }


def dieudonne_conditions(pt: DieudonnePair, h: int) -> Dict[str, bool]:
    """Every condition a raw point must satisfy, by name."""
    checks = lattice_conditions(pt.M, h)
    checks.update(pair_conditions(pt.M, pt.Mprime))
    checks.update(sandwich_conditions(pt))
    return checks


# Anchors and validation


def standard_anchor(amb: HermitianAmbient, t: int) -> LatticeModule:
    """Λ_{-t} of the standard chain, a vertex lattice of type 2t.

    Raises:
        BadParametersError: If no vertex lattice of type 2t exists (t > ⌊n/2⌋)
    """
    if t < 0 or 2 * t > amb.n:
        raise BadParametersError(f"No vertex lattice of type {2 * t} in dimension {amb.n}", {"t": t, "n": amb.n})
    return standard_lattice(amb, -t)


def _anchor_t(anchor: LatticeModule, h: int) -> int:
    if anchor.ambient.m != 1:
        raise BadParametersError("Anchors are rational lattices at level 1")
    check_splitting_level(anchor.ambient.n, h)
    if not is_vertex(anchor):
        raise BadParametersError("Anchor is not a vertex lattice")
    return lattice_type(anchor) // 2


def stratum_fits(anchor: LatticeModule, h: int) -> bool:
    """Whether the stratum anchored at Λ is representable in the window.

    Z strata with t > h always fit; the worst point and Y strata need π^{-1}Λ in the window.
    """
    return lattice_type(anchor) > 2 * h or fits_window(anchor, -1)


def _subspace_bases(quotient: SandwichQuotient, span: np.ndarray, d: int) -> Iterator[np.ndarray]:
    """Bases of every d-subspace of the row span of `span` (codes over the quotient field)."""
    dim = span.shape[0]
    if d < 0 or d > dim:
        return
    if d == 0:
        yield np.zeros((0, quotient.dim), dtype=np.int64)
        return
    field_ = quotient.field
    count = gaussian_binomial(dim, d, field_.order)
    if count > GRASSMANNIAN_CAP:
        raise BoundExceededError(f"{count} subspaces exceed the cap {GRASSMANNIAN_CAP}", {"d": d, "dim": dim})
    GF = field_class(field_)
    for coords in enumerate_echelon(field_, d, dim):
        yield mat_mul(GF, coords, span)


# Raw model


def worst_point_set(anchor: LatticeModule, h: int, m: int) -> StratumSet:
    """Z(Λ) = Y(Λ^♯) for a type-2h anchor: M = Λ̆ and M' any hyperplane over ΠM^♯.

    Raises:
        BadParametersError: If Λ does not have type 2h
        WindowOverflowError: If ΠΛ^♯ leaves the window
    """
    t = _anchor_t(anchor, h)
    if t != h:
        raise BadParametersError(f"Worst point needs type {2 * h}, got {2 * t}", {"h": h, "t": t})
    if not stratum_fits(anchor, h):
        raise WindowOverflowError("ΠΛ^♯ leaves the window", {"h": h})
    M = extend(anchor, m)
    Md = hermitian_dual(M)
    quotient = SandwichQuotient(scale_by_pi(Md, 1), Md)
    points = []
    candidates = 0
    for basis in _subspace_bases(quotient, np.eye(quotient.dim, dtype=np.int64), quotient.dim - 1):
        candidates += 1
        pt = DieudonnePair(M, quotient.preimage(basis), anchor, Stratum.Z)
        if all(dieudonne_conditions(pt, h).values()):
            points.append(pt)
    logger.debug("Worst point set h=%d m=%d: %d points", h, m, len(points))
    return StratumSet(tuple(points), {"type": 2 * h, "h": h, "m": m, "model": "raw"}, candidates=candidates)


def rz_points_raw(anchor: LatticeModule, h: int, m: int, stratum: Stratum) -> StratumSet:
    """Enumerate stratum points by re-checking every Dieudonné condition over the chain ring.

    Candidates M come from all subspaces of the anchor's quotient (no isotropy or
    Frobenius filter); candidates M' from hyperplanes of M^♯ inside τ^{-1}(M^♯) ∩ M^♯.

    Args:
        anchor: Rational vertex lattice Λ of type 2t
        h: Splitting level
        m: Coefficient level, points over F_{q^m}
        stratum: Z (t > h) or Y (t < h); t = h gives the worst point either way

    Raises:
        BadParametersError: On invalid anchors, h, or stratum/type mismatch
        PiModularExcludedError: If n is even and 2h = n
        WindowOverflowError: If a Y stratum leaves the window
    """
    t = _anchor_t(anchor, h)
    if t == h:
        return worst_point_set(anchor, h, m)
    if stratum is Stratum.Z and t < h:
        raise BadParametersError(f"Z stratum needs t > h, got t={t}, h={h}", {"t": t, "h": h})
    if stratum is Stratum.Y and t > h:
        raise BadParametersError(f"Y stratum needs t < h, got t={t}, h={h}", {"t": t, "h": h})
    if stratum is Stratum.Y and not stratum_fits(anchor, h):
        raise WindowOverflowError("π^{-1}Λ leaves the window", {"t": t, "h": h})

    L = extend(anchor, m)
    Ld = extend(hermitian_dual(anchor), m)
    if stratum is Stratum.Z:
        quotient = SandwichQuotient(L, Ld)
        d, d_prime = t - h, t + h - 1
    else:
        quotient = SandwichQuotient(Ld, scale_by_pi(L, -1))
        d, d_prime = h - t, h - t - 1

    points: List[DieudonnePair] = []
    candidates = 0
    automatic = 0
    whole = np.eye(quotient.dim, dtype=np.int64)
    for basis in _subspace_bases(quotient, whole, d):
        candidates += 1
        if stratum is Stratum.Z:
            M = quotient.preimage(basis)
            Md = hermitian_dual(M)
        else:
            Md = quotient.preimage(basis)
            M = hermitian_dual(Md)
        lat = lattice_conditions(M, h)
        if stratum is Stratum.Z:
            automatic += (not lat["tau_lower"]) + (not lat["tau_upper"])
        if not all(lat.values()):
            continue
        X = lattice_intersect(tau_inverse(Md), Md)
        image_x = quotient.image(X)
        for sub in _subspace_bases(quotient, image_x, d_prime):
            pt = DieudonnePair(M, quotient.preimage(sub), anchor, stratum)
            checks = pair_conditions(M, pt.Mprime)
            if stratum is Stratum.Z:
                automatic += not checks["v_lower"]
            checks.update(sandwich_conditions(pt))
            if all(checks.values()):
                points.append(pt)
    if automatic:
        logger.warning("%d automatic-condition violations at t=%d h=%d m=%d", automatic, t, h, m)
    logger.debug("Raw %s stratum t=%d h=%d m=%d: %d points from %d candidates", stratum.value, t, h, m, len(points), candidates)
    return StratumSet(
        tuple(points),
        {"type": 2 * t, "h": h, "m": m, "stratum": stratum.value, "model": "raw"},
        candidates=candidates,
        automatic_violations=automatic,
    )


# Quotient model bijections


def _z_quotient(anchor: LatticeModule, m: int) -> Tuple[Any, SandwichQuotient]:
    space = symplectic_quotient(anchor)
    return space, quotient_at_level(space, m)


def _y_quotient(anchor: LatticeModule, m: int) -> Tuple[Any, SandwichQuotient]:
    space = orthogonal_quotient(anchor)
    return space, quotient_at_level(space, m)


def f_Z(pt: DieudonnePair) -> StratumPointQ:
    """(M, M') ↦ (Φ^{-1}(M/Λ̆), M'/Λ̆).

    Raises:
        NotSandwichedError: If M or M' is not between Λ̆ and Λ̆^♯
    """
    space, quotient = _z_quotient(pt.anchor, pt.m)
    U = frobenius(make_subspace(space, pt.m, quotient.image(pt.M)), times=-1)
    Uprime = make_subspace(space, pt.m, quotient.image(pt.Mprime))
    return StratumPointQ(U, Uprime, Model.S_PRIME)


def f_Z_inverse(qpt: StratumPointQ, anchor: LatticeModule) -> DieudonnePair:
    _, quotient = _z_quotient(anchor, qpt.U.m)
    M = quotient.preimage(frobenius(qpt.U).matrix)
    return DieudonnePair(M, quotient.preimage(qpt.Uprime.matrix), anchor, Stratum.Z)


def f_Y(pt: DieudonnePair) -> StratumPointQ:
    """(M, M') ↦ (Φ^{-1}(M^♯/Λ̆^♯), M'/Λ̆^♯).

    Raises:
        NotSandwichedError: If M^♯ or M' is not between Λ̆^♯ and π^{-1}Λ̆
    """
    space, quotient = _y_quotient(pt.anchor, pt.m)
    U = frobenius(make_subspace(space, pt.m, quotient.image(hermitian_dual(pt.M))), times=-1)
    Uprime = make_subspace(space, pt.m, quotient.image(pt.Mprime))
    return StratumPointQ(U, Uprime, Model.R_PRIME)


def f_Y_inverse(qpt: StratumPointQ, anchor: LatticeModule) -> DieudonnePair:
    _, quotient = _y_quotient(anchor, qpt.U.m)
    Md = quotient.preimage(frobenius(qpt.U).matrix)
    return DieudonnePair(hermitian_dual(Md), quotient.preimage(qpt.Uprime.matrix), anchor, Stratum.Y)


def quotient_points(anchor: LatticeModule, h: int, m: int) -> StratumSet:
    """Stratum points of Λ through S' / R' and the inverse bijections.

    The stratum is Z for type > 2h, Y for type < 2h and the worst point for type 2h.
    """
    t = _anchor_t(anchor, h)
    if t == h:
        return worst_point_set(anchor, h, m)
    if t > h:
        pts = [f_Z_inverse(q, anchor) for q in enumerate_Sprime(symplectic_quotient(anchor), h, m)]
        stratum = Stratum.Z
    else:
        if not stratum_fits(anchor, h):
            raise WindowOverflowError("π^{-1}Λ leaves the window", {"t": t, "h": h})
        pts = [f_Y_inverse(q, anchor) for q in enumerate_Rprime(orthogonal_quotient(anchor), h, m)]
        stratum = Stratum.Y
    return StratumSet(tuple(pts), {"type": 2 * t, "h": h, "m": m, "stratum": stratum.value, "model": "quotient"})


def oracle_check(n: int, h: int, t: int, p: int, m: int, window: int = 1) -> CheckResult:
    """Raw model against the quotient model under f_Z / f_Y, point by point."""
    amb = hermitian_ambient(n, window, p)
    anchor = standard_anchor(amb, t)
    params = {"n": n, "h": h, "t": t, "p": p, "m": m, "window": window}
    stratum = Stratum.Z if t > h else Stratum.Y
    raw = rz_points_raw(anchor, h, m, stratum)
    if stratum is Stratum.Z:
        quotient = {q.key for q in enumerate_Sprime(symplectic_quotient(anchor), h, m)}
        forward, backward = f_Z, f_Z_inverse
    else:
        quotient = {q.key for q in enumerate_Rprime(orthogonal_quotient(anchor), h, m)}
        forward, backward = f_Y, f_Y_inverse
    images = set()
    bad_round_trip = []
    for pt in raw:
        qpt = forward(pt)  # type: ignore[arg-type]
        images.add(qpt.key)
        if backward(qpt, anchor).key != pt.key:
            bad_round_trip.append(pt.to_json())  # type: ignore[union-attr]
    passed = images == quotient and len(images) == len(raw) and not bad_round_trip and raw.automatic_violations == 0
    witness: Dict[str, Any] = {
        "raw": len(raw),
        "quotient": len(quotient),
        "candidates": raw.candidates,
        "automatic_violations": raw.automatic_violations,
    }
    if bad_round_trip:
        witness["round_trip"] = bad_round_trip[:3]
    return CheckResult("oracle_equivalence", params, EXHAUSTIVE, passed, witness)


# Vertex hulls


def _tau_hull(L: LatticeModule) -> LatticeModule:
    """L + τL + ... + τ^i L for the first i at which the sum is τ-stable."""
    T = L
    for _ in range(2 * L.ambient.m + 1):
        nxt = lattice_sum(T, tau(T))
        if nxt == T:
            return T
        T = nxt
    raise NotStableError("τ-hull did not stabilize", {"m": L.ambient.m})


def maximal_vertex_of(M: LatticeModule) -> LatticeModule:
    """The largest rational lattice Λ₁ with Λ̆₁ ⊆ M, as T(M^♯)^♯ ∩ C.

    Raises:
        NotStableError: If the τ-hull does not stabilize
    """
    return descend(hermitian_dual(_tau_hull(hermitian_dual(M))))


def minimal_vertex_of(M: LatticeModule) -> LatticeModule:
    """The smallest rational lattice Λ₂ with M ⊆ Λ̆₂, as T(M) ∩ C."""
    return descend(_tau_hull(M))


# Special cycles


def special_cycle_points(L: LatticeModule, points: Iterable[StratumPoint], cycle: Stratum) -> StratumSet:
    """Points of Z'(L) (cycle Z: L̆ ⊆ M) or of Y'(L^♯) (cycle Y: L^♯ ⊆ M^♯, i.e. M ⊆ L̆) among `points`.

    Only the reduced locus is seen: membership is a condition on M alone.
    """
    extended: Dict[int, LatticeModule] = {}
    kept = []
    for pt in points:
        m = pt.M.ambient.m  # type: ignore[union-attr]
        if m not in extended:
            extended[m] = extend(L, m)
        Lm = extended[m]
        inside = contains(pt.M, Lm) if cycle is Stratum.Z else contains(Lm, pt.M)  # type: ignore[union-attr]
        if inside:
            kept.append(pt)
    return StratumSet(tuple(kept), {"cycle": cycle.value, "lattice": lattice_to_json(L)})


def cycle_meets_stratum(L: LatticeModule, anchor: LatticeModule, h: int, cycle: Stratum) -> bool:
    """Whether Z'(L) meets Z(Λ) (resp. Y'(L^♯) meets Y(Λ^♯)).

    True iff Λ' = L + Λ (resp. L ∩ Λ) is a vertex lattice of type ≥ 2h (resp. ≤ 2h).
    This implies L ⊆ Λ^♯ (resp. L^♯ ⊆ π^{-1}Λ), which alone is not enough once L is
    not integral or Λ' has the wrong type.
    """
    if cycle is Stratum.Z:
        C = lattice_sum(L, anchor)
        return is_vertex(C) and lattice_type(C) >= 2 * h
    C = lattice_intersect(L, anchor)
    return is_vertex(C) and lattice_type(C) <= 2 * h


# Stratification


def _pairs(items: Sequence[LatticeModule], rng: random.Random, sample_size: int) -> Tuple[List[Tuple[LatticeModule, LatticeModule]], str]:
    pairs = list(combinations(items, 2))
    if len(pairs) <= sample_size:
        return pairs, EXHAUSTIVE
    return rng.sample(pairs, sample_size), SAMPLED


def _ordered_pairs(
    left: Sequence[LatticeModule], right: Sequence[LatticeModule], rng: random.Random, sample_size: int
) -> Tuple[List[Tuple[LatticeModule, LatticeModule]], str]:
    pairs = [(a, b) for a in left for b in right if a != b]
    if len(pairs) <= sample_size:
        return pairs, EXHAUSTIVE
    return rng.sample(pairs, sample_size), SAMPLED


def _lattice_witness(*lattices: LatticeModule) -> List[dict]:
    return [lattice_to_json(L) for L in lattices]


class _Tally:
    """Pass/fail bookkeeping for one check with a few witnesses."""

    def __init__(self, check_id: str, params: Dict[str, Any], status: str = EXHAUSTIVE) -> None:
        self.check_id = check_id
        self.params = params
        self.status = status
        self.checked = 0
        self.failures: List[Any] = []

    def record(self, ok: bool, witness: Any = None) -> None:
        self.checked += 1
        if not ok and len(self.failures) < 3:
            self.failures.append(witness)
        elif not ok:
            self.failures.append(None)

    def result(self) -> CheckResult:
        witness: Dict[str, Any] = {"checked": self.checked}
        if self.failures:
            witness["failures"] = len(self.failures)
            witness["examples"] = [w for w in self.failures if w is not None]
        return CheckResult(self.check_id, self.params, self.status, not self.failures, witness)


def verify_stratification(
    n: int,
    h: int,
    p: int,
    m: int,
    window: int = 1,
    seed: int = 0,
    sample_size: int = PAIR_SAMPLE_SIZE,
) -> List[CheckResult]:
    """Check the covering, inclusion and intersection pattern of the strata.

    Every vertex lattice of the window anchors a Z stratum (type ≥ 2h) and/or a Y stratum
    (type ≤ 2h); strata leaving the window are skipped and counted.

    Returns:
        CheckResults for: stratum_count, cover, inclusion_Z, inclusion_Y, special_cycle_Z,
        special_cycle_Y, zy_intersection, zz_intersection, yy_intersection, worst_disjoint,
        worst_meet_Z, worst_meet_Y, worst_count

    Raises:
        BadParametersError: On invalid h
        PiModularExcludedError: If n is even and 2h = n
        BoundExceededError: If an enumeration exceeds its cap
    """
    check_splitting_level(n, h)
    amb = hermitian_ambient(n, window, p)
    params = {"n": n, "h": h, "p": p, "m": m, "window": window}
    rng = random.Random(seed)
    Q = p**m

    lattices = list(enumerate_vertex_lattices(amb))
    types = {L.key: lattice_type(L) for L in lattices}
    by_key = {L.key: L for L in lattices}
    z_anchors = [L for L in lattices if types[L.key] > 2 * h]
    y_anchors = [L for L in lattices if types[L.key] < 2 * h and stratum_fits(L, h)]
    worst = [L for L in lattices if types[L.key] == 2 * h and stratum_fits(L, h)]
    skipped = sum(1 for L in lattices if types[L.key] <= 2 * h and not stratum_fits(L, h))

    strata: Dict[Any, StratumSet] = {}
    for L in z_anchors + y_anchors + worst:
        strata[L.key] = quotient_points(L, h, m)
    logger.info("Stratification n=%d h=%d m=%d: %d anchors, %d skipped", n, h, m, len(strata), skipped)

    results: List[CheckResult] = [
        CheckResult(
            "stratum_count",
            params,
            EXHAUSTIVE,
            True,
            {"anchors": len(strata), "skipped": skipped, "points": sum(len(s) for s in strata.values())},
        )
    ]

    # every point lies in the stratum of its maximal or minimal vertex lattice
    cover = _Tally("cover", params)
    for key, sset in strata.items():
        for pt in sset:
            M = pt.M  # type: ignore[union-attr]
            L1 = maximal_vertex_of(M)
            if is_vertex(L1) and lattice_type(L1) >= 2 * h:
                home = strata.get(L1.key)
            else:
                L2 = minimal_vertex_of(M)
                ok_type = is_vertex(L2) and lattice_type(L2) <= 2 * h
                home = strata.get(L2.key) if ok_type else None
                if not ok_type:
                    cover.record(False, {"anchor": _lattice_witness(by_key[key]), "point": pt.to_json()})  # type: ignore[union-attr]
                    continue
            if home is None:
                continue
            cover.record(pt.key in home, {"anchor": _lattice_witness(by_key[key])})
    results.append(cover.result())

    def keys_of(L: LatticeModule) -> frozenset:
        return strata[L.key].keys()

    # inclusions among Z strata and among Y strata
    pairs, status = _ordered_pairs(z_anchors, z_anchors, rng, sample_size)
    incl_z = _Tally("inclusion_Z", params, status)
    for A, B in pairs:
        incl_z.record(contains(B, A) == (keys_of(B) <= keys_of(A)), _lattice_witness(A, B))
    results.append(incl_z.result())

    pairs, status = _ordered_pairs(y_anchors, y_anchors, rng, sample_size)
    incl_y = _Tally("inclusion_Y", params, status)
    for A, B in pairs:
        incl_y.record(contains(B, A) == (keys_of(A) <= keys_of(B)), _lattice_witness(A, B))
    results.append(incl_y.result())

    # Z'(L) and Y'(L^♯) are the unions of Z(Λ) over L ⊆ Λ and of Y(Λ^♯) over Λ ⊆ L
    pool = [pt for sset in strata.values() for pt in sset]
    unfit = [L for L in lattices if types[L.key] <= 2 * h and not stratum_fits(L, h)]
    if len(lattices) <= sample_size:
        cycle_lattices, status = lattices, EXHAUSTIVE
    else:
        cycle_lattices, status = rng.sample(lattices, sample_size), SAMPLED
    for check_id, cycle, homes, below in (
        ("special_cycle_Z", Stratum.Z, z_anchors + worst, lambda L, A: contains(A, L)),
        ("special_cycle_Y", Stratum.Y, y_anchors + worst, lambda L, A: contains(L, A)),
    ):
        tally = _Tally(check_id, params, status)
        for L in cycle_lattices:
            # a stratum left out of the window would be missing from both sides
            if any(below(L, S) for S in unfit):
                continue
            found = special_cycle_points(L, pool, cycle).keys()
            union = frozenset().union(*(keys_of(A) for A in homes if below(L, A)))
            wrong_meets = [
                lattice_to_json(A) for A in homes if bool(found & keys_of(A)) != cycle_meets_stratum(L, A, h, cycle)
            ]
            # a meet needs L ⊆ Λ^♯, resp. πΛ^♯ ⊆ L
            necessary = all(
                contains(hermitian_dual(A), L) if cycle is Stratum.Z else contains(L, scale_by_pi(hermitian_dual(A)))
                for A in homes
                if found & keys_of(A)
            )
            witness = {
                "lattice": lattice_to_json(L),
                "points": len(found),
                "union": len(union),
                "wrong_meets": wrong_meets[:3],
            }
            tally.record(found == union and not wrong_meets and necessary, witness)
        results.append(tally.result())

    # Z ∩ Y: nonempty iff Λ₁ ⊆ Λ₂, of the size of the bracket variety
    pairs, status = _ordered_pairs(z_anchors, y_anchors, rng, sample_size)
    zy = _Tally("zy_intersection", params, status)
    for A, B in pairs:
        meet = len(keys_of(A) & keys_of(B))
        if contains(B, A):
            spV = orthogonal_quotient(B)
            W = subspace_of_lattice(B, hermitian_dual(A), FormKind.ORTHOGONAL)
            expected = sum(1 for _ in enumerate_Rprime_bracket(spV, W, h, m))
            zy.record(meet == expected and meet > 0, {"lattices": _lattice_witness(A, B), "meet": meet, "expected": expected})
        else:
            zy.record(meet == 0, {"lattices": _lattice_witness(A, B), "meet": meet})
    results.append(zy.result())

    # Z ∩ Z' and Y ∩ Y'. When Λ'' = Λ + Λ' (resp. Λ ∩ Λ') has type exactly 2h, M = Λ̆'' and
    # M' must contain Λ̆ + Λ̆' = Λ̆'' (resp. Λ̆^♯ + Λ̆'^♯ = M^♯): the meet is P(Λ''^♯/Λ'') on the
    # Z side and empty on the Y side.
    for check_id, anchors, combine, z_side in (
        ("zz_intersection", z_anchors, lattice_sum, True),
        ("yy_intersection", y_anchors, lattice_intersect, False),
    ):
        pairs, status = _pairs(anchors, rng, sample_size)
        tally = _Tally(check_id, params, status)
        for A, B in pairs:
            meet = keys_of(A) & keys_of(B)
            C = combine(A, B)
            vertex = is_vertex(C)
            tc = lattice_type(C) if vertex else -1
            admissible = vertex and (tc > 2 * h if z_side else tc < 2 * h)
            witness: Dict[str, Any] = {"lattices": _lattice_witness(A, B), "meet": len(meet), "type": tc}
            if admissible:
                ok = bool(meet) and (C.key not in strata or meet == keys_of(C))
            elif tc == 2 * h:
                expected = projective_count(2 * h, Q) if z_side else 0
                witness["expected"] = expected
                ok = len(meet) == expected and (C.key not in strata or meet <= keys_of(C))
            else:
                ok = not meet
            tally.record(ok, witness)
        results.append(tally.result())

    # distinct worst points never meet
    pairs, status = _pairs(worst, rng, sample_size)
    disjoint = _Tally("worst_disjoint", params, status)
    for A, B in pairs:
        disjoint.record(not (keys_of(A) & keys_of(B)), _lattice_witness(A, B))
    results.append(disjoint.result())

    # Z(Λ) ∩ Z(Λ₀) ≅ P^{h+t-1} iff Λ ⊆ Λ₀, Y(Λ^♯) ∩ Y(Λ₀^♯) ≅ P^{h-t-1} iff Λ₀ ⊆ Λ
    pairs, status = _ordered_pairs(z_anchors, worst, rng, sample_size)
    meet_z = _Tally("worst_meet_Z", params, status)
    for A, B in pairs:
        meet = len(keys_of(A) & keys_of(B))
        t = types[A.key] // 2
        expected = projective_count(h + t, Q) if contains(B, A) else 0
        meet_z.record(meet == expected, {"lattices": _lattice_witness(A, B), "meet": meet, "expected": expected})
    results.append(meet_z.result())

    pairs, status = _ordered_pairs(y_anchors, worst, rng, sample_size)
    meet_y = _Tally("worst_meet_Y", params, status)
    for A, B in pairs:
        meet = len(keys_of(A) & keys_of(B))
        t = types[A.key] // 2
        expected = projective_count(h - t, Q) if contains(A, B) else 0
        meet_y.record(meet == expected, {"lattices": _lattice_witness(A, B), "meet": meet, "expected": expected})
    results.append(meet_y.result())

    count = _Tally("worst_count", params)
    for L in worst:
        found = len(strata[L.key])
        count.record(found == projective_count(n, Q), {"lattice": _lattice_witness(L), "points": found})
    results.append(count.result())
    return results


def worst_count_check(n: int, h: int, p: int, m: int, window: int = 1) -> CheckResult:
    """|Z(Λ₀)(F_{q^m})| = |P^{n-1}(F_{q^m})| for the standard type-2h anchor."""
    check_splitting_level(n, h)
    anchor = standard_anchor(hermitian_ambient(n, window, p), h)
    points = worst_point_set(anchor, h, m)
    expected = projective_count(n, p**m)
    return CheckResult(
        "worst_point",
        {"n": n, "h": h, "p": p, "m": m, "window": window},
        EXHAUSTIVE,
        len(points) == expected,
        {"points": len(points), "expected": expected},
    )


def hull_check(n: int, h: int, t: int, p: int, m: int, window: int = 1) -> CheckResult:
    """On every point of the standard stratum: Λ ⊆ maximal_vertex_of(M) of type ≥ 2h, or
    minimal_vertex_of(M) ⊆ Λ of type ≤ 2h."""
    amb = hermitian_ambient(n, window, p)
    anchor = standard_anchor(amb, t)
    tally = _Tally("vertex_hulls", {"n": n, "h": h, "t": t, "p": p, "m": m, "window": window})
    for pt in quotient_points(anchor, h, m):
        M = pt.M  # type: ignore[union-attr]
        if t >= h:
            L = maximal_vertex_of(M)
            ok = contains(L, anchor) and is_vertex(L) and lattice_type(L) >= 2 * h
        else:
            L = minimal_vertex_of(M)
            ok = contains(anchor, L) and is_vertex(L) and lattice_type(L) <= 2 * h
        tally.record(ok, pt.to_json())  # type: ignore[union-attr]
    return tally.result()
