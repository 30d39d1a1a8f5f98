"""Affine charts of the strata splitting model as polynomial systems over F_q.

Three kinds of chart:

* Z chart (t > h): variables V11, V12 (h each), V21, Z23 (t-h each); equations
  v_{i0} - 1 and every 2x2 minor of the (t-h)x2 matrix (V21 | H Z23).
* Y chart (t < h): variables V'11 (h-t), Z2 (n-2h); the single equation v_{i0} - 1.
* intersection chart (t2 < h < t1): variables V'11 (h-t2), Z23 (t1-h); v_{i0} - 1.

Systems are built with sympy and evaluated over F_{q^m} on galois FieldArrays.
"""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from src.config import CHART_ASSIGNMENT_BOUND, PAIR_SAMPLE_SIZE
from src.dlstrata import CountReport, estimate_dimension
from src.exceptions import BadParametersError, BoundExceededError
from src.gf import FieldClass, field_class, field_descriptor, rank, to_codes
from src.lattices import check_splitting_level

logger = logging.getLogger(__name__)

Term = Tuple[int, Tuple[Tuple[int, int], ...]]  # (coefficient, ((variable, exponent), ...))


class ChartKind(Enum):
    Z_CHART = "Z_chart"
    Y_CHART = "Y_chart"
    INTERSECTION = "intersection_chart"


@dataclass(frozen=True)
class ChartSystem:
    """Variables, named blocks and equations of one affine chart."""

    kind: ChartKind
    params: Tuple[Tuple[str, int], ...]
    blocks: Tuple[Tuple[str, Tuple[sympy.Symbol, ...]], ...]
    equations: Tuple[sympy.Expr, ...]
    pivot: sympy.Symbol
    claimed_dim: int
    flip: bool = True

    @property
    def variables(self) -> Tuple[sympy.Symbol, ...]:
        return tuple(v for _, block in self.blocks for v in block)

    @property
    def param_dict(self) -> Dict[str, int]:
        return dict(self.params)

    def block(self, name: str) -> Tuple[sympy.Symbol, ...]:
        return dict(self.blocks)[name]


@dataclass
class Certificate:
    """Outcome of jacobian_certify: smooth everywhere, or a singular witness."""

    status: str
    mode: str
    checked: int
    witness: Optional[Dict[str, int]] = None

    @property
    def smooth(self) -> bool:
        return self.status == "smooth_everywhere"

    def to_json(self) -> dict:
        data: Dict[str, Any] = {"status": self.status, "mode": self.mode, "checked": self.checked}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


def _symbols(prefix: str, count: int) -> Tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"{prefix}_{i}") for i in range(count))


def build_chart(
    kind: ChartKind,
    n: int,
    h: int,
    t: Optional[int] = None,
    t1: Optional[int] = None,
    t2: Optional[int] = None,
    pivot: int = 0,
    flip: bool = True,
) -> ChartSystem:
    """Build the equation system of one chart.

    Args:
        kind: Which chart
        n: Hermitian dimension
        h: Splitting level
        t: Half the anchor type (Z and Y charts)
        t1: Half the larger type (intersection chart)
        t2: Half the smaller type (intersection chart)
        pivot: Index i0 of the unit coordinate, into V11 ++ V12 ++ V21 for Z charts and
            into V'11 otherwise
        flip: Use H Z23 (True) or Z23 (False) in the minors of a Z chart

    Raises:
        BadParametersError: If the parameters are out of range for the chart kind
        PiModularExcludedError: If n is even and 2h = n

    Example:
        >>> c = build_chart(ChartKind.Z_CHART, 5, 1, t=2)
        >>> len(c.variables), len(c.equations)
        (4, 1)
    """
    check_splitting_level(n, h)
    if kind is ChartKind.Z_CHART:
        if t is None or not h < t <= n // 2:
            raise BadParametersError(f"Z chart needs h < t ≤ {n // 2}, got t={t}, h={h}", {"t": t, "h": h})
        k = t - h
        V11, V12, V21, Z23 = _symbols("v11", h), _symbols("v12", h), _symbols("v21", k), _symbols("z23", k)
        units = V11 + V12 + V21
        if not 0 <= pivot < len(units):
            raise BadParametersError(f"Pivot {pivot} outside 0..{len(units) - 1}", {"pivot": pivot})
        HZ = tuple(reversed(Z23)) if flip else Z23
        minors = [sympy.expand(V21[i] * HZ[j] - V21[j] * HZ[i]) for i, j in combinations(range(k), 2)]
        blocks = (("V11", V11), ("V12", V12), ("V21", V21), ("Z23", Z23))
        params = (("n", n), ("h", h), ("t", t), ("pivot", pivot))
        claimed = t + h
        unit = units[pivot]
    elif kind is ChartKind.Y_CHART:
        if t is None or not 0 <= t < h:
            raise BadParametersError(f"Y chart needs 0 ≤ t < h, got t={t}, h={h}", {"t": t, "h": h})
        V = _symbols("w11", h - t)
        Z2 = _symbols("z2", n - 2 * h)
        if not 0 <= pivot < len(V):
            raise BadParametersError(f"Pivot {pivot} outside 0..{len(V) - 1}", {"pivot": pivot})
        minors = []
        blocks = (("V'11", V), ("Z2", Z2))
        params = (("n", n), ("h", h), ("t", t), ("pivot", pivot))
        claimed = n - t - h - 1
        unit = V[pivot]
    else:
        if t1 is None or t2 is None or not 0 <= t2 < h < t1 <= n // 2:
            raise BadParametersError(
                f"Intersection chart needs t2 < h < t1, got t1={t1}, t2={t2}, h={h}", {"t1": t1, "t2": t2, "h": h}
            )
        V = _symbols("w11", h - t2)
        Z23 = _symbols("z23", t1 - h)
        if not 0 <= pivot < len(V):
            raise BadParametersError(f"Pivot {pivot} outside 0..{len(V) - 1}", {"pivot": pivot})
        minors = []
        blocks = (("V'11", V), ("Z23", Z23))
        params = (("n", n), ("h", h), ("t1", t1), ("t2", t2), ("pivot", pivot))
        claimed = t1 - t2 - 1
        unit = V[pivot]
    equations = (unit - 1,) + tuple(minors)
    return ChartSystem(kind, params, blocks, equations, unit, claimed, flip)


def chart_to_json(c: ChartSystem) -> dict:
    """Variables by name and equations as lists of [exponent vector, coefficient]."""
    variables = c.variables
    equations = []
    for eq in c.equations:
        poly = sympy.Poly(eq, *variables)
        equations.append([[list(monom), int(coeff)] for monom, coeff in poly.terms()])
    return {
        "kind": c.kind.value,
        "params": c.param_dict,
        "variables": [str(v) for v in variables],
        "blocks": {name: [str(v) for v in block] for name, block in c.blocks},
        "equations": equations,
        "claimed_dim": c.claimed_dim,
    }


# Evaluation over F_{q^m}


def _compile(exprs: Sequence[sympy.Expr], variables: Sequence[sympy.Symbol], p: int) -> List[List[Term]]:
    """Each polynomial as integer terms over the listed variables (coefficients mod p)."""
    compiled = []
    for expr in exprs:
        poly = sympy.Poly(expr, *variables)
        terms = []
        for monom, coeff in poly.terms():
            c = int(coeff) % p
            if c:
                terms.append((c, tuple((i, e) for i, e in enumerate(monom) if e)))
        compiled.append(terms)
    return compiled


def _evaluate(GF: FieldClass, terms: Sequence[Term], values: np.ndarray) -> np.ndarray:
    """Values of one compiled polynomial on each row of `values` (field codes)."""
    x = GF(values)
    acc = GF.Zeros(values.shape[0])
    for coeff, factors in terms:
        # integer coefficients are prime-field elements, whose code is the integer itself
        term = GF(np.full(values.shape[0], coeff, dtype=np.int64))
        for var, exp in factors:
            term = term * x[:, var] ** exp
        acc = acc + term
    return to_codes(acc)


def _involved(c: ChartSystem) -> Tuple[List[sympy.Symbol], int]:
    """Variables occurring in some equation, and the number of free ones."""
    used = set().union(*(eq.free_symbols for eq in c.equations))
    involved = [v for v in c.variables if v in used]
    return involved, len(c.variables) - len(involved)


def _assignments(order: int, count: int) -> np.ndarray:
    if count == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((order,) * count).reshape(count, -1).T
    return grids.astype(np.int64)


def _solutions(c: ChartSystem, m: int, p: int) -> Tuple[List[sympy.Symbol], np.ndarray, FieldClass]:
    desc = field_descriptor(p, 1, m)
    GF = field_class(desc)
    involved, _ = _involved(c)
    total = desc.order ** len(involved)
    if total > CHART_ASSIGNMENT_BOUND:
        raise BoundExceededError(
            f"{total} assignments exceed the bound {CHART_ASSIGNMENT_BOUND}", {"vars": len(involved), "Q": desc.order}
        )
    values = _assignments(desc.order, len(involved))
    mask = np.ones(values.shape[0], dtype=bool)
    for terms in _compile(c.equations, involved, p):
        mask &= _evaluate(GF, terms, values) == 0
    return involved, values[mask], GF


def rank_stratified_count(c: ChartSystem, Q: int) -> int:
    """Closed point count over F_Q from the rank ≤ 1 structure of the minors.

    With the unit in V11 or V12 the minor block ranges over all rank ≤ 1 matrices:
    Q^{2h-1} (1 + (Q^{t-h} - 1)(Q + 1)). With the unit in V21 the column H Z23 is a
    multiple of V21: Q^{2h+t-h}. Y and intersection charts are affine spaces.
    """
    if c.kind is not ChartKind.Z_CHART:
        return Q ** (len(c.variables) - 1)
    p = c.param_dict
    h, k = p["h"], p["t"] - p["h"]
    if p["pivot"] < 2 * h:
        return Q ** (2 * h - 1) * (1 + (Q**k - 1) * (Q + 1))
    return Q ** (2 * h + k)


def count_chart_points(c: ChartSystem, m: int, p: int = 3, method: str = "auto") -> int:
    """Number of F_{p^m}-points of the chart.

    Args:
        c: Chart system
        m: Level
        p: Characteristic
        method: "brute" (evaluate every assignment of the involved variables), "closed"
            (rank-stratified formula) or "auto" (brute within the bound, else closed)

    Raises:
        BoundExceededError: If method is "brute" and the assignments exceed the bound
        ValueError: If method is unknown
    """
    Q = p**m
    if method == "closed":
        return rank_stratified_count(c, Q)
    if method not in ("brute", "auto"):
        raise ValueError(f"Unknown counting method: {method}")
    try:
        _, sols, _ = _solutions(c, m, p)
    except BoundExceededError:
        if method == "brute":
            raise
        logger.info("Chart %s over F_%d beyond brute-force bound, using closed count", c.kind.value, Q)
        return rank_stratified_count(c, Q)
    _, free = _involved(c)
    return int(sols.shape[0]) * Q**free


def pivot_profile(kind: ChartKind, n: int, h: int, m: int, p: int = 3, **types: int) -> Dict[int, int]:
    """Point counts for every admissible pivot position."""
    base = build_chart(kind, n, h, pivot=0, **types)
    size = len(base.block("V'11")) if kind is not ChartKind.Z_CHART else len(base.variables) - len(base.block("Z23"))
    return {i: count_chart_points(build_chart(kind, n, h, pivot=i, **types), m, p) for i in range(size)}


def rank_identity_violations(c: ChartSystem, m: int, p: int = 3) -> int:
    """Assignments of (V21, Z23) where "minors vanish" and "rank(V21 | H Z23) ≤ 1" disagree."""
    if c.kind is not ChartKind.Z_CHART:
        return 0
    V21, Z23 = c.block("V21"), c.block("Z23")
    k = len(V21)
    desc = field_descriptor(p, 1, m)
    GF = field_class(desc)
    minors = _compile(c.equations[1:], V21 + Z23, p)
    bad = 0
    for row in product(range(desc.order), repeat=2 * k):
        values = np.array([row], dtype=np.int64)
        vanish = all(_evaluate(GF, terms, values)[0] == 0 for terms in minors)
        col = list(row[k:])
        if c.flip:
            col = col[::-1]
        matrix = np.array([list(row[:k]), col], dtype=np.int64)
        if vanish != (rank(GF, matrix) <= 1):
            bad += 1
    return bad


def jacobian_certify(
    c: ChartSystem,
    m: int,
    p: int = 3,
    mode: str = "exhaustive",
    seed: int = 0,
    sample_size: int = PAIR_SAMPLE_SIZE,
) -> Certificate:
    """Look for a point where the Jacobian rank falls below the codimension.

    The codimension is the number of variables minus the claimed dimension; free
    variables never enter the Jacobian, so solutions are taken over the involved ones.

    Args:
        c: Chart system
        m: Level
        p: Characteristic
        mode: "exhaustive" (every solution) or "sampled" (a seeded sample)
        seed: Sampling seed
        sample_size: Sample size in sampled mode

    Raises:
        BoundExceededError: If the solutions cannot be enumerated
        ValueError: If mode is unknown
    """
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"Unknown certification mode: {mode}")
    codim = len(c.variables) - c.claimed_dim
    involved, sols, GF = _solutions(c, m, p)
    jac = sympy.Matrix(c.equations).jacobian(involved)
    entries = _compile(list(jac), involved, p)
    rows, cols = jac.shape
    indices = list(range(sols.shape[0]))
    if mode == "sampled" and len(indices) > sample_size:
        indices = sorted(random.Random(seed).sample(indices, sample_size))
    for idx in indices:
        point = sols[idx : idx + 1]
        values = np.array([_evaluate(GF, terms, point)[0] for terms in entries], dtype=np.int64).reshape(rows, cols)
        if rank(GF, values) < codim:
            witness = {str(v): int(x) for v, x in zip(involved, point[0])}
            logger.debug("Singular point of %s: %s", c.kind.value, witness)
            return Certificate("singular_witness", mode, len(indices), witness)
    return Certificate("smooth_everywhere", mode, len(indices))


def chart_vs_variety_dim(c: ChartSystem, p: int, m_max: int, r: int = 1) -> CountReport:
    """Growth-rate dimension of the chart's point counts over F_{q^m}, q = p^r, against its claimed dimension.

    Raises:
        InsufficientDataError: If fewer than two consecutive levels have points
    """
    counts = {m: count_chart_points(c, r * m, p) for m in range(1, m_max + 1)}
    return estimate_dimension(counts, p**r, claimed_dim=c.claimed_dim, model=c.kind.value, params=c.param_dict)


# Elimination audit


@dataclass
class AuditStep:
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, **self.detail}


@dataclass
class EliminationAudit:
    """Step-by-step replay of the elimination that lands on one chart."""

    kind: ChartKind
    params: Dict[str, int]
    steps: List[AuditStep]

    @property
    def passed(self) -> bool:
        return all(step.passed for step in self.steps)

    @property
    def first_failure(self) -> Optional[AuditStep]:
        return next((step for step in self.steps if not step.passed), None)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "params": self.params,
            "passed": self.passed,
            "steps": [step.to_json() for step in self.steps],
        }


def _outside_ideal(polys: Sequence[sympy.Expr], generators: Sequence[sympy.Expr], p: int) -> List[sympy.Expr]:
    """Members of `polys` not in the ideal of `generators` over F_p."""
    polys = [f for f in polys if f != 0]
    generators = [g for g in generators if g != 0]
    if not polys:
        return []
    gens = sorted(set().union(*(e.free_symbols for e in list(polys) + generators)), key=str)
    basis = sympy.groebner(generators, *gens, modulus=p, order="grevlex")
    return [f for f in polys if not basis.contains(f)]


def _column(symbols: Sequence[sympy.Symbol]) -> sympy.Matrix:
    return sympy.Matrix(len(symbols), 1, list(symbols))


def _antidiagonal(size: int, half: Optional[int] = None) -> sympy.Matrix:
    """H_size, or J = [[0, H_h], [-H_h, 0]] when `half` is given."""
    M = sympy.zeros(size, size)
    for i in range(size):
        M[i, size - 1 - i] = -1 if half is not None and i >= half else 1
    return M


def _entries(M: sympy.Matrix) -> List[sympy.Expr]:
    return [M[i, j] for i in range(M.rows) for j in range(M.cols)]


class _Frame:
    """Full coordinates V = (V1, V2), Z = (Z1, Z2) of a point on the lattice chain, with its Y and X blocks."""

    def __init__(
        self,
        V1: Sequence[sympy.Symbol],
        V2: Sequence[sympy.Symbol],
        Z1: Sequence[sympy.Symbol],
        Z2: Sequence[sympy.Symbol],
    ) -> None:
        h, s = len(V1) // 2, len(V2)
        self.V = tuple(V1) + tuple(V2)
        v1, v2, z1, z2 = _column(V1), _column(V2), _column(Z1), _column(Z2)
        H, J = _antidiagonal(s), _antidiagonal(2 * h, half=h)
        self.J = J
        self.N = sympy.expand((z2.T * H * z2)[0, 0])
        self.JV1 = J * v1
        self.relations = [sympy.expand(2 * z + self.N * jv) for z, jv in zip(Z1, self.JV1)]
        HZ2 = H * z2
        self.minors = [sympy.expand(V2[i] * HZ2[j] - V2[j] * HZ2[i]) for i, j in combinations(range(s), 2)]
        self.trace = sympy.expand((z2.T * v2)[0, 0]) if s else sympy.Integer(0)
        self.Y1, self.Y2 = v1 * z1.T, v1 * z2.T
        self.Y3, self.Y4 = v2 * z1.T, v2 * z2.T
        self.X1, self.X2 = -J * z1 * v1.T * J, J * z1 * v2.T * H
        self.X3, self.X4 = -H * z2 * v1.T * J, H * z2 * v2.T * H

    def z_side(self, k: int, head: int) -> Tuple[List[sympy.Expr], List[sympy.Expr]]:
        """Y and X conditions of λ1(Λ_M) ⊂ Λ_{-t}, λ2 ⊂ F_h for a Z anchor; `head` columns of Y2, Y4 vanish."""
        ys = _entries(self.Y1) + _entries(self.Y3) + _entries(self.Y2[:, :head]) + _entries(self.Y4[:, :head])
        xs = _entries(self.X1) + _entries(self.X2) + _entries(self.X3[k:, :]) + _entries(self.X4[k:, :])
        return ys, xs

    def y_side(self, k: int) -> List[sympy.Expr]:
        """Y conditions for a Y anchor: only the first k rows of Y1 and Y2 survive."""
        return _entries(self.Y1[k:, :]) + _entries(self.Y2[k:, :]) + _entries(self.Y3) + _entries(self.Y4)


class _Replay:
    """Substitutions applied so far and the steps recorded along the way."""

    def __init__(self, c: ChartSystem, p: int) -> None:
        self.chart = c
        self.p = p
        self.unit_equation = c.pivot - 1
        self.subs: Dict[sympy.Symbol, sympy.Expr] = {}
        self.steps: List[AuditStep] = []

    def apply(self, exprs: Sequence[Any]) -> List[sympy.Expr]:
        return [sympy.expand(sympy.sympify(e).xreplace(self.subs)) for e in exprs]

    def substitute(self, mapping: Dict[sympy.Symbol, Any]) -> None:
        new = {s: sympy.expand(sympy.sympify(e).xreplace(self.subs)) for s, e in mapping.items()}
        self.subs = {s: sympy.expand(e.xreplace(new)) for s, e in self.subs.items()}
        self.subs.update(new)

    def _record(self, name: str, passed: bool, **detail: Any) -> None:
        logger.debug("%s %s: %s", self.chart.kind.value, name, "ok" if passed else detail)
        self.steps.append(AuditStep(name, passed, detail))

    def kill(self, name: str, premise: Sequence[Any], targets: Sequence[sympy.Symbol]) -> None:
        """Targets lie in the ideal of the premise and the unit equation; they are then set to zero."""
        outside = _outside_ideal(self.apply(targets), self.apply(premise) + [self.unit_equation], self.p)
        self._record(name, not outside, eliminated=[str(z) for z in targets], outside=[str(f) for f in outside])
        self.substitute({z: 0 for z in targets})

    def contained(self, name: str, polys: Sequence[Any], premise: Sequence[Any]) -> None:
        outside = _outside_ideal(self.apply(polys), self.apply(premise) + [self.unit_equation], self.p)
        self._record(name, not outside, checked=len(polys), outside=[str(f) for f in outside[:3]])

    def vanish(self, name: str, polys: Sequence[Any]) -> None:
        residual = [e for e in self.apply(polys) if e != 0]
        self._record(name, not residual, checked=len(polys), residual=[str(e) for e in residual[:3]])

    def zero(self, name: str, symbols: Sequence[sympy.Symbol]) -> None:
        """Coordinates forced to zero by a lattice containment."""
        self.substitute({s: 0 for s in symbols})
        self._record(name, True, zeroed=[str(s) for s in symbols])

    def solve(self, name: str, mapping: Dict[sympy.Symbol, Any]) -> None:
        self.substitute(mapping)
        self._record(name, True, determined=[str(s) for s in mapping])

    def final(self, name: str, polys: Sequence[Any]) -> None:
        """What is left is the chart's ideal, and every eliminated coordinate is a function of chart variables."""
        c = self.chart
        remaining = [e for e in self.apply(polys) if e != 0] + [self.unit_equation]
        same = not _outside_ideal(c.equations, remaining, self.p) and not _outside_ideal(
            remaining, c.equations, self.p
        )
        chart_vars = set(c.variables)
        stray = sorted(
            {str(s) for e in remaining + list(self.subs.values()) for s in e.free_symbols if s not in chart_vars}
        )
        self._record(
            name,
            same and not stray,
            remaining=[str(e) for e in remaining],
            same_ideal=same,
            stray_variables=stray,
        )


def _audit_z(c: ChartSystem, p: int) -> List[AuditStep]:
    n, h, t = (c.param_dict[key] for key in ("n", "h", "t"))
    k, r = t - h, n - 2 * t
    V11, V12, V21, Z23 = (c.block(name) for name in ("V11", "V12", "V21", "Z23"))
    V22, V23 = _symbols("v22", r), _symbols("v23", k)
    Z21, Z22 = _symbols("z21", k), _symbols("z22", r)
    Z1 = _symbols("z1", 2 * h)
    f = _Frame(V11 + V12, V21 + V22 + V23, Z1, Z21 + Z22 + Z23)
    ys, xs = f.z_side(k, k + r)

    replay = _Replay(c, p)
    replay.kill("unit_eliminates_z21_z22", [v * z for v in f.V for z in Z21 + Z22], Z21 + Z22)
    replay.vanish("hermitian_norm_vanishes", [f.N])
    replay.kill("z1_from_relation", f.relations, Z1)
    replay.vanish("lambda1_containment", ys)
    replay.vanish("lambda2_containment", xs)
    replay.zero("dual_containment", V22 + V23)
    replay.vanish("trace_condition", [f.trace])
    replay.final("chart_ideal", f.minors)
    return replay.steps


def _audit_y(c: ChartSystem, p: int) -> List[AuditStep]:
    n, h, t = (c.param_dict[key] for key in ("n", "h", "t"))
    k, s = h - t, n - 2 * h
    W11, Z2 = c.block("V'11"), c.block("Z2")
    W12, W13, W14 = _symbols("w12", t), _symbols("w13", t), _symbols("w14", k)
    V2 = _symbols("v2", s)
    Z1 = _symbols("z11", k) + _symbols("z12", t) + _symbols("z13", t) + _symbols("z14", k)
    f = _Frame(W11 + W12 + W13 + W14, V2, Z1, Z2)
    head = 2 * h - k
    rows = [v * z for v in W12 + W13 + W14 + V2 for z in Z2]
    half = pow(2, -1, p)

    Y1 = f.Y1.xreplace({z: -sympy.Rational(1, 2) * f.N * jv for z, jv in zip(Z1, f.JV1)})
    replay = _Replay(c, p)
    replay.vanish("y1_symmetry", _entries(Y1 - f.J * Y1.T * f.J))
    replay.kill("unit_eliminates_z1_head", [v * z for v in f.V for z in Z1[:head]], Z1[:head])
    replay.contained("norm_relations", f.relations[:head], rows)
    replay.solve("z14_from_relation", {z: -half * f.N * jv for z, jv in zip(Z1[head:], f.JV1[head:])})
    replay.contained("lambda1_rows", f.y_side(k) + f.minors + [f.trace], rows)
    replay.zero("dual_containment", W12 + W13 + W14 + V2)
    replay.vanish("rows_automatic", rows + f.y_side(k))
    replay.final("chart_ideal", f.minors + [f.trace])
    return replay.steps


def _audit_intersection(c: ChartSystem, p: int) -> List[AuditStep]:
    n, h, t1, t2 = (c.param_dict[key] for key in ("n", "h", "t1", "t2"))
    k1, k2, s = t1 - h, h - t2, n - 2 * h
    W11, Z23 = c.block("V'11"), c.block("Z23")
    W_rest = _symbols("w1", 2 * h - k2)
    V2 = _symbols("v2", s)
    Z1 = _symbols("z1", 2 * h)
    Z2_head = _symbols("z2", s - k1)
    f = _Frame(W11 + W_rest, V2, Z1, Z2_head + Z23)
    ys, xs = f.z_side(k1, s - k1)

    replay = _Replay(c, p)
    replay.kill("unit_eliminates_z2_head", [v * z for v in f.V for z in Z2_head], Z2_head)
    replay.vanish("hermitian_norm_vanishes", [f.N])
    replay.kill("z1_from_relation", f.relations, Z1)
    replay.zero("dual_containment", W_rest + V2)
    replay.vanish("containments", ys + xs + f.y_side(k2))
    replay.final("chart_ideal", f.minors + [f.trace])
    return replay.steps


_AUDITS = {
    ChartKind.Z_CHART: _audit_z,
    ChartKind.Y_CHART: _audit_y,
    ChartKind.INTERSECTION: _audit_intersection,
}


def elimination_audit(c: ChartSystem, p: int = 3) -> EliminationAudit:
    """Replay the elimination that takes a point of the lattice chain to the chart.

    Starts from the full coordinates (V, Z) of the Hermitian relation, the minors of
    (V2 | H Z2) and the trace condition, then applies the containments in the order the
    chart is derived: the unit coordinate kills the Z (or Z1) columns it pairs with,
    the relation determines Z1, the dual containment zeroes the tail of V, and what
    is left must generate the same ideal over F_p as `c.equations`. Ideal membership
    is decided with Gröbner bases.

    Args:
        c: A chart from build_chart with flip=True
        p: Odd prime of the residue field

    Raises:
        BadParametersError: If p is not an odd prime or the chart uses the unflipped minors

    Example:
        >>> elimination_audit(build_chart(ChartKind.Z_CHART, 3, 0, t=1)).passed
        True
    """
    if isinstance(p, bool) or not isinstance(p, int) or p == 2 or not sympy.isprime(p):
        raise BadParametersError(f"Audit needs an odd prime p, got {p!r}", {"p": p})
    if not c.flip:
        raise BadParametersError("The elimination lands on the minors of (V21 | H Z23); rebuild with flip=True")
    steps = _AUDITS[c.kind](c, p)
    audit = EliminationAudit(c.kind, c.param_dict, steps)
    if not audit.passed:
        logger.warning("Elimination audit of %s %s failed at %s", c.kind.value, c.param_dict, audit.first_failure)
    return audit
