"""Command-line entry point: runs the verification suites and writes the reports."""

import argparse
import logging
import random
import sys
from collections import Counter
from functools import partial
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.charts import (
    ChartKind,
    build_chart,
    chart_vs_variety_dim,
    count_chart_points,
    elimination_audit,
    jacobian_certify,
    pivot_profile,
    rank_identity_violations,
    rank_stratified_count,
)
from src.config import (
    FIBER_LAW_CASES,
    INDEX_IDENTITY_DIMS,
    ORACLE_CASES,
    PAIR_SAMPLE_SIZE,
    STRATIFICATION_CASES,
    STRATIFICATION_MAX_RANK,
)
from src.dlstrata import (
    Model,
    claimed_dimension,
    estimate_dimension,
    fiber_census,
    index_identity_violations,
    interpolate_counts,
    model_counts,
    rprime_two_way_count,
    sprime_count_identity,
)
from src.exceptions import BoundExceededError, BTStrataError, InsufficientDataError, WindowOverflowError
from src.formspace import (
    FormKind,
    FormSpace,
    Subspace,
    orthogonal_quotient,
    standard_symplectic,
    subspace_of_lattice,
    symplectic_quotient,
)
from src.gf import field_descriptor
from src.lattices import (
    contains,
    enumerate_vertex_lattices,
    hermitian_ambient,
    hermitian_dual,
    is_vertex,
    lattice_intersect,
    lattice_sum,
    lattice_type,
    scale_by_pi,
    standard_lattice,
    to_json,
)
from src.rzpoints import hull_check, oracle_check, standard_anchor, verify_stratification, worst_count_check
from src.utils.file_operations import FileOperationError, render_csv, render_json, write_report
from src.utils.run_config import COMMANDS, FORMATS, RunConfig, build_run_config
from src.utils.verification import (
    EXHAUSTIVE,
    SAMPLED,
    SKIPPED,
    CheckResult,
    Report,
    bound_result,
    ordered_map,
)

logger = logging.getLogger(__name__)

Job = Callable[[], List[CheckResult]]


def _guarded(check_id: str, params: Dict[str, Any], fn: Job) -> Job:
    """Turn cap hits into bound_exceeded records and window/data gaps into skipped ones.

    Neither counts as a failure, but both make the run exit with 3.
    """

    def job() -> List[CheckResult]:
        try:
            return fn()
        except BoundExceededError as e:
            logger.info("Bound hit in %s %s: %s", check_id, params, e)
            return [bound_result(check_id, params, e)]
        except (WindowOverflowError, InsufficientDataError) as e:
            logger.info("Skipping %s %s: %s", check_id, params, e)
            return [CheckResult(check_id, params, SKIPPED, True, {"reason": str(e)})]

    return job


def _run_jobs(jobs: Sequence[Job], threads: int) -> List[CheckResult]:
    batches = ordered_map(lambda job: job(), jobs, threads)
    return [result for batch in batches for result in batch]


# vertex


def _vertex_enumeration_checks(n: int, cfg: RunConfig) -> List[CheckResult]:
    amb = hermitian_ambient(n, cfg.window, cfg.p)
    params = {"n": n, "p": cfg.p, "window": cfg.window}
    lattices = list(enumerate_vertex_lattices(amb))
    duals = {L.key: hermitian_dual(L) for L in lattices}

    types = Counter(lattice_type(L) for L in lattices)
    odd = sorted(t for t in types if t % 2)
    results = [
        CheckResult(
            "vertex_types",
            params,
            EXHAUSTIVE,
            not odd,
            {"types": {str(t): c for t, c in sorted(types.items())}, "total": len(lattices), "odd": odd},
        )
    ]

    bad_duality = [
        to_json(L)
        for L in lattices
        if not is_vertex(L) or not contains(duals[L.key], L) or hermitian_dual(duals[L.key]) != L
    ]
    results.append(
        CheckResult("vertex_duality", params, EXHAUSTIVE, not bad_duality, {"checked": len(lattices), "examples": bad_duality[:3]})
    )

    pairs = list(combinations(lattices, 2))
    status = EXHAUSTIVE
    if len(pairs) > PAIR_SAMPLE_SIZE:
        pairs = random.Random(cfg.seed).sample(pairs, PAIR_SAMPLE_SIZE)
        status = SAMPLED
    bad_pairs = []
    for L, M in pairs:
        DL, DM = duals[L.key], duals[M.key]
        meet_ok = hermitian_dual(lattice_intersect(L, M)) == lattice_sum(DL, DM)
        join_ok = hermitian_dual(lattice_sum(L, M)) == lattice_intersect(DL, DM)
        if not (meet_ok and join_ok):
            bad_pairs.append([to_json(L), to_json(M)])
    results.append(
        CheckResult("de_morgan", params, status, not bad_pairs, {"checked": len(pairs), "examples": bad_pairs[:3]})
    )
    logger.info("n=%d: %d vertex lattices, %d pairs checked", n, len(lattices), len(pairs))
    return results


def _standard_chain_check(n: int, cfg: RunConfig) -> List[CheckResult]:
    amb = hermitian_ambient(n, cfg.window, cfg.p)
    reach = cfg.window * n
    bad = [i for i in range(-reach, reach + 1) if standard_lattice(amb, -i) != hermitian_dual(standard_lattice(amb, i))]
    params = {"n": n, "p": cfg.p, "window": cfg.window}
    chain = CheckResult("standard_chain_duality", params, EXHAUSTIVE, not bad, {"checked": 2 * reach + 1, "bad_indices": bad})
    # πΛ₀ is integral of type 2n but not a vertex lattice
    base = standard_lattice(amb, 0)
    scaled = scale_by_pi(base)
    witness: Dict[str, Any] = {
        "type": lattice_type(scaled),
        "expected_type": 2 * n,
        "is_vertex": is_vertex(scaled),
        "dual_is_inverse_scaling": hermitian_dual(scaled) == scale_by_pi(base, -1),
    }
    passed = witness["type"] == 2 * n and not witness["is_vertex"] and witness["dual_is_inverse_scaling"]
    return [chain, CheckResult("scaled_base_lattice", params, EXHAUSTIVE, passed, witness)]


def cmd_vertex(cfg: RunConfig) -> Report:
    """Tabulate vertex lattice types and check parity, duality and De Morgan identities.

    Args:
        cfg: Validated run configuration

    Returns:
        Report with vertex_types, vertex_duality, de_morgan, standard_chain_duality and
        scaled_base_lattice per n
    """
    jobs: List[Job] = []
    for n in cfg.ns:
        params = {"n": n, "p": cfg.p, "window": cfg.window}
        jobs.append(_guarded("vertex_types", params, partial(_vertex_enumeration_checks, n, cfg)))
        jobs.append(_guarded("standard_chain_duality", params, partial(_standard_chain_check, n, cfg)))
    report = Report("vertex", cfg.to_json())
    report.extend(_run_jobs(jobs, cfg.threads))
    return report


# strata


def _dimension_result(
    model: Model,
    spV: FormSpace,
    h: int,
    claimed: int,
    params: Dict[str, Any],
    cfg: RunConfig,
    W: Optional[Subspace] = None,
) -> List[CheckResult]:
    counts = model_counts(model, spV, h, range(1, cfg.m_max + 1), W=W)
    report = estimate_dimension(counts, cfg.p, claimed_dim=claimed, model=model.value, params=params)
    if cfg.interpolate and len(counts) >= 2:
        report.polynomial = interpolate_counts(counts, cfg.p)
    return [CheckResult("dimension_growth", params, EXHAUSTIVE, report.leading_ok, report.to_json())]


def _sprime_dimension(n: int, h: int, t: int, params: Dict[str, Any], cfg: RunConfig) -> List[CheckResult]:
    anchor = standard_anchor(hermitian_ambient(n, cfg.strata_window, cfg.p), t)
    claimed = claimed_dimension(Model.S_PRIME, n, h, t)
    return _dimension_result(Model.S_PRIME, symplectic_quotient(anchor), h, claimed, params, cfg)


def _rprime_dimension(n: int, h: int, t: int, params: Dict[str, Any], cfg: RunConfig) -> List[CheckResult]:
    anchor = standard_anchor(hermitian_ambient(n, cfg.strata_window, cfg.p), t)
    claimed = claimed_dimension(Model.R_PRIME, n, h, t)
    return _dimension_result(Model.R_PRIME, orthogonal_quotient(anchor), h, claimed, params, cfg)


def _bracket_dimension(n: int, h: int, t1: int, t2: int, params: Dict[str, Any], cfg: RunConfig) -> List[CheckResult]:
    amb = hermitian_ambient(n, cfg.strata_window, cfg.p)
    inner, outer = standard_anchor(amb, t1), standard_anchor(amb, t2)
    W = subspace_of_lattice(outer, hermitian_dual(inner), FormKind.ORTHOGONAL)
    claimed = claimed_dimension(Model.R_PRIME_BRACKET, n, h, t1, t2)
    return _dimension_result(Model.R_PRIME_BRACKET, orthogonal_quotient(outer), h, claimed, params, cfg, W=W)


def _two_way_check(n: int, h: int, t: int, cfg: RunConfig) -> List[CheckResult]:
    anchor = standard_anchor(hermitian_ambient(n, cfg.strata_window, cfg.p), t)
    spV = orthogonal_quotient(anchor)
    results = []
    for m in range(1, cfg.m_max + 1):
        pairs, summed = rprime_two_way_count(spV, h, m)
        params = {"n": n, "h": h, "t": t, "p": cfg.p, "m": m}
        results.append(CheckResult("rprime_two_way", params, EXHAUSTIVE, pairs == summed, {"pairs": pairs, "summed": summed}))
    return results


def _fiber_law_check(t: int, h: int, m: int, p: int) -> List[CheckResult]:
    spV = standard_symplectic(2 * t, field_descriptor(p))
    census = fiber_census(spV, h, m)
    sprime, predicted = sprime_count_identity(census, p)
    witness: Dict[str, Any] = {
        "s": census.s_count,
        "fixed": census.fixed_count,
        "sprime": sprime,
        "predicted": predicted,
    }
    if census.violations:
        witness["violations"] = census.violations[:3]
    params = {"t": t, "h": h, "p": p, "m": m}
    return [CheckResult("fiber_law", params, EXHAUSTIVE, census.passed and sprime == predicted, witness)]


def _index_identity_check(dim: int, m: int, p: int) -> List[CheckResult]:
    checked, bad = index_identity_violations(standard_symplectic(dim, field_descriptor(p)), m)
    witness: Dict[str, Any] = {"checked": checked}
    if bad:
        witness["examples"] = [[list(r) for r in U.basis] for U in bad[:3]]
    return [CheckResult("index_identity", {"dim": dim, "p": p, "m": m}, EXHAUSTIVE, not bad, witness)]


def _single(check: Callable[..., CheckResult], *args: Any) -> List[CheckResult]:
    return [check(*args)]


def _over_bound(check_id: str, params: Dict[str, Any], error: BoundExceededError) -> List[CheckResult]:
    return [bound_result(check_id, params, error)]


def _dimension_jobs(n: int, h: int, cfg: RunConfig) -> List[Job]:
    jobs: List[Job] = []
    for t in range(h + 1, n // 2 + 1):
        params = {"model": Model.S_PRIME.value, "n": n, "h": h, "t": t, "p": cfg.p}
        jobs.append(_guarded("dimension_growth", params, partial(_sprime_dimension, n, h, t, params, cfg)))
    for t in range(0, h):
        params = {"model": Model.R_PRIME.value, "n": n, "h": h, "t": t, "p": cfg.p}
        jobs.append(_guarded("dimension_growth", params, partial(_rprime_dimension, n, h, t, params, cfg)))
        jobs.append(_guarded("rprime_two_way", {"n": n, "h": h, "t": t}, partial(_two_way_check, n, h, t, cfg)))
        for t1 in range(h + 1, n // 2 + 1):
            bracket = {"model": Model.R_PRIME_BRACKET.value, "n": n, "h": h, "t1": t1, "t2": t, "p": cfg.p}
            jobs.append(_guarded("dimension_growth", bracket, partial(_bracket_dimension, n, h, t1, t, bracket, cfg)))
    return jobs


def _stratification_cases(cfg: RunConfig) -> List[Tuple[int, int]]:
    """The fixed target cases, or every requested n when the splitting level is pinned."""
    if cfg.h is None:
        return list(STRATIFICATION_CASES)
    return [(n, cfg.h) for n in cfg.ns]


def cmd_strata(cfg: RunConfig) -> Report:
    """Run the point-count, fiber, dimension, oracle and stratification checks.

    Args:
        cfg: Validated run configuration

    Returns:
        Report aggregating every strata check in a fixed order
    """
    p, a = cfg.p, cfg.strata_window
    levels = range(1, cfg.m_max + 1)
    jobs: List[Job] = []

    for two_t, h in FIBER_LAW_CASES:
        for m in levels:
            params = {"t": two_t // 2, "h": h, "p": p, "m": m}
            jobs.append(_guarded("fiber_law", params, partial(_fiber_law_check, two_t // 2, h, m, p)))

    for n in cfg.ns:
        for h in cfg.levels(n):
            jobs.extend(_dimension_jobs(n, h, cfg))
            for m in levels:
                params = {"n": n, "h": h, "p": p, "m": m, "window": a}
                jobs.append(_guarded("worst_point", params, partial(_single, worst_count_check, n, h, p, m, a)))

    for n, h, t in ORACLE_CASES:
        for m in levels:
            params = {"n": n, "h": h, "t": t, "p": p, "m": m, "window": a}
            jobs.append(_guarded("oracle_equivalence", params, partial(_single, oracle_check, n, h, t, p, m, a)))
            jobs.append(_guarded("vertex_hulls", params, partial(_single, hull_check, n, h, t, p, m, a)))

    for n, h in _stratification_cases(cfg):
        for m in levels:
            params = {"n": n, "h": h, "p": p, "m": m, "window": a}
            if n > STRATIFICATION_MAX_RANK:
                error = BoundExceededError(f"Stratification checks are limited to n ≤ {STRATIFICATION_MAX_RANK}")
                jobs.append(partial(_over_bound, "stratification", params, error))
                continue
            jobs.append(_guarded("stratification", params, partial(verify_stratification, n, h, p, m, a, cfg.seed)))

    for dim in INDEX_IDENTITY_DIMS:
        for m in levels:
            params = {"dim": dim, "p": p, "m": m}
            jobs.append(_guarded("index_identity", params, partial(_index_identity_check, dim, m, p)))

    report = Report("strata", cfg.to_json())
    report.extend(_run_jobs(jobs, cfg.threads))
    return report


# charts


def _closed_count(kind: ChartKind, n: int, h: int, pivot: int, Q: int, **types: int) -> int:
    """Expected point count of one chart over F_Q."""
    if kind is ChartKind.Z_CHART:
        return rank_stratified_count(build_chart(kind, n, h, pivot=pivot, **types), Q)
    if kind is ChartKind.Y_CHART:
        return Q ** (n - h - types["t"] - 1)
    return Q ** (types["t1"] - types["t2"] - 1)


def _count_check(kind: ChartKind, n: int, h: int, cfg: RunConfig, **types: int) -> List[CheckResult]:
    """Brute-force counts of every pivot against the closed count of that pivot."""
    results = []
    for m in range(1, cfg.m_max + 1):
        level = cfg.r * m
        Q = cfg.p**level
        profile = pivot_profile(kind, n, h, level, cfg.p, **types)
        expected = {i: _closed_count(kind, n, h, i, Q, **types) for i in profile}
        params = {"kind": kind.value, "n": n, "h": h, "p": cfg.p, "r": cfg.r, "m": m, **types}
        witness = {"counts": {str(i): c for i, c in profile.items()}, "expected": {str(i): c for i, c in expected.items()}}
        results.append(CheckResult("chart_count", params, EXHAUSTIVE, profile == expected, witness))
    return results


def _pivot_independence(kind: ChartKind, n: int, h: int, cfg: RunConfig, **types: int) -> List[CheckResult]:
    """Counts agree within each pivot block, and across blocks unless a Z chart has t - h ≥ 2."""
    profile = pivot_profile(kind, n, h, cfg.r, cfg.p, **types)
    if kind is ChartKind.Z_CHART:
        blocks = [[c for i, c in profile.items() if i < 2 * h], [c for i, c in profile.items() if i >= 2 * h]]
        passed = all(len(set(block)) <= 1 for block in blocks)
        if types["t"] - h <= 1:
            passed = passed and len(set(profile.values())) == 1
    else:
        passed = len(set(profile.values())) == 1
    params = {"kind": kind.value, "n": n, "h": h, "p": cfg.p, "r": cfg.r, **types}
    return [CheckResult("pivot_independence", params, EXHAUSTIVE, passed, {str(i): c for i, c in profile.items()})]


def _smoothness_check(
    kind: ChartKind, n: int, h: int, pivot: int, expect_smooth: bool, cfg: RunConfig, **types: int
) -> List[CheckResult]:
    chart = build_chart(kind, n, h, pivot=pivot, **types)
    cert = jacobian_certify(chart, cfg.r, cfg.p, seed=cfg.seed)
    params = {"kind": kind.value, "n": n, "h": h, "p": cfg.p, "r": cfg.r, "pivot": pivot, **types}
    witness = cert.to_json()
    witness["expected"] = "smooth_everywhere" if expect_smooth else "singular_witness"
    return [CheckResult("chart_smoothness", params, EXHAUSTIVE, cert.smooth == expect_smooth, witness)]


def _elimination_check(kind: ChartKind, n: int, h: int, cfg: RunConfig, **types: int) -> List[CheckResult]:
    """Replay the elimination at every pivot of the chart."""
    first = build_chart(kind, n, h, **types)
    units = h + types["t"] if kind is ChartKind.Z_CHART else len(first.block("V'11"))
    results = []
    for pivot in range(units):
        audit = elimination_audit(build_chart(kind, n, h, pivot=pivot, **types), cfg.p)
        params = {"kind": kind.value, "n": n, "h": h, "p": cfg.p, "pivot": pivot, **types}
        witness = {"steps": audit.to_json()["steps"]}
        results.append(CheckResult("chart_elimination", params, EXHAUSTIVE, audit.passed, witness))
    return results


def _shape_checks(n: int, h: int, t: int, cfg: RunConfig) -> List[CheckResult]:
    """The minors cut out rank ≤ 1, and flipping Z23 leaves the count unchanged."""
    flipped = build_chart(ChartKind.Z_CHART, n, h, t=t)
    unflipped = build_chart(ChartKind.Z_CHART, n, h, t=t, flip=False)
    params = {"kind": ChartKind.Z_CHART.value, "n": n, "h": h, "t": t, "p": cfg.p, "r": cfg.r}
    bad = rank_identity_violations(flipped, cfg.r, cfg.p) + rank_identity_violations(unflipped, cfg.r, cfg.p)
    counts = (count_chart_points(flipped, cfg.r, cfg.p), count_chart_points(unflipped, cfg.r, cfg.p))
    return [
        CheckResult("chart_rank_identity", params, EXHAUSTIVE, bad == 0, {"violations": bad}),
        CheckResult(
            "chart_flip_invariance", params, EXHAUSTIVE, counts[0] == counts[1], {"flipped": counts[0], "unflipped": counts[1]}
        ),
    ]


def _chart_dimension(kind: ChartKind, n: int, h: int, cfg: RunConfig, **types: int) -> List[CheckResult]:
    report = chart_vs_variety_dim(build_chart(kind, n, h, **types), cfg.p, cfg.m_max, cfg.r)
    if cfg.interpolate and len(report.counts) >= 2:
        report.polynomial = interpolate_counts(report.counts, cfg.p**cfg.r)
    params = {"kind": kind.value, "n": n, "h": h, "p": cfg.p, "r": cfg.r, **types}
    return [CheckResult("chart_dimension", params, EXHAUSTIVE, report.leading_ok, report.to_json())]


def _chart_jobs(kind: ChartKind, n: int, h: int, cfg: RunConfig, **types: int) -> List[Job]:
    params = {"kind": kind.value, "n": n, "h": h, **types}
    jobs: List[Job] = []
    # (pivot, expected smooth): a unit in V11 is singular once t - h ≥ 2, a unit in V21 never is
    pivots = [(0, True)]
    if kind is ChartKind.Z_CHART:
        jobs.append(_guarded("chart_rank_identity", params, partial(_shape_checks, n, h, types["t"], cfg)))
        if h > 0:
            pivots = [(0, types["t"] - h < 2), (2 * h, True)]
    jobs.append(_guarded("chart_count", params, partial(_count_check, kind, n, h, cfg, **types)))
    jobs.append(_guarded("pivot_independence", params, partial(_pivot_independence, kind, n, h, cfg, **types)))
    for pivot, smooth in pivots:
        jobs.append(_guarded("chart_smoothness", params, partial(_smoothness_check, kind, n, h, pivot, smooth, cfg, **types)))
    jobs.append(_guarded("chart_dimension", params, partial(_chart_dimension, kind, n, h, cfg, **types)))
    if cfg.audit:
        jobs.append(_guarded("chart_elimination", params, partial(_elimination_check, kind, n, h, cfg, **types)))
    return jobs


def cmd_charts(cfg: RunConfig) -> Report:
    """Build every in-range chart, count its points, certify it and estimate its dimension.

    Args:
        cfg: Validated run configuration

    Returns:
        Report with count, pivot, smoothness, shape and dimension checks per chart
    """
    jobs: List[Job] = []
    for n in cfg.ns:
        for h in cfg.levels(n):
            for t in range(h + 1, n // 2 + 1):
                jobs.extend(_chart_jobs(ChartKind.Z_CHART, n, h, cfg, t=t))
            for t in range(0, h):
                jobs.extend(_chart_jobs(ChartKind.Y_CHART, n, h, cfg, t=t))
                for t1 in range(h + 1, n // 2 + 1):
                    jobs.extend(_chart_jobs(ChartKind.INTERSECTION, n, h, cfg, t1=t1, t2=t))
    report = Report("charts", cfg.to_json())
    report.extend(_run_jobs(jobs, cfg.threads))
    return report


COMMAND_TABLE: Dict[str, Callable[[RunConfig], Report]] = {
    "vertex": cmd_vertex,
    "strata": cmd_strata,
    "charts": cmd_charts,
}


def run(cfg: RunConfig) -> List[Report]:
    """Run the configured command; "all" runs vertex, strata and charts in that order."""
    names = list(COMMAND_TABLE) if cfg.command == "all" else [cfg.command]
    reports = []
    for name in names:
        print(f"Running {name} checks...", file=sys.stderr)
        report = COMMAND_TABLE[name](cfg)
        failed = sum(1 for c in report.checks if not c.passed)
        if failed:
            print(f"❌ {name}: {failed} of {len(report.checks)} checks failed", file=sys.stderr)
        elif report.incomplete:
            print(f"⚠️  {name}: passed, but some checks hit a bound or were skipped", file=sys.stderr)
        else:
            print(f"✔️  Complete: {name} ({len(report.checks)} checks)", file=sys.stderr)
        reports.append(report)
    return reports


def exit_code(reports: Sequence[Report]) -> int:
    """2 if any check failed, else 3 if any check hit a bound or was skipped, else 0."""
    codes = [r.exit_code() for r in reports]
    if 2 in codes:
        return 2
    if 3 in codes:
        return 3
    return 0


def render(cfg: RunConfig, reports: Sequence[Report]) -> str:
    if cfg.fmt == "csv":
        return render_csv([row for r in reports for row in r.rows()])
    document = {
        "command": cfg.command,
        "config": cfg.to_json(),
        "pass": all(r.passed for r in reports),
        "exit_code": exit_code(reports),
        "reports": [r.to_json() for r in reports],
    }
    return render_json(document)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, nargs="+", help="Hermitian dimensions")
    common.add_argument("--h", type=int, help="Splitting level (default: every admissible level)")
    common.add_argument("--p", type=int, help="Odd residue characteristic")
    common.add_argument("--r", type=int, help="q = p^r for chart counts")
    common.add_argument("--mmax", type=int, help="Largest extension level m")
    common.add_argument("--window", type=int, help="Lattice window a")
    common.add_argument("--seed", type=int, help="Seed of sampled checks")
    common.add_argument("--out", help="Report path (default: stdout)")
    common.add_argument("--format", choices=FORMATS, help="Report format")
    common.add_argument("--profile", choices=("desk", "deep"), help="Parameter profile")
    common.add_argument("--config", help="KEY=VALUE config file")
    common.add_argument("--threads", type=int, help="Worker count (overrides BTSTRATA_THREADS)")
    common.add_argument("--interpolate", action="store_true", help="Attach interpolated count polynomials")
    common.add_argument("--audit", action="store_true", help="Replay the elimination of every chart (charts)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings only")

    parser = argparse.ArgumentParser(prog="btstrata", description="Exact verification of Bruhat–Tits strata at desk scale.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"Run the {name} suite")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> None:
    """Parse the command line, run the suites and exit with 0, 2 or 3."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        cfg = build_run_config(args)
    except (BTStrataError, FileOperationError, ValueError) as e:
        print(f"❌ Invalid configuration: {e}", file=sys.stderr)
        sys.exit(2)

    if cfg.profile == "deep":
        print("⚠️  Deep profile: expect runs of many minutes", file=sys.stderr)
        logger.warning("Deep profile selected: ns=%s m_max=%d", list(cfg.ns), cfg.m_max)

    try:
        reports = run(cfg)
        text = render(cfg, reports)
        if cfg.out:
            path = write_report(text, cfg.out)
            print(f"✔️  Report written to {path}", file=sys.stderr)
        else:
            sys.stdout.write(text)
    except (BTStrataError, FileOperationError) as e:
        print(f"❌ {e}", file=sys.stderr)
        sys.exit(2)

    sys.exit(exit_code(reports))


if __name__ == "__main__":
    main()
