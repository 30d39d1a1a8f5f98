"""Run configuration: defaults, profiles, key-value config files, environment and flags."""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import sympy
from dotenv import dotenv_values, load_dotenv

from src.config import (
    CHART_ASSIGNMENT_BOUND,
    DEFAULT_FORMAT,
    DEFAULT_M_MAX,
    DEFAULT_P,
    DEFAULT_PROFILE,
    DEFAULT_R,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    DEFAULT_WINDOW,
    FIELD_ORDER_BOUND,
    GRASSMANNIAN_CAP,
    HOWELL_TABLEAU_BOUND,
    PAIR_SAMPLE_SIZE,
    PROFILES,
    THREADS_ENV_VAR,
)
from src.exceptions import BadParametersError
from src.lattices import check_splitting_level
from src.utils.file_operations import PathLike, validate_path

logger = logging.getLogger(__name__)

COMMANDS: Tuple[str, ...] = ("vertex", "strata", "charts", "all")
FORMATS: Tuple[str, ...] = ("json", "csv")

# Config file keys and the RunConfig fields they set
CONFIG_KEYS: Dict[str, str] = {
    "N": "ns",
    "H": "h",
    "P": "p",
    "R": "r",
    "MMAX": "m_max",
    "WINDOW": "window",
    "SEED": "seed",
    "OUT": "out",
    "FORMAT": "fmt",
    "PROFILE": "profile",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for one CLI run.

    Attributes:
        command: "vertex", "strata", "charts" or "all"
        ns: Hermitian dimensions to run over
        h: Splitting level, or None for every admissible level of each n
        p: Odd residue characteristic
        r: q = p^r for the chart counts
        m_max: Largest extension level F_{q^m}
        window: Lattice window a for the vertex suite
        strata_window: Lattice window for stratum and oracle checks
        seed: Seed of every sampled check
        out: Report path, or None for stdout
        fmt: "json" or "csv"
        profile: "desk" or "deep"
        threads: Worker count of the ordered pool
        interpolate: Whether to attach interpolated count polynomials
        audit: Whether the charts suite also replays each chart's elimination
        bounds: Enumeration caps in force, recorded in the report
    """

    command: str
    ns: Tuple[int, ...]
    h: Optional[int]
    p: int = DEFAULT_P
    r: int = DEFAULT_R
    m_max: int = DEFAULT_M_MAX
    window: int = DEFAULT_WINDOW
    strata_window: int = 1
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    fmt: str = DEFAULT_FORMAT
    profile: str = DEFAULT_PROFILE
    threads: int = DEFAULT_THREADS
    interpolate: bool = False
    audit: bool = False
    bounds: Mapping[str, int] = field(default_factory=dict)

    def levels(self, n: int) -> List[int]:
        """Splitting levels to run for dimension n (the π-modular level is left out)."""
        if self.h is not None:
            return [self.h]
        return [h for h in range(n // 2 + 1) if not (n % 2 == 0 and 2 * h == n)]

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "ns": list(self.ns),
            "h": self.h,
            "p": self.p,
            "r": self.r,
            "m_max": self.m_max,
            "window": self.window,
            "strata_window": self.strata_window,
            "seed": self.seed,
            "profile": self.profile,
            "bounds": dict(self.bounds),
        }


def current_bounds() -> Dict[str, int]:
    return {
        "field_order": FIELD_ORDER_BOUND,
        "grassmannian": GRASSMANNIAN_CAP,
        "pair_sample": PAIR_SAMPLE_SIZE,
        "chart_assignments": CHART_ASSIGNMENT_BOUND,
        "howell_tableaux": HOWELL_TABLEAU_BOUND,
    }


def load_config_file(path: PathLike) -> Dict[str, str]:
    """Read a KEY=VALUE config file.

    Args:
        path: Config file path

    Returns:
        Mapping of upper-case keys to raw string values

    Raises:
        ValueError: If the file holds keys other than CONFIG_KEYS
        FileOperationError: If the path is invalid
    """
    config_path = validate_path(path)
    if not config_path.is_file():
        raise ValueError(f"Config file not found: {config_path}")

    raw = dotenv_values(config_path)
    values = {key.upper(): value for key, value in raw.items() if value is not None}

    unknown: List[str] = sorted(key for key in values if key not in CONFIG_KEYS)
    if unknown:
        error_msg = f"Unknown keys in config file: {', '.join(unknown)}"
        print(f"❌ {error_msg}", file=sys.stderr)
        print(f"Allowed keys: {', '.join(CONFIG_KEYS)}", file=sys.stderr)
        raise ValueError(error_msg)
    return values


def threads_from_env() -> Optional[int]:
    """Worker count from BTSTRATA_THREADS (also read from the nearest .env), or None when unset.

    Raises:
        ValueError: If the variable is not a positive integer
    """
    load_dotenv()
    value = os.getenv(THREADS_ENV_VAR)
    if not value:
        return None
    threads = _to_int(THREADS_ENV_VAR, value)
    if threads < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be positive, got {threads}")
    return threads


def _to_int(name: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {value!r}") from e


def _parse_file_values(values: Mapping[str, str]) -> Dict[str, object]:
    parsed: Dict[str, object] = {}
    for key, raw in values.items():
        name = CONFIG_KEYS[key]
        if name == "ns":
            parsed[name] = tuple(_to_int(key, part) for part in raw.replace(",", " ").split())
        elif name in ("out", "fmt", "profile"):
            parsed[name] = raw.strip()
        else:
            parsed[name] = _to_int(key, raw)
    return parsed


def _parse_flag_values(args: argparse.Namespace) -> Dict[str, object]:
    flags = {
        "ns": tuple(args.n) if getattr(args, "n", None) else None,
        "h": getattr(args, "h", None),
        "p": getattr(args, "p", None),
        "r": getattr(args, "r", None),
        "m_max": getattr(args, "mmax", None),
        "window": getattr(args, "window", None),
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "fmt": getattr(args, "format", None),
        "threads": getattr(args, "threads", None),
    }
    return {name: value for name, value in flags.items() if value is not None}


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge constants, profile, config file, environment and flags, then validate.

    Precedence, lowest first: config.py constants, profile table, config file,
    BTSTRATA_THREADS, command-line flags.

    Args:
        args: Parsed command line (see src/main.py)

    Returns:
        Validated RunConfig

    Raises:
        ValueError: On unknown config keys or malformed values
        BadParametersError: On invalid parameters
        PiModularExcludedError: For n even with 2h = n
    """
    file_values = _parse_file_values(load_config_file(args.config)) if getattr(args, "config", None) else {}
    flag_values = _parse_flag_values(args)

    profile = str(getattr(args, "profile", None) or file_values.get("profile") or DEFAULT_PROFILE)
    if profile not in PROFILES:
        raise ValueError(f"Unknown profile: {profile}")
    table = PROFILES[profile]

    merged: Dict[str, object] = {
        "h": None,
        "p": table["p"],
        "r": DEFAULT_R,
        "ns": tuple(table["ns"]),  # type: ignore[arg-type]
        "m_max": table["m_max"],
        "window": table["window"],
        "strata_window": table["strata_window"],
        "seed": DEFAULT_SEED,
        "out": None,
        "fmt": DEFAULT_FORMAT,
        "threads": DEFAULT_THREADS,
    }
    merged.update({k: v for k, v in file_values.items() if k != "profile"})
    env_threads = threads_from_env()
    if env_threads is not None:
        merged["threads"] = env_threads
    merged.update(flag_values)

    cfg = RunConfig(
        command=args.command,
        profile=profile,
        interpolate=bool(getattr(args, "interpolate", False)),
        audit=bool(getattr(args, "audit", False)),
        bounds=current_bounds(),
        **merged,  # type: ignore[arg-type]
    )
    validate(cfg)
    logger.debug("Run configuration: %s", cfg.to_json())
    return cfg


def validate(cfg: RunConfig) -> None:
    """Check parameter validity.

    Raises:
        BadParametersError: If any parameter is out of range
        PiModularExcludedError: For n even with 2h = n
        ValueError: On unknown command or format
    """
    if cfg.command not in COMMANDS:
        raise ValueError(f"Unknown command: {cfg.command}")
    if cfg.fmt not in FORMATS:
        raise ValueError(f"Unknown format: {cfg.fmt}")
    if cfg.p == 2 or not sympy.isprime(cfg.p):
        raise BadParametersError(f"p must be an odd prime, got {cfg.p}", {"p": cfg.p})
    if cfg.r < 1:
        raise BadParametersError(f"r must be positive, got {cfg.r}", {"r": cfg.r})
    if cfg.r != 1 and cfg.command != "charts":
        raise BadParametersError("Lattice suites run over q = p; r > 1 is for charts only", {"r": cfg.r})
    if cfg.m_max < 1:
        raise BadParametersError(f"m_max must be positive, got {cfg.m_max}", {"m_max": cfg.m_max})
    if cfg.window < 1 or cfg.strata_window < 1:
        raise BadParametersError("The lattice window must be at least 1", {"window": cfg.window})
    if cfg.threads < 1:
        raise BadParametersError(f"threads must be positive, got {cfg.threads}", {"threads": cfg.threads})
    if not cfg.ns:
        raise BadParametersError("No dimensions to run")
    for n in cfg.ns:
        if n < 3:
            raise BadParametersError(f"n must be at least 3, got {n}", {"n": n})
        if cfg.h is not None:
            check_splitting_level(n, cfg.h)
