"""
Configuration file for btstrata

This file contains the default parameters and enumeration caps.
Per-run overrides come from a key-value config file, the environment or flags,
see src/utils/run_config.py.
"""

from typing import Dict, List, Tuple, Union

# Base parameters
DEFAULT_P: int = 3
DEFAULT_R: int = 1  # q = p^r on the quotient side
DEFAULT_WINDOW: int = 2  # lattices live between pi^a L0 and pi^-a L0
DEFAULT_M_MAX: int = 2
DEFAULT_SEED: int = 0
DEFAULT_FORMAT: str = "json"
DEFAULT_PROFILE: str = "desk"

# Enumeration caps
FIELD_ORDER_BOUND: int = 729  # largest q^m enumerated element by element
GRASSMANNIAN_CAP: int = 10**7  # candidate subspaces per enumeration
PAIR_SAMPLE_SIZE: int = 10**4  # pair checks beyond this are sampled
CHART_ASSIGNMENT_BOUND: int = 2 * 10**6  # brute-force chart assignments
HOWELL_TABLEAU_BOUND: int = 2 * 10**5  # brute-force vertex enumeration candidates
MAX_VERTEX_RANK: int = 6
VERTEX_PRIMES: Tuple[int, ...] = (3, 5)
MAX_VERTEX_WINDOW: int = 2
STRATIFICATION_MAX_RANK: int = 5

# Environment
THREADS_ENV_VAR: str = "BTSTRATA_THREADS"
DEFAULT_THREADS: int = 1

# Profiles
ProfileValue = Union[int, List[int]]

DESK_PROFILE: Dict[str, ProfileValue] = {
    "p": 3,
    "ns": [3, 4, 5],
    "m_max": 2,
    "window": 2,
    "strata_window": 1,
}

DEEP_PROFILE: Dict[str, ProfileValue] = {
    "p": 3,
    "ns": [6],
    "m_max": 3,
    "window": 2,
    "strata_window": 2,
}

PROFILES: Dict[str, Dict[str, ProfileValue]] = {
    "desk": DESK_PROFILE,
    "deep": DEEP_PROFILE,
}

# Strata suite targets
FIBER_LAW_CASES: List[Tuple[int, int]] = [(2, 0), (4, 0), (4, 1), (6, 1)]  # (2t, h)
ORACLE_CASES: List[Tuple[int, int, int]] = [(4, 0, 1), (4, 1, 0), (5, 1, 2), (5, 2, 1)]
STRATIFICATION_CASES: List[Tuple[int, int]] = [(4, 1)]
INDEX_IDENTITY_DIMS: List[int] = [4, 6]
