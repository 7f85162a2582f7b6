"""Maximum-average-distance codes for code-expanded random access.

Build OptCeRA and multipreamble codes, decode superframes through the code
hypergraph, and compare the closed-form contention model with Monte Carlo
simulation.
"""

from .analytics import (
    AnalyticalMetrics,
    MetricsRow,
    analytical_metrics,
    expected_valid_exact,
    expected_valid_n2,
)
from .code_core import (
    CapacityError,
    Code,
    CodeParams,
    average_hamming_distance,
    avg_distance_via_distribution,
    brute_force_mad,
    hamming_distance,
    is_mad,
    mad_upper_bound,
)
from .hypergraph import DetectedSets, build_hypergraph, decode, decode_bruteforce, observe
from .optcera import build_multipreamble_code, build_optcera_code, encode_random, qary_digits
from .simulator import SweepSpec, estimate, run_superframe, sweep

__version__ = "0.1.0"

__all__ = [
    "AnalyticalMetrics",
    "CapacityError",
    "Code",
    "CodeParams",
    "DetectedSets",
    "MetricsRow",
    "SweepSpec",
    "analytical_metrics",
    "average_hamming_distance",
    "avg_distance_via_distribution",
    "brute_force_mad",
    "build_hypergraph",
    "build_multipreamble_code",
    "build_optcera_code",
    "decode",
    "decode_bruteforce",
    "encode_random",
    "estimate",
    "expected_valid_exact",
    "expected_valid_n2",
    "hamming_distance",
    "is_mad",
    "mad_upper_bound",
    "observe",
    "qary_digits",
    "run_superframe",
    "sweep",
]
