"""Narrow admissible k-tuples: sieve baselines and region-based adaptive local search."""

from .context import build_context, primes_up_to
from .core import (
    PrimeSet,
    ProblemContext,
    TupleState,
    build_residue_table,
    diameter,
    distance,
    empty_state,
    read_tuple_file,
    rebuild,
    write_tuple_file,
)
from .rals import RalsConfig, RalsResult, rals_solve
from .verify import brute_force_optimal, full_verify

__all__ = [
    "PrimeSet",
    "RalsConfig",
    "RalsResult",
    "ProblemContext",
    "TupleState",
    "brute_force_optimal",
    "build_context",
    "build_residue_table",
    "diameter",
    "distance",
    "empty_state",
    "full_verify",
    "primes_up_to",
    "rals_solve",
    "read_tuple_file",
    "rebuild",
    "write_tuple_file",
]
