"""Candidate set and effective prime set for a given ``k`` and range ``[0, U]``."""

from __future__ import annotations

import math

import numpy as np

from .core import PrimeSet, ProblemContext


def primes_up_to(n: int) -> PrimeSet:
    if n < 2:
        return PrimeSet()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return tuple.__new__(PrimeSet, (int(p) for p in np.flatnonzero(sieve)))


def small_prime_bound(k: int) -> float:
    """``sqrt(k ln k)``: primes below it are sieved by a fixed class."""
    return math.sqrt(k * math.log(k))


def default_range(k: int) -> int:
    """``ceil(1.5 (k ln k + k))``, comfortably above the best known diameters."""
    return math.ceil(1.5 * (k * math.log(k) + k))


def small_primes(k: int) -> tuple[int, ...]:
    bound = small_prime_bound(k)
    return tuple(p for p in primes_up_to(k) if p < bound)


def sieve_classes(pattern: str, origin: int, primes) -> dict[int, int]:
    """Residue class removed modulo each small prime.

    ``"hr"`` removes ``origin mod p`` for every prime: the Hensley-Richards
    pattern centred on ``origin``; the default ``("hr", 1)`` removes class 1.
    ``"schinzel"`` keeps ``n = v - origin`` even and prime to the odd primes.
    """
    if pattern == "hr":
        return {p: origin % p for p in primes}
    if pattern == "schinzel":
        return {p: (origin + (1 if p == 2 else 0)) % p for p in primes}
    raise ValueError(f"unknown sieve pattern {pattern!r}")


def _sieved(U: int, classes: dict[int, int]) -> np.ndarray:
    keep = np.ones(U + 1, dtype=bool)
    for p, r in classes.items():
        keep[r::p] = False
    return np.flatnonzero(keep)


def narrowest_span(values: np.ndarray, k: int) -> int | None:
    if len(values) < k:
        return None
    return int((values[k - 1:] - values[:len(values) - k + 1]).min())


def build_context(k: int, U: int | None = None, pattern: str = "hr", origin: int = 1) -> ProblemContext:
    """Sieve ``[0, U]`` and drop primes that no subset of the result can violate.

    One residue class modulo each small prime ``p < sqrt(k ln k)`` is removed;
    by default that is class 1 for every such prime (see :func:`sieve_classes`
    for the alternatives).  A prime is then dropped from the effective set if
    the whole candidate set still leaves one of its classes free.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if U is None:
        U = default_range(k)
    if U < k:
        raise ValueError(f"U={U} is smaller than k={k}")
    P_C = primes_up_to(k)
    P_R = small_primes(k)
    V = _sieved(U, sieve_classes(pattern, origin, P_R))
    if len(V) < k:
        raise ValueError(f"range [0, {U}] leaves {len(V)} candidates, fewer than k={k}")

    P_L = tuple(p for p in P_C if len(np.unique(V % p)) < p)
    return ProblemContext.from_parts(k, U, V, P_C, P_R, P_L)


def context_containing(H, k: int, margin: int | None = None) -> tuple[ProblemContext, int]:
    """Candidate set around a given admissible tuple, and the shift applied to it.

    The tuple is moved to start at ``margin`` (default a quarter of its
    diameter); each small prime removes the lowest class the moved tuple
    leaves empty, so the tuple itself survives the sieve.
    """
    H = [int(h) for h in H]
    if len(H) != k:
        raise ValueError(f"expected {k} elements, got {len(H)}")
    d = H[-1] - H[0]
    if margin is None:
        margin = max(d // 4, 2)
    shift = margin - H[0]
    moved = [h + shift for h in H]
    U = d + 2 * margin
    P_C = primes_up_to(k)
    P_R = small_primes(k)
    classes = {}
    for p in P_R:
        used = {h % p for h in moved}
        free = [c for c in range(p) if c not in used]
        if not free:
            raise ValueError(f"tuple covers every class mod {p}")
        classes[p] = free[0]
    V = _sieved(U, classes)
    P_L = tuple(p for p in P_C if len(np.unique(V % p)) < p)
    return ProblemContext.from_parts(k, U, V, P_C, P_R, P_L), shift


def surviving_fraction(context: ProblemContext) -> float:
    """Measured share of ``[0, U]`` that survived the small-prime sieve."""
    return len(context.V) / (context.U + 1)
