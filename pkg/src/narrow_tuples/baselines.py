"""Constructive sieve baselines for narrow admissible k-tuples.

Every construction sieves an integer interval by residue classes and keeps
``k`` consecutive survivors.  Outputs are plain tuples of ints, which may
contain negative values (offsetting preserves admissibility and diameter).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .context import primes_up_to, small_prime_bound

log = logging.getLogger(__name__)

METHOD_NAMES = (
    "primes-past-k",
    "eratosthenes",
    "hensley-richards",
    "schinzel",
    "shifted-schinzel",
    "shifted-greedy",
)


# -- shared sieve machinery ----------------------------------------------------

def _prime_array(n: int) -> np.ndarray:
    return np.asarray(primes_up_to(n), dtype=np.int64)


def admissible_values(values: np.ndarray, primes: Sequence[int]) -> bool:
    """True if ``values`` leave a free class modulo every prime in ``primes``."""
    n = len(values)
    for p in primes:
        if p > n:
            break
        if np.count_nonzero(np.bincount(values % p, minlength=p)) == p:
            return False
    return True


def greedy_sieve(values: np.ndarray, primes: Sequence[int], origin: int = 0) -> np.ndarray:
    """For each prime in turn, drop a least-occupied class if all are occupied.

    Ties go to the lowest class of ``value - origin``.
    """
    for p in primes:
        if len(values) < p:
            continue
        residues = (values - origin) % p
        counts = np.bincount(residues, minlength=p)
        if counts.min() > 0:
            values = values[residues != int(np.argmin(counts))]
    return values


def best_window(values: np.ndarray, k: int) -> np.ndarray | None:
    """The narrowest run of ``k`` consecutive survivors (earliest on ties)."""
    if len(values) < k:
        return None
    spans = values[k - 1:] - values[:len(values) - k + 1]
    i = int(np.argmin(spans))
    return values[i:i + k]


def _coprime_survivors(lo: int, hi: int, primes: Sequence[int], classes: dict[int, int] | None = None) -> np.ndarray:
    """Integers in ``[lo, hi]`` outside class ``classes.get(p, 0)`` mod each prime."""
    n = np.arange(lo, hi + 1, dtype=np.int64)
    keep = np.ones(len(n), dtype=bool)
    classes = classes or {}
    for p in primes:
        r = classes.get(p, 0)
        first = (r - lo) % p
        keep[first::p] = False
    return n[keep]


def _as_tuple(values) -> tuple[int, ...]:
    return tuple(int(v) for v in values)


# -- k primes past k -----------------------------------------------------------

def _primes_beyond(k: int, count: int) -> np.ndarray:
    bound = max(2 * k, 16)
    while True:
        primes = _prime_array(bound)
        above = primes[primes > k]
        if len(above) >= count:
            return above
        bound *= 2


def primes_past_k(k: int) -> tuple[int, ...]:
    if k < 2:
        raise ValueError("k must be at least 2")
    return _as_tuple(_primes_beyond(k, k)[:k])


# -- Eratosthenes (Zhang) ------------------------------------------------------

def eratosthenes_tuple(k: int) -> tuple[int, ...]:
    """Narrowest admissible run of ``k`` consecutive primes.

    Start primes range from 2 up to the first prime past ``2k``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    check = _prime_array(k)
    bound = max(4 * k, 16)
    while True:
        primes = _prime_array(bound)
        last_start = int(np.searchsorted(primes, 2 * k, side="right"))
        if last_start + k <= len(primes):
            break
        bound *= 2
    best = None
    for i in range(last_start + 1):
        window = primes[i:i + k]
        if best is not None and window[-1] - window[0] >= best[-1] - best[0]:
            continue
        if admissible_values(window, check):
            best = window
    return _as_tuple(best)


# -- Hensley-Richards ----------------------------------------------------------

def hensley_richards(k: int) -> tuple[int, ...]:
    """Sieve class 0 modulo every prime up to ``p_m`` from a symmetric interval.

    Survivors are ``+-1`` and ``+-n`` with ``n`` free of prime factors up to
    ``p_m``.  The interval ``[-x/2, x/2]`` is the smallest holding ``k``
    survivors; ``p_m`` runs upward from 2 until the narrowest run of ``k``
    survivors is admissible.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    check = _prime_array(k)
    half = max(int(k * math.log(k) + k), 8)
    for p_m in check:
        while True:
            pool = _coprime_survivors(-half, half, [p for p in check if p <= p_m])
            if len(pool) >= k:
                break
            half *= 2
        radius = np.sort(np.abs(pool))[k - 1]
        inside = pool[np.abs(pool) <= radius]
        window = best_window(inside, k)
        if admissible_values(window, check):
            return _as_tuple(window)
    raise RuntimeError(f"no admissible Hensley-Richards tuple for k={k}")


# -- Schinzel and shifted Schinzel ---------------------------------------------

def _schinzel_classes(primes: Sequence[int]) -> dict[int, int]:
    return {p: (1 if p == 2 else 0) for p in primes}


def _schinzel_pool(lo: int, hi: int, sieve_primes: Sequence[int]) -> np.ndarray:
    return _coprime_survivors(lo, hi, sieve_primes, _schinzel_classes(sieve_primes))


def _initial_pm(k: int, check: np.ndarray, tau: float = 1.0) -> int:
    """Index into ``check`` of the first prime not below ``tau sqrt(k ln k)``."""
    return int(np.searchsorted(check, tau * small_prime_bound(k), side="left"))


def _first_k_from(start: int, k: int, sieve_primes: Sequence[int], length: int) -> np.ndarray:
    while True:
        pool = _schinzel_pool(start, start + length, sieve_primes)
        if len(pool) >= k:
            return pool[:k]
        length *= 2


def schinzel(k: int, shifted: bool = False, s: int | str | None = "auto") -> tuple[int, ...]:
    """Keep even numbers free of odd prime factors up to ``p_m``.

    Unshifted, the tuple is the first ``k`` survivors from 0.  Shifted, every
    start ``s`` in ``[-x/2, x/2]`` is tried (``x`` the unshifted span) and the
    narrowest admissible result wins; an explicit integer ``s`` pins the start.
    ``p_m`` begins at ``sqrt(k ln k)`` and advances a prime at a time while the
    selection is inadmissible.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    check = _prime_array(k)
    pinned = None if (s is None or s == "auto") else int(s)
    if not shifted and pinned is None:
        pinned = 0
    length = max(int(k * math.log(k) + k), 8)
    for m in range(_initial_pm(k, check), len(check) + 1):
        sieve_primes = check[:m]
        if pinned is not None:
            window = _first_k_from(pinned, k, sieve_primes, length)
            if admissible_values(window, check):
                return _as_tuple(window)
            continue
        base = _first_k_from(0, k, sieve_primes, length)
        x = int(base[-1] - base[0])
        pool = _schinzel_pool(-(x // 2), x // 2 + 2 * x, sieve_primes)
        starts = np.flatnonzero(pool <= x // 2)
        starts = starts[starts + k <= len(pool)]
        spans = pool[starts + k - 1] - pool[starts]
        for j in np.argsort(spans, kind="stable")[:64]:
            window = pool[starts[j]:starts[j] + k]
            if admissible_values(window, check):
                return _as_tuple(window)
    raise RuntimeError(f"no admissible Schinzel tuple for k={k}")


def shifted_schinzel(k: int, s: int | str | None = "auto") -> tuple[int, ...]:
    return schinzel(k, shifted=True, s=s)


# -- shifted greedy --------------------------------------------------------------

@dataclass
class GreedySieve:
    """Greedy sieve over a pre-sieved pool of candidates.

    ``pool`` holds the survivors of the fixed-class stage on a wide range;
    each run slices ``[s, s + x]`` out of it and sieves ``greedy_primes``.
    ``origin`` is the pool value that plays the role of 0 in tie-breaks, so a
    translated pool gives translated results.
    """

    pool: np.ndarray
    greedy_primes: Sequence[int]
    k: int
    origin: int = 0

    def survivors(self, s: int, x: int) -> np.ndarray:
        lo = int(np.searchsorted(self.pool, s, side="left"))
        hi = int(np.searchsorted(self.pool, s + x, side="right"))
        return greedy_sieve(self.pool[lo:hi], self.greedy_primes, self.origin)

    def run(self, s: int, x: int) -> np.ndarray | None:
        return best_window(self.survivors(s, x), self.k)

    def minimal_span(self, s: int, x_hint: int, limit: int) -> tuple[int, np.ndarray] | None:
        """Approximately the smallest ``x <= limit`` leaving ``k`` survivors, and its tuple.

        Survivor counts are not monotone in ``x`` under greedy sieving, so this
        brackets by growth or halving and then bisects.
        """
        x = max(min(x_hint, limit), self.k - 1)
        found = self.run(s, x)
        if found is None:
            fail = x
            while found is None:
                if x >= limit:
                    return None
                fail, x = x, min(limit, int(x * 1.25) + 2)
                found = self.run(s, x)
        else:
            fail = None
            while fail is None:
                lower = x // 2
                if lower < self.k - 1:
                    fail = self.k - 2
                    break
                attempt = self.run(s, lower)
                if attempt is None:
                    fail = lower
                else:
                    x, found = lower, attempt
        while x - fail > 1:
            mid = (x + fail) // 2
            attempt = self.run(s, mid)
            if attempt is None:
                fail = mid
            else:
                x, found = mid, attempt
        return x, found


def _better(a: np.ndarray | None, b: np.ndarray | None) -> bool:
    if a is None:
        return False
    if b is None:
        return True
    return a[-1] - a[0] < b[-1] - b[0]


@dataclass(frozen=True)
class ShiftScan:
    """Outcome of the shifted greedy scan: best tuple, its shift and the window width."""

    H: tuple[int, ...]
    shift: int
    width: int


def greedy_setup(k: int, tau: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Primes sieved by the Schinzel class and primes left to the greedy stage."""
    check = _prime_array(k)
    m = _initial_pm(k, check, tau)
    return check[:m], check[m:]


def shifted_greedy_scan(k: int, tau: float = 1.0) -> ShiftScan:
    """Scan starts ``s`` over ``[-x/2, x/2]`` with the width ``x`` found at ``s = 0``.

    Steps are 2 (for ``k > 2000`` a coarse pass with step ``2 ceil(x/2000)``
    is refined around its winner); ties keep ``s = 0``, then the smaller ``s``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if tau <= 0:
        raise ValueError("tau must be positive")
    fixed, greedy = greedy_setup(k, tau)
    span = max(int(k * math.log(k) + k), 16)
    sieve = GreedySieve(_schinzel_pool(-4 * span, 4 * span, fixed), greedy, k)
    x, best = sieve.minimal_span(0, span, limit=6 * span)
    best_s = 0
    half = x // 2
    step = 2 if k <= 2000 else 2 * math.ceil(x / 2000)
    for shift in range(-half - (half % 2), half + 1, step):
        found = sieve.run(shift, x)
        if _better(found, best):
            best, best_s = found, shift
    if step > 2:
        for shift in range(best_s - step + 2, best_s + step, 2):
            found = sieve.run(shift, x)
            if _better(found, best):
                best, best_s = found, shift
    return ShiftScan(_as_tuple(best), best_s, x)


def shifted_greedy(k: int, s: int | str | None = "auto", tau: float = 1.0) -> tuple[int, ...]:
    """Shifted Schinzel below ``tau sqrt(k ln k)``, greedy class choice above.

    ``s="auto"`` runs :func:`shifted_greedy_scan`; an integer pins the start.
    """
    if s is None or s == "auto":
        return shifted_greedy_scan(k, tau).H
    if k < 2:
        raise ValueError("k must be at least 2")
    if tau <= 0:
        raise ValueError("tau must be positive")
    fixed, greedy = greedy_setup(k, tau)
    span = max(int(k * math.log(k) + k), 16)
    sieve = GreedySieve(_schinzel_pool(-4 * span, 4 * span, fixed), greedy, k)
    found = sieve.minimal_span(int(s), span, limit=6 * span)
    if found is None:
        raise RuntimeError(f"no shifted greedy tuple for k={k} at s={s}")
    return _as_tuple(found[1])


# -- method registry -------------------------------------------------------------

@dataclass(frozen=True)
class SieveMethod:
    """A named baseline with its method-specific parameters."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise ValueError(f"unknown sieve method {self.name!r}")
        tau = self.params.get("tau")
        if tau is not None and tau <= 0:
            raise ValueError("tau must be positive")

    def run(self, k: int) -> tuple[int, ...]:
        return _RUNNERS[self.name](k, self.params)


_RUNNERS: dict[str, Callable[[int, dict], tuple[int, ...]]] = {
    "primes-past-k": lambda k, p: primes_past_k(k),
    "eratosthenes": lambda k, p: eratosthenes_tuple(k),
    "hensley-richards": lambda k, p: hensley_richards(k),
    "schinzel": lambda k, p: schinzel(k, shifted=False),
    "shifted-schinzel": lambda k, p: shifted_schinzel(k, s=p.get("shift", "auto")),
    "shifted-greedy": lambda k, p: shifted_greedy(k, s=p.get("shift", "auto"), tau=p.get("tau", 1.0)),
}


def run_method(name: str, k: int, **params) -> tuple[int, ...]:
    return SieveMethod(name, params).run(k)
