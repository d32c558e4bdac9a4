"""Independent admissibility checks and exhaustive oracles for tiny ``k``.

Nothing here touches the occupancy bookkeeping in :mod:`narrow_tuples.core`;
residues are recomputed from the definition so the two can cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

ORACLE_MAX_K = 12
PER_START_MAX_K = 10


def _primes(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failing_prime: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def full_verify(H: Sequence[int], k: int) -> Verdict:
    """Check ``H`` against every prime ``p <= k``.

    Primes above ``k`` cannot be violated by ``k`` elements, so they are skipped.
    """
    H = [int(h) for h in H]
    if len(H) != k:
        raise ValueError(f"expected {k} elements, got {len(H)}")
    if any(b <= a for a, b in zip(H, H[1:])):
        raise ValueError("tuple must be strictly increasing")
    for p in _primes(k):
        if len({h % p for h in H}) == p:
            return Verdict(False, p)
    return Verdict(True)


def admissible(H: Sequence[int]) -> bool:
    """Admissibility of an arbitrary finite set, by the definition."""
    return all(len({h % p for h in H}) < p for p in _primes(len(H)))


def _search(k: int, candidates: Sequence[int], start: int, best: int) -> tuple[int, tuple[int, ...] | None]:
    """Narrowest admissible k-subset of ``candidates`` whose first element is ``start``.

    Depth-first over increasing elements.  Admissibility mod 2 forces a common
    parity, so each remaining element costs at least 2; a branch dies once that
    lower bound reaches the incumbent diameter.
    """
    primes = _primes(k)
    gap = 2 if k >= 2 else 1
    full = [(1 << p) - 1 for p in primes]
    pool = [c for c in candidates if c > start]
    witness = None
    chosen = [start]
    masks = [1 << (start % p) for p in primes]

    def extend(pos: int) -> None:
        nonlocal best, witness
        need = k - len(chosen)
        if need == 0:
            d = chosen[-1] - start
            if d < best:
                best, witness = d, tuple(chosen)
            return
        for q in range(pos, len(pool) - need + 1):
            c = pool[q]
            if c - start + gap * (need - 1) >= best:
                return
            new = []
            for p, m, f in zip(primes, masks, full):
                m |= 1 << (c % p)
                if m == f:
                    break
                new.append(m)
            else:
                saved = masks[:]
                masks[:] = new
                chosen.append(c)
                extend(q + 1)
                chosen.pop()
                masks[:] = saved

    extend(0)
    return best, witness


def default_cap(k: int) -> int:
    return math.ceil(1.5 * (k * math.log(k) + k))


def brute_force_optimal(k: int, U_cap: int | None = None) -> tuple[int, tuple[int, ...]]:
    """Smallest diameter of an admissible k-tuple, with one witness.

    Offsetting lets the first element sit at 0.
    """
    if k > ORACLE_MAX_K:
        raise ValueError(f"oracle refuses k={k} > {ORACLE_MAX_K}")
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return 0, (0,)
    if U_cap is None:
        U_cap = default_cap(k)
    best, witness = _search(k, range(U_cap + 1), 0, U_cap + 1)
    if witness is None:
        raise ValueError(f"no admissible {k}-tuple inside [0, {U_cap}]")
    return best, witness


def per_start_optimal(k: int, v: int, context) -> int | None:
    """Narrowest admissible k-tuple inside ``context.V`` starting at ``v``.

    Returns ``None`` when no such tuple exists.
    """
    if k > PER_START_MAX_K:
        raise ValueError(f"per-start oracle refuses k={k} > {PER_START_MAX_K}")
    V = [int(x) for x in context.V]
    if v not in set(V):
        return None
    best, witness = _search(k, V, v, V[-1] - v + 1)
    return best if witness is not None else None
