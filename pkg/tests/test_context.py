import math
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from narrow_tuples.context import (
    build_context,
    default_range,
    narrowest_span,
    primes_up_to,
    sieve_classes,
    small_prime_bound,
    surviving_fraction,
)
from narrow_tuples.core import rebuild
from narrow_tuples.verify import full_verify


def slow_primes(n):
    return tuple(p for p in range(2, n + 1) if all(p % d for d in range(2, math.isqrt(p) + 1)))


@pytest.mark.parametrize("n", [0, 1, 2, 10, 30, 97, 100, 1000])
def test_primes_match_trial_division(n):
    assert tuple(primes_up_to(n)) == slow_primes(n)


def test_primes_examples():
    assert tuple(primes_up_to(10)) == (2, 3, 5, 7)
    assert tuple(primes_up_to(1)) == ()
    assert tuple(primes_up_to(30)) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def test_default_range():
    assert default_range(1000) == math.ceil(1.5 * (1000 * math.log(1000) + 1000))
    assert small_prime_bound(7) == pytest.approx(3.6907, abs=1e-4)


class TestSmallExample:
    def test_prime_sets(self, ctx7):
        assert tuple(ctx7.P_C) == (2, 3, 5, 7)
        assert tuple(ctx7.P_R) == (2, 3)

    def test_candidates(self, ctx7):
        # drop v = 1 (mod 2) and v = 1 (mod 3) from [0, 30] by hand
        expected = [v for v in range(31) if v % 2 != 1 and v % 3 != 1]
        assert expected == [0, 2, 6, 8, 12, 14, 18, 20, 24, 26, 30]
        assert ctx7.V.tolist() == expected

    def test_surviving_fraction(self, ctx7):
        assert surviving_fraction(ctx7) == pytest.approx(1 / 3, abs=0.05)
        big = build_context(7, 3000)
        assert surviving_fraction(big) == pytest.approx(1 / 3, abs=1e-3)

    def test_small_primes_keep_one_free_class(self, ctx7):
        # the class-1 values are gone, so the whole set leaves exactly one class free
        full = rebuild(ctx7.V, ctx7.__class__.from_parts(7, 30, ctx7.V, ctx7.P_C))
        for row, p in zip(full.occupancy_rows(), full.context.P):
            if p in ctx7.P_R:
                assert row[1] == 0
                assert sum(1 for c in row if c == 0) == 1

    def test_small_primes_are_locked(self, ctx7):
        # f = 1 on H = V, so they can never be violated and land in P_L
        assert set(ctx7.P_R) <= set(ctx7.P_L)


def test_too_small_range_fails():
    with pytest.raises(ValueError):
        build_context(7, 10)
    with pytest.raises(ValueError):
        build_context(1, 10)
    with pytest.raises(ValueError):
        build_context(7, 5)


@pytest.mark.parametrize("k", [5, 20, 50, 100])
def test_partition_and_locked_primes(k):
    ctx = build_context(k)
    assert set(ctx.P) | set(ctx.P_L) == set(ctx.P_C)
    assert not set(ctx.P) & set(ctx.P_L)
    assert 0 in ctx.V
    for p in ctx.P_R:
        assert not np.any(ctx.V % p == 1)
    for p in ctx.P_L:
        assert len(np.unique(ctx.V % p)) < p
    for p in ctx.P:
        assert len(np.unique(ctx.V % p)) == p


def test_sieve_patterns():
    assert sieve_classes("hr", 1, (2, 3, 5)) == {2: 1, 3: 1, 5: 1}
    assert sieve_classes("hr", 7, (2, 3, 5)) == {2: 1, 3: 1, 5: 2}
    # n = v - origin must be even and prime to 3 and 5
    assert sieve_classes("schinzel", 10, (2, 3, 5)) == {2: 1, 3: 1, 5: 0}
    with pytest.raises(ValueError):
        sieve_classes("nope", 0, (2,))


def test_translated_pattern():
    ctx = build_context(20, 300, "schinzel", 100)
    n = ctx.V - 100
    assert np.all(n % 2 == 0)
    for p in ctx.P_R[1:]:
        assert np.all(n % p != 0)


def test_narrowest_span():
    assert narrowest_span(np.array([0, 2, 6, 8, 12]), 3) == 6
    assert narrowest_span(np.array([0, 2]), 3) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=3, max_value=9), st.data())
def test_completeness_guard(k, data):
    # admissible over the effective primes plus H inside V implies admissible over all p <= k
    ctx = build_context(k)
    picks = data.draw(st.lists(st.sampled_from(ctx.V.tolist()), min_size=k, max_size=k, unique=True))
    state = rebuild(sorted(picks), ctx)
    if state.is_admissible():
        assert full_verify(state.H, k)


def test_completeness_guard_exhaustive():
    ctx = build_context(5, 30)
    for combo in itertools.combinations(ctx.V.tolist(), 5):
        assert rebuild(combo, ctx).is_admissible() == bool(full_verify(combo, 5))
