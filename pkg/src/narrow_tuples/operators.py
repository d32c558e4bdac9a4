"""Local-search operators over admissible tuple states.

Operators mutate the :class:`~narrow_tuples.core.TupleState` they are given
(``shift_search`` and ``local_search`` may instead hand back a different
state object).  All randomness comes from a caller-owned
``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import TupleState

log = logging.getLogger(__name__)

_SCAN_CHUNK = 64


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def reverse(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class InsertLevel(enum.IntEnum):
    SINGLE = 0
    GROW = 1
    PLATEAU = 2


class RepairFailed(RuntimeError):
    """Neither side of the tuple can take another admissible value."""


def random_side(rng: np.random.Generator) -> Side:
    return Side.LEFT if rng.integers(2) == 0 else Side.RIGHT


# -- side operators --------------------------------------------------------------

def side_remove(state: TupleState, side: Side) -> TupleState:
    if not state.idx:
        raise ValueError("cannot remove from an empty tuple")
    state.remove_index(state.idx[0] if side is Side.LEFT else state.idx[-1])
    return state


def side_candidate(state: TupleState, side: Side) -> int | None:
    """V-index of the nearest value beyond ``side`` that keeps admissibility."""
    if not state.idx:
        raise ValueError("side operators need a non-empty tuple")
    tight = state.tight_rows()
    n = len(state.context.V)
    if side is Side.LEFT:
        pos, step, stop = state.idx[0] - 1, -1, -1
    else:
        pos, step, stop = state.idx[-1] + 1, 1, n
    while pos != stop:
        end = pos + step * _SCAN_CHUNK
        end = max(end, stop) if step < 0 else min(end, stop)
        chunk = np.arange(pos, end, step)
        free = np.flatnonzero(state.vio_counts(chunk, tight) == 0)
        if len(free):
            return int(chunk[free[0]])
        pos = end
    return None


def side_add(state: TupleState, side: Side) -> TupleState:
    """Add the nearest admissible value beyond ``side``; unchanged if none exists."""
    l = side_candidate(state, side)
    if l is not None:
        state.add_index(l)
    return state


def repair(state: TupleState, k: int) -> TupleState:
    """Grow or trim at the ends until ``|H| = k``, preferring the narrower side.

    Ties go to the left.  Raises :class:`RepairFailed` if neither side can grow.
    """
    V = state.context.V
    while len(state) > k:
        idx = state.idx
        if len(idx) == 1:
            side = Side.LEFT
        else:
            keep_right = V[idx[-1]] - V[idx[1]]
            keep_left = V[idx[-2]] - V[idx[0]]
            side = Side.LEFT if keep_right <= keep_left else Side.RIGHT
        side_remove(state, side)
    while len(state) < k:
        if not state.idx:
            raise RepairFailed("cannot grow an empty tuple")
        left = side_candidate(state, Side.LEFT)
        right = side_candidate(state, Side.RIGHT)
        if left is None and right is None:
            raise RepairFailed(f"stuck at {len(state)} of {k} elements")
        if right is None or (left is not None and V[state.idx[-1]] - V[left] <= V[right] - V[state.idx[0]]):
            state.add_index(left)
        else:
            state.add_index(right)
    return state


# -- shift search ----------------------------------------------------------------

def acceptance_probability(worsening: int, beta: float) -> float:
    """Chance of keeping a shift result that is ``worsening`` wider than the start."""
    return 0.5 / worsening**beta


def shift_search(state: TupleState, n_shifts: int, beta: float, rng: np.random.Generator) -> TupleState:
    """Slide the tuple up to ``n_shifts`` steps toward a random side.

    Each step drops the far end and adds the nearest admissible value on the
    chosen side.  The narrowest intermediate is returned if it is no wider than
    the input, otherwise with probability ``0.5 / (d_new - d_old)**beta``;
    in all other cases the input state itself is returned.
    """
    if n_shifts < 1:
        raise ValueError("n_shifts must be at least 1")
    d_old = state.diameter()
    size = len(state)
    side = random_side(rng)
    work = state.copy()
    best, d_best = None, math.inf
    for _ in range(n_shifts):
        side_remove(work, side.reverse())
        side_add(work, side)
        if len(work) < size:
            break
        d = work.diameter()
        if d < d_best:
            d_best, best = d, work.copy()
    if best is None:
        return state
    if d_best <= d_old or acceptance_probability(d_best - d_old, beta) > rng.random():
        return best
    return state


# -- insert moves ----------------------------------------------------------------

@dataclass(frozen=True)
class InsertOutcome:
    """What an insert move did.

    ``action`` is ``"insert"`` (one value added), ``"grow"`` (level-1
    exchange), ``"plateau"`` (level-2 exchange) or ``None``.  For exchanges
    ``added`` is ``|Q_i|`` and ``removed`` is ``m_{i,sb}``.
    """

    action: str | None
    row: int | None = None
    added: int = 0
    removed: int = 0
    reverted: bool = False

    @property
    def size_change(self) -> int:
        return self.added - self.removed


_NOTHING = InsertOutcome(None)


def second_best_column(state: TupleState, i: int) -> tuple[int, int]:
    return state.second_best_column(i)


def members_of_cell(state: TupleState, i: int, j: int) -> list[int]:
    return state.members_of_cell(i, j)


def _exchange(state: TupleState, row: int, queue: list[int], sb: int, action: str) -> InsertOutcome:
    ctx = state.context
    idx = np.asarray(state.idx, dtype=np.int64)
    outgoing = [int(l) for l in idx[ctx.residues.rows[idx, row] == sb]]
    for l in outgoing:
        state.remove_index(l)
    for l in queue:
        state.add_index(l)
    if state.is_admissible():
        return InsertOutcome(action, row, len(queue), len(outgoing))
    # several single-row violators can jointly fill another row
    for l in queue:
        state.remove_index(l)
    for l in outgoing:
        state.add_index(l)
    log.debug("reverted %s exchange on row %d", action, row)
    return InsertOutcome(None, row, reverted=True)


@dataclass(frozen=True)
class _Plan:
    """What ``insert_move`` would do on one state, before any random draw.

    ``kind`` is ``"insert"`` (``moves`` holds the V-index), ``"grow"`` or
    ``"plateau"`` (``moves`` holds ``(row, queue, sb)`` options, one for grow)
    or ``None``.
    """

    kind: str | None
    moves: tuple = ()


_NO_PLAN = _Plan(None)


def _plan_insert(state: TupleState, level: InsertLevel, strict_levels: bool) -> _Plan:
    if len(state) < 2:
        return _NO_PLAN
    member = state.member
    inner = np.arange(state.idx[0] + 1, state.idx[-1])
    inner = inner[~member[inner]]
    if len(inner) == 0:
        return _NO_PLAN
    tight = state.tight_rows()
    if len(tight) == 0:
        if level == InsertLevel.SINGLE or not strict_levels:
            return _Plan("insert", (int(inner[0]),))
        return _NO_PLAN
    hits = state.M[state.context.cols[inner[:, None], tight[None, :]]] == 0
    delta = np.count_nonzero(hits, axis=1)
    if level == InsertLevel.SINGLE or not strict_levels:
        free = np.flatnonzero(delta == 0)
        if len(free):
            return _Plan("insert", (int(inner[free[0]]),))
    if level == InsertLevel.SINGLE:
        return _NO_PLAN

    single = np.flatnonzero(delta == 1)
    if len(single) == 0:
        return _NO_PLAN
    rows = tight[np.argmax(hits[single], axis=1)]
    queues: dict[int, list[int]] = {}
    for l, i in zip(inner[single].tolist(), rows.tolist()):
        queues.setdefault(i, []).append(l)

    second = {i: state.second_best_column(i) for i in sorted(queues)}
    for i, (sb, m_sb) in second.items():
        if len(queues[i]) > m_sb:
            return _Plan("grow", ((i, tuple(queues[i]), sb),))
    if level == InsertLevel.GROW:
        return _NO_PLAN
    eligible = tuple((i, tuple(queues[i]), sb) for i, (sb, m_sb) in second.items() if len(queues[i]) == m_sb > 0)
    if not eligible:
        return _NO_PLAN
    return _Plan("plateau", eligible)


def _apply_plan(state: TupleState, plan: _Plan, rng: np.random.Generator) -> InsertOutcome:
    if plan.kind is None:
        return _NOTHING
    if plan.kind == "insert":
        state.add_index(plan.moves[0])
        return InsertOutcome("insert", added=1)
    if plan.kind == "grow":
        row, queue, sb = plan.moves[0]
    else:
        row, queue, sb = plan.moves[int(rng.integers(len(plan.moves)))]
    return _exchange(state, row, list(queue), sb, plan.kind)


def insert_move(state: TupleState, level: int, rng: np.random.Generator,
                strict_levels: bool = False) -> InsertOutcome:
    """Try to add values strictly inside ``[h_1, h_n]``.

    The first interior value with no violation is inserted outright (at every
    level unless ``strict_levels``, which reserves that to level 0).  Values
    violating exactly one row ``i`` are queued in ``Q_i``; level 1 then swaps
    ``Q_i`` against the members ``W_{i,sb}`` of that row's least-occupied
    column when ``|Q_i| > m_{i,sb}``, and level 2 does the same-size swap
    ``|Q_i| = m_{i,sb}`` on a random eligible row.
    """
    return _apply_plan(state, _plan_insert(state, InsertLevel(level), strict_levels), rng)


class _PlateauMemo:
    """Plans and observed exchange results of the states met in one insert phase.

    Once every state reachable from the current one is known to offer only
    plateau exchanges, all of them already tried, no later move can grow the
    tuple and the phase can stop.
    """

    def __init__(self):
        self.plans: dict[tuple, _Plan] = {}
        self.after: dict[tuple, dict[int, tuple]] = {}

    def trapped(self, key: tuple) -> bool:
        seen, stack = {key}, [key]
        while stack:
            node = stack.pop()
            plan = self.plans.get(node)
            if plan is None or plan.kind != "plateau":
                return False
            after = self.after.get(node, {})
            for row, _, _ in plan.moves:
                nxt = after.get(row)
                if nxt is None:
                    return False
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return True


# -- local search ----------------------------------------------------------------

@dataclass
class LocalSearchResult:
    state: TupleState
    # insert phase reached k elements, so the output is strictly narrower
    reached: bool
    failed: bool = False


def local_search(state: TupleState, k: int, n_remove: int, n_insert: int, level: int,
                 rng: np.random.Generator, strict_levels: bool = False) -> LocalSearchResult:
    """Trim ``n_remove`` random ends, run up to ``n_insert`` insert moves, repair to ``k``.

    At least one element is always kept.  The insert phase also stops early
    when it would only repeat itself: after a no-op, or once the plateau
    exchanges reachable from the current state are all known to lead nowhere
    new.  If repair fails the untouched input is returned with ``failed`` set.
    """
    work = state.copy()
    for _ in range(n_remove):
        if len(work) <= 1:
            break
        side_remove(work, random_side(rng))
    reached = False
    level = InsertLevel(level)
    memo = _PlateauMemo()
    for _ in range(n_insert):
        if len(work) >= k:
            break
        key = tuple(work.idx)
        plan = memo.plans.get(key)
        if plan is None:
            plan = memo.plans[key] = _plan_insert(work, level, strict_levels)
        elif plan.kind == "plateau" and memo.trapped(key):
            break
        outcome = _apply_plan(work, plan, rng)
        if len(work) >= k:
            reached = True
            break
        if outcome.action is None and not outcome.reverted:
            # nothing changed and no draw was made: later calls would repeat this
            break
        if plan.kind == "plateau":
            memo.after.setdefault(key, {})[outcome.row] = tuple(work.idx)
    try:
        repair(work, k)
    except RepairFailed:
        return LocalSearchResult(state, False, failed=True)
    return LocalSearchResult(work, reached)
