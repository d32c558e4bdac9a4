"""Region-based adaptive local search over the start-value landscape.

A :class:`SolutionDatabase` keeps, for every start value ``v = h_1`` seen so
far, the narrowest admissible k-tuple found with that start.  Its entries
``(v, f(v))`` form a virtual fitness landscape over ``[0, U]``, partitioned
into equal-width regions that drive selection.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import baselines
from .context import build_context, default_range
from .core import ProblemContext, TupleState, rebuild
from .operators import InsertLevel, local_search, shift_search
from .verify import full_verify

log = logging.getLogger(__name__)


SIEVES = ("auto", "aligned", "centred", "literal")


@dataclass
class RalsConfig:
    """Tunables of the search loop.

    Defaults are the base configuration; :meth:`preset` also knows ``"best"``
    (``gamma=0.1``, ``n_insert2=10``).  ``ls_literals`` chooses how the two
    local-search calls differ: ``"removals"`` uses ``n_remove1``/``n_remove2``
    ends trimmed, ``"levels"`` instead runs both with ``n_remove1`` and insert
    levels 1 and 2.  ``sieve`` picks the candidate set: ``"aligned"`` (see
    :func:`aligned_context`), ``"centred"`` (Hensley-Richards pattern centred
    in ``[0, U]``), ``"literal"`` (class 1 removed modulo every small prime)
    or ``"auto"``, which searches the aligned and centred sets side by side.
    """

    T: int = 1000
    regions: int = 20
    gamma: float = 0.01
    tournament: int = 4
    n_shifts: int = 10
    beta: float = 1.0
    level: int = 2
    n_remove1: int = 1
    n_remove2: int = 2
    n_insert1: int = 500
    n_insert2: int = 0
    seed: int = 0
    U: int | None = None
    strict_levels: bool = False
    ls_literals: str = "removals"
    sieve: str = "auto"
    check: bool = False

    PRESETS = {
        "basever": {},
        "best": {"gamma": 0.1, "n_insert2": 10},
    }

    def __post_init__(self):
        for name in ("T", "n_remove1", "n_remove2", "n_insert1", "n_insert2", "beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("regions", "tournament", "n_shifts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        self.level = int(InsertLevel(self.level))
        if self.ls_literals not in ("removals", "levels"):
            raise ValueError("ls_literals must be 'removals' or 'levels'")
        if self.sieve not in SIEVES:
            raise ValueError(f"sieve must be one of {SIEVES}")

    @classmethod
    def preset(cls, name: str, **overrides) -> "RalsConfig":
        try:
            values = dict(cls.PRESETS[name])
        except KeyError:
            raise ValueError(f"unknown preset {name!r}") from None
        values.update(overrides)
        return cls(**values)

    def replace(self, **changes) -> "RalsConfig":
        return dataclasses.replace(self, **changes)


# -- solution database -----------------------------------------------------------

@dataclass
class Entry:
    diameter: int
    H: tuple[int, ...]


class SolutionDatabase:
    """Best-so-far k-tuple per start value, grouped into ``n_regions`` ranges of ``[0, U]``."""

    def __init__(self, k: int, U: int, n_regions: int, check: bool = False):
        if n_regions < 1:
            raise ValueError("need at least one region")
        self.k = k
        self.U = U
        self.n_regions = n_regions
        self.check = check
        self.entries: dict[int, Entry] = {}
        self._region_best: dict[int, int] = {}

    def region_of(self, v: int) -> int:
        return v * self.n_regions // (self.U + 1)

    def region_bounds(self, r: int) -> tuple[int, int]:
        """Inclusive integer range of region ``r`` (empty when ``lo > hi``)."""
        size = self.U + 1
        lo = -(-r * size // self.n_regions)
        hi = -(-(r + 1) * size // self.n_regions) - 1
        return lo, hi

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, H: Sequence[int] | TupleState) -> bool:
        """Store ``H`` if it beats the entry at its start value; report whether it did."""
        if isinstance(H, TupleState):
            if len(H) != self.k or not H.is_admissible():
                raise ValueError("only admissible k-tuples can be saved")
            values = H.H
        else:
            values = tuple(int(h) for h in H)
            if not full_verify(values, self.k):
                raise ValueError("only admissible k-tuples can be saved")
        if self.check and not full_verify(values, self.k):
            raise AssertionError(f"inadmissible tuple reached the database: {values}")
        v = values[0]
        if not 0 <= v <= self.U:
            raise ValueError(f"start value {v} outside [0, {self.U}]")
        d = values[-1] - v
        current = self.entries.get(v)
        if current is not None and d >= current.diameter:
            return False
        self.entries[v] = Entry(d, values)
        r = self.region_of(v)
        holder = self._region_best.get(r)
        if holder is None or (d, v) < (self.entries[holder].diameter, holder):
            self._region_best[r] = v
        return True

    def region_candidates(self) -> list[Entry]:
        """Narrowest entry of every non-empty region, in region order."""
        return [self.entries[self._region_best[r]] for r in sorted(self._region_best)]

    def best(self) -> Entry:
        if not self.entries:
            raise ValueError("database is empty")
        v = min(self.entries, key=lambda v: (self.entries[v].diameter, v))
        return self.entries[v]

    def snapshot(self) -> list[tuple[int, int]]:
        return [(v, self.entries[v].diameter) for v in sorted(self.entries)]


def landscape_snapshot(db: SolutionDatabase) -> list[tuple[int, int]]:
    if not db.entries:
        raise ValueError("database is empty")
    return db.snapshot()


def db_save(db: SolutionDatabase, candidate: Sequence[int] | TupleState) -> bool:
    return db.save(candidate)


def aligned_context(k: int, U: int | None = None,
                    scan: baselines.ShiftScan | None = None) -> tuple[ProblemContext, int, int]:
    """Candidate set laid out like the shifted greedy baseline, its window width and origin.

    The small primes remove the Schinzel classes, translated so that the
    baseline's best start sits in the middle of the usable starts
    ``[0, U - x]``.  Value ``v`` corresponds to ``v - origin`` in the
    baseline's coordinates.
    """
    if U is None:
        U = default_range(k)
    scan = scan or baselines.shifted_greedy_scan(k)
    origin = max(0, (U - scan.width) // 2) - scan.shift
    return build_context(k, U, "schinzel", origin), scan.width, origin


def db_init(context: ProblemContext, k: int, n_regions: int, span: int | None = None,
            origin: int = 0, check: bool = False) -> SolutionDatabase:
    """Seed every region with the best shifted greedy tuple starting inside it.

    Small primes are already sieved out of the candidate set; the rest of
    ``P_C`` is sieved greedily on ``[s, s + span]`` for every start
    ``s <= U - span`` of the candidates' parity.  Each result is filed under
    its first element and only the narrowest per region is saved.  Without
    ``span`` the minimal window at the first candidate is used; ``origin``
    anchors the greedy tie-breaks (see :class:`~narrow_tuples.baselines.GreedySieve`).
    """
    db = SolutionDatabase(k, context.U, n_regions, check=check)
    small = set(context.P_R)
    greedy = [p for p in context.P_C if p not in small]
    V = context.V
    sieve = baselines.GreedySieve(V, greedy, k, origin)
    if span is None:
        found = sieve.minimal_span(int(V[0]), max(int(k * math.log(k) + k), k), limit=context.U - int(V[0]))
        if found is None:
            raise RuntimeError(f"no admissible {k}-tuple fits in [0, {context.U}]")
        span = found[0]
    step = 2 if len(np.unique(V % 2)) == 1 else 1
    leaders: dict[int, np.ndarray] = {}
    for s in range(int(V[0]) % step, context.U - span + 1, step):
        found = sieve.run(s, span)
        if found is None:
            continue
        r = db.region_of(int(found[0]))
        held = leaders.get(r)
        if held is None or (found[-1] - found[0], found[0]) < (held[-1] - held[0], held[0]):
            leaders[r] = found
    for r in range(n_regions):
        if r in leaders:
            db.save(tuple(int(v) for v in leaders[r]))
        else:
            lo, hi = db.region_bounds(r)
            log.debug("region %d [%d, %d] has no initial tuple", r, lo, hi)
    if not db.entries:
        raise RuntimeError(f"no admissible {k}-tuple fits in [0, {context.U}]")
    return db


def db_select(db: SolutionDatabase, gamma: float, tournament: int, rng: np.random.Generator,
              context: ProblemContext) -> TupleState:
    """Pick an incumbent among the per-region leaders.

    With probability ``gamma`` the pick is uniform; otherwise it is the
    narrowest of ``tournament`` uniform draws (with replacement).
    """
    candidates = db.region_candidates()
    if not candidates:
        raise ValueError("database is empty")
    if rng.random() < gamma:
        chosen = candidates[int(rng.integers(len(candidates)))]
    else:
        draws = rng.integers(len(candidates), size=tournament)
        chosen = min((candidates[int(i)] for i in draws), key=lambda e: (e.diameter, e.H[0]))
    return rebuild(chosen.H, context)


# -- main loop -------------------------------------------------------------------

@dataclass(frozen=True)
class TraceRow:
    iteration: int
    best_d: int
    selected_v: int
    op: str
    accepted: bool

    def csv(self) -> str:
        return f"{self.iteration},{self.best_d},{self.selected_v},{self.op},{int(self.accepted)}"


TRACE_HEADER = "iter,best_d,selected_v,op,accepted"


@dataclass
class RalsResult:
    k: int
    best: tuple[int, ...]
    diameter: int
    db: SolutionDatabase
    context: ProblemContext
    trace: list[TraceRow] = field(default_factory=list)
    best_per_iteration: list[int] = field(default_factory=list)
    seconds: float = 0.0
    iterations: int = 0
    tracks: list = field(default_factory=list)

    def normalized(self) -> tuple[int, ...]:
        return tuple(h - self.best[0] for h in self.best)


@dataclass
class Track:
    """One candidate set with its own database."""

    name: str
    context: ProblemContext
    db: SolutionDatabase


def build_tracks(k: int, config: RalsConfig) -> list[Track]:
    U = config.U if config.U is not None else default_range(k)
    names = ("aligned", "centred") if config.sieve == "auto" else (config.sieve,)
    tracks = []
    for name in names:
        if name == "aligned":
            context, span, origin = aligned_context(k, U)
        else:
            origin = U // 2 if name == "centred" else 1
            context, span = build_context(k, U, "hr", origin), None
        tracks.append(Track(name, context, db_init(context, k, config.regions, span, origin, config.check)))
    return tracks


def _best_track(tracks: Sequence[Track]) -> Track:
    # earlier tracks win ties
    return min(tracks, key=lambda tr: tr.db.best().diameter)


def rals_solve(k: int, config: RalsConfig | None = None, context: ProblemContext | None = None,
               db: SolutionDatabase | None = None,
               progress: Callable[[int, int], None] | None = None) -> RalsResult:
    """Search for a narrow admissible k-tuple.

    Each iteration selects an incumbent from a database, shifts it along
    the number line, then improves it with one or two trim-insert-repair
    passes, saving every result.  With several candidate sets (``sieve="auto"``)
    iterations alternate between their databases.  ``context`` and ``db`` may
    be supplied to reuse setup work; ``db`` is then updated in place.
    """
    config = config or RalsConfig()
    started = time.perf_counter()
    if context is not None:
        if db is None:
            db = db_init(context, k, config.regions, check=config.check)
        tracks = [Track("given", context, db)]
    elif db is not None:
        raise ValueError("a database needs its context")
    else:
        tracks = build_tracks(k, config)
    rng = np.random.default_rng(config.seed)

    if config.ls_literals == "removals":
        passes = [(config.n_remove1, config.n_insert1, config.level, "local1"),
                  (config.n_remove2, config.n_insert2, config.level, "local2")]
    else:
        passes = [(config.n_remove1, config.n_insert1, 1, "local1"),
                  (config.n_remove1, config.n_insert2, 2, "local2")]

    trace: list[TraceRow] = []
    per_iter: list[int] = []
    best_d = _best_track(tracks).db.best().diameter
    for t in range(1, config.T + 1):
        track = tracks[(t - 1) % len(tracks)]
        db = track.db
        tag = f"{track.name}:" if len(tracks) > 1 else ""
        state = db_select(db, config.gamma, config.tournament, rng, track.context)
        selected = state.first
        state = shift_search(state, config.n_shifts, config.beta, rng)
        accepted = db.save(state)
        best_d = min(best_d, state.diameter())
        trace.append(TraceRow(t, best_d, selected, tag + "shift", accepted))
        for n_remove, n_insert, level, name in passes:
            if n_insert == 0:
                continue
            before = state.diameter()
            result = local_search(state, k, n_remove, n_insert, level, rng, config.strict_levels)
            state = result.state
            if result.reached and not state.diameter() < before:
                raise AssertionError("local search reached k but did not narrow the tuple")
            accepted = db.save(state)
            best_d = min(best_d, state.diameter())
            trace.append(TraceRow(t, best_d, selected, tag + name, accepted))
        per_iter.append(best_d)
        if progress is not None:
            progress(t, best_d)

    winner = _best_track(tracks)
    best = winner.db.best()
    return RalsResult(k=k, best=best.H, diameter=best.diameter, db=winner.db, context=winner.context,
                      trace=trace, best_per_iteration=per_iter,
                      seconds=time.perf_counter() - started, iterations=config.T,
                      tracks=tracks)
