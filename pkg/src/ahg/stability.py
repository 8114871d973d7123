"""Blocking predicates and (strict) core verification with certificates.

Coalitions are enumerated by ascending size, then lexicographically by their
sorted member tuples, so the first certificate found is reproducible. The
parallel strategy splits the search space on the membership pattern of the
highest-id candidate players and merges per-chunk results by the same order.
"""

from __future__ import annotations

import enum
import math
import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence

from .errors import CapacityError, ContractError, InvariantViolation
from .game import (
    Coalition,
    CoalitionLike,
    CoalitionStructure,
    Degree,
    GameInstance,
    UtilityModel,
    _utility_pair,
    as_coalition,
    utility,
)
from .graph import bits_of

EXHAUSTIVE_MAX_PLAYERS = 25
BRUTE_FORCE_MAX_PLAYERS = 16
THREADS_ENV = "AHG_THREADS"


class Status(str, enum.Enum):
    STABLE = "stable"
    BLOCKED = "blocked"
    STABLE_UP_TO_BOUND = "stable_up_to_bound"


@dataclass(frozen=True)
class CoreVerdict:
    status: Status
    certificate: Optional[Coalition] = None
    explored: int = 0
    bound: Optional[dict] = None

    @property
    def is_blocked(self) -> bool:
        return self.status is Status.BLOCKED


@dataclass(frozen=True)
class Strategy:
    """How to search. ``candidate_players``/``max_size`` set only for restricted runs."""

    kind: str = "exhaustive"
    max_size: Optional[int] = None
    candidate_players: Optional[tuple[int, ...]] = None
    threads: int = 1
    deterministic: bool = True

    @classmethod
    def exhaustive(cls) -> "Strategy":
        return cls("exhaustive")

    @classmethod
    def exhaustive_parallel(cls, threads: Optional[int] = None, deterministic: bool = True) -> "Strategy":
        return cls("exhaustive_parallel", threads=threads or default_threads(), deterministic=deterministic)

    @classmethod
    def restricted(
        cls,
        max_size: int,
        candidate_players: Optional[Sequence[int]] = None,
        threads: int = 1,
        deterministic: bool = True,
    ) -> "Strategy":
        cands = None if candidate_players is None else tuple(sorted(set(candidate_players)))
        return cls("restricted", max_size=max_size, candidate_players=cands, threads=threads,
                   deterministic=deterministic)


def default_threads() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def _strictly_better(game, c: Coalition, gamma, model, i) -> bool:
    return utility(game, i, c, model) > utility(game, i, gamma.block_of(i), model)


def blocks(game: GameInstance, c: CoalitionLike, gamma: CoalitionStructure, model: UtilityModel) -> bool:
    """True iff every member of ``c`` strictly prefers ``c`` to its block in ``gamma``."""
    c = as_coalition(c)
    if c.mask == 0:
        raise ContractError("blocking coalition must be nonempty")
    game.check_coalition(c)
    return all(_strictly_better(game, c, gamma, model, i) for i in c)


def weakly_blocks(game: GameInstance, c: CoalitionLike, gamma: CoalitionStructure, model: UtilityModel) -> bool:
    """True iff every member weakly prefers ``c`` and at least one strictly prefers it."""
    c = as_coalition(c)
    if c.mask == 0:
        raise ContractError("blocking coalition must be nonempty")
    game.check_coalition(c)
    strict = False
    for i in c:
        u_new = utility(game, i, c, model)
        u_old = utility(game, i, gamma.block_of(i), model)
        if u_new < u_old:
            return False
        if u_new > u_old:
            strict = True
    return strict


def make_checker(
    game: GameInstance, gamma: CoalitionStructure, model: UtilityModel, weak: bool = False
) -> Callable[[int], bool]:
    """Fast blocking test on raw bitmasks; current utilities are precomputed once."""
    block = gamma.block_masks()
    current = [_utility_pair(game, i, block[i], model) for i in range(game.n)]
    friends = game.friends
    n1 = game.n + 1
    aggregate_min = model.aggregate.value == "min"
    degree = model.degree

    def check(mask: int) -> bool:
        size_term = 1 - mask.bit_count()
        vals: dict[int, int] = {}

        def val(j):
            v = vals.get(j)
            if v is None:
                v = n1 * (friends[j] & mask).bit_count() + size_term
                vals[j] = v
            return v

        def agg(group):
            if not group:
                return 0
            values = [val(j) for j in bits_of(group)]
            if aggregate_min:
                return min(values)
            if len(values) == 1:
                return values[0]
            return Fraction(sum(values), len(values))

        strict = False
        for i in bits_of(mask):
            group = friends[i] & mask
            if degree is Degree.EQ:
                u = (agg(group | 1 << i), 0)
            elif degree is Degree.SF:
                u = (val(i), agg(group))
            else:
                u = (agg(group), val(i))
            old = current[i]
            if weak:
                if u < old:
                    return False
                if u > old:
                    strict = True
            elif not u > old:
                return False
        return strict if weak else True

    return check


def _search_plain(check, candidates: Sequence[int], max_size: int):
    """Sequential scan; returns (first blocking mask or None, coalitions explored)."""
    bit = [1 << p for p in candidates]
    explored = 0
    for size in range(1, max_size + 1):
        for combo in combinations(bit, size):
            explored += 1
            mask = sum(combo)
            if check(mask):
                return mask, explored
    return None, explored


def _order_key(mask: int):
    return (mask.bit_count(), tuple(bits_of(mask)))


# per-process state for the parallel search
_WORKER: dict = {}


def _worker_init(game, gamma, model, weak, best_size, found):
    _WORKER["check"] = make_checker(game, gamma, model, weak)
    _WORKER["best_size"] = best_size
    _WORKER["found"] = found


def _search_chunk(low: Sequence[int], high_mask: int, max_size: int, deterministic: bool):
    check = _WORKER["check"]
    best_size = _WORKER["best_size"]
    found = _WORKER["found"]
    fixed = high_mask.bit_count()
    bit = [1 << p for p in low]
    explored = 0
    for size in range(max(fixed, 1), max_size + 1):
        if deterministic:
            if size > best_size.value:
                break
        elif found.is_set():
            break
        for combo in combinations(bit, size - fixed):
            explored += 1
            mask = sum(combo) | high_mask
            if check(mask):
                if deterministic:
                    with best_size.get_lock():
                        if size < best_size.value:
                            best_size.value = size
                else:
                    found.set()
                return mask, explored
    return None, explored


def _search_parallel(game, gamma, model, weak, candidates, max_size, threads, deterministic):
    split = min(len(candidates), max(1, math.ceil(math.log2(threads * 4))))
    low, high = list(candidates[: len(candidates) - split]), list(candidates[len(candidates) - split :])
    chunks = []
    for pattern in range(1 << split):
        high_mask = 0
        for idx, p in enumerate(high):
            if pattern >> idx & 1:
                high_mask |= 1 << p
        if high_mask.bit_count() <= max_size:
            chunks.append(high_mask)
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    best_size = ctx.Value("i", max_size + 1)
    found = ctx.Event()
    with ProcessPoolExecutor(
        max_workers=threads,
        mp_context=ctx,
        initializer=_worker_init,
        initargs=(game, gamma, model, weak, best_size, found),
    ) as pool:
        results = list(pool.map(_search_chunk, [low] * len(chunks), chunks,
                                [max_size] * len(chunks), [deterministic] * len(chunks)))
    explored = sum(r[1] for r in results)
    hits = [r[0] for r in results if r[0] is not None]
    if not hits:
        return None, explored
    if deterministic:
        return min(hits, key=_order_key), explored
    return hits[0], explored


def _as_strategy(strategy) -> Strategy:
    if strategy is None:
        return Strategy.exhaustive()
    if isinstance(strategy, Strategy):
        return strategy
    if strategy in ("exhaustive", "exhaustive_parallel", "exhaustive-parallel"):
        return Strategy(kind=strategy.replace("-", "_"),
                        threads=1 if strategy == "exhaustive" else default_threads())
    raise ContractError(f"unknown strategy {strategy!r}")


def _verify(game, gamma, model, strategy, weak, max_players):
    strategy = _as_strategy(strategy)
    if gamma.n != game.n:
        raise ContractError(f"coalition structure covers {gamma.n} players, game has {game.n}")
    if strategy.kind == "restricted":
        candidates = strategy.candidate_players
        if candidates is None:
            candidates = tuple(range(game.n))
        for p in candidates:
            if not 0 <= p < game.n:
                raise ContractError(f"candidate player {p} out of range")
        max_size = min(strategy.max_size if strategy.max_size is not None else len(candidates), len(candidates))
        bound = {"max_size": max_size, "candidate_players": list(candidates)}
    elif strategy.kind in ("exhaustive", "exhaustive_parallel"):
        if game.n > max_players:
            raise CapacityError(
                f"exhaustive search is limited to {max_players} players, game has {game.n}; "
                "use the restricted strategy instead"
            )
        candidates = tuple(range(game.n))
        max_size = game.n
        bound = None
    else:
        raise ContractError(f"unknown strategy kind {strategy.kind!r}")

    threads = strategy.threads if strategy.kind != "exhaustive" else 1
    if threads > 1 and len(candidates) > 1:
        mask, explored = _search_parallel(game, gamma, model, weak, candidates, max_size, threads,
                                          strategy.deterministic)
    else:
        mask, explored = _search_plain(make_checker(game, gamma, model, weak), candidates, max_size)

    if mask is not None:
        cert = Coalition(mask)
        predicate = weakly_blocks if weak else blocks
        if not predicate(game, cert, gamma, model):
            raise InvariantViolation(f"search returned {list(cert.members)} which does not block")
        return CoreVerdict(Status.BLOCKED, cert, explored, bound)
    if bound is not None:
        return CoreVerdict(Status.STABLE_UP_TO_BOUND, None, explored, bound)
    return CoreVerdict(Status.STABLE, None, explored, bound)


def verify_core(
    game: GameInstance,
    gamma: CoalitionStructure,
    model: UtilityModel,
    strategy=None,
    max_players: int = EXHAUSTIVE_MAX_PLAYERS,
) -> CoreVerdict:
    """Search for a coalition blocking ``gamma``."""
    return _verify(game, gamma, model, strategy, False, max_players)


def verify_strict_core(
    game: GameInstance,
    gamma: CoalitionStructure,
    model: UtilityModel,
    strategy=None,
    max_players: int = EXHAUSTIVE_MAX_PLAYERS,
) -> CoreVerdict:
    """Search for a coalition weakly blocking ``gamma``."""
    return _verify(game, gamma, model, strategy, True, max_players)


def brute_force_core(
    game: GameInstance,
    gamma: CoalitionStructure,
    model: UtilityModel,
    max_players: int = BRUTE_FORCE_MAX_PLAYERS,
) -> CoreVerdict:
    """Reference verdict from the textbook definitions.

    Uses Python sets and scalar utilities with the explicit weight ``w = n**4``;
    shares no evaluation code with :func:`verify_core`.
    """
    n = game.n
    if n > max_players:
        raise CapacityError(f"brute-force oracle is limited to {max_players} players, game has {n}")
    edges = {frozenset(e) for e in game.graph.edges}
    players = list(range(n))
    w = n ** 4
    home = {}
    for block in gamma.blocks:
        members = set(block.members)
        for i in members:
            home[i] = members

    def val(i, coalition):
        f = sum(1 for j in coalition if j != i and frozenset((i, j)) in edges)
        e = sum(1 for j in coalition if j != i and frozenset((i, j)) not in edges)
        return n * f - e

    def util(i, coalition):
        own = val(i, coalition)
        pals = [j for j in coalition if frozenset((i, j)) in edges]
        pal_vals = [val(j, coalition) for j in pals]
        agg, deg = model.aggregate.value, model.degree.value
        if deg == "EQ":
            vals = pal_vals + [own]
            return min(vals) if agg == "min" else Fraction(sum(vals), len(vals))
        if not pal_vals:
            friends_part = 0
        elif agg == "min":
            friends_part = min(pal_vals)
        else:
            friends_part = Fraction(sum(pal_vals), len(pal_vals))
        if deg == "SF":
            return w * own + friends_part
        return own + w * friends_part

    explored = 0
    for size in range(1, n + 1):
        for members in combinations(players, size):
            explored += 1
            coalition = set(members)
            if all(util(i, coalition) > util(i, home[i]) for i in members):
                return CoreVerdict(Status.BLOCKED, Coalition.of(members), explored)
    return CoreVerdict(Status.STABLE, None, explored)
