"""Altruistic hedonic games over a network of friends.

Coalitions are bitmasks over player ids. Utilities are exact: the large weight
``w`` that orders selfish-first (SF) and altruistic-treatment (AL) utilities is
replaced by a lexicographic pair, see :class:`UtilityValue`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import ContractError, StructuralError
from .graph import FriendshipGraph, bits_of, build_graph, mask_of


@dataclass(frozen=True, order=True)
class Coalition:
    mask: int

    @classmethod
    def of(cls, members: Iterable[int]) -> "Coalition":
        return cls(mask_of(members))

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(bits_of(self.mask))

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(bits_of(self.mask))

    def issubset(self, other: "Coalition") -> bool:
        return self.mask & ~other.mask == 0

    def __repr__(self) -> str:
        return f"Coalition({list(self.members)})"


CoalitionLike = Union[Coalition, Iterable[int]]


def as_coalition(c: CoalitionLike) -> Coalition:
    if isinstance(c, Coalition):
        return c
    return Coalition.of(c)


@dataclass(frozen=True)
class GameInstance:
    """A friendship graph read as a game; ``friends[i]`` is the bitmask of F_i."""

    graph: FriendshipGraph

    @property
    def n(self) -> int:
        return self.graph.num_vertices

    @property
    def friends(self) -> tuple[int, ...]:
        return self.graph.adjacency

    @property
    def all_players(self) -> int:
        return (1 << self.n) - 1

    def enemies(self, i: int) -> int:
        return self.all_players & ~self.friends[i] & ~(1 << i)

    def check_coalition(self, c: Coalition) -> None:
        if c.mask >> self.n:
            raise StructuralError(f"coalition {list(c.members)} has players outside 0..{self.n - 1}")


def make_game(num_players: int, edges: Iterable[Sequence[int]] = ()) -> GameInstance:
    return GameInstance(build_graph(num_players, edges))


@dataclass(frozen=True)
class CoalitionStructure:
    """An exact partition of ``0..n-1`` into nonempty blocks, stored canonically."""

    n: int
    blocks: tuple[Coalition, ...]

    @classmethod
    def of(cls, n: int, blocks: Iterable[CoalitionLike]) -> "CoalitionStructure":
        coalitions = [as_coalition(b) for b in blocks]
        seen = 0
        for c in coalitions:
            if c.mask == 0:
                raise ContractError("coalition structure contains an empty block")
            if c.mask >> n:
                raise ContractError(f"block {list(c.members)} has players outside 0..{n - 1}")
            if seen & c.mask:
                raise ContractError(f"block {list(c.members)} overlaps an earlier block")
            seen |= c.mask
        if seen != (1 << n) - 1:
            missing = bits_of(((1 << n) - 1) & ~seen)
            raise ContractError(f"players {missing} are not covered by any block")
        coalitions.sort(key=lambda c: (c.mask & -c.mask).bit_length())
        return cls(n, tuple(coalitions))

    @classmethod
    def grand(cls, n: int) -> "CoalitionStructure":
        return cls.of(n, [range(n)])

    @classmethod
    def singletons(cls, n: int) -> "CoalitionStructure":
        return cls.of(n, [[i] for i in range(n)])

    def block_of(self, i: int) -> Coalition:
        for b in self.blocks:
            if i in b:
                return b
        raise ContractError(f"player {i} is not in the structure")

    def block_masks(self) -> list[int]:
        """``result[i]`` is the mask of the block containing player ``i``."""
        out = [0] * self.n
        for b in self.blocks:
            for i in bits_of(b.mask):
                out[i] = b.mask
        return out

    def as_lists(self) -> list[list[int]]:
        return [list(b.members) for b in self.blocks]

    def __eq__(self, other):
        if not isinstance(other, CoalitionStructure):
            return NotImplemented
        return self.n == other.n and set(self.blocks) == set(other.blocks)

    def __hash__(self):
        return hash((self.n, frozenset(self.blocks)))


class Aggregate(str, enum.Enum):
    AVG = "avg"
    MIN = "min"


class Degree(str, enum.Enum):
    SF = "SF"
    EQ = "EQ"
    AL = "AL"


class UtilityModel(enum.Enum):
    AVG_SF = (Aggregate.AVG, Degree.SF)
    AVG_EQ = (Aggregate.AVG, Degree.EQ)
    AVG_AL = (Aggregate.AVG, Degree.AL)
    MIN_SF = (Aggregate.MIN, Degree.SF)
    MIN_EQ = (Aggregate.MIN, Degree.EQ)
    MIN_AL = (Aggregate.MIN, Degree.AL)

    @property
    def aggregate(self) -> Aggregate:
        return self.value[0]

    @property
    def degree(self) -> Degree:
        return self.value[1]

    @property
    def tag(self) -> str:
        return f"{self.aggregate.value}-{self.degree.value.lower()}"

    @classmethod
    def parse(cls, tag: str) -> "UtilityModel":
        for m in cls:
            if m.tag == tag.lower():
                return m
        raise ValueError(f"unknown model {tag!r}; expected one of {[m.tag for m in cls]}")

    def __str__(self) -> str:
        return self.tag


ALL_MODELS = tuple(UtilityModel)


@dataclass(frozen=True, order=True)
class UtilityValue:
    """Exact utility as a pair compared lexicographically.

    SF: (own valuation, friends' aggregate); EQ: (aggregate including self, 0);
    AL: (friends' aggregate, own valuation).
    """

    primary: Fraction
    secondary: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "primary", Fraction(self.primary))
        object.__setattr__(self, "secondary", Fraction(self.secondary))


def _require_member(i: int, c: Coalition) -> None:
    if i not in c:
        raise ContractError(f"player {i} is not a member of {list(c.members)}")


def _valuation(game: GameInstance, i: int, mask: int) -> int:
    # n*|F_i ∩ C| - |E_i ∩ C| with |E_i ∩ C| = |C| - 1 - |F_i ∩ C|
    f = (game.friends[i] & mask).bit_count()
    return (game.n + 1) * f - mask.bit_count() + 1


def valuation(game: GameInstance, i: int, c: CoalitionLike) -> int:
    c = as_coalition(c)
    _require_member(i, c)
    return _valuation(game, i, c.mask)


def _empty_aggregate():
    # Minimum (and, by the same convention, average) over no friends is zero.
    return 0


def _aggregate(values: list[int], aggregate: Aggregate):
    if not values:
        return _empty_aggregate()
    if aggregate is Aggregate.MIN:
        return min(values)
    total = sum(values)
    if len(values) == 1:
        return total
    return Fraction(total, len(values))


def _friend_values(game: GameInstance, i: int, mask: int, with_self: bool) -> list[int]:
    group = game.friends[i] & mask
    if with_self:
        group |= 1 << i
    return [_valuation(game, j, mask) for j in bits_of(group)]


def friend_aggregate(
    game: GameInstance, i: int, c: CoalitionLike, aggregate: Aggregate | str, with_self: bool = False
) -> Fraction:
    c = as_coalition(c)
    _require_member(i, c)
    aggregate = Aggregate(aggregate)
    return Fraction(_aggregate(_friend_values(game, i, c.mask, with_self), aggregate))


def _utility_pair(game: GameInstance, i: int, mask: int, model: UtilityModel) -> tuple:
    """Unwrapped lexicographic key (ints or Fractions) used on hot paths."""
    aggregate, degree = model.value
    if degree is Degree.EQ:
        return (_aggregate(_friend_values(game, i, mask, True), aggregate), 0)
    own = _valuation(game, i, mask)
    friends = _aggregate(_friend_values(game, i, mask, False), aggregate)
    if degree is Degree.SF:
        return (own, friends)
    return (friends, own)


def utility(game: GameInstance, i: int, c: CoalitionLike, model: UtilityModel) -> UtilityValue:
    c = as_coalition(c)
    _require_member(i, c)
    return UtilityValue(*_utility_pair(game, i, c.mask, model))


def to_numeric(u: UtilityValue, model: UtilityModel, w: int) -> Fraction:
    """Scalar utility for an explicit weight ``w`` (meaningful for ``w >= n**4``)."""
    if model.degree is Degree.EQ:
        return u.primary
    return w * u.primary + u.secondary


class Preference(str, enum.Enum):
    PREFERS_C = "prefers_c"
    PREFERS_D = "prefers_d"
    INDIFFERENT = "indifferent"


def compare(game: GameInstance, i: int, c: CoalitionLike, d: CoalitionLike, model: UtilityModel) -> Preference:
    uc = utility(game, i, c, model)
    ud = utility(game, i, d, model)
    if uc > ud:
        return Preference.PREFERS_C
    if uc < ud:
        return Preference.PREFERS_D
    return Preference.INDIFFERENT


def move_to_empty(gamma: CoalitionStructure, c: CoalitionLike) -> CoalitionStructure:
    """Structure after the members of ``c`` leave their blocks to form ``c``."""
    c = as_coalition(c)
    if c.mask == 0:
        raise ContractError("deviating coalition must be nonempty")
    if c.mask >> gamma.n:
        raise ContractError(f"coalition {list(c.members)} has players outside 0..{gamma.n - 1}")
    blocks = [c] + [Coalition(b.mask & ~c.mask) for b in gamma.blocks if not b.issubset(c)]
    return CoalitionStructure.of(gamma.n, blocks)


EXAMPLE1_NAMES = ("a", "b", "c", "d", "e")
EXAMPLE1_EDGES = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4))


def example1_game() -> GameInstance:
    """The five-player game a-b, a-c, b-c, b-d, c-d, d-e."""
    return make_game(5, EXAMPLE1_EDGES)
