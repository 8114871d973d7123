"""Circulant, dome and pinched-dome gadgets, and the degree/size clique test."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

from .errors import ContractError, InvariantViolation, ParameterError
from .graph import FriendshipGraph, build_graph, is_clique


@dataclass(frozen=True)
class GadgetLayout:
    """Role assignment of the players of one gadget (local ids, before any offset).

    For a circulant gadget ``top_player`` is None and ``distinguished`` names
    the base-cycle player allowed to have outside friends. For domes the
    distinguished player is the top player.
    """

    kind: str
    params: dict = field(hash=False)
    num_players: int
    distinguished: int
    top_player: Optional[int] = None
    mid_players: tuple[int, ...] = ()
    fringe_players: tuple[int, ...] = ()
    base_members: tuple[int, ...] = ()
    first_player: int = 0

    def shifted(self, offset: int) -> "GadgetLayout":
        def sh(ids):
            return tuple(i + offset for i in ids)

        return GadgetLayout(
            kind=self.kind,
            params=dict(self.params),
            num_players=self.num_players,
            distinguished=self.distinguished + offset,
            top_player=None if self.top_player is None else self.top_player + offset,
            mid_players=sh(self.mid_players),
            fringe_players=sh(self.fringe_players),
            base_members=sh(self.base_members),
            first_player=self.first_player + offset,
        )

    @property
    def players(self) -> range:
        return range(self.first_player, self.first_player + self.num_players)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "params": dict(self.params),
            "num_players": self.num_players,
            "distinguished": self.distinguished,
            "mid_players": list(self.mid_players),
            "fringe_players": list(self.fringe_players),
            "base_members": list(self.base_members),
            "first_player": self.first_player,
        }
        if self.top_player is not None:
            out["top_player"] = self.top_player
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GadgetLayout":
        return cls(
            kind=data["kind"],
            params=dict(data["params"]),
            num_players=data["num_players"],
            distinguished=data["distinguished"],
            top_player=data.get("top_player"),
            mid_players=tuple(data.get("mid_players", ())),
            fringe_players=tuple(data.get("fringe_players", ())),
            base_members=tuple(data.get("base_members", ())),
            first_player=data.get("first_player", 0),
        )


def make_circulant(k: int, k_prime: int) -> tuple[FriendshipGraph, GadgetLayout]:
    """``k_prime`` players on a cycle, each befriending everyone within distance (k-1)/2."""
    if k < 3 or k % 2 == 0:
        raise ParameterError(f"circulant gadget needs odd k >= 3, got k={k}")
    if k_prime <= k:
        raise ParameterError(f"circulant gadget needs k' > k, got k={k}, k'={k_prime}")
    reach = (k - 1) // 2
    edges = [(i, (i + s) % k_prime) for i in range(k_prime) for s in range(1, reach + 1)]
    g = build_graph(k_prime, edges)
    layout = GadgetLayout(
        kind="circulant",
        params={"k": k, "k_prime": k_prime},
        num_players=k_prime,
        distinguished=0,
        base_members=tuple(range(k_prime)),
    )
    return g, layout


def _check_dome_params(d: int, k_prime: int) -> None:
    if d < 1:
        raise ParameterError(f"dome gadget needs d >= 1, got d={d}")
    if k_prime <= 2 * d + 1:
        raise ParameterError(f"dome gadget needs k' > 2d+1, got d={d}, k'={k_prime}")


def make_dome(d: int, k_prime: int) -> tuple[FriendshipGraph, GadgetLayout]:
    """A ``(d, k')``-dome: top player 0, mids ``1..d``, base clique on the rest.

    Mid ``p_i`` is tied to the ``i``-th lowest base member (its fringe player).
    """
    _check_dome_params(d, k_prime)
    top = 0
    mids = list(range(1, d + 1))
    base = list(range(d + 1, k_prime))
    fringe = base[:d]
    edges = [(top, m) for m in mids]
    edges += [(m, f) for m, f in zip(mids, fringe)]
    edges += [(a, b) for idx, a in enumerate(base) for b in base[idx + 1 :]]
    layout = GadgetLayout(
        kind="dome",
        params={"d": d, "k_prime": k_prime},
        num_players=k_prime,
        distinguished=top,
        top_player=top,
        mid_players=tuple(mids),
        fringe_players=tuple(fringe),
        base_members=tuple(base),
    )
    return build_graph(k_prime, edges), layout


def make_pinched_dome(d: int, k_prime: int) -> tuple[FriendshipGraph, GadgetLayout]:
    """A ``(d, k')``-dome with its ``d`` mids identified into one player.

    The result has ``k' - d + 1`` players: top 0, mid 1, and a base clique of
    ``k' - d - 1`` players whose ``d`` lowest members are the fringe.
    """
    _check_dome_params(d, k_prime)
    top, mid = 0, 1
    size = k_prime - d + 1
    base = list(range(2, size))
    fringe = base[:d]
    edges = [(top, mid)] + [(mid, f) for f in fringe]
    edges += [(a, b) for idx, a in enumerate(base) for b in base[idx + 1 :]]
    layout = GadgetLayout(
        kind="pinched-dome",
        params={"d": d, "k_prime": k_prime},
        num_players=size,
        distinguished=top,
        top_player=top,
        mid_players=(mid,),
        fringe_players=tuple(fringe),
        base_members=tuple(base),
    )
    return build_graph(size, edges), layout


class Observation1(enum.Enum):
    HYPOTHESIS_FAILED = "hypothesis_failed"
    CLIQUE_OF_SIZE_K = "clique_of_size_k"


def observation1_check(g: FriendshipGraph, alpha, k: int) -> Observation1:
    """If ``|V| + alpha|E| <= k + alpha*C(k,2)`` and min degree >= k-1, g must be K_k.

    Raises InvariantViolation if the hypothesis holds but g is not K_k.
    """
    alpha = Fraction(alpha)
    if alpha < 1:
        raise ContractError(f"alpha must be >= 1, got {alpha}")
    size_ok = g.num_vertices + alpha * g.num_edges <= k + alpha * comb(k, 2)
    degree_ok = all(deg >= k - 1 for deg in g.degrees())
    if g.num_vertices == 0 and k > 0:
        # the degree condition is vacuous without a vertex to start from
        degree_ok = False
    if not (size_ok and degree_ok):
        return Observation1.HYPOTHESIS_FAILED
    if g.num_vertices != k or not is_clique(g, g.vertices):
        raise InvariantViolation(
            f"graph with {g.num_vertices} vertices and {g.num_edges} edges meets the "
            f"degree/size hypothesis for k={k} but is not K_{k}"
        )
    return Observation1.CLIQUE_OF_SIZE_K
