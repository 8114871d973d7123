"""Clique -> core-stability reductions for min-EQ/AL, avg-EQ and avg-AL games.

Each reducer pads the clique instance as needed, builds one gadget per vertex,
edge and vertex-edge incidence of the source graph, wires the distinguished
players together, and returns the game with the partition into gadgets.
Player ids are allocated in a fixed order: vertex gadgets by vertex id, edge
gadgets by sorted edge, incidence gadgets by (vertex, edge), then dummy sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Optional

from .errors import ContractError, InvariantViolation
from .gadgets import GadgetLayout, make_circulant, make_dome, make_pinched_dome
from .game import (
    Coalition,
    CoalitionLike,
    CoalitionStructure,
    Degree,
    GameInstance,
    UtilityModel,
    as_coalition,
    utility,
    valuation,
)
from .graph import (
    FriendshipGraph,
    add_isolated_vertices,
    add_universal_vertex,
    build_graph,
    is_clique,
)
from .stability import CoreVerdict, Strategy, blocks, verify_core

TARGETS = ("thm1", "thm2", "thm3")
TARGET_MODELS = {
    "thm1": (UtilityModel.MIN_EQ, UtilityModel.MIN_AL),
    "thm2": (UtilityModel.AVG_EQ,),
    "thm3": (UtilityModel.AVG_AL,),
}

Edge = tuple[int, int]


def preprocess_clique_instance(h: FriendshipGraph, k: int, target: str):
    """Pad ``(h, k)`` to meet a reduction's assumptions without changing the answer.

    Returns ``(graph, k_effective, log)``. A universal vertex raises the clique
    size by one; isolated vertices only grow ``|V| + |E|``.
    """
    if target not in TARGETS:
        raise ContractError(f"unknown target {target!r}; expected one of {TARGETS}")
    if k < 1:
        raise ContractError(f"clique size must be >= 1, got {k}")
    log: list[dict] = []

    def universal():
        nonlocal h, k
        h = add_universal_vertex(h)
        k += 1
        log.append({"step": "universal_vertex", "vertex": h.num_vertices - 1, "k": k})

    def pad_isolated(need):
        nonlocal h
        missing = need - (h.num_vertices + h.num_edges)
        if missing > 0:
            first = h.num_vertices
            h = add_isolated_vertices(h, missing)
            log.append({"step": "isolated_vertices", "first": first, "count": missing})

    if target == "thm1":
        while k < 3 or k % 2 == 0:
            universal()
    elif target == "thm2":
        while k < 4:
            universal()
        pad_isolated(k * k)
    else:
        while k < 3 or k % 3 != 2:
            universal()
        pad_isolated(k + 1)
    return h, k, log


@dataclass
class ReductionArtifact:
    target: str
    game: GameInstance
    gamma: CoalitionStructure
    target_models: tuple[UtilityModel, ...]
    source: FriendshipGraph
    k_original: int
    k_effective: int
    k_prime: int
    vertex_players: dict[int, int]
    edge_players: dict[Edge, int]
    incidence_players: dict[tuple[int, Edge], int]
    dummy_players: dict[Edge, tuple[int, ...]] = field(default_factory=dict)
    gadgets: list[tuple[str, object, GadgetLayout]] = field(default_factory=list)
    preprocessing_log: list[dict] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.game.n

    @property
    def distinguished_players(self) -> list[int]:
        out = list(self.vertex_players.values()) + list(self.edge_players.values())
        out += list(self.incidence_players.values())
        for group in self.dummy_players.values():
            out.extend(group)
        return sorted(out)

    @property
    def mid_players(self) -> list[int]:
        return sorted(p for _, _, layout in self.gadgets for p in layout.mid_players)


class _Builder:
    def __init__(self):
        self.size = 0
        self.edges: list[Edge] = []
        self.blocks: list[list[int]] = []
        self.gadgets: list[tuple[str, object, GadgetLayout]] = []

    def add_gadget(self, role, key, made) -> GadgetLayout:
        g, layout = made
        offset = self.size
        self.edges.extend((i + offset, j + offset) for i, j in g.edges)
        layout = layout.shifted(offset)
        self.size += g.num_vertices
        self.blocks.append(list(layout.players))
        self.gadgets.append((role, key, layout))
        return layout

    def add_players(self, count) -> list[int]:
        ids = list(range(self.size, self.size + count))
        self.size += count
        if ids:
            self.blocks.append(ids)
        return ids

    def finish(self) -> tuple[GameInstance, CoalitionStructure]:
        game = GameInstance(build_graph(self.size, self.edges))
        return game, CoalitionStructure.of(self.size, self.blocks)


def _incidences(h: FriendshipGraph) -> list[tuple[int, Edge]]:
    return sorted((v, e) for e in h.edges for v in e)


def _assemble(target, h, k0, k, k_prime, log, gadget_for, dummies_per_edge=0):
    b = _Builder()
    vertex_players, edge_players, incidence_players = {}, {}, {}
    for v in h.vertices:
        vertex_players[v] = b.add_gadget("vertex", v, gadget_for("vertex")).distinguished
    for e in h.edges:
        edge_players[e] = b.add_gadget("edge", e, gadget_for("edge")).distinguished
    for v, e in _incidences(h):
        incidence_players[(v, e)] = b.add_gadget("incidence", (v, e), gadget_for("incidence")).distinguished
    dummy_players = {}
    if dummies_per_edge:
        for e in h.edges:
            dummy_players[e] = tuple(b.add_players(dummies_per_edge))

    for (v, e), p in incidence_players.items():
        b.edges.append((p, vertex_players[v]))
        b.edges.append((p, edge_players[e]))
    if target == "thm3":
        for x, y in h.edges:
            b.edges.append((incidence_players[(x, (x, y))], incidence_players[(y, (x, y))]))
    for (x, y), group in dummy_players.items():
        e = (x, y)
        for a in group:
            b.edges += [(a, edge_players[e]), (a, incidence_players[(x, e)]), (a, incidence_players[(y, e)])]
        b.edges += [(a, c) for idx, a in enumerate(group) for c in group[idx + 1 :]]

    game, gamma = b.finish()
    return ReductionArtifact(
        target=target,
        game=game,
        gamma=gamma,
        target_models=TARGET_MODELS[target],
        source=h,
        k_original=k0,
        k_effective=k,
        k_prime=k_prime,
        vertex_players=vertex_players,
        edge_players=edge_players,
        incidence_players=incidence_players,
        dummy_players=dummy_players,
        gadgets=b.gadgets,
        preprocessing_log=log,
    )


def reduce_min_eq_al(h: FriendshipGraph, k: int) -> ReductionArtifact:
    """Circulant-gadget reduction shared by the min-EQ and min-AL models."""
    src, k_eff, log = preprocess_clique_instance(h, k, "thm1")
    if k_eff < 3 or k_eff % 2 == 0:
        raise ContractError(f"min-EQ/AL reduction needs odd k >= 3, got {k_eff}")
    k_prime = k_eff * comb(k_eff, 2) + k_eff + 1
    return _assemble("thm1", src, k, k_eff, k_prime, log,
                     lambda role: make_circulant(k_eff, k_prime), dummies_per_edge=k_eff - 3)


def reduce_avg_eq(h: FriendshipGraph, k: int) -> ReductionArtifact:
    """Dome-gadget reduction for the avg-EQ model."""
    src, k_eff, log = preprocess_clique_instance(h, k, "thm2")
    if k_eff < 4 or src.num_vertices + src.num_edges < k_eff ** 2:
        raise ContractError("avg-EQ reduction needs k >= 4 and |V|+|E| >= k^2")
    k_prime = k_eff + 3 * comb(k_eff, 2) + 1

    def gadget_for(role):
        return make_dome(k_eff - 1 if role == "vertex" else 2, k_prime)

    return _assemble("thm2", src, k, k_eff, k_prime, log, gadget_for)


def pinched_gadget(d: int, k_prime: int):
    """Pinched dome with ``d`` fringe players and ``k_prime`` players in total.

    Identifying the mids of a ``(d, k_prime + d - 1)``-dome leaves exactly
    ``k_prime`` players, the count the avg-AL utility values are stated for.
    """
    return make_pinched_dome(d, k_prime + d - 1)


def reduce_avg_al(h: FriendshipGraph, k: int) -> ReductionArtifact:
    """Pinched-dome reduction for the avg-AL model."""
    src, k_eff, log = preprocess_clique_instance(h, k, "thm3")
    if k_eff < 3 or (k_eff + 1) % 3 or src.num_vertices + src.num_edges <= k_eff:
        raise ContractError("avg-AL reduction needs (k+1)/3 integral and |V|+|E| > k >= 3")
    k_prime = k_eff + 3 * comb(k_eff, 2) + 1

    def gadget_for(role):
        return pinched_gadget((k_eff + 1) // 3 if role == "incidence" else 2, k_prime)

    return _assemble("thm3", src, k, k_eff, k_prime, log, gadget_for)


REDUCERS = {"thm1": reduce_min_eq_al, "thm2": reduce_avg_eq, "thm3": reduce_avg_al}


def reduce(h: FriendshipGraph, k: int, target: str) -> ReductionArtifact:
    if target not in REDUCERS:
        raise ContractError(f"unknown target {target!r}; expected one of {TARGETS}")
    return REDUCERS[target](h, k)


def witness_from_clique(r: ReductionArtifact, clique: Iterable[int]) -> Coalition:
    """Blocking coalition built from a ``k``-clique of the padded source graph.

    Verified to block under every target model before it is returned.
    """
    clique = sorted(set(clique))
    if len(clique) != r.k_effective or not is_clique(r.source, clique):
        raise ContractError(f"{clique} is not a clique of size {r.k_effective} in the source graph")
    inside = set(clique)
    members = [r.vertex_players[v] for v in clique]
    for e in r.source.edges:
        if e[0] in inside and e[1] in inside:
            members.append(r.edge_players[e])
            members += [r.incidence_players[(e[0], e)], r.incidence_players[(e[1], e)]]
            members += r.dummy_players.get(e, ())
    c = Coalition.of(members)
    k = r.k_effective
    expected_size = k + k * comb(k, 2) if r.target == "thm1" else k + 3 * comb(k, 2)
    if len(c) != expected_size:
        raise InvariantViolation(f"witness has {len(c)} players, expected {expected_size}")
    for model in r.target_models:
        if not blocks(r.game, c, r.gamma, model):
            raise InvariantViolation(f"witness does not block under {model}")
    return c


@dataclass(frozen=True)
class CandidateSubgraph:
    """Vertices and edges of the source graph whose players lie in a coalition.

    ``graph`` relabels ``vertices`` to ``0..len-1``; edges lacking an endpoint
    are listed in ``dangling_edges`` and make the subgraph ill-formed.
    """

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    dangling_edges: tuple[Edge, ...]
    graph: FriendshipGraph

    @property
    def well_formed(self) -> bool:
        return not self.dangling_edges


def extract_candidate_subgraph(r: ReductionArtifact, c: CoalitionLike) -> CandidateSubgraph:
    c = as_coalition(c)
    vertices = tuple(v for v, p in sorted(r.vertex_players.items()) if p in c)
    edges = tuple(e for e, p in sorted(r.edge_players.items()) if p in c)
    present = set(vertices)
    dangling = tuple(e for e in edges if e[0] not in present or e[1] not in present)
    relabel = {v: idx for idx, v in enumerate(vertices)}
    kept = [(relabel[x], relabel[y]) for x, y in edges if x in present and y in present]
    return CandidateSubgraph(vertices, edges, dangling, build_graph(len(vertices), kept))


@dataclass(frozen=True)
class ExpectedValue:
    """Closed-form value of one player in the reduction's partition.

    ``utility`` is the leading utility term: the whole utility for EQ models and
    the weighted friends' aggregate for AL models. With ``at_least`` set it is a
    lower bound rather than an exact value.
    """

    role: str
    valuation: Optional[int] = None
    utility: Optional[Fraction] = None
    at_least: bool = False


def expected_gamma_values(r: ReductionArtifact) -> dict[int, ExpectedValue]:
    n, k, kp = r.n, r.k_effective, r.k_prime
    out: dict[int, ExpectedValue] = {}
    if r.target == "thm1":
        regular = (k - 1) * n - (kp - k)
        for p in r.game.graph.vertices:
            out[p] = ExpectedValue("gadget", regular, Fraction(regular))
        for group in r.dummy_players.values():
            for p in group:
                out[p] = ExpectedValue("dummy", (k - 4) * n, Fraction((k - 4) * n))
        return out

    if r.target == "thm2":
        top_edge = 2 * n - (kp - 3)
        vertex_share = Fraction(3 * k - 3, k)
        mid_share = Fraction(kp + 1, 3)
        for role, _, layout in r.gadgets:
            top = layout.top_player
            if role == "vertex":
                out[top] = ExpectedValue("vertex", (k - 1) * n - (kp - k),
                                         vertex_share * n - (kp - 1 - vertex_share))
                fringe_val = (kp - k) * n - (k - 1)
            else:
                out[top] = ExpectedValue(role, top_edge, Fraction(top_edge))
                fringe_val = (kp - 3) * n - 2
            for m in layout.mid_players:
                out[m] = ExpectedValue("mid", top_edge, mid_share * n - (kp - 1 - mid_share))
            for f in layout.fringe_players:
                out[f] = ExpectedValue("fringe", fringe_val)
        return out

    top_share = 3 * n - (kp - 4)
    incidence_share = Fraction(k + 4, 3)
    mid_share = Fraction(2 * kp - 3, 3)
    for role, _, layout in r.gadgets:
        top = layout.top_player
        if role == "incidence":
            out[top] = ExpectedValue(role, None, incidence_share * n - (kp - 1 - incidence_share))
        else:
            out[top] = ExpectedValue(role, None, Fraction(top_share))
        for m in layout.mid_players:
            out[m] = ExpectedValue("mid", None, mid_share * n - (kp - 1 - mid_share), at_least=True)
    return out


def closed_form_mismatches(r: ReductionArtifact) -> list[str]:
    """Players whose engine-computed values disagree with :func:`expected_gamma_values`."""
    problems = []
    for p, exp in expected_gamma_values(r).items():
        block = r.gamma.block_of(p)
        if exp.valuation is not None:
            got = valuation(r.game, p, block)
            if got != exp.valuation:
                problems.append(f"player {p} ({exp.role}): valuation {got} != {exp.valuation}")
        if exp.utility is None:
            continue
        for model in r.target_models:
            u = utility(r.game, p, block, model)
            ok = u.primary >= exp.utility if exp.at_least else u.primary == exp.utility
            if not ok:
                rel = ">=" if exp.at_least else "=="
                problems.append(f"player {p} ({exp.role}) {model}: {u.primary} {rel} {exp.utility} fails")
            if model.degree is Degree.AL and exp.valuation is not None and u.secondary != exp.valuation:
                problems.append(f"player {p} ({exp.role}) {model}: own valuation {u.secondary}")
    return problems


def restricted_evidence(
    r: ReductionArtifact, model: Optional[UtilityModel] = None, max_size: Optional[int] = None, threads: int = 1
) -> CoreVerdict:
    """Bounded search over distinguished and mid players only.

    A ``stable_up_to_bound`` answer is evidence, not a proof, of core stability.
    """
    model = model or r.target_models[0]
    candidates = sorted(set(r.distinguished_players) | set(r.mid_players))
    strategy = Strategy.restricted(max_size if max_size is not None else r.k_prime, candidates, threads=threads)
    return verify_core(r.game, r.gamma, model, strategy)


def embed_dome(
    d: int,
    k_prime: int,
    num_players: int,
    top_friends: Iterable[int] = (),
    outside_edges: Iterable[Edge] = (),
    outside_blocks: Optional[Iterable[Iterable[int]]] = None,
    pinched: bool = False,
) -> tuple[GameInstance, CoalitionStructure, GadgetLayout]:
    """Game with a dome on players ``0..`` and free players after it.

    Only the top player (id 0) may be linked to outside players. Outside
    players default to singleton blocks.
    """
    g, layout = (make_pinched_dome if pinched else make_dome)(d, k_prime)
    size = g.num_vertices
    if num_players < size:
        raise ContractError(f"need at least {size} players for the gadget")
    outside = range(size, num_players)
    edges = list(g.edges) + [(layout.top_player, p) for p in top_friends]
    edges += list(outside_edges)
    for x, y in edges[len(g.edges):]:
        if (x < size and x != layout.top_player) or (y < size and y != layout.top_player):
            raise ContractError(f"edge ({x}, {y}) touches a non-top gadget player")
    if outside_blocks is None:
        outside_blocks = [[p] for p in outside]
    gamma = CoalitionStructure.of(num_players, [list(layout.players)] + [list(b) for b in outside_blocks])
    return GameInstance(build_graph(num_players, edges)), gamma, layout
