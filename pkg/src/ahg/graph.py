"""Simple undirected graphs backed by per-vertex adjacency bitmasks.

Vertices are dense integers ``0..n-1``. Graphs are immutable; every set-valued
query returns a sorted tuple so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CapacityError, StructuralError

FIND_CLIQUE_MAX_VERTICES = 30


def bits_of(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(ids: Iterable[int]) -> int:
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


@dataclass(frozen=True)
class FriendshipGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def vertices(self) -> range:
        return range(self.num_vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        self._check_vertex(i)
        self._check_vertex(j)
        return bool(self.adjacency[i] >> j & 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return tuple(bits_of(self.adjacency[v]))

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return self.adjacency[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adjacency]

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.num_vertices):
            raise StructuralError(f"vertex {v!r} out of range 0..{self.num_vertices - 1}")

    def _check_subset(self, m: Iterable[int]) -> list[int]:
        members = sorted(set(m))
        for v in members:
            if not (isinstance(v, int) and 0 <= v < self.num_vertices):
                raise StructuralError(f"{v!r} is not a vertex of the graph (n={self.num_vertices})")
        return members


def build_graph(num_vertices: int, edges: Iterable[Sequence[int]] = ()) -> FriendshipGraph:
    """Validate, normalize and deduplicate ``edges`` over ``num_vertices`` vertices."""
    if num_vertices < 0:
        raise StructuralError(f"negative vertex count {num_vertices}")
    adjacency = [0] * num_vertices
    normalized = set()
    for edge in edges:
        if len(edge) != 2:
            raise StructuralError(f"edge {tuple(edge)!r} does not have two endpoints")
        i, j = int(edge[0]), int(edge[1])
        if i == j:
            raise StructuralError(f"self-loop on edge ({i}, {j})")
        if not (0 <= i < num_vertices and 0 <= j < num_vertices):
            raise StructuralError(f"edge ({i}, {j}) has an endpoint outside 0..{num_vertices - 1}")
        if i > j:
            i, j = j, i
        normalized.add((i, j))
        adjacency[i] |= 1 << j
        adjacency[j] |= 1 << i
    return FriendshipGraph(num_vertices, tuple(sorted(normalized)), tuple(adjacency))


def neighbors(g: FriendshipGraph, v: int) -> tuple[int, ...]:
    return g.neighbors(v)


def induced_subgraph(
    g: FriendshipGraph, m: Iterable[int]
) -> tuple[FriendshipGraph, dict[int, int], dict[int, int]]:
    """Subgraph induced by ``m``, relabeled by ascending original id.

    Returns ``(subgraph, old_to_new, new_to_old)``.
    """
    members = g._check_subset(m)
    old_to_new = {v: idx for idx, v in enumerate(members)}
    new_to_old = dict(enumerate(members))
    keep = mask_of(members)
    edges = []
    for v in members:
        for u in bits_of(g.adjacency[v] & keep):
            if u > v:
                edges.append((old_to_new[v], old_to_new[u]))
    return build_graph(len(members), edges), old_to_new, new_to_old


def is_clique(g: FriendshipGraph, m: Iterable[int]) -> bool:
    members = g._check_subset(m)
    keep = mask_of(members)
    for v in members:
        if (g.adjacency[v] | 1 << v) & keep != keep:
            return False
    return True


def find_clique(g: FriendshipGraph, k: int) -> tuple[int, ...] | None:
    """Lexicographically smallest ``k``-clique by plain backtracking, or None."""
    if k < 0:
        raise StructuralError(f"clique size must be non-negative, got {k}")
    if g.num_vertices > FIND_CLIQUE_MAX_VERTICES:
        raise CapacityError(
            f"find_clique is limited to {FIND_CLIQUE_MAX_VERTICES} vertices, graph has {g.num_vertices}"
        )
    if k == 0:
        return ()
    adj = g.adjacency
    chosen: list[int] = []

    # candidates: vertices greater than the last chosen one and adjacent to all chosen
    def extend(candidates: int) -> bool:
        if len(chosen) == k:
            return True
        if candidates.bit_count() < k - len(chosen):
            return False
        for v in bits_of(candidates):
            chosen.append(v)
            if extend(candidates & adj[v] & ~((1 << (v + 1)) - 1)):
                return True
            chosen.pop()
        return False

    if extend((1 << g.num_vertices) - 1):
        return tuple(chosen)
    return None


def add_universal_vertex(g: FriendshipGraph) -> FriendshipGraph:
    n = g.num_vertices
    return build_graph(n + 1, list(g.edges) + [(v, n) for v in range(n)])


def add_isolated_vertices(g: FriendshipGraph, count: int) -> FriendshipGraph:
    return build_graph(g.num_vertices + count, g.edges)


def disjoint_union(gs: Sequence[FriendshipGraph]) -> tuple[FriendshipGraph, list[int]]:
    """Place the graphs side by side; returns the union and each graph's id offset."""
    offsets = []
    edges = []
    total = 0
    for g in gs:
        offsets.append(total)
        edges.extend((i + total, j + total) for i, j in g.edges)
        total += g.num_vertices
    return build_graph(total, edges), offsets


def connected_components(g: FriendshipGraph) -> list[tuple[int, ...]]:
    seen = 0
    comps = []
    for start in g.vertices:
        if seen >> start & 1:
            continue
        comp = 1 << start
        frontier = comp
        while frontier:
            nxt = 0
            for v in bits_of(frontier):
                nxt |= g.adjacency[v]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        comps.append(tuple(bits_of(comp)))
    return comps


def complete_graph(n: int) -> FriendshipGraph:
    return build_graph(n, combinations(range(n), 2))


def cycle_graph(n: int) -> FriendshipGraph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])
