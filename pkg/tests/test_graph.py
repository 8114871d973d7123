import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from ahg.errors import CapacityError, StructuralError
from ahg.gadgets import make_circulant, make_dome
from ahg.graph import (
    add_universal_vertex,
    build_graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    find_clique,
    induced_subgraph,
    is_clique,
)
from ahg.game import EXAMPLE1_EDGES

from conftest import A, B, C, D, E, random_graph


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


def test_build_example1_graph():
    g = build_graph(5, [(B, A), (A, C), (C, B), (B, D), (D, C), (D, E), (A, B)])
    assert g.edges == EXAMPLE1_EDGES
    assert g.num_edges == 6


def test_edgeless_and_complete():
    g = build_graph(3, [])
    assert g.num_edges == 0
    assert all(g.neighbors(v) == () for v in g.vertices)
    k4 = complete_graph(4)
    assert k4.degrees() == [3, 3, 3, 3]
    assert k4.neighbors(2) == (0, 1, 3)


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 5)], [(-1, 2)]])
def test_build_rejects_bad_edges(edges):
    with pytest.raises(StructuralError, match=r"\("):
        build_graph(5, edges)


def test_neighbors_example1():
    g = build_graph(5, EXAMPLE1_EDGES)
    assert g.neighbors(D) == (B, C, E)
    with pytest.raises(StructuralError):
        g.neighbors(5)


def test_induced_subgraph():
    g = build_graph(5, EXAMPLE1_EDGES)
    sub, fwd, back = induced_subgraph(g, {A, B, C})
    assert sub.edges == ((0, 1), (0, 2), (1, 2))
    assert fwd == {A: 0, B: 1, C: 2} and back == {0: A, 1: B, 2: C}
    empty, _, _ = induced_subgraph(g, [])
    assert empty.num_vertices == 0
    k3, _, _ = induced_subgraph(complete_graph(4), [0, 2, 3])
    assert k3.edges == complete_graph(3).edges
    with pytest.raises(StructuralError):
        induced_subgraph(g, [7])


def test_is_clique():
    g = build_graph(5, EXAMPLE1_EDGES)
    assert is_clique(g, {A, B, C})
    assert not is_clique(g, {A, B, C, D})
    assert is_clique(g, {E}) and is_clique(g, [])


def test_find_clique_examples():
    assert find_clique(complete_graph(4), 4) == (0, 1, 2, 3)
    assert find_clique(cycle_graph(5), 3) is None
    assert find_clique(build_graph(5, EXAMPLE1_EDGES), 3) == (A, B, C)
    with pytest.raises(CapacityError):
        find_clique(build_graph(31, []), 2)


def test_add_universal_vertex():
    p3 = add_universal_vertex(build_graph(2, []))
    assert p3.edges == ((0, 2), (1, 2))
    assert add_universal_vertex(complete_graph(3)).edges == complete_graph(4).edges
    wheel = add_universal_vertex(cycle_graph(5))
    assert wheel.degree(5) == 5
    assert (find_clique(wheel, 3) is not None) == (find_clique(cycle_graph(5), 2) is not None)


def _component_count(g):
    seen, count = set(), 0
    for s in g.vertices:
        if s in seen:
            continue
        count += 1
        stack = [s]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(g.neighbors(v))
    return count


def test_disjoint_union():
    g, offsets = disjoint_union([complete_graph(3), complete_graph(3)])
    assert (g.num_vertices, g.num_edges, offsets) == (6, 6, [0, 3])
    assert _component_count(g) == 2
    empty, _ = disjoint_union([])
    assert empty.num_vertices == 0
    circ, _ = make_circulant(5, 11)
    dome, _ = make_dome(4, 17)
    g, offsets = disjoint_union([circ, dome])
    assert g.num_vertices == 28 and offsets == [0, 11]
    assert g.num_edges == circ.num_edges + dome.num_edges
    assert _component_count(g) == 2


@given(graphs())
def test_neighbor_symmetry(g):
    for i in g.vertices:
        assert i not in g.neighbors(i)
        for j in g.neighbors(i):
            assert i in g.neighbors(j)


@given(graphs())
def test_induced_on_all_vertices_is_identity(g):
    sub, fwd, _ = induced_subgraph(g, g.vertices)
    assert sub.edges == g.edges
    assert all(fwd[v] == v for v in g.vertices)


@settings(max_examples=150)
@given(graphs(max_n=12), st.integers(0, 6))
def test_find_clique_against_enumeration(g, k):
    found = find_clique(g, k)
    brute = next((c for c in combinations(g.vertices, k) if is_clique(g, c)), None)
    assert found == brute
    if found is not None:
        assert is_clique(g, found) and len(found) == k


def test_universal_vertex_clique_equivalence():
    rng = random.Random(7)
    for _ in range(60):
        g = random_graph(rng, rng.randint(0, 10), rng.random())
        g2 = add_universal_vertex(g)
        for k in range(g.num_vertices + 1):
            assert (find_clique(g, k) is not None) == (find_clique(g2, k + 1) is not None)
