import random

import pytest

from ahg.errors import ContractError
from ahg.game import Coalition, UtilityModel as M, utility, valuation
from ahg.graph import build_graph, complete_graph, cycle_graph, find_clique, induced_subgraph
from ahg.reductions import (
    closed_form_mismatches,
    embed_dome,
    expected_gamma_values,
    extract_candidate_subgraph,
    preprocess_clique_instance,
    reduce_avg_al,
    reduce_avg_eq,
    reduce_min_eq_al,
    witness_from_clique,
)
from ahg.stability import Status, blocks, make_checker

from conftest import random_graph


def test_preprocess_thm1_parity():
    g, k, log = preprocess_clique_instance(cycle_graph(5), 2, "thm1")
    assert (g.num_vertices, k) == (6, 3)
    assert [s["step"] for s in log] == ["universal_vertex"]


def test_preprocess_thm2_isolated_padding():
    g, k, log = preprocess_clique_instance(complete_graph(4), 4, "thm2")
    assert k == 4 and g.num_vertices == 10 and g.num_edges == 6
    assert log == [{"step": "isolated_vertices", "first": 4, "count": 6}]
    assert find_clique(g, 4) is not None


def test_preprocess_thm3_modular():
    g, k, log = preprocess_clique_instance(complete_graph(3), 3, "thm3")
    assert k == 5 and (k + 1) % 3 == 0
    assert g.num_vertices + g.num_edges > k
    assert [s["step"] for s in log] == ["universal_vertex", "universal_vertex"]
    assert find_clique(g, 5) is not None


@pytest.mark.parametrize("target", ["thm1", "thm2", "thm3"])
def test_preprocessing_equivalence(target):
    rng = random.Random(hash(target) % 1000)
    for _ in range(40):
        h = random_graph(rng, rng.randint(1, 8), rng.random())
        k = rng.randint(1, 5)
        g, k_eff, _ = preprocess_clique_instance(h, k, target)
        assert (find_clique(h, k) is not None) == (find_clique(g, k_eff) is not None)


def test_thm1_k3_triangle_counts():
    r = reduce_min_eq_al(complete_graph(3), 3)
    assert r.k_prime == 13
    assert not any(r.dummy_players.values())
    assert len(r.gadgets) == 12 and r.n == 156
    assert len(r.gamma.blocks) == 12


def test_thm1_player_count_formula():
    h = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    r = reduce_min_eq_al(h, 5)
    src = r.source
    expected = (src.num_vertices + 3 * src.num_edges) * r.k_prime + src.num_edges * (r.k_effective - 3)
    assert r.n == expected


def test_thm1_closed_forms_k5():
    r = reduce_min_eq_al(complete_graph(5), 5)
    assert closed_form_mismatches(r) == []
    n, k, kp = r.n, 5, r.k_prime
    for group in r.dummy_players.values():
        for p in group:
            assert valuation(r.game, p, r.gamma.block_of(p)) == (k - 4) * n
    v0 = r.vertex_players[0]
    assert valuation(r.game, v0, r.gamma.block_of(v0)) == (k - 1) * n - (kp - k)


def test_thm1_degree_discipline():
    r = reduce_min_eq_al(complete_graph(4), 5)
    k = r.k_effective
    for _, _, layout in r.gadgets:
        block = set(layout.players)
        for p in layout.players:
            assert sum(1 for q in r.game.graph.neighbors(p) if q in block) == k - 1
    special = set(r.distinguished_players)
    for b in r.incidence_players.values():
        assert sum(1 for q in r.game.graph.neighbors(b) if q in special) == k - 1
    for e in r.edge_players.values():
        assert sum(1 for q in r.game.graph.neighbors(e) if q in special) == k - 1


@pytest.mark.parametrize("reduce", [reduce_min_eq_al, reduce_avg_eq])
def test_subdivision_structure(reduce):
    h = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (0, 5)])
    r = reduce(h, 4)
    core = sorted(set(r.vertex_players.values()) | set(r.edge_players.values()) | set(r.incidence_players.values()))
    sub, fwd, _ = induced_subgraph(r.game.graph, core)
    src = r.source
    expected_edges = set()
    for (v, e), b in r.incidence_players.items():
        expected_edges.add(tuple(sorted((fwd[b], fwd[r.vertex_players[v]]))))
        expected_edges.add(tuple(sorted((fwd[b], fwd[r.edge_players[e]]))))
    assert set(sub.edges) == expected_edges
    assert sub.num_vertices == src.num_vertices + 3 * src.num_edges


def test_distinguished_players_only_cross_gadgets():
    for r in (reduce_min_eq_al(complete_graph(4), 3), reduce_avg_eq(complete_graph(4), 4),
              reduce_avg_al(complete_graph(4), 5)):
        special = set(r.distinguished_players)
        owner = {}
        for idx, block in enumerate(r.gamma.blocks):
            for p in block:
                owner[p] = idx
        for x, y in r.game.graph.edges:
            if owner[x] != owner[y]:
                assert x in special and y in special


def test_thm2_closed_forms():
    r = reduce_avg_eq(complete_graph(4), 4)
    assert r.k_prime == 4 + 3 * 6 + 1
    assert closed_form_mismatches(r) == []
    exp = expected_gamma_values(r)
    n, kp = r.n, r.k_prime
    fringe_edge = [p for p, e in exp.items() if e.role == "fringe" and e.valuation == (kp - 3) * n - 2]
    assert fringe_edge


def test_thm3_closed_forms():
    r = reduce_avg_al(complete_graph(5), 5)
    assert closed_form_mismatches(r) == []
    for _, _, layout in r.gadgets:
        assert layout.num_players == r.k_prime
    b = next(iter(r.incidence_players.values()))
    assert r.game.graph.degree(b) == 1 + 3


def test_thm3_incidence_pairs_are_friends():
    r = reduce_avg_al(complete_graph(3), 5)
    for (x, y) in r.source.edges:
        e = (x, y)
        assert r.game.graph.has_edge(r.incidence_players[(x, e)], r.incidence_players[(y, e)])


def test_witness_thm1_k3():
    r = reduce_min_eq_al(complete_graph(3), 3)
    c = witness_from_clique(r, [0, 1, 2])
    assert len(c) == 12
    deviation_util = 2 * r.n - 9
    for p in c:
        for m in (M.MIN_EQ, M.MIN_AL):
            assert utility(r.game, p, c, m).primary == deviation_util
            assert deviation_util > utility(r.game, p, r.gamma.block_of(p), m).primary


def test_witness_thm2_k4():
    r = reduce_avg_eq(complete_graph(4), 4)
    c = witness_from_clique(r, [0, 1, 2, 3])
    assert len(c) == 22 < r.k_prime
    for e in r.edge_players.values():
        assert utility(r.game, e, c, M.AVG_EQ).primary == 2 * r.n - (len(c) - 3)


def test_witness_thm3_k5():
    r = reduce_avg_al(complete_graph(5), 5)
    c = witness_from_clique(r, range(5))
    assert len(c) == 5 + 3 * 10
    assert blocks(r.game, c, r.gamma, M.AVG_AL)


def test_witness_rejects_non_clique():
    r = reduce_min_eq_al(cycle_graph(5), 3)
    with pytest.raises(ContractError):
        witness_from_clique(r, [0, 1, 2])


def test_extract_candidate_subgraph():
    r = reduce_avg_eq(complete_graph(4), 4)
    c = witness_from_clique(r, [0, 1, 2, 3])
    hc = extract_candidate_subgraph(r, c)
    assert hc.well_formed and hc.vertices == (0, 1, 2, 3)
    assert hc.graph.edges == complete_graph(4).edges
    empty = extract_candidate_subgraph(r, Coalition(0))
    assert empty.graph.num_vertices == 0 and empty.well_formed
    lone = extract_candidate_subgraph(r, [r.edge_players[(0, 1)]])
    assert not lone.well_formed and lone.dangling_edges == ((0, 1),)


def test_restricted_evidence_on_triangle_free_source():
    from ahg.reductions import restricted_evidence

    r = reduce_min_eq_al(cycle_graph(5), 3)
    v = restricted_evidence(r, M.MIN_EQ, max_size=6)
    assert v.status is Status.STABLE_UP_TO_BOUND and v.certificate is None


def test_restricted_evidence_finds_clique_witness():
    from ahg.reductions import restricted_evidence

    r = reduce_min_eq_al(complete_graph(3), 3)
    v = restricted_evidence(r, M.MIN_EQ)
    assert v.status is Status.BLOCKED
    hc = extract_candidate_subgraph(r, v.certificate)
    assert hc.well_formed and hc.graph.num_vertices == 3


def test_embed_dome_rejects_non_top_links():
    with pytest.raises(ContractError):
        embed_dome(1, 6, 8, outside_edges=[(3, 7)])


@pytest.mark.parametrize("pinched", [False, True])
def test_dome_exclusion_random(pinched):
    rng = random.Random(31 + pinched)
    d, kp = 1, 6
    for _ in range(8):
        n = 12
        size = kp if not pinched else kp - d + 1
        out = list(range(size, n))
        top_friends = [p for p in out if rng.random() < 0.5]
        edges = [(a, b) for i, a in enumerate(out) for b in out[i + 1:] if rng.random() < 0.5]
        game, gamma, layout = embed_dome(d, kp, n, top_friends, edges, pinched=pinched)
        base = sum(1 << p for p in layout.base_members)
        for m in (M.AVG_EQ, M.AVG_AL):
            check = make_checker(game, gamma, m)
            assert not any(check(mask) for mask in range(1, 1 << n) if mask & base)
