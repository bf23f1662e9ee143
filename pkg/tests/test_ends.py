import random

import networkx as nx
import pytest

from end_menger import fixtures
from end_menger.ends import (ClosedSet, NoStabilization, closure, dominating, end_leq,
                             end_structure, end_width, ends, is_dispersed, ray_reachability,
                             strongly_connected_components)
from end_menger.oracle import Unstable, oracle_ends, random_instance, split_flow_value, unfold
from end_menger.presentation import Query, max_index, period_lcm, reverse, truncate

LADDER = fixtures.load("ladder")
SINGLE = fixtures.load("single")
CHORD = fixtures.load("chord")
DOMCORE = fixtures.load("domcore")
TWOEND = fixtures.load("twoend")


def rays_of(P):
    return {frozenset(e.rays) for e in ends(P)}


def test_gamma_arcs():
    assert ray_reachability(LADDER).arcs == {("b", "u")}
    assert ray_reachability(SINGLE).arcs == frozenset()
    assert ray_reachability(CHORD).arcs == {("r", "r")}


def test_chord_self_arc_has_disjoint_instances():
    G, _ = truncate(CHORD, 30)
    chords = [a for a in G.arcs if a[1][1] == a[0][1] + 2]
    picked, used = [], set()
    for a in sorted(chords):
        if not set(a) & used:
            picked.append(a)
            used |= set(a)
    assert len(picked) >= 4


def test_fixture_ends():
    assert rays_of(LADDER) == {frozenset({"b"}), frozenset({"u"})}
    assert rays_of(TWOEND) == {frozenset({"i"}), frozenset({"o"})}
    (e,) = ends(CHORD)
    assert e.has_out and not e.has_in


def test_chord_has_no_in_ray_by_oracle():
    (e,) = oracle_ends(CHORD)
    assert e.width_in == 0 and e.width_out == 2


def test_ladder_order():
    assert end_leq(LADDER, "b", "u")
    assert not end_leq(LADDER, "u", "b")
    for name in fixtures.NAMES:
        P = fixtures.load(name)
        for e in ends(P):
            assert end_leq(P, e.end_id, e.end_id)


def packing(P, rays1, rays2):
    """Disjoint paths from rays1 to rays2 using deep ray vertices only."""
    base = max_index(P)
    L = base + 40 * period_lcm(P)
    H = unfold(P, L)
    deep = [v for v in H if isinstance(v, tuple) and v[1] > base]
    H = H.subgraph(deep)
    S = [v for v in deep if v[0] in rays1]
    T = [v for v in deep if v[0] in rays2]
    return split_flow_value(list(H.nodes), list(H.edges), S, T)


def test_order_against_truncation_packing():
    checked = 0
    for seed in range(120):
        P = random_instance(seed)
        try:
            es = ends(P)
        except NoStabilization:
            continue
        for e in es:
            for f in es:
                if e is f:
                    continue
                value = packing(P, e.rays, f.rays)
                for k in (1, 2, 3):
                    assert end_leq(P, e.end_id, f.end_id) == (value >= k), (seed, e, f, k)
                checked += 1
    assert checked >= 100


def test_tarjan_matches_networkx():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 30)
        G = nx.gnp_random_graph(n, rng.uniform(0.02, 0.2), seed=rng.randint(0, 10**6), directed=True)
        comps = strongly_connected_components(list(G.nodes), lambda v: list(G.successors(v)))
        assert {frozenset(c) for c in comps} == {frozenset(c) for c in nx.strongly_connected_components(G)}


def test_dominating():
    assert dominating(DOMCORE, Query(ends={"a"}), "in") == {"f"}
    assert dominating(SINGLE, Query(ends={"r"}), "in") == frozenset()
    assert dominating(LADDER, Query(ends={"b"}), "out") == frozenset()


def test_domcore_fan_at_depth_thirty():
    H = unfold(DOMCORE, 30)
    S = [v for v in H if isinstance(v, tuple)]
    assert split_flow_value(list(H.nodes), list(H.edges), S, ["f"], uncapped=["f"]) >= 10


def test_closures():
    down = closure(LADDER, Query(ends={"u"}), "down")
    assert down.ends == {end_structure(LADDER).end_of["b"], end_structure(LADDER).end_of["u"]}
    assert closure(LADDER, Query(), "up") == ClosedSet(frozenset(), frozenset())
    assert "f" in closure(DOMCORE, Query(ends={"a"}), "up").vertices


def test_closure_is_monotone_and_idempotent():
    for seed in range(80):
        P = random_instance(seed)
        try:
            A = P.query("A")
            for d in ("up", "down"):
                c = closure(P, A, d)
                assert closure(P, c, d) == c
                assert A.vertices <= c.vertices
        except NoStabilization:
            continue


def test_widths():
    assert end_width(SINGLE, "r", "out") == 1
    assert end_width(CHORD, "r", "out") == 2
    assert end_width(LADDER, "u", "in") == 0
    assert end_width(LADDER, "u", "out") == 1


def test_in_width_is_reversed_out_width():
    n = 0
    for seed in range(120):
        P = random_instance(seed)
        try:
            for r in P.ray_ids:
                assert end_width(P, r, "in") == end_width(reverse(P), r, "out")
            n += 1
        except NoStabilization:
            continue
    assert n >= 100


def test_ends_and_widths_against_oracle():
    compared = 0
    for seed in range(150):
        P = random_instance(seed)
        try:
            mine = {(frozenset(e.rays), e.width_in, e.width_out) for e in ends(P)}
            theirs = {(e.rays, e.width_in, e.width_out) for e in oracle_ends(P)}
        except (NoStabilization, Unstable):
            continue
        assert mine == theirs, seed
        compared += 1
    assert compared >= 135


def test_dispersed():
    assert is_dispersed(LADDER, LADDER.query("A"), LADDER.query("B"))
    assert not is_dispersed(TWOEND, TWOEND.query("A"), TWOEND.query("B"))
    for name in fixtures.NAMES:
        P = fixtures.load(name)
        assert is_dispersed(P, P.query("A"), Query())


@pytest.mark.parametrize("cut", [5, 10, 20])
def test_twoend_survives_finite_deletions(cut):
    H = unfold(TWOEND, 40)
    H.remove_nodes_from([v for v in list(H) if v[1] <= cut])
    assert any(nx.has_path(H, ("i", t), ("o", s)) for t in range(cut + 1, 41) for s in range(cut + 1, 41))


def test_unequal_periods_inside_an_end_are_refused():
    from end_menger.ends import MixedPeriods
    P = random_instance(22)
    with pytest.raises(MixedPeriods):
        ends(P)
    with pytest.raises(Unstable):
        oracle_ends(P)
