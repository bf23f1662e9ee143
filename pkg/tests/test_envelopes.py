import networkx as nx
import pytest

from end_menger import fixtures
from end_menger.ends import NoStabilization
from end_menger.envelopes import (AttachedRay, AttachedVertex, CofiniteVertexSet,
                                  FiniteSeparatorInU, attached_dichotomy,
                                  build_dispersed_separator, check_certificates, envelope,
                                  shrink_to_small_separator)
from end_menger.oracle import duality_instance, split_flow_value, unfold
from end_menger.presentation import Presentation, reverse
from end_menger.tracks import closed_query, min_separator, verify_separator

LADDER = fixtures.load("ladder")
SINGLE = fixtures.load("single")
CHORD = fixtures.load("chord")


def test_empty_envelope():
    assert envelope(LADDER, CofiniteVertexSet()).Y == CofiniteVertexSet()


def test_single_nothing_attached():
    U = CofiniteVertexSet.of((), [("r", 10)])
    res = envelope(SINGLE, U)
    assert res.Y == U and not res.attached_vertices and not res.attached_rays


def test_ladder_bottom_ray_attaches():
    U = CofiniteVertexSet.of((), [("u", 5)])
    res = envelope(LADDER, U)
    assert "b" in res.Y.tail_start
    # the rungs give many disjoint b -> U paths
    H = unfold(LADDER, 30)
    S = [("b", t) for t in range(1, 31)]
    T = [("u", t) for t in range(5, 31)]
    assert split_flow_value(list(H.nodes), list(H.edges), S, T) >= 10


def test_dichotomy_single_and_chord():
    U = CofiniteVertexSet.of((), [("r", 10)])
    assert attached_dichotomy(SINGLE, ("r", 1), U) == FiniteSeparatorInU(frozenset({("r", 10)}))
    assert attached_dichotomy(CHORD, ("r", 1), U) == FiniteSeparatorInU(
        frozenset({("r", 10), ("r", 11)}))


def test_dichotomy_reports_a_fanning_core():
    D = reverse(fixtures.load("domcore"))
    P = Presentation(D.cores + ("g",), (("g", "f"),), D.rays, D.rules, D.out_bundles,
                     D.in_bundles, D.arcs, D.sets)
    U = CofiniteVertexSet.of((), [("a", 1)])
    assert attached_dichotomy(P, "g", U) == AttachedVertex("f")
    H = unfold(P, 30)
    assert split_flow_value(list(H.nodes), list(H.edges), ["f"], [("a", t) for t in range(1, 31)],
                            uncapped=["f"]) >= 10


def test_dichotomy_reports_an_attached_ray():
    U = CofiniteVertexSet.of((), [("u", 5)])
    assert attached_dichotomy(LADDER, ("b", 1), U) == AttachedRay("b", 6)


def test_vertices_have_finite_separators_from_envelope():
    U = CofiniteVertexSet.of((), [("u", 5)])
    Y = envelope(LADDER, U).Y
    for v in [("b", 1), ("b", 3), ("u", 2)]:
        res = attached_dichotomy(LADDER, v, Y)
        assert isinstance(res, FiniteSeparatorInU)
        assert all(x in Y for x in res.vertices)
        H = unfold(LADDER, 40)
        H.remove_nodes_from(res.vertices)
        assert not any(nx.has_path(H, v, w) for w in H if w in Y)


def test_single_dispersed_separator():
    A, B = SINGLE.query("A"), SINGLE.query("B")
    res = build_dispersed_separator(SINGLE, A, B)
    assert verify_separator(SINGLE, res.S, A, B)
    assert res.S_a[("vertex", ("r", 1))] == {("r", 1)}
    assert check_certificates(SINGLE, A, B, res) == []


def test_ladder_dispersed_separator():
    A, B = LADDER.query("A"), LADDER.query("B")
    res = build_dispersed_separator(LADDER, A, B)
    assert check_certificates(LADDER, A, B, res) == []
    assert verify_separator(LADDER, res.S, A, B)


def test_shrink_fixtures():
    A, B = SINGLE.query("A"), SINGLE.query("B")
    assert len(shrink_to_small_separator(SINGLE, A, B)) == 1
    cA, cB = closed_query(LADDER, LADDER.query("A"), LADDER.query("B"))
    S = shrink_to_small_separator(LADDER, cA, cB)
    assert len(S) == 2 and verify_separator(LADDER, S, cA, cB)


@pytest.mark.parametrize("seed", range(12))
def test_random_certificates_and_shrink(seed):
    try:
        P = duality_instance(seed)
        A, B = P.query("A"), P.query("B")
        res = build_dispersed_separator(P, A, B)
        S = shrink_to_small_separator(P, A, B, certificates=res)
        smallest = min_separator(P, A, B)
    except NoStabilization:
        pytest.skip("no stabilization")
    assert check_certificates(P, A, B, res) == []
    assert verify_separator(P, S, A, B)
    assert len(S) >= len(smallest)
