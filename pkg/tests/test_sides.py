import random

import networkx as nx
import pytest

from end_menger import fixtures
from end_menger.ends import NoStabilization, end_structure
from end_menger.oracle import random_instance, unfold
from end_menger.presentation import CofiniteVertexSet, max_index, window_margin
from end_menger.sides import (InfiniteHitSet, NonRepresentable, first_hits, last_hits,
                              reachable, tail, track_side_set)

LADDER = fixtures.load("ladder")
SINGLE = fixtures.load("single")
CHORD = fixtures.load("chord")


def eid(P, ray):
    return end_structure(P).end_of[ray]


def test_reachable_examples():
    assert reachable(SINGLE, ("r", 1), tail("r"))
    assert not reachable(SINGLE, ("r", 5), ("r", 2))
    assert reachable(LADDER, tail("b"), tail("u"))
    assert not reachable(LADDER, tail("u"), tail("b"))
    assert reachable(LADDER, ("b", 3), ("u", 7))
    assert not reachable(LADDER, ("u", 3), ("b", 7))


def test_reachable_against_unfolded_bfs():
    rng = random.Random(2)
    n = 0
    for seed in range(150):
        P = random_instance(seed)
        try:
            end_structure(P)
        except NoStabilization:
            continue
        L = max(4 * window_margin(P), max_index(P) + 8 * window_margin(P))
        H = unfold(P, L)
        names = list(P.cores) + [(r, t) for r in P.ray_ids for t in range(1, 7)]
        for _ in range(4):
            u, v = rng.choice(names), rng.choice(names)
            assert reachable(P, u, v) == nx.has_path(H, u, v), (seed, u, v)
            n += 1
    assert n >= 400


def test_whole_ray_reaches_its_end():
    S = track_side_set(SINGLE, eid(SINGLE, "r"), set(), "to")
    assert S == CofiniteVertexSet.of((), [("r", 1)])


def test_cut_ray_side_set():
    S = track_side_set(SINGLE, eid(SINGLE, "r"), {("r", 5)}, "to")
    assert S == CofiniteVertexSet.of((), [("r", 6)])


def test_ladder_side_set_against_bfs():
    X = {("u", 3)}
    S = track_side_set(LADDER, eid(LADDER, "u"), X, "to")
    H = unfold(LADDER, 60)
    H.remove_nodes_from(X)
    band = [("u", t) for t in range(50, 61)]
    for t in range(1, 40):
        for r in ("b", "u"):
            v = (r, t)
            if v in X:
                assert v not in S
                continue
            assert (v in S) == any(nx.has_path(H, v, w) for w in band), v


def test_side_set_of_in_side_is_empty_without_in_ray():
    assert track_side_set(SINGLE, eid(SINGLE, "r"), set(), "from") == CofiniteVertexSet()


def test_first_hits():
    U = CofiniteVertexSet.of((), [("r", 10)])
    assert first_hits(SINGLE, ("r", 1), U) == {("r", 10)}
    assert first_hits(CHORD, ("r", 1), U) == {("r", 10), ("r", 11)}


def test_last_hits_on_ladder():
    U = CofiniteVertexSet.of({("b", 2), ("u", 2)})
    assert last_hits(LADDER, U, eid(LADDER, "u")) == {("b", 2), ("u", 2)}


def test_infinite_hit_set():
    P = fixtures.load("domcore")
    U = CofiniteVertexSet.of((), [("a", 1)])
    with pytest.raises(InfiniteHitSet):
        last_hits(P, U, "f")
    assert issubclass(InfiniteHitSet, NonRepresentable)
