import random

import pytest

from end_menger import fixtures
from end_menger.ends import NoStabilization, end_structure, is_dispersed
from end_menger.flow import max_vertex_disjoint_paths
from end_menger.oracle import (LimitExceeded, OracleConfig, Unstable, brute_force_separator,
                               brute_force_tracks, random_instance)
from end_menger.presentation import LTooSmall, Query, delete_vertices, truncate
from end_menger.tracks import (PreconditionViolated, Terminal, closed_query, compile_gadget,
                               gadget_depth, max_disjoint_tracks, min_separator, sweep,
                               track_exists, verify_duality, verify_separator)

LADDER = fixtures.load("ladder")
SINGLE = fixtures.load("single")
A_L, B_L = LADDER.query("A"), LADDER.query("B")


def eid(P, ray):
    return end_structure(P).end_of[ray]


def test_single_gadget_has_one_sink_terminal():
    g = compile_gadget(SINGLE, SINGLE.query("A"), SINGLE.query("B"), gadget_depth(SINGLE))
    terms = [t for t in g.sinks if isinstance(t, Terminal)]
    assert terms == [Terminal("sink", eid(SINGLE, "r"), 0)]


def test_ladder_gadget_terminals():
    L = gadget_depth(LADDER, A_L, B_L)
    raw = compile_gadget(LADDER, A_L, B_L, L)
    assert {t.end_id for t in raw.sinks if isinstance(t, Terminal)} == {eid(LADDER, "u")}
    cA, cB = closed_query(LADDER, A_L, B_L)
    closed = compile_gadget(LADDER, cA, cB, L)
    terms = [t for t in closed.sinks if isinstance(t, Terminal)]
    assert len(terms) == 2 and {t.end_id for t in terms} == {eid(LADDER, "b"), eid(LADDER, "u")}


def test_gadget_depth_guard():
    with pytest.raises(LTooSmall):
        compile_gadget(LADDER, A_L, B_L, 2)


def test_gadget_flow_matches_oracle_on_fixtures():
    for name in fixtures.NAMES:
        P = fixtures.load(name)
        if set(dict(P.sets)) != {"A", "B"}:
            continue
        A, B = P.query("A"), P.query("B")
        if not is_dispersed(P, A, B):
            continue
        g = compile_gadget(P, A, B, gadget_depth(P, A, B))
        k, _ = max_vertex_disjoint_paths(g.graph, g.sources, g.sinks)
        assert k == brute_force_tracks(P, A, B), name


def test_single_out_ray_track():
    t = track_exists(SINGLE, Query({("r", 1)}), Query(ends={"r"}))
    assert t is not None and t.kind == "out-ray" and t.middle[0] == ("r", 1)


def test_ladder_track_uses_a_rung():
    t = track_exists(LADDER, Query({("b", 1)}), B_L)
    assert t is not None and t.middle[0] == ("b", 1)
    rays = [v[0] for v in t.middle]
    assert rays[-1] == "u" and "b" in rays


def test_ladder_values():
    assert max_disjoint_tracks(LADDER, A_L, B_L)[0] == 1
    cA, cB = closed_query(LADDER, A_L, B_L)
    assert max_disjoint_tracks(LADDER, cA, cB)[0] == 2
    S = min_separator(LADDER, A_L, B_L)
    assert len(S) == 2
    assert verify_separator(LADDER, S, A_L, B_L)


def test_single_separator():
    assert len(min_separator(SINGLE, SINGLE.query("A"), SINGLE.query("B"))) == 1


def test_verify_separator_examples():
    assert verify_separator(LADDER, {("b", 1), ("u", 1)}, A_L, B_L)
    assert not verify_separator(LADDER, {("u", 1)}, A_L, B_L)
    assert not verify_separator(LADDER, set(), A_L, B_L)


def test_verify_duality_fixtures():
    r = verify_duality(LADDER, A_L, B_L)
    assert (r.k_tracks, r.sep_size, r.equal) == (2, 2, True)
    assert r.lines()[0] == "tracks=2 separator=2 equal=yes"
    r = verify_duality(SINGLE, SINGLE.query("A"), SINGLE.query("B"))
    assert (r.k_tracks, r.sep_size, r.equal) == (1, 1, True)


def test_duality_rejects_non_dispersed():
    P = fixtures.load("twoend")
    with pytest.raises(PreconditionViolated, match="dispersed"):
        verify_duality(P, P.query("A"), P.query("B"))


def test_tracks_are_disjoint_and_start_and_end_correctly():
    cA, cB = closed_query(LADDER, A_L, B_L)
    k, tracks = max_disjoint_tracks(LADDER, cA, cB)
    assert k == len(tracks)
    seen = set()
    for t in tracks:
        assert not seen & t.vertices()
        seen |= t.vertices()


def test_sweep_doubles_until_stable():
    calls = []

    def fn(L):
        calls.append(L)
        return min(L, 100)

    value, L = sweep(SINGLE, fn, 10)
    assert value == 100 and L >= 100
    with pytest.raises(NoStabilization):
        sweep(SINGLE, lambda L: L, 4)


def _random_cases(n, seed0=0):
    for seed in range(seed0, seed0 + n):
        P = random_instance(seed)
        A, B = P.query("A"), P.query("B")
        try:
            if is_dispersed(P, A, B):
                yield seed, P, A, B
        except NoStabilization:
            continue


def test_monotone_in_sources():
    rng = random.Random(1)
    n = 0
    for seed, P, A, B in _random_cases(60):
        base = max_disjoint_tracks(P, A, B)[0]
        extra = Query({(rng.choice(P.ray_ids), rng.randint(1, 4))})
        bigger = A | extra
        if not is_dispersed(P, bigger, B):
            continue
        assert max_disjoint_tracks(P, bigger, B)[0] >= base
        n += 1
    assert n >= 30


def test_separator_is_minimum_and_verifies():
    n = 0
    for seed, P, A, B in _random_cases(60, 500):
        try:
            S = min_separator(P, A, B)
        except NoStabilization:
            continue
        assert verify_separator(P, S, A, B), seed
        for v in S:
            assert not verify_separator(P, S - {v}, A, B), seed
        n += 1
    assert n >= 30


def test_deletion_requery_matches_oracle():
    rng = random.Random(11)
    compared = 0
    for seed in range(200):
        P = random_instance(seed)
        A, B = P.query("A"), P.query("B")
        G, _ = truncate(P, 6)
        S = set(rng.sample(sorted(G.vertices, key=repr), min(2, len(G.vertices))))
        D = delete_vertices(P, S)
        Q, A2, B2 = D.presentation, D.map_query(A), D.map_query(B)
        try:
            mine = track_exists(Q, A2, B2) is not None
            theirs = brute_force_tracks(Q, A2, B2, OracleConfig(max_family=1)) >= 1
        except (NoStabilization, Unstable, LimitExceeded):
            continue
        except ValueError:
            continue
        assert mine == theirs, seed
        compared += 1
        if compared == 100:
            break
    assert compared == 100


def test_small_random_against_oracle():
    compared = 0
    for seed, P, A, B in _random_cases(50, 1000):
        try:
            k = max_disjoint_tracks(P, A, B)[0]
            s = len(min_separator(P, A, B))
            ok, os_ = brute_force_tracks(P, A, B), brute_force_separator(P, A, B)
        except (NoStabilization, Unstable, LimitExceeded):
            continue
        assert (k, s) == (ok, os_), seed
        compared += 1
    assert compared >= 30
