import itertools

import pytest

from end_menger import fixtures
from end_menger.degree import (DegreeZero, combined_degree, d_minus, is_omega_separating,
                               up_and_strict_down)
from end_menger.presentation import reverse, truncate
from end_menger.tracks import verify_separator

LADDER = fixtures.load("ladder")
SINGLE = fixtures.load("single")
CHORD = fixtures.load("chord")
FEEDBACK = fixtures.load("feedback")


def test_d_minus():
    assert d_minus(SINGLE, "r") == 1
    assert d_minus(CHORD, "r") == 2
    assert d_minus(LADDER, "u") == 1


def test_omega_separating_examples():
    assert is_omega_separating(SINGLE, set(), "r")
    assert is_omega_separating(LADDER, set(), "u")
    assert not is_omega_separating(FEEDBACK, set(), "u")
    assert is_omega_separating(FEEDBACK, {"f"}, "u")


def test_degree_zero():
    with pytest.raises(DegreeZero):
        is_omega_separating(reverse(SINGLE), set(), "r")
    with pytest.raises(DegreeZero):
        combined_degree(reverse(LADDER), "u")


@pytest.mark.parametrize("P,ray", [(SINGLE, "r"), (LADDER, "u"), (LADDER, "b"),
                                   (FEEDBACK, "u"), (FEEDBACK, "b"), (CHORD, "r")])
def test_separating_matches_closed_separator(P, ray):
    up, strict = up_and_strict_down(P, ray)
    G, _ = truncate(P, 4)
    pool = sorted(G.vertices, key=repr)
    for k in (0, 1, 2):
        for S in itertools.islice(itertools.combinations(pool, k), 40):
            assert is_omega_separating(P, set(S), ray) == verify_separator(P, set(S), up, strict), S


def test_combined_degree_fixtures():
    r = combined_degree(SINGLE, "r")
    assert (r.d_minus, r.tracks_term, r.delta_minus) == (1, 0, 1)
    r = combined_degree(LADDER, "u")
    assert (r.d_minus, r.tracks_term, r.delta_minus) == (1, 0, 1)
    r = combined_degree(FEEDBACK, "u")
    assert r.tracks_term >= 1 and r.agrees
    assert r.separator == {"f"}


def test_delta_is_d_plus_tracks_on_fixtures():
    for name in fixtures.NAMES:
        P = fixtures.load(name)
        for r in P.ray_ids:
            try:
                rep = combined_degree(P, r)
            except DegreeZero:
                continue
            assert rep.delta_minus == rep.d_minus + rep.tracks_term
            assert rep.agrees
