"""Combined degree of an end.

The degree d(w) counts disjoint out-rays of w.  The combined degree adds
the least size of a finite set that cuts the tails of w from everything
below w: vertices dominating w from outside, and out-rays of smaller ends.
By duality that size also counts disjoint tracks from the up-closure of w
to the strict down-closure.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ends import ClosedSet, closure, dominating, end_by_id, end_structure
from .instance import format_vertex
from .presentation import Presentation, Query, max_index, truncate, vkey, window_margin
from .sides import _bfs
from .tracks import max_disjoint_tracks, min_separator, sweep


class DegreeZero(ValueError):
    def __init__(self, end_id: str):
        super().__init__(f"end {end_id} has no out-ray; the variant of the combined degree "
                         "that also counts in-rays is not supported")
        self.end_id = end_id


def _eid(P: Presentation, omega) -> str:
    es = end_structure(P)
    return es.end_of.get(omega, omega)


def d_minus(P: Presentation, omega) -> int:
    return end_by_id(P, _eid(P, omega)).width_out


def up_and_strict_down(P: Presentation, omega) -> tuple[Query, Query]:
    """The up-closure of {w} and the down-closure of {w} without w itself."""
    e = end_by_id(P, _eid(P, omega))
    single = ClosedSet(frozenset(), frozenset({e.end_id}))
    up = closure(P, single, "up")
    down = closure(P, single, "down")
    strict = ClosedSet(down.vertices, down.ends - {e.end_id})
    return up.as_query(P), strict.as_query(P)


def is_omega_separating(P: Presentation, S, omega) -> bool:
    """Does S cut high tails of w from w-out-dominating vertices and smaller out-rays?"""
    e = end_by_id(P, _eid(P, omega))
    if e.width_out < 1:
        raise DegreeZero(e.end_id)
    S = frozenset(S)
    es = end_structure(P)
    by_id = {x.end_id: x for x in es.ends}
    targets_dom = dominating(P, ClosedSet(frozenset(), frozenset({e.end_id})), "out") - S
    lower = [by_id[a] for a in es.reach if e.end_id in es.reach[a] and a != e.end_id
             and by_id[a].width_out >= 1]
    W = window_margin(P)
    L0 = max(4 * W, max_index(P, [v for v in S if isinstance(v, tuple)]) + 3 * W)

    def at(L):
        G, bands = truncate(P, L)
        G = G.without(S)
        seen = _bfs(G, [v for r in e.rays for v in bands[r] if v not in S])
        if seen & targets_dom:
            return False
        for a in lower:
            if any(v in seen for r in a.rays for v in bands[r]):
                return False
        return True

    return sweep(P, at, L0)[0]


@dataclass(frozen=True)
class DegreeReport:
    end_id: str
    d_minus: int
    tracks_term: int
    sep_inf: int
    delta_minus: int
    separator: frozenset
    tracks: tuple

    @property
    def agrees(self) -> bool:
        return self.tracks_term == self.sep_inf

    def lines(self) -> list[str]:
        sep = " ".join(format_vertex(v) for v in sorted(self.separator, key=vkey))
        return [f"end={self.end_id}", f"d_minus={self.d_minus}",
                f"tracks_term={self.tracks_term}", f"sep_inf={self.sep_inf}",
                f"delta_minus={self.delta_minus}", f"separator_set={sep}",
                f"agrees={'yes' if self.agrees else 'no'}"]


def combined_degree(P: Presentation, omega) -> DegreeReport:
    e = end_by_id(P, _eid(P, omega))
    if e.width_out < 1:
        raise DegreeZero(e.end_id)
    up, strict = up_and_strict_down(P, omega)
    k, tracks = max_disjoint_tracks(P, up, strict)
    sep = min_separator(P, up, strict)
    return DegreeReport(e.end_id, e.width_out, k, len(sep), e.width_out + len(sep), sep,
                        tuple(tracks))
