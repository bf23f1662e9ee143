"""Envelopes of vertex sets and separators built from them.

An in-envelope of U is a superset Y such that every vertex, and every end
that a finite set cuts from U, is cut from Y by a finite subset of Y.  In a
presentation, the things that prevent finite cuts are core vertices with a
bundle into a ray that reaches a tail of U, and rays whose end reaches such
a tail; adding all of them gives an envelope.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .ends import closure, end_by_id, end_structure, is_dispersed
from .presentation import (CofiniteVertexSet, Presentation, Query, delete_vertices,
                           is_ray_vertex, max_index, reverse, truncate, window_margin)
from .sides import InfiniteHitSet, first_hits, last_hits, track_side_set
from .tracks import (NotDispersed, Track, as_query, max_disjoint_tracks, track_exists,
                     verify_separator)

__all__ = ["CofiniteVertexSet", "EnvelopeResult", "FiniteSeparatorInU", "AttachedVertex",
           "AttachedRay", "DispersedSeparator", "FNotMaximal", "attached_dichotomy",
           "envelope", "build_dispersed_separator", "check_certificates",
           "shrink_to_small_separator"]


class FNotMaximal(RuntimeError):
    def __init__(self, track: Track):
        super().__init__("a track survives the shrunk separator; the family was not maximal")
        self.track = track


@dataclass(frozen=True)
class EnvelopeResult:
    Y: CofiniteVertexSet
    attached_vertices: frozenset
    attached_rays: frozenset  # (ray, from_index)


@dataclass(frozen=True)
class FiniteSeparatorInU:
    vertices: frozenset


@dataclass(frozen=True)
class AttachedVertex:
    vertex: object


@dataclass(frozen=True)
class AttachedRay:
    ray: str
    start: int


def _tail_reachers(P: Presentation, U: CofiniteVertexSet) -> set:
    """Rays that reach, in the ray graph, some ray carrying a tail of U."""
    es = end_structure(P)
    tailed = set(U.tail_start)
    return {r for r in P.ray_ids if es.ray_reach[r] & tailed}


def _attached(P: Presentation, U: CofiniteVertexSet):
    reach = _tail_reachers(P, U)
    es = end_structure(P)
    verts = {b.core for b in P.out_bundles if b.ray in reach and b.core not in U}
    t0 = max_index(P, U) + 1
    rays = set()
    for e in es.ends:
        if e.width_out >= 1 and any(r in reach for r in e.rays):
            rays.update((r, t0) for r in e.rays if r not in U.tail_start)
    return frozenset(verts), frozenset(rays)


def _in_envelope(P: Presentation, U: CofiniteVertexSet) -> EnvelopeResult:
    Y = U
    while True:
        verts, rays = _attached(P, Y)
        grown = Y | CofiniteVertexSet.of(verts, rays)
        if grown == Y:
            break
        Y = grown
    v_all = frozenset(v for v in Y.finite if not is_ray_vertex(v) and v not in U)
    r_all = frozenset((r, s) for r, s in Y.tails if r not in U.tail_start)
    return EnvelopeResult(Y, v_all, r_all)


def envelope(P: Presentation, U: CofiniteVertexSet, side: str = "in") -> EnvelopeResult:
    if side == "in":
        return _in_envelope(P, U)
    if side == "out":
        return _in_envelope(reverse(P), U)
    raise ValueError("side must be 'in' or 'out'")


def attached_dichotomy(P: Presentation, v, U: CofiniteVertexSet):
    """A finite v-U separator inside U, or what makes every such cut infinite."""
    if v in U:
        raise ValueError("v must lie outside U")
    try:
        return FiniteSeparatorInU(first_hits(P, v, U))
    except InfiniteHitSet:
        pass
    verts, rays = _attached(P, U)
    seen = _reach_avoiding(P, v, U, max_index(P, U, [v] if is_ray_vertex(v) else []))
    for f in sorted(verts):
        if f in seen:
            return AttachedVertex(f)
    for r, s in sorted(rays):
        if any(is_ray_vertex(x) and x[0] == r and x[1] >= s for x in seen):
            return AttachedRay(r, s)
    raise RuntimeError(f"infinitely many first hits from {v!r} but nothing attached is reachable")


def _reach_avoiding(P, v, U, m):
    L = max(4 * window_margin(P), m + 3 * window_margin(P))
    G, _ = truncate(P, L)
    seen, queue = {v}, deque([v])
    while queue:
        x = queue.popleft()
        for w in G.succ[x]:
            if w not in seen and w not in U:
                seen.add(w)
                queue.append(w)
    return seen


@dataclass(frozen=True)
class DispersedSeparator:
    S: CofiniteVertexSet
    S_a: dict  # element of A -> finite set; elements are ("vertex", v) or ("end", ray)
    S_b: dict


def _map_back(D, Y: CofiniteVertexSet) -> CofiniteVertexSet:
    finite = {D.backward(v) for v in Y.finite}
    tails = {D.backward((r, s)) for r, s in Y.tails}
    return CofiniteVertexSet.of(finite, tails)


def _elements(P: Presentation, Q: Query):
    out = [("vertex", v) for v in sorted(Q.vertices, key=repr)]
    seen = set()
    for r in sorted(Q.ends):
        eid = end_structure(P).end_of[r]
        if eid not in seen:
            seen.add(eid)
            out.append(("end", r))
    return out


def _anchor(P, elem):
    return elem[1] if elem[0] == "vertex" else end_structure(P).end_of[elem[1]]


def build_dispersed_separator(P: Presentation, A, B) -> DispersedSeparator:
    """A possibly infinite A-B separator with finite certificates at every element."""
    A, B = as_query(P, A), as_query(P, B)
    if not is_dispersed(P, A, B):
        raise NotDispersed("query is not dispersed")
    down = closure(P, B, "down")
    t0 = max_index(P, A, B) + 1
    x_tails = {(r, t0) for eid in down.ends if end_by_id(P, eid).width_out >= 1
               for r in end_by_id(P, eid).rays}
    X = CofiniteVertexSet.of(down.vertices, x_tails)
    Xp = envelope(P, X, "in").Y

    V, Z = {}, CofiniteVertexSet()
    for elem in _elements(P, A):
        if elem[0] != "end":
            continue
        eid = _anchor(P, elem)
        if not end_by_id(P, eid).has_in:
            V[elem] = frozenset()
            continue
        try:
            V[elem] = first_hits(P, eid, Xp)
        except InfiniteHitSet:
            raise NotDispersed(f"no finite separator between end {elem[1]} and the envelope") from None
        Z = Z | track_side_set(P, eid, V[elem], "from")
    union_v = frozenset().union(*V.values()) if V else frozenset()
    v_bar = union_v | {v for v in A.vertices if v not in Z}

    D = delete_vertices(P, Z)
    image = frozenset(w for w in (D.forward(v) for v in v_bar) if w is not None)
    S = _map_back(D, envelope(D.presentation, CofiniteVertexSet.of(image), "out").Y)

    S_a = {}
    for elem in _elements(P, A):
        if elem[0] == "end":
            S_a[elem] = V[elem]
        elif elem[1] not in Z:
            S_a[elem] = frozenset({elem[1]})
        else:
            owner = next(e for e in V if elem[1] in track_side_set(P, _anchor(P, e), V[e], "from"))
            S_a[elem] = V[owner]
    S_b = {}
    for elem in _elements(P, B):
        anchor = _anchor(P, elem)
        if elem[0] == "end" and not end_by_id(P, anchor).has_out:
            S_b[elem] = frozenset()
        else:
            S_b[elem] = last_hits(P, S, anchor)
    return DispersedSeparator(S, S_a, S_b)


def check_certificates(P: Presentation, A, B, result: DispersedSeparator) -> list[str]:
    """Problems with a dispersed separator; empty when every certificate holds."""
    problems = []
    if not verify_separator(P, result.S, A, B):
        problems.append("S does not separate A from B")
    for elem, Sa in result.S_a.items():
        if not all(v in result.S for v in Sa):
            problems.append(f"S_a for {elem} is not contained in S")
        if elem[0] == "end" and not end_by_id(P, _anchor(P, elem)).has_in:
            continue
        try:
            if not first_hits(P, _anchor(P, elem), result.S) <= Sa:
                problems.append(f"S_a for {elem} does not separate it from S")
        except InfiniteHitSet:
            problems.append(f"{elem} reaches infinitely many vertices of S")
    for elem, Sb in result.S_b.items():
        if not all(v in result.S for v in Sb):
            problems.append(f"S_b for {elem} is not contained in S")
        anchor = _anchor(P, elem)
        if elem[0] == "end" and not end_by_id(P, anchor).has_out:
            continue
        try:
            if not last_hits(P, result.S, anchor) <= Sb:
                problems.append(f"S_b for {elem} does not separate S from it")
        except InfiniteHitSet:
            problems.append(f"infinitely many vertices of S reach {elem}")
    return problems


def _cert_for(P, table, desc):
    """S_a or S_b for the query element a track starts or ends at."""
    if desc[0] == "vertex":
        return table[("vertex", desc[1])]
    eid = desc[1]
    for elem, cert in table.items():
        if elem[0] == "end" and end_structure(P).end_of[elem[1]] == eid:
            return cert
    raise KeyError(f"track end {eid} is not an end of the query")


def _spanning_segment(middle: tuple, marks) -> tuple:
    idx = [i for i, v in enumerate(middle) if v in marks]
    if not idx:
        return middle
    return middle[min(idx): max(idx) + 1]


def shrink_to_small_separator(P: Presentation, A, B, F=None, extend: bool = True,
                              certificates: DispersedSeparator | None = None) -> frozenset:
    """A finite A-B separator assembled from per-track certificates of F.

    F defaults to a maximum disjoint family.  When a track survives and is
    disjoint from F, it is added and the construction repeats (if
    ``extend``); otherwise FNotMaximal is raised.
    """
    A, B = as_query(P, A), as_query(P, B)
    cert = certificates or build_dispersed_separator(P, A, B)
    F = list(F if F is not None else max_disjoint_tracks(P, A, B)[1])
    while True:
        S = set()
        for t in F:
            Sa = _cert_for(P, cert.S_a, t.source)
            Sb = _cert_for(P, cert.S_b, t.sink)
            S |= Sa | Sb
            S |= set(_spanning_segment(t.middle, Sa | Sb))
        S = frozenset(S)
        survivor = track_exists(delete_vertices(P, S).presentation,
                                *_mapped(P, S, A, B))
        if survivor is None:
            return S
        lifted = _lift_back(P, S, survivor)
        used = frozenset().union(*(t.vertices() for t in F)) if F else frozenset()
        if extend and not (lifted.vertices() & used):
            F.append(lifted)
            continue
        raise FNotMaximal(lifted)


def _mapped(P, S, A, B):
    D = delete_vertices(P, S)
    return D.map_query(A), D.map_query(B)


def _lift_back(P, S, track: Track) -> Track:
    D = delete_vertices(P, S)
    back = lambda v: D.backward(v)
    src = ("vertex", back(track.source[1])) if track.source[0] == "vertex" else \
        ("end", end_structure(P).end_of[track.source[2]]) + track.source[2:]
    snk = ("vertex", back(track.sink[1])) if track.sink[0] == "vertex" else \
        ("end", end_structure(P).end_of[track.sink[2]]) + track.sink[2:]
    return Track(src, tuple(back(v) for v in track.middle), snk)
