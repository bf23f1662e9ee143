"""Reachability in D(P) and the sets of vertices on one side of an end.

Both are read off truncations.  A tail of ray i stands for its deep band,
so "from arbitrarily high vertices of i" becomes "from the deep band of i".
Vertex sets found this way are turned into a CofiniteVertexSet; a ray whose
pattern is neither eventually full nor eventually empty is reported, never
approximated.
"""
from __future__ import annotations

from collections import deque

from .ends import ClosedSet, end_by_id, end_structure
from .ends import NoStabilization
from .flow import FiniteDigraph
from .presentation import (CofiniteVertexSet, Presentation, is_ray_vertex, max_index,
                           period_lcm, truncate, window_margin)


class NonRepresentable(ValueError):
    """A vertex set that is not finite-plus-tails."""


class InfiniteHitSet(NonRepresentable):
    """Infinitely many vertices of U are hit first."""


def tail(ray: str) -> tuple:
    return ("tail", ray)


def _is_tail(x) -> bool:
    return isinstance(x, tuple) and len(x) == 2 and x[0] == "tail" and isinstance(x[1], str)


def _bfs(G: FiniteDigraph, starts, forward: bool = True) -> set:
    nbrs = G.succ if forward else G.pred
    seen = {s for s in starts if s in G.vertices}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in nbrs[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _depth(P: Presentation, extra=()) -> int:
    W = window_margin(P)
    return max(4 * W, max_index(P, extra) + 3 * W)


def _resolve_ref(x, bands, G):
    if _is_tail(x):
        return set(bands[x[1]])
    return {x} if x in G.vertices else set()


def reachable(P: Presentation, src, dst) -> bool:
    """Is there a finite path from src to dst?  Either may be ``tail(ray)``."""
    refs = [x for x in (src, dst) if not _is_tail(x)]

    def at(L):
        G, bands = truncate(P, L)
        S, T = _resolve_ref(src, bands, G), _resolve_ref(dst, bands, G)
        return bool(_bfs(G, S) & T)

    lam = period_lcm(P)
    L = _depth(P, refs)
    limit = max(64 * window_margin(P), L)
    while L <= limit:
        a = at(L)
        if a == at(L + lam):
            return a
        L *= 2
    raise NoStabilization("reachability did not stabilize")


def cofinite_from_reach(P: Presentation, reach_at, extra=()) -> CofiniteVertexSet:
    """Build a CofiniteVertexSet from ``reach_at(L)``, the vertices reached at depth L.

    A ray gets a tail when its whole decided zone above the explicit
    indices is reached; the result must agree at L and L + period.
    """
    lam = period_lcm(P)
    W = window_margin(P)
    L = _depth(P, extra)
    first = _represent(P, reach_at(L), L, W, lam, extra)
    second = _represent(P, reach_at(L + lam), L + lam, W, lam, extra)
    if first != second:
        raise NonRepresentable("vertex set changes with the truncation depth")
    return first


def _represent(P, reached, L, W, lam, extra) -> CofiniteVertexSet:
    top = L - 2 * W
    m = max_index(P, extra)
    finite, tails = set(), set()
    for v in reached:
        if not is_ray_vertex(v):
            finite.add(v)
    for ray in P.ray_ids:
        hit = [t for t in range(1, top + 1) if (ray, t) in reached]
        zone = [t for t in range(m + lam + 1, top + 1)]
        full = all((ray, t) in reached for t in zone)
        empty = not any((ray, t) in reached for t in zone)
        if full:
            s = top
            while s > 1 and (ray, s - 1) in reached:
                s -= 1
            tails.add((ray, s))
            finite.update((ray, t) for t in hit if t < s)
        elif empty:
            finite.update((ray, t) for t in hit)
        else:
            raise NonRepresentable(f"ray {ray} is only partly covered beyond index {m + lam}")
    return CofiniteVertexSet.of(finite, tails)


def _end_id(P, omega):
    es = end_structure(P)
    if isinstance(omega, str) and omega in es.end_of:
        return es.end_of[omega]
    return end_by_id(P, omega).end_id


def track_side_set(P: Presentation, omega, X, side: str) -> CofiniteVertexSet:
    """All v with a v-omega track (side="to") or omega-v track (side="from") in D - X."""
    X = frozenset(X)
    e = end_by_id(P, _end_id(P, omega))
    if side not in ("to", "from"):
        raise ValueError("side must be 'to' or 'from'")
    if (side == "to" and not e.has_out) or (side == "from" and not e.has_in):
        return CofiniteVertexSet()

    def reach_at(L):
        G, bands = truncate(P, L)
        G = G.without(X)
        band = [v for r in e.rays for v in bands[r] if v not in X]
        return _bfs(G, band, forward=(side == "from"))

    return cofinite_from_reach(P, reach_at, X)


def first_hits(P: Presentation, source, U: CofiniteVertexSet) -> frozenset:
    """Vertices of U reachable from ``source`` by a path meeting U only at its end.

    ``source`` is a vertex, ``tail(ray)`` or an end id (from its deep band).
    """
    return _hits(P, source, U, forward=True)


def last_hits(P: Presentation, U: CofiniteVertexSet, target) -> frozenset:
    """Vertices of U from which ``target`` is reachable avoiding the rest of U."""
    return _hits(P, target, U, forward=False)


def _hits(P, anchor, U, forward):
    if isinstance(anchor, ClosedSet):
        raise TypeError("anchor must be a vertex, tail(ray) or end id")
    es = end_structure(P)
    if isinstance(anchor, str) and anchor in {e.end_id for e in es.ends}:
        rays = end_by_id(P, anchor).rays
        start = lambda bands: [v for r in rays for v in bands[r]]
    elif _is_tail(anchor):
        start = lambda bands: list(bands[anchor[1]])
    else:
        start = lambda bands: [anchor]
    extra = list(U.finite) + [(r, s) for r, s in U.tails]
    if not _is_tail(anchor) and is_ray_vertex(anchor):
        extra.append(anchor)

    def at(L):
        G, bands = truncate(P, L)
        nbrs = G.succ if forward else G.pred
        found, seen = set(), set()
        queue = deque()
        for s in start(bands):
            if s in U:
                found.add(s)
            elif s in G.vertices and s not in seen:
                seen.add(s)
                queue.append(s)
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if w in U:
                    found.add(w)
                elif w not in seen:
                    seen.add(w)
                    queue.append(w)
        return frozenset(found)

    L = _depth(P, extra)
    lam = period_lcm(P)
    a, b = at(L), at(L + lam)
    if a != b:
        raise InfiniteHitSet("hit set grows with the truncation depth")
    return a
