"""Disjoint tracks and finite separators through a compiled flow gadget.

The gadget is a truncation of D(P) plus one terminal per relevant end.  A
source terminal for an end a of A feeds every deep-band vertex of the rays
of a; a sink terminal for an end b of B drains the deep band of b.  Capped
terminals carry as many copies as the end has disjoint rays of the right
direction; uncapped terminals are single unbounded nodes, which forces
every minimum cut onto vertices of D(P).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from collections import deque

from .ends import ClosedSet, closure, end_by_id, end_structure, is_dispersed, query_ends
from .ends import NoStabilization
from .instance import format_vertex
from .flow import FiniteDigraph, max_vertex_disjoint_paths, min_vertex_cut, order_key
from .presentation import (CofiniteVertexSet, LTooSmall, Presentation, Query, delete_vertices, max_index,
                           period_lcm, truncate, vkey, window_margin)


class NotDispersed(ValueError):
    pass


class PreconditionViolated(ValueError):
    def __init__(self, hypothesis: str):
        super().__init__(f"precondition violated: {hypothesis}")
        self.hypothesis = hypothesis


class CutThroughTerminal(RuntimeError):
    """No minimum cut of the gadget avoids the end terminals."""


@dataclass(frozen=True)
class Terminal:
    role: str  # "source" | "sink"
    end_id: str
    copy: int = 0


@dataclass(frozen=True)
class Track:
    """A track of D(P): a vertex or an end at each side, joined by a finite middle."""

    source: tuple  # ("vertex", v) | ("end", end_id, ray, index mod period)
    middle: tuple
    sink: tuple  # ("vertex", v) | ("end", end_id, ray, index mod period)

    @property
    def kind(self) -> str:
        s, t = self.source[0] == "end", self.sink[0] == "end"
        return {(False, False): "path", (True, False): "in-ray",
                (False, True): "out-ray", (True, True): "double-ray"}[(s, t)]

    def vertices(self) -> frozenset:
        return frozenset(self.middle)


@dataclass(frozen=True)
class FlowInstance:
    graph: FiniteDigraph
    sources: frozenset
    sinks: frozenset
    lift: dict = field(compare=False)  # terminal -> end id
    depth: int = 0
    period: int = 1


def as_query(P: Presentation, X) -> Query:
    return X.as_query(P) if isinstance(X, ClosedSet) else X


def closed_query(P: Presentation, A, B) -> tuple[Query, Query]:
    return closure(P, A, "up").as_query(P), closure(P, B, "down").as_query(P)


def gadget_depth(P: Presentation, *queries) -> int:
    W = window_margin(P)
    m = max_index(P, *(as_query(P, q) for q in queries))
    return max(4 * W, m + 2 * W)


def compile_gadget(P: Presentation, A, B, L: int, capped: bool = True) -> FlowInstance:
    A, B = as_query(P, A), as_query(P, B)
    W = window_margin(P)
    if L < max(max_index(P, A, B), 1) + W:
        raise LTooSmall(f"depth {L} leaves no deep band above the explicit indices")
    G0, bands = truncate(P, L)
    es = end_structure(P)
    by_id = {e.end_id: e for e in es.ends}
    verts, arcs, unbounded = set(G0.vertices), set(G0.arcs), set()
    sources, sinks, lift = set(A.vertices), set(B.vertices), {}

    def add_terminals(eids, role, width_of):
        for eid in sorted(eids):
            width = width_of(by_id[eid])
            if width < 1:
                continue
            band = {v for r in by_id[eid].rays for v in bands[r]}
            if capped:
                for k in range(width):
                    t = Terminal(role, eid, k)
                    verts.add(t)
                    lift[t] = eid
                    (sources if role == "source" else sinks).add(t)
                    arcs.update(((t, v) for v in band) if role == "source" else ((v, t) for v in band))
                continue
            # uncapped: the band is merged into one unbounded terminal, so no cut can use it
            t = Terminal(role, eid, 0)
            lift[t] = eid
            outside = {(t, w) for u, w in arcs if u in band and w not in band} if role == "source" \
                else {(u, t) for u, w in arcs if w in band and u not in band}
            arcs.difference_update({a for a in arcs if a[0] in band or a[1] in band})
            verts.difference_update(band)
            verts.add(t)
            unbounded.add(t)
            arcs.update(outside)
            (sources if role == "source" else sinks).add(t)

    add_terminals(query_ends(P, A), "source", lambda e: e.width_in)
    add_terminals(query_ends(P, B), "sink", lambda e: e.width_out)
    G = FiniteDigraph(frozenset(verts), frozenset(arcs), frozenset(unbounded))
    return FlowInstance(G, frozenset(sources), frozenset(sinks), lift, L, period_lcm(P))


def lift_path(gadget: FlowInstance, path: tuple) -> Track:
    lam = gadget.period
    first, last = path[0], path[-1]
    middle = tuple(v for v in path if not isinstance(v, Terminal))
    if isinstance(first, Terminal):
        x = middle[0]
        source = ("end", first.end_id, x[0], x[1] % lam)
    else:
        source = ("vertex", first)
    if isinstance(last, Terminal):
        x = middle[-1]
        sink = ("end", last.end_id, x[0], x[1] % lam)
    else:
        sink = ("vertex", last)
    return Track(source, middle, sink)


def sweep(P: Presentation, fn, L0: int, key=lambda x: x):
    """Evaluate fn at L and L + period, doubling L until the two agree."""
    lam = period_lcm(P)
    limit = max(64 * window_margin(P), L0)
    L = L0
    while L <= limit:
        a, b = fn(L), fn(L + lam)
        if key(a) == key(b):
            return a, L
        L *= 2
    raise NoStabilization(f"values did not agree at depths L and L+{lam} up to {limit}")


def _require_dispersed(P, A, B, what="query"):
    if not is_dispersed(P, A, B):
        raise NotDispersed(f"{what} is not dispersed: an end of A with an in-ray reaches "
                           "an end of B with an out-ray")


def max_disjoint_tracks(P: Presentation, A, B) -> tuple[int, list[Track]]:
    _require_dispersed(P, A, B)

    def at(L):
        g = compile_gadget(P, A, B, L)
        k, fam = max_vertex_disjoint_paths(g.graph, g.sources, g.sinks)
        return k, g, fam

    (k, g, fam), _ = sweep(P, at, gadget_depth(P, A, B), key=lambda r: r[0])
    tracks = sorted((lift_path(g, p) for p in fam.paths), key=lambda t: order_key(t.middle))
    return k, tracks


def _shortest_path(G: FiniteDigraph, S, T):
    S, T = set(S), set(T)
    parent = {s: None for s in sorted(S, key=order_key)}
    queue = deque(parent)
    while queue:
        v = queue.popleft()
        if v in T:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            path.reverse()
            start = max(i for i, x in enumerate(path) if x in S)
            return tuple(path[start:])
        for w in G.succ[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def track_exists(P: Presentation, A, B) -> Track | None:
    """A witness A-B track, or None when D(P) has none."""

    def at(L):
        g = compile_gadget(P, A, B, L)
        return _shortest_path(g.graph, g.sources, g.sinks), g

    (path, g), _ = sweep(P, at, gadget_depth(P, A, B), key=lambda r: r[0] is not None)
    return None if path is None else lift_path(g, path)


def verify_separator(P: Presentation, S, A, B) -> bool:
    """True iff D(P) - S has no A-B track; S is finite or a CofiniteVertexSet."""
    A, B = as_query(P, A), as_query(P, B)
    D = delete_vertices(P, S if isinstance(S, CofiniteVertexSet) else frozenset(S))
    return track_exists(D.presentation, D.map_query(A), D.map_query(B)) is None


def min_separator(P: Presentation, A, B) -> frozenset:
    """A minimum finite A-B separator, read off the query's uncapped gadget."""
    _require_dispersed(P, A, B)
    W = window_margin(P)

    def at(L):
        g = compile_gadget(P, A, B, L, capped=False)
        cut = min_vertex_cut(g.graph, g.sources, g.sinks)
        deep = [v for v in cut if isinstance(v, Terminal) or (isinstance(v, tuple) and v[1] > L - W)]
        if deep:
            raise CutThroughTerminal(f"every minimum cut at depth {L} uses deep-band vertices")
        return cut

    cut, _ = sweep(P, at, gadget_depth(P, A, B), key=len)
    return frozenset(cut)


@dataclass(frozen=True)
class DualityReport:
    k_tracks: int
    sep_size: int
    equal: bool
    separator: frozenset
    tracks: tuple
    separator_ok: bool  # separates the query as given
    closed_ok: bool  # also separates the closed query

    def lines(self) -> list[str]:
        sep = " ".join(format_vertex(v) for v in sorted(self.separator, key=vkey))
        return [f"tracks={self.k_tracks} separator={self.sep_size} equal={'yes' if self.equal else 'no'}",
                f"separator_set={sep}",
                f"separator_verified={'yes' if self.separator_ok else 'no'}",
                f"closed_separator_verified={'yes' if self.closed_ok else 'no'}"]


def check_duality_preconditions(P: Presentation, A, B) -> None:
    if not is_dispersed(P, A, B):
        raise PreconditionViolated("(A, B) is dispersed")
    for eid in sorted(query_ends(P, A)):
        if not end_by_id(P, eid).has_in:
            raise PreconditionViolated(f"every end in A contains an in-ray ({eid} has none)")
    for eid in sorted(query_ends(P, B)):
        if not end_by_id(P, eid).has_out:
            raise PreconditionViolated(f"every end in B contains an out-ray ({eid} has none)")
    cA, cB = closed_query(P, A, B)
    if not is_dispersed(P, cA, cB):
        raise PreconditionViolated("(closure up of A, closure down of B) is dispersed")


def verify_duality(P: Presentation, A, B) -> DualityReport:
    check_duality_preconditions(P, A, B)
    cA, cB = closed_query(P, A, B)
    k, tracks = max_disjoint_tracks(P, cA, cB)
    sep = min_separator(P, A, B)
    return DualityReport(k, len(sep), k == len(sep), sep, tuple(tracks),
                         verify_separator(P, sep, A, B), verify_separator(P, sep, cA, cB))
