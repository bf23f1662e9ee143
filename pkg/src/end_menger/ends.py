"""Ends of presented digraphs and the order, domination and closure built on them.

Rays i and j carry infinitely many disjoint i-j paths exactly when j is
reachable from i in the ray-reachability digraph, whose arcs are the
ray-to-ray rules.  Ends are its strongly connected components.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .flow import FiniteDigraph, max_vertex_disjoint_paths
from .presentation import Presentation, Query, max_index, period_lcm, window_margin


class NoStabilization(RuntimeError):
    pass


class MixedPeriods(NoStabilization):
    """A rule inside one end scales indices, so window widths mean nothing."""


@dataclass(frozen=True)
class RayReachGraph:
    nodes: tuple
    arcs: frozenset

    def successors(self, ray):
        return sorted(j for i, j in self.arcs if i == ray)


@dataclass(frozen=True)
class End:
    end_id: str
    rays: tuple
    has_in: bool
    has_out: bool
    width_out: int
    width_in: int


@dataclass(frozen=True)
class ClosedSet:
    vertices: frozenset
    ends: frozenset  # end ids

    def as_query(self, P: Presentation) -> Query:
        rep = {e.end_id: e.rays[0] for e in ends(P)}
        return Query(self.vertices, {rep[e] for e in self.ends})

    def __le__(self, other: "ClosedSet") -> bool:
        return self.vertices <= other.vertices and self.ends <= other.ends


def ray_reachability(P: Presentation) -> RayReachGraph:
    return RayReachGraph(P.ray_ids, frozenset((r.src, r.dst) for r in P.rules))


def strongly_connected_components(nodes, succ) -> list[list]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    index, low, on_stack = {}, {}, set()
    stack, comps = [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


@dataclass(frozen=True)
class EndStructure:
    ends: tuple
    end_of: dict
    reach: dict  # end id -> frozenset of end ids reachable (reflexive)
    ray_reach: dict  # ray -> frozenset of rays reachable (reflexive)


@lru_cache(maxsize=512)
def end_structure(P: Presentation) -> EndStructure:
    gamma = ray_reachability(P)
    succ = {r: gamma.successors(r) for r in P.ray_ids}
    comps = strongly_connected_components(P.ray_ids, lambda r: succ[r])
    order = {r: k for k, r in enumerate(P.ray_ids)}
    comps = sorted((sorted(c, key=order.get) for c in comps), key=lambda c: order[c[0]])
    end_of = {}
    for k, comp in enumerate(comps):
        for r in comp:
            end_of[r] = f"e{k}"
    for rule in P.rules:
        if end_of[rule.src] == end_of[rule.dst] and rule.sp != rule.dp:
            raise MixedPeriods(f"rule {rule.src}->{rule.dst} has periods {rule.sp} and {rule.dp} "
                               "inside one end; its width may be infinite")
    ray_reach = {}
    for r in P.ray_ids:
        seen, todo = {r}, [r]
        while todo:
            for j in succ[todo.pop()]:
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        ray_reach[r] = frozenset(seen)
    reach = {}
    for comp in comps:
        eid = end_of[comp[0]]
        reach[eid] = frozenset(end_of[j] for r in comp for j in ray_reach[r])
    built = []
    for k, comp in enumerate(comps):
        w_out = _window_width(P, tuple(comp), "out")
        w_in = _window_width(P, tuple(comp), "in")
        built.append(End(f"e{k}", tuple(comp), w_in >= 1, w_out >= 1, w_out, w_in))
    return EndStructure(tuple(built), end_of, reach, ray_reach)


def ends(P: Presentation) -> list[End]:
    return list(end_structure(P).ends)


def end_by_id(P: Presentation, end_id: str) -> End:
    for e in end_structure(P).ends:
        if e.end_id == end_id:
            return e
    raise KeyError(end_id)


def end_of(P: Presentation, ray: str) -> str:
    return end_structure(P).end_of[ray]


def _resolve(P: Presentation, end) -> str:
    """Accept an end id or a member ray name."""
    es = end_structure(P)
    if end in es.end_of:
        return es.end_of[end]
    if end in es.reach:
        return end
    raise KeyError(f"unknown end or ray {end!r}")


def end_leq(P: Presentation, e1, e2) -> bool:
    es = end_structure(P)
    return _resolve(P, e2) in es.reach[_resolve(P, e1)]


def query_ends(P: Presentation, X) -> frozenset:
    if isinstance(X, ClosedSet):
        return X.ends
    return frozenset(_resolve(P, r) for r in X.ends)


def dominating(P: Presentation, X, side: str) -> frozenset:
    """Core vertices that are X-in-dominating (side="in") or X-out-dominating."""
    es = end_structure(P)
    xs = query_ends(P, X)
    if side == "in":
        return frozenset(b.core for b in P.in_bundles if any(es.end_of[b.ray] in es.reach[a] for a in xs))
    if side == "out":
        return frozenset(b.core for b in P.out_bundles if any(a in es.reach[es.end_of[b.ray]] for a in xs))
    raise ValueError("side must be 'in' or 'out'")


def closure(P: Presentation, X, direction: str) -> ClosedSet:
    es = end_structure(P)
    xs = query_ends(P, X)
    if direction == "up":
        more = {w for a in xs for w in es.reach[a]}
        dom = dominating(P, X, "in")
    elif direction == "down":
        more = {w for w in es.reach for b in xs if b in es.reach[w]}
        dom = dominating(P, X, "out")
    else:
        raise ValueError("direction must be 'up' or 'down'")
    return ClosedSet(frozenset(X.vertices) | dom, frozenset(xs) | more)


def _window_width(P: Presentation, rays: tuple, direction: str, k_max: int | None = None) -> int:
    W = window_margin(P)
    lam = period_lcm(P)
    k_max = k_max or 64 * W
    K = 4 * W
    prev = None
    while K <= k_max:
        val = _window_flow(P, rays, direction, K, W)
        if val == prev:
            return val
        prev = val
        K += lam
    raise NoStabilization(f"width of {rays} did not stabilize up to window {k_max}")


def _window_flow(P: Presentation, rays: tuple, direction: str, K: int, W: int) -> int:
    base = max_index(P)
    members = set(rays)
    orient = P.orientation
    lo, hi = base + 1, base + K
    verts = {(r, t) for r in rays for t in range(lo, hi + 1)}
    arcs = set()
    for r in rays:
        for t in range(lo, hi):
            arcs.add(((r, t), (r, t + 1)) if orient[r] == "out" else ((r, t + 1), (r, t)))
    for rule in P.rules:
        if rule.src in members and rule.dst in members:
            for _, a, b in rule.instances(hi, hi):
                if a >= lo and b >= lo:
                    arcs.add(((rule.src, a), (rule.dst, b)))
    left = {(r, t) for r in rays for t in range(lo, lo + W)}
    right = {(r, t) for r in rays for t in range(hi - W + 1, hi + 1)}
    G = FiniteDigraph(verts, arcs)
    S, T = (left, right) if direction == "out" else (right, left)
    return max_vertex_disjoint_paths(G, S, T)[0]


def end_width(P: Presentation, end, direction: str) -> int:
    e = end_by_id(P, _resolve(P, end))
    if direction == "out":
        return e.width_out
    if direction == "in":
        return e.width_in
    raise ValueError("direction must be 'in' or 'out'")


def is_dispersed(P: Presentation, A, B) -> bool:
    es = end_structure(P)
    by_id = {e.end_id: e for e in es.ends}
    for a in query_ends(P, A):
        if not by_id[a].has_in:
            continue
        for b in query_ends(P, B):
            if by_id[b].has_out and b in es.reach[a]:
                return False
    return True
