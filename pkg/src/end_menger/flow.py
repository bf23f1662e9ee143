"""Vertex-capacitated disjoint paths on finite digraphs.

Augmentation is done with alternating walks: walks that run forward along
arcs outside the current path family and backward along arcs inside it.
A breadth-first search over such walks either reaches the sink set, in
which case the family is rerouted along the symmetric difference, or it
saturates, in which case the last reached vertex of every path is a cut.

Capacities are 1 or unbounded.  Unbounded vertices may be shared by
several paths; no arc may join two unbounded vertices, which keeps every
arc flow at most 1 and makes vertex cuts and path counts agree.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable


class FlowError(Exception):
    pass


class NoFiniteCut(FlowError):
    """Every separating set would have to use an unbounded vertex."""


class MalformedWalk(FlowError):
    pass


def order_key(x):
    """Total order over the node ids used in this package (ints, strs, tuples)."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(order_key(y) for y in x))
    return (3, repr(x))


@dataclass(frozen=True)
class FiniteDigraph:
    vertices: frozenset
    arcs: frozenset
    unbounded: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "arcs", frozenset(self.arcs))
        object.__setattr__(self, "unbounded", frozenset(self.unbounded))
        for u, v in self.arcs:
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"arc {u!r}->{v!r} references a missing vertex")
            if u in self.unbounded and v in self.unbounded:
                raise ValueError(f"arc {u!r}->{v!r} joins two unbounded vertices")
        if not self.unbounded <= self.vertices:
            raise ValueError("capacity given for unknown vertices")

    def capacity(self, v) -> float:
        return math.inf if v in self.unbounded else 1

    @cached_property
    def succ(self) -> dict:
        out = {v: [] for v in self.vertices}
        for u, v in self.arcs:
            out[u].append(v)
        return {v: sorted(ws, key=order_key) for v, ws in out.items()}

    @cached_property
    def pred(self) -> dict:
        inn = {v: [] for v in self.vertices}
        for u, v in self.arcs:
            inn[v].append(u)
        return {v: sorted(ws, key=order_key) for v, ws in inn.items()}

    @property
    def outer_locally_finite(self) -> bool:
        # finite digraphs always are; kept so callers can assert it uniformly
        return all(len(ws) < math.inf for ws in self.succ.values())

    def without(self, removed: Iterable) -> "FiniteDigraph":
        removed = set(removed)
        return FiniteDigraph(
            self.vertices - removed,
            frozenset(a for a in self.arcs if a[0] not in removed and a[1] not in removed),
            self.unbounded - removed,
        )

    def has_path(self, sources: Iterable, targets: Iterable) -> bool:
        targets = set(targets)
        seen = set(s for s in sources if s in self.vertices)
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            if v in targets:
                return True
            for w in self.succ[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return False


@dataclass(frozen=True)
class PathFamily:
    paths: tuple = ()

    def __len__(self) -> int:
        return len(self.paths)

    def vertices(self) -> set:
        return {v for p in self.paths for v in p}

    def arcs(self) -> set:
        return {(p[i], p[i + 1]) for p in self.paths for i in range(len(p) - 1)}

    def check(self, G: FiniteDigraph, S, T) -> None:
        """Raise ValueError unless this is a capacity-respecting S-T path family."""
        used: dict[Hashable, int] = {}
        for p in self.paths:
            if not p or p[0] not in S or p[-1] not in T:
                raise ValueError(f"path {p!r} does not run from S to T")
            if len(set(p)) != len(p):
                raise ValueError(f"path {p!r} repeats a vertex")
            for a in zip(p, p[1:]):
                if a not in G.arcs:
                    raise ValueError(f"path {p!r} uses missing arc {a!r}")
            for v in p:
                used[v] = used.get(v, 0) + 1
        for v, n in used.items():
            if n > G.capacity(v):
                raise ValueError(f"vertex {v!r} used by {n} paths")


@dataclass(frozen=True)
class AlternatingWalk:
    """x0 e1 x1 ... en xn; ``in_family[i]`` marks whether arc i is a family arc.

    Family arcs are traversed backward, all other arcs forward.
    """

    vertices: tuple
    arcs: tuple = ()
    in_family: tuple = ()


@dataclass
class SearchForest:
    """Forest of alternating walks rooted at the unused sources.

    Forest nodes are residual states ``(v, side)`` with side in
    ``{"in", "out", "u"}`` ("u" for unbounded vertices).  ``f`` maps a
    forest node to its digraph vertex, ``g`` maps the edge into a forest
    node to ``(arc, in_family)``.
    """

    roots: list = field(default_factory=list)
    parent: dict = field(default_factory=dict)
    g: dict = field(default_factory=dict)

    def f(self, node):
        return node[0]

    def nodes(self):
        return list(self.parent)

    def rooted_walk(self, node) -> AlternatingWalk:
        chain = []
        while node is not None:
            chain.append(node)
            node = self.parent[node]
        chain.reverse()
        verts = [chain[0][0]]
        arcs, flags = [], []
        for node in chain[1:]:
            edge = self.g.get(node)
            if edge is None:
                continue  # in/out split of one vertex
            arc, fam = edge
            arcs.append(arc)
            flags.append(fam)
            verts.append(node[0])
        return AlternatingWalk(tuple(verts), tuple(arcs), tuple(flags))

    def image_vertices(self) -> set:
        return {n[0] for n in self.parent}


@dataclass(frozen=True)
class CutCertificate:
    cut: frozenset
    forest: SearchForest = field(compare=False, repr=False)


def _family_index(family: PathFamily):
    on_path = {}
    fam_pred = {}
    fam_arcs = set()
    for idx, p in enumerate(family.paths):
        for v in p:
            on_path.setdefault(v, idx)
        for u, v in zip(p, p[1:]):
            fam_arcs.add((u, v))
            fam_pred.setdefault(v, []).append(u)
    return on_path, fam_pred, fam_arcs


def _check_subsets(G, S, T):
    if not set(S) <= G.vertices or not set(T) <= G.vertices:
        raise ValueError("source and sink sets must be vertex subsets")
    for v in set(S) & set(T):
        if v in G.unbounded:
            raise NoFiniteCut(f"unbounded vertex {v!r} is both source and sink")


def _grow_forest(G: FiniteDigraph, family: PathFamily, S, T):
    """Breadth-first growth of the search forest; stops at the first sink hit."""
    S, T = set(S), set(T)
    on_path, fam_pred, fam_arcs = _family_index(family)
    ends = {p[-1] for p in family.paths}
    forest = SearchForest()

    def start_state(v):
        return (v, "u") if v in G.unbounded else (v, "in")

    queue = deque()
    for s in sorted(S, key=order_key):
        if s in on_path and s not in G.unbounded:
            continue
        node = start_state(s)
        if node not in forest.parent:
            forest.roots.append(node)
            forest.parent[node] = None
            queue.append(node)

    def push(node, prev, edge):
        if node in forest.parent:
            return False
        forest.parent[node] = prev
        if edge is not None:
            forest.g[node] = edge
        queue.append(node)
        return True

    def is_exit(node):
        v, side = node
        if v not in T:
            return False
        if side == "u":
            return True
        return side == "out" and v not in ends

    while queue:
        node = queue.popleft()
        v, side = node
        if is_exit(node):
            return forest, node
        if side == "in":
            if v not in on_path:
                push((v, "out"), node, None)
            else:
                for w in sorted(fam_pred.get(v, ()), key=order_key):
                    push(start_state(w) if w in G.unbounded else (w, "out"), node, ((w, v), True))
            continue
        # side is "out" or "u": forward along non-family arcs
        for x in G.succ[v]:
            if (v, x) not in fam_arcs:
                push(start_state(x), node, ((v, x), False))
        if side == "out" and v in on_path:
            push((v, "in"), node, None)
        if side == "u":
            for w in sorted(fam_pred.get(v, ()), key=order_key):
                push((w, "out"), node, ((w, v), True))
    return forest, None


def alternating_augment(G: FiniteDigraph, family: PathFamily, S, T):
    """Return an alternating walk to T, or the cut certificate of a saturated forest."""
    _check_subsets(G, S, T)
    forest, hit = _grow_forest(G, family, S, T)
    if hit is not None:
        return forest.rooted_walk(hit)
    reached = set(forest.parent)
    for s in S:
        if s not in G.unbounded:
            reached.add((s, "in"))
    # a saturated arc leaving a reached unbounded vertex is cut at its head
    for p in family.paths:
        for v, x in zip(p, p[1:]):
            if v in G.unbounded and (v, "u") in reached:
                reached.add((x, "in"))
    cut = set()
    for p in family.paths:
        u_R = None
        for v in p:
            if v in G.unbounded:
                continue
            if (v, "in") in reached and (v, "out") not in reached:
                u_R = v
        if u_R is None:
            raise NoFiniteCut(f"path {p!r} has no bounded cut vertex")
        cut.add(u_R)
    if len(cut) != len(family):
        raise FlowError("saturated forest did not yield one cut vertex per path")
    return CutCertificate(frozenset(cut), forest)


def check_walk(family: PathFamily, walk: AlternatingWalk, S, unbounded=frozenset()) -> None:
    """Raise MalformedWalk unless ``walk`` obeys conditions (i)-(iv) w.r.t. ``family``."""
    on_path, _, fam_arcs = _family_index(family)
    fam_verts = set(on_path) - set(unbounded)
    xs, es, flags = walk.vertices, walk.arcs, walk.in_family
    if len(xs) != len(es) + 1 or len(es) != len(flags):
        raise MalformedWalk("vertex/arc sequence lengths disagree")
    if xs[0] not in S or xs[0] in fam_verts:
        raise MalformedWalk("walk must start in S outside the family")
    if len(set(es)) != len(es):
        raise MalformedWalk("walk repeats an arc")
    for i, (e, fam) in enumerate(zip(es, flags), start=1):
        if fam != (e in fam_arcs):
            raise MalformedWalk(f"membership flag wrong for arc {e!r}")
        tail, head = e
        if fam and (head, tail) != (xs[i - 1], xs[i]):
            raise MalformedWalk(f"family arc {e!r} must be traversed backward")
        if not fam and (tail, head) != (xs[i - 1], xs[i]):
            raise MalformedWalk(f"arc {e!r} must be traversed forward")
    seen = {}
    for i, x in enumerate(xs):
        if x in seen and x not in fam_verts and x not in unbounded:
            raise MalformedWalk(f"vertex {x!r} repeated off the family")
        seen[x] = i
    n = len(es)
    for i in range(n):
        x = xs[i]
        if x in fam_verts:
            around = [flags[j] for j in (i - 1, i) if 0 <= j < n]
            if not any(around):
                raise MalformedWalk(f"family vertex {x!r} entered and left off the family")


def _trim(path, S, T):
    start = max(i for i, v in enumerate(path) if v in S)
    path = path[start:]
    stop = min(i for i, v in enumerate(path) if v in T)
    return tuple(path[: stop + 1])


def reroute_by_symmetric_difference(family: PathFamily, walk: AlternatingWalk, S, T,
                                    unbounded=frozenset()) -> PathFamily:
    """Combine ``family`` and an alternating walk reaching T into |family|+1 paths."""
    S, T = set(S), set(T)
    check_walk(family, walk, S, unbounded)
    if walk.vertices[-1] not in T:
        raise MalformedWalk("walk does not reach the sink set")
    walk_back = {e for e, fam in zip(walk.arcs, walk.in_family) if fam}
    walk_fwd = {e for e, fam in zip(walk.arcs, walk.in_family) if not fam}
    H = (family.arcs() - walk_back) | walk_fwd
    out = {}
    for u, v in sorted(H, key=order_key):
        out.setdefault(u, []).append(v)
    starts = [p[0] for p in family.paths] + [walk.vertices[0]]
    trivial = {p[0] for p in family.paths if len(p) == 1}
    paths = []
    for s in starts:
        if s in trivial:
            paths.append((s,))
            continue
        path = [s]
        v = s
        while v not in T:
            if not out.get(v):
                raise MalformedWalk(f"rerouted path from {s!r} does not end in T")
            v = out[v].pop(0)
            path.append(v)
        paths.append(_trim(tuple(path), S, T))
    result = PathFamily(tuple(paths))
    if len(result) != len(family) + 1:
        raise MalformedWalk("rerouting did not add exactly one path")
    seen = {}
    for p in result.paths:
        for v in p:
            if v in seen and v not in unbounded:
                raise MalformedWalk(f"rerouted paths meet at {v!r}")
            seen[v] = True
    return result


def saturate(G: FiniteDigraph, S, T, family: PathFamily | None = None):
    """Augment until the forest saturates; return (family, certificate)."""
    family = family or PathFamily()
    while True:
        res = alternating_augment(G, family, S, T)
        if isinstance(res, CutCertificate):
            return family, res
        family = reroute_by_symmetric_difference(family, res, S, T, G.unbounded)


def max_vertex_disjoint_paths(G: FiniteDigraph, S, T):
    family, _ = saturate(G, S, T)
    return len(family), family


def min_vertex_cut(G: FiniteDigraph, S, T) -> frozenset:
    _, cert = saturate(G, S, T)
    return cert.cut
