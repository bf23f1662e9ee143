"""Finitely presented infinite digraphs.

A presentation is a finite core, a list of rays (one-way infinite paths
indexed from 1), bi-periodic rules joining rays, bundles joining core
vertices to rays, and finitely many exceptional arcs.  Vertices are
written as a core name (``str``) or a ``(ray, index)`` tuple.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

from .flow import FiniteDigraph, order_key

VertexRef = Union[str, tuple]


class PresentationError(ValueError):
    pass


class LTooSmall(PresentationError):
    pass


class Rule(NamedTuple):
    """Arcs (src, sr + m*sp) -> (dst, dr + m*dp) for all m >= 0."""

    src: str
    sp: int
    sr: int
    dst: str
    dp: int
    dr: int

    def instances(self, limit_src: float, limit_dst: float):
        m = 0
        while True:
            a, b = self.sr + m * self.sp, self.dr + m * self.dp
            if a > limit_src or b > limit_dst:
                return
            yield m, a, b
            m += 1


class OutBundle(NamedTuple):
    """Arcs core -> (ray, r + m*p)."""

    core: str
    ray: str
    p: int
    r: int


class InBundle(NamedTuple):
    """Arcs (ray, r + m*p) -> core."""

    ray: str
    p: int
    r: int
    core: str


def is_ray_vertex(v) -> bool:
    return isinstance(v, tuple)


def vkey(v):
    return order_key(v)


@dataclass(frozen=True)
class Query:
    """A finite set of vertices and ends; ends are named by a member ray."""

    vertices: frozenset = frozenset()
    ends: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "ends", frozenset(self.ends))

    def __or__(self, other: "Query") -> "Query":
        return Query(self.vertices | other.vertices, self.ends | other.ends)

    def is_empty(self) -> bool:
        return not self.vertices and not self.ends


@dataclass(frozen=True)
class CofiniteVertexSet:
    """Finitely many vertices plus whole ray tails ``(ray, from_index)``."""

    finite: frozenset = frozenset()
    tails: frozenset = frozenset()

    def __post_init__(self):
        starts: dict[str, int] = {}
        for ray, s in self.tails:
            if s < 1:
                raise PresentationError("tail segments start at index >= 1")
            starts[ray] = min(s, starts.get(ray, s))
        finite = set(self.finite)
        for ray in starts:
            while (ray, starts[ray] - 1) in finite:
                finite.discard((ray, starts[ray] - 1))
                starts[ray] -= 1
        finite = {v for v in finite
                  if not (is_ray_vertex(v) and v[0] in starts and v[1] >= starts[v[0]])}
        object.__setattr__(self, "finite", frozenset(finite))
        object.__setattr__(self, "tails", frozenset(starts.items()))

    @classmethod
    def of(cls, vertices: Iterable = (), tails: Iterable = ()) -> "CofiniteVertexSet":
        return cls(frozenset(vertices), frozenset(tails))

    @property
    def tail_start(self) -> dict:
        return dict(self.tails)

    def __contains__(self, v) -> bool:
        if v in self.finite:
            return True
        if is_ray_vertex(v):
            s = self.tail_start.get(v[0])
            return s is not None and v[1] >= s
        return False

    def is_finite(self) -> bool:
        return not self.tails

    def __or__(self, other: "CofiniteVertexSet") -> "CofiniteVertexSet":
        return CofiniteVertexSet(self.finite | other.finite, self.tails | other.tails)

    def __le__(self, other: "CofiniteVertexSet") -> bool:
        mine, theirs = self.tail_start, other.tail_start
        if any(r not in theirs or theirs[r] > s for r, s in mine.items()):
            return False
        return all(v in other for v in self.finite)

    def max_index(self) -> int:
        idx = [v[1] for v in self.finite if is_ray_vertex(v)] + [s for _, s in self.tails]
        return max(idx, default=0)

    def __len__(self) -> int:
        if self.tails:
            raise PresentationError("infinite vertex set has no finite size")
        return len(self.finite)


def as_cofinite(S) -> CofiniteVertexSet:
    return S if isinstance(S, CofiniteVertexSet) else CofiniteVertexSet.of(S)


@dataclass(frozen=True)
class Presentation:
    cores: tuple = ()
    core_arcs: tuple = ()
    rays: tuple = ()  # (ray_id, "in" | "out") in declaration order
    rules: tuple = ()
    out_bundles: tuple = ()
    in_bundles: tuple = ()
    arcs: tuple = ()
    sets: tuple = ()  # (name, Query), sorted by name

    def __post_init__(self):
        norm = lambda xs, key=vkey: tuple(sorted(set(xs), key=key))
        object.__setattr__(self, "cores", norm(self.cores))
        object.__setattr__(self, "core_arcs", norm(self.core_arcs))
        object.__setattr__(self, "rays", tuple(self.rays))
        object.__setattr__(self, "rules", norm(Rule(*r) for r in self.rules))
        object.__setattr__(self, "out_bundles", norm(OutBundle(*b) for b in self.out_bundles))
        object.__setattr__(self, "in_bundles", norm(InBundle(*b) for b in self.in_bundles))
        object.__setattr__(self, "arcs", norm(self.arcs))
        object.__setattr__(self, "sets", tuple(sorted(dict(self.sets).items())))

    @property
    def ray_ids(self) -> tuple:
        return tuple(r for r, _ in self.rays)

    @property
    def orientation(self) -> dict:
        return dict(self.rays)

    def query(self, name: str) -> Query:
        try:
            return dict(self.sets)[name]
        except KeyError:
            raise PresentationError(f"unknown set {name!r}") from None

    def with_sets(self, **named: Query) -> "Presentation":
        sets = dict(self.sets)
        sets.update(named)
        return Presentation(self.cores, self.core_arcs, self.rays, self.rules,
                            self.out_bundles, self.in_bundles, self.arcs, tuple(sets.items()))


def period_lcm(P: Presentation) -> int:
    periods = [r.sp for r in P.rules] + [r.dp for r in P.rules]
    periods += [b.p for b in P.out_bundles] + [b.p for b in P.in_bundles]
    return math.lcm(*periods) if periods else 1


def window_margin(P: Presentation) -> int:
    return period_lcm(P) * (len(P.rays) + len(P.cores) + 2)


def _refs(P: Presentation):
    for u, v in P.arcs:
        yield u
        yield v
    for _, q in P.sets:
        yield from q.vertices


def max_index(P: Presentation, *extra) -> int:
    idx = [r.sr for r in P.rules] + [r.dr for r in P.rules]
    idx += [b.r for b in P.out_bundles] + [b.r for b in P.in_bundles]
    idx += [v[1] for v in _refs(P) if is_ray_vertex(v)]
    for q in extra:
        if isinstance(q, Query):
            idx += [v[1] for v in q.vertices if is_ray_vertex(v)]
        elif isinstance(q, CofiniteVertexSet):
            idx.append(q.max_index())
        else:
            idx += [v[1] for v in q if is_ray_vertex(v)]
    return max(idx, default=0)


def instantiate(P: Presentation, L: int) -> list:
    """All arcs of D(P) whose endpoints have index <= L (with multiplicity)."""
    arcs = []
    for ray, orient in P.rays:
        for t in range(1, L):
            a, b = (ray, t), (ray, t + 1)
            arcs.append((a, b) if orient == "out" else (b, a))
    for rule in P.rules:
        for _, a, b in rule.instances(L, L):
            arcs.append(((rule.src, a), (rule.dst, b)))
    for b in P.out_bundles:
        arcs += [(b.core, (b.ray, t)) for t in range(b.r, L + 1, b.p)]
    for b in P.in_bundles:
        arcs += [((b.ray, t), b.core) for t in range(b.r, L + 1, b.p)]
    within = lambda v: not is_ray_vertex(v) or v[1] <= L
    arcs += [(u, v) for u, v in P.arcs if within(u) and within(v)]
    arcs += list(P.core_arcs)
    return arcs


def validate(P: Presentation) -> list[str]:
    """Diagnostics for every violated invariant; empty when P is valid."""
    diags = []
    rays = [r for r, _ in P.rays]
    if len(set(rays)) != len(rays):
        diags.append("duplicate ray id")
    for r, orient in P.rays:
        if orient not in ("in", "out"):
            diags.append(f"ray {r}: orientation must be in/out")
    ray_set, core_set = set(rays), set(P.cores)

    def check_vertex(v, where):
        if is_ray_vertex(v):
            if v[0] not in ray_set:
                diags.append(f"{where}: unknown ray {v[0]!r}")
            elif v[1] < 1:
                diags.append(f"{where}: index must be >= 1")
        elif v not in core_set:
            diags.append(f"{where}: unknown core {v!r}")

    for f, g in P.core_arcs:
        check_vertex(f, "corearc")
        check_vertex(g, "corearc")
        if f == g:
            diags.append(f"corearc {f}: self-loop")
    for rule in P.rules:
        for ray in (rule.src, rule.dst):
            if ray not in ray_set:
                diags.append(f"rule {rule.src}->{rule.dst}: unknown ray {ray!r}")
        if min(rule.sp, rule.dp) < 1 or min(rule.sr, rule.dr) < 1:
            diags.append(f"rule {rule.src}->{rule.dst}: periods and offsets must be >= 1")
        elif rule.src == rule.dst:
            num, den = rule.sr - rule.dr, rule.dp - rule.sp
            if (den == 0 and num == 0) or (den != 0 and num % den == 0 and num // den >= 0):
                diags.append(f"rule {rule.src}->{rule.dst}: self-loop instance")
    for b in P.out_bundles:
        if b.ray not in ray_set:
            diags.append(f"bundle {b.core}->{b.ray}: unknown ray {b.ray!r}")
        if b.core not in core_set:
            diags.append(f"bundle {b.core}->{b.ray}: unknown core {b.core!r}")
        if b.p < 1 or b.r < 1:
            diags.append(f"bundle {b.core}->{b.ray}: period and offset must be >= 1")
    for b in P.in_bundles:
        if b.ray not in ray_set:
            diags.append(f"bundle {b.ray}->{b.core}: unknown ray {b.ray!r}")
        if b.core not in core_set:
            diags.append(f"bundle {b.ray}->{b.core}: unknown core {b.core!r}")
        if b.p < 1 or b.r < 1:
            diags.append(f"bundle {b.ray}->{b.core}: period and offset must be >= 1")
    for u, v in P.arcs:
        check_vertex(u, "arc")
        check_vertex(v, "arc")
        if u == v:
            diags.append(f"arc {u}: self-loop")
    for name, q in P.sets:
        for v in q.vertices:
            check_vertex(v, f"set {name}")
        for r in q.ends:
            if r not in ray_set:
                diags.append(f"set {name}: unknown ray {r!r}")
    if diags:
        return diags
    L = 2 * (max_index(P) + period_lcm(P)) + 8
    seen = set()
    for a in instantiate(P, L):
        if a in seen:
            diags.append(f"duplicate arc {a[0]}->{a[1]}")
            break
        seen.add(a)
    return diags


def truncate(P: Presentation, L: int):
    """Finite digraph on the core and ray vertices of index <= L, with deep bands."""
    if L < max(1, max_index(P)):
        raise LTooSmall(f"depth {L} is below the largest explicit index {max_index(P)}")
    W = window_margin(P)
    vertices = list(P.cores) + [(r, t) for r in P.ray_ids for t in range(1, L + 1)]
    G = FiniteDigraph(frozenset(vertices), frozenset(instantiate(P, L)))
    lo = max(L - W, 0)
    bands = {r: tuple((r, t) for t in range(lo + 1, L + 1)) for r in P.ray_ids}
    return G, bands


def reverse(P: Presentation) -> Presentation:
    flip = {"in": "out", "out": "in"}
    return Presentation(
        cores=P.cores,
        core_arcs=tuple((g, f) for f, g in P.core_arcs),
        rays=tuple((r, flip[o]) for r, o in P.rays),
        rules=tuple(Rule(r.dst, r.dp, r.dr, r.src, r.sp, r.sr) for r in P.rules),
        out_bundles=tuple(OutBundle(b.core, b.ray, b.p, b.r) for b in P.in_bundles),
        in_bundles=tuple(InBundle(b.ray, b.p, b.r, b.core) for b in P.out_bundles),
        arcs=tuple((v, u) for u, v in P.arcs),
        sets=P.sets,
    )


@dataclass(frozen=True)
class Deletion:
    """Result of deleting vertices: the new presentation and the vertex maps."""

    presentation: Presentation
    ray_map: dict = field(compare=False)   # old ray -> surviving ray id or None
    _plan: dict = field(compare=False, repr=False, default_factory=dict)
    _stub: dict = field(compare=False, repr=False, default_factory=dict)
    _deleted: object = field(compare=False, repr=False, default=None)

    def forward(self, v):
        """Image of a vertex of D(P) in D(P'), or None if it was deleted."""
        if v in self._deleted:
            return None
        if not is_ray_vertex(v):
            return v
        ray, t = v
        kind, bound = self._plan[ray]
        if t < bound or (kind == "cut" and t >= bound):
            return self._stub.get(v)
        return (ray, t - bound)

    def backward(self, w):
        if is_ray_vertex(w):
            ray, t = w
            return (ray, t + self._plan[ray][1])
        return self._inverse_stub.get(w, w)

    @property
    def _inverse_stub(self):
        return {name: v for v, name in self._stub.items()}

    def map_query(self, q: Query) -> Query:
        verts = {self.forward(v) for v in q.vertices} - {None}
        ends = {self.ray_map[r] for r in q.ends} - {None}
        return Query(verts, ends)


def delete_vertices(P: Presentation, S) -> Deletion:
    """D(P) - S for a finite set or a CofiniteVertexSet S."""
    S = as_cofinite(S)
    cuts = S.tail_start
    plan = {}
    for ray in P.ray_ids:
        if ray in cuts:
            plan[ray] = ("cut", cuts[ray])
        else:
            h = max((v[1] for v in S.finite if is_ray_vertex(v) and v[0] == ray), default=0)
            plan[ray] = ("shift", h)
    taken = set(P.cores)
    stub = {}
    for ray in P.ray_ids:
        for t in range(1, plan[ray][1]):
            if (ray, t) not in S:
                name = f"{ray}@{t}"
                while name in taken:
                    name += "@"
                taken.add(name)
                stub[(ray, t)] = name
    deletion = Deletion(Presentation(), {}, plan, stub, S)
    fwd = deletion.forward

    def high_from(ray, r, p):
        """First m with (ray, r + m p) on the surviving re-indexed tail, else None."""
        kind, bound = plan[ray]
        if kind == "cut":
            return None
        return 0 if r > bound else (bound - r) // p + 1

    def low_limit(ray, r, p, m_high):
        kind, bound = plan[ray]
        if kind == "cut":
            return 0 if r >= bound else (bound - 1 - r) // p + 1
        return m_high

    explicit = []
    new_rules, new_out, new_in = [], [], []
    for ray, orient in P.rays:
        bound = plan[ray][1]
        for t in range(1, bound):
            a, b = (ray, t), (ray, t + 1)
            explicit.append((a, b) if orient == "out" else (b, a))
    for rule in P.rules:
        ms = high_from(rule.src, rule.sr, rule.sp)
        md = high_from(rule.dst, rule.dr, rule.dp)
        if ms is not None and md is not None:
            m0 = max(ms, md)
            new_rules.append(Rule(rule.src, rule.sp, rule.sr + m0 * rule.sp - plan[rule.src][1],
                                  rule.dst, rule.dp, rule.dr + m0 * rule.dp - plan[rule.dst][1]))
            limit = m0
        else:
            limit = min(low_limit(ray, r, p, None)
                        for ray, r, p in ((rule.src, rule.sr, rule.sp), (rule.dst, rule.dr, rule.dp))
                        if plan[ray][0] == "cut")
        for m in range(limit):
            explicit.append(((rule.src, rule.sr + m * rule.sp), (rule.dst, rule.dr + m * rule.dp)))
    for b in P.out_bundles:
        m0 = high_from(b.ray, b.r, b.p)
        if m0 is not None:
            new_out.append(OutBundle(b.core, b.ray, b.p, b.r + m0 * b.p - plan[b.ray][1]))
        for m in range(low_limit(b.ray, b.r, b.p, m0)):
            explicit.append((b.core, (b.ray, b.r + m * b.p)))
    for b in P.in_bundles:
        m0 = high_from(b.ray, b.r, b.p)
        if m0 is not None:
            new_in.append(InBundle(b.ray, b.p, b.r + m0 * b.p - plan[b.ray][1], b.core))
        for m in range(low_limit(b.ray, b.r, b.p, m0)):
            explicit.append(((b.ray, b.r + m * b.p), b.core))
    explicit += list(P.arcs) + list(P.core_arcs)

    core_arcs, arcs = [], []
    for u, v in explicit:
        fu, fv = fwd(u), fwd(v)
        if fu is None or fv is None:
            continue
        (arcs if is_ray_vertex(fu) or is_ray_vertex(fv) else core_arcs).append((fu, fv))
    alive_rays = tuple((r, o) for r, o in P.rays if plan[r][0] == "shift")
    alive = {r for r, _ in alive_rays}
    new_out = [b for b in new_out if b.core not in S]
    new_in = [b for b in new_in if b.core not in S]
    cores = [c for c in P.cores if c not in S] + list(stub.values())
    ray_map = {r: (r if r in alive else None) for r in P.ray_ids}
    sets = tuple((name, Query({fwd(v) for v in q.vertices} - {None}, {r for r in q.ends if r in alive}))
                 for name, q in P.sets)
    presentation = Presentation(tuple(cores), tuple(core_arcs), alive_rays, tuple(new_rules),
                                tuple(new_out), tuple(new_in), tuple(arcs), sets)
    return Deletion(presentation, ray_map, plan, stub, S)
