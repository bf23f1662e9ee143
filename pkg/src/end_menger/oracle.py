"""Brute-force ground truth on truncations, random instances, counterexamples.

Everything here is computed without the engine: the digraph is unfolded by
its own loop, ends and widths come from networkx, and track families are
found by exhaustive search.  An end proxy is a vertex of the deep band
(the top ``band`` levels) on a ray of the end.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import networkx as nx

from .presentation import InBundle, OutBundle, Presentation, Query, Rule, validate


class Unstable(RuntimeError):
    pass


class LimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    depth: int = 12
    band: int = 3
    max_family: int = 6
    max_nodes: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.depth < 4 * self.band:
            raise ValueError("oracle depth must be at least four band widths")


def _lcm(P: Presentation) -> int:
    ps = [x for r in P.rules for x in (r.sp, r.dp)] + [b.p for b in P.out_bundles + P.in_bundles]
    return math.lcm(*ps) if ps else 1


def _explicit_max(P: Presentation, *queries) -> int:
    idx = [x for r in P.rules for x in (r.sr, r.dr)] + [b.r for b in P.out_bundles + P.in_bundles]
    pts = [v for a in P.arcs for v in a] + [v for q in queries for v in q.vertices]
    pts += [v for _, q in P.sets for v in q.vertices]
    idx += [v[1] for v in pts if isinstance(v, tuple)]
    return max(idx, default=0)


def unfold(P: Presentation, L: int) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(P.cores)
    orient = dict(P.rays)
    for ray in orient:
        G.add_nodes_from((ray, t) for t in range(1, L + 1))
        for t in range(1, L):
            if orient[ray] == "out":
                G.add_edge((ray, t), (ray, t + 1))
            else:
                G.add_edge((ray, t + 1), (ray, t))
    for r in P.rules:
        a, b = r.sr, r.dr
        while a <= L and b <= L:
            G.add_edge((r.src, a), (r.dst, b))
            a, b = a + r.sp, b + r.dp
    for b in P.out_bundles:
        for t in range(b.r, L + 1, b.p):
            G.add_edge(b.core, (b.ray, t))
    for b in P.in_bundles:
        for t in range(b.r, L + 1, b.p):
            G.add_edge((b.ray, t), b.core)
    fits = lambda v: not isinstance(v, tuple) or v[1] <= L
    G.add_edges_from((u, v) for u, v in P.arcs if fits(u) and fits(v))
    G.add_edges_from(P.core_arcs)
    return G


def split_flow_value(vertices, arcs, S, T, uncapped=()) -> int:
    """Vertex-disjoint S-T path count via max flow on the vertex-split digraph."""
    H = nx.DiGraph()
    big = len(vertices) + 1
    for v in vertices:
        H.add_edge(("i", v), ("o", v), capacity=big if v in uncapped else 1)
    for u, v in arcs:
        H.add_edge(("o", u), ("i", v), capacity=big)
    for s in S:
        H.add_edge("SRC", ("i", s), capacity=big)
    for t in T:
        H.add_edge(("o", t), "SNK", capacity=big)
    if "SRC" not in H or "SNK" not in H:
        return 0
    return int(nx.maximum_flow_value(H, "SRC", "SNK"))


@dataclass(frozen=True)
class OracleEnd:
    rays: frozenset
    width_in: int
    width_out: int


def oracle_ends(P: Presentation) -> list[OracleEnd]:
    return list(_oracle_ends(P))


@lru_cache(maxsize=256)
def _oracle_ends(P: Presentation) -> tuple:
    gamma = nx.DiGraph()
    gamma.add_nodes_from(r for r, _ in P.rays)
    gamma.add_edges_from((r.src, r.dst) for r in P.rules)
    out = []
    for comp in nx.strongly_connected_components(gamma):
        if any(r.src in comp and r.dst in comp and r.sp != r.dp for r in P.rules):
            raise Unstable(f"rays {sorted(comp)} are joined by rules of unequal periods")
        w_out, w_in = _stable_width(P, comp, "out"), _stable_width(P, comp, "in")
        out.append(OracleEnd(frozenset(comp), w_in, w_out))
    return tuple(sorted(out, key=lambda e: sorted(e.rays)))


def _stable_width(P, comp, direction) -> int:
    lam = _lcm(P)
    vals = [_window_width(P, comp, direction, K, 4 * lam) for K in (40 * lam, 40 * lam + lam, 80 * lam)]
    if len(set(vals)) != 1:
        raise Unstable(f"width of {sorted(comp)} varies with the window: {vals}")
    return vals[0]


def _window_width(P, comp, direction, K, band) -> int:
    base = _explicit_max(P)
    G = unfold(P, base + K).subgraph((r, t) for r in comp for t in range(base + 1, base + K + 1))
    left = [(r, t) for r in comp for t in range(base + 1, base + 1 + band)]
    right = [(r, t) for r in comp for t in range(base + K - band + 1, base + K + 1)]
    S, T = (left, right) if direction == "out" else (right, left)
    return split_flow_value(list(G.nodes), list(G.edges), S, T)


def _end_for(ends, ray):
    return next(e for e in ends if ray in e.rays)


def _gamma_reach(P):
    gamma = nx.DiGraph()
    gamma.add_nodes_from(r for r, _ in P.rays)
    gamma.add_edges_from((r.src, r.dst) for r in P.rules)
    return {r: nx.descendants(gamma, r) | {r} for r in gamma}


def oracle_is_dispersed(P: Presentation, A: Query, B: Query) -> bool:
    ends, reach = oracle_ends(P), _gamma_reach(P)
    for a in A.ends:
        if _end_for(ends, a).width_in < 1:
            continue
        for b in B.ends:
            if _end_for(ends, b).width_out >= 1 and b in reach[a]:
                return False
    return True


@dataclass
class _Proxy:
    G: nx.DiGraph
    starts: dict  # vertex -> list of labels ("v", v) or ("e", end index)
    stops: dict
    caps: dict  # label -> cap
    band: frozenset


def _proxy(P: Presentation, A: Query, B: Query, cfg: OracleConfig, L: int) -> _Proxy:
    if L - cfg.band < _explicit_max(P, A, B):
        raise ValueError("oracle band overlaps explicit indices; raise the depth")
    G = unfold(P, L)
    ends = oracle_ends(P)
    band = frozenset((r, t) for r, _ in P.rays for t in range(L - cfg.band + 1, L + 1))
    starts, stops, caps = {}, {}, {}
    for v in A.vertices:
        starts.setdefault(v, []).append(("v", v))
        caps[("v", v)] = 1
    for v in B.vertices:
        stops.setdefault(v, []).append(("w", v))
        caps[("w", v)] = 1
    for role, q, table, width in (("e", A, starts, "width_in"), ("f", B, stops, "width_out")):
        for k, e in enumerate(ends):
            if not (e.rays & q.ends) or getattr(e, width) < 1:
                continue
            caps[(role, k)] = getattr(e, width)
            for r in e.rays:
                for t in range(L - cfg.band + 1, L + 1):
                    table.setdefault((r, t), []).append((role, k))
    return _Proxy(G, starts, stops, caps, band)


def _proxy_paths(px: _Proxy, limit: int) -> list:
    """All induced proxy paths: (start label, vertices, stop label)."""
    succ = {v: set(px.G.successors(v)) for v in px.G.nodes}
    a_vertices = {v for v, labels in px.starts.items() if any(l[0] == "v" for l in labels)}
    out, budget = [], [limit]

    def emit(label, path):
        for stop in px.stops[path[-1]]:
            out.append((label, tuple(path), stop))
            budget[0] -= 1
        if budget[0] < 0:
            raise LimitExceeded("too many proxy paths")

    def extend(label, path, on_path):
        v = path[-1]
        for w in sorted(succ[v], key=repr):
            if w in on_path or w in a_vertices:
                continue
            if label[0] == "e" and label in px.starts.get(w, ()):
                continue
            if any(w in succ[x] for x in path[:-1]):
                continue  # a shortcut exists; the shorter path is listed instead
            budget[0] -= 1
            if budget[0] < 0:
                raise LimitExceeded("proxy path enumeration exceeded its budget")
            path.append(w)
            on_path.add(w)
            if w in px.stops:
                emit(label, path)
            else:
                extend(label, path, on_path)
            path.pop()
            on_path.discard(w)

    for v in sorted(px.starts, key=repr):
        for label in px.starts[v]:
            if v in px.stops:
                emit(label, [v])
            else:
                extend(label, [v], {v})
    return out


def _max_family(paths, caps, cfg: OracleConfig) -> int:
    index = {}
    masks = []
    for _, verts, _ in paths:
        m = 0
        for v in verts:
            m |= 1 << index.setdefault(v, len(index))
        masks.append(m)
    order = sorted(range(len(paths)), key=lambda i: bin(masks[i]).count("1"))
    best, nodes = [0], [0]

    def go(pos, used, load, size):
        nodes[0] += 1
        if nodes[0] > cfg.max_nodes:
            raise LimitExceeded("family search exceeded its node budget")
        best[0] = max(best[0], size)
        if size >= cfg.max_family:
            return
        room_a = sum(c - load.get(l, 0) for l, c in caps.items() if l[0] in "ve")
        room_b = sum(c - load.get(l, 0) for l, c in caps.items() if l[0] in "wf")
        if size + min(room_a, room_b) <= best[0]:
            return
        for j in range(pos, len(order)):
            i = order[j]
            s, _, t = paths[i]
            if masks[i] & used or load.get(s, 0) >= caps[s] or load.get(t, 0) >= caps[t]:
                continue
            load[s] = load.get(s, 0) + 1
            load[t] = load.get(t, 0) + 1
            go(j + 1, used | masks[i], load, size + 1)
            load[s] -= 1
            load[t] -= 1

    go(0, 0, {}, 0)
    if best[0] >= cfg.max_family:
        raise LimitExceeded("family size reached the configured maximum")
    return best[0]


def _tracks_at(P, A, B, cfg, L) -> int:
    px = _proxy(P, A, B, cfg, L)
    return _max_family(_proxy_paths(px, cfg.max_nodes), px.caps, cfg)


def _stable(P, fn, cfg):
    lam = _lcm(P)
    a, b = fn(cfg.depth), fn(cfg.depth + lam)
    if a != b:
        raise Unstable(f"oracle value {a} at depth {cfg.depth} but {b} at depth {cfg.depth + lam}")
    return a


def brute_force_tracks(P: Presentation, A: Query, B: Query, cfg: OracleConfig = OracleConfig()) -> int:
    return _stable(P, lambda L: _tracks_at(P, A, B, cfg, L), cfg)


def _some_path(G, starts, stops, removed):
    seen = {v for v in starts if v not in removed}
    parent = {v: None for v in seen}
    frontier = sorted(seen, key=repr)
    while frontier:
        nxt = []
        for v in frontier:
            if v in stops:
                path = [v]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            for w in sorted(G.successors(v), key=repr):
                if w not in seen and w not in removed:
                    seen.add(w)
                    parent[w] = v
                    nxt.append(w)
        frontier = nxt
    return None


def _separator_at(P, A, B, cfg, L) -> float:
    px = _proxy(P, A, B, cfg, L)
    starts, stops = set(px.starts), set(px.stops)
    nodes = [0]

    def hit(removed, k):
        nodes[0] += 1
        if nodes[0] > cfg.max_nodes:
            raise LimitExceeded("separator search exceeded its node budget")
        path = _some_path(px.G, starts, stops, removed)
        if path is None:
            return True
        if k == 0:
            return False
        return any(hit(removed | {v}, k - 1) for v in path if v not in px.band)

    for k in range(0, 2 * cfg.max_family + 1):
        if hit(frozenset(), k):
            return k
    path = _some_path(px.G, starts, stops, frozenset())
    if path is not None and all(v in px.band for v in path):
        return math.inf
    raise LimitExceeded("no separator within the configured size")


def brute_force_separator(P: Presentation, A: Query, B: Query, cfg: OracleConfig = OracleConfig()) -> float:
    return _stable(P, lambda L: _separator_at(P, A, B, cfg, L), cfg)


@dataclass(frozen=True)
class RandomParams:
    max_rays: int = 3
    max_cores: int = 3
    max_rules: int = 5
    periods: tuple = (1, 2)
    max_offset: int = 3
    slope_change: float = 0.1  # chance that a rule has different periods at its two sides
    p_out_ray: float = 0.7
    p_bundle: float = 0.35
    max_arcs: int = 2


def _random_vertex(rng, cores, rays, top):
    if cores and rng.random() < 0.3:
        return rng.choice(cores)
    return (rng.choice(rays), rng.randint(1, top))


def _random_query(rng, cores, rays, top):
    verts, ends = set(), set()
    for _ in range(rng.randint(0, 2)):
        verts.add(_random_vertex(rng, cores, rays, top))
    for _ in range(rng.randint(0, 2)):
        ends.add(rng.choice(rays))
    if not verts and not ends:
        ends.add(rng.choice(rays))
    return Query(verts, ends)


def _draw(rng: random.Random, params: RandomParams) -> Presentation:
    n_rays = rng.randint(1, params.max_rays)
    rays = [f"r{k}" for k in range(n_rays)]
    orient = [(r, "out" if rng.random() < params.p_out_ray else "in") for r in rays]
    cores = [f"c{k}" for k in range(rng.randint(0, params.max_cores))]
    rules = []
    for _ in range(rng.randint(0, params.max_rules)):
        src, dst = rng.choice(rays), rng.choice(rays)
        sp = rng.choice(params.periods)
        dp = rng.choice(params.periods) if rng.random() < params.slope_change else sp
        sr, dr = rng.randint(1, params.max_offset), rng.randint(1, params.max_offset)
        if src == dst and sp == dp and dr == sr:
            dr = sr + rng.randint(1, 2)
        rules.append(Rule(src, sp, sr, dst, dp, dr))
    out_b, in_b = [], []
    for c in cores:
        if rng.random() < params.p_bundle:
            out_b.append(OutBundle(c, rng.choice(rays), rng.choice(params.periods), rng.randint(1, params.max_offset)))
        if rng.random() < params.p_bundle:
            in_b.append(InBundle(rng.choice(rays), rng.choice(params.periods), rng.randint(1, params.max_offset), c))
    core_arcs = set()
    for _ in range(rng.randint(0, len(cores))):
        f, g = rng.choice(cores), rng.choice(cores)
        if f != g:
            core_arcs.add((f, g))
    top = params.max_offset + 1
    arcs = set()
    for _ in range(rng.randint(0, params.max_arcs)):
        u, v = _random_vertex(rng, cores, rays, top), _random_vertex(rng, cores, rays, top)
        if u != v and (isinstance(u, tuple) or isinstance(v, tuple)):
            arcs.add((u, v))
    sets = (("A", _random_query(rng, cores, rays, top)), ("B", _random_query(rng, cores, rays, top)))
    return Presentation(tuple(cores), tuple(core_arcs), tuple(orient), tuple(rules),
                        tuple(out_b), tuple(in_b), tuple(arcs), sets)


def random_instance(seed: int, params: RandomParams = RandomParams()) -> Presentation:
    """A valid presentation with query sets A and B, determined by ``seed``."""
    rng = random.Random(seed)
    while True:
        P = _draw(rng, params)
        if not validate(P):
            return P


def _variants(P: Presentation):
    """Presentations with one piece removed, smallest change first."""
    fields = ("arcs", "core_arcs", "out_bundles", "in_bundles", "rules")
    for name in fields:
        items = getattr(P, name)
        for k in range(len(items)):
            yield _replace(P, **{name: items[:k] + items[k + 1:]})
    for name, q in P.sets:
        for v in sorted(q.vertices, key=repr):
            yield P.with_sets(**{name: Query(q.vertices - {v}, q.ends)})
        for r in sorted(q.ends):
            yield P.with_sets(**{name: Query(q.vertices, q.ends - {r})})
    for c in P.cores:
        yield _drop_core(P, c)


def _replace(P: Presentation, **kw) -> Presentation:
    fields = dict(cores=P.cores, core_arcs=P.core_arcs, rays=P.rays, rules=P.rules,
                  out_bundles=P.out_bundles, in_bundles=P.in_bundles, arcs=P.arcs, sets=P.sets)
    fields.update(kw)
    return Presentation(**fields)


def _drop_core(P: Presentation, c: str) -> Presentation:
    keep = lambda v: v != c
    sets = tuple((n, Query({v for v in q.vertices if keep(v)}, q.ends)) for n, q in P.sets)
    return _replace(P, cores=tuple(x for x in P.cores if x != c),
                    core_arcs=tuple(a for a in P.core_arcs if c not in a),
                    out_bundles=tuple(b for b in P.out_bundles if b.core != c),
                    in_bundles=tuple(b for b in P.in_bundles if b.core != c),
                    arcs=tuple(a for a in P.arcs if c not in a), sets=sets)


def shrink(P: Presentation, still_failing) -> Presentation:
    """Greedy one-piece-at-a-time shrinking while ``still_failing`` holds."""
    changed = True
    while changed:
        changed = False
        for Q in _variants(P):
            if validate(Q):
                continue
            try:
                bad = still_failing(Q)
            except Exception:
                bad = False
            if bad:
                P, changed = Q, True
                break
    return P


def archive_counterexample(P: Presentation, engine_text: str, oracle_text: str,
                           root="counterexamples") -> Path:
    from .instance import serialize_instance
    text = serialize_instance(P)
    folder = Path(root) / hashlib.sha256(text.encode()).hexdigest()[:12]
    folder.mkdir(parents=True, exist_ok=True)
    (folder / "instance.txt").write_text(text, encoding="utf-8")
    (folder / "engine.txt").write_text(engine_text, encoding="utf-8")
    (folder / "oracle.txt").write_text(oracle_text, encoding="utf-8")
    return folder


DUALITY_PARAMS = RandomParams(max_rays=6, max_cores=6, max_rules=10)


def duality_instance(seed: int, params: RandomParams = DUALITY_PARAMS, tries: int = 50) -> Presentation:
    """A random instance whose query meets the duality hypotheses.

    Ends of A without in-rays and ends of B without out-rays are dropped;
    non-dispersed queries are redrawn.
    """
    for k in range(tries):
        P = random_instance(seed * 7919 + k, params)
        try:
            ends = oracle_ends(P)
        except Unstable:
            continue
        A, B = P.query("A"), P.query("B")
        A = Query(A.vertices, {r for r in A.ends if _end_for(ends, r).width_in >= 1})
        B = Query(B.vertices, {r for r in B.ends if _end_for(ends, r).width_out >= 1})
        if A.is_empty() or B.is_empty():
            continue
        P = P.with_sets(A=A, B=B)
        if oracle_is_dispersed(P, A, B):
            return P
    raise LimitExceeded(f"no instance meeting the hypotheses after {tries} draws")
