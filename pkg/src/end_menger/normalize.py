"""Making a presentation outer locally finite.

A core vertex y with core-to-ray bundles has infinite out-degree.  It gets
a fresh out-ray T_y entered by the single arc y -> (T_y, 1); the k-th of
its n bundles (y, j, p, r) is then carried by the rule
(T_y, n, k) -> (j, p, r), so the tails of those arcs move to distinct
vertices of T_y.  Tracks ending in y correspond to tracks into the end of
T_y.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .ends import end_structure
from .presentation import Presentation, Query, Rule


@dataclass(frozen=True)
class Normalization:
    presentation: Presentation
    fresh: dict = field(compare=False)  # y -> ray id of T_y
    end_map: dict = field(compare=False)  # old end id -> new end id
    vertex_map: dict = field(compare=False)  # old core -> itself (ray vertices keep names)

    def map_query(self, q: Query, sink_side: bool = False) -> Query:
        """Rename into the normalized presentation.

        On the sink side, every y in Y is replaced by the end of T_y.
        """
        if not sink_side:
            return q
        verts = {v for v in q.vertices if v not in self.fresh}
        ends = set(q.ends) | {self.fresh[v] for v in q.vertices if v in self.fresh}
        return Query(verts, ends)


def _fresh_name(y: str, taken: set) -> str:
    name = f"T_{y}"
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def normalize_outer_locally_finite(P: Presentation, Y=None) -> Normalization:
    heads = sorted({b.core for b in P.out_bundles})
    Y = sorted(set(heads) | set(Y or ()))
    if not Y:
        return Normalization(P, {}, {e.end_id: e.end_id for e in end_structure(P).ends}, {})
    taken = set(P.ray_ids) | set(P.cores)
    fresh = {y: _fresh_name(y, taken) for y in Y}
    rays = list(P.rays) + [(fresh[y], "out") for y in Y]
    rules = list(P.rules)
    arcs = list(P.arcs) + [(y, (fresh[y], 1)) for y in Y]
    for y in Y:
        mine = [b for b in P.out_bundles if b.core == y]
        n = len(mine)
        for k, b in enumerate(mine, start=1):
            rules.append(Rule(fresh[y], n, k, b.ray, b.p, b.r))
    kept = tuple(b for b in P.out_bundles if b.core not in fresh)
    P2 = Presentation(P.cores, P.core_arcs, tuple(rays), tuple(rules), kept,
                      P.in_bundles, tuple(arcs), P.sets)
    old, new = end_structure(P), end_structure(P2)
    end_map = {e.end_id: new.end_of[e.rays[0]] for e in old.ends}
    return Normalization(P2, fresh, end_map, {c: c for c in P.cores})
