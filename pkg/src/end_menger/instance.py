"""Line-oriented instance format and DOT export.

    core f
    corearc f g
    ray b out
    rule b 1 1 -> u 1 1
    bundle f -> u 1 1
    bundle b 1 1 -> f
    arc (b,3) -> f
    set A v:(b,1) end:u
    # comment
"""
from __future__ import annotations

import re
from pathlib import Path

from .presentation import (InBundle, OutBundle, Presentation, Query, Rule, is_ray_vertex,
                           truncate, vkey)


class InstanceSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_NAME = r"[A-Za-z_][\w@.'\-]*"
_RAYV = re.compile(rf"\(\s*({_NAME})\s*,\s*(\d+)\s*\)$")
_CORE = re.compile(rf"({_NAME})$")


def parse_vertex(tok: str, line: int = 0):
    m = _RAYV.match(tok)
    if m:
        return (m.group(1), int(m.group(2)))
    if _CORE.match(tok):
        return tok
    raise InstanceSyntaxError(line, f"bad vertex {tok!r}")


def parse_element(tok: str, line: int = 0) -> Query:
    if tok.startswith("v:"):
        return Query({parse_vertex(tok[2:], line)})
    if tok.startswith("end:") and _CORE.match(tok[4:]):
        return Query(ends={tok[4:]})
    raise InstanceSyntaxError(line, f"bad set element {tok!r} (use v:... or end:...)")


def parse_query(text: str, line: int = 0) -> Query:
    q = Query()
    for tok in _tokens(text):
        q = q | parse_element(tok, line)
    return q


def _tokens(text: str) -> list[str]:
    # keep "(b, 3)" together even when written with spaces
    return re.findall(r"(?:v:)?\([^)]*\)|\S+", text)


def _int(tok: str, line: int) -> int:
    if not tok.isdigit():
        raise InstanceSyntaxError(line, f"expected a positive integer, got {tok!r}")
    return int(tok)


def parse_instance(text: str) -> Presentation:
    cores, core_arcs, rays, rules, outb, inb, arcs, sets = [], [], [], [], [], [], [], {}
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        toks = _tokens(body)
        kw, args = toks[0], toks[1:]
        if kw == "core" and len(args) == 1:
            cores.append(parse_vertex(args[0], no))
        elif kw == "corearc" and len(args) == 2:
            core_arcs.append((parse_vertex(args[0], no), parse_vertex(args[1], no)))
        elif kw == "ray" and len(args) == 2 and args[1] in ("in", "out"):
            rays.append((args[0], args[1]))
        elif kw == "rule" and len(args) == 7 and args[3] == "->":
            rules.append(Rule(args[0], _int(args[1], no), _int(args[2], no),
                              args[4], _int(args[5], no), _int(args[6], no)))
        elif kw == "bundle" and len(args) == 5 and args[1] == "->":
            outb.append(OutBundle(args[0], args[2], _int(args[3], no), _int(args[4], no)))
        elif kw == "bundle" and len(args) == 5 and args[3] == "->":
            inb.append(InBundle(args[0], _int(args[1], no), _int(args[2], no), args[4]))
        elif kw == "arc" and len(args) == 3 and args[1] == "->":
            arcs.append((parse_vertex(args[0], no), parse_vertex(args[2], no)))
        elif kw == "set" and args:
            q = sets.get(args[0], Query())
            for tok in args[1:]:
                q = q | parse_element(tok, no)
            sets[args[0]] = q
        else:
            raise InstanceSyntaxError(no, f"cannot parse {body!r}")
    return Presentation(tuple(cores), tuple(core_arcs), tuple(rays), tuple(rules),
                        tuple(outb), tuple(inb), tuple(arcs), tuple(sets.items()))


def format_vertex(v) -> str:
    return f"({v[0]},{v[1]})" if is_ray_vertex(v) else v


def format_query(q: Query) -> str:
    items = [f"v:{format_vertex(v)}" for v in sorted(q.vertices, key=vkey)]
    items += [f"end:{r}" for r in sorted(q.ends)]
    return " ".join(items)


def serialize_instance(P: Presentation) -> str:
    lines = [f"core {c}" for c in P.cores]
    lines += [f"corearc {f} {g}" for f, g in P.core_arcs]
    lines += [f"ray {r} {o}" for r, o in P.rays]
    lines += [f"rule {r.src} {r.sp} {r.sr} -> {r.dst} {r.dp} {r.dr}" for r in P.rules]
    lines += [f"bundle {b.core} -> {b.ray} {b.p} {b.r}" for b in P.out_bundles]
    lines += [f"bundle {b.ray} {b.p} {b.r} -> {b.core}" for b in P.in_bundles]
    lines += [f"arc {format_vertex(u)} -> {format_vertex(v)}" for u, v in P.arcs]
    lines += [f"set {name} {format_query(q)}".rstrip() for name, q in P.sets]
    return "\n".join(lines) + ("\n" if lines else "")


def load_instance(path) -> Presentation:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def export_dot(P: Presentation, L: int, ends=None) -> str:
    """DOT text of truncate(P, L); ``ends`` maps end id -> member rays for annotation."""
    G, bands = truncate(P, L)
    ident = lambda v: '"' + format_vertex(v) + '"'
    out = ["digraph D {", "  rankdir=LR;"]
    deep = {v for band in bands.values() for v in band}
    for v in sorted(G.vertices, key=vkey):
        attrs = ' [shape=box]' if not is_ray_vertex(v) else (' [style=dashed]' if v in deep else "")
        out.append(f"  {ident(v)}{attrs};")
    for u, v in sorted(G.arcs, key=vkey):
        out.append(f"  {ident(u)} -> {ident(v)};")
    for eid, members in sorted((ends or {}).items()):
        out.append(f'  "{eid}" [shape=doublecircle, label="{eid} = {{{",".join(members)}}}"];')
        for r in members:
            out.append(f'  {ident((r, L))} -> "{eid}" [style=dotted, arrowhead=none];')
    out.append("}")
    return "\n".join(out) + "\n"
