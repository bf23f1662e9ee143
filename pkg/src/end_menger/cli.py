"""Command-line front end: ``end-menger <command> FILE [options]``.

Output is line-oriented ``key=value`` text.  Exit status is 0 on success,
1 when a checked property fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import sys

from .degree import DegreeZero, combined_degree
from .ends import NoStabilization, closure, end_leq, end_structure, ends
from .envelopes import build_dispersed_separator
from .instance import (InstanceSyntaxError, export_dot, format_query, format_vertex,
                       load_instance, parse_query)
from .oracle import LimitExceeded, OracleConfig, Unstable, brute_force_separator, brute_force_tracks
from .presentation import PresentationError, Query, validate, vkey
from .tracks import (CutThroughTerminal, NotDispersed, PreconditionViolated, closed_query,
                     max_disjoint_tracks, min_separator, verify_duality)


class InputError(Exception):
    pass


def _vertices(vs) -> str:
    return " ".join(format_vertex(v) for v in sorted(vs, key=vkey))


def _query(P, text: str) -> Query:
    names = dict(P.sets)
    if text in names:
        return names[text]
    try:
        q = parse_query(text)
    except InstanceSyntaxError as exc:
        raise InputError(f"{text!r} is neither a set name nor a list of elements ({exc})") from None
    bad = [r for r in q.ends if r not in P.ray_ids]
    if bad:
        raise InputError(f"unknown ray {bad[0]!r} in {text!r}")
    return q


def _ray_or_end(P, name: str) -> str:
    es = end_structure(P)
    if name in es.end_of:
        return name
    for e in es.ends:
        if e.end_id == name:
            return e.rays[0]
    raise InputError(f"unknown end or ray {name!r}")


def _track_line(t) -> str:
    def side(d):
        return f"v:{format_vertex(d[1])}" if d[0] == "vertex" else f"end:{d[1]}@{d[2]}+{d[3]}"
    via = ",".join(format_vertex(v) for v in t.middle)
    return f"track={t.kind} from={side(t.source)} to={side(t.sink)} via={via}"


def cmd_ends(P, args, out):
    es = ends(P)
    for e in es:
        yn = lambda b: "yes" if b else "no"
        out.append(f"end {e.end_id} = {{{','.join(e.rays)}}} in-ray:{yn(e.has_in)} out-ray:{yn(e.has_out)}")
    for e in es:
        for f in es:
            if e is not f and end_leq(P, e.end_id, f.end_id):
                out.append(f"leq={e.end_id},{f.end_id}")


def cmd_closure(P, args, out):
    c = closure(P, _query(P, args.set), args.dir)
    out.append(f"vertices={_vertices(c.vertices)}")
    out.append(f"ends={' '.join(sorted(c.ends))}")


def cmd_width(P, args, out):
    e = end_structure(P).end_of[_ray_or_end(P, args.end)]
    by_id = {x.end_id: x for x in ends(P)}
    out.append(f"end={e} width_{args.dir}={getattr(by_id[e], 'width_' + args.dir)}")


def cmd_tracks(P, args, out):
    A, B = _query(P, args.from_), _query(P, args.to)
    if args.closed:
        A, B = closed_query(P, A, B)
    k, tracks = max_disjoint_tracks(P, A, B)
    out.append(f"tracks={k}")
    out.extend(_track_line(t) for t in tracks)


def cmd_separator(P, args, out):
    A, B = _query(P, args.from_), _query(P, args.to)
    S = min_separator(P, A, B)
    out.append(f"separator={len(S)}")
    out.append(f"separator_set={_vertices(S)}")
    if args.dispersed_certificates:
        res = build_dispersed_separator(P, A, B)
        tails = " ".join(f"tail:({r},{s})" for r, s in sorted(res.S.tails))
        out.append(f"set S {' '.join('v:' + format_vertex(v) for v in sorted(res.S.finite, key=vkey))} {tails}".rstrip())
        for label, table in (("S_a", res.S_a), ("S_b", res.S_b)):
            for elem, cert in table.items():
                name = f"{label}[{'v:' + format_vertex(elem[1]) if elem[0] == 'vertex' else 'end:' + elem[1]}]"
                out.append(f"set {name} {format_query(Query(cert))}".rstrip())


def cmd_verify(P, args, out) -> int:
    A, B = _query(P, args.from_), _query(P, args.to)
    report = verify_duality(P, A, B)
    out.extend(report.lines())
    ok = report.equal and report.separator_ok and report.closed_ok
    return 0 if ok else 1


def cmd_degree(P, args, out) -> int:
    report = combined_degree(P, _ray_or_end(P, args.end))
    out.extend(report.lines())
    return 0 if report.agrees else 1


def cmd_oracle(P, args, out):
    cfg = OracleConfig(depth=args.depth, band=args.band)
    A, B = _query(P, args.from_), _query(P, args.to)
    k = brute_force_tracks(P, A, B, cfg)
    s = brute_force_separator(P, A, B, cfg)
    out.append(f"tracks={k} separator={s}")
    if k != s:
        cA, cB = closed_query(P, A, B)
        out.append(f"closure_discrepancy=yes closed_tracks={brute_force_tracks(P, cA, cB, cfg)}")
    else:
        out.append("closure_discrepancy=no")


def cmd_export_dot(P, args, out):
    annotate = {e.end_id: e.rays for e in ends(P)}
    out.append(export_dot(P, args.levels, annotate).rstrip("\n"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="end-menger", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="instance file")
        p.set_defaults(run=fn)
        return p

    def query_flags(p):
        p.add_argument("--from", dest="from_", default="A", help="source set name or elements")
        p.add_argument("--to", default="B", help="sink set name or elements")

    command("ends", cmd_ends, "list ends and their order")
    p = command("closure", cmd_closure, "up- or down-closure of a set")
    p.add_argument("--set", default="A")
    p.add_argument("--dir", choices=("up", "down"), default="up")
    p = command("width", cmd_width, "number of disjoint rays of an end")
    p.add_argument("--end", required=True, help="end id or member ray")
    p.add_argument("--dir", choices=("out", "in"), default="out")
    p = command("tracks", cmd_tracks, "maximum disjoint track family")
    query_flags(p)
    p.add_argument("--closed", action="store_true", help="close the query first")
    p = command("separator", cmd_separator, "minimum finite separator")
    query_flags(p)
    p.add_argument("--dispersed-certificates", action="store_true")
    query_flags(command("verify", cmd_verify, "check track/separator duality"))
    p = command("degree", cmd_degree, "combined degree of an end")
    p.add_argument("--end", required=True)
    p = command("oracle", cmd_oracle, "brute-force values on a truncation")
    query_flags(p)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--band", type=int, default=3)
    p = command("export-dot", cmd_export_dot, "DOT drawing of a truncation")
    p.add_argument("--levels", type=int, default=8)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    out: list[str] = []
    try:
        P = load_instance(args.file)
        problems = validate(P)
        if problems:
            raise InputError("; ".join(problems))
        status = args.run(P, args, out) or 0
    except (OSError, InstanceSyntaxError, PresentationError, InputError, PreconditionViolated,
            NotDispersed, DegreeZero, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (NoStabilization, CutThroughTerminal, Unstable, LimitExceeded) as exc:
        print(f"failure: {exc}", file=stderr)
        return 1
    for line in out:
        print(line, file=stdout)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
