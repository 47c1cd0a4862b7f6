"""Command line front end.

    hkit <subcommand> [input.json | -] [--trunc D] [--order w1,...,wn] [--l L] [--r R]
         [--rmax RMAX] [--point b1,...,bn] [--fibre "0:a1,a2;0:c1,c2"]
         [--grid "v1,v2;w1,w2"] [--out FILE]

Exit status: 0 on success, 2 when the answer is a negative verdict (UNSAT,
FAIL, not a member, estimate violated, no stabilisation), 1 on errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import division, relations, whitney
from .core import MonomialOrder
from .document import InputDocument, dumps_report, parse_input, series_terms
from .errors import HkitError, SchemaError
from .relations import FibrePoint

EXIT_OK, EXIT_ERROR, EXIT_VERDICT = 0, 1, 2

COMMANDS = (
    "divide", "diagram", "stdbasis", "member", "complement", "lambda", "chevalley-estimate",
    "relations", "chevalley", "ranks", "solve-jet", "scan", "borel",
)

SCHEMA_HELP = """\
input document (JSON object, every field optional unless the subcommand needs it):
  schema            1
  variables         ["x1", "x2"]                    series variables (n)
  components        p (default 1)
  order             ["1", "2"]                      positive weights of the linear form
  trunc             D
  F, G              series: [{"coeff": "3/2", "alpha": [1, 0], "j": 1}, ...]
  divisors          [series, ...]                   (divide)
  generators        [series, ...]                   (diagram, stdbasis, member, ...)
  l, r, rmax, m     integers
  target_variables  ["y1", "y2"]                    (relations family)
  charts            [{"variables": [...], "A": [[poly, ...], ...], "phi": [poly, ...],
                      "f": [poly, ...]}]            poly terms omit "j"
  point             ["0", "1/2"]
  fibre             [{"chart": 0, "coords": ["0", "1"]}]
  grid              {"axes": [[...], ...]} or {"points": [[...], ...]}
  fibres            [{"point": [...], "fibre": [...]}]   fibres for scan points
  stratum           {"base": [...], "directions": [[...], ...]}   (borel)
  field             [{"alpha": [1, 0], "poly": [terms in t]}]
  function          poly in the document variables (borel builds its field)
"""


def _rationals(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(s.strip()) for s in text.split(",") if s.strip())
    except (ValueError, ZeroDivisionError):
        raise SchemaError(f"bad rational list {text!r}") from None


def _fibre_flag(text: str) -> tuple[FibrePoint, ...]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        chart, _, coords = chunk.rpartition(":")
        out.append(FibrePoint(int(chart) if chart else 0, _rationals(coords)))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hkit",
        description="Exact formal division, diagrams and relation modules of truncated power series.",
        epilog=SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", nargs="?", default="-", help="input JSON file (default: stdin)")
    parser.add_argument("--trunc", type=int, help="truncation degree D")
    parser.add_argument("--order", help="comma-separated positive weights")
    parser.add_argument("--l", type=int, dest="l")
    parser.add_argument("--r", type=int, dest="r")
    parser.add_argument("--rmax", type=int)
    parser.add_argument("--point", help="comma-separated rational coordinates of b")
    parser.add_argument("--fibre", help="fibre points 'chart:a1,a2;chart:c1,c2'")
    parser.add_argument("--grid", help="per-axis values 'v1,v2;w1,w2' (cartesian product)")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _need(value, name):
    if value is None:
        raise SchemaError(f"missing {name} (document field or --{name} flag)", field=name)
    return value


def _merge_flags(doc: InputDocument, args) -> None:
    for name in ("trunc", "l", "r", "rmax"):
        v = getattr(args, name)
        if v is not None:
            if v < 0:
                raise SchemaError(f"--{name} must be nonnegative", field=name)
            setattr(doc, name, v)
    if args.order is not None:
        doc.order = _rationals(args.order)
    if args.point is not None:
        doc.point = _rationals(args.point)
    if args.fibre is not None:
        doc.fibre = _fibre_flag(args.fibre)
    if args.grid is not None:
        doc.grid = {"axes": tuple(_rationals(ax) for ax in args.grid.split(";"))}


def _series_cmd(cmd: str, doc: InputDocument):
    D = _need(doc.trunc, "trunc")
    ord = doc.monomial_order()
    base = {"command": cmd, "trunc": D, "order": list(ord.weights),
            "variables": list(doc.variables), "components": doc.components}
    if cmd == "divide":
        F = doc.series(_need(doc.F, "F"), D)
        divisors = [doc.series(t, D) for t in _need(doc.divisors, "divisors")]
        res = division.hironaka_divide(F, divisors, ord)
        base.update(
            quotients=[series_terms(Q, ord) for Q in res.quotients],
            remainder=series_terms(res.remainder, ord),
            initial_exponents=list(res.initial_exponents),
        )
        return base, EXIT_OK
    gens = [doc.series(t, D) for t in (doc.generators or ())]
    if cmd == "diagram":
        dg = division.compute_diagram(gens, ord, D)
        base.update(vertices=list(dg.vertices), certified_degree=dg.certified_degree)
        return base, EXIT_OK
    if cmd == "stdbasis":
        sb = division.standard_basis(gens, ord, D)
        base["standard_basis"] = [series_terms(s, ord) for s in sb]
        return base, EXIT_OK
    if cmd == "member":
        G = doc.series(_need(doc.G, "G"), D)
        ok, R = division.membership_test(G, gens, ord, D)
        base.update(member=ok, remainder=series_terms(R, ord))
        return base, EXIT_OK if ok else EXIT_VERDICT
    if cmd == "complement":
        r = _need(doc.r, "r")
        base.update(r=r, complement=division.complement_basis(gens, ord, D, r))
        return base, EXIT_OK
    if cmd == "lambda":
        base["lambda"] = division.artin_rees_lambda(gens, ord, D)
        return base, EXIT_OK
    if cmd == "chevalley-estimate":
        l = _need(doc.l, "l")
        holds = division.check_chevalley_estimate(gens, ord, D, l)
        base.update(l=l, holds=holds, **{"lambda": division.artin_rees_lambda(gens, ord, D)})
        return base, EXIT_OK if holds else EXIT_VERDICT
    raise AssertionError(cmd)


def _fibre_json(fibre):
    return [{"chart": fp.chart, "coords": list(fp.coords)} for fp in fibre]


def _relations_cmd(cmd: str, doc: InputDocument):
    data = doc.equation_data()
    ord = None
    if doc.order is not None:
        ord = MonomialOrder(data.target_dim, data.q, doc.order)
    base = {"command": cmd, "target_variables": list(doc.target_variables), "p": data.p, "q": data.q}
    if cmd == "scan":
        l, r = _need(doc.l, "l"), _need(doc.r, "r")
        grid = _need(doc.grid, "grid")
        points = list(grid.get("points", ()))
        if "axes" in grid:
            points += relations.expand_grid(grid["axes"])
        fibres = {pt: fb for pt, fb in (doc.fibres or ())}
        rep = relations.diagram_scan(data, points, l, r, ord, fibres=fibres)
        base.update(
            l=l, r=r,
            groups=[{
                "vertices": list(g["vertices"]), "dim_l": g["dim_l"], "dim_r": g["dim_r"],
                "rho0": g["rho0"], "points": [list(pt) for pt in g["points"]],
            } for g in rep.groups],
            points=[{
                "point": list(rec["point"]), "dim_l": rec["dim_l"], "dim_r": rec["dim_r"],
                "rho0": rec["rho0"], "candidate_r": rec["candidate_r"],
                "fibre_count": len(rec["fibre"]),
            } for rec in rep.records],
            skipped=[{"point": list(s["point"]), "reason": s["skipped"]} for s in rep.skipped],
            candidate_r_min=rep.candidate_min, candidate_r_max=rep.candidate_max,
        )
        return base, EXIT_OK
    b = _need(doc.point, "point")
    fibre = doc.fibre
    base["point"] = list(b)
    if cmd == "chevalley":
        l, rmax = _need(doc.l, "l"), _need(doc.rmax, "rmax")
        rep = relations.chevalley_function(data, b, fibre, l, rmax, ord)
        base.update(
            l=l, window=list(rep.window), r_values=list(rep.r_values), dims=list(rep.dims),
            stabilization_r=rep.stabilization_r, fibre=_fibre_json(rep.fibre),
            verdict="stable over tested window" if rep.stable else "no stabilization",
        )
        return base, EXIT_OK if rep.stable else EXIT_VERDICT
    r = _need(doc.r, "r")
    if cmd == "solve-jet":
        sol = relations.formal_solve_at_point(data, b, fibre, r, ord)
        fib = relations.resolve_fibre(data, b, fibre)
        base.update(r=r, fibre=_fibre_json(fib))
        if sol is None:
            base["verdict"] = "UNSAT"
            return base, EXIT_VERDICT
        base.update(verdict="SAT", P_local=list(sol.local), P=list(sol.global_form))
        return base, EXIT_OK
    system = relations.assemble_relation_system(data, b, fibre, r, ord)
    base.update(r=r, fibre=_fibre_json(system.fibre), fibre_count=system.fibre_count,
                unknowns=system.matrix.cols, rho0=relations.rank_rho0(system))
    if cmd == "ranks":
        if doc.l is not None:
            base.update(l=doc.l, rho1=relations.rank_rho1(system, doc.l))
        return base, EXIT_OK
    basis = relations.relation_basis(system)
    base.update(dim=basis.dim, basis=[series_terms(v) for v in basis.vectors()],
                initial_exponents=basis.initial_exponents())
    if doc.l is not None:
        proj = relations.project_relations(basis, doc.l)
        labels = [e for e in basis.labels if e.degree <= doc.l]
        base.update(l=doc.l, projected_dim=proj.dim, projected_basis=[
            series_terms({labels[k]: v for k, v in enumerate(row) if v}) for row in proj.basis])
    return base, EXIT_OK


def _borel_cmd(doc: InputDocument):
    m = _need(doc.m, "m")
    if doc.function is not None:
        if doc.stratum is None:
            raise SchemaError("borel with a function needs a stratum", field="stratum")
        field = whitney.field_of_function(doc.function, doc.stratum, m)
    else:
        field = doc.jet_field()
    failure = whitney.borel_check(field)
    report = {"command": "borel", "m": m, "verdict": "PASS" if failure is None else "FAIL"}
    if failure is not None:
        report.update(alpha=list(failure.alpha), k=failure.k, lhs=failure.lhs, rhs=failure.rhs)
        return report, EXIT_VERDICT
    return report, EXIT_OK


def run_command(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=stderr)
    try:
        if args.input == "-":
            text = stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        doc = parse_input(text)
        _merge_flags(doc, args)
        if args.command == "borel":
            report, code = _borel_cmd(doc)
        elif args.command in ("relations", "chevalley", "ranks", "solve-jet", "scan"):
            report, code = _relations_cmd(args.command, doc)
        else:
            report, code = _series_cmd(args.command, doc)
    except SchemaError as exc:
        print(f"hkit: schema error: {exc}", file=stderr)
        print(SCHEMA_HELP, file=stderr)
        return EXIT_ERROR
    except (HkitError, ValueError, OSError) as exc:
        print(f"hkit: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_ERROR
    text = dumps_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
