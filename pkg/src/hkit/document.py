"""JSON input documents and report serialisation.

Rationals travel as ``"num/den"`` strings (plain integers and ``"7"`` are
accepted on input); a term is ``{"coeff": "3/2", "alpha": [1, 0], "j": 1}``.
See the README for the full list of document fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any

from .core import Exponent, MonomialOrder, Polynomial, TruncatedSeriesVector
from .errors import SchemaError
from .relations import Chart, EquationData, FibrePoint
from .whitney import AffineStratum, JetField

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "InputDocument",
    "parse_input",
    "format_document",
    "rational_str",
    "dumps_report",
    "series_terms",
    "polynomial_terms",
    "exponent_json",
]

Terms = dict  # Exponent -> Fraction, zero-free


def rational_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def exponent_json(e: Exponent) -> dict:
    return {"alpha": list(e.alpha), "j": e.j}


def series_terms(F: TruncatedSeriesVector | Terms, ord: MonomialOrder | None = None) -> list[dict]:
    items = F.items() if isinstance(F, TruncatedSeriesVector) else F.items()
    key = (lambda t: ord.key(t[0])) if ord is not None else (lambda t: (sum(t[0].alpha), t[0].j, t[0].alpha))
    return [{"coeff": rational_str(c), "alpha": list(e.alpha), "j": e.j} for e, c in sorted(items, key=key)]


def polynomial_terms(f: Polynomial) -> list[dict]:
    items = sorted(f.items(), key=lambda t: (sum(t[0]), t[0]))
    return [{"coeff": rational_str(c), "alpha": list(a)} for a, c in items]


def _to_jsonable(obj):
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, Exponent):
        return exponent_json(obj)
    if isinstance(obj, Polynomial):
        return polynomial_terms(obj)
    if isinstance(obj, TruncatedSeriesVector):
        return series_terms(obj)
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    """Byte-deterministic JSON: sorted keys, canonical rationals, trailing newline."""
    return json.dumps(_to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


@dataclass
class InputDocument:
    """Validated contents of an input file.  Every field is optional."""

    schema: int = SCHEMA_VERSION
    variables: tuple[str, ...] | None = None
    components: int = 1
    order: tuple[Fraction, ...] | None = None
    trunc: int | None = None
    F: Terms | None = None
    G: Terms | None = None
    divisors: tuple[Terms, ...] | None = None
    generators: tuple[Terms, ...] | None = None
    l: int | None = None
    r: int | None = None
    rmax: int | None = None
    target_variables: tuple[str, ...] | None = None
    charts: tuple[tuple[tuple[str, ...], Chart], ...] | None = None
    point: tuple[Fraction, ...] | None = None
    fibre: tuple[FibrePoint, ...] | None = None
    grid: dict | None = None
    fibres: tuple[tuple[tuple[Fraction, ...], tuple[FibrePoint, ...]], ...] | None = None
    stratum: AffineStratum | None = None
    m: int | None = None
    field: dict | None = None
    function: Polynomial | None = None

    @property
    def nvars(self) -> int:
        if self.variables is None:
            raise SchemaError("document declares no variables", field="variables")
        return len(self.variables)

    def monomial_order(self, weights=None) -> MonomialOrder:
        return MonomialOrder(self.nvars, self.components, weights if weights is not None else self.order)

    def series(self, terms: Terms, D: int) -> TruncatedSeriesVector:
        return TruncatedSeriesVector(self.nvars, self.components, D, terms)

    def equation_data(self) -> EquationData:
        if not self.charts:
            raise SchemaError("document has no charts", field="charts")
        if self.target_variables is None:
            raise SchemaError("document declares no target_variables", field="target_variables")
        return EquationData(len(self.target_variables), tuple(c for _, c in self.charts))

    def jet_field(self) -> JetField:
        if self.stratum is None or self.m is None:
            raise SchemaError("borel needs a stratum and an order m", field="stratum")
        d = max(self.stratum.dim, 1)
        return JetField(self.stratum, self.m, {a: Polynomial(d, t) for a, t in (self.field or {}).items()})


_FIELDS = {f.name for f in fields(InputDocument)}


class _Parser:
    def __init__(self):
        self.doc = InputDocument()

    def fail(self, msg, path):
        raise SchemaError(msg, field=path)

    def integer(self, v, path, minimum=0):
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail("integer expected", path)
        if v < minimum:
            self.fail(f"integer >= {minimum} expected", path)
        return v

    def rational(self, v, path):
        if isinstance(v, bool) or isinstance(v, float):
            self.fail("exact rational expected (use a \"num/den\" string)", path)
        if isinstance(v, int):
            return Fraction(v)
        if not isinstance(v, str):
            self.fail("rational string expected", path)
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            self.fail(f"bad rational {v!r}", path)

    def rationals(self, v, path, length=None):
        if not isinstance(v, list):
            self.fail("list of rationals expected", path)
        if length is not None and len(v) != length:
            self.fail(f"expected {length} entries, got {len(v)}", path)
        return tuple(self.rational(x, f"{path}[{k}]") for k, x in enumerate(v))

    def names(self, v, path):
        if not isinstance(v, list) or not v or not all(isinstance(s, str) and s for s in v):
            self.fail("nonempty list of variable names expected", path)
        if len(set(v)) != len(v):
            self.fail("variable names must be distinct", path)
        return tuple(v)

    def keys(self, obj, allowed, path, required=()):
        if not isinstance(obj, dict):
            self.fail("object expected", path)
        for k in obj:
            if k not in allowed:
                self.fail(f"unknown field {k!r}", f"{path}.{k}" if path else k)
        for k in required:
            if k not in obj:
                self.fail(f"missing field {k!r}", f"{path}.{k}" if path else k)

    def terms(self, v, path, n, p=1, with_j=True) -> dict:
        if not isinstance(v, list):
            self.fail("list of terms expected", path)
        out: dict = {}
        for k, t in enumerate(v):
            tp = f"{path}[{k}]"
            self.keys(t, {"coeff", "alpha", "j"}, tp, required=("coeff", "alpha"))
            c = self.rational(t["coeff"], f"{tp}.coeff")
            alpha = t["alpha"]
            if not isinstance(alpha, list):
                self.fail("alpha must be a list", f"{tp}.alpha")
            if len(alpha) != n:
                self.fail(f"alpha has length {len(alpha)}, expected {n}", f"{tp}.alpha")
            alpha = tuple(self.integer(a, f"{tp}.alpha[{i}]") for i, a in enumerate(alpha))
            j = self.integer(t.get("j", 1), f"{tp}.j", minimum=1)
            if j > p:
                self.fail(f"component index {j} exceeds {p}", f"{tp}.j")
            key = Exponent(alpha, j) if with_j else alpha
            out[key] = out.get(key, 0) + c
        return {key: c for key, c in out.items() if c}

    def polynomial(self, v, path, n) -> Polynomial:
        return Polynomial(n, self.terms(v, path, n, 1, with_j=False))

    def fibre_list(self, v, path):
        if not isinstance(v, list):
            self.fail("list of fibre points expected", path)
        out = []
        for k, fp in enumerate(v):
            fpath = f"{path}[{k}]"
            self.keys(fp, {"chart", "coords"}, fpath, required=("coords",))
            chart = self.integer(fp.get("chart", 0), f"{fpath}.chart")
            out.append(FibrePoint(chart, self.rationals(fp["coords"], f"{fpath}.coords")))
        return tuple(out)

    def parse(self, obj) -> InputDocument:
        d = self.doc
        self.keys(obj, _FIELDS, "")
        if "schema" in obj:
            d.schema = self.integer(obj["schema"], "schema", minimum=1)
            if d.schema != SCHEMA_VERSION:
                self.fail(f"unsupported schema version {d.schema}", "schema")
        if "variables" in obj:
            d.variables = self.names(obj["variables"], "variables")
        if "components" in obj:
            d.components = self.integer(obj["components"], "components", minimum=1)
        for name in ("trunc", "l", "r", "rmax", "m"):
            if name in obj:
                setattr(d, name, self.integer(obj[name], name))
        if "order" in obj:
            if d.variables is None:
                self.fail("order needs variables", "order")
            d.order = self.rationals(obj["order"], "order", len(d.variables))
            if any(w <= 0 for w in d.order):
                self.fail("order weights must be positive", "order")
        n, p = (len(d.variables) if d.variables else None), d.components
        for name in ("F", "G"):
            if name in obj:
                if n is None:
                    self.fail("series need variables", name)
                setattr(d, name, self.terms(obj[name], name, n, p))
        for name in ("divisors", "generators"):
            if name in obj:
                if n is None:
                    self.fail("series need variables", name)
                if not isinstance(obj[name], list):
                    self.fail("list of series expected", name)
                setattr(d, name, tuple(self.terms(s, f"{name}[{k}]", n, p) for k, s in enumerate(obj[name])))
        if "target_variables" in obj:
            d.target_variables = self.names(obj["target_variables"], "target_variables")
        if "charts" in obj:
            d.charts = self.parse_charts(obj["charts"])
        tn = len(d.target_variables) if d.target_variables else None
        if "point" in obj:
            d.point = self.rationals(obj["point"], "point", tn)
        if "fibre" in obj:
            d.fibre = self.fibre_list(obj["fibre"], "fibre")
        if "grid" in obj:
            d.grid = self.parse_grid(obj["grid"], tn)
        if "fibres" in obj:
            if not isinstance(obj["fibres"], list):
                self.fail("list expected", "fibres")
            out = []
            for k, entry in enumerate(obj["fibres"]):
                path = f"fibres[{k}]"
                self.keys(entry, {"point", "fibre"}, path, required=("point", "fibre"))
                out.append((self.rationals(entry["point"], f"{path}.point", tn),
                            self.fibre_list(entry["fibre"], f"{path}.fibre")))
            d.fibres = tuple(out)
        if "stratum" in obj:
            s = obj["stratum"]
            self.keys(s, {"base", "directions"}, "stratum", required=("base",))
            base = self.rationals(s["base"], "stratum.base")
            dirs = s.get("directions", [])
            if not isinstance(dirs, list):
                self.fail("list of directions expected", "stratum.directions")
            dirs = tuple(self.rationals(u, f"stratum.directions[{k}]", len(base)) for k, u in enumerate(dirs))
            try:
                d.stratum = AffineStratum(base, dirs)
            except ValueError as exc:
                self.fail(str(exc), "stratum")
        if "field" in obj:
            if d.stratum is None:
                self.fail("field needs a stratum", "field")
            d.field = self.parse_field(obj["field"], d.stratum)
        if "function" in obj:
            if n is None:
                self.fail("function needs variables", "function")
            d.function = self.polynomial(obj["function"], "function", n)
        return d

    def parse_charts(self, v):
        if not isinstance(v, list) or not v:
            self.fail("nonempty list of charts expected", "charts")
        out = []
        for k, ch in enumerate(v):
            path = f"charts[{k}]"
            self.keys(ch, {"variables", "A", "phi", "f"}, path, required=("variables", "A", "phi"))
            names = self.names(ch["variables"], f"{path}.variables")
            m = len(names)
            A = ch["A"]
            if not isinstance(A, list) or not A or not all(isinstance(row, list) and row for row in A):
                self.fail("A must be a nonempty matrix of polynomials", f"{path}.A")
            Am = tuple(tuple(self.polynomial(g, f"{path}.A[{i}][{j}]", m) for j, g in enumerate(row))
                       for i, row in enumerate(A))
            if not isinstance(ch["phi"], list):
                self.fail("phi must be a list of polynomials", f"{path}.phi")
            phi = tuple(self.polynomial(g, f"{path}.phi[{i}]", m) for i, g in enumerate(ch["phi"]))
            f = None
            if "f" in ch:
                if not isinstance(ch["f"], list):
                    self.fail("f must be a list of polynomials", f"{path}.f")
                f = tuple(self.polynomial(g, f"{path}.f[{i}]", m) for i, g in enumerate(ch["f"]))
            try:
                out.append((names, Chart(m, Am, phi, f)))
            except ValueError as exc:
                self.fail(str(exc), path)
        return tuple(out)

    def parse_grid(self, g, n):
        self.keys(g, {"axes", "points"}, "grid")
        out = {}
        if "axes" in g:
            if not isinstance(g["axes"], list):
                self.fail("list of axes expected", "grid.axes")
            if n is not None and len(g["axes"]) != n:
                self.fail(f"expected {n} axes", "grid.axes")
            out["axes"] = tuple(self.rationals(ax, f"grid.axes[{k}]") for k, ax in enumerate(g["axes"]))
        if "points" in g:
            if not isinstance(g["points"], list):
                self.fail("list of points expected", "grid.points")
            out["points"] = tuple(self.rationals(pt, f"grid.points[{k}]", n) for k, pt in enumerate(g["points"]))
        return out

    def parse_field(self, v, stratum):
        if not isinstance(v, list):
            self.fail("list of coefficient entries expected", "field")
        n, d = stratum.ambient, max(stratum.dim, 1)
        out = {}
        for k, entry in enumerate(v):
            path = f"field[{k}]"
            self.keys(entry, {"alpha", "poly"}, path, required=("alpha", "poly"))
            alpha = entry["alpha"]
            if not isinstance(alpha, list) or len(alpha) != n:
                self.fail(f"alpha must have length {n}", f"{path}.alpha")
            alpha = tuple(self.integer(a, f"{path}.alpha[{i}]") for i, a in enumerate(alpha))
            if alpha in out:
                self.fail("duplicate multiindex", f"{path}.alpha")
            out[alpha] = self.terms(entry["poly"], f"{path}.poly", d, 1, with_j=False)
        return out


def parse_input(text: str) -> InputDocument:
    """Parse and validate a JSON document; raises :class:`SchemaError` with line or field."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return _Parser().parse(obj)


def _terms_json(terms: dict) -> list[dict]:
    out = []
    for key, c in sorted(terms.items(), key=lambda t: (sum(t[0].alpha), t[0].j, t[0].alpha)
                         if isinstance(t[0], Exponent) else (sum(t[0]), t[0])):
        if isinstance(key, Exponent):
            out.append({"coeff": rational_str(c), "alpha": list(key.alpha), "j": key.j})
        else:
            out.append({"coeff": rational_str(c), "alpha": list(key)})
    return out


def _fibre_json(fibre) -> list[dict]:
    return [{"chart": fp.chart, "coords": [rational_str(x) for x in fp.coords]} for fp in fibre]


def format_document(doc: InputDocument) -> str:
    """Serialise a document so that ``parse_input(format_document(doc)) == doc``."""
    obj: dict[str, Any] = {"schema": doc.schema, "components": doc.components}
    if doc.variables is not None:
        obj["variables"] = list(doc.variables)
    for name in ("trunc", "l", "r", "rmax", "m"):
        if getattr(doc, name) is not None:
            obj[name] = getattr(doc, name)
    if doc.order is not None:
        obj["order"] = [rational_str(w) for w in doc.order]
    for name in ("F", "G"):
        if getattr(doc, name) is not None:
            obj[name] = _terms_json(getattr(doc, name))
    for name in ("divisors", "generators"):
        if getattr(doc, name) is not None:
            obj[name] = [_terms_json(t) for t in getattr(doc, name)]
    if doc.target_variables is not None:
        obj["target_variables"] = list(doc.target_variables)
    if doc.charts is not None:
        charts = []
        for names, ch in doc.charts:
            entry = {
                "variables": list(names),
                "A": [[polynomial_terms(g) for g in row] for row in ch.A],
                "phi": [polynomial_terms(g) for g in ch.phi],
            }
            if ch.f is not None:
                entry["f"] = [polynomial_terms(g) for g in ch.f]
            charts.append(entry)
        obj["charts"] = charts
    if doc.point is not None:
        obj["point"] = [rational_str(x) for x in doc.point]
    if doc.fibre is not None:
        obj["fibre"] = _fibre_json(doc.fibre)
    if doc.grid is not None:
        obj["grid"] = {k: [[rational_str(x) for x in v] for v in vals] for k, vals in doc.grid.items()}
    if doc.fibres is not None:
        obj["fibres"] = [{"point": [rational_str(x) for x in pt], "fibre": _fibre_json(fb)}
                         for pt, fb in doc.fibres]
    if doc.stratum is not None:
        obj["stratum"] = {
            "base": [rational_str(x) for x in doc.stratum.base],
            "directions": [[rational_str(x) for x in u] for u in doc.stratum.directions],
        }
    if doc.field is not None:
        obj["field"] = [{"alpha": list(a), "poly": _terms_json(t)} for a, t in sorted(doc.field.items())]
    if doc.function is not None:
        obj["function"] = polynomial_terms(doc.function)
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
