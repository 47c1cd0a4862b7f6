"""Relation modules of ``A(x) g(phi(x)) = f(x)`` at a point, and related invariants.

For a point ``b`` and user-supplied fibre points ``a`` with ``phi(a) = b``, a
vector ``W`` in ``Q[[y]]^q`` is an order-``r`` relation when
``T^r_a A(x) . W(T^r_a phi(x) - b) = 0 mod (x)^(r+1)`` at every fibre point.
Only the coefficients ``W_(beta, j)`` with ``|beta| <= r`` matter, and they
satisfy a linear system whose matrix is assembled here.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .core import (
    Exponent,
    MonomialOrder,
    MonomialPowers,
    Polynomial,
    as_rational,
    drop_constant,
    jet_multiply,
    multiindices,
    taylor_expand_at,
)
from .division import minimal_exponents
from .errors import DimensionMismatch, FibreMismatch, HkitError, NoStabilization
from .linalg import (
    RationalMatrix,
    Subspace,
    nullspace,
    project,
    rank,
    solve_affine,
    subspace_equal,
)

log = logging.getLogger(__name__)

__all__ = [
    "Chart",
    "EquationData",
    "FibrePoint",
    "RelationSystem",
    "RelationBasis",
    "ChevalleyReport",
    "Solution",
    "ScanReport",
    "assemble_relation_system",
    "relation_basis",
    "project_relations",
    "chevalley_function",
    "rank_rho0",
    "rank_rho1",
    "formal_solve_at_point",
    "verify_flatness",
    "diagram_scan",
    "expand_grid",
]


@dataclass(frozen=True)
class Chart:
    """Polynomial data on one affine chart ``Q^nvars``."""

    nvars: int
    A: tuple[tuple[Polynomial, ...], ...]
    phi: tuple[Polynomial, ...]
    f: tuple[Polynomial, ...] | None = None

    def __post_init__(self):
        A = tuple(tuple(row) for row in self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "phi", tuple(self.phi))
        if self.f is not None:
            object.__setattr__(self, "f", tuple(self.f))
        if not A or not A[0]:
            raise DimensionMismatch("A must be a nonempty p x q matrix")
        if any(len(row) != len(A[0]) for row in A):
            raise DimensionMismatch("ragged matrix A")
        polys = [g for row in A for g in row] + list(self.phi) + list(self.f or ())
        if any(g.nvars != self.nvars for g in polys):
            raise DimensionMismatch(f"chart data must be polynomials in {self.nvars} variables")
        if self.f is not None and len(self.f) != len(A):
            raise DimensionMismatch(f"f has {len(self.f)} components, A has {len(A)} rows")

    @property
    def p(self) -> int:
        return len(self.A)

    @property
    def q(self) -> int:
        return len(self.A[0])

    def is_identity(self) -> bool:
        n = self.nvars
        return len(self.phi) == n and all(
            g == Polynomial.variable(n, k) for k, g in enumerate(self.phi)
        )

    def phi_at(self, a) -> tuple[Fraction, ...]:
        return tuple(g.evaluate(a) for g in self.phi)


@dataclass(frozen=True)
class EquationData:
    target_dim: int
    charts: tuple[Chart, ...]

    def __post_init__(self):
        charts = tuple(self.charts)
        object.__setattr__(self, "charts", charts)
        if not charts:
            raise ValueError("at least one chart is required")
        p, q = charts[0].p, charts[0].q
        for c in charts:
            if (c.p, c.q) != (p, q):
                raise DimensionMismatch("charts disagree on the shape of A")
            if len(c.phi) != self.target_dim:
                raise DimensionMismatch(f"phi must have {self.target_dim} components")

    @classmethod
    def single(cls, A, phi=None, f=None, nvars=None) -> "EquationData":
        """One chart; ``phi`` defaults to the identity of the chart."""
        A = tuple(tuple(row) for row in A)
        m = A[0][0].nvars if nvars is None else nvars
        if phi is None:
            phi = tuple(Polynomial.variable(m, k) for k in range(m))
        return cls(len(phi), (Chart(m, A, tuple(phi), None if f is None else tuple(f)),))

    @property
    def p(self) -> int:
        return self.charts[0].p

    @property
    def q(self) -> int:
        return self.charts[0].q

    @property
    def has_rhs(self) -> bool:
        return all(c.f is not None for c in self.charts)


@dataclass(frozen=True)
class FibrePoint:
    chart: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(as_rational(x) for x in self.coords))


def _point(b) -> tuple[Fraction, ...]:
    return tuple(as_rational(x) for x in b)


def resolve_fibre(data: EquationData, b, fibre: Sequence[FibrePoint] | None) -> list[FibrePoint]:
    """Validate the fibre over ``b``; for an identity chart an omitted fibre means ``{b}``."""
    b = _point(b)
    if len(b) != data.target_dim:
        raise DimensionMismatch(f"point of dimension {len(b)} in target of dimension {data.target_dim}")
    if fibre is None:
        ids = [k for k, c in enumerate(data.charts) if c.is_identity()]
        if len(data.charts) != 1 or not ids:
            raise FibreMismatch("fibre points must be supplied unless phi is the identity")
        fibre = [FibrePoint(0, b)]
    fibre = list(fibre)
    if not fibre:
        raise FibreMismatch("empty fibre")
    for fp in fibre:
        if not 0 <= fp.chart < len(data.charts):
            raise FibreMismatch(f"unknown chart index {fp.chart}")
        chart = data.charts[fp.chart]
        if len(fp.coords) != chart.nvars:
            raise DimensionMismatch(f"fibre point {fp.coords} in a chart of dimension {chart.nvars}")
        image = chart.phi_at(fp.coords)
        if image != b:
            raise FibreMismatch(f"phi({_fmt(fp.coords)}) = {_fmt(image)} differs from b = {_fmt(b)}")
    return fibre


def _fmt(v):
    return "(" + ", ".join(str(x) for x in v) + ")"


def _column_order(data: EquationData, ord: MonomialOrder | None) -> MonomialOrder:
    n, q = data.target_dim, data.q
    if ord is None:
        return MonomialOrder(n, q)
    if ord.nvars != n:
        raise DimensionMismatch(f"order over {ord.nvars} variables, target has {n}")
    return ord if ord.ncomp == q else ord.with_components(q)


@dataclass(frozen=True)
class RelationSystem:
    """Matrix of the linear conditions on ``W_(beta, j)``.

    Rows are labelled ``(alpha, i, nu)`` (``nu`` 1-based over the fibre),
    columns ``Exponent(beta, j)`` ascending in ``order``.
    """

    r: int
    point: tuple[Fraction, ...]
    fibre: tuple[FibrePoint, ...]
    order: MonomialOrder
    matrix: RationalMatrix
    unknown_degree: int

    @property
    def fibre_count(self) -> int:
        return len(self.fibre)

    @property
    def columns(self) -> list[Exponent]:
        return self.matrix.col_labels


def assemble_relation_system(data: EquationData, b, fibre: Sequence[FibrePoint] | None, r: int,
                             ord: MonomialOrder | None = None,
                             unknown_degree: int | None = None) -> RelationSystem:
    """Assemble the conditions ``T^r_a A . W(T^r_a phi - b) = 0 mod (x)^(r+1)``.

    ``unknown_degree`` (default ``r``) widens the set of unknown coefficients;
    columns with ``|beta| > r`` come out zero because each substituted series
    has positive order.
    """
    if r < 0:
        raise ValueError("order r must be nonnegative")
    b = _point(b)
    fibre = resolve_fibre(data, b, fibre)
    ord = _column_order(data, ord)
    udeg = r if unknown_degree is None else unknown_degree
    if udeg < r:
        raise ValueError("unknown_degree must be at least r")
    cols = ord.exponents(udeg)
    p, q = data.p, data.q
    row_labels = []
    blocks: list[list[list[Fraction]]] = []
    for nu, fp in enumerate(fibre, start=1):
        chart = data.charts[fp.chart]
        m = chart.nvars
        TA = [[taylor_expand_at(g, fp.coords, r) for g in row] for row in chart.A]
        u = [drop_constant(taylor_expand_at(g, fp.coords, r)) for g in chart.phi]
        powers = MonomialPowers(u)
        alphas = multiindices(m, r)
        idx = {(alpha, i): k for k, (alpha, i) in enumerate(product(alphas, range(1, p + 1)))}
        block = [[Fraction(0)] * len(cols) for _ in idx]
        for c, e in enumerate(cols):
            s = powers(e.alpha)
            if s.is_zero():
                continue
            for i in range(p):
                prod = jet_multiply(TA[i][e.j - 1], s)
                for t, v in prod.items():
                    block[idx[(t.alpha, i + 1)]][c] = v
        blocks.append(block)
        row_labels.extend((alpha, i, nu) for alpha, i in idx)
    rows = [row for block in blocks for row in block]
    M = RationalMatrix(rows, cols=len(cols), row_labels=row_labels, col_labels=cols)
    return RelationSystem(r, b, tuple(fibre), ord, M, udeg)


@dataclass(frozen=True)
class RelationBasis:
    """``pi_r(R_r(b))`` as a subspace of coefficient vectors indexed by ``labels``."""

    r: int
    labels: tuple[Exponent, ...]
    space: Subspace
    order: MonomialOrder

    @property
    def dim(self) -> int:
        return self.space.dim

    def vectors(self) -> list[dict[Exponent, Fraction]]:
        """Basis elements as sparse maps ``(beta, j) -> W_(beta, j)``."""
        return [{self.labels[k]: v for k, v in enumerate(row) if v} for row in self.space.basis]

    def initial_exponents(self) -> list[Exponent]:
        return [self.labels[c] for c in self.space.pivots]


def relation_basis(system: RelationSystem) -> RelationBasis:
    ker = nullspace(system.matrix)
    cols = system.columns
    keep = [k for k, e in enumerate(cols) if e.degree <= system.r]
    if len(keep) != len(cols):
        ker = project(ker, keep)
    return RelationBasis(system.r, tuple(cols[k] for k in keep), ker, system.order)


def _projection_coords(labels, l):
    return [k for k, e in enumerate(labels) if e.degree <= l]


def project_relations(basis: RelationBasis, l: int) -> Subspace:
    """``pi_l(R_r(b))``: keep the coordinates with ``|beta| <= l`` (in column order)."""
    if l > basis.r:
        raise ValueError(f"projection degree l = {l} exceeds r = {basis.r}")
    coords = _projection_coords(basis.labels, l)
    if len(coords) == len(basis.labels):
        return basis.space
    return project(basis.space, coords)


def rank_rho0(system: RelationSystem) -> int:
    return rank(system.matrix)


def rank_rho1(system: RelationSystem, l: int) -> int:
    """Rank of the columns with ``l < |beta| <= r``."""
    if l > system.r:
        raise ValueError(f"l = {l} exceeds r = {system.r}")
    keep = [k for k, e in enumerate(system.columns) if l < e.degree <= system.r]
    if not keep:
        return 0
    return rank(system.matrix.select_columns(keep))


@dataclass(frozen=True)
class ChevalleyReport:
    """``dim pi_l(R_r(b))`` for ``r = l .. r_max``.

    ``stabilization_r`` is the first ``r`` from which the projected space is
    constant over the tested window; ``None`` when it still changes at
    ``r_max``.  It is an observation over the window, not a proof.
    """

    point: tuple[Fraction, ...]
    l: int
    r_values: tuple[int, ...]
    dims: tuple[int, ...]
    stabilization_r: int | None
    fibre: tuple[FibrePoint, ...]
    spaces: tuple[Subspace, ...] = field(repr=False, default=())

    @property
    def window(self) -> tuple[int, int]:
        return (self.r_values[0], self.r_values[-1])

    @property
    def stable(self) -> bool:
        return self.stabilization_r is not None

    def require_stable(self) -> int:
        if self.stabilization_r is None:
            raise NoStabilization(
                f"pi_{self.l}(R_r) still changes at r = {self.r_values[-1]}; dims {list(self.dims)}"
            )
        return self.stabilization_r


def _stabilization(r_values, spaces):
    last = spaces[-1]
    k = len(spaces) - 1
    while k > 0 and subspace_equal(spaces[k - 1], last):
        k -= 1
    if k == len(spaces) - 1 and len(spaces) > 1:
        return None
    return r_values[k]


def chevalley_function(data: EquationData, b, fibre: Sequence[FibrePoint] | None, l: int,
                       r_max: int, ord: MonomialOrder | None = None) -> ChevalleyReport:
    if l > r_max:
        raise ValueError(f"l = {l} exceeds r_max = {r_max}")
    b = _point(b)
    fibre = resolve_fibre(data, b, fibre)
    r_values = tuple(range(l, r_max + 1))
    spaces = []
    for r in r_values:
        basis = relation_basis(assemble_relation_system(data, b, fibre, r, ord))
        spaces.append(project_relations(basis, l))
    stab = _stabilization(r_values, spaces)
    return ChevalleyReport(b, l, r_values, tuple(S.dim for S in spaces), stab, tuple(fibre),
                           tuple(spaces))


@dataclass(frozen=True)
class Solution:
    """Polynomial ``P`` of degree ``<= r`` with ``f - A.(P o phi)`` r-flat on the fibre.

    ``local`` is written in coordinates centred at the point ``b``;
    ``global_form`` is the same polynomial in the ambient coordinates.
    """

    point: tuple[Fraction, ...]
    r: int
    local: tuple[Polynomial, ...]
    coefficients: tuple[Fraction, ...]
    labels: tuple[Exponent, ...]

    @property
    def global_form(self) -> tuple[Polynomial, ...]:
        n = len(self.point)
        back = [Polynomial.variable(n, k) - self.point[k] for k in range(n)]
        return tuple(P.compose(back) for P in self.local)


def verify_flatness(data: EquationData, b, fibre: Sequence[FibrePoint],
                    P_global: Sequence[Polynomial], r: int) -> bool:
    """Check directly, with exact polynomial composition, that ``f - A.(P o phi)`` is r-flat."""
    for fp in fibre:
        chart = data.charts[fp.chart]
        composed = [P.compose(list(chart.phi)) for P in P_global]
        for i in range(chart.p):
            defect = chart.f[i] - sum((chart.A[i][j] * composed[j] for j in range(chart.q)),
                                      Polynomial(chart.nvars))
            if not taylor_expand_at(defect, fp.coords, r).is_zero():
                return False
    return True


def formal_solve_at_point(data: EquationData, b, fibre: Sequence[FibrePoint] | None, r: int,
                          ord: MonomialOrder | None = None) -> Solution | None:
    """Solve ``A . (P o phi) = f`` to order ``r`` on the fibre over ``b``; ``None`` when unsolvable.

    Among all solutions the one with every free coordinate zero is returned.
    """
    if not data.has_rhs:
        raise ValueError("right-hand side f is required")
    b = _point(b)
    fibre = resolve_fibre(data, b, fibre)
    system = assemble_relation_system(data, b, fibre, r, ord)
    rhs = []
    for (alpha, i, nu) in system.matrix.row_labels:
        fp = fibre[nu - 1]
        jet = taylor_expand_at(data.charts[fp.chart].f[i - 1], fp.coords, r)
        rhs.append(jet.coefficient(Exponent(alpha, 1)))
    w = solve_affine(system.matrix, rhs)
    if w is None:
        return None
    n, q = data.target_dim, data.q
    comps: list[dict] = [{} for _ in range(q)]
    for e, v in zip(system.columns, w):
        if v:
            comps[e.j - 1][e.alpha] = v
    sol = Solution(b, r, tuple(Polynomial(n, c) for c in comps), tuple(w), tuple(system.columns))
    if not verify_flatness(data, b, fibre, sol.global_form, r):
        raise HkitError("internal error: linear solution failed the direct flatness check")
    return sol


def expand_grid(axes: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Cartesian product of per-axis value lists, in lexicographic order."""
    return sorted(product(*[[as_rational(v) for v in ax] for ax in axes]))


@dataclass(frozen=True)
class ScanReport:
    l: int
    r: int
    records: tuple[dict, ...]
    groups: tuple[dict, ...]
    skipped: tuple[dict, ...]
    candidate_min: int | None
    candidate_max: int | None


def _scan_point(args):
    data, b, fibre, l, r, ord = args
    try:
        fibre = resolve_fibre(data, b, fibre)
        spaces = []
        systems = []
        for rr in range(l, r + 1):
            system = assemble_relation_system(data, b, fibre, rr, ord)
            basis = relation_basis(system)
            spaces.append(project_relations(basis, l))
            systems.append((system, basis))
        system, basis = systems[-1]
        vertices = minimal_exponents(basis.initial_exponents(), system.order)
        return {
            "point": b,
            "fibre": tuple(fibre),
            "dim_l": spaces[-1].dim,
            "dim_r": basis.dim,
            "rho0": rank_rho0(system),
            "vertices": vertices,
            "candidate_r": _stabilization(tuple(range(l, r + 1)), spaces),
        }
    except HkitError as exc:
        return {"point": b, "skipped": f"{type(exc).__name__}: {exc}"}


def _worker_count(npoints: int, workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("HKIT_THREADS")
        workers = int(env) if env else 1
    return max(1, min(workers, npoints))


def diagram_scan(data: EquationData, grid: Sequence, l: int, r: int,
                 ord: MonomialOrder | None = None,
                 fibres: Mapping | None = None, workers: int | None = None) -> ScanReport:
    """Evaluate ``dim pi_l(R_r(b))``, ``rho0`` and the diagram of ``pi_r(R_r(b))`` over a grid.

    ``fibres`` maps points to fibre lists; points without an entry use the
    identity fibre when possible and are otherwise reported as skipped.
    ``workers`` (default ``$HKIT_THREADS``, else 1) bounds the process pool.
    """
    if l > r:
        raise ValueError(f"l = {l} exceeds r = {r}")
    points = sorted({_point(b) for b in grid})
    ord = _column_order(data, ord)
    fibres = {_point(k): v for k, v in (fibres or {}).items()}
    jobs = [(data, b, fibres.get(b), l, r, ord) for b in points]
    nworkers = _worker_count(len(jobs), workers)
    if nworkers > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(_scan_point, jobs))
    else:
        results = [_scan_point(job) for job in jobs]
    records = tuple(res for res in results if "skipped" not in res)
    skipped = tuple(res for res in results if "skipped" in res)
    for res in skipped:
        log.warning("skipped %s: %s", _fmt(res["point"]), res["skipped"])
    grouped: dict = {}
    for rec in records:
        grouped.setdefault((rec["vertices"], rec["dim_l"], rec["dim_r"]), []).append(rec)
    groups = []
    for (vertices, dim_l, dim_r), recs in grouped.items():
        groups.append({
            "vertices": vertices,
            "dim_l": dim_l,
            "dim_r": dim_r,
            "rho0": sorted({rec["rho0"] for rec in recs}),
            "points": [rec["point"] for rec in recs],
        })
    groups.sort(key=lambda g: g["points"][0])
    cands = [rec["candidate_r"] for rec in records if rec["candidate_r"] is not None]
    return ScanReport(l, r, records, tuple(groups), skipped,
                      min(cands) if cands else None, max(cands) if cands else None)
