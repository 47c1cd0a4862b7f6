"""Hironaka's formal division on jets, diagrams of initial exponents and standard bases.

All results are statements modulo ``(x)^(D+1)``.  When the order weights are all
equal every divisor term discarded by truncation has degree above ``D``, so the
remainder returned by :func:`hironaka_divide` is the degree-``D`` jet of the
remainder of the untruncated division, and each quotient ``Q_i`` is exact up to
degree ``D - |alpha_i|``.  For unequal weights the division identity still
holds mod ``(x)^(D+1)`` but the jets describe ``M + (x)^(D+1)`` rather than ``M``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    Exponent,
    MonomialOrder,
    Ordering,
    TruncatedSeriesVector,
    leading_term,
    monomial_multiply,
    multiindices,
)
from .errors import DimensionMismatch, InsufficientTruncation, TruncationMismatch, ZeroDivisor
from .linalg import RationalMatrix, Subspace, nullspace, rref, subspace_contains

__all__ = [
    "Diagram",
    "DivisionResult",
    "hironaka_divide",
    "compute_diagram",
    "standard_basis",
    "membership_test",
    "complement_basis",
    "artin_rees_lambda",
    "check_chevalley_estimate",
    "compare_diagrams",
    "minimal_exponents",
]


def minimal_exponents(exps, ord: MonomialOrder) -> tuple[Exponent, ...]:
    """Minimal elements under ``(alpha, j) <= (beta, j) iff alpha <= beta``, ascending in ``ord``."""
    out: list[Exponent] = []
    for e in sorted(set(exps), key=ord.key):
        # anything dividing e precedes it in a compatible order
        if not any(v.divides(e) for v in out):
            out.append(e)
    return tuple(out)


@dataclass(frozen=True)
class Diagram:
    """A region ``N`` with ``N + N^n = N``, stored by its vertices.

    The region is only certified on exponents of total degree at most
    ``certified_degree``.
    """

    order: MonomialOrder
    vertices: tuple[Exponent, ...]
    certified_degree: int

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices), key=self.order.key))
        for a in verts:
            for b in verts:
                if a != b and a.divides(b):
                    raise ValueError(f"vertex {a} divides vertex {b}")
        object.__setattr__(self, "vertices", verts)

    @property
    def dims(self) -> tuple[int, int]:
        return self.order.dims

    def __contains__(self, e: Exponent) -> bool:
        return any(v.divides(e) for v in self.vertices)

    def is_empty(self) -> bool:
        return not self.vertices

    def complement(self, max_degree: int) -> list[Exponent]:
        """Exponents outside the region with ``|alpha| <= max_degree``, ascending in the order."""
        return [e for e in self.order.exponents(max_degree) if e not in self]


@dataclass(frozen=True)
class DivisionResult:
    quotients: tuple[TruncatedSeriesVector, ...]
    remainder: TruncatedSeriesVector
    initial_exponents: tuple[Exponent, ...]
    order: MonomialOrder

    def region_of(self, e: Exponent) -> int | None:
        """Index ``i`` (0-based) with ``e`` in ``Delta_i``, or ``None`` when ``e`` lies in ``Delta``."""
        return _route(e, self.initial_exponents)


def _route(e: Exponent, inits: Sequence[Exponent]) -> int | None:
    for i, v in enumerate(inits):
        if v.divides(e):
            return i
    return None


def _check_family(series: Sequence[TruncatedSeriesVector], dims, D) -> None:
    for s in series:
        if s.dims != dims:
            raise DimensionMismatch(f"dims {s.dims} vs {dims}")
        if s.degree != D:
            raise TruncationMismatch(f"truncation degrees {s.degree} and {D}")


def hironaka_divide(F: TruncatedSeriesVector, divisors: Sequence[TruncatedSeriesVector],
                    ord: MonomialOrder) -> DivisionResult:
    """Divide ``F`` by ``divisors``: ``F = sum Q_i Phi_i + R`` with supports in the partition.

    Terms are processed in increasing order; a term in several translates
    ``(alpha_i, j_i) + N^n`` goes to the first one.
    """
    n, p, D = F.nvars, F.ncomp, F.degree
    if (n, p) != ord.dims:
        raise DimensionMismatch(f"series dims {F.dims} vs order dims {ord.dims}")
    _check_family(divisors, F.dims, D)
    inits = []
    lead_coeffs = []
    for i, phi in enumerate(divisors):
        if phi.is_zero():
            raise ZeroDivisor(f"divisor {i + 1} is zero mod (x)^{D + 1}")
        e, c = leading_term(phi, ord)
        inits.append(e)
        lead_coeffs.append(c)
    tails = [[(t, v) for t, v in phi.items() if t != inits[i]] for i, phi in enumerate(divisors)]

    key = ord.key
    work: dict[Exponent, Fraction] = dict(F.items())
    heap = [(key(e), e) for e in work]
    heapq.heapify(heap)
    quot: list[dict] = [{} for _ in divisors]
    rem: dict[Exponent, Fraction] = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = work.pop(e, None)
        if c is None:
            continue
        i = _route(e, inits)
        if i is None:
            rem[e] = c
            continue
        gamma = tuple(a - b for a, b in zip(e.alpha, inits[i].alpha))
        factor = c / lead_coeffs[i]
        quot[i][Exponent(gamma, 1)] = factor
        shift = sum(gamma)
        for t, v in tails[i]:
            if sum(t.alpha) + shift > D:
                continue
            s = Exponent(tuple(a + b for a, b in zip(t.alpha, gamma)), t.j)
            old = work.get(s)
            new = (old or 0) - factor * v
            if new:
                if old is None:
                    heapq.heappush(heap, (key(s), s))
                work[s] = new
            elif old is not None:
                del work[s]
    quotients = tuple(TruncatedSeriesVector(n, 1, D, q) for q in quot)
    return DivisionResult(quotients, TruncatedSeriesVector(n, p, D, rem), tuple(inits), ord)


def _shifted_generators(generators, D, min_shift=0):
    n = generators[0].nvars
    for phi in generators:
        for gamma in multiindices(n, D, min_shift):
            row = monomial_multiply(phi, gamma)
            if row:
                yield row


def _echelon(generators: Sequence[TruncatedSeriesVector], ord: MonomialOrder, D: int,
             min_shift: int = 0):
    """Reduced echelon form of the span of truncated ``x^gamma * Phi_i``.

    Columns are all exponents of degree ``<= D`` in ascending order, so the
    pivot columns are exactly the initial exponents of nonzero jets in the span.
    """
    cols = ord.exponents(D)
    index = {e: k for k, e in enumerate(cols)}
    rows = []
    if generators:
        _check_family(generators, ord.dims, D)
        for s in _shifted_generators(generators, D, min_shift):
            v = [0] * len(cols)
            for e, c in s.items():
                v[index[e]] = c
            rows.append(v)
    if not rows:
        return cols, [], []
    R, pivots = rref(RationalMatrix(rows, cols=len(cols)))
    return cols, R.entries[: len(pivots)], pivots


def _check_dims(generators, ord, D):
    if D < 0:
        raise ValueError("truncation degree must be nonnegative")
    for g in generators:
        if g.dims != ord.dims:
            raise DimensionMismatch(f"generator dims {g.dims} vs order dims {ord.dims}")


def compute_diagram(generators: Sequence[TruncatedSeriesVector], ord: MonomialOrder, D: int) -> Diagram:
    _check_dims(generators, ord, D)
    cols, _, pivots = _echelon(generators, ord, D)
    return Diagram(ord, minimal_exponents([cols[c] for c in pivots], ord), D)


def standard_basis(generators: Sequence[TruncatedSeriesVector], ord: MonomialOrder,
                   D: int) -> list[TruncatedSeriesVector]:
    """Monic ``Psi_i = x^(alpha_i, j_i) + R_i`` per vertex, ``supp R_i`` in the complement."""
    _check_dims(generators, ord, D)
    cols, rows, pivots = _echelon(generators, ord, D)
    pivot_exps = [cols[c] for c in pivots]
    vertices = set(minimal_exponents(pivot_exps, ord))
    n, p = ord.dims
    basis = []
    for row, e in zip(rows, pivot_exps):
        if e in vertices:
            basis.append(TruncatedSeriesVector(n, p, D, {cols[k]: v for k, v in enumerate(row) if v}))
    return basis


def membership_test(G: TruncatedSeriesVector, generators: Sequence[TruncatedSeriesVector],
                    ord: MonomialOrder, D: int) -> tuple[bool, TruncatedSeriesVector]:
    """Whether ``G`` lies in ``M + (x)^(D+1)``, with the remainder on division by the standard basis."""
    _check_dims(list(generators) + [G], ord, D)
    if G.degree != D:
        raise TruncationMismatch(f"G truncated at {G.degree}, expected {D}")
    basis = standard_basis(generators, ord, D)
    if not basis:
        return G.is_zero(), G
    R = hironaka_divide(G, basis, ord).remainder
    return R.is_zero(), R


def complement_basis(generators: Sequence[TruncatedSeriesVector], ord: MonomialOrder, D: int,
                     r: int) -> list[Exponent]:
    if r > D:
        raise InsufficientTruncation(f"complement to degree {r} needs truncation >= {r}, got {D}")
    return compute_diagram(generators, ord, D).complement(r)


def artin_rees_lambda(generators: Sequence[TruncatedSeriesVector], ord: MonomialOrder, D: int) -> int:
    """``max |alpha_i|`` over the vertices of the computed diagram (0 for the zero module).

    Raises :class:`InsufficientTruncation` when a vertex sits in one of the two
    top degree layers, since further vertices may then be hidden above ``D``.
    This completeness check is a heuristic.
    """
    diagram = compute_diagram(generators, ord, D)
    degrees = [v.degree for v in diagram.vertices]
    if not degrees:
        return 0
    if max(degrees) >= D - 1:
        raise InsufficientTruncation(
            f"diagram still gains vertices in degree {max(degrees)} of truncation {D}"
        )
    return max(degrees)


def check_chevalley_estimate(generators: Sequence[TruncatedSeriesVector], ord: MonomialOrder,
                             D: int, l: int) -> bool:
    """Check ``M cap m^(l+lambda) subset m^l M`` on jets of degree ``<= D``."""
    lam = artin_rees_lambda(generators, ord, D)
    if l + lam > D:
        raise InsufficientTruncation(f"l + lambda = {l + lam} exceeds truncation {D}")
    if not generators:
        return True
    cols, rows, _ = _echelon(generators, ord, D)
    ncols = len(cols)
    low = [k for k, e in enumerate(cols) if e.degree < l + lam]
    if rows and low:
        # combinations of the basis of M whose low-degree part cancels
        L = RationalMatrix([[row[k] for row in rows] for k in low], cols=len(rows))
        combos = nullspace(L).basis
        deep = [[sum((c * row[k] for c, row in zip(w, rows) if c), Fraction(0)) for k in range(ncols)]
                for w in combos]
    else:
        deep = rows
    deep_space = Subspace.span(deep, ncols)
    _, shifted, _ = _echelon(generators, ord, D, min_shift=l)
    return subspace_contains(Subspace.span(shifted, ncols), deep_space)


def compare_diagrams(N1: Diagram, N2: Diagram) -> Ordering:
    """Lexicographic comparison of vertex sequences padded with infinity."""
    if N1.order != N2.order:
        raise DimensionMismatch("diagrams built over different orders")
    key = N1.order.key
    for k in range(max(len(N1.vertices), len(N2.vertices))):
        if k >= len(N1.vertices):
            return Ordering.GREATER
        if k >= len(N2.vertices):
            return Ordering.LESS
        a, b = key(N1.vertices[k]), key(N2.vertices[k])
        if a != b:
            return Ordering.LESS if a < b else Ordering.GREATER
    return Ordering.EQUAL
