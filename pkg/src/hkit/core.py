"""Exponents, monomial orders, exact polynomials and truncated power-series vectors.

Everything here works over the rationals (``fractions.Fraction``); floats are
rejected at the boundary.  A :class:`TruncatedSeriesVector` is the degree-``D``
jet of an element of ``Q[[x1..xn]]^p``; a :class:`Polynomial` is an exact
polynomial with no truncation semantics.
"""

from __future__ import annotations

import math
from enum import IntEnum
from fractions import Fraction
from itertools import combinations_with_replacement
from numbers import Rational
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import DimensionMismatch, NonzeroConstantTerm, TruncationMismatch, ZeroSeries

__all__ = [
    "Exponent",
    "MonomialOrder",
    "Ordering",
    "Polynomial",
    "TruncatedSeriesVector",
    "as_rational",
    "multiindices",
    "order_compare",
    "leading_term",
    "monomial_multiply",
    "taylor_expand_at",
    "taylor_expand_vector",
    "drop_constant",
    "jet_multiply",
    "jet_compose",
    "MonomialPowers",
]


def as_rational(value) -> Fraction:
    """Convert ints, Fractions and ``"num/den"`` strings to Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"exact rational expected, got {type(value).__name__}")


def multiindices(n: int, max_degree: int, min_degree: int = 0) -> list[tuple[int, ...]]:
    """All alpha in N^n with min_degree <= |alpha| <= max_degree, graded then lex ascending."""
    out = []
    for d in range(min_degree, max_degree + 1):
        layer = []
        for combo in combinations_with_replacement(range(n), d):
            alpha = [0] * n
            for k in combo:
                alpha[k] += 1
            layer.append(tuple(alpha))
        layer.sort()
        out.extend(layer)
    return out


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Exponent(NamedTuple):
    """Index ``(alpha, j)`` of the monomial ``x^alpha`` in component ``j`` (1-based)."""

    alpha: tuple[int, ...]
    j: int = 1

    def shift(self, beta: Sequence[int]) -> "Exponent":
        """``(alpha, j) + beta``: translation acts on alpha only."""
        if len(beta) != len(self.alpha):
            raise DimensionMismatch("multiindex length differs from exponent length")
        return Exponent(tuple(a + b for a, b in zip(self.alpha, beta)), self.j)

    @property
    def degree(self) -> int:
        return sum(self.alpha)

    def divides(self, other: "Exponent") -> bool:
        """True when ``other`` lies in ``self + N^n``."""
        return self.j == other.j and all(a <= b for a, b in zip(self.alpha, other.alpha))


def _check_exponent(e: Exponent, n: int, p: int) -> None:
    if len(e.alpha) != n:
        raise DimensionMismatch(f"exponent {e} has {len(e.alpha)} entries, expected {n}")
    if not 1 <= e.j <= p:
        raise DimensionMismatch(f"component index {e.j} outside 1..{p}")
    if any((not isinstance(a, int)) or a < 0 for a in e.alpha):
        raise ValueError(f"exponent entries must be nonnegative integers: {e}")


class MonomialOrder:
    """Total order on ``N^n x {1..p}`` with key ``(L(alpha), j, alpha)`` compared lexicographically.

    ``L`` is the positive linear form with the given weights; all-ones weights give
    the default order ``lex(|alpha|, j, alpha)``.
    """

    __slots__ = ("nvars", "ncomp", "weights", "_unit")

    def __init__(self, nvars: int, ncomp: int = 1, weights: Sequence | None = None):
        if nvars < 1 or ncomp < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if weights is None:
            weights = (1,) * nvars
        w = tuple(as_rational(x) for x in weights)
        if len(w) != nvars:
            raise DimensionMismatch(f"{len(w)} weights for {nvars} variables")
        if any(x <= 0 for x in w):
            raise ValueError("weights must be strictly positive")
        self.nvars = nvars
        self.ncomp = ncomp
        self.weights = w
        self._unit = all(x == w[0] for x in w)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.nvars, self.ncomp)

    @property
    def is_degree_compatible(self) -> bool:
        """All weights equal, so the order refines total degree."""
        return self._unit

    def weight(self, alpha: Sequence[int]):
        if self._unit:
            return sum(alpha)
        return sum(w * a for w, a in zip(self.weights, alpha))

    def key(self, e: Exponent):
        return (self.weight(e.alpha), e.j, e.alpha)

    def with_components(self, ncomp: int) -> "MonomialOrder":
        return MonomialOrder(self.nvars, ncomp, self.weights)

    def exponents(self, max_degree: int, ncomp: int | None = None) -> list[Exponent]:
        """Every exponent with ``|alpha| <= max_degree``, ascending in this order."""
        p = self.ncomp if ncomp is None else ncomp
        out = [Exponent(a, j) for a in multiindices(self.nvars, max_degree) for j in range(1, p + 1)]
        out.sort(key=self.key)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and self.dims == other.dims
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.dims, self.weights))

    def __repr__(self):
        return f"MonomialOrder(n={self.nvars}, p={self.ncomp}, weights={[str(w) for w in self.weights]})"


def order_compare(e1: Exponent, e2: Exponent, ord: MonomialOrder) -> Ordering:
    for e in (e1, e2):
        _check_exponent(e, ord.nvars, ord.ncomp)
    k1, k2 = ord.key(e1), ord.key(e2)
    if k1 < k2:
        return Ordering.LESS
    if k1 > k2:
        return Ordering.GREATER
    return Ordering.EQUAL


def _fmt_monomial(alpha, names) -> str:
    parts = []
    for k, a in enumerate(alpha):
        if a == 1:
            parts.append(names[k])
        elif a > 1:
            parts.append(f"{names[k]}^{a}")
    return "*".join(parts)


def _fmt_terms(items, names) -> str:
    if not items:
        return "0"
    chunks = []
    for alpha, c in items:
        mono = _fmt_monomial(alpha, names)
        if not mono:
            chunks.append(str(c))
        elif c == 1:
            chunks.append(mono)
        elif c == -1:
            chunks.append("-" + mono)
        else:
            chunks.append(f"{c}*{mono}")
    return " + ".join(chunks).replace("+ -", "- ")


class Polynomial:
    """Exact polynomial in ``nvars`` variables with rational coefficients.

    Immutable; arithmetic returns new objects.  Used for entries of ``A``, the
    components of ``phi`` and ``f``, and for Whitney-field coefficients.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping | Iterable = ()):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], Fraction] = {}
        for alpha, c in items:
            alpha = tuple(alpha)
            if len(alpha) != nvars:
                raise DimensionMismatch(f"monomial {alpha} in a polynomial of {nvars} variables")
            if any((not isinstance(a, int)) or a < 0 for a in alpha):
                raise ValueError(f"negative or non-integer exponent {alpha}")
            acc[alpha] = acc.get(alpha, 0) + as_rational(c)
        self._terms = {a: c for a, c in acc.items() if c != 0}

    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        return obj

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, k: int) -> "Polynomial":
        """The coordinate ``x_{k+1}`` (``k`` is 0-based)."""
        alpha = [0] * nvars
        alpha[k] = 1
        return cls(nvars, {tuple(alpha): 1})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c=1) -> "Polynomial":
        return cls(len(alpha), {tuple(alpha): c})

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, alpha) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials in different numbers of variables")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            v = out.get(a, 0) + c
            if v:
                out[a] = v
            else:
                out.pop(a, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_rational(other)
            if c == 0:
                return Polynomial._raw(self.nvars, {})
            return Polynomial._raw(self.nvars, {a: c * v for a, v in self._terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for a, c in self._terms.items():
            for b, d in other._terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0) + c * d
        return Polynomial._raw(self.nvars, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self):
        names = [f"x{k + 1}" for k in range(self.nvars)]
        items = sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]))
        return f"Polynomial({_fmt_terms(items, names)})"

    def evaluate(self, point: Sequence) -> Fraction:
        pt = [as_rational(v) for v in point]
        if len(pt) != self.nvars:
            raise DimensionMismatch(f"point of dimension {len(pt)} for {self.nvars} variables")
        total = Fraction(0)
        for alpha, c in self._terms.items():
            v = c
            for x, a in zip(pt, alpha):
                if a:
                    v *= x**a
            total += v
        return total

    def derivative(self, k: int, times: int = 1) -> "Polynomial":
        """``d^times / dx_{k+1}^times`` (``k`` 0-based)."""
        out = {}
        for alpha, c in self._terms.items():
            if alpha[k] < times:
                continue
            beta = list(alpha)
            beta[k] -= times
            out[tuple(beta)] = c * math.perm(alpha[k], times)
        return Polynomial._raw(self.nvars, out)

    def partial(self, alpha: Sequence[int]) -> "Polynomial":
        """Mixed partial derivative ``d^|alpha| / dx^alpha``."""
        g = self
        for k, a in enumerate(alpha):
            if a:
                g = g.derivative(k, a)
        return g

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``x_k -> subs[k]``; result lives in the variables of ``subs``."""
        if len(subs) != self.nvars:
            raise DimensionMismatch(f"{len(subs)} substitutions for {self.nvars} variables")
        if not subs:
            raise ValueError("cannot compose a polynomial in zero variables")
        m = subs[0].nvars
        if any(s.nvars != m for s in subs):
            raise DimensionMismatch("substituted polynomials live in different spaces")
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.constant(m, 1)} for _ in subs]

        def power(k, e):
            cache = powers[k]
            if e not in cache:
                cache[e] = power(k, e - 1) * subs[k]
            return cache[e]

        result = Polynomial(m)
        for alpha, c in self._terms.items():
            term = Polynomial.constant(m, c)
            for k, a in enumerate(alpha):
                if a:
                    term = term * power(k, a)
            result = result + term
        return result

    def shift(self, a: Sequence) -> "Polynomial":
        """The polynomial ``x -> f(a + x)``."""
        return self.compose(
            [Polynomial.variable(self.nvars, k) + as_rational(v) for k, v in enumerate(a)]
        )


class TruncatedSeriesVector:
    """Degree-``D`` jet of an element of ``Q[[x]]^p``.

    Terms of total degree above ``D`` are discarded at construction, so two
    vectors compare equal exactly when they agree mod ``(x)^(D+1)``.  Binary
    operations refuse to mix truncation degrees.
    """

    __slots__ = ("nvars", "ncomp", "degree", "_terms")

    def __init__(self, nvars: int, ncomp: int, degree: int, terms: Mapping | Iterable = ()):
        if nvars < 1 or ncomp < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if degree < 0:
            raise ValueError("truncation degree must be nonnegative")
        self.nvars = nvars
        self.ncomp = ncomp
        self.degree = degree
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, Fraction] = {}
        for e, c in items:
            if not isinstance(e, Exponent):
                e = Exponent(tuple(e[0]), e[1])
            _check_exponent(e, nvars, ncomp)
            if sum(e.alpha) > degree:
                continue
            acc[e] = acc.get(e, 0) + as_rational(c)
        self._terms = {e: c for e, c in acc.items() if c != 0}

    @classmethod
    def _raw(cls, nvars, ncomp, degree, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.ncomp = ncomp
        obj.degree = degree
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls, nvars: int, ncomp: int, degree: int) -> "TruncatedSeriesVector":
        return cls._raw(nvars, ncomp, degree, {})

    @classmethod
    def monomial(cls, e: Exponent, ncomp: int, degree: int, c=1) -> "TruncatedSeriesVector":
        return cls(len(e.alpha), ncomp, degree, {e: c})

    @classmethod
    def from_polynomial(cls, f: Polynomial, degree: int, ncomp: int = 1, j: int = 1):
        return cls(f.nvars, ncomp, degree, {Exponent(a, j): c for a, c in f.items()})

    @classmethod
    def from_components(cls, comps: Sequence["TruncatedSeriesVector"]) -> "TruncatedSeriesVector":
        """Stack scalar series (``p = 1``) into a vector."""
        if not comps:
            raise ValueError("need at least one component")
        n, D = comps[0].nvars, comps[0].degree
        terms = {}
        for j, s in enumerate(comps, start=1):
            if s.ncomp != 1 or s.nvars != n:
                raise DimensionMismatch("components must be scalar series in the same variables")
            if s.degree != D:
                raise TruncationMismatch(f"components truncated at {D} and {s.degree}")
            for e, c in s._terms.items():
                terms[Exponent(e.alpha, j)] = c
        return cls._raw(n, len(comps), D, terms)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.nvars, self.ncomp)

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def support(self) -> frozenset[Exponent]:
        return frozenset(self._terms)

    def coefficient(self, e: Exponent) -> Fraction:
        return self._terms.get(e, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def order(self) -> int | None:
        """Smallest total degree in the support (``None`` for zero)."""
        return min((sum(e.alpha) for e in self._terms), default=None)

    def component(self, j: int) -> "TruncatedSeriesVector":
        return TruncatedSeriesVector._raw(
            self.nvars, 1, self.degree,
            {Exponent(e.alpha, 1): c for e, c in self._terms.items() if e.j == j},
        )

    def to_polynomial(self, j: int = 1) -> Polynomial:
        return Polynomial._raw(self.nvars, {e.alpha: c for e, c in self._terms.items() if e.j == j})

    def truncate(self, degree: int) -> "TruncatedSeriesVector":
        """Explicitly lower the truncation degree."""
        if degree > self.degree:
            raise TruncationMismatch(f"cannot raise truncation from {self.degree} to {degree}")
        return TruncatedSeriesVector._raw(
            self.nvars, self.ncomp, degree,
            {e: c for e, c in self._terms.items() if sum(e.alpha) <= degree},
        )

    def _check_compatible(self, other: "TruncatedSeriesVector") -> None:
        if not isinstance(other, TruncatedSeriesVector):
            raise TypeError("expected a TruncatedSeriesVector")
        if self.dims != other.dims:
            raise DimensionMismatch(f"dims {self.dims} vs {other.dims}")
        if self.degree != other.degree:
            raise TruncationMismatch(f"truncation degrees {self.degree} and {other.degree}")

    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                del out[e]
        return TruncatedSeriesVector._raw(self.nvars, self.ncomp, self.degree, out)

    def __neg__(self):
        return TruncatedSeriesVector._raw(
            self.nvars, self.ncomp, self.degree, {e: -c for e, c in self._terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TruncatedSeriesVector":
        c = as_rational(c)
        if c == 0:
            return TruncatedSeriesVector.zero(self.nvars, self.ncomp, self.degree)
        return TruncatedSeriesVector._raw(
            self.nvars, self.ncomp, self.degree, {e: c * v for e, v in self._terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, TruncatedSeriesVector):
            return jet_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, TruncatedSeriesVector):
            return jet_multiply(other, self)
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeriesVector):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.degree == other.degree
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.dims, self.degree, frozenset(self._terms.items())))

    def sorted_terms(self, ord: MonomialOrder) -> list[tuple[Exponent, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: ord.key(t[0]))

    def __repr__(self):
        names = [f"x{k + 1}" for k in range(self.nvars)]
        items = sorted(self._terms.items(), key=lambda t: (sum(t[0].alpha), t[0].j, t[0].alpha))
        if self.ncomp == 1:
            body = _fmt_terms([(e.alpha, c) for e, c in items], names)
        else:
            comps = []
            for j in range(1, self.ncomp + 1):
                comps.append(_fmt_terms([(e.alpha, c) for e, c in items if e.j == j], names))
            body = "(" + ", ".join(comps) + ")"
        return f"TruncatedSeriesVector[{self.degree}]({body})"


def leading_term(F: TruncatedSeriesVector, ord: MonomialOrder) -> tuple[Exponent, Fraction]:
    """Initial exponent and initial coefficient: the minimal support element under ``ord``."""
    if F.dims[0] != ord.nvars:
        raise DimensionMismatch("series and order use different numbers of variables")
    if F.is_zero():
        raise ZeroSeries("the zero series has no initial exponent")
    e = min(F._terms, key=ord.key)
    return e, F._terms[e]


def monomial_multiply(F: TruncatedSeriesVector, beta: Sequence[int], c=1) -> TruncatedSeriesVector:
    """``c * x^beta * F`` with terms above the truncation degree dropped."""
    c = as_rational(c)
    beta = tuple(beta)
    if len(beta) != F.nvars:
        raise DimensionMismatch("multiindex length differs from the number of variables")
    if c == 0:
        return TruncatedSeriesVector.zero(F.nvars, F.ncomp, F.degree)
    D, shift = F.degree, sum(beta)
    out = {}
    for e, v in F._terms.items():
        if sum(e.alpha) + shift <= D:
            out[Exponent(tuple(a + b for a, b in zip(e.alpha, beta)), e.j)] = c * v
    return TruncatedSeriesVector._raw(F.nvars, F.ncomp, D, out)


def taylor_expand_at(f: Polynomial, a: Sequence, D: int) -> TruncatedSeriesVector:
    """Degree-``D`` jet of ``x -> f(a + x)`` as a scalar series."""
    a = [as_rational(v) for v in a]
    if len(a) != f.nvars:
        raise DimensionMismatch(f"point of dimension {len(a)} for {f.nvars} variables")
    n = f.nvars
    out: dict[Exponent, Fraction] = {}
    for alpha, c in f.items():
        # expand prod_k (a_k + x_k)^{alpha_k}, keeping |gamma| <= D
        partial: list[tuple[tuple[int, ...], Fraction]] = [((), c)]
        for k in range(n):
            nxt = []
            for gamma, v in partial:
                used = sum(gamma)
                for g in range(min(alpha[k], D - used) + 1):
                    rest = alpha[k] - g
                    if rest and a[k] == 0:
                        continue
                    w = v * math.comb(alpha[k], g) * (a[k] ** rest if rest else 1)
                    nxt.append((gamma + (g,), w))
            partial = nxt
        for gamma, v in partial:
            if v:
                e = Exponent(gamma, 1)
                out[e] = out.get(e, 0) + v
    return TruncatedSeriesVector._raw(n, 1, D, {e: v for e, v in out.items() if v})


def taylor_expand_vector(fs: Sequence[Polynomial], a: Sequence, D: int) -> TruncatedSeriesVector:
    """Component-wise :func:`taylor_expand_at` for a vector of polynomials."""
    return TruncatedSeriesVector.from_components([taylor_expand_at(f, a, D) for f in fs])


def drop_constant(F: TruncatedSeriesVector) -> TruncatedSeriesVector:
    """``F`` minus its degree-0 terms."""
    return TruncatedSeriesVector._raw(
        F.nvars, F.ncomp, F.degree, {e: c for e, c in F._terms.items() if any(e.alpha)}
    )


def jet_multiply(s: TruncatedSeriesVector, F: TruncatedSeriesVector) -> TruncatedSeriesVector:
    """Product of a scalar jet ``s`` (``p = 1``) with a vector jet ``F``."""
    if s.ncomp != 1:
        raise DimensionMismatch("left factor of a jet product must be scalar")
    if s.nvars != F.nvars:
        raise DimensionMismatch("jets in different numbers of variables")
    if s.degree != F.degree:
        raise TruncationMismatch(f"truncation degrees {s.degree} and {F.degree}")
    D = F.degree
    out: dict[Exponent, Fraction] = {}
    for e1, c1 in s._terms.items():
        d1 = sum(e1.alpha)
        a1 = e1.alpha
        for e2, c2 in F._terms.items():
            if d1 + sum(e2.alpha) > D:
                continue
            k = Exponent(tuple(x + y for x, y in zip(a1, e2.alpha)), e2.j)
            out[k] = out.get(k, 0) + c1 * c2
    return TruncatedSeriesVector._raw(F.nvars, F.ncomp, D, {k: v for k, v in out.items() if v})


class MonomialPowers:
    """Memoised jets ``u^beta = prod_k u_k^{beta_k}`` for a fixed substitution ``u``."""

    def __init__(self, u: Sequence[TruncatedSeriesVector]):
        if not u:
            raise ValueError("empty substitution")
        m, D = u[0].nvars, u[0].degree
        for k, uk in enumerate(u):
            if uk.ncomp != 1 or uk.nvars != m:
                raise DimensionMismatch("substituted series must be scalar and share variables")
            if uk.degree != D:
                raise TruncationMismatch("substituted series have different truncation degrees")
            if any(not any(e.alpha) for e in uk._terms):
                raise NonzeroConstantTerm(f"substituted series {k + 1} has a nonzero constant term")
        self.u = list(u)
        self.nvars = m
        self.degree = D
        one = TruncatedSeriesVector._raw(m, 1, D, {Exponent((0,) * m, 1): Fraction(1)})
        self._cache: dict[tuple[int, ...], TruncatedSeriesVector] = {(0,) * len(u): one}

    def __call__(self, beta: Sequence[int]) -> TruncatedSeriesVector:
        beta = tuple(beta)
        hit = self._cache.get(beta)
        if hit is not None:
            return hit
        if sum(beta) > self.degree:
            # every u_k has order >= 1
            return TruncatedSeriesVector.zero(self.nvars, 1, self.degree)
        k = next(i for i, b in enumerate(beta) if b)
        prev = list(beta)
        prev[k] -= 1
        val = jet_multiply(self(prev), self.u[k])
        self._cache[beta] = val
        return val


def jet_compose(W, u: Sequence[TruncatedSeriesVector], D: int) -> TruncatedSeriesVector:
    """Degree-``D`` jet of ``W(u_1(x), ..., u_n(x))``.

    ``W`` is a vector jet (or a :class:`Polynomial`) in ``n = len(u)`` variables;
    each ``u_k`` is a scalar jet with zero constant term truncated at ``D``.
    Terms of ``W`` with ``|beta| > D`` cannot contribute.
    """
    powers = MonomialPowers(u)
    if powers.degree != D:
        raise TruncationMismatch(f"substitution truncated at {powers.degree}, requested {D}")
    if isinstance(W, Polynomial):
        W = TruncatedSeriesVector.from_polynomial(W, D)
    if W.nvars != len(u):
        raise DimensionMismatch(f"W has {W.nvars} variables but {len(u)} series were substituted")
    if W.degree < D:
        raise TruncationMismatch(f"W is only known to degree {W.degree} < {D}")
    m = powers.nvars
    out: dict[Exponent, Fraction] = {}
    for e, c in W._terms.items():
        if sum(e.alpha) > D:
            continue
        for t, v in powers(e.alpha)._terms.items():
            k = Exponent(t.alpha, e.j)
            out[k] = out.get(k, 0) + c * v
    return TruncatedSeriesVector._raw(m, W.ncomp, D, {k: v for k, v in out.items() if v})
