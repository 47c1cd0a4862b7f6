"""Jet fields on affine strata and the Borel compatibility check.

A field of order ``m`` on the stratum ``a(t) = a0 + sum_k t_k u_k`` assigns a
polynomial ``f_alpha(t)`` to every ``|alpha| <= m``; it stands for the
candidate Taylor polynomial ``sum f_alpha(a) x^alpha / alpha!``.  Borel's
condition asks that moving along ``u_k`` differentiates the coefficients the
same way formal differentiation in ``x`` does:

    d f_alpha / d t_k = sum_i (u_k)_i f_(alpha + e_i),   |alpha| <= m - 1.

The little-o remainder conditions of a Whitney field are not decided here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import Polynomial, as_rational, multiindices
from .errors import DimensionMismatch
from .linalg import RationalMatrix, rank

__all__ = ["AffineStratum", "JetField", "BorelFailure", "borel_check", "field_of_function"]


@dataclass(frozen=True)
class AffineStratum:
    base: tuple[Fraction, ...]
    directions: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        base = tuple(as_rational(x) for x in self.base)
        dirs = tuple(tuple(as_rational(x) for x in u) for u in self.directions)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)
        if any(len(u) != len(base) for u in dirs):
            raise DimensionMismatch("directions must live in the ambient space of the base point")
        if dirs and rank(RationalMatrix(dirs, cols=len(base))) != len(dirs):
            raise ValueError("stratum directions are linearly dependent")

    @property
    def ambient(self) -> int:
        return len(self.base)

    @property
    def dim(self) -> int:
        return len(self.directions)

    def parametrization(self) -> list[Polynomial]:
        """``a(t)`` as ``n`` polynomials in the ``d`` stratum parameters."""
        d = max(self.dim, 1)
        out = []
        for i, a0 in enumerate(self.base):
            g = Polynomial.constant(d, a0)
            for k, u in enumerate(self.directions):
                if u[i]:
                    g = g + Polynomial.variable(d, k) * u[i]
            out.append(g)
        return out


@dataclass(frozen=True)
class JetField:
    """Coefficients ``f_alpha`` (polynomials in the stratum parameters) for ``|alpha| <= m``.

    Missing multiindices are zero.  A point stratum (``d = 0``) uses one dummy
    parameter so that coefficients are still polynomials.
    """

    stratum: AffineStratum
    m: int
    coefficients: Mapping[tuple[int, ...], Polynomial]

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("order m must be nonnegative")
        n, d = self.stratum.ambient, max(self.stratum.dim, 1)
        coeffs = {}
        for alpha, g in dict(self.coefficients).items():
            alpha = tuple(alpha)
            if len(alpha) != n or sum(alpha) > self.m or any(a < 0 for a in alpha):
                raise DimensionMismatch(f"multiindex {alpha} outside |alpha| <= {self.m} in {n} variables")
            if not isinstance(g, Polynomial):
                g = Polynomial.constant(d, g)
            if g.nvars != d:
                raise DimensionMismatch(f"coefficient for {alpha} has {g.nvars} parameters, expected {d}")
            if not g.is_zero():
                coeffs[alpha] = g
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def ambient(self) -> int:
        return self.stratum.ambient

    def coefficient(self, alpha) -> Polynomial:
        return self.coefficients.get(tuple(alpha), Polynomial(max(self.stratum.dim, 1)))

    def __add__(self, other: "JetField") -> "JetField":
        self._check(other)
        keys = set(self.coefficients) | set(other.coefficients)
        return JetField(self.stratum, self.m, {a: self.coefficient(a) + other.coefficient(a) for a in keys})

    def scale(self, c) -> "JetField":
        c = as_rational(c)
        return JetField(self.stratum, self.m, {a: g * c for a, g in self.coefficients.items()})

    def perturbed(self, alpha, c) -> "JetField":
        """Copy with the constant ``c`` added to ``f_alpha``."""
        coeffs = dict(self.coefficients)
        coeffs[tuple(alpha)] = self.coefficient(alpha) + as_rational(c)
        return JetField(self.stratum, self.m, coeffs)

    def _check(self, other):
        if other.stratum != self.stratum or other.m != self.m:
            raise DimensionMismatch("fields on different strata or of different orders")


@dataclass(frozen=True)
class BorelFailure:
    """First identity that fails: multiindex ``alpha`` and direction ``k`` (1-based)."""

    alpha: tuple[int, ...]
    k: int
    lhs: Polynomial
    rhs: Polynomial


def borel_check(field: JetField) -> BorelFailure | None:
    """``None`` when every Borel identity holds, else the first failure.

    Identities are visited with ``alpha`` ascending in ``(|alpha|, alpha)`` and
    then by direction.  Order 0 passes vacuously.
    """
    n = field.ambient
    for alpha in multiindices(n, field.m - 1):
        f = field.coefficient(alpha)
        for k, u in enumerate(field.stratum.directions):
            lhs = f.derivative(k)
            rhs = Polynomial(f.nvars)
            for i in range(n):
                if u[i]:
                    up = list(alpha)
                    up[i] += 1
                    rhs = rhs + field.coefficient(up) * u[i]
            if lhs != rhs:
                return BorelFailure(alpha, k + 1, lhs, rhs)
    return None


def field_of_function(g: Polynomial, stratum: AffineStratum, m: int) -> JetField:
    """Field of derivatives ``f_alpha(t) = (d^alpha g)(a(t))`` for ``|alpha| <= m``."""
    if g.nvars != stratum.ambient:
        raise DimensionMismatch(f"g has {g.nvars} variables, stratum lives in {stratum.ambient}")
    a = stratum.parametrization()
    return JetField(stratum, m, {alpha: g.partial(alpha).compose(a)
                                 for alpha in multiindices(g.nvars, m)})
