"""Test-side builders and independent oracles.

Nothing here calls the elimination, division or relation code under test;
the oracles use plain dict arithmetic, naive Fraction elimination or sympy.
"""

from fractions import Fraction
import random

import sympy as sp

from hkit.core import Exponent, MonomialOrder, Polynomial, TruncatedSeriesVector, leading_term, order_compare


def ser(n, D, *terms, p=1):
    """ser(2, 4, ((1, 0), 3), ((0, 2), 1, 2)) -> 3*x1 + x2^2 in component 2."""
    out = {}
    for t in terms:
        alpha, c = t[0], t[1]
        j = t[2] if len(t) > 2 else 1
        out[Exponent(tuple(alpha), j)] = Fraction(c)
    return TruncatedSeriesVector(n, p, D, out)


def poly(n, *terms):
    return Polynomial(n, {tuple(a): c for a, c in terms})


def from_sympy(expr, gens):
    P = sp.Poly(sp.expand(expr), *gens)
    return Polynomial(len(gens), {m: Fraction(int(c.p), int(c.q)) for m, c in P.terms()})


def to_sympy(f, gens):
    return sum((sp.Rational(c.numerator, c.denominator) * sp.prod([g**a for g, a in zip(gens, alpha)])
                for alpha, c in f.items()), sp.Integer(0))


# ---------------------------------------------------------------- random data

def random_series(rng, n, p, D, max_terms=6, lo=-9, hi=9, nonzero=False):
    terms = {}
    for _ in range(rng.randint(0 if not nonzero else 1, max_terms)):
        deg = rng.randint(0, D)
        alpha = [0] * n
        for _ in range(deg):
            alpha[rng.randrange(n)] += 1
        c = rng.randint(lo, hi)
        if nonzero and c == 0:
            c = 1
        terms[Exponent(tuple(alpha), rng.randint(1, p))] = c
    F = TruncatedSeriesVector(n, p, D, terms)
    if nonzero and F.is_zero():
        return random_series(rng, n, p, D, max_terms, lo, hi, nonzero)
    return F


def random_poly(rng, n, max_deg, max_terms=4, lo=-3, hi=3):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        deg = rng.randint(0, max_deg)
        alpha = [0] * n
        for _ in range(deg):
            alpha[rng.randrange(n)] += 1
        terms[tuple(alpha)] = Fraction(rng.randint(lo, hi))
    return Polynomial(n, terms)


# ------------------------------------------------------------------- oracles

def product_jet(q_terms, phi_terms, D):
    """sum over (scalar Q) x (vector Phi) with plain dicts, truncated at D."""
    out = {}
    for a, c in q_terms.items():
        for e, v in phi_terms.items():
            alpha = tuple(x + y for x, y in zip(a.alpha, e.alpha))
            if sum(alpha) <= D:
                k = (alpha, e.j)
                out[k] = out.get(k, 0) + c * v
    return out


def recombine(quotients, divisors, remainder, D):
    total = {}
    for Q, phi in zip(quotients, divisors):
        for k, v in product_jet(dict(Q.items()), dict(phi.items()), D).items():
            total[k] = total.get(k, 0) + v
    for e, v in remainder.items():
        total[(e.alpha, e.j)] = total.get((e.alpha, e.j), 0) + v
    return {k: v for k, v in total.items() if v}


def leading_term_elimination(generators, ord, D):
    """Initial exponents of the jet span via sparse leading-term reduction.

    Independent of the dense fraction-free path: each new row is reduced by
    the stored rows whose leading exponent it contains until it vanishes or
    has a fresh leading exponent.
    """
    n = ord.nvars
    key = ord.key
    table = {}
    monos = []
    for d in range(D + 1):
        for alpha in _all_alpha(n, d):
            monos.append(alpha)
    for phi in generators:
        for gamma in monos:
            shift = sum(gamma)
            row = {}
            for e, c in phi.items():
                if sum(e.alpha) + shift <= D:
                    row[Exponent(tuple(a + b for a, b in zip(e.alpha, gamma)), e.j)] = Fraction(c)
            while row:
                lead = min(row, key=key)
                if lead not in table:
                    table[lead] = row
                    break
                piv = table[lead]
                f = row[lead] / piv[lead]
                for e, v in piv.items():
                    w = row.get(e, 0) - f * v
                    if w:
                        row[e] = w
                    else:
                        row.pop(e, None)
    return set(table)


def _all_alpha(n, d):
    if n == 1:
        yield (d,)
        return
    for k in range(d + 1):
        for rest in _all_alpha(n - 1, d - k):
            yield (k,) + rest


def naive_rref(rows):
    m = [list(map(Fraction, r)) for r in rows]
    piv = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        i = next((i for i in range(r, len(m)) if m[i][c]), None)
        if i is None:
            continue
        m[r], m[i] = m[i], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for k in range(len(m)):
            if k != r and m[k][c]:
                a = m[k][c]
                m[k] = [x - a * y for x, y in zip(m[k], m[r])]
        piv.append(c)
        r += 1
    return m, piv


def symbolic_relation_system(data, b, fibre, r, ord=None):
    """Coefficient-matching oracle: expand A(a+x) W(phi(a+x) - b) with sympy.

    Returns (column labels, list of linear-equation rows over those labels).
    """
    n, q = data.target_dim, data.q
    ord = ord or MonomialOrder(n, q)
    labels = ord.exponents(r)
    coeff = {e: sp.Symbol(f"w_{'_'.join(map(str, e.alpha))}_{e.j}") for e in labels}
    ys = sp.symbols(f"y0:{n}")
    W = [sum((coeff[e] * sp.prod([y**a for y, a in zip(ys, e.alpha)]) for e in labels if e.j == j + 1),
             sp.Integer(0)) for j in range(q)]
    rows = []
    for fp in fibre:
        chart = data.charts[fp.chart]
        xs = sp.symbols(f"x0:{chart.nvars}")
        shift = {x: x + sp.Rational(a.numerator, a.denominator) for x, a in zip(xs, fp.coords)}
        phi = [sp.expand(to_sympy(g, xs).subs(shift, simultaneous=True)) - sp.Rational(bk.numerator, bk.denominator)
               for g, bk in zip(chart.phi, b)]
        for i in range(chart.p):
            expr = 0
            for j in range(q):
                Aij = sp.expand(to_sympy(chart.A[i][j], xs).subs(shift, simultaneous=True))
                expr += Aij * W[j].subs(dict(zip(ys, phi)), simultaneous=True)
            P = sp.Poly(sp.expand(expr), *xs)
            for mono, c in P.terms():
                if sum(mono) <= r:
                    rows.append([sp.expand(c).coeff(coeff[e]) for e in labels])
    return labels, rows


def sympy_nullspace_vectors(rows, ncols):
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    M = sp.Matrix(rows)
    out = []
    for v in M.nullspace():
        out.append([Fraction(int(sp.fraction(x)[0]), int(sp.fraction(x)[1])) for x in v])
    return out


def check_division(F, divisors, ord, res):
    """Identity, support and order bounds of one division."""
    D = F.degree
    assert recombine(res.quotients, divisors, res.remainder, D) == {(e.alpha, e.j): c for e, c in F.items()}
    inits = res.initial_exponents
    for i, Q in enumerate(res.quotients):
        for g in Q.support:
            e = inits[i].shift(g.alpha)
            assert res.region_of(e) == i
    for e in res.remainder.support:
        assert res.region_of(e) is None
    if F.is_zero():
        assert res.remainder.is_zero() and all(Q.is_zero() for Q in res.quotients)
        return
    lead = leading_term(F, ord)[0]
    for i, Q in enumerate(res.quotients):
        if not Q.is_zero():
            e = inits[i].shift(leading_term(Q, MonomialOrder(ord.nvars, 1, ord.weights))[0].alpha)
            assert order_compare(e, lead, ord) >= 0
    if not res.remainder.is_zero():
        assert order_compare(leading_term(res.remainder, ord)[0], lead, ord) >= 0


def sympy_solve_system(data, b, fibre, r):
    """Affine system for the coefficients of P by direct expansion; returns sympy's solution set."""
    n, q = data.target_dim, data.q
    labels = MonomialOrder(n, q).exponents(r)
    w = {e: sp.Symbol(f"w{k}") for k, e in enumerate(labels)}
    ys = sp.symbols(f"y0:{n}")
    P = [sum((w[e] * sp.prod([y**a for y, a in zip(ys, e.alpha)]) for e in labels if e.j == j + 1),
             sp.Integer(0)) for j in range(q)]
    eqs = []
    for fp in fibre:
        chart = data.charts[fp.chart]
        xs = sp.symbols(f"x0:{chart.nvars}")
        shift = {xx: xx + sp.Rational(a.numerator, a.denominator) for xx, a in zip(xs, fp.coords)}
        phi = [sp.expand(to_sympy(g, xs).subs(shift, simultaneous=True)) - sp.Rational(bk.numerator, bk.denominator)
               for g, bk in zip(chart.phi, b)]
        for i in range(chart.p):
            expr = -to_sympy(chart.f[i], xs).subs(shift, simultaneous=True)
            for j in range(q):
                expr += to_sympy(chart.A[i][j], xs).subs(shift, simultaneous=True) * P[j].subs(
                    dict(zip(ys, phi)), simultaneous=True)
            poly_ = sp.Poly(sp.expand(expr), *xs)
            eqs.extend(c for mono, c in poly_.terms() if sum(mono) <= r)
    return sp.linsolve(eqs, list(w.values())) if eqs else sp.FiniteSet(tuple(w.values()))


def rng(seed):
    return random.Random(seed)
