"""Random generators and independent oracles shared by the test modules.

The oracles never call the star product: an operator sum c(x) u^b tau^j is
read as c(x) d^b tau^(j-|b|) and applied directly to polynomials in x
(tensored with powers of tau).
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from math import prod

import sympy

from wkbcalc.coeffs import Coeff, chart_ring
from wkbcalc.series import TauSeries, kstar_exp
from wkbcalc.wkb import WKBSymbol


# -- random data --------------------------------------------------------------


def small_fraction(rng: random.Random, allow_zero=True):
    while True:
        q = Fraction(rng.randint(-4, 4), rng.choice([1, 1, 2, 3]))
        if q or allow_zero:
            return q


def random_poly_coeff(rng, n, xdeg=2, udeg=3, terms=3) -> Coeff:
    R, xs, us = chart_ring(n)
    total = R.zero
    for _ in range(terms):
        mono = R.one
        for x in xs:
            mono *= x ** rng.randint(0, xdeg)
        budget = rng.randint(0, udeg)
        for u in us:
            k = rng.randint(0, budget)
            budget -= k
            mono *= u**k
        q = small_fraction(rng)
        total += mono * sympy.QQ(q.numerator, q.denominator)
    return Coeff(n, total)


def random_unit(rng, n) -> Coeff:
    """A nonzero u-free function, sometimes with a denominator."""
    kind = rng.randrange(3)
    x = Coeff.x(n, rng.randrange(n))
    if kind == 0:
        return Coeff.const(n, small_fraction(rng, allow_zero=False))
    if kind == 1:
        return x * x + 1
    return (x + 2) / (x * x + 1)


def random_symbol(rng, n, top=None, depth=None, udeg=3, xdeg=2, rational=False) -> WKBSymbol:
    """Random symbol with nonzero top coefficient, exact unless ``depth`` is given."""
    top = rng.randint(-1, 2) if top is None else top
    span = depth if depth is not None else rng.randint(1, 3)
    terms = {}
    for j in range(top - span + 1, top + 1):
        if j == top or rng.random() < 0.7:
            c = random_poly_coeff(rng, n, xdeg, udeg)
            if rational and rng.random() < 0.3:
                c = c / (Coeff.x(n, 0) + 1)
            terms[j] = c
    while terms[top].is_zero:
        terms[top] = random_poly_coeff(rng, n, xdeg, udeg)
    P = WKBSymbol(n, terms)
    return P.truncate(depth) if depth is not None else P


def random_invertible(rng, n, depth=None) -> WKBSymbol:
    m = rng.randint(-1, 2)
    P = random_symbol(rng, n, top=m, depth=depth)
    terms = P.terms
    terms[m] = random_unit(rng, n)
    return WKBSymbol(n, terms, floor=P.floor)


def random_kstar(rng, depth) -> TauSeries:
    odd = {j: small_fraction(rng) for j in range(-1, -depth, -2) if rng.random() < 0.8}
    return kstar_exp(odd, depth)


# -- polynomial action oracle -------------------------------------------------
# A "state" is {(x_exponents, tau_power): Fraction}.


def symbol_terms(P: WKBSymbol):
    """[(j, x_exps, u_exps, coefficient)] for a symbol with polynomial coefficients."""
    out = []
    n = P.n
    for j, c in P.terms.items():
        assert c.den == 1, "polynomial action needs polynomial coefficients"
        for m, q in c.num.terms():
            out.append((j, m[:n], m[n:], Fraction(int(q.numerator), int(q.denominator))))
    return out


def _falling(e, k):
    return prod(range(e - k + 1, e + 1)) if k <= e else 0


def _derive(state, beta):
    out = {}
    for (e, k), c in state.items():
        f = prod(_falling(a, b) for a, b in zip(e, beta))
        if f:
            key = (tuple(a - b for a, b in zip(e, beta)), k)
            out[key] = out.get(key, 0) + c * f
    return out


def _times_x(state, a):
    return {(tuple(x + y for x, y in zip(e, a)), k): c for (e, k), c in state.items()}


def _shift_tau(state, m):
    return {(e, k + m): c for (e, k), c in state.items()}


def _accumulate(total, part, scale=1):
    for key, c in part.items():
        total[key] = total.get(key, 0) + scale * c


def _clean(state):
    return {k: v for k, v in state.items() if v}


def apply_operator(P: WKBSymbol, state):
    """c(x) u^b tau^j acts as c(x) d^b tau^(j-|b|)."""
    out = {}
    for j, a, b, c in symbol_terms(P):
        part = _shift_tau(_times_x(_derive(state, b), a), j - sum(b))
        _accumulate(out, part, c)
    return _clean(out)


def apply_transpose(P: WKBSymbol, state):
    """(x^a d^b tau^m)^t = (-tau)^m (-d)^b x^a, with m = j - |b|."""
    out = {}
    for j, a, b, c in symbol_terms(P):
        part = _shift_tau(_derive(_times_x(state, a), b), j - sum(b))
        _accumulate(out, part, -c if j % 2 else c)
    return _clean(out)


def monomial_basis(n, max_degree=6):
    for e in product(range(max_degree + 1), repeat=n):
        if sum(e) <= max_degree:
            yield {(e, 0): Fraction(1)}


# -- sympy oracle for rational coefficients and half-densities -----------------


def _split_u(c: Coeff):
    """{u_exps: sympy expression in x} for a coefficient function."""
    n = c.n
    den = c.den.as_expr()
    groups = {}
    for m, q in c.num.terms():
        mono = sympy.Rational(int(q.numerator), int(q.denominator))
        for i, e in enumerate(m[:n]):
            mono *= sympy.Symbol(f"x{i + 1}") ** e
        groups[m[n:]] = groups.get(m[n:], 0) + mono
    return {b: expr / den for b, expr in groups.items()}


def sym_apply(P: WKBSymbol, f: dict):
    """Apply P to {tau_power: sympy expression}."""
    xs = [sympy.Symbol(f"x{i + 1}") for i in range(P.n)]
    out = {}
    for j, c in P.terms.items():
        for b, coef in _split_u(c).items():
            for k, expr in f.items():
                d = expr
                for x, e in zip(xs, b):
                    if e:
                        d = sympy.diff(d, x, e)
                key = k + j - sum(b)
                out[key] = out.get(key, 0) + coef * d
    return out


def sym_transpose_apply(P: WKBSymbol, f: dict):
    xs = [sympy.Symbol(f"x{i + 1}") for i in range(P.n)]
    out = {}
    for j, c in P.terms.items():
        for b, coef in _split_u(c).items():
            for k, expr in f.items():
                d = coef * expr
                for x, e in zip(xs, b):
                    if e:
                        d = sympy.diff(d, x, e)
                key = k + j - sum(b)
                out[key] = out.get(key, 0) + (-d if j % 2 else d)
    return out


def sym_equal(f: dict, g: dict):
    keys = set(f) | set(g)
    return all(sympy.simplify(f.get(k, 0) - g.get(k, 0)) == 0 for k in keys)
