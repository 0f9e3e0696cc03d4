"""Coefficient functions: polynomials in u_1..u_n over rational functions of x_1..x_n.

Values are ``num / den`` with ``num`` in QQ[x, u] and ``den`` in QQ[x], both
sympy sparse polynomials.  The pair is kept reduced (gcd cancelled, ``den``
monic, ``den == 1`` for polynomials).  Cancelling
is expensive, so it only runs when a denominator is non-constant.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import QQ
from sympy.polys.rings import ring

from .errors import InvalidDensity, ParseError


@lru_cache(maxsize=None)
def chart_ring(n: int):
    """(R, xs, us) with R = QQ[x1..xn, u1..un]."""
    if n < 1:
        raise ValueError("chart dimension must be >= 1")
    names = [f"x{i}" for i in range(1, n + 1)] + [f"u{i}" for i in range(1, n + 1)]
    R, *gens = ring(",".join(names), QQ)
    return R, tuple(gens[:n]), tuple(gens[n:])


def _to_qq(c):
    if isinstance(c, Fraction):
        return QQ(c.numerator, c.denominator)
    return QQ(c)


class Coeff:
    __slots__ = ("n", "num", "den")

    def __init__(self, n, num, den=None, _reduced=False):
        R = chart_ring(n)[0]
        self.n = n
        num = R(num)
        den = R.one if den is None else R(den)
        if not _reduced:
            num, den = _reduce(n, num, den)
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------

    @classmethod
    def const(cls, n, c):
        R = chart_ring(n)[0]
        return cls(n, R(_to_qq(c)), R.one, _reduced=True)

    @classmethod
    def x(cls, n, i):
        return cls(n, chart_ring(n)[1][i], None, _reduced=True)

    @classmethod
    def u(cls, n, i):
        return cls(n, chart_ring(n)[2][i], None, _reduced=True)

    @classmethod
    def parse(cls, n, text):
        """Parse a sympy-readable expression in x1..xn, u1..un."""
        R, xs, us = chart_ring(n)
        names = [str(g) for g in xs + us]
        try:
            expr = sympy.sympify(text, locals={s: sympy.Symbol(s) for s in names})
            expr = sympy.together(expr)
            num, den = sympy.fraction(expr)
            num_p = R.from_expr(sympy.expand(num))
            den_p = R.from_expr(sympy.expand(den))
        except (sympy.SympifyError, ValueError, TypeError) as exc:
            raise ParseError(f"cannot parse coefficient {text!r}: {exc}") from exc
        if den_p == 0:
            raise ParseError("zero denominator")
        if any(e[n:] != (0,) * n for e in den_p.monoms()):
            raise ParseError("denominator must not depend on u")
        return cls(n, num_p, den_p)

    # -- predicates -------------------------------------------------------

    @property
    def is_zero(self):
        return not self.num

    def is_u_free(self):
        zero = (0,) * self.n
        return all(m[self.n:] == zero for m in self.num.monoms())

    def is_x_free(self):
        zero = (0,) * self.n
        if self.den != 1:
            return False
        return all(m[: self.n] == zero for m in self.num.monoms())

    def is_constant(self):
        return self.den == 1 and self.num.is_ground

    def is_unit(self):
        """Unit of the coefficient ring: nonzero and independent of u."""
        return not self.is_zero and self.is_u_free()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        c = self.num.LC if self.num else QQ(0)
        return Fraction(int(c.numerator), int(c.denominator))

    def u_degree(self):
        if not self.num:
            return -1
        return max(sum(m[self.n:]) for m in self.num.monoms())

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Coeff):
            return Coeff.const(self.n, other)
        if other.n != self.n:
            raise ValueError("coefficient functions live on different charts")
        return other

    def __add__(self, other):
        other = self._check(other)
        if self.den == other.den:
            if self.den == 1:
                return Coeff(self.n, self.num + other.num, self.den, _reduced=True)
            return Coeff(self.n, self.num + other.num, self.den)
        return Coeff(self.n, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Coeff(self.n, -self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Coeff):
            return self.scale(other)
        other = self._check(other)
        if self.den == 1 and other.den == 1:
            return Coeff(self.n, self.num * other.num, self.den, _reduced=True)
        return Coeff(self.n, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def scale(self, c):
        c = _to_qq(c)
        if not c:
            return Coeff(self.n, self.num.ring.zero, None, _reduced=True)
        return Coeff(self.n, self.num * c, self.den, _reduced=True)

    def inverse(self):
        """Inverse of a unit (nonzero, u-free)."""
        if not self.is_unit():
            raise InvalidDensity("only nonzero u-free functions are invertible")
        return Coeff(self.n, self.den, self.num)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Coeff.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff_x(self, i):
        x = chart_ring(self.n)[1][i]
        if self.den == 1:
            return Coeff(self.n, self.num.diff(x), self.den, _reduced=True)
        num = self.num.diff(x) * self.den - self.num * self.den.diff(x)
        return Coeff(self.n, num, self.den**2)

    def diff_u(self, i):
        u = chart_ring(self.n)[2][i]
        return Coeff(self.n, self.num.diff(u), self.den, self.den == 1)

    def negate_u(self):
        """f(x, -u)."""
        n = self.n
        terms = {}
        for m, c in self.num.terms():
            terms[m] = -c if sum(m[n:]) % 2 else c
        return Coeff(n, self.num.ring.from_dict(terms), self.den, _reduced=True)

    # -- comparison / display --------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Coeff):
            return self.n == other.n and self.num == other.num and self.den == other.den
        try:
            return self == Coeff.const(self.n, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.n, self.num, self.den))

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()

    def __repr__(self):
        if self.den == 1:
            return f"{self.num}"
        return f"({self.num})/({self.den})"

    # -- json -------------------------------------------------------------

    def to_json_monomials(self) -> list:
        """Group by u-monomial: [{"u_exps", "num", "den"}] with x-only polys."""
        n = self.n
        R = self.num.ring
        groups = {}
        for m, c in self.num.terms():
            key = m[n:]
            groups.setdefault(key, {})[m[:n] + (0,) * n] = c
        out = []
        for key in sorted(groups, reverse=True):
            part = Coeff(n, R.from_dict(groups[key]), self.den)
            out.append({
                "u_exps": list(key),
                "num": _poly_to_json(part.num, n),
                "den": _poly_to_json(part.den, n),
            })
        return out

    @classmethod
    def from_json_monomials(cls, n, items: list) -> "Coeff":
        R, _, us = chart_ring(n)
        total = cls.const(n, 0)
        try:
            for item in items:
                u_exps = [int(e) for e in item["u_exps"]]
                if len(u_exps) != n:
                    raise ParseError("u_exps has wrong length")
                num = _poly_from_json(item["num"], n)
                den = _poly_from_json(item.get("den", [[[0] * n, "1"]]), n)
                if not den:
                    raise ParseError("zero denominator")
                mono = R.one
                for u, e in zip(us, u_exps):
                    mono *= u**e
                total = total + cls(n, num * mono, den)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad coefficient JSON: {exc}") from exc
        return total

    def x_only_to_json(self) -> dict:
        if not self.is_u_free():
            raise ValueError("not an x-only function")
        return {"num": _poly_to_json(self.num, self.n), "den": _poly_to_json(self.den, self.n)}

    @classmethod
    def x_only_from_json(cls, n, data) -> "Coeff":
        try:
            num = _poly_from_json(data["num"], n)
            den = _poly_from_json(data.get("den", [[[0] * n, "1"]]), n)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad density JSON: {exc}") from exc
        if not den:
            raise ParseError("zero denominator")
        return cls(n, num, den)


def _reduce(n, num, den):
    R = num.ring
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return R.zero, R.one
    if den.is_ground:
        return num.quo_ground(den.LC), R.one
    num, den = num.cancel(den)
    if den.is_ground:
        return num.quo_ground(den.LC), R.one
    lc = den.LC
    if lc != 1:
        num, den = num.quo_ground(lc), den.quo_ground(lc)
    return num, den


def _poly_to_json(p, n):
    return [[list(m[:n]), str(Fraction(int(c.numerator), int(c.denominator)))]
            for m, c in sorted(p.terms(), reverse=True)]


def _poly_from_json(items, n):
    R = chart_ring(n)[0]
    terms = {}
    for exps, c in items:
        exps = [int(e) for e in exps]
        if len(exps) != n or min(exps, default=0) < 0:
            raise ParseError("bad exponent list")
        key = tuple(exps) + (0,) * n
        terms[key] = terms.get(key, QQ(0)) + _to_qq(Fraction(c))
    return R.from_dict({k: v for k, v in terms.items() if v})
