"""Truncated formal Laurent series in tau with exact rational coefficients.

A series is stored as a sparse map ``exponent -> Fraction`` together with a
precision ``floor``: every coefficient at an exponent ``>= floor`` is known
exactly, everything below is unknown.  ``floor=None`` marks an exact
(finite) series.  The public window vocabulary is derived from that:

    top_degree  highest exponent with a nonzero coefficient
    depth       top_degree - floor + 1

so a series of top degree m and depth N carries the exponents
m, m-1, ..., m-N+1.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping

from .errors import ParseError, ZeroLeadingCoefficient


def _max_floor(*floors):
    known = [f for f in floors if f is not None]
    return max(known) if known else None


class TauSeries:
    __slots__ = ("_coeffs", "_floor")

    def __init__(self, coeffs: Mapping[int, object] = (), *, depth=None, floor=None):
        if depth is not None and floor is not None:
            raise ValueError("give depth or floor, not both")
        items = {}
        for e, c in dict(coeffs).items():
            c = Fraction(c)
            if c:
                items[int(e)] = c
        if depth is not None:
            if depth < 1:
                raise ValueError("depth must be positive")
            top = max(items) if items else 0
            floor = top - depth + 1
        if floor is not None:
            items = {e: c for e, c in items.items() if e >= floor}
        self._coeffs = items
        self._floor = floor

    # -- constructors -----------------------------------------------------

    @classmethod
    def one(cls, depth=None):
        return cls({0: 1}, depth=depth)

    @classmethod
    def zero(cls, floor=None):
        return cls({}, floor=floor)

    @classmethod
    def monomial(cls, exponent, coeff=1, depth=None):
        return cls({exponent: coeff}, depth=depth)

    @classmethod
    def exp(cls, s: "TauSeries", depth: int) -> "TauSeries":
        """Truncated exponential of a series with only negative exponents."""
        if s.top_degree is not None and s.top_degree >= 0:
            raise ValueError("exp needs a series of order <= -1")
        result = cls.one(depth=depth)
        power = cls.one(depth=depth)
        for k in range(1, depth):
            power = power * s
            result = result + power * Fraction(1, factorial(k))
        return result.truncate(depth)

    # -- structure --------------------------------------------------------

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    @property
    def floor(self):
        return self._floor

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def is_exact(self) -> bool:
        return self._floor is None

    @property
    def top_degree(self):
        return max(self._coeffs) if self._coeffs else None

    @property
    def depth(self):
        if self._floor is None:
            return None
        if not self._coeffs:
            return 1
        return self.top_degree - self._floor + 1

    def _top(self):
        # top used in window bookkeeping; a zero series is O(tau^(floor-1))
        if self._coeffs:
            return max(self._coeffs)
        return None if self._floor is None else self._floor - 1

    def leading_coefficient(self) -> Fraction:
        if not self._coeffs:
            raise ZeroLeadingCoefficient("zero series has no leading coefficient")
        return self._coeffs[self.top_degree]

    def __getitem__(self, exponent: int) -> Fraction:
        return self._coeffs.get(exponent, Fraction(0))

    def truncate(self, depth: int) -> "TauSeries":
        top = self._top()
        if top is None:
            return TauSeries(self._coeffs, depth=depth)
        return self.truncate_below(top - depth + 1)

    def truncate_below(self, floor: int) -> "TauSeries":
        if self._floor is not None and floor < self._floor:
            raise ValueError("cannot extend a window below its precision")
        return TauSeries(self._coeffs, floor=floor)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TauSeries):
            other = TauSeries({0: other})
        floor = _max_floor(self._floor, other._floor)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, 0) + c
        return TauSeries(out, floor=floor)

    __radd__ = __add__

    def __neg__(self):
        return TauSeries({e: -c for e, c in self._coeffs.items()}, floor=self._floor)

    def __sub__(self, other):
        if not isinstance(other, TauSeries):
            other = TauSeries({0: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TauSeries):
            c = Fraction(other)
            return TauSeries({e: v * c for e, v in self._coeffs.items()}, floor=self._floor)
        floor = _product_floor(self, other)
        out = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                e = e1 + e2
                if floor is None or e >= floor:
                    out[e] = out.get(e, 0) + c1 * c2
        return TauSeries(out, floor=floor)

    __rmul__ = __mul__

    def inverse(self, depth=None) -> "TauSeries":
        """Multiplicative inverse; exact series other than monomials need a ``depth``."""
        if not self._coeffs:
            raise ZeroLeadingCoefficient("cannot invert the zero series")
        m = self.top_degree
        lead = self._coeffs[m]
        if depth is None and self.is_exact and len(self._coeffs) == 1:
            return TauSeries({-m: 1 / lead})
        if depth is None:
            depth = self.depth
            if depth is None:
                raise ValueError("inverting an exact series needs a depth")
        elif self.depth is not None:
            depth = min(depth, self.depth)
        # b_{-m-k} = -(1/lead) * sum_{i=1..k} a_{m-i} b_{-m-k+i}
        b = {-m: 1 / lead}
        for k in range(1, depth):
            acc = Fraction(0)
            for i in range(1, k + 1):
                a = self._coeffs.get(m - i)
                if a:
                    acc += a * b.get(-m - k + i, 0)
            if acc:
                b[-m - k] = -acc / lead
        return TauSeries(b, floor=-m - depth + 1)

    def __truediv__(self, other):
        if isinstance(other, TauSeries):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def substitute_neg_tau(self) -> "TauSeries":
        return TauSeries(
            {e: (-c if e % 2 else c) for e, c in self._coeffs.items()}, floor=self._floor
        )

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TauSeries):
            return NotImplemented
        return self._floor == other._floor and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self._floor, frozenset(self._coeffs.items())))

    def agrees(self, other, floor=None) -> bool:
        """Equality on the common window (and above ``floor`` when given)."""
        f = _max_floor(self._floor, other._floor, floor)
        keys = set(self._coeffs) | set(other._coeffs)
        return all(self[e] == other[e] for e in keys if f is None or e >= f)

    def is_one(self) -> bool:
        return self.agrees(TauSeries.one())

    def __repr__(self):
        if not self._coeffs:
            body = "0"
        else:
            parts = []
            for e in sorted(self._coeffs, reverse=True):
                c = self._coeffs[e]
                parts.append(f"{c}" if e == 0 else f"{c}*tau^{e}")
            body = " + ".join(parts)
        tail = "" if self._floor is None else f" + O(tau^{self._floor - 1})"
        return f"TauSeries({body}{tail})"

    # -- json -------------------------------------------------------------

    def to_json(self) -> dict:
        if self._coeffs:
            top = self.top_degree
        else:
            top = 0 if self._floor is None else self._floor
        return {
            "top": top,
            "depth": self.depth,
            "coeffs": {str(e): str(c) for e, c in sorted(self._coeffs.items(), reverse=True)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "TauSeries":
        try:
            coeffs = {int(e): Fraction(c) for e, c in data["coeffs"].items()}
            depth = data.get("depth")
            top = int(data["top"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad TauSeries JSON: {exc}") from exc
        if coeffs and max(coeffs) > top:
            raise ParseError("coefficient above declared top degree")
        floor = None if depth is None else top - int(depth) + 1
        return cls(coeffs, floor=floor)


def _product_floor(a, b):
    cands = []
    if a.floor is not None:
        t = b._top()
        if t is not None:
            cands.append(a.floor + t)
    if b.floor is not None:
        t = a._top()
        if t is not None:
            cands.append(b.floor + t)
    return max(cands) if cands else None


def add(a: TauSeries, b: TauSeries) -> TauSeries:
    return a + b


def mul(a: TauSeries, b: TauSeries) -> TauSeries:
    return a * b


def invert(a: TauSeries, depth=None) -> TauSeries:
    return a.inverse(depth)


def substitute_neg_tau(a: TauSeries) -> TauSeries:
    return a.substitute_neg_tau()


def kstar_check(s: TauSeries) -> bool:
    """Membership in k*: s = 1 + O(1/tau) and s(tau) s(-tau) = 1 to depth."""
    if s.is_zero or s.top_degree != 0 or s.leading_coefficient() != 1:
        return False
    return (s * s.substitute_neg_tau()).is_one()


def kstar_exp(odd_coeffs: Mapping[int, object], depth: int) -> TauSeries:
    """exp(f) for f = sum a_j tau^j over negative odd j; always lands in k*."""
    for j in odd_coeffs:
        if j >= 0 or j % 2 == 0:
            raise ValueError("k* generators use negative odd exponents only")
    return TauSeries.exp(TauSeries(odd_coeffs), depth)
