"""Formal WKB operators on a chart of T*C^n.

An operator is represented by its total symbol ``sum_j p_j(x, u) tau^j``.
Composition is the Leibniz product

    sigma(P o Q) = sum_alpha tau^(-|alpha|) / alpha! * d_u^alpha sigma(P) * d_x^alpha sigma(Q)

which is a finite sum here because coefficient functions are polynomial in u.
Windows follow the same conventions as :mod:`wkbcalc.series`: ``floor`` is the
lowest tau-exponent that is known exactly, ``None`` means exact.

The operator ``u_i tau`` acts as ``d/dx_i`` and ``tau`` itself acts as the
derivative in the auxiliary variable t, so the formal adjoint sends
``tau -> -tau`` as well as ``d/dx_i -> -d/dx_i``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial
from typing import Mapping

from .coeffs import Coeff
from .errors import (
    BelowTruncation,
    DimensionMismatch,
    InvalidDensity,
    NotInvertible,
    OrderTooHigh,
    ParseError,
    ZeroOperator,
)
from .series import TauSeries


def _max_floor(*floors):
    known = [f for f in floors if f is not None]
    return max(known) if known else None


def _multi_indices(n, max_total):
    """All alpha in N^n with |alpha| <= max_total, graded by |alpha|."""
    for total in range(max_total + 1):
        for alpha in product(range(total + 1), repeat=n):
            if sum(alpha) == total:
                yield alpha


class WKBSymbol:
    __slots__ = ("n", "_terms", "_floor")

    def __init__(self, n: int, terms: Mapping[int, object] = (), *, depth=None, floor=None):
        if depth is not None and floor is not None:
            raise ValueError("give depth or floor, not both")
        self.n = n
        clean = {}
        for j, c in dict(terms).items():
            if not isinstance(c, Coeff):
                c = Coeff.parse(n, c) if isinstance(c, str) else Coeff.const(n, c)
            elif c.n != n:
                raise DimensionMismatch("coefficient chart dimension differs from symbol")
            if not c.is_zero:
                clean[int(j)] = c
        if depth is not None:
            if depth < 1:
                raise ValueError("depth must be positive")
            top = max(clean) if clean else 0
            floor = top - depth + 1
        if floor is not None:
            clean = {j: c for j, c in clean.items() if j >= floor}
        self._terms = clean
        self._floor = floor

    # -- constructors -----------------------------------------------------

    @classmethod
    def parse(cls, n, terms: Mapping[int, str], *, depth=None, floor=None):
        return cls(n, {j: Coeff.parse(n, t) for j, t in terms.items()}, depth=depth, floor=floor)

    @classmethod
    def const(cls, n, c=1, *, depth=None, floor=None):
        return cls(n, {0: Coeff.const(n, c)}, depth=depth, floor=floor)

    @classmethod
    def function(cls, f: Coeff, *, depth=None, floor=None):
        """The order-0 symbol of a coefficient function."""
        return cls(f.n, {0: f}, depth=depth, floor=floor)

    @classmethod
    def x(cls, n, i):
        """Multiplication by x_i (exact)."""
        return cls(n, {0: Coeff.x(n, i)})

    @classmethod
    def d(cls, n, i):
        """d/dx_i, whose symbol is u_i tau (exact)."""
        return cls(n, {1: Coeff.u(n, i)})

    @classmethod
    def from_series(cls, n, s: TauSeries):
        return cls(n, {j: Coeff.const(n, c) for j, c in s.coeffs.items()}, floor=s.floor)

    # -- structure --------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def floor(self):
        return self._floor

    @property
    def is_zero(self):
        return not self._terms

    @property
    def is_exact(self):
        return self._floor is None

    @property
    def order(self) -> int:
        if not self._terms:
            raise ZeroOperator("the zero operator has no order")
        return max(self._terms)

    @property
    def depth(self):
        if self._floor is None:
            return None
        if not self._terms:
            return 1
        return self.order - self._floor + 1

    def _top(self):
        if self._terms:
            return max(self._terms)
        return None if self._floor is None else self._floor - 1

    def coefficient(self, j: int) -> Coeff:
        return self._terms.get(j) or Coeff.const(self.n, 0)

    def principal_symbol(self):
        m = self.order
        return m, self._terms[m]

    def symbol_of_order(self, m: int) -> Coeff:
        if self._terms and self.order > m:
            raise OrderTooHigh(f"operator has order {self.order} > {m}")
        if self._floor is not None and m < self._floor:
            raise BelowTruncation(f"order {m} lies below the known window (floor {self._floor})")
        return self.coefficient(m)

    def is_central(self) -> bool:
        """True when every coefficient is a constant (an element of k)."""
        return all(c.is_constant() for c in self._terms.values())

    def to_series(self) -> TauSeries:
        if not self.is_central():
            raise ValueError("symbol depends on x or u")
        return TauSeries({j: c.constant_value() for j, c in self._terms.items()}, floor=self._floor)

    def truncate(self, depth: int) -> "WKBSymbol":
        top = self._top()
        if top is None:
            return WKBSymbol(self.n, self._terms, depth=depth)
        return self.truncate_below(top - depth + 1)

    def truncate_below(self, floor: int) -> "WKBSymbol":
        if self._floor is not None and floor < self._floor:
            raise ValueError("cannot extend a window below its precision")
        return WKBSymbol(self.n, self._terms, floor=floor)

    def with_floor(self, floor) -> "WKBSymbol":
        """Reinterpret the stored terms with a new precision (no checks)."""
        return WKBSymbol(self.n, self._terms, floor=floor)

    # -- arithmetic -------------------------------------------------------

    def _same_chart(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"chart dimensions {self.n} and {other.n} differ")

    def _coerce(self, other):
        if isinstance(other, WKBSymbol):
            self._same_chart(other)
            return other
        if isinstance(other, TauSeries):
            return WKBSymbol.from_series(self.n, other)
        if isinstance(other, Coeff):
            return WKBSymbol.function(other)
        return WKBSymbol.const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        floor = _max_floor(self._floor, other._floor)
        out = dict(self._terms)
        for j, c in other._terms.items():
            out[j] = out[j] + c if j in out else c
        return WKBSymbol(self.n, out, floor=floor)

    __radd__ = __add__

    def __neg__(self):
        return WKBSymbol(self.n, {j: -c for j, c in self._terms.items()}, floor=self._floor)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return WKBSymbol(self.n, {j: c.scale(other) for j, c in self._terms.items()},
                             floor=self._floor)
        return star(self, self._coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return star(self._coerce(other), self)

    def shift(self, k: int) -> "WKBSymbol":
        """Multiply by tau^k."""
        return WKBSymbol(self.n, {j + k: c for j, c in self._terms.items()},
                         floor=None if self._floor is None else self._floor + k)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, WKBSymbol):
            return NotImplemented
        return self.n == other.n and self._floor == other._floor and self._terms == other._terms

    def __hash__(self):
        return hash((self.n, self._floor, frozenset(self._terms.items())))

    def agrees(self, other, floor=None) -> bool:
        """Equality on the common known window (and above ``floor`` if given)."""
        other = self._coerce(other)
        f = _max_floor(self._floor, other._floor, floor)
        keys = set(self._terms) | set(other._terms)
        return all(self.coefficient(j) == other.coefficient(j)
                   for j in keys if f is None or j >= f)

    def is_one(self) -> bool:
        return self.agrees(WKBSymbol.const(self.n, 1))

    def __repr__(self):
        if not self._terms:
            body = "0"
        else:
            body = " + ".join(f"({c})*tau^{j}" for j, c in sorted(self._terms.items(), reverse=True))
        tail = "" if self._floor is None else f" + O(tau^{self._floor - 1})"
        return f"WKBSymbol[n={self.n}]({body}{tail})"

    # -- json -------------------------------------------------------------

    def to_json(self) -> dict:
        if self._terms:
            order = self.order
        else:
            order = 0 if self._floor is None else self._floor
        return {
            "n": self.n,
            "order": order,
            "depth": self.depth,
            "terms": {str(j): c.to_json_monomials()
                      for j, c in sorted(self._terms.items(), reverse=True)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "WKBSymbol":
        try:
            n = int(data["n"])
            order = int(data["order"])
            depth = data.get("depth")
            terms = {int(j): Coeff.from_json_monomials(n, items)
                     for j, items in data["terms"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad WKBSymbol JSON: {exc}") from exc
        terms = {j: c for j, c in terms.items() if not c.is_zero}
        if terms and max(terms) != order:
            raise ParseError(f"declared order {order} but top term is {max(terms)}")
        floor = None if depth is None else order - int(depth) + 1
        return cls(n, terms, floor=floor)


def _product_floor(P, Q):
    cands = []
    if P.floor is not None:
        t = Q._top()
        if t is not None:
            cands.append(P.floor + t)
    if Q.floor is not None:
        t = P._top()
        if t is not None:
            cands.append(Q.floor + t)
    return max(cands) if cands else None


def _derivative_table(f: Coeff, which: str, max_total: int, scaled: bool):
    """alpha -> d^alpha f (divided by alpha! when ``scaled``)."""
    n = f.n
    table = {(0,) * n: f}
    for alpha in _multi_indices(n, max_total):
        if alpha in table:
            continue
        i = next(k for k, a in enumerate(alpha) if a)
        parent = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        base = table[parent]
        if base.is_zero:
            table[alpha] = base
            continue
        d = base.diff_u(i) if which == "u" else base.diff_x(i)
        table[alpha] = d.scale(Fraction(1, alpha[i])) if scaled else d
    return table


def star(P: WKBSymbol, Q: WKBSymbol) -> WKBSymbol:
    """Total symbol of the composition P o Q, truncated to the sound window."""
    if P.n != Q.n:
        raise DimensionMismatch(f"chart dimensions {P.n} and {Q.n} differ")
    n = P.n
    floor = _product_floor(P, Q)
    out = {}
    q_tables = {}
    for j, p in P._terms.items():
        udeg = p.u_degree()
        p_table = None
        for k, q in Q._terms.items():
            bound = udeg if floor is None else min(udeg, j + k - floor)
            if bound < 0:
                continue
            if p_table is None:
                p_table = _derivative_table(p, "u", udeg, scaled=True)
            q_table = q_tables.get(k)
            if q_table is None or q_table[0] < bound:
                q_table = (bound, _derivative_table(q, "x", bound, scaled=False))
                q_tables[k] = q_table
            for alpha in _multi_indices(n, bound):
                a = p_table[alpha]
                if a.is_zero:
                    continue
                b = q_table[1][alpha]
                if b.is_zero:
                    continue
                e = j + k - sum(alpha)
                term = a * b
                out[e] = out[e] + term if e in out else term
    return WKBSymbol(n, out, floor=floor)


def commutator(P: WKBSymbol, Q: WKBSymbol) -> WKBSymbol:
    return star(P, Q) - star(Q, P)


def order(P: WKBSymbol) -> int:
    return P.order


def principal_symbol(P: WKBSymbol):
    return P.principal_symbol()


def symbol_of_order(P: WKBSymbol, m: int) -> Coeff:
    return P.symbol_of_order(m)


def is_invertible(P: WKBSymbol) -> bool:
    _, pm = P.principal_symbol()
    return pm.is_unit()


def invert(P: WKBSymbol, depth=None) -> WKBSymbol:
    """Two-sided inverse, solved order by order below the principal part.

    Exact inputs need ``depth`` unless they are a single term c(x) tau^m; for truncated inputs the inverse keeps the
    input depth (or ``depth`` if that is smaller).
    """
    if not is_invertible(P):
        raise NotInvertible("principal symbol is not a unit of the coefficient ring")
    n = P.n
    m, pm = P.principal_symbol()
    if depth is None and P.is_exact and len(P._terms) == 1:
        return WKBSymbol(n, {-m: pm.inverse()})  # c(x) tau^m has no u to differentiate
    if depth is None:
        depth = P.depth
        if depth is None:
            raise ValueError("inverting an exact symbol needs a depth")
    elif P.depth is not None:
        depth = min(depth, P.depth)
    low = -depth + 1  # lowest exponent of P*Q that must match 1
    pinv = pm.inverse()
    Q = {-m: pinv}
    R = star(P, WKBSymbol(n, {-m: pinv})).truncate_below(low)  # P * Q so far
    one = WKBSymbol.const(n, 1)
    while True:
        E = (R - one).truncate_below(low)
        if E.is_zero:
            break
        e = E.order
        if e >= 0:
            raise AssertionError("inverse recursion failed to fix the principal part")
        c = -(E.coefficient(e) * pinv)
        Q[e - m] = Q[e - m] + c if (e - m) in Q else c
        R = R + star(P, WKBSymbol(n, {e - m: c}))
    return WKBSymbol(n, Q, floor=-m - depth + 1)


def ad_apply(P: WKBSymbol, Q: WKBSymbol, depth=None) -> WKBSymbol:
    """P Q P^{-1}."""
    if depth is None and P.depth is None:
        depth = Q.depth
    return star(star(P, Q), invert(P, depth))


def adjoint_dx(P: WKBSymbol) -> WKBSymbol:
    """Formal adjoint with respect to dx: (tau -> -tau), then the x/u Leibniz twist."""
    n = P.n
    out = {}
    for j, p in P._terms.items():
        s = -p if j % 2 else p
        udeg = s.u_degree()
        u_table = _derivative_table(s, "u", udeg, scaled=True)
        for alpha in _multi_indices(n, udeg):
            a = u_table[alpha]
            if a.is_zero:
                continue
            for i, k in enumerate(alpha):
                for _ in range(k):
                    a = a.diff_x(i)
            if a.is_zero:
                continue
            e = j - sum(alpha)
            if P.floor is not None and e < P.floor:
                continue
            out[e] = out[e] + a if e in out else a
    return WKBSymbol(n, out, floor=P.floor)


def star_exp(A: WKBSymbol, depth: int) -> WKBSymbol:
    """Truncated star exponential sum_k A^k / k! for A of order <= -1."""
    if not A.is_zero and A.order > -1:
        raise ValueError("star_exp needs an operator of order <= -1")
    n = A.n
    result = WKBSymbol.const(n, 1, depth=depth)
    power = WKBSymbol.const(n, 1, depth=depth)
    for k in range(1, depth):
        power = star(power, A)
        result = result + power * Fraction(1, factorial(k))
    return result.truncate_below(-depth + 1)


class HalfFormOperator:
    """A section of the half-form twisted ring, represented by (g, P).

    The volume form is theta = g^2 dx; (g1, P1) and (g2, P2) represent the
    same section iff P2 = r P1 r^{-1} with r = g1 / g2.
    """

    __slots__ = ("g", "P")

    def __init__(self, g, P: WKBSymbol):
        if not isinstance(g, Coeff):
            g = Coeff.parse(P.n, g) if isinstance(g, str) else Coeff.const(P.n, g)
        if g.n != P.n:
            raise DimensionMismatch("density and operator charts differ")
        if not g.is_unit():
            raise InvalidDensity("half-density must be a nonzero function of x only")
        self.g = g
        self.P = P

    @property
    def n(self):
        return self.P.n

    def adjoint(self) -> "HalfFormOperator":
        return adjoint(self)

    def transport(self, g2) -> "HalfFormOperator":
        return transport(self, g2)

    def __mul__(self, other: "HalfFormOperator") -> "HalfFormOperator":
        if not isinstance(other, HalfFormOperator):
            return NotImplemented
        return HalfFormOperator(self.g, star(self.P, transport(other, self.g).P))

    def agrees(self, other: "HalfFormOperator") -> bool:
        return self.P.agrees(transport(other, self.g).P)

    def __eq__(self, other):
        if not isinstance(other, HalfFormOperator):
            return NotImplemented
        return self.g == other.g and self.P == other.P

    def __hash__(self):
        return hash((self.g, self.P))

    def __repr__(self):
        return f"HalfFormOperator(g={self.g}, P={self.P})"

    def to_json(self) -> dict:
        return {"g": self.g.x_only_to_json(), "P": self.P.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "HalfFormOperator":
        try:
            P = WKBSymbol.from_json(data["P"])
            g = Coeff.x_only_from_json(P.n, data.get("g", {"num": [[[0] * P.n, "1"]]}))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad half-form JSON: {exc}") from exc
        try:
            return cls(g, P)
        except InvalidDensity as exc:
            raise ParseError(str(exc)) from exc


def adjoint(h: HalfFormOperator) -> HalfFormOperator:
    """(g, P) -> (g, g^-2 o P^{*dx} o g^2)."""
    g2 = h.g * h.g
    inner = star(adjoint_dx(h.P), WKBSymbol.function(g2))
    return HalfFormOperator(h.g, star(WKBSymbol.function(g2.inverse()), inner))


def transport(h: HalfFormOperator, g2) -> HalfFormOperator:
    """Re-express h over the half-density g2."""
    if not isinstance(g2, Coeff):
        g2 = Coeff.parse(h.n, g2) if isinstance(g2, str) else Coeff.const(h.n, g2)
    if not g2.is_unit():
        raise InvalidDensity("target half-density must be a nonzero function of x only")
    if g2 == h.g:
        return h
    r = h.g / g2
    P = star(WKBSymbol.function(r), star(h.P, WKBSymbol.function(r.inverse())))
    return HalfFormOperator(g2, P)


def wstar_check(h: HalfFormOperator) -> bool:
    """Order 0, principal symbol 1 and P P* = 1 to depth."""
    P = h.P
    if P.is_zero or P.order != 0 or P.coefficient(0) != 1:
        return False
    return star(P, adjoint(h).P).is_one()


def generators(n: int):
    """x_1..x_n and u_1 tau..u_n tau."""
    return [WKBSymbol.x(n, i) for i in range(n)] + [WKBSymbol.d(n, i) for i in range(n)]


def fixes_generators(P: WKBSymbol, depth=None) -> bool:
    """Whether ad(P) is the identity on x_i and u_i tau (to depth)."""
    return all(ad_apply(P, G, depth).agrees(G) for G in generators(P.n))
