"""Descent data for WKB algebroids on a nerve, and the finite-group classification bridge.

A datum assigns an invertible symbol Q_ij to every edge (the transition is
ad(Q_ij)) and a half-form operator P_ijk of order 0 with P P* = 1 to every
triangle.  It glues when

    ad(Q_ij) ad(Q_jk) = ad(P_ijk) ad(Q_ik)        on x_i and u_i tau,
    P_ijk P_ikl = ad(Q_ij)(P_jkl) P_ijl.

The characteristic class is the central defect
c_ijk = Q_ij Q_jk (P_ijk Q_ik)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cech import (
    Nerve,
    OneCocycle,
    _coboundary,
    _key,
    _unkey,
    classical_cech,
    equiv1,
    h1,
)
from .coeffs import Coeff
from .crossed import make_central
from .errors import (
    DepthInsufficient,
    InvalidCocycle,
    InvalidGenerator,
    LiftFailure,
    MismatchDetected,
    MissingAssignment,
    NonCentralDefect,
    ParseError,
)
from .groups import FiniteGroup
from .series import TauSeries, kstar_check
from .wkb import (
    HalfFormOperator,
    WKBSymbol,
    ad_apply,
    generators,
    invert,
    is_invertible,
    star,
    transport,
    wstar_check,
)


@dataclass
class WKBDescentDatum:
    nerve: Nerve
    Q: dict  # edge tuple -> WKBSymbol
    P: dict  # triangle tuple -> HalfFormOperator
    depth: int = 4
    n: int = field(init=False)

    def __post_init__(self):
        missing = [e for e in self.nerve.edges if e not in self.Q]
        missing += [t for t in self.nerve.triangles if t not in self.P]
        if missing:
            raise MissingAssignment(f"no operator assigned to {missing[0]}")
        dims = {q.n for q in self.Q.values()} | {p.n for p in self.P.values()}
        if len(dims) > 1:
            raise InvalidGenerator("operators live on charts of different dimension")
        self.n = dims.pop() if dims else 1

    def to_json(self):
        return {
            "nerve": self.nerve.to_json(),
            "depth": self.depth,
            "Q": {_key(e): self.Q[e].to_json() for e in self.nerve.edges},
            "P": {_key(t): self.P[t].to_json() for t in self.nerve.triangles},
        }

    @classmethod
    def from_json(cls, data):
        try:
            nerve = Nerve.from_json(data["nerve"])
            Q = {_unkey(k): WKBSymbol.from_json(v) for k, v in data.get("Q", {}).items()}
            P = {_unkey(k): HalfFormOperator.from_json(v) for k, v in data.get("P", {}).items()}
            depth = int(data.get("depth", 4))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad descent datum JSON: {exc}") from exc
        return cls(nerve, Q, P, depth)


def _flat(h: HalfFormOperator) -> WKBSymbol:
    """The operator expressed over the constant half-density."""
    return transport(h, Coeff.const(h.n, 1)).P


def _check_invariants(d: WKBDescentDatum):
    for e in d.nerve.edges:
        if not is_invertible(d.Q[e]):
            raise InvalidGenerator(f"Q{e} is not invertible")
    for t in d.nerve.triangles:
        if not wstar_check(d.P[t]):
            raise InvalidGenerator(f"P{t} is not an order-0 unitary operator with unit symbol")


def _residual(lhs: WKBSymbol, rhs: WKBSymbol) -> WKBSymbol:
    r = lhs - rhs
    floor = r.floor
    if floor is not None and floor > -1:
        raise DepthInsufficient(f"comparison window stops at tau^{floor}; raise the depth")
    return WKBSymbol(r.n, {j: c for j, c in r.terms.items() if floor is None or j >= floor},
                     floor=floor)


@dataclass
class DescentReport:
    valid: bool
    entries: list  # {"simplex", "relation", "ok", "residual"}

    def to_json(self):
        return {"valid": self.valid, "entries": self.entries}


def validate_descent(d: WKBDescentDatum) -> DescentReport:
    _check_invariants(d)
    depth = d.depth
    nerve = d.nerve
    Pflat = {t: _flat(p) for t, p in d.P.items()}
    entries = []
    for t in nerve.triangles:
        i, j, k = t
        Qij, Qjk, Qik = d.Q[(i, j)], d.Q[(j, k)], d.Q[(i, k)]
        worst = None
        for gen in generators(d.n):
            lhs = ad_apply(Qij, ad_apply(Qjk, gen, depth), depth)
            rhs = ad_apply(Pflat[t], ad_apply(Qik, gen, depth), depth)
            r = _residual(lhs, rhs)
            if not r.is_zero:
                worst = r
                break
        entries.append({"simplex": list(t), "relation": "transition",
                        "ok": worst is None, "residual": None if worst is None else repr(worst)})
    for t in nerve.tetrahedra:
        i, j, k, l = t
        lhs = star(Pflat[(i, j, k)], Pflat[(i, k, l)])
        rhs = star(ad_apply(d.Q[(i, j)], Pflat[(j, k, l)], depth), Pflat[(i, j, l)])
        r = _residual(lhs, rhs)
        entries.append({"simplex": list(t), "relation": "associator",
                        "ok": r.is_zero, "residual": None if r.is_zero else repr(r)})
    return DescentReport(all(e["ok"] for e in entries), entries)


def extract_class(d: WKBDescentDatum) -> dict:
    """Triangle -> k*-valued series c_ijk with Q_ij Q_jk = c_ijk P_ijk Q_ik."""
    _check_invariants(d)
    depth = d.depth
    nerve = d.nerve
    out = {}
    for t in nerve.triangles:
        i, j, k = t
        lhs = star(d.Q[(i, j)], d.Q[(j, k)])
        rhs = star(_flat(d.P[t]), d.Q[(i, k)])
        c = star(lhs, invert(rhs, depth))
        if c.floor is not None and c.floor > -1:
            raise DepthInsufficient(f"defect on {t} known only down to tau^{c.floor}")
        if not c.is_central():
            raise NonCentralDefect(f"defect on {t} depends on x or u: {c!r}")
        s = c.to_series()
        if not kstar_check(s):
            raise NonCentralDefect(f"defect on {t} is central but not in k*: {s!r}")
        out[t] = s
    for t in nerve.tetrahedra:
        i, j, k, l = t
        a = out[(i, j, k)] * out[(i, k, l)]
        b = out[(j, k, l)] * out[(i, j, l)]
        if not a.agrees(b):
            raise InvalidCocycle(f"extracted defect fails the cocycle identity on {t}")
    return out


def class_to_json(c: dict) -> dict:
    return {_key(t): s.to_json() for t, s in sorted(c.items())}


def class_from_json(data: dict) -> dict:
    try:
        return {_unkey(k): TauSeries.from_json(v) for k, v in data.items()}
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad k*-cocycle JSON: {exc}") from exc


# -- finite bridge ------------------------------------------------------------------


def _central(G: FiniteGroup, kernel=None):
    cm = make_central(G, kernel)
    K, embed = G.subgroup(cm.kernel_elems)
    return cm, K, embed


def bridge_forward(G: FiniteGroup, nerve: Nerve, c1: OneCocycle, kernel=None) -> tuple:
    """Classical 2-cocycle with values in K (as indices of K's own table).

    Lifts g_ij to the least coset element g^_ij and sets
    z_ijk = (g^_ij g^_jk g^_ik^-1)^-1 h_ijk.
    """
    cm, K, embed = _central(G, kernel)
    index = {e: i for i, e in enumerate(embed)}
    lift = [cm.reps[g] for g in c1.g]
    z = []
    for ti, t in enumerate(nerve.triangles):
        ij, jk, ik = nerve.tri_edges(t)
        defect = G.prod(lift[ij], lift[jk], G.inv[lift[ik]])
        val = G.mul(G.inv[defect], c1.h[ti])
        if val not in index:
            raise LiftFailure(f"defect on {t} is not in the central subgroup")
        z.append(index[val])
    z = tuple(z)
    if nerve.tetrahedra and any(_coboundary(K, nerve, z, 2)):
        raise InvalidCocycle("forward image is not a classical 2-cocycle")
    return z


def bridge_backward(G: FiniteGroup, nerve: Nerve, z, kernel=None) -> OneCocycle:
    """Embed a classical 2-cocycle as (g = 1, h = z)."""
    _, _, embed = _central(G, kernel)
    return OneCocycle((0,) * len(nerve.edges), tuple(embed[v] for v in z))


def bridge_verify(G: FiniteGroup, nerve: Nerve, kernel=None, budget=None) -> dict:
    """Class-level bijection between h1 of [G -> G/K] and classical H^2(nerve; K)."""
    cm, K, embed = _central(G, kernel)
    crossed = h1(cm, nerve, budget)
    classical = classical_cech(K, nerve, 2, budget)
    images = [classical.class_of(bridge_forward(G, nerve, r, kernel)) for r in crossed.classes]
    if len(set(images)) != len(images):
        raise MismatchDetected("two crossed-module classes share a classical class")
    if set(images) != set(classical.representatives):
        raise MismatchDetected("some classical classes have no crossed-module preimage")
    pairs = []
    for rep, img in zip(crossed.classes, images):
        back = bridge_backward(G, nerve, img, kernel)
        if equiv1(cm, nerve, rep, back, budget) is None:
            raise MismatchDetected(f"backward image of {img} is not equivalent to {rep}")
        if bridge_forward(G, nerve, back, kernel) != img:
            raise MismatchDetected("forward after backward is not the identity")
        pairs.append({"crossed": rep.to_json(nerve), "classical": list(img)})
    return {
        "group_order": G.size,
        "kernel": list(cm.kernel_elems),
        "nerve": nerve.name,
        "crossed_classes": len(crossed.classes),
        "classical_classes": classical.order,
        "classical_group": classical.describe(),
        "pairs": pairs,
        "verified": True,
    }
