"""Finite crossed modules G^-1 --d--> G^0 and their 2-group of arrows."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedTables, NotAbelian, NotComposable, ParseError
from .groups import FiniteGroup, trivial


class CrossedModule:
    """``act[g][h]`` is the left action of g in G0 on h in Gm1."""

    def __init__(self, Gm1: FiniteGroup, G0: FiniteGroup, d, act, name=None):
        d = tuple(int(v) for v in d)
        act = tuple(tuple(int(v) for v in row) for row in act)
        if len(d) != Gm1.size:
            raise MalformedTables("d must have one entry per element of Gm1")
        if len(act) != G0.size or any(len(row) != Gm1.size for row in act):
            raise MalformedTables("act must be a |G0| x |Gm1| table")
        if any(not 0 <= v < G0.size for v in d):
            raise MalformedTables("d value out of range")
        if any(not 0 <= v < Gm1.size for row in act for v in row):
            raise MalformedTables("act value out of range")
        self.Gm1 = Gm1
        self.G0 = G0
        self.d = d
        self.act = act
        self.name = name
        fibers = [[] for _ in range(G0.size)]
        for h, g in enumerate(d):
            fibers[g].append(h)
        self.fibers = tuple(tuple(f) for f in fibers)

    def __repr__(self):
        label = self.name or f"|Gm1|={self.Gm1.size}, |G0|={self.G0.size}"
        return f"CrossedModule({label})"

    def image(self):
        return sorted(set(self.d))

    def kernel(self):
        return list(self.fibers[0])

    def violations(self):
        """Names of violated axioms (empty list when valid)."""
        H, G, d, act = self.Gm1, self.G0, self.d, self.act
        bad = [f"Gm1 {v}" for v in H.axiom_violations()]
        bad += [f"G0 {v}" for v in G.axiom_violations()]
        if bad:
            return bad
        if any(d[H.mul(a, b)] != G.mul(d[a], d[b]) for a in H for b in H):
            bad.append("d homomorphism")
        if any(act[g][H.mul(a, b)] != H.mul(act[g][a], act[g][b]) for g in G for a in H for b in H):
            bad.append("action by homomorphisms")
        if any(sorted(act[g]) != list(range(H.size)) for g in G):
            bad.append("action by bijections")
        if any(act[0][h] != h for h in H):
            bad.append("action unit")
        if any(act[G.mul(g1, g2)][h] != act[g1][act[g2][h]] for g1 in G for g2 in G for h in H):
            bad.append("action composition")
        if any(d[act[g][h]] != G.conj(g, d[h]) for g in G for h in H):
            bad.append("equivariance")
        if any(act[d[h2]][h] != H.conj(h2, h) for h2 in H for h in H):
            bad.append("Peiffer")
        return bad

    def is_valid(self):
        return not self.violations()

    def to_json(self):
        return {"Gm1": self.Gm1.to_json(), "G0": self.G0.to_json(),
                "d": list(self.d), "act": [list(r) for r in self.act]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(FiniteGroup.from_json(data["Gm1"]), FiniteGroup.from_json(data["G0"]),
                       data["d"], data["act"], data.get("name"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad crossed module JSON: {exc}") from exc


def validate(cm: CrossedModule):
    return cm.violations()


def make_g0(G: FiniteGroup) -> CrossedModule:
    """[1 -> G]."""
    return CrossedModule(trivial(), G, [0], [[0] for _ in G], name="G[0]")


def make_g1(G: FiniteGroup) -> CrossedModule:
    """[G -> 1], only a crossed module for abelian G."""
    if not G.is_abelian():
        raise NotAbelian("G[1] needs an abelian group")
    return CrossedModule(G, trivial(), [0] * G.size, [list(range(G.size))], name="G[1]")


def make_central(G: FiniteGroup, kernel=None):
    """[G -> G/K] for a central subgroup K (default the centre), acting by conjugation.

    Returns the crossed module; the quotient data is kept on it as
    ``cm.parent``, ``cm.kernel_elems`` and ``cm.reps`` (least element per coset).
    """
    centre = set(G.center())
    K = sorted(centre if kernel is None else set(kernel))
    if not set(K) <= centre:
        raise MalformedTables("kernel must be a central subgroup")
    G.subgroup(K)  # closure check
    Q, proj, reps = G.quotient(K)
    act = [[G.conj(r, h) for h in G] for r in reps]
    cm = CrossedModule(G, Q, proj, act, name="central")
    cm.parent = G
    cm.kernel_elems = K
    cm.reps = reps
    return cm


def to_trivial(G: FiniteGroup) -> CrossedModule:
    """[G -> 1] with trivial action, whatever G is; valid only for abelian G."""
    return CrossedModule(G, trivial(), [0] * G.size, [list(range(G.size))])


@dataclass(frozen=True)
class Arrow:
    """g --h--> d(h) g."""

    src: int
    witness: int
    dst: int


def arrow(cm: CrossedModule, g: int, h: int) -> Arrow:
    return Arrow(g, h, cm.G0.mul(cm.d[h], g))


def identity_arrow(cm: CrossedModule, g: int) -> Arrow:
    return Arrow(g, 0, g)


def compose_arrows(cm: CrossedModule, a2: Arrow, a1: Arrow) -> Arrow:
    """a2 after a1."""
    if a1.dst != a2.src:
        raise NotComposable(f"{a1} does not end where {a2} starts")
    return Arrow(a1.src, cm.Gm1.mul(a2.witness, a1.witness), a2.dst)


def tensor_arrows(cm: CrossedModule, a1: Arrow, a2: Arrow) -> Arrow:
    G, H = cm.G0, cm.Gm1
    h = H.mul(a1.witness, cm.act[a1.src][a2.witness])
    return Arrow(G.mul(a1.src, a2.src), h, G.mul(a1.dst, a2.dst))


def inverse_arrow(cm: CrossedModule, a: Arrow) -> Arrow:
    return Arrow(a.dst, cm.Gm1.inv[a.witness], a.src)


def by_name(name: str) -> CrossedModule:
    """Fixtures ``G0:<group>``, ``G1:<group>``, ``central:<group>``."""
    from .groups import by_name as group_by_name

    kind, _, gname = name.partition(":")
    if not gname:
        raise ParseError(f"crossed module fixture needs kind:group, got {name!r}")
    G = group_by_name(gname)
    kind = kind.lower()
    if kind in ("g0", "g[0]"):
        return make_g0(G)
    if kind in ("g1", "g[1]"):
        return make_g1(G)
    if kind == "central":
        return make_central(G)
    if kind == "trivial-target":
        return to_trivial(G)
    raise ParseError(f"unknown crossed module kind {kind!r}")
