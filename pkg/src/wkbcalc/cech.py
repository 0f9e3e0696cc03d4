"""Cech cohomology of a finite cover nerve with coefficients in a crossed module.

Cochains live on strictly increasing simplices and are stored as tuples
indexed like ``nerve.vertices`` / ``nerve.edges`` / ``nerve.triangles``.
Relations are instantiated only for increasing index patterns:

    0-cocycle (g_i, h_ij):   g_i = d(h_ij) g_j,       h_ij h_jk = h_ik
    1-cocycle (g_ij, h_ijk): g_ij g_jk = d(h_ijk) g_ik,
                             h_ijk h_ikl = (g_ij . h_jkl) h_ijl
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional

from .crossed import CrossedModule, make_g0, make_g1
from .errors import (
    BudgetExceeded,
    InvalidCocycle,
    MalformedTables,
    MismatchDetected,
    MissingAssignment,
    NotAbelian,
    ParseError,
)
from .groups import FiniteGroup

DEFAULT_BUDGET = 10_000_000


class Nerve:
    def __init__(self, vertices: int, edges=(), triangles=(), tetrahedra=(), name=None):
        self.n_vertices = int(vertices)
        self.vertices = tuple((v,) for v in range(self.n_vertices))
        self.edges = tuple(sorted(tuple(map(int, s)) for s in edges))
        self.triangles = tuple(sorted(tuple(map(int, s)) for s in triangles))
        self.tetrahedra = tuple(sorted(tuple(map(int, s)) for s in tetrahedra))
        self.name = name
        for dim, simplices in ((2, self.edges), (3, self.triangles), (4, self.tetrahedra)):
            for s in simplices:
                if len(s) != dim or any(a >= b for a, b in zip(s, s[1:])):
                    raise MalformedTables(f"simplex {s} is not a strictly increasing {dim}-tuple")
                if s[0] < 0 or s[-1] >= self.n_vertices:
                    raise MalformedTables(f"simplex {s} uses an unknown vertex")
            if len(set(simplices)) != len(simplices):
                raise MalformedTables("duplicate simplex")
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.triangle_index = {t: i for i, t in enumerate(self.triangles)}
        self.tetrahedron_index = {t: i for i, t in enumerate(self.tetrahedra)}
        for t in self.triangles:
            for f in combinations(t, 2):
                if f not in self.edge_index:
                    raise MalformedTables(f"face {f} of {t} missing")
        for t in self.tetrahedra:
            for f in combinations(t, 3):
                if f not in self.triangle_index:
                    raise MalformedTables(f"face {f} of {t} missing")

    def __repr__(self):
        label = self.name or "nerve"
        return (f"Nerve({label}: {self.n_vertices} vertices, {len(self.edges)} edges, "
                f"{len(self.triangles)} triangles, {len(self.tetrahedra)} tetrahedra)")

    def simplices(self, dim: int):
        return (self.vertices, self.edges, self.triangles, self.tetrahedra)[dim]

    def index(self, dim: int):
        if dim == 0:
            return {v: v[0] for v in self.vertices}
        return (None, self.edge_index, self.triangle_index, self.tetrahedron_index)[dim]

    def tri_edges(self, t):
        """Edge indices (ij, jk, ik) of triangle t = (i, j, k)."""
        i, j, k = t
        e = self.edge_index
        return e[(i, j)], e[(j, k)], e[(i, k)]

    def tet_faces(self, t):
        """Triangle indices (ijk, ikl, jkl, ijl) and edge index ij of t = (i, j, k, l)."""
        i, j, k, l = t
        f = self.triangle_index
        return f[(i, j, k)], f[(i, k, l)], f[(j, k, l)], f[(i, j, l)], self.edge_index[(i, j)]

    def spanning_order(self):
        """Vertices in breadth-first order over the 1-skeleton (all components)."""
        adj = {v: [] for v in range(self.n_vertices)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen, order = set(), []
        for root in range(self.n_vertices):
            if root in seen:
                continue
            seen.add(root)
            queue = deque([root])
            while queue:
                v = queue.popleft()
                order.append(v)
                for w in sorted(adj[v]):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
        return order

    def to_json(self):
        return {"vertices": self.n_vertices,
                "edges": [list(e) for e in self.edges],
                "triangles": [list(t) for t in self.triangles],
                "tetrahedra": [list(t) for t in self.tetrahedra]}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(data["vertices"], data.get("edges", ()), data.get("triangles", ()),
                       data.get("tetrahedra", ()), data.get("name"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad nerve JSON: {exc}") from exc


def full_simplex_nerve(k: int, max_dim: int = 3, name=None) -> Nerve:
    """Faces of the k-simplex up to dimension ``max_dim`` (tetrahedra at most)."""
    verts = range(k + 1)
    faces = [list(combinations(verts, d + 1)) if d <= max_dim else [] for d in (1, 2, 3)]
    return Nerve(k + 1, *faces, name=name)


def fixture(name: str) -> Nerve:
    """point, interval, circle (triangle boundary), disk, sphere (tetrahedron boundary), ball."""
    table = {
        "point": lambda: Nerve(1, name="point"),
        "interval": lambda: full_simplex_nerve(1, name="interval"),
        "circle": lambda: full_simplex_nerve(2, max_dim=1, name="circle"),
        "disk": lambda: full_simplex_nerve(2, name="disk"),
        "sphere": lambda: full_simplex_nerve(3, max_dim=2, name="sphere"),
        "ball": lambda: full_simplex_nerve(3, name="ball"),
    }
    if name not in table:
        raise ParseError(f"unknown nerve fixture {name!r}; choose from {sorted(table)}")
    return table[name]()


# -- cochain records -----------------------------------------------------------


def _key(s):
    return ",".join(map(str, s))


def _unkey(text):
    return tuple(int(v) for v in str(text).split(","))


@dataclass(frozen=True, order=True)
class ZeroCocycle:
    g: tuple  # per vertex, in G0
    h: tuple  # per edge, in Gm1

    @classmethod
    def from_maps(cls, nerve: Nerve, g, h):
        try:
            return cls(tuple(g[v] for v in range(nerve.n_vertices)),
                       tuple(h[e] for e in nerve.edges))
        except KeyError as exc:
            raise MissingAssignment(f"no value assigned to simplex {exc.args[0]}") from None

    def to_json(self, nerve):
        return {"g": {str(v): self.g[v] for v in range(nerve.n_vertices)},
                "h": {_key(e): self.h[i] for i, e in enumerate(nerve.edges)}}

    @classmethod
    def from_json(cls, nerve, data):
        try:
            g = {int(k): int(v) for k, v in data["g"].items()}
            h = {_unkey(k): int(v) for k, v in data.get("h", {}).items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad 0-cocycle JSON: {exc}") from exc
        return cls.from_maps(nerve, g, h)


@dataclass(frozen=True, order=True)
class OneCocycle:
    g: tuple  # per edge, in G0
    h: tuple  # per triangle, in Gm1

    @classmethod
    def from_maps(cls, nerve: Nerve, g, h):
        try:
            return cls(tuple(g[e] for e in nerve.edges), tuple(h[t] for t in nerve.triangles))
        except KeyError as exc:
            raise MissingAssignment(f"no value assigned to simplex {exc.args[0]}") from None

    def to_json(self, nerve):
        return {"g": {_key(e): self.g[i] for i, e in enumerate(nerve.edges)},
                "h": {_key(t): self.h[i] for i, t in enumerate(nerve.triangles)}}

    @classmethod
    def from_json(cls, nerve, data):
        try:
            g = {_unkey(k): int(v) for k, v in data.get("g", {}).items()}
            h = {_unkey(k): int(v) for k, v in data.get("h", {}).items()}
        except (TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad 1-cocycle JSON: {exc}") from exc
        return cls.from_maps(nerve, g, h)


@dataclass(frozen=True)
class Witness0:
    k: tuple  # per vertex, in Gm1


@dataclass(frozen=True)
class Witness1:
    l: tuple  # per vertex, in G0
    k: tuple  # per edge, in Gm1


class _Budget:
    def __init__(self, limit, what):
        self.limit = DEFAULT_BUDGET if limit is None else int(limit)
        self.used = 0
        self.what = what

    def tick(self, partial=None):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"{self.what}: candidate budget {self.limit} exhausted",
                                 partial=partial)


def _check_shape(cm, nerve, c, dim):
    if dim == 0:
        ok = len(c.g) == nerve.n_vertices and len(c.h) == len(nerve.edges)
    else:
        ok = len(c.g) == len(nerve.edges) and len(c.h) == len(nerve.triangles)
    if not ok:
        raise MissingAssignment("cochain does not cover every simplex of the nerve")
    if any(not 0 <= v < cm.G0.size for v in c.g) or any(not 0 <= v < cm.Gm1.size for v in c.h):
        raise MalformedTables("cochain value outside its group")


# -- degree 0 ------------------------------------------------------------------


def check0(cm: CrossedModule, nerve: Nerve, c: ZeroCocycle) -> bool:
    _check_shape(cm, nerve, c, 0)
    G, H, d = cm.G0, cm.Gm1, cm.d
    for (i, j), hij in zip(nerve.edges, c.h):
        if c.g[i] != G.mul(d[hij], c.g[j]):
            return False
    for t in nerve.triangles:
        ij, jk, ik = nerve.tri_edges(t)
        if H.mul(c.h[ij], c.h[jk]) != c.h[ik]:
            return False
    return True


def apply_witness0(cm, nerve, c: ZeroCocycle, w: Witness0) -> ZeroCocycle:
    """The cocycle c' related to c by w: g'_i = d(k_i) g_i, h'_ij = k_i h_ij k_j^-1."""
    G, H = cm.G0, cm.Gm1
    g = tuple(G.mul(cm.d[w.k[v]], c.g[v]) for v in range(nerve.n_vertices))
    h = tuple(H.prod(w.k[i], c.h[e], H.inv[w.k[j]]) for e, (i, j) in enumerate(nerve.edges))
    return ZeroCocycle(g, h)


def is_witness0(cm, nerve, c, c2, w: Witness0) -> bool:
    G, H = cm.G0, cm.Gm1
    if any(c2.g[v] != G.mul(cm.d[w.k[v]], c.g[v]) for v in range(nerve.n_vertices)):
        return False
    return all(H.mul(c2.h[e], w.k[j]) == H.mul(w.k[i], c.h[e])
               for e, (i, j) in enumerate(nerve.edges))


def inverse_witness0(cm, w: Witness0) -> Witness0:
    return Witness0(tuple(cm.Gm1.inv[k] for k in w.k))


def compose_witness0(cm, w2: Witness0, w1: Witness0) -> Witness0:
    """w2 after w1."""
    return Witness0(tuple(cm.Gm1.mul(a, b) for a, b in zip(w2.k, w1.k)))


def equiv0(cm, nerve, c, c2, budget=None) -> Optional[Witness0]:
    """A witness k with c2 = k . c, or None when none exists."""
    for x in (c, c2):
        if not check0(cm, nerve, x):
            raise InvalidCocycle(f"{x} is not a 0-cocycle")
    G, H = cm.G0, cm.Gm1
    tick = _Budget(budget, "equiv0").tick
    order = nerve.spanning_order()
    pos = {v: p for p, v in enumerate(order)}
    checks = [[] for _ in order]  # edges closed when a vertex is placed
    for e, (i, j) in enumerate(nerve.edges):
        checks[max(pos[i], pos[j])].append((e, i, j))
    k = [0] * nerve.n_vertices

    def search(p):
        if p == len(order):
            return True
        v = order[p]
        for kv in cm.fibers[G.mul(c2.g[v], G.inv[c.g[v]])]:
            tick()
            k[v] = kv
            if all(H.mul(c2.h[e], k[j]) == H.mul(k[i], c.h[e]) for e, i, j in checks[p]):
                if search(p + 1):
                    return True
        return False

    if search(0):
        w = Witness0(tuple(k))
        assert is_witness0(cm, nerve, c, c2, w)
        return w
    return None


def iter_cocycles0(cm, nerve, budget=None):
    """All 0-cocycles in lexicographic order of (g, h)."""
    G, H = cm.G0, cm.Gm1
    tick = _Budget(budget, "0-cocycle enumeration").tick
    closes = [[] for _ in nerve.edges]
    for t in nerve.triangles:
        ij, jk, ik = nerve.tri_edges(t)
        closes[max(ij, jk, ik)].append((ij, jk, ik))
    m = len(nerve.edges)
    for g in product(range(G.size), repeat=nerve.n_vertices):
        tick()
        h = [0] * m

        def fill(e):
            if e == m:
                yield ZeroCocycle(g, tuple(h))
                return
            i, j = nerve.edges[e]
            for he in cm.fibers[G.mul(g[i], G.inv[g[j]])]:
                tick()
                h[e] = he
                if all(H.mul(h[a], h[b]) == h[c] for a, b, c in closes[e]):
                    yield from fill(e + 1)

        yield from fill(0)


@dataclass
class H0Result:
    classes: list
    table: Optional[list] = None  # class multiplication table when the classes form a group

    def __len__(self):
        return len(self.classes)


def h0(cm, nerve, budget=None) -> H0Result:
    reps = []
    try:
        for c in iter_cocycles0(cm, nerve, budget):
            if not any(equiv0(cm, nerve, r, c, budget) for r in reps):
                reps.append(c)
    except BudgetExceeded as exc:
        exc.partial = H0Result(list(reps))
        raise
    result = H0Result(reps)
    abelian = cm.Gm1.is_abelian() and cm.G0.is_abelian()
    g0_like = cm.Gm1.size == 1
    g1_like = cm.G0.size == 1
    if abelian and (g0_like or g1_like):
        G, H = cm.G0, cm.Gm1
        table = []
        for a in reps:
            row = []
            for b in reps:
                prod_c = ZeroCocycle(tuple(G.mul(x, y) for x, y in zip(a.g, b.g)),
                                     tuple(H.mul(x, y) for x, y in zip(a.h, b.h)))
                row.append(next(i for i, r in enumerate(reps)
                                if equiv0(cm, nerve, r, prod_c, budget)))
            table.append(row)
        result.table = table
    return result


# -- degree 1 ------------------------------------------------------------------


def check1(cm: CrossedModule, nerve: Nerve, c: OneCocycle) -> bool:
    _check_shape(cm, nerve, c, 1)
    G, H, d, act = cm.G0, cm.Gm1, cm.d, cm.act
    for t, hijk in zip(nerve.triangles, c.h):
        ij, jk, ik = nerve.tri_edges(t)
        if G.mul(c.g[ij], c.g[jk]) != G.mul(d[hijk], c.g[ik]):
            return False
    for t in nerve.tetrahedra:
        ijk, ikl, jkl, ijl, ij = nerve.tet_faces(t)
        if H.mul(c.h[ijk], c.h[ikl]) != H.mul(act[c.g[ij]][c.h[jkl]], c.h[ijl]):
            return False
    return True


def apply_witness1(cm, nerve, c: OneCocycle, w: Witness1) -> OneCocycle:
    """Solve the equivalence relations for c' given c and (l, k)."""
    G, H, d, act = cm.G0, cm.Gm1, cm.d, cm.act
    g = tuple(G.prod(d[w.k[e]], w.l[i], c.g[e], G.inv[w.l[j]])
              for e, (i, j) in enumerate(nerve.edges))
    h = []
    for t, hijk in zip(nerve.triangles, c.h):
        ij, jk, ik = nerve.tri_edges(t)
        i = t[0]
        h.append(H.prod(act[g[ij]][w.k[jk]], w.k[ij], act[w.l[i]][hijk], H.inv[w.k[ik]]))
    return OneCocycle(g, tuple(h))


def is_witness1(cm, nerve, c, c2, w: Witness1) -> bool:
    G, H, d, act = cm.G0, cm.Gm1, cm.d, cm.act
    for e, (i, j) in enumerate(nerve.edges):
        if G.mul(c2.g[e], w.l[j]) != G.prod(d[w.k[e]], w.l[i], c.g[e]):
            return False
    for t, hijk in zip(nerve.triangles, c.h):
        ij, jk, ik = nerve.tri_edges(t)
        lhs = H.mul(c2.h[nerve.triangle_index[t]], w.k[ik])
        rhs = H.prod(act[c2.g[ij]][w.k[jk]], w.k[ij], act[w.l[t[0]]][hijk])
        if lhs != rhs:
            return False
    return True


def inverse_witness1(cm, nerve, w: Witness1) -> Witness1:
    """l_i -> l_i^-1, k_ij -> l_i^-1 . k_ij^-1."""
    G, H, act = cm.G0, cm.Gm1, cm.act
    l = tuple(G.inv[v] for v in w.l)
    k = tuple(act[l[i]][H.inv[w.k[e]]] for e, (i, _) in enumerate(nerve.edges))
    return Witness1(l, k)


def compose_witness1(cm, nerve, w2: Witness1, w1: Witness1) -> Witness1:
    """w2 after w1: l = l2 l1, k_ij = k2_ij (l2_i . k1_ij)."""
    G, H, act = cm.G0, cm.Gm1, cm.act
    l = tuple(G.mul(a, b) for a, b in zip(w2.l, w1.l))
    k = tuple(H.mul(w2.k[e], act[w2.l[i]][w1.k[e]]) for e, (i, _) in enumerate(nerve.edges))
    return Witness1(l, k)


def coset_transversal(cm: CrossedModule):
    """Least element of each coset of im(d) in G0."""
    G = cm.G0
    image = cm.image()
    seen, reps = set(), []
    for g in G:
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(a, g) for a in image)
    return reps


def equiv1(cm, nerve, c, c2, budget=None, gauge_fix=True) -> Optional[Witness1]:
    """A witness (l, k) relating c to c2, or None after exhausting the search.

    With ``gauge_fix`` the vertex values l_i range over a transversal of
    G0 / im(d) only: any witness (l, k) is 2-isomorphic, via m_i in Gm1, to
    (d(m_i) l_i, (g'_ij . m_j) k_ij m_i^-1), so one representative per coset
    suffices.  Vertices are placed along a breadth-first spanning tree; each
    edge is filled from the fiber of d as soon as both endpoints are placed
    and each triangle is checked as soon as its three edges are filled.
    """
    for x in (c, c2):
        if not check1(cm, nerve, x):
            raise InvalidCocycle(f"{x} is not a 1-cocycle")
    G, H, act = cm.G0, cm.Gm1, cm.act
    tick = _Budget(budget, "equiv1").tick
    vertex_domain = coset_transversal(cm) if gauge_fix else list(range(G.size))

    order = nerve.spanning_order()
    placed, filled = set(), set()
    plan = []
    edge_tris = {e: [] for e in range(len(nerve.edges))}
    for ti, t in enumerate(nerve.triangles):
        for e in nerve.tri_edges(t):
            edge_tris[e].append(ti)
    for v in order:
        placed.add(v)
        plan.append(("v", v, None))
        for e, (i, j) in enumerate(nerve.edges):
            if e not in filled and i in placed and j in placed:
                filled.add(e)
                ready = [ti for ti in edge_tris[e]
                         if all(x in filled for x in nerve.tri_edges(nerve.triangles[ti]))]
                plan.append(("e", e, ready))

    l = [0] * nerve.n_vertices
    k = [0] * len(nerve.edges)

    def tri_ok(ti):
        t = nerve.triangles[ti]
        ij, jk, ik = nerve.tri_edges(t)
        lhs = H.mul(c2.h[ti], k[ik])
        return lhs == H.prod(act[c2.g[ij]][k[jk]], k[ij], act[l[t[0]]][c.h[ti]])

    def search(p):
        if p == len(plan):
            return True
        kind, idx, ready = plan[p]
        if kind == "v":
            for lv in vertex_domain:
                tick()
                l[idx] = lv
                if search(p + 1):
                    return True
            return False
        i, j = nerve.edges[idx]
        target = G.prod(c2.g[idx], l[j], G.inv[c.g[idx]], G.inv[l[i]])
        for ke in cm.fibers[target]:
            tick()
            k[idx] = ke
            if all(tri_ok(ti) for ti in ready) and search(p + 1):
                return True
        return False

    if search(0):
        w = Witness1(tuple(l), tuple(k))
        assert is_witness1(cm, nerve, c, c2, w)
        return w
    return None


def iter_cocycles1(cm, nerve, budget=None):
    """All 1-cocycles in lexicographic order of (g, h)."""
    G, H, act = cm.G0, cm.Gm1, cm.act
    tick = _Budget(budget, "1-cocycle enumeration").tick
    m, T = len(nerve.edges), len(nerve.triangles)
    tri_edges = [nerve.tri_edges(t) for t in nerve.triangles]
    g_closes = [[] for _ in range(m)]
    for ti, (ij, jk, ik) in enumerate(tri_edges):
        g_closes[max(ij, jk, ik)].append((ij, jk, ik))
    h_closes = [[] for _ in range(T)]
    for t in nerve.tetrahedra:
        faces = nerve.tet_faces(t)
        h_closes[max(faces[:4])].append(faces)
    g = [0] * m
    h = [0] * T

    def fill_h(ti):
        if ti == T:
            yield OneCocycle(tuple(g), tuple(h))
            return
        ij, jk, ik = tri_edges[ti]
        target = G.prod(g[ij], g[jk], G.inv[g[ik]])
        for hv in cm.fibers[target]:
            tick()
            h[ti] = hv
            if all(H.mul(h[a], h[b]) == H.mul(act[g[e]][h[c]], h[dd])
                   for a, b, c, dd, e in h_closes[ti]):
                yield from fill_h(ti + 1)

    def fill_g(e):
        if e == m:
            yield from fill_h(0)
            return
        for gv in range(G.size):
            tick()
            g[e] = gv
            if all(cm.fibers[G.prod(g[a], g[b], G.inv[g[c]])] for a, b, c in g_closes[e]):
                yield from fill_g(e + 1)

    yield from fill_g(0)


@dataclass
class H1Result:
    classes: list  # class representatives, lexicographically least in their class
    basepoint: int = 0  # index of the trivial class

    def __len__(self):
        return len(self.classes)


def h1(cm, nerve, budget=None) -> H1Result:
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    reps = []
    trivial = OneCocycle((0,) * len(nerve.edges), (0,) * len(nerve.triangles))
    try:
        for c in iter_cocycles1(cm, nerve, budget):
            if not any(equiv1(cm, nerve, r, c, budget) for r in reps):
                reps.append(c)
    except BudgetExceeded as exc:
        exc.partial = H1Result(list(reps))
        raise
    base = next(i for i, r in enumerate(reps) if equiv1(cm, nerve, r, trivial, budget))
    return H1Result(reps, base)


# -- classical cohomology with abelian coefficients ------------------------------


def _coboundary(G: FiniteGroup, nerve: Nerve, a, dim):
    """delta: C^dim -> C^(dim+1), (delta a)(s) = sum_t (-1)^t a(s minus vertex t)."""
    idx = nerve.index(dim)
    out = []
    for s in nerve.simplices(dim + 1):
        v = 0
        for t in range(len(s)):
            face = s[:t] + s[t + 1:]
            x = a[idx[face]]
            v = G.mul(v, x if t % 2 == 0 else G.inv[x])
        out.append(v)
    return tuple(out)


def _pointwise(G, a, b):
    return tuple(G.mul(x, y) for x, y in zip(a, b))


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def invariant_factors(elements, mul, identity):
    """Invariant factors d_1 | d_2 | ... of a finite abelian group given by its elements."""
    elements = list(elements)
    size = len(elements)
    if size == 1:
        return []

    def power(x, k):
        out = identity
        for _ in range(k):
            out = mul(out, x)
        return out

    def log(p, m):
        r = 0
        while m > 1:
            m //= p
            r += 1
        return r

    primary = {}
    for p in _prime_factors(size):
        # ranks[k] = log_p #{x : x^(p^k) = 1}; grows until the p-part is exhausted
        ranks = [0]
        while True:
            k = len(ranks)
            r = log(p, sum(1 for x in elements if power(x, p**k) == identity))
            if r == ranks[-1]:
                break
            ranks.append(r)
        # ranks[k] - ranks[k-1] cyclic factors have order >= p^k
        at_least = [ranks[k] - ranks[k - 1] for k in range(1, len(ranks))] + [0]
        exps = []
        for k in range(1, len(at_least)):
            exps += [k] * (at_least[k - 1] - at_least[k])
        primary[p] = sorted(exps, reverse=True)
    width = max(len(v) for v in primary.values())
    factors = []
    for slot in range(width):
        f = 1
        for p, exps in primary.items():
            if slot < len(exps):
                f *= p ** exps[slot]
        factors.append(f)
    return sorted(factors)


@dataclass
class ClassicalCohomology:
    group: FiniteGroup
    nerve: Nerve
    degree: int
    invariant_factors: list
    representatives: list  # lexicographically least cochain per class
    boundaries: list = field(repr=False, default_factory=list)

    @property
    def order(self):
        return len(self.representatives)

    def class_of(self, cochain):
        """Canonical representative of the class of a cocycle."""
        G = self.group
        cochain = tuple(cochain)
        if self.degree + 1 <= 3 and self.nerve.simplices(self.degree + 1):
            if any(_coboundary(G, self.nerve, cochain, self.degree)):
                raise InvalidCocycle("cochain is not a cocycle")
        return min(_pointwise(G, cochain, b) for b in self.boundaries)

    def describe(self):
        if not self.invariant_factors:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def classical_cech(G: FiniteGroup, nerve: Nerve, degree: int, budget=None) -> ClassicalCohomology:
    """Simplicial cohomology of the nerve with coefficients in a finite abelian group."""
    if not G.is_abelian():
        raise NotAbelian("classical Cech cohomology needs an abelian coefficient group")
    if degree not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    tick = _Budget(budget, "classical cochain enumeration").tick
    n_here = len(nerve.simplices(degree))
    has_next = bool(nerve.simplices(degree + 1))
    cocycles = []
    for a in product(range(G.size), repeat=n_here):
        tick()
        if not has_next or not any(_coboundary(G, nerve, a, degree)):
            cocycles.append(a)
    if degree == 0:
        boundaries = [(0,) * n_here]
    else:
        seen = set()
        for b in product(range(G.size), repeat=len(nerve.simplices(degree - 1))):
            tick()
            seen.add(_coboundary(G, nerve, b, degree - 1))
        boundaries = sorted(seen)
    reps = sorted({min(_pointwise(G, z, b) for b in boundaries) for z in cocycles})
    rep_set = set(reps)

    def canon(z):
        c = min(_pointwise(G, z, b) for b in boundaries)
        assert c in rep_set
        return c

    factors = invariant_factors(reps, lambda a, b: canon(_pointwise(G, a, b)), reps[0])
    return ClassicalCohomology(G, nerve, degree, factors, reps, boundaries)


def classical_nonabelian_h1(G: FiniteGroup, nerve: Nerve):
    """Classes of g_ij with g_ij g_jk = g_ik modulo g_ij -> l_i g_ij l_j^-1, by orbit enumeration.

    Returns the sorted list of lexicographically least orbit members.
    """
    cocycles = []
    for g in product(range(G.size), repeat=len(nerve.edges)):
        if all(G.mul(g[ij], g[jk]) == g[ik] for ij, jk, ik in map(nerve.tri_edges, nerve.triangles)):
            cocycles.append(g)
    remaining = set(cocycles)
    reps = []
    for g in cocycles:
        if g not in remaining:
            continue
        orbit = {tuple(G.prod(l[i], g[e], G.inv[l[j]]) for e, (i, j) in enumerate(nerve.edges))
                 for l in product(range(G.size), repeat=nerve.n_vertices)}
        remaining -= orbit
        reps.append(min(orbit))
    return sorted(reps)


# -- the G[0] / G[1] comparison ---------------------------------------------------


def _bijection(cm_reps, to_classical, classical_reps, label):
    images = [to_classical(r) for r in cm_reps]
    if len(set(images)) != len(images):
        raise MismatchDetected(f"{label}: two crossed-module classes map to one classical class")
    if set(images) != set(classical_reps):
        raise MismatchDetected(f"{label}: classical classes not hit: "
                               f"{sorted(set(classical_reps) - set(images))}")
    return images


def compare_hyper(G: FiniteGroup, nerve: Nerve, budget=None) -> dict:
    """Explicit bijections H^i(G[0]) <-> H^i(G) and, for abelian G, H^i(G[1]) <-> H^(i+1)(G)."""
    rows = []
    g0 = make_g0(G)
    abelian = G.is_abelian()

    # G[0], degree 0: g_i with g_i = g_j along edges
    r0 = h0(g0, nerve, budget)
    if abelian:
        cl = classical_cech(G, nerve, 0, budget)
        images = _bijection(r0.classes, lambda c: cl.class_of(c.g), cl.representatives, "H0(G[0])")
    else:
        sections = sorted(g for g in product(range(G.size), repeat=nerve.n_vertices)
                          if all(g[i] == g[j] for i, j in nerve.edges))
        images = _bijection(r0.classes, lambda c: c.g, sections, "H0(G[0])")
    rows.append(_row("G[0]", 0, 0, r0.classes, images, nerve))

    # G[0], degree 1: classical (possibly nonabelian) H^1
    r1 = h1(g0, nerve, budget)
    if abelian:
        cl = classical_cech(G, nerve, 1, budget)
        images = _bijection(r1.classes, lambda c: cl.class_of(c.g), cl.representatives, "H1(G[0])")
    else:
        reps = classical_nonabelian_h1(G, nerve)
        lookup = {}
        for rep in reps:
            for l in product(range(G.size), repeat=nerve.n_vertices):
                lookup[tuple(G.prod(l[i], rep[e], G.inv[l[j]])
                             for e, (i, j) in enumerate(nerve.edges))] = rep
        images = _bijection(r1.classes, lambda c: lookup[c.g], reps, "H1(G[0])")
    rows.append(_row("G[0]", 1, 1, r1.classes, images, nerve))

    if abelian:
        g1 = make_g1(G)
        r0 = h0(g1, nerve, budget)
        cl = classical_cech(G, nerve, 1, budget)
        images = _bijection(r0.classes, lambda c: cl.class_of(c.h), cl.representatives, "H0(G[1])")
        rows.append(_row("G[1]", 0, 1, r0.classes, images, nerve))
        r1 = h1(g1, nerve, budget)
        cl = classical_cech(G, nerve, 2, budget)
        images = _bijection(r1.classes, lambda c: cl.class_of(c.h), cl.representatives, "H1(G[1])")
        rows.append(_row("G[1]", 1, 2, r1.classes, images, nerve))
    return {"nerve": nerve.name, "group_order": G.size, "abelian": abelian,
            "comparisons": rows, "verified": True}


def _row(kind, degree, classical_degree, reps, images, nerve):
    return {
        "crossed_module": kind,
        "degree": degree,
        "classical_degree": classical_degree,
        "count": len(reps),
        "classical_count": len(set(images)),
        "pairs": [[r.to_json(nerve), list(img)] for r, img in zip(reps, images)],
    }
