"""Finite groups as multiplication tables (identity at index 0)."""

from __future__ import annotations

from itertools import permutations, product

from .errors import MalformedTables, ParseError


class FiniteGroup:
    __slots__ = ("table", "names", "inv", "size")

    def __init__(self, table, names=None):
        table = tuple(tuple(int(v) for v in row) for row in table)
        size = len(table)
        if size == 0 or any(len(row) != size for row in table):
            raise MalformedTables("multiplication table must be square and non-empty")
        if any(not 0 <= v < size for row in table for v in row):
            raise MalformedTables("table entry out of range")
        self.table = table
        self.size = size
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(size))
        if len(self.names) != size:
            raise MalformedTables("names list has wrong length")
        inv = []
        for a in range(size):
            found = [b for b in range(size) if table[a][b] == 0]
            inv.append(found[0] if found else -1)
        self.inv = tuple(inv)

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(range(self.size))

    def __repr__(self):
        return f"FiniteGroup(order={self.size})"

    def mul(self, a, b):
        return self.table[a][b]

    def prod(self, *elems):
        out = 0
        for e in elems:
            out = self.table[out][e]
        return out

    def conj(self, g, h):
        """g h g^-1."""
        t = self.table
        return t[t[g][h]][self.inv[g]]

    def axiom_violations(self):
        bad = []
        t = self.table
        r = range(self.size)
        if any(t[0][a] != a or t[a][0] != a for a in r):
            bad.append("identity")
        if any(i < 0 or t[i][a] != 0 for a, i in enumerate(self.inv)):
            bad.append("inverse")
        if any(t[t[a][b]][c] != t[a][t[b][c]] for a in r for b in r for c in r):
            bad.append("associativity")
        return bad

    def is_abelian(self):
        t = self.table
        return all(t[a][b] == t[b][a] for a in self for b in self)

    def order_of(self, a):
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def center(self):
        t = self.table
        return [z for z in self if all(t[z][a] == t[a][z] for a in self)]

    def is_normal(self, elems):
        s = set(elems)
        return all(self.conj(g, h) in s for g in self for h in s)

    def subgroup(self, elems):
        """(H, embed) with H's own table; elements keep their relative order."""
        elems = sorted(set(elems))
        if 0 not in elems:
            raise MalformedTables("subgroup must contain the identity")
        index = {e: i for i, e in enumerate(elems)}
        try:
            table = [[index[self.table[a][b]] for b in elems] for a in elems]
        except KeyError:
            raise MalformedTables("subset is not closed under multiplication") from None
        return FiniteGroup(table, [self.names[e] for e in elems]), list(elems)

    def quotient(self, normal):
        """(G/N, projection, representatives); cosets are numbered by least element."""
        normal = sorted(set(normal))
        if not self.is_normal(normal):
            raise MalformedTables("quotient by a non-normal subset")
        proj = [-1] * self.size
        reps = []
        for g in self:
            if proj[g] >= 0:
                continue
            idx = len(reps)
            reps.append(g)
            for n in normal:
                proj[self.table[g][n]] = idx
        table = [[proj[self.table[a][b]] for b in reps] for a in reps]
        names = [f"[{self.names[r]}]" for r in reps]
        return FiniteGroup(table, names), proj, reps

    def to_json(self):
        return {"size": self.size, "table": [list(r) for r in self.table], "names": list(self.names)}

    @classmethod
    def from_json(cls, data):
        try:
            table = data["table"]
            if int(data.get("size", len(table))) != len(table):
                raise MalformedTables("size does not match table")
            return cls(table, data.get("names"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad group JSON: {exc}") from exc


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)],
                       [str(a) for a in range(n)])


def trivial() -> FiniteGroup:
    return cyclic(1)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    pairs = list(product(range(G.size), range(H.size)))
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(G.table[a][c], H.table[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    return FiniteGroup(table, [f"({G.names[a]},{H.names[b]})" for a, b in pairs])


def symmetric(n: int) -> FiniteGroup:
    """S_n on permutations of 0..n-1 in lexicographic order (identity first)."""
    perms = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(i) = p(q(i))
    table = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
    return FiniteGroup(table, ["".join(map(str, p)) for p in perms])


def quaternion() -> FiniteGroup:
    """Q8 with elements 1, -1, i, -i, j, -j, k, -k."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    rules = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    def split(name):
        return (-1, name[1:]) if name.startswith("-") else (1, name)

    def join(sign, base):
        return base if sign == 1 else "-" + base

    table = []
    for a in names:
        sa, ba = split(a)
        row = []
        for b in names:
            sb, bb = split(b)
            s, base = rules[(ba, bb)]
            row.append(names.index(join(sa * sb * s, base)))
        table.append(row)
    return FiniteGroup(table, names)


def klein() -> FiniteGroup:
    return direct_product(cyclic(2), cyclic(2))


def by_name(name: str) -> FiniteGroup:
    """Built-in fixtures: Z<n>, S<n>, Q8, V4 (also Z2xZ2), trivial."""
    key = name.replace("/", "").replace(" ", "")
    if key in ("Q8", "quaternion"):
        return quaternion()
    if key in ("V4", "Z2xZ2", "klein"):
        return klein()
    if key in ("1", "trivial"):
        return trivial()
    if key[:1] in ("Z", "C") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    if key[:1] == "S" and key[1:].isdigit():
        return symmetric(int(key[1:]))
    raise ParseError(f"unknown group fixture {name!r}")
