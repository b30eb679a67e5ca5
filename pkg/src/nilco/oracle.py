"""Brute-force verification on finite quotients.

Exhaustive twisted-conjugacy orbit enumeration over explicit finite group
tables, used as an independent check on every finite count the exact
machinery produces.
"""

import os
from itertools import product as iproduct

from .errors import BoundExceededError, NilcoError, ShapeError
from .intmat import determinant

DEFAULT_MAX_ORDER = 10**6
DEFAULT_DET_BOUND = 10**4


def max_order_cap(override=None):
    """Element cap for exhaustive enumeration; NILCO_MAX_ORDER overrides."""
    if override is not None:
        return int(override)
    env = os.environ.get("NILCO_MAX_ORDER")
    return int(env) if env else DEFAULT_MAX_ORDER


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x

    def blocks(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


class FiniteGroupTable:
    """A finite group given by an element list and an on-the-fly product rule."""

    def __init__(self, elements, product, identity, inverse=None, project=None):
        self.elements = tuple(elements)
        self.order = len(self.elements)
        self.product = product
        self.identity = identity
        self._inverse = inverse
        self.project = project
        self._index = {e: i for i, e in enumerate(self.elements)}
        if identity not in self._index:
            raise NilcoError("identity element missing from element list")

    def __contains__(self, e):
        return e in self._index

    def inverse(self, e):
        if self._inverse is not None:
            return self._inverse(e)
        for x in self.elements:
            if self.product(e, x) == self.identity:
                return x
        raise NilcoError(f"no inverse found for {e!r}")

    def check_group_axioms(self, full_triples=2_000_000, sample=2000, rng=None):
        """Identity/inverse always; associativity exhaustive while the triple
        count stays below full_triples, sampled above."""
        for e in self.elements:
            if self.product(e, self.identity) != e or self.product(self.identity, e) != e:
                raise NilcoError(f"identity axiom fails at {e!r}")
            self.inverse(e)
        if self.order**3 <= full_triples:
            triples = iproduct(self.elements, repeat=3)
        else:
            import random

            rng = rng or random.Random(0)
            triples = (
                tuple(rng.choice(self.elements) for _ in range(3)) for _ in range(sample)
            )
        for a, b, c in triples:
            if self.product(self.product(a, b), c) != self.product(a, self.product(b, c)):
                raise NilcoError(f"associativity fails at {(a, b, c)!r}")


def translation_group(modulus, dim):
    """(Z/m)^dim with componentwise addition."""
    if modulus < 1:
        raise NilcoError("modulus must be >= 1")
    elements = [tuple(v) for v in iproduct(range(modulus), repeat=dim)]

    def product(a, b):
        return tuple((x + y) % modulus for x, y in zip(a, b))

    def inverse(a):
        return tuple((-x) % modulus for x in a)

    return FiniteGroupTable(elements, product, (0,) * dim, inverse=inverse)


def twisted_orbits_finite(G, movers):
    """Orbit partition of G under u -> b_j * u * a_j^{-1} for movers (a_j, b_j).

    Returns (count, partition) where partition is a list of element lists
    in deterministic order.
    """
    for a, b in movers:
        if a not in G or b not in G:
            raise NilcoError(f"mover {(a, b)!r} contains foreign elements")
    uf = UnionFind(G.elements)
    inv = {a: G.inverse(a) for a, _ in movers}
    for a, b in movers:
        ai = inv[a]
        for u in G.elements:
            uf.union(u, G.product(G.product(b, u), ai))
    blocks = uf.blocks()
    index = {e: i for i, e in enumerate(G.elements)}
    partition = [sorted(block, key=index.__getitem__) for block in blocks.values()]
    partition.sort(key=lambda blk: index[blk[0]])
    return len(partition), partition


def cokernel_oracle(A, det_bound=DEFAULT_DET_BOUND, max_order=None):
    """Order of Z^n / im(A) for square nonsingular A by exhaustive orbit count.

    Enumerates (Z/m)^n with m = |det A| and translation moves by the columns
    of A; soundness rests on m * Z^n being contained in im(A).
    """
    if not A.is_square:
        raise ShapeError("cokernel oracle needs a square matrix")
    n = A.rows
    if n > 4:
        raise BoundExceededError(f"oracle dimension {n} exceeds 4")
    d = determinant(A)
    if d == 0:
        raise NilcoError("cokernel oracle requires a nonsingular matrix")
    m = abs(d)
    if m > det_bound:
        raise BoundExceededError(f"|det| = {m} exceeds bound {det_bound}")
    cap = max_order_cap(max_order)
    if m**n > cap:
        raise BoundExceededError(f"enumeration size {m ** n} exceeds cap {cap}")
    G = translation_group(m, n)
    movers = [((0,) * n, tuple(x % m for x in A.column(j))) for j in range(n)]
    count, _ = twisted_orbits_finite(G, movers)
    return count
