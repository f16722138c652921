"""Finite commutative residuated frames and their Galois algebras W+.

A frame is a finite commutative monoid W with an accept set A; the
relation is x N y iff x*y in A, which is automatically nuclear. Subsets
of W are bitmasks (Python ints) internally; closed sets are exposed as
frozensets of element indices.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

MONOID_CAP = 4096
UNIVERSE_CAP = 512
ASSIGNMENT_CAP = 10 ** 6


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _mask(xs):
    m = 0
    for x in xs:
        m |= 1 << x
    return m


class FiniteMonoid:
    def __init__(self, elements, table, unit, check=True):
        self.elements = list(elements)
        self.table = np.asarray(table, dtype=np.int64)
        self.unit = unit
        n = len(self.elements)
        if self.table.shape != (n, n):
            raise ValueError("operation table has the wrong shape")
        if check:
            self.check()

    def __len__(self):
        return len(self.elements)

    def mul(self, a, b):
        return int(self.table[a, b])

    def check(self):
        T = self.table
        n = len(self)
        idx = np.arange(n)
        if not (T == T.T).all():
            raise ValueError("operation is not commutative")
        if not ((T[self.unit] == idx).all()):
            raise ValueError("unit law fails")
        for a in range(n):
            # (a*b)*c == a*(b*c) for all b, c
            if not (T[T[a][:, None], idx[None, :]] == T[a][T]).all():
                raise ValueError("operation is not associative")


def truncated_monoid(g: int, c: int) -> FiniteMonoid:
    """Vectors in {0..c}^g under coordinatewise addition capped at c."""
    if g < 1 or c < 1:
        raise ValueError("g and c must be positive")
    size = (c + 1) ** g
    if size > MONOID_CAP:
        raise ValueError(f"monoid size {size} exceeds cap {MONOID_CAP}")
    elems = list(itertools.product(range(c + 1), repeat=g))
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[tuple(min(x + y, c) for x, y in zip(a, b))] for b in elems] for a in elems]
    # saturating addition is associative and commutative; skip the O(n^3)
    # check for large sizes
    return FiniteMonoid(elems, table, index[(0,) * g], check=size <= 256)


class FiniteFrame:
    def __init__(self, monoid: FiniteMonoid, accept):
        self.monoid = monoid
        self.accept = frozenset(accept)
        n = len(monoid)
        acc = np.zeros(n, dtype=bool)
        for a in self.accept:
            acc[a] = True
        self.acc = acc
        self.N = acc[monoid.table]           # N[x, y] iff x*y in A
        self.rows = [_mask(np.nonzero(self.N[x])[0].tolist()) for x in range(n)]
        self.full = (1 << n) - 1

    def __len__(self):
        return len(self.monoid)

    def check_nuclear(self):
        T = self.monoid.table
        n = len(self)
        for x in range(n):
            # (x*y) N z  iff  x N (y*z)
            if not (self.N[T[x]] == self.N[x][T]).all():
                return False
        return True

    def right(self, X: int) -> int:
        """X^> = {y : x N y for all x in X}, as a mask."""
        out = self.full
        for x in _bits(X):
            out &= self.rows[x]
        return out

    def left(self, Y: int) -> int:
        """Y^< = {x : x N y for all y in Y}; N is symmetric here."""
        return _mask(x for x in range(len(self)) if self.rows[x] & Y == Y)

    def gamma(self, X: int) -> int:
        return self.left(self.right(X))


def closure(frame: FiniteFrame, X) -> frozenset:
    return frozenset(_bits(frame.gamma(_mask(X))))


def closed_sets(frame: FiniteFrame, exhaustive=False) -> list:
    """All gamma-closed sets as masks, sorted.

    Every closed set is an intersection of basic closed sets {y}^<, so we
    close those (and W) under intersection. exhaustive=True closes every
    subset instead; only feasible for tiny W.
    """
    n = len(frame)
    if exhaustive:
        if n > 12:
            raise ValueError("exhaustive closed-set enumeration needs |W| <= 12")
        return sorted({frame.gamma(m) for m in range(1 << n)})
    found = {frame.full}
    for y in range(n):
        found.add(frame.rows[y])  # {y}^< == row y by symmetry
    frontier = list(found)
    while frontier:
        new = []
        for a in frontier:
            for b in list(found):
                c = a & b
                if c not in found:
                    found.add(c)
                    new.append(c)
                    if len(found) > UNIVERSE_CAP:
                        raise ValueError(f"W+ exceeds {UNIVERSE_CAP} closed sets")
        frontier = new
    return sorted(found)


class PlusAlgebra:
    """W+ as operation tables over indices into `universe`."""

    def __init__(self, frame: FiniteFrame, check=True):
        self.frame = frame
        U = closed_sets(frame)
        if len(U) > UNIVERSE_CAP:
            raise ValueError(f"W+ exceeds {UNIVERSE_CAP} closed sets")
        self.universe = U
        index = {m: i for i, m in enumerate(U)}
        self.index = index
        u = len(U)
        T = frame.monoid.table
        n = len(frame)
        # x*Y for each element x and closed set Y
        xy = [[_mask({int(T[x, y]) for y in _bits(Y)}) for Y in U] for x in range(n)]
        members = [list(_bits(X)) for X in U]
        self.meet = np.empty((u, u), dtype=np.int64)
        self.join = np.empty((u, u), dtype=np.int64)
        self.prod = np.empty((u, u), dtype=np.int64)
        self.impl = np.empty((u, u), dtype=np.int64)
        for i, X in enumerate(U):
            for j, Y in enumerate(U):
                self.meet[i, j] = index[X & Y]
                self.join[i, j] = index[frame.gamma(X | Y)]
                p = 0
                for x in members[i]:
                    p |= xy[x][j]
                self.prod[i, j] = index[frame.gamma(p)]
                # X -> Y = {z : X*z subset of Y}
                self.impl[i, j] = index[_mask(
                    z for z in range(n) if _mask(int(T[x, z]) for x in members[i]) & ~Y == 0)]
        self.leq = np.array([[(X & ~Y) == 0 for Y in U] for X in U], dtype=bool)
        self.unit = index[frame.gamma(1 << frame.monoid.unit)]
        self.bottom = index[frame.gamma(0)]
        if check:
            self.check()

    def __len__(self):
        return len(self.universe)

    def set_of(self, i) -> frozenset:
        return frozenset(_bits(self.universe[i]))

    def check(self):
        L, P, I, J, Mt = self.leq, self.prod, self.impl, self.join, self.meet
        u = len(self)
        idx = np.arange(u)
        for x in range(u):
            # residuation: x*y <= z  iff  y <= x->z
            lhs = L[P[x][:, None], idx[None, :]]
            rhs = L[idx[:, None], I[x][None, :]]
            if not (lhs == rhs).all():
                raise AssertionError("residuation law fails in W+")
            # associativity of the closed product
            if not (P[P[x][:, None], idx[None, :]] == P[x][P]).all():
                raise AssertionError("product is not associative in W+")
            # join is the least upper bound, meet the greatest lower bound
            for y in range(u):
                j, m = J[x, y], Mt[x, y]
                if not (L[x, j] and L[y, j] and L[m, x] and L[m, y]):
                    raise AssertionError("join/meet are not bounds")
                uppers = L[x] & L[y]
                if not L[j][uppers].all():
                    raise AssertionError("join is not least")
                lowers = L[:, x] & L[:, y]
                if not L[:, m][lowers].all():
                    raise AssertionError("meet is not greatest")
        if not (P == P.T).all():
            raise AssertionError("product is not commutative in W+")
        if not (P[self.unit] == idx).all():
            raise AssertionError("gamma(1) is not the unit of W+")

    def power(self, i, e):
        out = self.unit
        for _ in range(e):
            out = self.prod[out, i]
        return out


def plus_algebra(frame: FiniteFrame, check=True) -> PlusAlgebra:
    return PlusAlgebra(frame, check)


def _equation_parts(eq):
    if hasattr(eq, "D"):
        return (1,) * eq.arity, eq.D
    return eq.lhs, eq.rhs


def satisfies(alg: PlusAlgebra, eq) -> bool:
    """Does every assignment of closed sets validate lhs <= rhs?"""
    f, D = _equation_parts(eq)
    n = len(f)
    if n > 4:
        raise ValueError("arity above 4 is not supported")
    u = len(alg)
    if u ** n > ASSIGNMENT_CAP:
        raise ValueError(f"{u}^{n} assignments exceed {ASSIGNMENT_CAP}")
    grids = np.indices((u,) * n).reshape(n, -1)
    pows = {}

    def mono(v):
        val = np.full(grids.shape[1], alg.unit, dtype=np.int64)
        for i, e in enumerate(v):
            if e:
                if (i, e) not in pows:
                    pw = np.array([alg.power(a, e) for a in range(u)], dtype=np.int64)
                    pows[(i, e)] = pw[grids[i]]
                val = alg.prod[val, pows[(i, e)]]
        return val

    left = mono(f)
    right = None
    for d in D:
        m = mono(d)
        right = m if right is None else alg.join[right, m]
    return bool(alg.leq[left, right].all())


def frame_condition(frame: FiniteFrame, eq) -> bool:
    """(D): u^d N v for every d in D implies u^1 N v, for all u in W^n, v in W."""
    f, D = _equation_parts(eq)
    n = len(f)
    if n > 4:
        raise ValueError("arity above 4 is not supported")
    T = frame.monoid.table
    w = len(frame)
    grids = np.indices((w,) * n).reshape(n, -1)

    def mono(v):
        val = np.full(grids.shape[1], frame.monoid.unit, dtype=np.int64)
        for i, e in enumerate(v):
            for _ in range(e):
                val = T[val, grids[i]]
        return val

    premise = np.ones((grids.shape[1], w), dtype=bool)
    for d in D:
        premise &= frame.N[mono(d)]
    concl = frame.N[mono(f)]
    return bool((~premise | concl).all())


def check_galois_laws(frame: FiniteFrame, samples=64, rng=None) -> bool:
    """Galois-connection laws on random (or all, when small) subsets."""
    n = len(frame)
    rng = rng or random.Random(0)
    if n <= 8:
        subsets = list(range(1 << n))
    else:
        subsets = [rng.getrandbits(n) for _ in range(samples)]
    for X in subsets:
        gX = frame.gamma(X)
        if X & ~gX or frame.gamma(gX) != gX:
            return False
    pairs = [(rng.choice(subsets), rng.choice(subsets)) for _ in range(samples)]
    for X, Y in pairs:
        gX, gY = frame.gamma(X), frame.gamma(Y)
        if (X & ~Y) == 0 and gX & ~gY:
            return False
        # gamma(X) <= gamma(Y) iff Y^> <= X^>
        if ((gX & ~gY) == 0) != ((frame.right(Y) & ~frame.right(X)) == 0):
            return False
    return True


def random_frame(rng: random.Random, max_g=2, max_c=3) -> FiniteFrame:
    g = rng.randint(1, max_g)
    c = rng.randint(1, max_c)
    mon = truncated_monoid(g, c)
    accept = [i for i in range(len(mon)) if rng.random() < 0.5]
    return FiniteFrame(mon, accept)


def random_simple_equation(rng: random.Random, max_n=2, max_size=3, max_exp=3):
    from .eqcore import SimpleEquation

    while True:
        n = rng.randint(1, max_n)
        size = rng.randint(1, max_size)
        D = {tuple(rng.randint(0, max_exp) for _ in range(n)) for _ in range(size)}
        try:
            return SimpleEquation(D)
        except ValueError:
            continue


def nucond_suite(seed: int, count=200, per_frame=5):
    """Compare W+ |= [D] with the frame condition (D) on random frames.

    Returns a list of result dicts, one per (frame, equation) pair.
    """
    rng = random.Random(seed)
    out = []
    for k in range(count):
        fr = random_frame(rng)
        alg = plus_algebra(fr)
        galois = check_galois_laws(fr, rng=rng) and fr.check_nuclear()
        for _ in range(per_frame):
            eq = random_simple_equation(rng)
            a = satisfies(alg, eq)
            b = frame_condition(fr, eq)
            out.append({"frame": k, "size": len(fr), "closed": len(alg),
                        "accept": sorted(fr.accept), "equation": str(eq),
                        "algebra": a, "frame_condition": b, "galois": galois,
                        "agree": a == b})
    return out
