"""Exact rational feasibility for small linear systems.

Equalities are removed by Gaussian elimination, the remaining
inequalities go through Fourier-Motzkin elimination, and a point is
recovered by back-substitution taking the smallest admissible value for
each free coordinate in turn. Everything is done with Fractions, so the
answers are exact; the price is that this only suits a handful of
variables.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

Vec = tuple


def _normalize(coeffs, rhs):
    """Scale a >= constraint to coprime integer coefficients."""
    dens = [c.denominator for c in coeffs if c] + [Fraction(rhs).denominator]
    m = lcm(*dens) if dens else 1
    ints = [int(c * m) for c in coeffs]
    b = Fraction(rhs) * m
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        return tuple(ints), b
    return tuple(v // g for v in ints), b / g


def _eliminate(cons, j):
    """Project out variable j from a list of (coeffs, rhs) >= constraints."""
    pos, neg, rest = [], [], []
    for a, b in cons:
        if a[j] > 0:
            pos.append((a, b))
        elif a[j] < 0:
            neg.append((a, b))
        else:
            rest.append((a, b))
    out = list(rest)
    for ap, bp in pos:
        for an, bn in neg:
            cp, cn = -an[j], ap[j]
            a = tuple(cp * x + cn * y for x, y in zip(ap, an))
            out.append((a, cp * bp + cn * bn))
    return _prune(out)


def _prune(cons):
    """Normalize, dedupe and keep only the strongest rhs per direction.

    Returns None if a constraint with zero coefficients is violated.
    """
    best = {}
    for a, b in cons:
        a, b = _normalize(a, b)
        if not any(a):
            if b > 0:
                return None
            continue
        if a not in best or b > best[a]:
            best[a] = b
    return [(a, best[a]) for a in sorted(best)]


def _rref(rows, n):
    """Reduced row echelon form of augmented rows [a | b]; None if inconsistent."""
    rows = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for row in rows[r:]:
        if row[n] != 0:
            return None
    return rows[:r], pivots


def feasible_point(n: int, eqs: Sequence = (), ineqs: Sequence = ()) -> Optional[tuple]:
    """Find a rational x with a.x == b for every (a, b) in eqs and
    a.x >= b for every (a, b) in ineqs.

    Returns a tuple of Fractions, or None when the system is infeasible.
    """
    if n == 0:
        ok = all(b == 0 for _, b in eqs) and all(b <= 0 for _, b in ineqs)
        return () if ok else None
    red = _rref([list(a) + [b] for a, b in eqs], n) if eqs else ([], [])
    if red is None:
        return None
    rows, pivots = red
    free = [c for c in range(n) if c not in pivots]
    # x = x0 + sum_f y_f * basis[f]
    x0 = [Fraction(0)] * n
    for row, p in zip(rows, pivots):
        x0[p] = row[n]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    m = len(free)
    cons = []
    for a, b in ineqs:
        a = [Fraction(x) for x in a]
        coeffs = tuple(sum(ai * vi for ai, vi in zip(a, v)) for v in basis)
        rhs = Fraction(b) - sum(ai * xi for ai, xi in zip(a, x0))
        cons.append((coeffs, rhs))
    y = _lexmin(m, cons)
    if y is None:
        return None
    x = list(x0)
    for yi, v in zip(y, basis):
        if yi:
            x = [xi + yi * vi for xi, vi in zip(x, v)]
    return tuple(x)


def _lexmin(m, cons):
    stages = [None] * (m + 1)
    cur = _prune(cons)
    if cur is None:
        return None
    stages[m] = cur
    for j in range(m - 1, -1, -1):
        cur = _eliminate(cur, j)
        if cur is None:
            return None
        stages[j] = cur
    y = []
    for j in range(m):
        lo, hi = None, None
        for a, b in stages[j + 1]:
            c = a[j]
            if c == 0:
                continue
            val = (b - sum(a[i] * y[i] for i in range(j))) / c
            if c > 0:
                lo = val if lo is None else max(lo, val)
            else:
                hi = val if hi is None else min(hi, val)
        if lo is not None:
            y.append(lo)
        elif hi is not None:
            y.append(min(Fraction(0), hi))
        else:
            y.append(Fraction(0))
    return y


def primitive(x) -> tuple:
    """Scale a rational vector to the primitive integer vector on its ray."""
    m = lcm(*[Fraction(v).denominator for v in x]) if x else 1
    ints = [int(Fraction(v) * m) for v in x]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def rank(vectors) -> int:
    vs = [list(v) for v in vectors]
    if not vs:
        return 0
    red = _rref([v + [0] for v in vs], len(vs[0]))
    return len(red[1])


def independent_subset(vectors) -> list:
    """Indices of a maximal linearly independent subset, chosen greedily."""
    chosen, picked = [], []
    r = 0
    for i, v in enumerate(vectors):
        if rank(picked + [v]) > r:
            picked.append(v)
            chosen.append(i)
            r += 1
    return chosen
