"""Blockings, b-solutions and the prespinal / spineless decision.

Row and column conventions: D is a set of exponent vectors (columns),
rows are variable indices. Row index sets are 1-based everywhere in this
module's public interface.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log
from typing import Optional, Sequence

from .eqcore import SimpleEquation, Substitution, dot, ones, delta
from .rational import feasible_point, independent_subset, primitive

ARITY_CAP = 10
SIZE_CAP = 16


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Blocking:
    rows: tuple      # (R0, R1, ..., Rk) as sorted tuples of 1-based row indices
    columns: tuple   # (D0, D1, ..., Dk) as sorted tuples of vectors

    @property
    def k(self) -> int:
        return len(self.rows) - 1

    def upper(self, i) -> tuple:
        """R_i^+ = R_i u ... u R_k."""
        return tuple(sorted(r for part in self.rows[i:] for r in part))

    def to_dict(self):
        return {"rows": [list(r) for r in self.rows], "columns": [[list(d) for d in c] for c in self.columns]}


def _check(eq, arity_cap, size_cap):
    if arity_cap is not None and eq.arity > arity_cap:
        raise CapExceeded(f"arity {eq.arity} exceeds cap {arity_cap}")
    if size_cap is not None and len(eq.D) > size_cap:
        raise CapExceeded(f"|D| = {len(eq.D)} exceeds cap {size_cap}")


def columns_for_rows(D, rows) -> tuple:
    """Column classes induced by an ordered row partition (R0, ..., Rk)."""
    remaining = list(D)
    cols = [None] * len(rows)
    for j in range(len(rows) - 1, 0, -1):
        Rj = {r - 1 for r in rows[j]}
        cols[j] = tuple(d for d in remaining if any(d[i] for i in Rj))
        remaining = [d for d in remaining if d not in cols[j]]
    cols[0] = tuple(remaining)
    return tuple(cols)


def rows_for_columns(n, columns) -> tuple:
    """Row partition induced by an ordered column partition: row i goes to the
    first class j >= 1 where it is nonzero, provided it is zero on D0 and on
    all earlier classes; every other row goes to R0."""
    parts = [[] for _ in columns]
    for i in range(n):
        nz = [j for j, c in enumerate(columns) if any(d[i] for d in c)]
        if nz and nz[0] >= 1:
            parts[nz[0]].append(i + 1)
        else:
            parts[0].append(i + 1)
    return tuple(tuple(p) for p in parts)


def is_blocking(D, rows) -> bool:
    n = len(D[0])
    if sorted(r for p in rows for r in p) != list(range(1, n + 1)):
        return False
    if any(not p for p in rows[1:]) or len(rows) < 2:
        return False
    cols = columns_for_rows(D, rows)
    for j in range(1, len(rows)):
        if not cols[j]:
            return False
        for r in rows[j]:
            if not any(d[r - 1] for d in cols[j]):
                return False
    # rows left in R0 must be visible in D0, otherwise the column classes
    # would induce a different row partition
    for r in rows[0]:
        if not any(d[r - 1] for d in cols[0]):
            return False
    return True


def enumerate_blockings(eq: SimpleEquation, arity_cap=ARITY_CAP, size_cap=None):
    """All blockings of D; sorted by k descending, then by row parts."""
    _check(eq, arity_cap, size_cap)
    D = eq.D
    n = eq.arity
    found = []

    def rec(rows_left, cols_left, tail):
        # tail holds (R_j, ..., R_k); rows_left may all become R0
        live = [r for r in rows_left if any(d[r] for d in cols_left)]
        if tail and len(live) == len(rows_left):
            found.append((tuple(sorted(r + 1 for r in rows_left)),) + tail)
        for size in range(1, len(live) + 1):
            for R in itertools.combinations(live, size):
                Rs = set(R)
                cols = [d for d in cols_left if any(d[i] for i in Rs)]
                rest = [d for d in cols_left if not any(d[i] for i in Rs)]
                rec([r for r in rows_left if r not in Rs], rest,
                    (tuple(r + 1 for r in R),) + tail)

    rec(list(range(n)), list(D), ())
    found.sort(key=lambda rows: (-len(rows), rows))
    return [Blocking(rows, columns_for_rows(D, rows)) for rows in found]


# ---------------------------------------------------------------- Farkas alternative

@dataclass(frozen=True)
class FarkasOutcome:
    solution: Optional[tuple] = None
    certificate: Optional[tuple] = None
    combination: Optional[dict] = None   # index into Mbar -> coefficient

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def _positive_cone_point(n, Mbar, T, S, extra=()):
    S0 = [s - 1 for s in sorted(S)]
    idx = {s: j for j, s in enumerate(S0)}
    m = len(S0)
    eqs = []
    for v in Mbar:
        eqs.append((tuple(v[s] for s in S0), 0))
    ineqs = [(tuple(int(j == i) for j in range(m)), 0) for i in range(m)]
    ineqs.append((tuple(int(s + 1 in T) for s in S0), 1))
    for a, b in extra:
        ineqs.append((tuple(a[s] for s in S0), b))
    pt = feasible_point(m, eqs, ineqs)
    if pt is None:
        return None
    short = primitive(pt)
    full = [0] * n
    for s, x in zip(S0, short):
        full[s] = x
    return tuple(full)


def find_span_certificate(Mbar, T, S, n=None):
    """w in span(Mbar), w >= 0 on S, w(i) > 0 for every i in T (or None).

    Built as a sum of one certificate per i in T, each found by exact
    feasibility over a basis of span(Mbar restricted to S).
    """
    Mbar = [tuple(v) for v in Mbar]
    if n is None:
        n = len(Mbar[0]) if Mbar else max(S)
    S0 = [s - 1 for s in sorted(S)]
    restricted = [tuple(v[s] for s in S0) for v in Mbar]
    basis = independent_subset(restricted)
    if not basis:
        return None
    total = [Fraction(0)] * n
    lam_total = {}
    for i in sorted(T):
        ineqs = []
        for s in S0:
            ineqs.append((tuple(Mbar[b][s] for b in basis), 1 if s == i - 1 else 0))
        lam = feasible_point(len(basis), (), ineqs)
        if lam is None:
            return None
        for b, l in zip(basis, lam):
            lam_total[b] = lam_total.get(b, 0) + l
            for r in range(n):
                total[r] += l * Mbar[b][r]
    return tuple(total), {b: Fraction(l) for b, l in lam_total.items() if l}


def find_positive_orthogonal(Mbar, T, S, n=None) -> FarkasOutcome:
    """Either a nonnegative integer v supported in S, nonzero on T and
    orthogonal to every m in Mbar, or a certificate from span(Mbar) that
    rules such a v out."""
    Mbar = [tuple(v) for v in Mbar]
    if not T:
        raise ValueError("T must be nonempty")
    if not set(T) <= set(S):
        raise ValueError("T must be a subset of S")
    if n is None:
        n = len(Mbar[0]) if Mbar else max(S)
    v = _positive_cone_point(n, Mbar, set(T), S)
    if v is not None:
        return FarkasOutcome(solution=v)
    cert = find_span_certificate(Mbar, T, S, n)
    if cert is None:  # unreachable: exactly one alternative holds
        raise AssertionError("neither a solution nor a certificate was found")
    w, lam = cert
    return FarkasOutcome(certificate=w, combination=lam)


def check_farkas(outcome: FarkasOutcome, Mbar, T, S) -> bool:
    """Validate whichever branch is populated, with exact arithmetic."""
    if (outcome.solution is None) == (outcome.certificate is None):
        return False
    if outcome.solution is not None:
        v = outcome.solution
        return (all(x >= 0 for x in v)
                and all(v[i] == 0 for i in range(len(v)) if i + 1 not in S)
                and any(v[t - 1] for t in T)
                and all(dot(v, m) == 0 for m in Mbar))
    w = outcome.certificate
    recon = [Fraction(0)] * len(w)
    for b, l in outcome.combination.items():
        for r in range(len(w)):
            recon[r] += l * Mbar[b][r]
    return (tuple(recon) == tuple(w)
            and all(w[s - 1] >= 0 for s in S)
            and all(w[t - 1] > 0 for t in T))


# ---------------------------------------------------------------- b-solutions

def _differences(b: Blocking):
    out = []
    for j, cols in enumerate(b.columns):
        if j == 0:
            out.extend(cols)
        else:
            base = cols[0]
            out.extend(tuple(x - y for x, y in zip(d, base)) for d in cols[1:])
    return out


def _row_solution(n, b: Blocking, i, extra=()):
    return _positive_cone_point(n, _differences(b), set(b.rows[i]), set(b.upper(i)), extra)


def find_b_solution(eq: SimpleEquation, b: Blocking) -> Optional[Substitution]:
    rows = []
    for i in range(1, b.k + 1):
        r = _row_solution(eq.arity, b, i)
        if r is None:
            return None
        rows.append(r)
    return Substitution(tuple(rows))


@dataclass(frozen=True)
class SpinalWitness:
    sigma: Substitution
    f: tuple
    V: tuple
    blocking: Blocking

    def to_dict(self):
        return {"sigma": [list(r) for r in self.sigma.matrix], "f": list(self.f),
                "V": [list(v) for v in self.V], "blocking": self.blocking.to_dict()}


@dataclass(frozen=True)
class Spineless:
    blockings_checked: int = 0


def classify_prespinal(eq: SimpleEquation, arity_cap=ARITY_CAP, size_cap=SIZE_CAP):
    """Return a SpinalWitness if [D] is prespinal, else Spineless."""
    _check(eq, arity_cap, size_cap)
    n = eq.arity
    one = ones(n)
    blockings = enumerate_blockings(eq, arity_cap=None)
    blockings.sort(key=lambda b: (b.k, b.rows))
    for b in blockings:
        rows = []
        for i in range(1, b.k + 1):
            r = _row_solution(n, b, i)
            if r is None:
                break
            rows.append(r)
        else:
            dbar = b.columns[b.k][0]
            diff = tuple(x - y for x, y in zip(one, dbar))
            neg = tuple(-x for x in diff)
            for i in range(1, b.k + 1):
                strict = (_row_solution(n, b, i, [(diff, 1)])
                          or _row_solution(n, b, i, [(neg, 1)]))
                if strict is not None:
                    rows[i - 1] = strict
                    sigma = Substitution(tuple(rows))
                    return _assemble(eq, sigma, b)
    return Spineless(len(blockings))


def _assemble(eq, sigma, b):
    f = sigma(ones(eq.arity))
    V = []
    if b.columns[0]:
        V.append(tuple([0] * sigma.rows))
    for j in range(1, b.k + 1):
        V.append(sigma(b.columns[j][0]))
    V = tuple(V)
    if not verify_spinal(f, V) or {sigma(d) for d in eq.D} != set(V):
        raise AssertionError("assembled witness is not spinal")
    return SpinalWitness(sigma, f, V, b)


def _last_nonzero(v):
    nz = [i for i, x in enumerate(v) if x]
    return nz[-1] if nz else -1


def spine_order(V) -> list:
    """Nonzero vectors of V ordered by their last nonzero coordinate."""
    return sorted((tuple(v) for v in V if any(v)), key=_last_nonzero)


def verify_spinal(f, V) -> bool:
    f = tuple(f)
    V = [tuple(v) for v in V]
    k = len(f)
    if any(len(v) != k for v in V) or k == 0:
        return False
    if f in V or any(x < 1 for x in f):
        return False
    if sum(1 for v in V if not any(v)) > 1:
        return False
    nz = spine_order(V)
    if len(nz) != k:
        return False
    for i, v in enumerate(nz):
        if v[i] <= 0 or any(v[j] for j in range(i + 1, k)):
            return False
    return True


# ---------------------------------------------------------------- (*K) falsifier

def is_power(x, K) -> bool:
    if x < 1:
        return False
    while x % K == 0:
        x //= K
    return x == 1


def _adjugate_upper(T):
    """delta * T^{-1} for an upper triangular integer matrix T (rows = v_i)."""
    k = len(T)
    det = 1
    for i in range(k):
        det *= T[i][i]
    # invert with Fractions, then scale
    inv = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    A = [[Fraction(x) for x in row] for row in T]
    for i in range(k - 1, -1, -1):
        p = A[i][i]
        inv[i] = [x / p for x in inv[i]]
        A[i] = [x / p for x in A[i]]
        for r in range(i):
            f = A[r][i]
            if f:
                A[r] = [x - f * y for x, y in zip(A[r], A[i])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[i])]
    adj = [[int(x * det) for x in row] for row in inv]
    return det, adj


def _periodic_power(K, delta_):
    """Least a such that K^a mod delta lies on the cycle of K^. mod delta, plus the period."""
    seen = {}
    a, r = 0, 1 % delta_
    while r not in seen:
        seen[r] = a
        a += 1
        r = (r * K) % delta_
    start = seen[r]
    return start, a - start


def falsify_star(f, V, K: int):
    """1-variable tau and shift C showing (*K) fails for the spine [f, V].

    Returns (tau, C) with tau a tuple of naturals (one per variable of the
    spine) such that C and every C + tau.v are powers of K while tau.f is
    not in tau.(V + {0}).
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    if not verify_spinal(f, V):
        raise ValueError("[f, V] is not spinal")
    f = tuple(f)
    spine = spine_order(V)
    k = len(f)
    # columns of A are the spine vectors, so A is upper triangular and
    # tau = x * adj(A) gives tau.v_i = det * x_i
    A = [[spine[i][j] for i in range(k)] for j in range(k)]
    det, adj = _adjugate_upper(A)
    a, period = _periodic_power(K, det)
    C = K ** a

    def nbar():
        b = a
        while True:
            p = K ** b
            if (p - C) % det == 0:
                yield (p - C) // det
            b += period

    m = max(i for i in range(k) if f[i] != spine[-1][i])
    x = [0] * k
    t = [0] * k

    def tau_of(upto):
        return [sum(x[i] * adj[i][j] for i in range(upto + 1)) for j in range(k)]

    for i in range(m, k):
        for cand in nbar():
            if i == m and cand == 0:
                continue
            x[i] = cand
            t = tau_of(i)
            if t[i] < 0:
                continue
            if i == k - 1:
                lower = [dot(t, spine[j]) for j in range(k - 1)]
                if lower and t[k - 1] <= max(lower):
                    continue
            break
    tau = tuple(tau_of(k - 1))
    if not check_star_falsifier(f, V, K, tau, C):
        raise AssertionError("falsifier construction failed its postcondition")
    return tau, C


def check_star_falsifier(f, V, K, tau, C) -> bool:
    if any(t < 0 for t in tau) or not is_power(C, K):
        return False
    pts = [tuple(v) for v in V] + [tuple([0] * len(f))]
    if not all(is_power(C + dot(tau, v), K) for v in pts):
        return False
    return dot(tau, f) not in {dot(tau, v) for v in pts}


# ---------------------------------------------------------------- bounded (*K) / (**K) search

@dataclass(frozen=True)
class StarWitness:
    sigma: tuple
    C: int
    sigma2: Optional[tuple] = None
    C2: Optional[int] = None

    def to_dict(self):
        out = {"sigma": list(self.sigma), "C": self.C}
        if self.sigma2 is not None:
            out.update(sigma2=list(self.sigma2), C2=self.C2)
        return out


def _shift(sigma, D, K, cmax):
    """Least C <= cmax with every C + sigma.d a power of K, or None."""
    vals = [dot(sigma, d) for d in D]
    v0 = vals[0]
    p = 1
    while p - v0 <= cmax:
        C = p - v0
        if C >= 0 and all(is_power(C + v, K) for v in vals):
            return C
        p *= K
    return None


def search_star_counterexample(eq: SimpleEquation, K: int, mode="single", bound=10):
    if K < 2:
        raise ValueError("K must be at least 2")
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if mode not in ("single", "double"):
        raise ValueError("mode must be 'single' or 'double'")
    D = eq.D
    n = eq.arity
    smax = sum(max(d[i] for d in D) for i in range(n))
    e = ceil(log(bound * smax + 1, K)) if bound * smax > 0 else 0
    cmax = K ** e * K
    one = ones(n)
    admissible = []
    for sigma in itertools.product(range(bound + 1), repeat=n):
        C = _shift(sigma, D, K, cmax)
        if C is None:
            continue
        target = dot(sigma, one)
        zeros = frozenset(j for j, d in enumerate(D) if dot(sigma, d) == target)
        if mode == "single":
            if not zeros:
                return StarWitness(sigma, C)
        admissible.append((sigma, C, zeros))
    if mode == "double":
        for s1, c1, z1 in admissible:
            for s2, c2, z2 in admissible:
                if not (z1 & z2):
                    return StarWitness(s1, c1, s2, c2)
    return None


def onevar_star_bound(n: int, P) -> int:
    P = set(P)
    pos = sorted(p for p in P if p > 0)
    if len(pos) < 2:
        raise ValueError("P must contain at least two distinct positive integers")
    if n in P:
        raise ValueError(f"[{n}, P] is trivial since {n} is in P")
    return 2 + min(p - q for p, q in itertools.combinations(sorted(pos, reverse=True), 2))


def heuristic_k(eq: SimpleEquation, onevar=None):
    """(K, heuristic) where onevar = (n, P) gives a certified bound."""
    k = delta(eq.D) + 2
    if onevar is not None:
        n, P = onevar
        try:
            return max(k, onevar_star_bound(n, P)), False
        except ValueError:
            pass
    return k, True
