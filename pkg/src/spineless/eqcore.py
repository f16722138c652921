"""Equations in the {v, *, 1} fragment: parsing, normalization, classification.

Monomials over x1..xn are stored as exponent vectors (plain tuples of
naturals). A join of monomials is a sorted tuple of distinct vectors.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .rational import feasible_point, primitive


class ParseError(ValueError):
    def __init__(self, msg, position=None):
        if position is not None:
            msg = f"{msg} (at position {position})"
        super().__init__(msg)
        self.position = position


class UnsupportedEquation(ValueError):
    pass


def _canon_join(vectors) -> tuple:
    return tuple(sorted(set(tuple(v) for v in vectors)))


def ones(n: int) -> tuple:
    return (1,) * n


def dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def support(v) -> frozenset:
    return frozenset(i for i, x in enumerate(v) if x)


@dataclass(frozen=True)
class BasicEquation:
    """x^lhs <= join of x^d for d in rhs."""

    lhs: tuple
    rhs: tuple

    def __post_init__(self):
        lhs = tuple(int(x) for x in self.lhs)
        rhs = _canon_join(self.rhs)
        if not rhs:
            raise ValueError("right-hand side must be a nonempty join")
        if any(x < 0 for x in lhs) or any(x < 0 for d in rhs for x in d):
            raise ValueError("exponents must be natural numbers")
        if not any(lhs):
            raise ValueError("left-hand side must not be the unit")
        if any(len(d) != len(lhs) for d in rhs):
            raise ValueError("all monomials must have the same arity")
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)

    @property
    def arity(self) -> int:
        return len(self.lhs)

    def __str__(self):
        return f"{format_monomial(self.lhs)} <= {format_join(self.rhs)}"


@dataclass(frozen=True)
class SimpleEquation:
    """x1*...*xn <= join of x^d for d in D."""

    D: tuple

    def __post_init__(self):
        D = _canon_join(self.D)
        if not D:
            raise ValueError("D must be nonempty")
        n = len(D[0])
        if n == 0 or any(len(d) != n for d in D):
            raise ValueError("all vectors in D must share a positive arity")
        if any(x < 0 for d in D for x in d):
            raise ValueError("exponents must be natural numbers")
        for i in range(n):
            if not any(d[i] for d in D):
                raise ValueError(f"row {i + 1} is zero in every column")
        object.__setattr__(self, "D", D)

    @property
    def arity(self) -> int:
        return len(self.D[0])

    def as_basic(self) -> BasicEquation:
        return BasicEquation(ones(self.arity), self.D)

    def __str__(self):
        return str(self.as_basic())


@dataclass(frozen=True)
class Substitution:
    """A k x n matrix of naturals; row i gives the image of x_i as a monomial in n variables.

    Applied to an exponent vector f over the n source variables it gives
    the k-vector M f.
    """

    matrix: tuple

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if m and len({len(r) for r in m}) != 1:
            raise ValueError("ragged substitution matrix")
        if any(x < 0 for r in m for x in r):
            raise ValueError("substitution entries must be natural")
        object.__setattr__(self, "matrix", m)

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def __call__(self, v) -> tuple:
        if len(v) != self.cols:
            raise ValueError(f"dimension mismatch: {len(v)} != {self.cols}")
        return tuple(dot(row, v) for row in self.matrix)

    def __matmul__(self, other: "Substitution") -> "Substitution":
        # (self @ other)(v) == self(other(v))
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in composition")
        cols = list(zip(*other.matrix))
        return Substitution(tuple(tuple(dot(r, c) for c in cols) for r in self.matrix))

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def apply_substitution(sigma: Substitution, eq) -> BasicEquation:
    if isinstance(eq, SimpleEquation):
        eq = eq.as_basic()
    if sigma.cols != eq.arity:
        raise ValueError(f"dimension mismatch: substitution has {sigma.cols} columns, equation arity {eq.arity}")
    return BasicEquation(sigma(eq.lhs), [sigma(d) for d in eq.rhs])


# ---------------------------------------------------------------- printing

def format_monomial(v, names=None) -> str:
    parts = []
    for i, e in enumerate(v):
        if e == 0:
            continue
        name = names[i] if names else f"x{i + 1}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_join(vs, names=None) -> str:
    if not vs:
        return "0"
    return " v ".join(format_monomial(v, names) for v in vs)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<le><=|≤)|(?P<join>\||∨)|(?P<mul>\*|·)|(?P<pow>\^)|(?P<lp>\()|(?P<rp>\))"
    r"|(?P<xvar>x(?P<idx>\d+))|(?P<num>\d+)|(?P<letter>[A-Za-z]))"
)


def _tokenize(text):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup) if m.lastgroup else pos
        kind = m.lastgroup
        if kind == "idx":
            kind = "xvar"
        if kind == "xvar":
            toks.append(("var", int(m.group("idx")), start))
        elif kind == "letter":
            ch = m.group("letter")
            if ch == "v":
                toks.append(("join", ch, start))
            else:
                toks.append(("letter", ch, start))
        elif kind == "num":
            toks.append(("num", int(m.group("num")), start))
        else:
            toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    """Recursive descent over the token list.

    Expressions evaluate to a list of monomials, each a dict var-key ->
    exponent; var keys are ints (indexed form) or letters.
    """

    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind}, found {what}", tok[2])
        self.i += 1
        return tok

    def equation(self):
        if self.peek()[0] == "le":
            raise ParseError("empty left-hand side", self.peek()[2])
        lhs = self.expr()
        self.take("le")
        if self.peek()[0] == "end":
            raise ParseError("empty right-hand side", self.peek()[2])
        rhs = self.expr()
        self.take("end")
        return lhs, rhs

    def expr(self):
        terms = self.prod()
        while self.peek()[0] == "join":
            self.take()
            terms = terms + self.prod()
        return terms

    def prod(self):
        acc = self.power()
        while True:
            kind = self.peek()[0]
            if kind == "mul":
                self.take()
                acc = _mul(acc, self.power())
            elif kind in ("num", "var", "letter", "lp"):
                acc = _mul(acc, self.power())
            else:
                return acc

    def power(self):
        base = self.atom()
        while self.peek()[0] == "pow":
            self.take()
            e = self.take("num")[1]
            out = [{}]
            for _ in range(e):
                out = _mul(out, base)
            base = out
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            if val != 1:
                raise ParseError(f"only the constant 1 is allowed, found {val}", pos)
            return [{}]
        if kind == "var":
            self.take()
            if val < 1:
                raise ParseError("variable indices start at 1", pos)
            return [{val: 1}]
        if kind == "letter":
            self.take()
            return [{val: 1}]
        if kind == "lp":
            self.take()
            inner = self.expr()
            self.take("rp")
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {what}", pos)


def _mul(xs, ys):
    out = []
    for a in xs:
        for b in ys:
            m = dict(a)
            for k, e in b.items():
                m[k] = m.get(k, 0) + e
            out.append(m)
    return out


def parse_equation(text: str) -> BasicEquation:
    """Parse "lhs <= rhs" into a BasicEquation.

    Variables are x1, x2, ... or single letters; letters are numbered in
    alphabetical order of those occurring. "v" and "|" are joins.
    """
    lhs, rhs = _Parser(text).equation()
    keys = {k for m in lhs + rhs for k in m}
    ints = {k for k in keys if isinstance(k, int)}
    letters = keys - ints
    if ints and letters:
        raise ParseError("cannot mix indexed variables (x1, x2, ...) with letter variables")
    if letters:
        index = {ch: i for i, ch in enumerate(sorted(letters))}
        n = len(letters)
    else:
        index = {k: k - 1 for k in ints}
        n = max(ints) if ints else 0

    def vec(m):
        v = [0] * n
        for k, e in m.items():
            v[index[k]] += e
        return tuple(v)

    lhs_vs = _canon_join(vec(m) for m in lhs)
    if len(lhs_vs) != 1:
        raise UnsupportedEquation("left-hand side must be a single monomial for a basic equation")
    if n == 0 or not any(lhs_vs[0]):
        raise UnsupportedEquation("left-hand side must contain a variable")
    return BasicEquation(lhs_vs[0], [vec(m) for m in rhs])


# ---------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class Trivial:
    pass


@dataclass(frozen=True)
class ImpliesIntegrality:
    pass


@dataclass(frozen=True)
class Simple:
    equation: SimpleEquation


@dataclass(frozen=True)
class Unsupported:
    reason: str


def linearize_one_variable(n: int, P: Iterable[int]) -> SimpleEquation:
    """Linear form of x^n <= join of x^p (p in P): all d in N^n with sum(d) in P."""
    P = sorted(set(P))
    if n < 1:
        raise ValueError("n must be positive")
    if not any(p > 0 for p in P):
        raise ValueError("P must contain a positive exponent")
    D = []
    for p in P:
        D.extend(_compositions(p, n))
    return SimpleEquation(D)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def to_simple(eq: BasicEquation):
    lhs = eq.lhs
    supp = support(lhs)
    rhs = [d for d in eq.rhs if support(d) <= supp]
    if not rhs:
        return Unsupported("implies 1 <= x: every joinand uses a variable absent on the left")
    for i in supp:
        if not any(d[i] for d in rhs):
            return ImpliesIntegrality()
    if lhs in rhs:
        return Trivial()
    idx = sorted(supp)
    if all(lhs[i] <= 1 for i in idx):
        return Simple(SimpleEquation([tuple(d[i] for i in idx) for d in rhs]))
    if len(idx) == 1:
        i = idx[0]
        return Simple(linearize_one_variable(lhs[i], {d[i] for d in rhs}))
    return Unsupported("general linearization of a non-linear multi-variable left-hand side is not implemented")


# ---------------------------------------------------------------- classification

def is_trivial(eq: SimpleEquation) -> bool:
    return ones(eq.arity) in eq.D


def is_mingly(eq: SimpleEquation) -> Optional[Substitution]:
    """A 0/1 row sigma with sigma.d == 1 for every d and sigma.1 > 1, if any."""
    n = eq.arity
    # a row with some entry >= 2 can never carry a 1 in sigma
    allowed = [i for i in range(n) if all(d[i] <= 1 for d in eq.D)]
    for bits in itertools.product((0, 1), repeat=len(allowed)):
        if sum(bits) < 2:
            continue
        sigma = [0] * n
        for i, b in zip(allowed, bits):
            sigma[i] = b
        if all(dot(sigma, d) == 1 for d in eq.D):
            return Substitution((tuple(sigma),))
    return None


@dataclass(frozen=True)
class ExpansiveWitness:
    sigma: Substitution
    n: int
    c: tuple


def is_expansive(eq: SimpleEquation) -> Optional[ExpansiveWitness]:
    n = eq.arity
    ineqs = [(tuple(int(i == j) for j in range(n)), 0) for i in range(n)]
    for d in eq.D:
        ineqs.append((tuple(x - 1 for x in d), 1))
    pt = feasible_point(n, (), ineqs)
    if pt is None:
        return None
    row = primitive(pt)
    m = sum(row)
    return ExpansiveWitness(Substitution((row,)), m, tuple(dot(row, d) - m for d in eq.D))


def delta(D: Sequence) -> int:
    D = list(D)
    if not D:
        raise ValueError("D must be nonempty")
    return sum(max(d[i] for d in D) - min(d[i] for d in D) for i in range(len(D[0])))


# ---------------------------------------------------------------- full-signature terms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class One:
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Meet:
    args: tuple

    def __str__(self):
        return "(" + " ∧ ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Join:
    args: tuple

    def __str__(self):
        if not self.args:
            return "⊥"
        return " ∨ ".join(map(str, self.args))


@dataclass(frozen=True)
class Prod:
    args: tuple

    def __str__(self):
        if not self.args:
            return "1"
        groups = [(k, len(list(g))) for k, g in itertools.groupby(self.args)]
        out = []
        for t, c in groups:
            s = str(t)
            if isinstance(t, (Join, Impl, Prod)) and len(self.args) > 1:
                s = f"({s})"
            out.append(s if c == 1 else f"{s}^{c}")
        return "·".join(out)


@dataclass(frozen=True)
class Impl:
    left: object
    right: object

    def __str__(self):
        return f"({self.left} → {self.right})"


@dataclass(frozen=True)
class Leq:
    lhs: object
    rhs: object

    def __str__(self):
        return f"{self.lhs} ≤ {self.rhs}"


@dataclass(frozen=True)
class Quasiequation:
    premises: tuple
    conclusion: Leq

    def __str__(self):
        return " & ".join(map(str, self.premises)) + f" ⇒ {self.conclusion}"


def quasi_to_equation(S: Sequence[Leq], t: Leq, n: int) -> Leq:
    """(1 ∧ meet of (s -> s') for s <= s' in S)^n <= (t.lhs -> t.rhs)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    impls = tuple(Impl(p.lhs, p.rhs) for p in S)
    base = Meet((One(),) + impls) if impls else One()
    return Leq(Prod((base,) * n), Impl(t.lhs, t.rhs))


def config_term(state: str, regs: Sequence[int]):
    args = [Var(state)]
    for i, e in enumerate(regs):
        args.extend([Var(f"r{i + 1}")] * e)
    return Prod(tuple(args)) if len(args) > 1 else args[0]


def instruction_inequality(ins) -> Leq:
    if ins.kind == "inc":
        return Leq(Var(ins.src), Prod((Var(ins.dst), Var(f"r{ins.reg}"))))
    if ins.kind == "dec":
        return Leq(Prod((Var(ins.src), Var(f"r{ins.reg}"))), Var(ins.dst))
    return Leq(Var(ins.src), Join((Var(ins.dst), Var(ins.dst2))))


def id_term(u):
    parts = tuple(config_term(c.state, c.regs) for c in u)
    return parts[0] if len(parts) == 1 else Join(parts)


def acc_quasiequation(M, u) -> Quasiequation:
    """Instructions of M plus commutation laws imply u <= q_f."""
    from .acm import parse_id

    if isinstance(u, str):
        u = parse_id(M, u)
    premises = [instruction_inequality(p) for p in M.instructions]
    gens = list(M.states) + [f"r{i + 1}" for i in range(M.registers)]
    for x, y in itertools.permutations(gens, 2):
        premises.append(Leq(Prod((Var(x), Var(y))), Prod((Var(y), Var(x)))))
    return Quasiequation(tuple(premises), Leq(id_term(u), Var(M.final)))
