"""And-branching counter machines.

An ID is a join of configurations, kept as a sorted tuple (a multiset:
q v q is not q). Acceptance is searched at the level of single
configurations: a join is accepted iff each joinand is, and the shortest
computation of a join is the sum of the shortest computations of its
joinands, so a shortest-hyperpath computation over configurations gives
minimal traces without enumerating interleavings of whole IDs.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

INF = float("inf")


class AcmError(ValueError):
    pass


class Config(NamedTuple):
    state: str
    regs: tuple

    def __str__(self):
        parts = [self.state]
        for i, e in enumerate(self.regs):
            if e:
                parts.append(f"r{i + 1}" if e == 1 else f"r{i + 1}^{e}")
        return " ".join(parts)


def make_id(configs) -> tuple:
    configs = tuple(sorted(Config(c[0], tuple(c[1])) for c in configs))
    if not configs:
        raise AcmError("an ID must contain at least one configuration")
    return configs


def format_id(u) -> str:
    return " | ".join(str(c) for c in u)


@dataclass(frozen=True)
class Instruction:
    kind: str           # "inc", "dec" or "fork"
    src: str
    dst: str
    reg: Optional[int] = None
    dst2: Optional[str] = None

    def __str__(self):
        if self.kind == "inc":
            return f"inc {self.src} -> {self.dst} r{self.reg}"
        if self.kind == "dec":
            return f"dec {self.src} r{self.reg} -> {self.dst}"
        return f"fork {self.src} -> {self.dst} {self.dst2}"


@dataclass(frozen=True)
class Acm:
    registers: int
    states: tuple
    final: str
    instructions: tuple

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if len(set(self.states)) != len(self.states):
            raise AcmError("duplicate state names")
        known = set(self.states)
        if self.final not in known:
            raise AcmError(f"final state {self.final!r} is not declared")
        for s in self.states:
            if _REG.fullmatch(s):
                raise AcmError(f"state name {s!r} clashes with register syntax")
        for p in self.instructions:
            for q in (p.src, p.dst, p.dst2):
                if q is not None and q not in known:
                    raise AcmError(f"unknown state {q!r} in '{p}'")
            if p.kind in ("inc", "dec") and not (1 <= p.reg <= self.registers):
                raise AcmError(f"unknown register r{p.reg} in '{p}'")
            if p.src == self.final:
                raise AcmError(f"instruction '{p}' acts on the final state")
        by_state = {}
        for p in self.instructions:
            by_state.setdefault(p.src, []).append(p)
        object.__setattr__(self, "_by_state", by_state)

    def instructions_from(self, q):
        return self._by_state.get(q, ())

    def final_config(self) -> Config:
        return Config(self.final, (0,) * self.registers)

    def is_final_id(self, u) -> bool:
        fc = self.final_config()
        return len(u) >= 1 and all(c == fc for c in u)


# ---------------------------------------------------------------- text formats

_REG = re.compile(r"r(\d+)")
_NAME = r"[A-Za-z_][A-Za-z0-9_.']*"


def parse_acm(text: str) -> Acm:
    registers = None
    states = None
    final = None
    instrs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        try:
            if head == "registers":
                if len(words) != 2 or not words[1].isdigit():
                    raise AcmError("expected 'registers <k>'")
                registers = int(words[1])
            elif head == "states":
                if len(words) < 2:
                    raise AcmError("expected 'states <name>+'")
                for w in words[1:]:
                    if not re.fullmatch(_NAME, w):
                        raise AcmError(f"bad state name {w!r}")
                states = tuple(words[1:])
            elif head == "final":
                if len(words) != 2:
                    raise AcmError("expected 'final <name>'")
                final = words[1]
            elif head == "inc":
                m = re.fullmatch(rf"inc\s+({_NAME})\s*->\s*({_NAME})\s+r(\d+)", line)
                if not m:
                    raise AcmError("expected 'inc <q> -> <q'> r<i>'")
                instrs.append(Instruction("inc", m[1], m[2], reg=int(m[3])))
            elif head == "dec":
                m = re.fullmatch(rf"dec\s+({_NAME})\s+r(\d+)\s*->\s*({_NAME})", line)
                if not m:
                    raise AcmError("expected 'dec <q> r<i> -> <q'>'")
                instrs.append(Instruction("dec", m[1], m[3], reg=int(m[2])))
            elif head == "fork":
                m = re.fullmatch(rf"fork\s+({_NAME})\s*->\s*({_NAME})\s+({_NAME})", line)
                if not m:
                    raise AcmError("expected 'fork <q> -> <q'> <q''>'")
                instrs.append(Instruction("fork", m[1], m[2], dst2=m[3]))
            else:
                raise AcmError(f"unknown directive {head!r}")
        except AcmError as e:
            raise AcmError(f"line {lineno}: {e}") from None
    if registers is None or states is None or final is None:
        raise AcmError("missing 'registers', 'states' or 'final' declaration")
    return Acm(registers, states, final, instrs)


def format_acm(M: Acm) -> str:
    lines = [f"registers {M.registers}", "states " + " ".join(M.states), f"final {M.final}"]
    lines.extend(str(p) for p in M.instructions)
    return "\n".join(lines) + "\n"


def parse_id(M: Acm, text: str) -> tuple:
    """Parse an ID literal such as "q0 r1^2 | q1 r2"."""
    known = set(M.states)
    configs = []
    for part in text.split("|"):
        words = part.replace("*", " ").split()
        if not words:
            raise AcmError("empty joinand in ID literal")
        state = []
        regs = [0] * M.registers
        for w in words:
            name, _, exp = w.partition("^")
            if exp and not exp.isdigit():
                raise AcmError(f"bad exponent in {w!r}")
            e = int(exp) if exp else 1
            m = _REG.fullmatch(name)
            if m:
                i = int(m[1])
                if not 1 <= i <= M.registers:
                    raise AcmError(f"unknown register {name!r}")
                regs[i - 1] += e
            elif name in known:
                state.extend([name] * e)
            else:
                raise AcmError(f"unknown state or register {name!r}")
        if len(state) != 1:
            raise AcmError(f"joinand {part.strip()!r} must contain exactly one state variable")
        configs.append(Config(state[0], tuple(regs)))
    return make_id(configs)


# ---------------------------------------------------------------- one-step semantics

def config_steps(M: Acm, c: Config):
    """(label, children) for every instruction applicable to c."""
    out = []
    for p in M.instructions_from(c.state):
        if p.kind == "inc":
            regs = list(c.regs)
            regs[p.reg - 1] += 1
            out.append((str(p), (Config(p.dst, tuple(regs)),)))
        elif p.kind == "dec":
            if c.regs[p.reg - 1] == 0:
                continue
            regs = list(c.regs)
            regs[p.reg - 1] -= 1
            out.append((str(p), (Config(p.dst, tuple(regs)),)))
        else:
            out.append((str(p), (Config(p.dst, c.regs), Config(p.dst2, c.regs))))
    return out


def _replace(u, i, children):
    return make_id(u[:i] + u[i + 1:] + tuple(children))


def _id_steps(u, step_fn):
    seen = set()
    out = []
    done = set()
    for i, c in enumerate(u):
        if c in done:
            continue
        done.add(c)
        for label, children in step_fn(c):
            v = _replace(u, i, children)
            if v not in seen:
                seen.add(v)
                out.append((label, v))
    return out


def successors(M: Acm, u) -> list:
    return [v for _, v in _id_steps(u, lambda c: config_steps(M, c))]


def register_monomials(k, cap):
    """All exponent vectors over k registers with total degree <= cap."""
    out = []
    for total in range(cap + 1):
        for v in itertools.product(range(total + 1), repeat=k):
            if sum(v) == total:
                out.append(v)
    return out


def ambient_config_steps(D, c: Config, degree_cap: int):
    """Instances of [D] with register monomials t_1..t_n inside c."""
    D = [tuple(d) for d in D]
    n = len(D[0])
    k = len(c.regs)
    monos = [m for m in register_monomials(k, degree_cap)
             if all(a <= b for a, b in zip(m, c.regs))]
    out = []
    for ts in itertools.product(monos, repeat=n):
        if not any(any(t) for t in ts):
            continue
        used = [sum(t[r] for t in ts) for r in range(k)]
        if any(u > x for u, x in zip(used, c.regs)):
            continue
        rest = [x - u for x, u in zip(c.regs, used)]
        children = []
        for d in D:
            regs = tuple(rest[r] + sum(d[i] * ts[i][r] for i in range(n)) for r in range(k))
            children.append(Config(c.state, regs))
        label = "ambient " + ", ".join(
            f"x{i + 1}:={_mono(t)}" for i, t in enumerate(ts))
        out.append((label, tuple(children)))
    return out


def _mono(t):
    parts = [f"r{i + 1}" if e == 1 else f"r{i + 1}^{e}" for i, e in enumerate(t) if e]
    return "*".join(parts) if parts else "1"


def ambient_successors(M: Acm, D, u, degree_cap: int) -> list:
    D = getattr(D, "D", D)
    return [v for _, v in _id_steps(u, lambda c: ambient_config_steps(D, c, degree_cap))]


# ---------------------------------------------------------------- acceptance

@dataclass(frozen=True)
class Fuel:
    max_depth: Optional[int] = None
    max_reg: int = 16
    max_width: Optional[int] = None

    def to_dict(self):
        return {"maxDepth": self.max_depth, "maxReg": self.max_reg, "maxWidth": self.max_width}


class ConfigGraph:
    """Configurations reachable under a register cap, with shortest costs.

    cost[c] is the length of a shortest computation from c to a final ID
    (INF when none exists inside the cap). A configuration is tainted when
    some step from it, or from a configuration it can reach, was dropped
    for exceeding the cap; untainted configurations with infinite cost are
    certainly not accepted.
    """

    def __init__(self, M: Acm, max_reg: int, ambient=None):
        self.M = M
        self.max_reg = max_reg
        self.ambient = ambient  # (D, degree_cap) or None
        self.steps = {}
        self.pruned = set()
        self.cost = {}
        self.best = {}
        self.tainted = set()
        self._dirty = True

    def _steps_of(self, c):
        out = list(config_steps(self.M, c))
        if self.ambient is not None:
            D, cap = self.ambient
            out.extend(ambient_config_steps(D, c, cap))
        return out

    def explore(self, roots):
        queue = [c for c in roots if c not in self.steps]
        for c in queue:
            self.steps.setdefault(c, None)
        i = 0
        while i < len(queue):
            c = queue[i]
            i += 1
            kept = []
            for label, children in self._steps_of(c):
                if any(x > self.max_reg for ch in children for x in ch.regs):
                    self.pruned.add(c)
                    continue
                kept.append((label, children))
                for ch in children:
                    if ch not in self.steps:
                        self.steps[ch] = None
                        queue.append(ch)
            self.steps[c] = kept
        if queue:
            self._dirty = True
        return len(queue)

    def solve(self):
        if not self._dirty:
            return
        fc = self.M.final_config()
        uses = {}
        for c, steps in self.steps.items():
            for s, (label, children) in enumerate(steps):
                for ch in children:
                    uses.setdefault(ch, []).append((c, s))
        remaining = {(c, s): len(ch) for c, steps in self.steps.items()
                     for s, (_, ch) in enumerate(steps)}
        partial = dict.fromkeys(remaining, 0)
        cost = {}
        heap = []
        tick = itertools.count()
        if fc in self.steps:
            heap.append((0, next(tick), fc))
        while heap:
            d, _, c = heapq.heappop(heap)
            if c in cost:
                continue
            cost[c] = d
            for parent, s in uses.get(c, ()):
                key = (parent, s)
                remaining[key] -= 1
                partial[key] += d
                if remaining[key] == 0 and parent not in cost:
                    heapq.heappush(heap, (1 + partial[key], next(tick), parent))
        self.cost = cost
        best = {}
        for c, d in cost.items():
            if c == fc:
                continue
            for s, (label, children) in enumerate(self.steps[c]):
                if all(ch in cost for ch in children) and 1 + sum(cost[ch] for ch in children) == d:
                    best[c] = s
                    break
        self.best = best
        # taint flows backwards from pruned configurations
        preds = {}
        for c, steps in self.steps.items():
            for _, children in steps:
                for ch in children:
                    preds.setdefault(ch, set()).add(c)
        tainted = set(self.pruned)
        stack = list(self.pruned)
        while stack:
            c = stack.pop()
            for p in preds.get(c, ()):
                if p not in tainted:
                    tainted.add(p)
                    stack.append(p)
        self.tainted = tainted
        self._dirty = False

    def accepted(self, c, max_depth=None) -> bool:
        d = self.cost.get(c, INF)
        return d < INF and (max_depth is None or d <= max_depth)

    def rejected(self, c) -> bool:
        """Certainly not accepted (search space below c fully explored)."""
        return c in self.steps and c not in self.cost and c not in self.tainted

    def trace(self, u):
        fc = self.M.final_config()
        cur = tuple(u)
        out = []
        while True:
            i = next((j for j, c in enumerate(cur) if c != fc), None)
            if i is None:
                return out
            label, children = self.steps[cur[i]][self.best[cur[i]]]
            cur = _replace(cur, i, children)
            out.append((label, cur))


@dataclass
class AcceptanceResult:
    accepted: bool
    trace: list = field(default_factory=list)
    exhausted: bool = False
    explored: int = 0
    fuel: Optional[Fuel] = None
    reason: str = ""

    def __bool__(self):
        return self.accepted

    def to_dict(self):
        out = {"accepted": self.accepted, "explored": self.explored,
               "fuel": self.fuel.to_dict() if self.fuel else None}
        if self.accepted:
            out["trace"] = [{"step": lbl, "id": format_id(v)} for lbl, v in self.trace]
            out["length"] = len(self.trace)
        else:
            out["exhausted"] = self.exhausted
            out["reason"] = self.reason
        return out


def accepts(M: Acm, u, fuel: Fuel = Fuel(), ambient=None, graph: ConfigGraph = None) -> AcceptanceResult:
    """Bounded acceptance search from the ID u.

    Accepted results carry a shortest trace. Otherwise the result is
    Unknown; exhausted=True means no configuration reachable from u was
    cut off by the register cap, so u is genuinely not accepted.
    """
    if isinstance(u, Config):
        u = (u,)
    u = make_id(u)
    g = graph or ConfigGraph(M, fuel.max_reg, ambient)
    g.explore(list(dict.fromkeys(u)))
    g.solve()
    total = sum(g.cost.get(c, INF) for c in u)
    explored = len(g.steps)
    if total < INF and (fuel.max_depth is None or total <= fuel.max_depth):
        tr = g.trace(u)
        width = len(tr[-1][1]) if tr else len(u)
        if fuel.max_width is not None and width > fuel.max_width:
            return AcceptanceResult(False, exhausted=False, explored=explored, fuel=fuel,
                                    reason=f"shortest computation needs width {width}")
        return AcceptanceResult(True, trace=tr, explored=explored, fuel=fuel)
    if total < INF:
        return AcceptanceResult(False, exhausted=False, explored=explored, fuel=fuel,
                                reason=f"shortest computation has length {total}")
    exhausted = not any(c in g.tainted for c in u)
    reason = "no computation exists" if exhausted else "register cap reached"
    return AcceptanceResult(False, exhausted=exhausted, explored=explored, fuel=fuel, reason=reason)


# ---------------------------------------------------------------- admissibility probe

@dataclass
class ProbeReport:
    witnesses: list          # (config, label, children) with config in A' \ A
    uncertain: list          # in A' but acceptance in M undecided within caps
    domain_size: int
    caps: dict

    @property
    def message(self):
        if self.witnesses:
            return f"{len(self.witnesses)} configuration(s) in A' \\ A within bounds"
        return "no violation found within bounds"

    def to_dict(self):
        return {
            "witnesses": [{"config": str(c), "step": lbl, "to": format_id(ch)}
                          for c, lbl, ch in self.witnesses],
            "uncertain": [str(c) for c, _, _ in self.uncertain],
            "domainSize": self.domain_size,
            "caps": self.caps,
            "message": self.message,
        }


def admissibility_probe(M: Acm, D, max_reg: int, degree_cap: int, states=None,
                        domain_caps=None, max_depth=None) -> ProbeReport:
    """Search for configurations accepted once [D] steps are allowed but not in M.

    The domain is every configuration whose state is in `states` and whose
    registers are bounded by `domain_caps` (default: max_reg each). A
    configuration joins A' when one machine or ambient step leads into
    A u A'; iterated to a fixpoint over the domain.
    """
    D = [tuple(d) for d in getattr(D, "D", D)]
    states = list(states) if states is not None else list(M.states)
    if domain_caps is None:
        domain_caps = (max_reg,) * M.registers
    domain = [Config(q, regs) for q in states
              for regs in itertools.product(*[range(c + 1) for c in domain_caps])]
    g = ConfigGraph(M, max_reg)
    amb = {}
    roots = list(domain)
    for c in domain:
        steps = [(l, ch) for l, ch in ambient_config_steps(D, c, degree_cap)
                 if all(x <= max_reg for x2 in ch for x in x2.regs)]
        amb[c] = steps
        for _, ch in steps:
            roots.extend(ch)
    g.explore(list(dict.fromkeys(roots)))
    g.solve()
    in_a = lambda c: g.accepted(c, max_depth)
    extra = {}
    changed = True
    while changed:
        changed = False
        for c in domain:
            if c in extra or in_a(c):
                continue
            for label, children in list(g.steps.get(c) or []) + amb[c]:
                if all(in_a(ch) or ch in extra for ch in children):
                    extra[c] = (label, children)
                    changed = True
                    break
    witnesses, uncertain = [], []
    for c in domain:
        if c in extra:
            label, ch = extra[c]
            (witnesses if g.rejected(c) else uncertain).append((c, label, make_id(ch)))
    caps = {"maxReg": max_reg, "degreeCap": degree_cap, "maxDepth": max_depth,
            "states": states, "domainCaps": list(domain_caps)}
    return ProbeReport(witnesses, uncertain, len(domain), caps)
