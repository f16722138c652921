"""The exponential encoding M -> M_K of a 2-register machine.

A register value n of M is stored as K^n in M_K; increments become
multiply-by-K programs and decrements divide-by-K programs, both using a
scratch register r3 and zero-test side branches. State names are
`<program>.<instruction index>.<local>`, e.g. times.1.a3; the shared
zero-test states are zero.z1..zero.z3, the end program adds end.cF, and
the final state of M_K is qF.
"""

from __future__ import annotations

from dataclasses import dataclass

from .acm import Acm, AcmError, Config, Instruction

FINAL = "qF"
ZERO = ("zero.z1", "zero.z2", "zero.z3")
CF = "end.cF"


@dataclass(frozen=True)
class Program:
    states: tuple
    instructions: tuple
    input_state: str = None
    output_state: str = None


def _transfer(prefix, r):
    t0, t1 = f"{prefix}.t0", f"{prefix}.t1"
    return [Instruction("dec", t0, t1, reg=3), Instruction("inc", t1, t0, reg=r)]


def build_program(kind: str, p: Instruction = None, K: int = 2, index: int = 1,
                  final: str = None) -> Program:
    """One of the M_K building blocks.

    kind is zero, times, div, transfer or end. times/div need the
    increment/decrement p they replace (and its 1-based index, used in
    state names); transfer needs p only for its register; end needs the
    final state of the source machine.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    if kind == "zero":
        ins = []
        for i, z in enumerate(ZERO, 1):
            for j in (1, 2, 3):
                if j != i:
                    ins.append(Instruction("dec", z, z, reg=j))
            ins.append(Instruction("fork", z, FINAL, dst2=FINAL))
        return Program(ZERO, tuple(ins))
    if kind == "end":
        if final is None:
            raise ValueError("end program needs the source machine's final state")
        ins = (Instruction("dec", final, CF, reg=1), Instruction("dec", CF, FINAL, reg=2))
        return Program((CF,), ins, final, FINAL)
    if p is None:
        raise ValueError(f"{kind} program needs an instruction")
    if kind == "transfer":
        prefix = f"transfer.{index}"
        return Program((f"{prefix}.t0", f"{prefix}.t1"), tuple(_transfer(prefix, p.reg)),
                       f"{prefix}.t0", f"{prefix}.t0")
    if p.reg not in (1, 2):
        raise ValueError("only registers r1 and r2 can be encoded")
    z = ZERO[p.reg - 1]
    z3 = ZERO[2]
    if kind == "times":
        if p.kind != "inc":
            raise ValueError("times program needs an increment instruction")
        pre = f"times.{index}"
        a = [f"{pre}.a{i}" for i in range(K + 1)]
        t0 = f"{pre}.t0"
        ins = [Instruction("inc", a[i - 1], a[i], reg=3) for i in range(1, K + 1)]
        ins.append(Instruction("dec", a[K], a[0], reg=p.reg))           # loop
        ins.extend(_transfer(pre, p.reg))
        ins.append(Instruction("fork", p.src, a[K], dst2=z3))           # in
        ins.append(Instruction("fork", a[K], t0, dst2=z))               # T
        ins.append(Instruction("fork", t0, p.dst, dst2=z3))             # out
        return Program(tuple(a) + (t0, f"{pre}.t1"), tuple(ins), p.src, p.dst)
    if kind == "div":
        if p.kind != "dec":
            raise ValueError("div program needs a decrement instruction")
        pre = f"div.{index}"
        s = [f"{pre}.s{i}" for i in range(K + 1)]
        t0 = f"{pre}.t0"
        ins = [Instruction("dec", s[i - 1], s[i], reg=p.reg) for i in range(1, K + 1)]
        ins.append(Instruction("inc", s[K], s[0], reg=3))               # loop
        ins.extend(_transfer(pre, p.reg))
        ins.append(Instruction("fork", p.src, s[0], dst2=z3))           # in
        ins.append(Instruction("fork", s[0], t0, dst2=z))               # T
        ins.append(Instruction("fork", t0, p.dst, dst2=z3))             # out
        return Program(tuple(s) + (t0, f"{pre}.t1"), tuple(ins), p.src, p.dst)
    raise ValueError(f"unknown program kind {kind!r}")


def construct_mk(M: Acm, K: int) -> Acm:
    if K < 2:
        raise ValueError("K must be at least 2")
    if M.registers != 2:
        raise AcmError(f"M must have exactly 2 registers, found {M.registers}")
    reserved = set(ZERO) | {FINAL, CF}
    clash = reserved & set(M.states)
    if clash:
        raise AcmError(f"state names reserved by the construction: {sorted(clash)}")
    states = list(M.states) + list(ZERO) + [FINAL, CF]
    instrs = [p for p in M.instructions if p.kind == "fork"]
    instrs += list(build_program("zero", K=K).instructions)
    instrs += list(build_program("end", K=K, final=M.final).instructions)
    for idx, p in enumerate(M.instructions, 1):
        if p.kind == "fork":
            continue
        prog = build_program("times" if p.kind == "inc" else "div", p, K, idx)
        states.extend(prog.states)
        instrs.extend(prog.instructions)
    return Acm(3, tuple(states), FINAL, tuple(instrs))


def lift_config(cf: Config, K: int) -> Config:
    if K < 2:
        raise ValueError("K must be at least 2")
    if len(cf.regs) != 2:
        raise ValueError("expected a configuration of a 2-register machine")
    n1, n2 = cf.regs
    return Config(cf.state, (K ** n1, K ** n2, 0))


def fragment(programs, registers=3, extra_states=()) -> Acm:
    """A machine made of some programs plus the zero-test and qF, for local checks."""
    states, instrs = [], []
    for prog in programs:
        for s in prog.states:
            if s not in states:
                states.append(s)
        instrs.extend(prog.instructions)
    for s in list(extra_states) + [FINAL]:
        if s not in states:
            states.append(s)
    for prog in programs:
        for ins in prog.instructions:
            for q in (ins.src, ins.dst, ins.dst2):
                if q is not None and q not in states:
                    states.append(q)
    return Acm(registers, tuple(states), FINAL, tuple(instrs))


def zero_machine() -> Acm:
    return fragment([build_program("zero")])


def program_reach(prog: Program, start: Config, max_reg: int = 64, zero: Acm = None) -> set:
    """Configurations reachable from start using only prog's instructions.

    A fork whose second branch is a zero-test state may be taken only if
    that side configuration is accepted by the zero-test fragment; the
    main branch then continues. The output state is not left.
    """
    from .acm import Fuel, accepts

    zero = zero or zero_machine()
    by_src = {}
    for ins in prog.instructions:
        by_src.setdefault(ins.src, []).append(ins)
    memo = {}

    def side_ok(c):
        if c not in memo:
            r = accepts(zero, (c,), Fuel(None, max(max(c.regs), 1)))
            if not r.accepted and not r.exhausted:
                raise RuntimeError(f"zero-test undecided for {c}")
            memo[c] = r.accepted
        return memo[c]

    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        if c.state == prog.output_state and c != start:
            continue
        for ins in by_src.get(c.state, ()):
            regs = list(c.regs)
            if ins.kind == "inc":
                regs[ins.reg - 1] += 1
            elif ins.kind == "dec":
                if regs[ins.reg - 1] == 0:
                    continue
                regs[ins.reg - 1] -= 1
            else:
                if ins.dst2 not in ZERO:
                    raise ValueError(f"unexpected fork {ins} inside a program")
                if not side_ok(Config(ins.dst2, c.regs)):
                    continue
            nxt = Config(ins.dst, tuple(regs))
            if max(nxt.regs) > max_reg:
                raise RuntimeError(f"register cap {max_reg} exceeded at {nxt}")
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def program_outputs(prog: Program, start: Config, max_reg: int = 64, zero: Acm = None) -> set:
    return {c.regs for c in program_reach(prog, start, max_reg, zero)
            if c.state == prog.output_state and c != start}
