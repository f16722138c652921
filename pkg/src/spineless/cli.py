"""Command-line front end.

Every command prints one JSON report (keys sorted) on stdout and a short
human summary on stderr. Exit status: 0 ok, 1 analysis error, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib.resources import files

from . import __version__
from .acm import AcmError, Fuel, accepts, admissibility_probe, ambient_successors, format_acm, format_id, parse_acm, parse_id
from .eqcore import (ImpliesIntegrality, Leq, ParseError, Simple, SimpleEquation, Trivial, Unsupported,
                     acc_quasiequation, delta, id_term, is_expansive, is_mingly, is_trivial, parse_equation,
                     quasi_to_equation, to_simple, Var, instruction_inequality)
from .frames import nucond_suite
from .mk import construct_mk
from .spine import (CapExceeded, SpinalWitness, check_star_falsifier, classify_prespinal, falsify_star,
                    heuristic_k, search_star_counterexample, verify_spinal)


@dataclass
class Report:
    command: str
    inputs: dict
    verdicts: list = field(default_factory=list)

    def add(self, name, value, witness=None, caps=None):
        v = {"name": name, "value": value}
        if witness is not None:
            v["witness"] = witness
        if caps is not None:
            v["caps"] = caps
        self.verdicts.append(v)

    def to_json(self, compact=False):
        doc = {"command": self.command, "inputs": self.inputs,
               "verdicts": self.verdicts, "version": __version__}
        if compact:
            return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


class UsageError(Exception):
    pass


def _read_acm(path):
    if path.startswith("builtin:"):
        text = files("spineless").joinpath(f"data/{path[8:]}.acm").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_acm(text)


def _simple(text):
    """Parse an equation and reduce it to a simple one (or explain why not)."""
    eq = parse_equation(text)
    verdict = to_simple(eq)
    onevar = None
    supp = [i for i, x in enumerate(eq.lhs) if x]
    if len(supp) == 1:
        i = supp[0]
        onevar = (eq.lhs[i], {d[i] for d in eq.rhs if all(d[j] == 0 for j in range(eq.arity) if j != i)})
    return eq, verdict, onevar


def _verdict_name(v):
    if isinstance(v, Simple):
        return "simple"
    if isinstance(v, Trivial):
        return "trivial"
    if isinstance(v, ImpliesIntegrality):
        return "implies-integrality"
    return "unsupported"


def cmd_analyze(args, rep):
    eq, verdict, onevar = _simple(args.equation)
    rep.inputs["parsed"] = str(eq)
    rep.add("reduction", _verdict_name(verdict),
            witness=getattr(verdict, "reason", None))
    if not isinstance(verdict, Simple):
        return
    s = verdict.equation
    rep.add("simple", True, witness={"D": [list(d) for d in s.D]})
    rep.add("trivial", is_trivial(s))
    m = is_mingly(s)
    rep.add("mingly", m is not None, witness={"sigma": list(m.matrix[0])} if m else None)
    e = is_expansive(s)
    rep.add("expansive", e is not None,
            witness={"sigma": list(e.sigma.matrix[0]), "n": e.n, "c": list(e.c)} if e else None)
    caps = {"arityCap": args.arity_cap, "sizeCap": args.size_cap}
    res = classify_prespinal(s, arity_cap=args.arity_cap, size_cap=args.size_cap)
    if isinstance(res, SpinalWitness):
        rep.add("prespinal", True, witness=res.to_dict(), caps=caps)
    else:
        rep.add("prespinal", False, witness={"spineless": True, "blockingsChecked": res.blockings_checked},
                caps=caps)
        K, heuristic = heuristic_k(s, onevar)
        rep.add("heuristicK", K, witness={"heuristic": heuristic, "delta": delta(s.D)})


def cmd_linearize(args, rep):
    eq, verdict, _ = _simple(args.equation)
    rep.inputs["parsed"] = str(eq)
    if isinstance(verdict, Simple):
        rep.add("simple", True, witness={"D": [list(d) for d in verdict.equation.D],
                                         "equation": str(verdict.equation)})
    else:
        rep.add("simple", False, witness={"verdict": _verdict_name(verdict),
                                          "reason": getattr(verdict, "reason", None)})


def _fuel(args):
    return Fuel(args.depth, args.reg, args.width)


def cmd_simulate(args, rep):
    M = _read_acm(args.machine)
    u = parse_id(M, args.init)
    rep.inputs["init"] = format_id(u)
    res = accepts(M, u, _fuel(args))
    rep.add("accepted", res.accepted, witness=res.to_dict(), caps=_fuel(args).to_dict())


def cmd_ambient(args, rep):
    M = _read_acm(args.machine)
    u = parse_id(M, args.init)
    eq, verdict, _ = _simple(args.eq)
    if not isinstance(verdict, Simple):
        raise ValueError(f"ambient equation must reduce to a simple equation, got {_verdict_name(verdict)}")
    D = verdict.equation.D
    rep.inputs.update(init=format_id(u), D=[list(d) for d in D])
    succ = ambient_successors(M, D, u, args.degree_cap)
    rep.add("ambientSuccessors", [format_id(v) for v in succ], caps={"degreeCap": args.degree_cap})
    res = accepts(M, u, _fuel(args), ambient=(D, args.degree_cap))
    caps = dict(_fuel(args).to_dict(), degreeCap=args.degree_cap)
    rep.add("acceptedWithAmbient", res.accepted, witness=res.to_dict(), caps=caps)


def cmd_admissibility(args, rep):
    M = _read_acm(args.machine)
    eq, verdict, _ = _simple(args.eq)
    if not isinstance(verdict, Simple):
        raise ValueError(f"equation must reduce to a simple equation, got {_verdict_name(verdict)}")
    states = args.states.split(",") if args.states else None
    dcaps = tuple(int(x) for x in args.domain_caps.split(",")) if args.domain_caps else None
    if dcaps is not None and len(dcaps) != M.registers:
        raise UsageError(f"--domain-caps needs {M.registers} values")
    r = admissibility_probe(M, verdict.equation.D, args.reg, args.degree_cap, states, dcaps, args.depth)
    d = r.to_dict()
    rep.add("difference", d["witnesses"], witness={"message": d["message"], "uncertain": d["uncertain"],
                                                   "domainSize": d["domainSize"]}, caps=d["caps"])


def cmd_build_mk(args, rep):
    M = _read_acm(args.machine)
    MK = construct_mk(M, args.K)
    text = format_acm(MK)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    rep.inputs["K"] = args.K
    rep.add("machine", {"states": len(MK.states), "instructions": len(MK.instructions),
                        "output": args.output}, witness=None if args.output else text)


def cmd_falsify(args, rep):
    eq = parse_equation(args.equation)
    rep.inputs.update(parsed=str(eq), K=args.K)
    f, V = eq.lhs, list(eq.rhs)
    if verify_spinal(f, V):
        tau, C = falsify_star(f, V, args.K)
        rep.add("spinal", True)
        rep.add("falsifier", {"tau": list(tau), "C": C},
                witness={"checked": check_star_falsifier(f, V, args.K, tau, C)})
        return
    verdict = to_simple(eq)
    if not isinstance(verdict, Simple):
        raise ValueError(f"equation is neither spinal nor reducible to a simple equation ({_verdict_name(verdict)})")
    s = verdict.equation
    res = classify_prespinal(s, arity_cap=args.arity_cap, size_cap=args.size_cap)
    if not isinstance(res, SpinalWitness):
        rep.add("prespinal", False, witness={"spineless": True})
        return
    tau, C = falsify_star(res.f, res.V, args.K)
    rows = res.sigma.matrix
    composed = [sum(t * rows[i][j] for i, t in enumerate(tau)) for j in range(s.arity)]
    rep.add("prespinal", True, witness=res.to_dict())
    rep.add("falsifier", {"tau": list(tau), "C": C, "substitution": composed},
            witness={"checked": check_star_falsifier(res.f, res.V, args.K, tau, C)})


def cmd_star_search(args, rep):
    eq, verdict, _ = _simple(args.equation)
    if not isinstance(verdict, Simple):
        raise ValueError(f"equation must reduce to a simple equation, got {_verdict_name(verdict)}")
    w = search_star_counterexample(verdict.equation, args.K, args.mode, args.bound)
    rep.inputs.update(parsed=str(eq), K=args.K, mode=args.mode)
    rep.add("counterexample", w is not None, witness=w.to_dict() if w else None,
            caps={"bound": args.bound})


def cmd_frame_check(args, rep):
    res = nucond_suite(args.seed, args.count, args.per_frame)
    bad = [r for r in res if not r["agree"] or not r["galois"]]
    rep.inputs.update(seed=args.seed, count=args.count, perFrame=args.per_frame)
    rep.add("agreement", not bad, witness={"cases": len(res), "mismatches": bad,
                                           "falsified": sum(not r["algebra"] for r in res)})


def cmd_acc(args, rep):
    M = _read_acm(args.machine)
    q = acc_quasiequation(M, args.init)
    rep.add("quasiequation", str(q), witness={"premises": len(q.premises)})


def _ineq(text):
    lhs, sep, rhs = text.partition("<=")
    if not sep:
        raise ValueError(f"expected an inequality 'a <= b', got {text!r}")
    return Leq(Var(lhs.strip()), Var(rhs.strip()))


def cmd_epsilon(args, rep):
    if args.machine:
        M = _read_acm(args.machine)
        S = [instruction_inequality(p) for p in M.instructions]
        if not args.init:
            raise UsageError("--init is required with a machine")
        t = Leq(id_term(parse_id(M, args.init)), Var(M.final))
    else:
        if not args.conclusion:
            raise UsageError("--conclusion is required without a machine")
        S = [_ineq(p) for p in args.premise or []]
        t = _ineq(args.conclusion)
    e = quasi_to_equation(S, t, args.n)
    rep.add("equation", str(e), witness={"factors": len(e.lhs.args)})


COMMANDS = {
    "analyze": cmd_analyze, "linearize": cmd_linearize, "simulate": cmd_simulate,
    "ambient-simulate": cmd_ambient, "admissibility": cmd_admissibility, "build-mk": cmd_build_mk,
    "falsify-star": cmd_falsify, "star-search": cmd_star_search, "frame-check": cmd_frame_check,
    "acc-quasieq": cmd_acc, "epsilon-sn": cmd_epsilon,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="spineless", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="compact single-line JSON")
        return sp

    def caps(sp):
        sp.add_argument("--arity-cap", type=int, default=10)
        sp.add_argument("--size-cap", type=int, default=16)

    def fuel(sp, depth=None, reg=16, width=None):
        sp.add_argument("--depth", type=int, default=depth)
        sp.add_argument("--reg", type=int, default=reg)
        sp.add_argument("--width", type=int, default=width)

    sp = common(sub.add_parser("analyze", help="classify an equation"))
    sp.add_argument("equation")
    caps(sp)
    sp = common(sub.add_parser("linearize", help="reduce to a simple equation"))
    sp.add_argument("equation")
    sp = common(sub.add_parser("simulate", help="bounded acceptance search"))
    sp.add_argument("machine")
    sp.add_argument("--init", required=True)
    fuel(sp)
    sp = common(sub.add_parser("ambient-simulate", help="acceptance with ambient equation steps"))
    sp.add_argument("machine")
    sp.add_argument("--init", required=True)
    sp.add_argument("--eq", required=True)
    sp.add_argument("--degree-cap", type=int, default=3)
    fuel(sp)
    sp = common(sub.add_parser("admissibility", help="probe for A' \\ A within bounds"))
    sp.add_argument("machine")
    sp.add_argument("--eq", required=True)
    sp.add_argument("--degree-cap", type=int, default=3)
    sp.add_argument("--states", help="comma-separated states of the probe domain")
    sp.add_argument("--domain-caps", help="comma-separated per-register bounds of the probe domain")
    fuel(sp)
    sp = common(sub.add_parser("build-mk", help="construct M_K from a 2-register machine"))
    sp.add_argument("machine")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("-o", "--output")
    sp = common(sub.add_parser("falsify-star", help="constructive (*K) falsifier"))
    sp.add_argument("equation")
    sp.add_argument("--K", type=int, required=True)
    caps(sp)
    sp = common(sub.add_parser("star-search", help="bounded (*K)/(**K) counterexample search"))
    sp.add_argument("equation")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--mode", choices=["single", "double"], default="single")
    sp.add_argument("--bound", type=int, default=10)
    sp = common(sub.add_parser("frame-check", help="random frame suite: W+ |= [D] vs (D)"))
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--per-frame", type=int, default=5)
    sp = common(sub.add_parser("acc-quasieq", help="print acc_M(u)"))
    sp.add_argument("machine")
    sp.add_argument("--init", required=True)
    sp = common(sub.add_parser("epsilon-sn", help="print the (1 ∧ S)^n <= t transformation"))
    sp.add_argument("--machine")
    sp.add_argument("--init")
    sp.add_argument("--premise", action="append")
    sp.add_argument("--conclusion")
    sp.add_argument("--n", type=int, default=1)
    return p


def _summary(rep):
    lines = [f"{rep.command}:"]
    for v in rep.verdicts:
        val = v["value"]
        if isinstance(val, (list, dict)):
            val = json.dumps(val, ensure_ascii=False)[:120]
        lines.append(f"  {v['name']} = {val}")
    return "\n".join(lines)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return 2
    rep = Report(args.command, {k: v for k, v in sorted(vars(args).items())
                                if k not in ("command", "json")})
    try:
        COMMANDS[args.command](args, rep)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return 2
    except (ValueError, AcmError, OSError) as e:
        rep.add("error", str(e))
        print(rep.to_json(args.json), file=stdout)
        print(f"error: {e}", file=stderr)
        return 1
    print(rep.to_json(args.json), file=stdout)
    print(_summary(rep), file=stderr)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
