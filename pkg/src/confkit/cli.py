"""confkit command-line driver.

Every subcommand builds a report {command, config, checks, artifacts} and
prints it as JSON (the contract) or as a short text summary.  Exit codes:
0 all checks pass, 1 a mathematical check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from fractions import Fraction
from typing import Callable

from .core import fmt_scalar, scalar

log = logging.getLogger("confkit")

MAX_N = 4


class ConfigError(ValueError):
    pass


class Checks:
    def __init__(self):
        self.items: list = []
        self.artifacts: dict = {}

    def add(self, name: str, ok: bool, witness=None):
        item = {"name": name, "status": "pass" if ok else "fail"}
        if witness is not None and not ok:
            item["witness"] = witness
        self.items.append(item)
        log.info("%s: %s", name, item["status"])
        return ok

    def report(self, rep, name: str | None = None):
        return self.add(name or rep.name, rep.ok, rep.failures[:5] or None)

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.items)


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_scalar(x)
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)


def dump(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, ensure_ascii=False, indent=2)


def _k_range(s: str) -> list:
    try:
        if ".." in s:
            lo, hi = s.split("..")
            r = list(range(int(lo), int(hi) + 1))
        else:
            r = [int(x) for x in s.split(",")]
    except ValueError:
        raise ConfigError(f"bad k range {s!r}")
    if not r or min(r) < 0:
        raise ConfigError(f"bad k range {s!r}")
    return r


def _scalar_arg(s: str):
    try:
        return scalar(s)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational number: {s!r}")


def _check_n(n: int, lo: int = 0):
    if not lo <= n <= MAX_N:
        raise ConfigError(f"n must be in [{lo}, {MAX_N}]")


# ---------------------------------------------------------------------------
# subcommands


def cmd_axioms(args, out: Checks):
    from .annihilation import oracle_match
    from .conformal import (build_S, build_Sb, build_Stilde, build_Vir, build_W, check_jacobi,
                            check_jacobi_elements, check_skew, check_skew_elements, closure_report)
    n = args.n
    if args.algebra == "Vir":
        A = build_Vir()
        out.report(check_skew(A))
        out.report(check_jacobi(A))
        return
    _check_n(n, 0 if args.algebra == "W" else 1)
    W = build_W(n)
    if args.algebra == "W":
        out.report(check_skew(W))
        out.report(check_jacobi(W))
        out.artifacts["rank"] = W.rank
        out.add("rank (n+1)2^n", W.rank == (n + 1) * 2 ** n)
        if n <= 2 and args.oracle:
            out.report(oracle_match(W, args.T))
        for s in range(args.mutations):
            seed = args.seed + s
            Am, info = W.mutated(seed)
            detected = not (check_skew(Am).ok and check_jacobi(Am).ok)
            out.add(f"mutation[seed={seed}] detected", detected, list(info))
        return
    if args.algebra == "S":
        sub = build_Sb(n, args.b, W) if args.b else build_S(n, W)
    elif args.algebra == "Stilde":
        if n % 2:
            raise ConfigError("S~_n needs even n")
        sub = build_Stilde(n, W)
    else:
        raise ConfigError(f"unknown algebra {args.algebra}")
    out.artifacts["rank"] = len(sub.basis)
    out.add("rank n 2^n", len(sub.basis) == n * 2 ** n)
    out.report(closure_report(sub))
    out.report(check_skew_elements(W, sub.basis, sub.name))
    out.report(check_jacobi_elements(W, sub.basis, sub.name))


def _load_rep(path: str):
    from .repn import glrep_from_json, validate_glrep
    try:
        with open(path, encoding="utf-8") as fh:
            V = glrep_from_json(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"bad representation file: {e}")
    rep = validate_glrep(V)
    if not rep.ok:
        raise ConfigError(f"representation relations fail: {rep.failures[:3]}")
    return V


def cmd_classify(args, out: Checks):
    from .repn import build_bar_forms, build_standard, build_theta
    from . import singular as sg
    n = args.n
    _check_n(n, 2)
    if args.Dmax < 1:
        raise ConfigError("Dmax must be >= 1")
    runs = []
    if args.rep:
        V = _load_rep(args.rep)
        if V.n != n:
            raise ConfigError(f"representation has n={V.n}, command has --n {n}")
        runs.append(("user", 0, V))
    else:
        fam = args.family
        build = {"theta": build_theta, "barforms": build_bar_forms}.get(fam)
        if fam == "standard":
            runs.append(("standard", 0, build_standard(n)))
        elif build is None:
            raise ConfigError(f"unknown family {fam!r}")
        else:
            runs += [(fam, k, build(k, n)) for k in _k_range(args.k)]
    variant = args.variant
    reports = []
    for fam, k, V in runs:
        if args.algebra == "W":
            rep = sg.classify_W(V, args.Dmax, args.alpha)
        else:
            rep = sg.classify_S(V, variant, args.Dmax, args.alpha)
        inv = sg.inventory(rep)
        entry = {"family": fam, "k": k, "count": rep.count,
                 "vectors": [{"weight": list(v.weight) if v.weight is not None else None,
                              "degree": v.degree, "tag": v.tag, "vector": str(v.vector),
                              "coordinates": [[k, b, c] for (k, b), c in sorted(v.vector.terms.items())]}
                             for v in rep.vectors],
                 "trivial": len(rep.trivial), "notes": rep.notes}
        if fam != "user":
            f = "bar" if fam == "barforms" else fam
            if args.algebra == "W":
                exp, stated = sg.engine_W(f, k, n), sg.stated_W(f, k, n)
            else:
                exp, stated = sg.engine_S(f, k, n, variant), sg.stated_S(f, k, n)
            entry["matches_expected"] = inv == sorted(exp)
            entry["matches_paper"] = inv == sorted(stated)
            out.add(f"{args.algebra}:{fam}[k={k}] inventory", inv == sorted(exp), inv)
        out.add(f"{args.algebra}:{fam}[k={k}] degree <= 1", all(v.degree <= 1 for v in rep.vectors + rep.trivial))
        reports.append(entry)
    out.artifacts["reports"] = reports
    out.artifacts["variant"] = variant if args.algebra == "S" else None


def cmd_derham(args, out: Checks):
    from . import derham as dr
    n, jmax = args.n, args.jmax
    _check_n(n, 1)
    if jmax < 1:
        raise ConfigError("jmax must be >= 1")
    out.report(dr.d_squared(n, jmax))
    try:
        signs = dr.pin_iota(n, jmax)
        out.add("contraction sign pinned", True)
        out.artifacts["iota_signs"] = signs
    except ValueError as e:
        out.add("contraction sign pinned", False, str(e))
        signs = (1, 1)
    out.report(dr.cartan_identity(n, jmax, signs))
    out.report(dr.lie_commutes_d(n, jmax))
    out.report(dr.lie_module_axioms(n, min(jmax, 2)))
    out.artifacts["iota_anticommutation"] = dr.iota_anticommute(n, min(jmax, 2), signs)
    out.report(dr.homotopy_check(n, jmax))
    coh = {}
    for j in range(min(jmax, 3) + 1):
        c = dr.cohomology(n, j)
        coh[j] = {"kernel_rank": c.kernel_rank, "image_rank": c.image_rank,
                  "torsion": [dr.pm.pstr(t) for t in c.torsion]}
        if j != 1:
            out.add(f"exact at j={j}", c.exact)
    c1 = dr.cohomology(n, 1)
    out.add("H^1 = Q[d]/(d)", c1.kernel_rank == c1.image_rank and c1.torsion == [dr.pm.D])
    dtc = dr.dt_class(n)
    out.add("H^1 carried by dt", dtc["closed"] and not dtc["exact"] and dtc["d_dt_exact"], dtc)
    lau = dr.laurent_summary(n, args.T)
    out.add("Laurent ker d = 0 on Omega^0_-", lau[0]["kernel"] == 0)
    reps = lau[1]["cohomology"]
    out.add("Laurent H(Omega^1_-) spanned by t^-1 dt",
            len(reps) == 1 and len(reps[0][1]) == 1 and list(reps[0][1][0]) == ["t^-1dt"], reps)
    out.artifacts["cohomology"] = coh
    out.artifacts["laurent"] = lau


def cmd_dual(args, out: Checks):
    from .repn import (build_M_ab, build_standard, build_submodule_N, check_module_axioms, cokernel_diag,
                       conformal_dual, double_dual_matches, is_surjective, rm22_map, tens, transpose)
    demos = ["doubledual", "rm22", "transpose"] if args.demo == "all" else [args.demo]
    for d in demos:
        if d == "doubledual":
            for M in (tens(build_standard(2)), build_M_ab(Fraction(1, 2), Fraction(1, 3))):
                out.report(check_module_axioms(conformal_dual(M)), f"dual module axioms [{M.name}]")
                out.add(f"M** = M [{M.name}]", double_dual_matches(M)["graded"])
        elif d == "rm22":
            T = rm22_map()
            Ts = transpose(T)
            cok = cokernel_diag(Ts)
            out.artifacts["rm22_coker_dstar"] = [str(c) for c in cok]
            out.add("rm22: d injective", is_surjective(T) is False)
            out.add("rm22: coker(d^*) != 0", bool(cok))
        elif d == "transpose":
            T = build_submodule_N(args.b)
            out.add("N -> M(0,b) morphism", not check_morphism_fail(T))
            out.add("transpose surjective", is_surjective(transpose(T)))
        else:
            raise ConfigError(f"unknown demo {d!r}")


def check_morphism_fail(T) -> bool:
    from .repn import check_morphism
    return not check_morphism(T).ok


def cmd_w1(args, out: Checks):
    from .conformal import build_W
    from .repn import (build_L0b, build_La_minus_a, build_M_ab, build_submodule_N, check_module_axioms,
                       check_morphism, cl_params, k2_L_image, quotient_L0b_from_M)
    from .singular import degeneracy
    a, b = args.a, args.b
    M = build_M_ab(a, b)
    out.report(check_module_axioms(M), f"M({fmt_scalar(a)},{fmt_scalar(b)}) axioms")
    d = degeneracy(M, args.Dmax)
    out.artifacts["singular_dimension"] = d["total"]
    out.artifacts["degenerate"] = d["total"] > 1
    out.add("degenerate iff a = 0 or a + b = 0", (d["total"] > 1) == (a == 0 or a + b == 0))
    if a == 0:
        T = build_submodule_N(b)
        out.report(check_module_axioms(T.source), "N axioms")
        out.report(check_morphism(T), "N is a submodule of M(0,b)")
        L = build_L0b(b)
        out.report(check_module_axioms(L), "L(0,b) axioms")
        out.add("L(0,b) = M(0,b)/N", quotient_L0b_from_M(b).full_table() == L.full_table())
    if a + b == 0:
        out.report(check_module_axioms(build_La_minus_a(a)), "M(a,-a) quotient axioms")
    W = build_W(1)
    Lv = k2_L_image()
    br = W.bracket(Lv, Lv)
    expect = {(1, k, g): 2 * c for (k, g), c in Lv.terms.items()}
    for (k, g), c in Lv.terms.items():
        expect[(0, k + 1, g)] = expect.get((0, k + 1, g), 0) + c
    out.add("[L_lam L] = (d + 2 lam) L", dict(br.terms) == {k: v for k, v in expect.items() if v})
    if args.Delta is not None:
        out.artifacts["cl_params"] = cl_params(args.Delta, args.Lam or 0)


COMMANDS: dict[str, Callable] = {
    "axioms": cmd_axioms, "classify": cmd_classify, "derham": cmd_derham, "dual": cmd_dual, "w1": cmd_w1,
}


def _common(default):
    c = argparse.ArgumentParser(add_help=False, argument_default=None if default else argparse.SUPPRESS)
    c.add_argument("--format", choices=["json", "text"], **({"default": "json"} if default else {}))
    c.add_argument("--output", "-o", help="write the report to this file", **({"default": None} if default else {}))
    c.add_argument("--seed", type=int, **({"default": 0} if default else {}))
    c.add_argument("-v", "--verbose", action="store_true", **({"default": False} if default else {}))
    return c


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="confkit", parents=[_common(True)],
                                description="Finite Lie conformal superalgebras W_n, S_n and their modules.")
    sub = p.add_subparsers(dest="command", required=True)
    common = _common(False)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)
    sub.add_parser = add_parser

    s = sub.add_parser("axioms", help="skew-symmetry, Jacobi, oracle, mutations")
    s.add_argument("--algebra", choices=["W", "S", "Stilde", "Vir"], default="W")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--b", type=_scalar_arg, default=0)
    s.add_argument("--T", type=int, default=4, help="t-power bound for the oracle")
    s.add_argument("--no-oracle", dest="oracle", action="store_false")
    s.add_argument("--mutations", type=int, default=3)

    s = sub.add_parser("classify", help="singular vectors of Tens(V)")
    s.add_argument("--algebra", choices=["W", "S"], default="W")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--family", choices=["theta", "barforms", "standard"], default="theta")
    s.add_argument("--k", default="0")
    s.add_argument("--rep", help="JSON file with a gl(1|n) or sl(1|n) representation")
    s.add_argument("--variant", choices=["S", "S'"], default="S'",
                   help="S(1,n)_+ or its derived algebra (the annihilation algebra of S_n)")
    s.add_argument("--Dmax", type=int, default=2)
    s.add_argument("--alpha", type=_scalar_arg, default=0)

    s = sub.add_parser("derham", help="conformal de Rham complex")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--jmax", type=int, default=3)
    s.add_argument("--T", type=int, default=4)

    s = sub.add_parser("dual", help="conformal duals and transposes")
    s.add_argument("--demo", choices=["all", "doubledual", "rm22", "transpose"], default="all")
    s.add_argument("--b", type=_scalar_arg, default=1)

    s = sub.add_parser("w1", help="the W_1 modules M(a,b)")
    s.add_argument("--a", type=_scalar_arg, default=0)
    s.add_argument("--b", type=_scalar_arg, default=1)
    s.add_argument("--Dmax", type=int, default=2)
    s.add_argument("--Delta", type=_scalar_arg, default=None)
    s.add_argument("--Lam", type=_scalar_arg, default=None)
    return p


def _threads() -> int:
    raw = os.environ.get("CONFKIT_THREADS", "1")
    try:
        t = int(raw)
    except ValueError:
        raise ConfigError("CONFKIT_THREADS must be a positive integer")
    if t < 1:
        raise ConfigError("CONFKIT_THREADS must be a positive integer")
    return t


def _text(report: dict) -> str:
    lines = [f"confkit {report['command']}"]
    for c in report["checks"]:
        lines.append(f"  [{c['status'].upper():4}] {c['name']}")
    ok = all(c["status"] == "pass" for c in report["checks"])
    lines.append("OK" if ok else "FAILED")
    return "\n".join(lines)


_NEG_FRACTION = re.compile(r"^-\d+/\d+$")


def _join_negative_fractions(argv: list) -> list:
    """argparse reads "-1/2" as a flag; glue it onto the preceding option."""
    out: list = []
    for tok in argv:
        if out and _NEG_FRACTION.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None) -> tuple[int, dict, argparse.Namespace | None]:
    parser = build_parser()
    argv = _join_negative_fractions(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (0 if e.code == 0 else 2), {}, None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = {k: v for k, v in vars(args).items() if k not in ("output", "verbose", "format")}
    out = Checks()
    try:
        config["threads"] = _threads()
        COMMANDS[args.command](args, out)
    except ConfigError as e:
        return 2, {"command": args.command, "config": config, "checks": [], "artifacts": {}, "error": str(e)}, args
    report = {"command": args.command, "config": config, "checks": out.items, "artifacts": out.artifacts}
    return (0 if out.ok else 1), report, args


def main(argv=None) -> int:
    code, report, args = run(argv)
    if args is None:
        return code
    if "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
        if args.format == "text":
            return code
    text = dump(report) if args.format == "json" else _text(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
