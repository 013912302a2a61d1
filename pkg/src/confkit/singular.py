"""Singular vectors of tensor modules as an exact linear system over Q.

An ansatz vector is u = (d + alpha)^k b with b a module basis vector and
k <= Dmax (alpha = 0 unless the module is twisted).  For each Cartan
weight the conditions are assembled and solved separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Sequence

from .annihilation import NotEigenvector, ann_degree, ann_act_raw, cartan, coeff_to_ann, weight_of_raw
from .conformal import ConformalAlgebra, build_S, build_W
from .core import ModuleVector, add_into, fmt_scalar, popcount
from .linalg import RowReducer, intersect, span_basis
from .repn import ConformalModule, GlRep

# ---------------------------------------------------------------------------
# conditions


def w_conditions(A: ConformalAlgebra) -> list:
    """(S1)-(S5): list of (generator, predicate on lam-power) pairs."""
    out = []
    for g, lab in enumerate(A.basis.labels):
        I = lab[1]
        if lab[0] == "fun":
            lo = 0 if popcount(I) > 1 else (1 if I else 2)      # S5 / S3 / S1
        else:
            j = lab[2]
            borel = popcount(I) > 1 or (popcount(I) == 1 and (I.bit_length()) < j)
            lo = 0 if borel else 1                               # S4 / S2
        out.append((g, lo))
    return out


def w_raw_conditions(A: ConformalAlgebra, jmax: int) -> list:
    """(s1)-(s3) as annihilation-algebra elements t^j g d_i."""
    out = []
    one = A.basis.index[("fun", 0)]
    for g, lab in enumerate(A.basis.labels):
        I = lab[1]
        for j in range(jmax + 1):
            if j >= 2:
                out.append({(g, j): 1})
            elif j == 1:
                if g != one:
                    out.append({(g, j): 1})
            else:
                if lab[0] == "fun":
                    if popcount(I) > 1:
                        out.append({(g, 0): 1})
                elif popcount(I) > 1 or (popcount(I) == 1 and I.bit_length() < lab[2]):
                    out.append({(g, 0): 1})
    return out


def borel_zero(A: ConformalAlgebra) -> list:
    """Borel positive part of degree 0: t d_i and xi_i d_j (i < j)."""
    out = []
    for i in range(1, A.n + 1):
        out.append({(A.basis.index[("vec", 0, i)], 1): 1})
        for j in range(i + 1, A.n + 1):
            out.append({(A.basis.index[("vec", 1 << (i - 1), j)], 0): 1})
    return out


@dataclass
class SConditions:
    elements: list                 # AnnElement dicts
    star_in_span: bool
    by_degree: dict


def s_conditions(n: int, Dmax: int, variant: str = "S", W: ConformalAlgebra | None = None) -> SConditions:
    """Positive-degree components and degree-0 Borel part of A(S_n), optionally plus xi_* d_t."""
    W = W or build_W(n)
    S = build_S(n, W)
    maxk = max(v.degree() for v in S.basis)
    dmax = Dmax + n + 1
    jmax = dmax + maxk + 1
    comps: dict = {}
    for X in S.basis:
        for j in range(jmax + 1):
            ann = coeff_to_ann(X.terms, j)
            parts: dict = {}
            for (g, p), c in ann.items():
                parts.setdefault(ann_degree(W, g, p), {})[(g, p)] = c
            for d, part in parts.items():
                comps.setdefault(d, []).append(part)
    keys: dict = {}

    def enc(v):
        return {keys.setdefault(k, len(keys)): c for k, c in v.items()}
    rev = None
    by_degree: dict = {}
    for d in sorted(comps):
        if d < 0 or d > dmax:
            continue
        by_degree[d] = span_basis(enc(v) for v in comps[d])
    rev = {i: k for k, i in keys.items()}
    elements = []
    for d, basis in by_degree.items():
        if d == 0:
            B0 = [enc(v) for v in borel_zero(W)]
            rev = {i: k for k, i in keys.items()}
            basis = intersect(basis, B0)
            by_degree[0] = basis
        for v in basis:
            elements.append({rev[i]: c for i, c in v.items()})
    star = {(W.basis.index[("fun", (1 << n) - 1)], 0): 1}
    rev = {i: k for k, i in keys.items()}
    d_star = n - 1
    rr = RowReducer()
    for v in by_degree.get(d_star, []):
        rr.add(v)
    star_enc = enc(star)
    star_in = not rr.reduce(star_enc)
    if variant == "S" and not star_in:
        elements.append(star)
    elif variant not in ("S", "S'"):
        raise ValueError("variant must be 'S' or \"S'\"")
    return SConditions(elements, star_in, {d: len(b) for d, b in by_degree.items()})


# ---------------------------------------------------------------------------
# ansatz and solver


@dataclass
class Ansatz:
    module: ConformalModule
    Dmax: int
    vectors: list                  # list of ModuleVector dicts
    labels: list                   # (k, b)

    @property
    def size(self) -> int:
        return len(self.vectors)


def make_ansatz(M: ConformalModule, Dmax: int) -> Ansatz:
    if Dmax < 1:
        raise ValueError("Dmax must be >= 1")
    alpha = M.twist
    vecs, labels = [], []
    for b in range(M.rank):
        for k in range(Dmax + 1):
            v: dict = {}
            for r in range(k + 1):
                add_into(v, (r, b), comb(k, r) * alpha ** (k - r))
            vecs.append(v)
            labels.append((k, b))
    return Ansatz(M, Dmax, vecs, labels)


@dataclass
class SingularVector:
    vector: ModuleVector
    weight: tuple
    degree: int
    tag: str
    support: list


@dataclass
class SingularReport:
    module: str
    mode: str
    Dmax: int
    vectors: list = field(default_factory=list)     # nontrivial SingularVector
    trivial: list = field(default_factory=list)     # solutions inside F
    constraints: int = 0
    unknowns: int = 0
    rank: int = 0
    blocks: int = 0
    notes: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.vectors)

    def weights(self) -> list:
        return sorted(v.weight for v in self.vectors)

    def signature(self) -> list:
        return sorted((v.weight, v.degree, v.tag, str(v.vector)) for v in self.vectors)


def _rows_lam(M: ConformalModule, conds: list, u: dict, col: int, rows: dict):
    for g, lo in conds:
        for (j, k, b), c in M.act_raw(g, u).items():
            if j >= lo:
                rows.setdefault(("c", g, j, k, b), {})[col] = c


def _rows_ann(M: ConformalModule, elems: list, u: dict, col: int, rows: dict, cache: dict):
    acts = cache
    for e, X in enumerate(elems):
        out: dict = {}
        for (g, p), c in X.items():
            a = acts.get(g)
            if a is None:
                a = M.act_raw(g, u)
                acts[g] = a
            for (jj, k, b), v in a.items():
                if jj == p:
                    add_into(out, (k, b), c * factorial(p) * v)
        for (k, b), v in out.items():
            rows.setdefault(("a", e, k, b), {})[col] = v


def _support(M: ConformalModule, m: dict) -> list:
    return sorted({(k, b) for (k, b) in m})


def solve(ansatz: Ansatz, mode: str = "W", elements: list | None = None, hs: list | None = None) -> SingularReport:
    """Solve the singular-vector system.

    mode "W": conditions (S1)-(S5); mode "ann": the given annihilation
    algebra elements (used for the S family and the raw cross-check).
    """
    M = ansatz.module
    A = M.algebra
    hs = hs if hs is not None else cartan(A)
    rep = SingularReport(M.name, mode, ansatz.Dmax, unknowns=ansatz.size)
    blocks: dict = {}
    try:
        for i, u in enumerate(ansatz.vectors):
            blocks.setdefault(weight_of_raw(M, u, hs), []).append(i)
    except NotEigenvector:
        rep.notes.append("ansatz not diagonal for the Cartan subalgebra; solved as one block")
        blocks = {None: list(range(ansatz.size))}
    rep.blocks = len(blocks)
    conds = w_conditions(A) if mode == "W" else None
    Fset = set(M.trivial)
    for wt, cols in sorted(blocks.items(), key=lambda t: str(t[0])):
        rows: dict = {}
        for col in cols:
            u = ansatz.vectors[col]
            if mode == "W":
                _rows_lam(M, conds, u, col, rows)
            else:
                _rows_ann(M, elements, u, col, rows, {})
        rep.constraints += len(rows)
        rr = RowReducer()
        for r in rows.values():
            rr.add(r)
        rep.rank += rr.rank
        sols = rr.nullspace(cols)
        if not sols:
            continue
        vecs = []
        for s in sols:
            m: dict = {}
            for col, x in s.items():
                for key, c in ansatz.vectors[col].items():
                    add_into(m, key, x * c)
            vecs.append(m)
        # echelon form with coordinates outside F = xi_* ⊗ V pivoting first:
        # rows pivoting inside F span the trivial solutions
        keys = sorted({key for m in vecs for key in m},
                      key=lambda key: (key[0] == 0 and key[1] in Fset, key))
        pos = {key: i for i, key in enumerate(keys)}
        ech = RowReducer()
        for m in vecs:
            ech.add({pos[key]: c for key, c in m.items()})
        for p in sorted(ech.pivots):
            m = {keys[i]: c for i, c in ech.pivots[p].items()}
            m = {k: (c.numerator if c.denominator == 1 else c) for k, c in m.items()}
            key = keys[p]
            sv = _mk_sv(M, m, wt, hs)
            (rep.trivial if key[0] == 0 and key[1] in Fset else rep.vectors).append(sv)
    rep.vectors.sort(key=lambda v: (v.weight, v.degree))
    return rep


def _mk_sv(M: ConformalModule, m: dict, wt, hs) -> SingularVector:
    if wt is None and m:
        try:
            wt = weight_of_raw(M, m, hs)
        except NotEigenvector:
            wt = None
    deg = max((k for k, _ in m), default=-1)
    return SingularVector(ModuleVector(m, M.basis), wt, deg, template_tag(M, m), _support(M, m))


def template_tag(M: ConformalModule, m: dict) -> str:
    """Match the support pattern against the case templates."""
    if M.rep is None or not m:
        return "unmatched"
    n = M.rep.n
    star = (1 << n) - 1
    xi_up = {star ^ (1 << (l - 1)) for l in range(1, n + 1)}
    xi_n = star ^ (1 << (n - 1))
    pat = set()
    for (k, b) in m:
        I, _ = M.basis.labels[b]
        pat.add((k, I))
    deg = max(k for k, _ in pat)
    top = {I for k, I in pat if k == deg}
    if deg == 0:
        if pat == {(0, xi_n)}:
            return "a"
        if {I for _, I in pat} <= xi_up:
            return "b"
        return "unmatched"
    if deg == 1:
        if top == {star}:
            return "c"
        if top == {xi_n}:
            return "d"
    return "unmatched"


# ---------------------------------------------------------------------------
# classification drivers


def classify_W(V: GlRep, Dmax: int = 2, alpha=0, mode: str = "W") -> SingularReport:
    from .repn import tens, twist
    M = tens(V)
    if alpha:
        M = twist(M, alpha)
    an = make_ansatz(M, Dmax)
    if mode == "W":
        return solve(an, "W")
    return solve(an, "ann", w_raw_conditions(M.algebra, Dmax + 2))


def classify_S(V: GlRep, variant: str = "S", Dmax: int = 2, alpha=0) -> SingularReport:
    from .repn import tens, twist
    n = V.n
    W = build_W(n)
    M = tens(V, W)
    if alpha:
        M = twist(M, alpha)
    sc = s_conditions(n, Dmax, variant, W)
    hs = cartan(W)[1:]          # sl(1|n) Cartan: t d_0 + xi_i d_i
    rep = solve(make_ansatz(M, Dmax), "ann", sc.elements, hs)
    rep.mode = variant
    rep.notes.append(f"xi_* d_t in span of A(S_n) components: {sc.star_in_span}")
    return rep


def raw_recheck(M: ConformalModule, rep: SingularReport, jmax: int | None = None) -> bool:
    """Re-check reported vectors against (s1)-(s3) via ann_act, bypassing the assembled system."""
    jmax = jmax if jmax is not None else rep.Dmax + 3
    conds = w_raw_conditions(M.algebra, jmax)
    for sv in rep.vectors + rep.trivial:
        if not sv.vector.terms:
            continue
        for X in conds:
            if ann_act_raw(M, X, sv.vector.terms):
                return False
    return True


def components(M: ConformalModule, m: dict) -> dict:
    """m = sum d^k (xi_I ⊗ v_{I,k}): {(k, I): {s: coeff}}."""
    out: dict = {}
    for (k, b), c in m.items():
        I, s = M.basis.labels[b]
        out.setdefault((k, I), {})[s] = c
    return out


def _apply_E(V: GlRep, i: int, j: int, v: dict) -> dict:
    out: dict = {}
    for s, c in v.items():
        for r, e in V.apply(i, j, s).items():
            add_into(out, r, c * e)
    return out


def proof_identities(M: ConformalModule, m: dict) -> dict:
    """Intermediate identities of the degree reduction on a solved vector."""
    V = M.rep
    n = V.n
    comp = components(M, m)
    star = (1 << n) - 1
    res = {}
    res["E0j(v_Ik)=0,k>=1"] = all(not _apply_E(V, 0, j, v) for (k, I), v in comp.items() if k >= 1
                                 for j in range(1, n + 1))
    res["E00(v_I1)=0"] = all(not _apply_E(V, 0, 0, v) for (k, I), v in comp.items() if k == 1)
    w = comp.get((1, star), {})
    ok = True
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            lhs = _apply_E(V, i, j, w)
            rhs = dict(w) if i == j else {}
            if lhs != {k: v for k, v in rhs.items() if v}:
                ok = False
    res["Eij(w)=delta_ij w"] = ok
    ok = True
    if w:
        for i in range(1, n + 1):
            vi = comp.get((0, star ^ (1 << (i - 1))), {})
            lhs = _apply_E(V, i, 0, w)
            # sign of xi_* = (-1)^(n-i) xi^i xi_i
            sg = -1 if (n - i) & 1 else 1
            if lhs != {s: sg * c for s, c in vi.items()}:
                ok = False
    res["Ei0(w)=+-v_i"] = ok
    return res


def verify_degree_lemma(rep: SingularReport, M: ConformalModule) -> bool:
    """Every solution has d-degree <= 1 and the shape d(xi_*⊗w) + sum xi^l⊗v_l + xi_*⊗v_0."""
    n = M.rep.n
    star = (1 << n) - 1
    allowed = {(1, star), (0, star)} | {(0, star ^ (1 << (l - 1))) for l in range(1, n + 1)}
    for sv in rep.vectors + rep.trivial:
        if sv.degree > 1:
            return False
        for (k, b) in sv.vector.terms:
            if (k, M.basis.labels[b][0]) not in allowed:
                return False
    return True


def degeneracy(M: ConformalModule, Dmax: int = 2) -> dict:
    """Singular vectors of a general module (e.g. W_1 modules): counts inside and outside F."""
    rep = solve(make_ansatz(M, Dmax), "W")
    return {"nontrivial": rep.count, "trivial": len(rep.trivial), "total": rep.count + len(rep.trivial),
            "report": rep}


# ---------------------------------------------------------------------------
# expected inventories


def weight_str(w) -> str:
    if w is None:
        return "?"
    return "(" + ",".join(fmt_scalar(x) for x in w) + ")"


def cartan_invariant(M: ConformalModule, rep: SingularReport, hs: list | None = None) -> bool:
    """Each Cartan operator maps the solved space into itself."""
    hs = hs if hs is not None else cartan(M.algebra)
    sols = [sv.vector.terms for sv in rep.vectors + rep.trivial if sv.vector.terms]
    keys: dict = {}

    def enc(m):
        return {keys.setdefault(k, len(keys)): c for k, c in m.items()}
    rr = RowReducer()
    for m in sols:
        rr.add(enc(m))
    for h in hs:
        for m in sols:
            hm = ann_act_raw(M, h, m)
            if hm and rr.reduce(enc(hm)):
                return False
    return True


def dmax_stable(run, dmaxes: Sequence[int] = (1, 2, 3)) -> bool:
    """run(Dmax) -> SingularReport; signatures must agree."""
    sigs = [run(d).signature() for d in dmaxes]
    return all(s == sigs[0] for s in sigs)


# ---------------------------------------------------------------------------
# inventories
#
# ENGINE_W / ENGINE_S: what the solver returns, as (weight, tag) lists with
# the weight written as a function of n and k.  These agree with the
# submodule structure of the induced modules (generator of d^# Theta^{k+1}
# inside Theta^k, of d Omega^{k-1} inside Omega^k).  STATED_W / STATED_S
# hold the labels of the classification statement as written; the two
# differ by the weight of the V-component vs the weight of m.


def _w(n, mu, lams):
    return (mu,) + tuple(lams)


def engine_W(family: str, k: int, n: int) -> list:
    if family == "theta":
        return [(_w(n, 0, [0] * (n - 1) + [-k - 1]), "a")]
    if family == "bar":
        if k == 0:
            return []
        if k == 1:
            return [(_w(n, -1, [0] * n), "c")]
        return [(_w(n, 0, [k - 1] + [1] * (n - 1)), "b")]
    if family == "standard":
        return []
    raise ValueError(family)


def stated_W(family: str, k: int, n: int) -> list:
    if family == "theta":
        return [(_w(n, 0, [0] * (n - 1) + [-k]), "a")]
    if family == "bar":
        if k == 1:
            return [(_w(n, -1, [0] * n), "c"), (_w(n, 0, [2] + [1] * (n - 1)), "b")]
        return [(_w(n, 0, [k] + [1] * (n - 1)), "b")]
    if family == "standard":
        return []
    raise ValueError(family)


def stated_S(family: str, k: int, n: int) -> list:
    if family == "theta":
        return [(tuple([0] * (n - 1) + [-k]), "a")]
    if family == "bar" and k == 1 or family == "standard":
        return sorted([(tuple([2] + [1] * (n - 1)), "b"), (tuple([0] * n), "c"), (tuple([0] * (n - 1) + [-1]), "d")])
    if family == "bar":
        if k == 0:
            return [(tuple([0] * n), "a")]
        return [(tuple([k] + [1] * (n - 1)), "b")]
    raise ValueError(family)


def engine_S(family: str, k: int, n: int, variant: str) -> list:
    if family == "theta":
        return [(tuple([0] * (n - 1) + [-k - 1]), "a")]
    if family == "bar" and k == 1 or family == "standard":
        out = [(tuple([0] * (n - 1) + [-1]), "d"), (tuple([0] * n), "c")]
        if variant == "S'" and n == 2:
            out.append((tuple([0] * n), "unmatched"))      # 1 ⊗ w, killed only by xi_* d_t
        return sorted(out)
    if family == "bar":
        if k == 0:
            return [(tuple([0] * (n - 1) + [-1]), "a")]
        return [(tuple([k - 1] + [1] * (n - 1)), "b")]
    raise ValueError(family)


def inventory(rep: SingularReport) -> list:
    return sorted((tuple(v.weight), v.tag) for v in rep.vectors)


def degeneracy_grid(grid: Sequence, Dmax: int = 2) -> dict:
    """{(a, b): total singular dimension} for the W_1 modules M(a, b)."""
    from .repn import build_M_ab
    return {(a, b): degeneracy(build_M_ab(a, b), Dmax)["total"] for a in grid for b in grid}
