"""Lie conformal superalgebras given by a lambda-bracket table on generators.

W_n is C[d] ⊗ (W(n) ⊕ Λ(n)).  Generator labels are
("vec", I, i) for xi_I d_i  (parity |I|+1) and ("fun", I) for xi_I
(standing for the field xi_I d_t, parity |I|); I is a bitmask.
"""
from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Sequence

from .core import (GradedBasis, LambdaValued, ModuleVector, add_into,
                   mono_deriv, mono_mul, mono_str, popcount, sesqui, subst_skew_raw,
                   mul_lam_plus_d, scalar)
from . import polymatrix as pm


@dataclass(eq=False)
class ConformalAlgebra:
    name: str
    basis: GradedBasis
    table: dict              # (a, b) -> LambdaValued dict over basis
    n: int | None = None

    @property
    def rank(self) -> int:
        return len(self.basis)

    def parity(self, a: int) -> int:
        return self.basis.parities[a]

    def tab(self, a: int, b: int) -> dict:
        return self.table.get((a, b), {})

    def gen(self, label, k: int = 0, coeff=1) -> ModuleVector:
        return ModuleVector.gen(self.basis, label, k, coeff)

    def bracket(self, x: ModuleVector, y: ModuleVector) -> LambdaValued:
        for v in (x, y):
            if v.basis is not None and v.basis is not self.basis:
                raise ValueError("element does not belong to this algebra")
        return LambdaValued(sesqui(self.tab, x.terms, y.terms), self.basis)

    def mutated(self, seed: int) -> tuple["ConformalAlgebra", tuple]:
        """Copy with one structure constant negated (chosen by seed)."""
        rng = random.Random(seed)
        keys = sorted(k for k, v in self.table.items() if v)
        pair = rng.choice(keys)
        entry = dict(self.table[pair])
        term = rng.choice(sorted(entry))
        entry[term] = -entry[term]
        table = dict(self.table)
        table[pair] = entry
        return ConformalAlgebra(self.name + "*", self.basis, table, self.n), (pair, term)


# ---------------------------------------------------------------------------
# W_n


def vec_apply(I: int, i: int, J: int) -> tuple[int, int]:
    """xi_I d_i (xi_J) = sign * xi_mask."""
    s, K = mono_deriv(i, J)
    if not s:
        return 0, 0
    t = mono_mul(I, K)
    return s * t, I | K


def w_labels(n: int) -> list:
    masks = sorted(range(1 << n), key=lambda m: (popcount(m), [i for i in range(n) if m >> i & 1]))
    vec = [("vec", I, i) for I in masks for i in range(1, n + 1)]
    fun = [("fun", I) for I in masks]
    return vec + fun


def w_label_name(lab) -> str:
    if lab[0] == "vec":
        return ("" if not lab[1] else mono_str(lab[1])) + f"∂{lab[2]}"
    return mono_str(lab[1])


def w_label_parity(lab) -> int:
    return (popcount(lab[1]) + (1 if lab[0] == "vec" else 0)) & 1


def w_basis(n: int) -> GradedBasis:
    labs = w_labels(n)
    return GradedBasis(tuple(labs), tuple(w_label_parity(l) for l in labs),
                       names=tuple(w_label_name(l) for l in labs))


def _supercomm(n, I, i, J, j, eps) -> dict:
    """[xi_I d_i, xi_J d_j] evaluated on each xi_l: {(mask, l): coeff}."""
    out: dict = {}
    for l in range(1, n + 1):
        lb = 1 << (l - 1)
        # a(b(xi_l)) - eps b(a(xi_l))
        s1, K1 = vec_apply(J, j, lb)
        if s1:
            s2, K2 = vec_apply(I, i, K1)
            if s2:
                add_into(out, (K2, l), s1 * s2)
        s1, K1 = vec_apply(I, i, lb)
        if s1:
            s2, K2 = vec_apply(J, j, K1)
            if s2:
                add_into(out, (K2, l), -eps * s1 * s2)
    return out


@lru_cache(maxsize=None)
def build_W(n: int) -> ConformalAlgebra:
    """W_n (cached: algebras are treated as immutable values)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    B = w_basis(n)
    idx = B.index
    table: dict = {}
    for a, la in enumerate(B.labels):
        pa = B.parities[a]
        for b, lb in enumerate(B.labels):
            pb = B.parities[b]
            eps = -1 if pa & pb else 1
            out: dict = {}
            if la[0] == "vec" and lb[0] == "vec":
                for (K, l), c in _supercomm(n, la[1], la[2], lb[1], lb[2], eps).items():
                    add_into(out, (0, 0, idx[("vec", K, l)]), c)
            elif la[0] == "vec":
                I, i = la[1], la[2]
                J = lb[1]
                s, K = vec_apply(I, i, J)           # a(f)
                if s:
                    add_into(out, (0, 0, idx[("fun", K)]), s)
                s = mono_mul(J, I)                   # f a = xi_J xi_I d_i
                if s:
                    add_into(out, (1, 0, idx[("vec", J | I, i)]), -eps * s)
            elif lb[0] == "vec":
                J = la[1]
                I, i = lb[1], lb[2]
                s, K = vec_apply(I, i, J)           # -eps a(f)
                if s:
                    add_into(out, (0, 0, idx[("fun", K)]), -eps * s)
                s = mono_mul(J, I)                   # -(lam + d)(f a)
                if s:
                    add_into(out, (1, 0, idx[("vec", J | I, i)]), -s)
                    add_into(out, (0, 1, idx[("vec", J | I, i)]), -s)
            else:
                s = mono_mul(la[1], lb[1])          # -(d + 2 lam) f g
                if s:
                    g = idx[("fun", la[1] | lb[1])]
                    add_into(out, (0, 1, g), -s)
                    add_into(out, (1, 0, g), -2 * s)
            if out:
                table[(a, b)] = out
    return ConformalAlgebra(f"W_{n}", B, table, n)


@lru_cache(maxsize=None)
def build_Vir() -> ConformalAlgebra:
    B = GradedBasis(("L",), (0,), names=("L",))
    return ConformalAlgebra("Vir", B, {(0, 0): {(0, 1, 0): 1, (1, 0, 0): 2}}, None)


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class Report:
    name: str
    failures: list = field(default_factory=list)
    checked: int = 0
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def check_skew(A: ConformalAlgebra) -> Report:
    rep = Report(f"skew[{A.name}]")
    for a in range(A.rank):
        for b in range(A.rank):
            eps = -1 if A.parity(a) & A.parity(b) else 1
            rhs = {k: -eps * c for k, c in subst_skew_raw(A.tab(b, a)).items()}
            rep.checked += 1
            if rhs != A.tab(a, b):
                rep.failures.append((a, b))
    return rep


def m2_residual(bra, act, pa: int, pb: int, a, b, v) -> dict:
    """a_lam(b_mu v) - eps b_mu(a_lam v) - [a_lam b]_{lam+mu} v as a BiLambda dict.

    bra(x, y) is the algebra table and act(x, w) the action on a module
    basis vector; with act = bra this is the Jacobi identity.
    """
    out: dict = {}
    for (j, k, w), c in act(b, v).items():
        for (i, l, u), c2 in act(a, w).items():
            cc = c * c2
            for r in range(k + 1):
                add_into(out, (i + r, j, l + k - r, u), cc * comb(k, r))
    ne = 1 if pa & pb else -1
    for (j, k, w), c in act(a, v).items():
        for (i, l, u), c2 in act(b, w).items():
            cc = ne * c * c2
            for r in range(k + 1):
                add_into(out, (j, i + r, l + k - r, u), cc * comb(k, r))
    for (j, k, d), c in bra(a, b).items():
        sk = c if k & 1 else -c
        for (i, l, u), c2 in act(d, v).items():
            m = i + k
            cc = sk * c2
            for r in range(m + 1):
                add_into(out, (j + r, m - r, l, u), cc * comb(m, r))
    return out


def check_jacobi(A: ConformalAlgebra, triples: Iterable | None = None) -> Report:
    rep = Report(f"jacobi[{A.name}]")
    R = range(A.rank)
    if triples is None:
        triples = ((a, b, c) for a in R for b in R for c in R)
    for a, b, c in triples:
        rep.checked += 1
        if m2_residual(A.tab, A.tab, A.parity(a), A.parity(b), a, b, c):
            rep.failures.append((a, b, c))
    return rep


# ---------------------------------------------------------------------------
# divergence and the S family


@lru_cache(maxsize=None)
def cur_basis(n: int) -> GradedBasis:
    masks = sorted(range(1 << n), key=lambda m: (popcount(m), [i for i in range(n) if m >> i & 1]))
    return GradedBasis(tuple(masks), tuple(popcount(m) & 1 for m in masks),
                       names=tuple(mono_str(m) for m in masks))


def div_raw(A: ConformalAlgebra, x: dict, b=0) -> dict:
    """div_b on a ModuleVector dict of W_n; result over cur_basis(n) (mask -> index)."""
    C = cur_basis(A.n)
    out: dict = {}
    for (k, g), c in x.items():
        lab = A.basis.labels[g]
        if lab[0] == "vec":
            I, i = lab[1], lab[2]
            s, K = mono_deriv(i, I)
            if s:
                sg = -s if popcount(I) & 1 else s
                add_into(out, (k, C.index[K]), sg * c)
        else:
            add_into(out, (k + 1, C.index[lab[1]]), -c)
            if b:
                add_into(out, (k, C.index[lab[1]]), b * c)
    return out


def div_conformal(A: ConformalAlgebra, x: ModuleVector) -> ModuleVector:
    return ModuleVector(div_raw(A, x.terms), cur_basis(A.n))


def div_b(A: ConformalAlgebra, x: ModuleVector, b) -> ModuleVector:
    return ModuleVector(div_raw(A, x.terms, scalar(b)), cur_basis(A.n))


def cur_action(A: ConformalAlgebra) -> Callable:
    """W_n acting on Cur Λ(n):  a_lam h = a(h),  f_lam h = -(d + lam)(f h)."""
    C = cur_basis(A.n)
    cache: dict = {}

    def act(g: int, h: int) -> dict:
        key = (g, h)
        if key in cache:
            return cache[key]
        lab = A.basis.labels[g]
        H = C.labels[h]
        out: dict = {}
        if lab[0] == "vec":
            s, K = vec_apply(lab[1], lab[2], H)
            if s:
                add_into(out, (0, 0, C.index[K]), s)
        else:
            s = mono_mul(lab[1], H)
            if s:
                K = C.index[lab[1] | H]
                add_into(out, (0, 1, K), -s)
                add_into(out, (1, 0, K), -s)
        cache[key] = out
        return out
    return act


def check_div_identity(A: ConformalAlgebra, D1: ModuleVector, D2: ModuleVector, b=0) -> bool:
    """div_b [D1_lam D2] = D1_lam div_b D2 - eps (D2)_{-lam-d} div_b D1."""
    b = scalar(b)
    act = cur_action(A)
    lhs: dict = {}
    for (j, k, g), c in A.bracket(D1, D2).terms.items():
        for (kk, h), cc in div_raw(A, {(k, g): c}, b).items():
            add_into(lhs, (j, kk, h), cc)
    rhs = sesqui(act, D1.terms, div_raw(A, D2.terms, b))
    eps = -1 if D1.parity() & D2.parity() else 1
    t = subst_skew_raw(sesqui(act, D2.terms, div_raw(A, D1.terms, b)))
    for key, c in t.items():
        add_into(rhs, key, -eps * c)
    return lhs == rhs


def div_matrix(A: ConformalAlgebra, b=0, premul: int | None = None) -> pm.PolyMatrix:
    """Matrix of div_b (optionally precomposed with multiplication by 1 + xi_mask)."""
    C = cur_basis(A.n)
    M = pm.PolyMatrix.zeros(len(C), A.rank)
    for g in range(A.rank):
        x = {(0, g): 1}
        if premul is not None:
            x = add_dicts(x, gmul_left(A, premul, x))
        for (k, h), c in div_raw(A, x, b).items():
            col = list(M.rows[h][g]) + [0] * (k + 1)
            col[k] += c
            M.rows[h][g] = pm.ptrim(col)
    return M


def add_dicts(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, c in y.items():
        add_into(out, k, c)
    return out


def gmul_left(A: ConformalAlgebra, mask: int, x: dict) -> dict:
    """Left multiplication of a W_n element by the monomial xi_mask."""
    out: dict = {}
    for (k, g), c in x.items():
        lab = A.basis.labels[g]
        s = mono_mul(mask, lab[1])
        if s:
            nl = ("vec", mask | lab[1], lab[2]) if lab[0] == "vec" else ("fun", mask | lab[1])
            add_into(out, (k, A.basis.index[nl]), s * c)
    return out


@dataclass(eq=False)
class ConformalSubalgebra:
    parent: ConformalAlgebra
    basis: list               # list of ModuleVector over parent.basis
    name: str = ""
    b: object = 0
    hermite: list = field(default_factory=list, repr=False)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: ModuleVector) -> bool:
        return pm.in_submodule(pm.vec_to_polys(v, self.parent.rank), self.hermite)

    def same_submodule(self, other: "ConformalSubalgebra") -> bool:
        return self.hermite == other.hermite


def _hermite_of(A: ConformalAlgebra, vecs: Sequence[ModuleVector]) -> list:
    return pm.hermite([pm.vec_to_polys(v, A.rank) for v in vecs], A.rank)


def subalgebra_from_vectors(A: ConformalAlgebra, vecs: Sequence[ModuleVector], name: str, b=0) -> ConformalSubalgebra:
    """Echelonised homogeneous basis of the C[d]-span of homogeneous vectors."""
    rows: list = []
    for p in (0, 1):
        part = [v for v in vecs if v and v.parity() == p]
        rows += _hermite_of(A, part)
    rows.sort(key=lambda t: t[0])
    basis = [pm.polys_to_vec(r, A.basis) for _, r in rows]
    return ConformalSubalgebra(A, basis, name, b, pm.hermite([r for _, r in rows], A.rank))


def kernel_subalgebra(A: ConformalAlgebra, M: pm.PolyMatrix, name: str, b=0) -> ConformalSubalgebra:
    """Free homogeneous basis of ker M, computed parity by parity."""
    vecs: list = []
    for p in (0, 1):
        cols = [g for g in range(A.rank) if A.parity(g) == p]
        sub = pm.PolyMatrix([[r[g] for g in cols] for r in M.rows])
        for kv in pm.kernel_image(sub).kernel:
            full = [pm.ZERO] * A.rank
            for g, e in zip(cols, kv):
                full[g] = e
            vecs.append(pm.polys_to_vec(full, A.basis))
    return subalgebra_from_vectors(A, vecs, name, b)


def build_Sb(n: int, b, W: ConformalAlgebra | None = None) -> ConformalSubalgebra:
    if n < 1:
        raise ValueError("S-type algebras need n >= 1")
    W = W or build_W(n)
    b = scalar(b)
    return kernel_subalgebra(W, div_matrix(W, b), f"S_{n}" if not b else f"S_{n},{b}", b)


def build_S(n: int, W: ConformalAlgebra | None = None) -> ConformalSubalgebra:
    return build_Sb(n, 0, W)


def build_Stilde(n: int, W: ConformalAlgebra | None = None) -> ConformalSubalgebra:
    if n % 2:
        raise ValueError("S~_n is defined for even n only")
    W = W or build_W(n)
    star = (1 << n) - 1
    sub = kernel_subalgebra(W, div_matrix(W, 0, premul=star), f"S~_{n}")
    sub.b = None
    return sub


def stilde_matches(n: int, W: ConformalAlgebra | None = None) -> bool:
    """ker(D -> div((1+xi_*)D)) equals (1 - xi_*) S_n as C[d]-submodules."""
    W = W or build_W(n)
    St = build_Stilde(n, W)
    S = build_S(n, W)
    star = (1 << n) - 1
    moved = [ModuleVector(add_dicts(v.terms, {k: -c for k, c in gmul_left(W, star, v.terms).items()}), W.basis)
             for v in S.basis]
    return St.hermite == pm.hermite([pm.vec_to_polys(v, W.rank) for v in moved], W.rank)


def s_generator_elements(W: ConformalAlgebra) -> list:
    """(-1)^{p(f)} d(f d_i) + d_i f for monomials f and 1 <= i <= n."""
    out = []
    for lab in W.basis.labels:
        if lab[0] != "fun":
            continue
        f = lab[1]
        for i in range(1, W.n + 1):
            d: dict = {}
            add_into(d, (1, W.basis.index[("vec", f, i)]), -1 if popcount(f) & 1 else 1)
            s, K = mono_deriv(i, f)
            if s:
                add_into(d, (0, W.basis.index[("fun", K)]), s)
            out.append(ModuleVector(d, W.basis))
    return out


def closure_report(sub: ConformalSubalgebra) -> Report:
    """Every lam-coefficient of [x_lam y] lies in the C[d]-span of the basis."""
    A = sub.parent
    rep = Report(f"closure[{sub.name}]")
    for x in sub.basis:
        for y in sub.basis:
            br = A.bracket(x, y)
            for j in range(br.lam_degree() + 1):
                rep.checked += 1
                if not sub.contains(br.coefficient(j)):
                    rep.failures.append((str(x), str(y), j))
    return rep


def generated_subalgebra(A: ConformalAlgebra, gens: Sequence[ModuleVector], max_rounds: int = 10) -> list:
    """Hermite basis of the conformal subalgebra generated by gens."""
    vecs = [v for v in gens if v]
    herm = _hermite_of(A, vecs)
    for _ in range(max_rounds):
        cur = [pm.polys_to_vec(r, A.basis) for _, r in herm]
        new = list(cur)
        for x in cur:
            for y in cur:
                br = A.bracket(x, y)
                for j in range(br.lam_degree() + 1):
                    new.append(br.coefficient(j))
        h2 = _hermite_of(A, new)
        if h2 == herm:
            return herm
        herm = h2
    return herm


# ---------------------------------------------------------------------------
# Jacobi on elements (used for subalgebra bases)


def _nested(tab, x: dict, inner: dict, outer_first: bool) -> dict:
    """[x_nu inner] where inner is a LambdaValued dict in another variable."""
    groups: dict = {}
    for (j, k, g), c in inner.items():
        groups.setdefault(j, {})[(k, g)] = c
    out: dict = {}
    for j, mv in groups.items():
        for (i, k, g), c in sesqui(tab, x, mv).items():
            key = (i, j, k, g) if outer_first else (j, i, k, g)
            add_into(out, key, c)
    return out


class ElementBracket:
    """Bracket with memoised rows [x_lam g] and [g_lam x] for a fixed element set."""

    def __init__(self, A: ConformalAlgebra, elems: Sequence[ModuleVector]):
        self.A = A
        self.elems = [e.terms for e in elems]
        self.par = [e.parity() for e in elems]
        self.left = [dict() for _ in elems]   # x index -> g -> dict
        self.right = [dict() for _ in elems]
        self.pair: dict = {}

    def x_on(self, xi: int, g: int) -> dict:
        r = self.left[xi].get(g)
        if r is None:
            r = sesqui(self.A.tab, self.elems[xi], {(0, g): 1})
            self.left[xi][g] = r
        return r

    def on_x(self, g: int, xi: int) -> dict:
        r = self.right[xi].get(g)
        if r is None:
            r = sesqui(self.A.tab, {(0, g): 1}, self.elems[xi])
            self.right[xi][g] = r
        return r

    def br(self, xi: int, yi: int) -> dict:
        key = (xi, yi)
        r = self.pair.get(key)
        if r is None:
            r = {}
            for (q, g), c in self.elems[yi].items():
                mul_lam_plus_d(self.x_on(xi, g), q, r, c)
            self.pair[key] = r
        return r

    def x_on_lv(self, xi: int, inner: dict, outer_first: bool) -> dict:
        """[x_lam (inner)] with inner in the other variable; keys (lam, mu, k, g)."""
        out: dict = {}
        for (j, k, g), c in inner.items():
            for (i, kk, h), c2 in self.x_on(xi, g).items():
                cc = c * c2
                for r in range(k + 1):
                    key = (i + r, j) if outer_first else (j, i + r)
                    add_into(out, key + (kk + k - r, h), cc * comb(k, r))
        return out

    def jacobi(self, a: int, b: int, c: int) -> dict:
        out = self.x_on_lv(a, self.br(b, c), True)
        ne = 1 if self.par[a] & self.par[b] else -1
        for key, v in self.x_on_lv(b, self.br(a, c), False).items():
            add_into(out, key, ne * v)
        # -[[a_lam b]_{lam+mu} c]
        for (j, k, d), v in self.br(a, b).items():
            sk = v if k & 1 else -v
            for (i, l, u), c2 in self.on_x(d, c).items():
                m = i + k
                cc = sk * c2
                for r in range(m + 1):
                    add_into(out, (j + r, m - r, l, u), cc * comb(m, r))
        return out


def check_skew_elements(A: ConformalAlgebra, elems: Sequence[ModuleVector], name: str = "") -> Report:
    rep = Report(f"skew[{name or A.name}]")
    eb = ElementBracket(A, elems)
    N = len(elems)
    for a in range(N):
        for b in range(N):
            eps = -1 if eb.par[a] & eb.par[b] else 1
            rhs = {k: -eps * c for k, c in subst_skew_raw(eb.br(b, a)).items()}
            rep.checked += 1
            if rhs != eb.br(a, b):
                rep.failures.append((a, b))
    return rep


def check_jacobi_elements(A: ConformalAlgebra, elems: Sequence[ModuleVector], name: str = "",
                          triples: Iterable | None = None) -> Report:
    rep = Report(f"jacobi[{name or A.name}]")
    eb = ElementBracket(A, elems)
    N = len(elems)
    if triples is None:
        triples = ((a, b, c) for a in range(N) for b in range(N) for c in range(N))
    for a, b, c in triples:
        rep.checked += 1
        if eb.jacobi(a, b, c):
            rep.failures.append((a, b, c))
    return rep
