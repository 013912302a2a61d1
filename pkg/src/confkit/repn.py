"""gl(1|n) representations, tensor modules Tens(V), twists, duals, W_1 modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Mapping, Sequence

from . import forms as F
from . import polymatrix as pm
from .core import (GradedBasis, LambdaValued, ModuleVector, add_into, fmt_scalar, mono_deriv,
                   mono_mul, mono_str, popcount, scalar, sesqui, mul_lam_plus_d)
from .conformal import (ConformalAlgebra, Report, build_W, build_Vir, cur_basis, m2_residual,
                        vec_apply)

# ---------------------------------------------------------------------------
# GlRep


def idx_parity(i: int) -> int:
    return 0 if i == 0 else 1


@dataclass(eq=False)
class GlRep:
    n: int
    basis: GradedBasis
    E: dict                      # (i, j) -> {(row, col): coeff}; E v_col = sum_row c v_row
    flag: str = "gl"
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.basis)

    def apply(self, i: int, j: int, s: int) -> dict:
        """E_ij v_s as {row: coeff}."""
        return self.E.get((i, j), {}).get(s, {})

    def weight(self, s: int) -> tuple:
        return self.basis.weights[s]

    def matrix(self, i: int, j: int) -> list:
        M = [[0] * self.dim for _ in range(self.dim)]
        for s, col in self.E.get((i, j), {}).items():
            for r, c in col.items():
                M[r][s] = c
        return M


def _mk_E(n: int, dim: int, entry: Callable) -> dict:
    """Build E as {(i,j): {col: {row: c}}} from entry(i, j, col) -> {row: c}."""
    E: dict = {}
    for i in range(n + 1):
        for j in range(n + 1):
            cols = {}
            for s in range(dim):
                col = {r: c for r, c in entry(i, j, s).items() if c}
                if col:
                    cols[s] = col
            E[(i, j)] = cols
    return E


def _compose(V: GlRep, ij, kl, s) -> dict:
    out: dict = {}
    for r, c in V.apply(kl[0], kl[1], s).items():
        for r2, c2 in V.apply(ij[0], ij[1], r).items():
            add_into(out, r2, c * c2)
    return out


def weights_from_diagonal(n: int, dim: int, E: dict) -> tuple | None:
    ws = []
    for s in range(dim):
        w = []
        e00 = E.get((0, 0), {}).get(s, {})
        if any(r != s for r in e00):
            return None
        mu = e00.get(s, 0)
        w.append(mu)
        for i in range(1, n + 1):
            eii = E.get((i, i), {}).get(s, {})
            if any(r != s for r in eii):
                return None
            w.append(mu + eii.get(s, 0))
        ws.append(tuple(w))
    return tuple(ws)


def make_rep(n: int, parities: Sequence[int], E: dict, name: str = "", labels=None, names=None,
             flag: str = "gl") -> GlRep:
    dim = len(parities)
    ws = weights_from_diagonal(n, dim, E)
    if ws is None:
        raise ValueError("representation is not given in a weight basis")
    labels = tuple(labels) if labels is not None else tuple(range(dim))
    B = GradedBasis(labels, tuple(parities), ws, tuple(names) if names else None)
    return GlRep(n, B, E, flag, name)


def validate_glrep(V: GlRep) -> Report:
    rep = Report(f"glrep[{V.name}]")
    n = V.n
    P = V.basis.parities
    for i in range(n + 1):
        for j in range(n + 1):
            pe = idx_parity(i) ^ idx_parity(j)
            for s, col in V.E.get((i, j), {}).items():
                for r in col:
                    if P[r] != P[s] ^ pe:
                        rep.failures.append(("parity", i, j, r, s))
    for i in range(n + 1):
        for j in range(n + 1):
            pij = idx_parity(i) ^ idx_parity(j)
            for k in range(n + 1):
                for l in range(n + 1):
                    pkl = idx_parity(k) ^ idx_parity(l)
                    eps = -1 if pij & pkl else 1
                    for s in range(V.dim):
                        lhs = _compose(V, (i, j), (k, l), s)
                        for r, c in _compose(V, (k, l), (i, j), s).items():
                            add_into(lhs, r, -eps * c)
                        if j == k:
                            for r, c in V.apply(i, l, s).items():
                                add_into(lhs, r, -c)
                        if l == i:
                            for r, c in V.apply(k, j, s).items():
                                add_into(lhs, r, eps * c)
                        rep.checked += 1
                        if lhs:
                            rep.failures.append(("relation", i, j, k, l))
                            break
    ws = weights_from_diagonal(n, V.dim, V.E)
    if V.basis.weights is None or ws != tuple(tuple(w) for w in V.basis.weights):
        rep.failures.append(("weights",))
    return rep


def highest_vectors(V: GlRep) -> list:
    """Basis of common kernel of E_ij, i < j (Borel positive part)."""
    from .linalg import nullspace
    rows: dict = {}
    for i in range(V.n + 1):
        for j in range(i + 1, V.n + 1):
            for s, col in V.E.get((i, j), {}).items():
                for r, c in col.items():
                    rows.setdefault((i, j, r), {})[s] = c
    return nullspace(rows.values(), range(V.dim))


def build_standard(n: int) -> GlRep:
    par = [0] + [1] * n
    E = _mk_E(n, n + 1, lambda i, j, s: {i: 1} if s == j else {})
    return make_rep(n, par, E, f"C^(1|{n})", names=[f"e{i}" for i in range(n + 1)])


def _field_coeffs(n: int, i: int, j: int) -> dict:
    """xi_i d_j with xi_0 = t, d_0 = d_t, as {k: form}."""
    c = F.gen_t(n) if i == 0 else F.gen_xi(n, i)
    return {j: {c: 1}}


def build_forms_const(k: int, n: int) -> GlRep:
    keys = F.basis_forms(n, k, with_xi=False)
    idx = {key: s for s, key in enumerate(keys)}

    def entry(i, j, s):
        pX = idx_parity(i) ^ idx_parity(j)
        out = F.lie_derivative(_field_coeffs(n, i, j), pX, {keys[s]: 1}, n)
        return {idx[key]: c for key, c in out.items()}
    E = _mk_E(n, len(keys), entry)
    return make_rep(n, [F.key_parity(key) for key in keys], E, f"Omega^{k}_c(n={n})",
                    labels=keys, names=[F.form_str(key) for key in keys])


def build_dual_rep(V: GlRep) -> GlRep:
    P = V.basis.parities

    def entry(i, j, s):
        pE = idx_parity(i) ^ idx_parity(j)
        out: dict = {}
        # E phi_s = sum_r -(-1)^{pE p_s} E[s][r] phi_r
        sg = -1 if pE & P[s] else 1
        for r, col in V.E.get((i, j), {}).items():
            c = col.get(s)
            if c:
                out[r] = -sg * c
        return out
    E = _mk_E(V.n, V.dim, entry)
    names = [f"{V.basis.name(s)}*" for s in range(V.dim)]
    return make_rep(V.n, P, E, f"({V.name})*", labels=[("*", l) for l in V.basis.labels], names=names,
                    flag=V.flag)


def build_theta(k: int, n: int) -> GlRep:
    V = build_dual_rep(build_forms_const(k, n))
    V.name = f"Theta^{k}_c(n={n})"
    return V


def build_bar_forms(k: int, n: int) -> GlRep:
    """t^{-1} xi_* Omega^k_c inside Omega_-, action with non-negative t-powers dropped."""
    star = (1 << n) - 1
    consts = F.basis_forms(n, k, with_xi=False)
    keys = [(-1, star, e, beta) for (_, _, e, beta) in consts]
    idx = {key: s for s, key in enumerate(keys)}

    def entry(i, j, s):
        pX = idx_parity(i) ^ idx_parity(j)
        out = F.lie_derivative(_field_coeffs(n, i, j), pX, {keys[s]: 1}, n)
        res = {}
        for key, c in out.items():
            if key[0] >= 0:
                continue
            if key not in idx:
                raise AssertionError(f"bar form action leaves the span: {key}")
            res[idx[key]] = c
        return res
    E = _mk_E(n, len(keys), entry)
    return make_rep(n, [F.key_parity(key) for key in keys], E, f"barOmega^{k}_c(n={n})",
                    labels=keys, names=[F.form_str(key) for key in keys])


def sl_extend(n: int, parities: Sequence[int], E_sl: dict, central=0, name: str = "") -> GlRep:
    """Extend an sl(1|n) action (E_ij, i != j, and H_i = E_00 + E_ii) to gl(1|n).

    The identity matrix, which is central and not in sl(1|n) for n >= 2,
    acts by the given scalar; the S-type algebras never see this choice.
    """
    if n < 2:
        raise ValueError("sl(1|n) extension needs n >= 2")
    dim = len(parities)
    H = {i: E_sl.get(("H", i), {}) for i in range(1, n + 1)}
    c = scalar(central)

    def diag_E00(s):
        out: dict = {}
        for i in range(1, n + 1):
            for r, v in H[i].get(s, {}).items():
                add_into(out, r, Fraction(v, n - 1))
        if c:
            add_into(out, s, -Fraction(c) / (n - 1))
        return out

    def entry(i, j, s):
        if i != j:
            return dict(E_sl.get((i, j), {}).get(s, {}))
        e00 = diag_E00(s)
        if i == 0:
            return e00
        out = dict(H[i].get(s, {}))
        for r, v in e00.items():
            add_into(out, r, -v)
        return out
    E = _mk_E(n, dim, entry)
    rep = make_rep(n, parities, E, name or "sl-rep", flag="sl")
    return rep


def sl_weight(w: tuple) -> tuple:
    return tuple(w[1:])


# JSON user reps: {n, dim, parities, weights, E: {"i,j": [[...]]}, flag?}
def glrep_from_json(data: Mapping) -> GlRep:
    n = int(data["n"])
    dim = int(data["dim"])
    par = [int(p) for p in data["parities"]]
    if len(par) != dim:
        raise ValueError("parities length != dim")
    flag = data.get("flag", "gl")
    mats: dict = {}
    for key, M in data["E"].items():
        i, j = (int(x) for x in key.split(","))
        if len(M) != dim or any(len(r) != dim for r in M):
            raise ValueError(f"E_{key} has wrong shape")
        cols: dict = {}
        for r in range(dim):
            for s in range(dim):
                v = scalar(str(M[r][s]))
                if v:
                    cols.setdefault(s, {})[r] = v
        mats[(i, j)] = cols
    if flag == "sl":
        E_sl = {k: v for k, v in mats.items() if k[0] != k[1]}
        for i in range(1, n + 1):
            if (0, 0) in mats and (i, i) in mats:
                h: dict = {}
                for src in ((0, 0), (i, i)):
                    for s, col in mats[src].items():
                        for r, v in col.items():
                            add_into(h.setdefault(s, {}), r, v)
                E_sl[("H", i)] = h
            else:
                E_sl[("H", i)] = mats.get(("H", i), {})
        V = sl_extend(n, par, E_sl, name="user")
    else:
        E = {(i, j): mats.get((i, j), {}) for i in range(n + 1) for j in range(n + 1)}
        V = make_rep(n, par, E, "user")
    if "weights" in data:
        given = tuple(tuple(scalar(str(x)) for x in w) for w in data["weights"])
        mine = V.basis.weights if flag != "sl" else tuple(sl_weight(w) for w in V.basis.weights)
        if given != tuple(mine):
            raise ValueError("weight tags do not match the diagonal action")
    return V


# ---------------------------------------------------------------------------
# conformal modules


@dataclass(eq=False)
class ConformalModule:
    algebra: ConformalAlgebra
    basis: GradedBasis
    table_fn: Callable               # (g, b) -> LambdaValued dict
    name: str = ""
    trivial: tuple = ()              # indices spanning the subspace F (for singular vectors)
    twist: object = 0
    rep: GlRep | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def table(self, g: int, b: int) -> dict:
        key = (g, b)
        r = self._cache.get(key)
        if r is None:
            r = self.table_fn(g, b)
            self._cache[key] = r
        return r

    @property
    def rank(self) -> int:
        return len(self.basis)

    def act_raw(self, g: int, m: Mapping) -> dict:
        """g_lam m for a generator g and ModuleVector dict m."""
        out: dict = {}
        for (k, b), c in m.items():
            t = self.table(g, b)
            if t:
                mul_lam_plus_d(t, k, out, c)
        return out

    def act(self, x: ModuleVector, m: ModuleVector) -> LambdaValued:
        return LambdaValued(sesqui(self.table, x.terms, m.terms), self.basis)

    def vec(self, b, k: int = 0, coeff=1) -> ModuleVector:
        return ModuleVector.gen(self.basis, b, k, coeff)

    def full_table(self) -> dict:
        return {(g, b): self.table(g, b) for g in range(self.algebra.rank) for b in range(self.rank)}


def from_table(A: ConformalAlgebra, basis: GradedBasis, table: Mapping, name="", trivial=()) -> ConformalModule:
    tab = {k: v for k, v in table.items()}
    return ConformalModule(A, basis, lambda g, b: tab.get((g, b), {}), name, tuple(trivial))


def check_module_axioms(M: ConformalModule, pairs=None, vectors=None) -> Report:
    """(M1) holds by the extension rule; (M2) checked on generator pairs and basis vectors."""
    A = M.algebra
    rep = Report(f"module[{M.name}]")
    rep.info["M1"] = "by construction"
    gens = range(A.rank)
    pairs = pairs if pairs is not None else [(a, b) for a in gens for b in gens]
    vectors = vectors if vectors is not None else range(M.rank)
    for a, b in pairs:
        pa, pb = A.parity(a), A.parity(b)
        for v in vectors:
            rep.checked += 1
            if m2_residual(A.tab, M.table, pa, pb, a, b, v):
                rep.failures.append((a, b, v))
    return rep


# ---------------------------------------------------------------------------
# Tens(V)


def tens_basis(V: GlRep) -> GradedBasis:
    C = cur_basis(V.n)
    labels, pars, names = [], [], []
    for I in C.labels:
        for s in range(V.dim):
            labels.append((I, s))
            pars.append((popcount(I) + V.basis.parities[s]) & 1)
            names.append(f"{mono_str(I)}⊗{V.basis.name(s)}")
    return GradedBasis(tuple(labels), tuple(pars), names=tuple(names))


def tens(V: GlRep, A: ConformalAlgebra | None = None) -> ConformalModule:
    n = V.n
    A = A or build_W(n)
    if A.n != n:
        raise ValueError("algebra and representation have different n")
    B = tens_basis(V)
    idx = B.index

    def tab(g: int, b: int) -> dict:
        lab = A.basis.labels[g]
        I, s = B.labels[b]
        pg = popcount(I) & 1
        out: dict = {}
        if lab[0] == "vec":
            J, j = lab[1], lab[2]
            pa = A.parity(g)
            sg, K = vec_apply(J, j, I)          # a(g) ⊗ v
            if sg:
                add_into(out, (0, 0, idx[(K, s)]), sg)
            # (-1)^{p(a)} sum_i (d_i f_j) g ⊗ (E_ij - delta_ij) v, with f_j = xi_J
            for i in range(1, n + 1):
                s1, J2 = mono_deriv(i, J)
                if not s1:
                    continue
                s2 = mono_mul(J2, I)
                if not s2:
                    continue
                c0 = s1 * s2 * (-1 if pa else 1)
                for r, c in V.apply(i, j, s).items():
                    add_into(out, (0, 0, idx[(J2 | I, r)]), c0 * c)
                if i == j:
                    add_into(out, (0, 0, idx[(J2 | I, s)]), -c0)
            # -lam (-1)^{p(g)} f_j g ⊗ E_0j v
            s3 = mono_mul(J, I)
            if s3:
                c0 = -s3 * (-1 if pg else 1)
                for r, c in V.apply(0, j, s).items():
                    add_into(out, (1, 0, idx[(J | I, r)]), c0 * c)
        else:
            J = lab[1]
            s0 = mono_mul(J, I)
            if s0:
                add_into(out, (0, 1, idx[(J | I, s)]), -s0)       # -d (fg ⊗ v)
                for r, c in V.apply(0, 0, s).items():              # lam fg ⊗ E_00 v
                    add_into(out, (1, 0, idx[(J | I, r)]), s0 * c)
            # (-1)^{p(fg)} sum_i (d_i f) g ⊗ E_i0 v
            pfg = (popcount(J) + popcount(I)) & 1
            for i in range(1, n + 1):
                s1, J2 = mono_deriv(i, J)
                if not s1:
                    continue
                s2 = mono_mul(J2, I)
                if not s2:
                    continue
                c0 = s1 * s2 * (-1 if pfg else 1)
                for r, c in V.apply(i, 0, s).items():
                    add_into(out, (0, 0, idx[(J2 | I, r)]), c0 * c)
        return out

    star = (1 << n) - 1
    trivial = tuple(idx[(star, s)] for s in range(V.dim))
    return ConformalModule(A, B, tab, f"Tens({V.name})", trivial, 0, V)


def tens_basis_weight(M: ConformalModule, b: int, k: int = 0) -> tuple:
    """Predicted weight of d^k xi_I ⊗ v_s: (mu - k; lam_i - k + [i in I] - 1)."""
    I, s = M.basis.labels[b]
    w = M.rep.weight(s)
    out = [w[0] - k]
    for i in range(1, M.rep.n + 1):
        out.append(w[i] - k + (1 if I >> (i - 1) & 1 else 0) - 1)
    return tuple(out)


# ---------------------------------------------------------------------------
# twist, dual, transpose


def twist_values(terms: Mapping, alpha) -> dict:
    """Replace d by d + alpha in a LambdaValued dict."""
    if not alpha:
        return dict(terms)
    out: dict = {}
    for (j, k, b), c in terms.items():
        for r in range(k + 1):
            add_into(out, (j, r, b), c * comb(k, r) * alpha ** (k - r))
    return out


def twist(M: ConformalModule, alpha) -> ConformalModule:
    alpha = scalar(alpha)
    base = M.table
    return ConformalModule(M.algebra, M.basis, lambda g, b: twist_values(base(g, b), alpha),
                           f"{M.name}[α={fmt_scalar(alpha)}]", M.trivial, M.twist + alpha, M.rep)


def conformal_dual(M: ConformalModule, signed: bool = True) -> ConformalModule:
    """a_lam m_i^* = -s sum_j P_ji(lam, -d-lam) m_j^*, s = (-1)^{p(a)(p(m_i)+1)} when signed."""
    A = M.algebra
    P = M.basis.parities
    B = GradedBasis(tuple(("*", l) for l in M.basis.labels), P,
                    names=tuple(f"{M.basis.name(i)}*" for i in range(M.rank)))
    cache: dict = {}

    def build(g: int):
        pa = A.parity(g)
        rows: dict = {}
        for j in range(M.rank):
            for (p, q, i), c in M.table(g, j).items():
                s = -1 if (signed and pa and not P[i]) else 1
                out = rows.setdefault(i, {})
                base = -s * c * (-1 if q & 1 else 1)
                for r in range(q + 1):
                    add_into(out, (p + r, q - r, j), base * comb(q, r))
        cache[g] = rows

    def tab(g: int, i: int) -> dict:
        if g not in cache:
            build(g)
        return cache[g].get(i, {})
    tag = "*" if signed else "*u"
    return ConformalModule(A, B, tab, f"({M.name}){tag}", (), M.twist, None)


def action_matrix(M: ConformalModule, g: int) -> dict:
    return {b: M.table(g, b) for b in range(M.rank)}


def double_dual_matches(M: ConformalModule, signed: bool = True) -> dict:
    """Compare actions on M** and M under m_i -> m_i** and m_i -> (-1)^{p(m_i)} m_i**."""
    DD = conformal_dual(conformal_dual(M, signed), signed)
    P = M.basis.parities
    plain = True
    graded = True
    for g in range(M.algebra.rank):
        for i in range(M.rank):
            orig = M.table(g, i)
            dd = DD.table(g, i)
            if orig != dd:
                plain = False
            sig = {key: c * (-1 if (P[i] ^ P[key[2]]) else 1) for key, c in dd.items()}
            if orig != sig:
                graded = False
    return {"plain": plain, "graded": graded}


@dataclass(eq=False)
class ModuleMorphism:
    source: ConformalModule
    target: ConformalModule
    matrix: pm.PolyMatrix      # rows: source basis j, cols: target basis k; T(m_j) = sum_k T_jk(d) n_k
    parity: int = 0

    def apply_raw(self, m: Mapping) -> dict:
        out: dict = {}
        for (k, j), c in m.items():
            for t, poly in enumerate(self.matrix.rows[j]):
                for e, v in enumerate(poly):
                    if v:
                        add_into(out, (k + e, t), c * v)
        return out

    def apply_lv(self, lv: Mapping) -> dict:
        out: dict = {}
        for (l, k, j), c in lv.items():
            for (kk, t), v in self.apply_raw({(k, j): c}).items():
                add_into(out, (l, kk, t), v)
        return out

    def map_matrix(self) -> pm.PolyMatrix:
        """Matrix acting on coordinate columns (target x source)."""
        m, n = self.matrix.shape
        return pm.PolyMatrix([[self.matrix.rows[j][k] for j in range(m)] for k in range(n)])


def check_morphism(T: ModuleMorphism) -> Report:
    rep = Report("morphism")
    A = T.source.algebra
    for g in range(A.rank):
        for j in range(T.source.rank):
            lhs = T.apply_lv(T.source.table(g, j))
            rhs = T.target.act_raw(g, T.apply_raw({(0, j): 1}))
            rep.checked += 1
            if lhs != rhs:
                rep.failures.append((g, j))
    return rep


def transpose(T: ModuleMorphism, signed: bool = True) -> ModuleMorphism:
    """T^*: N^* -> M^*,  T^*(n_i^*) = -sum_j T_ji(-d) m_j^*."""
    Ms, Ns = conformal_dual(T.source, signed), conformal_dual(T.target, signed)
    m, n = T.matrix.shape
    rows = [[pm.pneg(pm.peval_neg(T.matrix.rows[j][i])) for j in range(m)] for i in range(n)]
    return ModuleMorphism(Ns, Ms, pm.PolyMatrix(rows), T.parity)


def is_surjective(T: ModuleMorphism) -> bool:
    ki = pm.kernel_image(T.map_matrix())
    return ki.cokernel_free_rank == 0 and not ki.cokernel_torsion


def cokernel_diag(T: ModuleMorphism) -> list:
    ki = pm.kernel_image(T.map_matrix())
    return ki.cokernel_torsion + [pm.ZERO] * ki.cokernel_free_rank


# ---------------------------------------------------------------------------
# Virasoro modules of the transpose counterexample


def vir_module(kind: int, alpha=0) -> ConformalModule:
    """O_0: L_lam m = (lam + d) m;  O_1: L_lam n = d n."""
    A = build_Vir()
    nm = "m" if kind == 0 else "n"
    B = GradedBasis((nm,), (0,), names=(nm,))
    t = {(1, 0, 0): 1, (0, 1, 0): 1} if kind == 0 else {(0, 1, 0): 1}
    M = from_table(A, B, {(0, 0): t}, f"O_{kind}")
    return twist(M, alpha) if alpha else M


def rm22_map() -> ModuleMorphism:
    return ModuleMorphism(vir_module(0), vir_module(1), pm.PolyMatrix([[pm.D]]))


# ---------------------------------------------------------------------------
# W_1 family


W1_GENS = {"1": ("fun", 0), "xi": ("fun", 1), "d1": ("vec", 0, 1), "xid1": ("vec", 1, 1)}


def _w1_module(a, b, table_spec: dict, labels, parities, name, trivial=()) -> ConformalModule:
    W = build_W(1)
    B = GradedBasis(tuple(labels), tuple(parities), names=tuple(labels))
    tab: dict = {}
    for (g, v), terms in table_spec.items():
        out: dict = {}
        for (j, k, w), c in terms:
            add_into(out, (j, k, B.index[w]), c)
        tab[(W.basis.index[W1_GENS[g]], B.index[v])] = out
    return from_table(W, B, tab, name, tuple(B.index[t] for t in trivial))


def build_M_ab(a, b) -> ConformalModule:
    a, b = scalar(a), scalar(b)
    s = a + b
    T = {
        ("1", "v0"): [((1, 0, "v0"), a), ((0, 1, "v0"), -1)],
        ("1", "v1"): [((1, 0, "v1"), a - 1), ((0, 1, "v1"), -1)],
        ("1", "w1"): [((1, 0, "w1"), a), ((0, 1, "w1"), -1)],
        ("1", "w0"): [((1, 0, "w0"), a - 1), ((0, 1, "w0"), -1)],
        ("xi", "v0"): [((0, 0, "v1"), 1)],
        ("xi", "v1"): [],
        ("xi", "w1"): [((1, 0, "v0"), a), ((0, 1, "v0"), -1), ((0, 0, "w0"), -1)],
        ("xi", "w0"): [((1, 0, "v1"), a - 1), ((0, 1, "v1"), -1)],
        ("d1", "v0"): [((0, 0, "w1"), 1)],
        ("d1", "v1"): [((1, 0, "v0"), s), ((0, 0, "w0"), 1)],
        ("d1", "w1"): [],
        ("d1", "w0"): [((1, 0, "w1"), -s)],
        ("xid1", "v0"): [((0, 0, "v0"), b)],
        ("xid1", "v1"): [((0, 0, "v1"), b + 1)],
        ("xid1", "w1"): [((0, 0, "w1"), b - 1)],
        ("xid1", "w0"): [((1, 0, "v0"), -s), ((0, 0, "w0"), b)],
    }
    return _w1_module(a, b, T, ["v0", "v1", "w1", "w0"], [0, 1, 1, 0],
                      f"M({fmt_scalar(a)},{fmt_scalar(b)})", trivial=("v0", "v1"))


def build_submodule_N(b) -> ModuleMorphism:
    """N = C[d] w1 ⊕ C[d](d v0 + w0) inside M(0, b), with the induced action."""
    M = build_M_ab(0, b)
    rows = [[pm.ZERO, pm.ZERO, pm.ONE, pm.ZERO],          # n1 = w1
            [pm.D, pm.ZERO, pm.ZERO, pm.ONE]]             # n2 = d v0 + w0
    # express g_lam n_i in the n-basis
    W = M.algebra
    B = GradedBasis(("n1", "n2"), (1, 0), names=("n1", "n2"))
    gens = [ModuleVector({(0, 2): 1}, M.basis), ModuleVector({(1, 0): 1, (0, 3): 1}, M.basis)]
    tab: dict = {}
    for g in range(W.rank):
        for i, x in enumerate(gens):
            out: dict = {}
            lv = M.act(ModuleVector({(0, g): 1}, W.basis), x)
            for j in range(lv.lam_degree() + 1):
                coeffs = _coords_in(lv.coefficient(j), rows, M.rank)
                if coeffs is None:
                    raise AssertionError("N is not closed under the action")
                for t, poly in enumerate(coeffs):
                    for e, c in enumerate(poly):
                        add_into(out, (j, e, t), c)
            tab[(g, i)] = out
    N = from_table(W, B, tab, f"N⊂M(0,{fmt_scalar(scalar(b))})")
    T = ModuleMorphism(N, M, pm.PolyMatrix(rows))
    return T


def _coords_in(v: ModuleVector, rows: list, dim: int):
    """Solve v = sum_i c_i(d) rows[i] when the rows have distinct unit pivots (upper form)."""
    target = pm.vec_to_polys(v, dim)
    # pivots: the unit entries of the rows
    coeffs = [pm.ZERO] * len(rows)
    r = list(target)
    for i, row in enumerate(rows):
        piv = next(c for c, e in enumerate(row) if e == pm.ONE)
        q = r[piv]
        coeffs[i] = q
        r = [pm.psub(x, pm.pmul(q, y)) for x, y in zip(r, row)]
    return coeffs if not any(r) else None


def build_L0b(b) -> ConformalModule:
    b = scalar(b)
    T = {
        ("1", "v0"): [((0, 1, "v0"), -1)],
        ("1", "v1"): [((1, 0, "v1"), -1), ((0, 1, "v1"), -1)],
        ("xi", "v0"): [((0, 0, "v1"), 1)],
        ("xi", "v1"): [],
        ("d1", "v0"): [],
        ("d1", "v1"): [((1, 0, "v0"), b), ((0, 1, "v0"), -1)],
        ("xid1", "v0"): [((0, 0, "v0"), b)],
        ("xid1", "v1"): [((0, 0, "v1"), b + 1)],
    }
    return _w1_module(0, b, T, ["v0", "v1"], [0, 1], f"L(0,{fmt_scalar(b)})", trivial=("v0", "v1"))


def build_La_minus_a(a) -> ConformalModule:
    a = scalar(a)
    T = {
        ("1", "v0"): [((1, 0, "v0"), a), ((0, 1, "v0"), -1)],
        ("1", "w1"): [((1, 0, "w1"), a), ((0, 1, "w1"), -1)],
        ("xi", "v0"): [],
        ("xi", "w1"): [((1, 0, "v0"), a), ((0, 1, "v0"), -1)],
        ("d1", "v0"): [((0, 0, "w1"), 1)],
        ("d1", "w1"): [],
        ("xid1", "v0"): [((0, 0, "v0"), -a)],
        ("xid1", "w1"): [((0, 0, "w1"), -a - 1)],
    }
    return _w1_module(a, -a, T, ["v0", "w1"], [0, 1], f"M({fmt_scalar(a)},{fmt_scalar(-a)})", trivial=("v0",))


def quotient_L0b_from_M(b) -> ConformalModule:
    """L(0,b) computed as M(0,b)/N by reducing w1 -> 0 and w0 -> -d v0."""
    M = build_M_ab(0, b)
    B = GradedBasis(("v0", "v1"), (0, 1), names=("v0", "v1"))
    red = {0: {(0, 0): 1}, 1: {(0, 1): 1}, 2: {}, 3: {(1, 0): -1}}
    tab: dict = {}
    for g in range(M.algebra.rank):
        for i, src in ((0, 0), (1, 1)):
            out: dict = {}
            for (j, k, w), c in M.table(g, src).items():
                for (kk, t), v in red[w].items():
                    add_into(out, (j, k + kk, t), c * v)
            tab[(g, i)] = out
    return from_table(M.algebra, B, tab, f"M(0,{fmt_scalar(scalar(b))})/N", (0, 1))


def cl_params(Delta, Lam) -> tuple:
    Delta, Lam = scalar(Delta), scalar(Lam)
    a = -Delta - Fraction(Lam) / 2
    return scalar(a), Lam


def k2_L_image() -> ModuleVector:
    """Image of L under K_2 -> W_1: -1 + (1/2) d (xi d_1)."""
    W = build_W(1)
    return ModuleVector({(0, W.basis.index[("fun", 0)]): -1,
                         (1, W.basis.index[("vec", 1, 1)]): Fraction(1, 2)}, W.basis)
