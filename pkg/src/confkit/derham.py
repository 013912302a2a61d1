"""The conformal de Rham complex Cur(Omega(n) + Omega(n) dt) and Laurent forms.

Module elements are ModuleVector dicts {(k, b): c} over the basis of form
keys (0, I, e, beta) of differential degree <= jmax; b indexes that basis.
The W_n action (Lie derivative), the contraction and the differential
are all C[d]-sesquilinear extensions of their values on basis forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from . import polymatrix as pm
from .conformal import ConformalAlgebra, Report, build_W
from .core import GradedBasis, add_into, popcount
from .forms import (basis_forms, contraction, de_rham, fmul, form_str, gen_dt, gen_xi,
                    key_degree, key_parity, lie_derivative, monomial)
from .linalg import RowReducer, span_basis
from .repn import ConformalModule, check_module_axioms


@dataclass
class FormsComplex:
    n: int
    jmax: int
    basis: GradedBasis
    keys: list
    index: dict
    W: ConformalAlgebra

    def degree_block(self, j: int) -> list:
        return [b for b, key in enumerate(self.keys) if key_degree(key) == j]

    def vec(self, form: Mapping) -> dict:
        """Form dict (keys with a = 0) -> ModuleVector dict at d-power 0."""
        return {(0, self.index[k]): c for k, c in form.items()}


@lru_cache(maxsize=None)
def forms_complex(n: int, jmax: int) -> FormsComplex:
    keys = []
    for j in range(jmax + 2):
        keys += basis_forms(n, j)
    names = [form_str(k) for k in keys]
    basis = GradedBasis(keys, [key_parity(k) for k in keys], names=names)
    return FormsComplex(n, jmax, basis, keys, {k: i for i, k in enumerate(keys)}, build_W(n))


# ---------------------------------------------------------------------------
# differential


def _dt_times(form: Mapping, n: int) -> dict:
    return fmul(form, {gen_dt(n): 1})


def tilde_d_basis(C: FormsComplex, b: int) -> dict:
    """d~(w1 + w2 dt) = dw1 + (dw2) dt - (-1)^p(w1) d(w1 dt)."""
    key = C.keys[b]
    n = C.n
    out: dict = {}
    for k2, c in de_rham({key: 1}, n).items():
        add_into(out, (0, C.index[k2]), c)
    if not key[2]:
        sg = -1 if key_parity(key) else 1
        for k2, c in _dt_times({key: 1}, n).items():
            add_into(out, (1, C.index[k2]), -sg * c)
    return out


def tilde_d(C: FormsComplex, m: Mapping) -> dict:
    out: dict = {}
    for (k, b), c in m.items():
        for (k2, b2), v in tilde_d_basis(C, b).items():
            add_into(out, (k + k2, b2), c * v)
    return out


def tilde_d_lv(C: FormsComplex, lv: Mapping) -> dict:
    """d~ applied coefficientwise to a lam-valued dict {(j, k, b): c}."""
    out: dict = {}
    for (j, k, b), c in lv.items():
        for (k2, b2), v in tilde_d_basis(C, b).items():
            add_into(out, (j, k + k2, b2), c * v)
    return out


# ---------------------------------------------------------------------------
# W_n action and contraction


def _gen_field(A: ConformalAlgebra, g: int, n: int) -> tuple[dict, int, bool]:
    lab = A.basis.labels[g]
    f = {monomial(n, I=lab[1]): 1}
    if lab[0] == "vec":
        return {lab[2]: f}, A.parity(g), False
    return {0: f}, A.parity(g), True


def _lie_table(C: FormsComplex, g: int, b: int, printed: bool = False) -> dict:
    n = C.n
    coeffs, p, is_fun = _gen_field(C.W, g, n)
    key = C.keys[b]
    out: dict = {}
    if not is_fun:
        for k2, c in lie_derivative(coeffs, p, {key: 1}, n).items():
            add_into(out, (0, 0, C.index[k2]), c)
        if not printed:
            # the field is a * delta(z - t); d(delta) contributes lam dt iota_a
            iw = contraction(coeffs, p, {key: 1}, n)
            for k2, c in fmul({gen_dt(n): 1}, iw).items():
                add_into(out, (1, 0, C.index[k2]), c)
        return out
    f = coeffs[0]
    if not key[2]:
        # -(d + lam)(f w)
        for k2, c in fmul(f, {key: 1}).items():
            add_into(out, (1, 0, C.index[k2]), -c)
            add_into(out, (0, 1, C.index[k2]), -c)
        return out
    w = {(key[0], key[1], 0, key[3]): 1}
    sg = -1 if (p + key_parity((key[0], key[1], 0, key[3]))) & 1 else 1
    for k2, c in fmul(de_rham(f, n), w).items():
        add_into(out, (0, 0, C.index[k2]), sg * c)
    for k2, c in fmul(f, {key: 1}).items():
        add_into(out, (0, 1, C.index[k2]), -c)
    return out


def lie_module(n: int, jmax: int, printed: bool = False) -> ConformalModule:
    """W_n acting on Omega_n.  printed=True drops the lam dt iota_a term (fails (M2) for n >= 1)."""
    C = forms_complex(n, jmax)
    return ConformalModule(C.W, C.basis, lambda g, b: _lie_table(C, g, b, printed), f"Omega_{n}")


def iota_module(n: int, jmax: int, signs=(1, 1)) -> ConformalModule:
    """Contraction as a lam-free table; signs = (vector part, function part)."""
    C = forms_complex(n, jmax)

    def tab(g, b):
        coeffs, p, is_fun = _gen_field(C.W, g, n)
        s = signs[1] if is_fun else signs[0]
        return {(0, 0, C.index[k]): s * c for k, c in contraction(coeffs, p, {C.keys[b]: 1}, n).items()}
    return ConformalModule(C.W, C.basis, tab, f"iota_{n}")


def _lv_add(a: dict, b: Mapping, s=1) -> dict:
    for k, v in b.items():
        add_into(a, k, s * v)
    return a


def cartan_identity(n: int, jmax: int, signs=(1, 1)) -> Report:
    """L~_D = d~ iota_D + (-1)^p(D) iota_D d~ on every basis form of degree <= jmax."""
    C = forms_complex(n, jmax)
    L, I = lie_module(n, jmax), iota_module(n, jmax, signs)
    rep = Report(f"cartan[n={n},signs={signs}]")
    for g in range(C.W.rank):
        p = C.W.parity(g)
        for j in range(jmax + 1):
            for b in C.degree_block(j):
                rep.checked += 1
                lhs = dict(L.table(g, b))
                _lv_add(lhs, tilde_d_lv(C, I.table(g, b)), -1)
                _lv_add(lhs, I.act_raw(g, tilde_d_basis(C, b)), 1 if p else -1)
                if lhs:
                    rep.failures.append((C.W.basis.name(g), form_str(C.keys[b])))
    return rep


def pin_iota(n: int, jmax: int) -> tuple:
    """The unique sign choice for which the Cartan identity holds."""
    good = [s for s in ((1, 1), (1, -1), (-1, 1), (-1, -1)) if cartan_identity(n, jmax, s).ok]
    if len(good) != 1:
        raise ValueError(f"contraction sign not pinned: {good}")
    return good[0]


def d_squared(n: int, jmax: int) -> Report:
    C = forms_complex(n, jmax)
    rep = Report(f"d~^2[n={n}]")
    for j in range(jmax):
        for b in C.degree_block(j):
            rep.checked += 1
            if tilde_d(C, tilde_d_basis(C, b)):
                rep.failures.append(form_str(C.keys[b]))
    return rep


def lie_commutes_d(n: int, jmax: int) -> Report:
    """L~_D d~ = (-1)^p(D) d~ L~_D."""
    C = forms_complex(n, jmax)
    L = lie_module(n, jmax)
    rep = Report(f"L~d~[n={n}]")
    for g in range(C.W.rank):
        sg = -1 if C.W.parity(g) else 1
        for j in range(jmax):
            for b in C.degree_block(j):
                rep.checked += 1
                lhs = L.act_raw(g, tilde_d_basis(C, b))
                _lv_add(lhs, tilde_d_lv(C, L.table(g, b)), -sg)
                if lhs:
                    rep.failures.append((C.W.basis.name(g), form_str(C.keys[b])))
    return rep


def iota_anticommute(n: int, jmax: int, signs=(1, 1)) -> dict:
    """Test iota_1 iota_2 + eps iota_2 iota_1 = 0 for both candidate signs eps."""
    C = forms_complex(n, jmax)
    I = iota_module(n, jmax, signs)
    W = C.W
    cands = {"-(-1)^((p1+1)(p2+1))": lambda p1, p2: -(-1) ** ((p1 + 1) * (p2 + 1)),
             "(-1)^(p1 p2)": lambda p1, p2: (-1) ** (p1 * p2)}
    res = {}
    for name, eps in cands.items():
        ok = True
        for g1 in range(W.rank):
            for g2 in range(W.rank):
                e = eps(W.parity(g1), W.parity(g2))
                for j in range(jmax + 1):
                    for b in C.degree_block(j):
                        x = {(k, bb): c for (_, k, bb), c in I.table(g2, b).items()}
                        y = {(k, bb): c for (_, k, bb), c in I.table(g1, b).items()}
                        lhs = I.act_raw(g1, x)
                        _lv_add(lhs, I.act_raw(g2, y), e)
                        if lhs:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        res[name] = ok
    return res


def lie_module_axioms(n: int, jmax: int, printed: bool = False) -> Report:
    C = forms_complex(n, jmax)
    vecs = [b for b, k in enumerate(C.keys) if key_degree(k) <= jmax]
    return check_module_axioms(lie_module(n, jmax, printed), vectors=vecs)


# ---------------------------------------------------------------------------
# homotopy operator


def K_basis(C: FormsComplex, b: int) -> dict:
    """K(dxi_n w) = xi_n w, K(w) = 0 if w has no dxi_n."""
    n = C.n
    a, I, e, beta = C.keys[b]
    if not beta[n - 1]:
        return {}
    nb = list(beta)
    nb[n - 1] -= 1
    rest = {(a, I, e, tuple(nb)): 1}
    return {(0, C.index[k]): c for k, c in fmul({gen_xi(n, n): 1}, rest).items()}


def eps_basis(C: FormsComplex, b: int) -> dict:
    a, I, e, beta = C.keys[b]
    n = C.n
    if beta[n - 1] or I >> (n - 1) & 1:
        return {}
    return {(0, b): 1}


def _linear(C, fn, m):
    out: dict = {}
    for (k, b), c in m.items():
        for (k2, b2), v in fn(C, b).items():
            add_into(out, (k + k2, b2), c * v)
    return out


def homotopy_check(n: int, jmax: int) -> Report:
    """K d~ + d~ K = 1 - eps on every basis form of degree <= jmax."""
    C = forms_complex(n, jmax)
    rep = Report(f"homotopy[n={n}]")
    for j in range(jmax + 1):
        for b in C.degree_block(j):
            rep.checked += 1
            lhs = _linear(C, K_basis, tilde_d_basis(C, b))
            _lv_add(lhs, tilde_d(C, K_basis(C, b)))
            _lv_add(lhs, {(0, b): 1}, -1)
            _lv_add(lhs, eps_basis(C, b))
            if lhs:
                rep.failures.append(form_str(C.keys[b]))
    return rep


# ---------------------------------------------------------------------------
# exactness via Smith normal form


def d_matrix(C: FormsComplex, j: int) -> tuple[pm.PolyMatrix, list, list]:
    """Matrix of d~: Omega^j -> Omega^{j+1} over Q[d] (rows = target)."""
    src, tgt = C.degree_block(j), C.degree_block(j + 1)
    pos = {b: i for i, b in enumerate(tgt)}
    rows = [[pm.ZERO for _ in src] for _ in tgt]
    for c, b in enumerate(src):
        for (k, b2), v in tilde_d_basis(C, b).items():
            r = pos[b2]
            poly = list(rows[r][c]) + [0] * (k + 1)
            poly[k] += v
            rows[r][c] = pm.ptrim(poly)
    return pm.PolyMatrix(rows), src, tgt


@dataclass
class Cohomology:
    j: int
    kernel_rank: int
    image_rank: int
    torsion: list           # non-unit invariant factors of d~_{j-1}

    @property
    def exact(self) -> bool:
        return self.kernel_rank == self.image_rank and not self.torsion


def cohomology(n: int, j: int) -> Cohomology:
    """ker d~_j / im d~_{j-1}.

    The kernel is saturated, so when the ranks agree the quotient is the
    torsion of coker d~_{j-1}, read off its invariant factors.
    """
    C = forms_complex(n, max(j, 1))
    Mj, src, _ = d_matrix(C, j)
    rk = pm.smith(Mj).rank
    kr = len(src) - rk
    if j == 0:
        return Cohomology(0, kr, 0, [])
    Mp, _, _ = d_matrix(C, j - 1)
    s = pm.smith(Mp)
    tors = [d for d in s.diag[:s.rank] if pm.pdeg(d) > 0]
    return Cohomology(j, kr, s.rank, tors)


def dt_class(n: int) -> dict:
    """dt is closed, not exact, and d * dt is exact."""
    C = forms_complex(n, 1)
    M0, src, tgt = d_matrix(C, 0)
    dt = C.index[gen_dt(n)]
    herm = pm.hermite([M0.column(c) for c in range(len(src))], len(tgt))
    e = [pm.ZERO] * len(tgt)
    e[tgt.index(dt)] = pm.ONE
    de = list(e)
    de[tgt.index(dt)] = pm.D
    return {"closed": not tilde_d_basis(C, dt), "exact": pm.in_submodule(e, herm),
            "d_dt_exact": pm.in_submodule(de, herm)}


# ---------------------------------------------------------------------------
# Laurent side: Omega^k_- with t-powers in [-T, -1]


def laurent_basis(n: int, k: int, T: int) -> list:
    out = []
    for key in basis_forms(n, k):
        for a in range(-T, 0):
            out.append((a, key[1], key[2], key[3]))
    return out


def total_degree(key) -> int:
    """t, xi, dt, dxi all of degree 1; d preserves it."""
    return key[0] + popcount(key[1]) + key[2] + sum(key[3])


@dataclass
class LaurentBlock:
    degree: int
    flagged: bool
    dim_kernel: int
    dim_image: int
    representatives: list    # cohomology representatives (form dicts)


def laurent_cohomology(n: int, k: int, T: int = 4) -> list:
    """ker d / im d on Omega^k_- per total degree; blocks touching the truncation are flagged."""
    def by_deg(kk):
        out: dict = {}
        if kk < 0:
            return out
        for key in laurent_basis(n, kk, T):
            out.setdefault(total_degree(key), []).append(key)
        return out
    srcs, cur = by_deg(k - 1), by_deg(k)
    blocks = []
    for D in sorted(cur):
        # the block is complete iff no form of degree <= k+1 needs a t-power below -T
        flagged = D - (k + 1 + n) < -T
        if flagged:
            blocks.append(LaurentBlock(D, True, -1, -1, []))
            continue
        keys = cur[D]
        pos = {kk: i for i, kk in enumerate(keys)}
        tpos: dict = {}
        rr = RowReducer()
        rows = []
        for kk in keys:
            rows.append({tpos.setdefault(k2, len(tpos)): c for k2, c in de_rham({kk: 1}, n).items()})
        # kernel: one equation per target coordinate, unknowns = source forms
        cols_rr = RowReducer()
        trows: dict = {}
        for i, r in enumerate(rows):
            for t, c in r.items():
                trows.setdefault(t, {})[i] = c
        for r in trows.values():
            cols_rr.add(r)
        ker = cols_rr.nullspace(range(len(keys)))
        img = []
        for kk in srcs.get(D, []):
            v = {pos[k2]: c for k2, c in de_rham({kk: 1}, n).items()}
            img.append(v)
        img = span_basis(img)
        for v in img:
            rr.add(v)
        reps = []
        for v in ker:
            if rr.add(v):
                reps.append({keys[i]: c for i, c in v.items()})
        blocks.append(LaurentBlock(D, flagged, len(ker), len(img), reps))
    return blocks


def laurent_summary(n: int, T: int = 4) -> dict:
    """Unflagged cohomology of Omega^0_- and Omega^1_-."""
    out = {}
    for k in (0, 1):
        bl = [b for b in laurent_cohomology(n, k, T) if not b.flagged]
        out[k] = {"kernel": sum(b.dim_kernel for b in bl),
                  "cohomology": [(b.degree, [{form_str(kk): c for kk, c in r.items()} for r in b.representatives])
                                 for b in bl if b.representatives]}
    return out


def d_t_inverse(n: int) -> dict:
    return de_rham({(-1, 0, 0, (0,) * n): 1}, n)
