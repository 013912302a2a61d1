"""Annihilation-algebra elements a t^j and a concrete vector-field oracle.

For W_n the annihilation algebra is W(1,n)_+.  The generator xi_I d_i
at t-power j is the field t^j xi_I d_i; the function generator xi_I
(standing for xi_I d_t) maps to FUN_SIGN * t^j xi_I d_t.  The oracle
comparison below pins FUN_SIGN = +1 (the opposite sign fails).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, perm
from typing import Mapping

from .core import add_into, clean, mono_deriv, mono_mul, popcount
from .conformal import ConformalAlgebra, Report

FUN_SIGN = 1


class NotEigenvector(ValueError):
    pass


@dataclass(frozen=True)
class AnnElement:
    terms: tuple  # sorted ((generator index, j), coeff)

    @staticmethod
    def make(d: Mapping) -> "AnnElement":
        for (_, j) in d:
            if j < 0:
                raise ValueError("t-power must be >= 0")
        return AnnElement(tuple(sorted(clean(d).items())))

    @staticmethod
    def gen(g: int, j: int = 0, c=1) -> "AnnElement":
        return AnnElement.make({(g, j): c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other):
        d = self.as_dict()
        for k, c in other.terms:
            add_into(d, k, c)
        return AnnElement.make(d)

    def __neg__(self):
        return AnnElement(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return AnnElement.make({k: v * c for k, v in self.terms})

    def is_zero(self):
        return not self.terms


def coeff_to_ann(terms: Mapping, p: int, out: dict | None = None, coeff=1) -> dict:
    """(d^k c) t^p = (-1)^k p!/(p-k)! c t^(p-k), for a ModuleVector dict."""
    out = {} if out is None else out
    for (k, g), c in terms.items():
        if k > p:
            continue
        add_into(out, (g, p - k), coeff * c * (-1 if k & 1 else 1) * perm(p, k))
    return out


def ann_bracket_raw(A: ConformalAlgebra, x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for (a, m), cx in x.items():
        for (b, n), cy in y.items():
            tab = A.tab(a, b)
            if not tab:
                continue
            for (j, k, c), v in tab.items():
                if j > m:
                    continue
                # [a_(j) b] = j! * lam^j coefficient; (m choose j) on the first argument
                w = cx * cy * comb(m, j) * factorial(j) * v
                p = m + n - j
                if k <= p:
                    add_into(out, (c, p - k), w * (-1 if k & 1 else 1) * perm(p, k))
    return out


def ann_bracket(A: ConformalAlgebra, x: AnnElement, y: AnnElement) -> AnnElement:
    return AnnElement.make(ann_bracket_raw(A, x.as_dict(), y.as_dict()))


def ann_parity(A: ConformalAlgebra, x: AnnElement) -> int:
    ps = {A.parity(g) for (g, _), _ in x.terms}
    if len(ps) > 1:
        raise ValueError("mixed parity")
    return ps.pop() if ps else 0


def ann_degree(A: ConformalAlgebra, g: int, j: int) -> int:
    """deg t = deg xi = 1 = -deg d_t = -deg d_i."""
    lab = A.basis.labels[g]
    return j + popcount(lab[1]) - 1


def ann_str(A: ConformalAlgebra, x: AnnElement) -> str:
    if not x.terms:
        return "0"
    return " + ".join(f"{c}*({A.basis.name(g)})t^{j}" for (g, j), c in x.terms)


# ---------------------------------------------------------------------------
# vector fields on C[t] ⊗ Λ(n) as truncated matrices


def to_field(A: ConformalAlgebra, x: Mapping, fun_sign: int = FUN_SIGN) -> dict:
    """AnnElement dict -> {(k, m, I): c} meaning c t^m xi_I d_k (d_0 = d_t)."""
    out: dict = {}
    for (g, j), c in x.items():
        lab = A.basis.labels[g]
        if lab[0] == "vec":
            add_into(out, (lab[2], j, lab[1]), c)
        else:
            add_into(out, (0, j, lab[1]), fun_sign * c)
    return out


@dataclass
class ConcreteDerivation:
    n: int
    T: int
    parity: int
    cols: dict                # (m, I) -> {(m', I'): c}
    overflow: frozenset = field(default_factory=frozenset)

    @staticmethod
    def from_field(fld: Mapping, n: int, T: int, parity: int) -> "ConcreteDerivation":
        cols: dict = {}
        over = set()
        for m in range(T + 1):
            for I in range(1 << n):
                col: dict = {}
                bad = False
                for (k, p, J), c in fld.items():
                    if k == 0:
                        if m == 0:
                            continue
                        s = mono_mul(J, I)
                        key, w = (p + m - 1, J | I), c * m
                    else:
                        s1, I2 = mono_deriv(k, I)
                        if not s1:
                            continue
                        s = mono_mul(J, I2) * s1
                        key, w = (p + m, J | I2), c
                    if not s:
                        continue
                    if key[0] > T:
                        bad = True
                        continue
                    add_into(col, key, s * w)
                if bad:
                    over.add((m, I))
                cols[(m, I)] = col
        return ConcreteDerivation(n, T, parity, cols, frozenset(over))

    def trusted(self) -> list:
        return [c for c in self.cols if c not in self.overflow]


def _compose(A: ConcreteDerivation, B: ConcreteDerivation, col) -> tuple[dict, bool]:
    ok = col not in B.overflow
    out: dict = {}
    for e, c in B.cols[col].items():
        if e in A.overflow:
            ok = False
        for e2, c2 in A.cols[e].items():
            add_into(out, e2, c * c2)
    return out, ok


def oracle_commutator(D1: ConcreteDerivation, D2: ConcreteDerivation) -> ConcreteDerivation:
    if (D1.n, D1.T) != (D2.n, D2.T):
        raise ValueError("truncations differ")
    eps = -1 if D1.parity & D2.parity else 1
    cols: dict = {}
    over = set()
    for col in D1.cols:
        ab, ok1 = _compose(D1, D2, col)
        ba, ok2 = _compose(D2, D1, col)
        for e, c in ba.items():
            add_into(ab, e, -eps * c)
        cols[col] = ab
        if not (ok1 and ok2):
            over.add(col)
    return ConcreteDerivation(D1.n, D1.T, (D1.parity + D2.parity) % 2, cols, frozenset(over))


def oracle_match(A: ConformalAlgebra, T: int, fun_sign: int = FUN_SIGN, trunc: int | None = None) -> Report:
    """ann_bracket(a t^i, b t^j) vs the commutator of concrete fields, i + j <= T."""
    n = A.n
    trunc = T + 2 if trunc is None else trunc
    rep = Report(f"oracle[{A.name},T={T}]")
    rep.info["compared_columns"] = 0
    rep.info["skipped_columns"] = 0
    mats: dict = {}

    def mat(g, i):
        key = (g, i)
        if key not in mats:
            mats[key] = ConcreteDerivation.from_field(to_field(A, {(g, i): 1}, fun_sign), n, trunc, A.parity(g))
        return mats[key]

    for a in range(A.rank):
        for b in range(A.rank):
            for i in range(T + 1):
                for j in range(T + 1 - i):
                    rep.checked += 1
                    br = ann_bracket_raw(A, {(a, i): 1}, {(b, j): 1})
                    lhs = ConcreteDerivation.from_field(to_field(A, br, fun_sign), n, trunc,
                                                        (A.parity(a) + A.parity(b)) % 2)
                    rhs = oracle_commutator(mat(a, i), mat(b, j))
                    bad = False
                    for col in rhs.cols:
                        if col in rhs.overflow or col in lhs.overflow:
                            rep.info["skipped_columns"] += 1
                            continue
                        rep.info["compared_columns"] += 1
                        if lhs.cols[col] != rhs.cols[col]:
                            bad = True
                    if bad:
                        rep.failures.append(((a, i), (b, j)))
    return rep


def ann_jacobi_report(A: ConformalAlgebra, max_total: int = 4) -> Report:
    rep = Report(f"ann-jacobi[{A.name}]")
    R = range(A.rank)
    for a in R:
        for b in R:
            for c in R:
                pa, pb = A.parity(a), A.parity(b)
                for i in range(max_total + 1):
                    for j in range(max_total + 1 - i):
                        for k in range(max_total + 1 - i - j):
                            x, y, z = {(a, i): 1}, {(b, j): 1}, {(c, k): 1}
                            lhs = ann_bracket_raw(A, x, ann_bracket_raw(A, y, z))
                            r1 = ann_bracket_raw(A, ann_bracket_raw(A, x, y), z)
                            r2 = ann_bracket_raw(A, y, ann_bracket_raw(A, x, z))
                            eps = -1 if pa & pb else 1
                            for key, v in r1.items():
                                add_into(lhs, key, -v)
                            for key, v in r2.items():
                                add_into(lhs, key, -eps * v)
                            rep.checked += 1
                            if lhs:
                                rep.failures.append(((a, i), (b, j), (c, k)))
    return rep


# ---------------------------------------------------------------------------
# action on modules and Cartan weights


def ann_act_raw(M, x: Mapping, m: Mapping) -> dict:
    """(a t^j) m = j! * (lam^j coefficient of a_lam m)."""
    out: dict = {}
    for (g, j), c in x.items():
        for (jj, k, b), v in M.act_raw(g, m).items():
            if jj == j:
                add_into(out, (k, b), c * factorial(j) * v)
    return out


def ann_act(M, x: AnnElement, m):
    from .core import ModuleVector
    return ModuleVector(ann_act_raw(M, x.as_dict(), m.terms), M.basis)


def cartan(A: ConformalAlgebra) -> list:
    """h_0 = (1) t, h_i = h_0 + (xi_i d_i) t^0 as AnnElement dicts."""
    one = A.basis.index[("fun", 0)]
    hs = [{(one, 1): 1}]
    for i in range(1, A.n + 1):
        hs.append({(one, 1): 1, (A.basis.index[("vec", 1 << (i - 1), i)], 0): 1})
    return hs


def weight_of_raw(M, m: Mapping, hs: list | None = None) -> tuple:
    if not m:
        raise NotEigenvector("zero vector has no weight")
    hs = hs if hs is not None else cartan(M.algebra)
    ref_key = min(m)
    ref = m[ref_key]
    out = []
    for h in hs:
        hm = ann_act_raw(M, h, m)
        lam = Fraction(hm.get(ref_key, 0)) / Fraction(ref)
        for key in set(hm) | set(m):
            if hm.get(key, 0) != lam * m.get(key, 0):
                raise NotEigenvector("not a joint eigenvector of the Cartan subalgebra")
        out.append(lam.numerator if lam.denominator == 1 else lam)
    return tuple(out)


def weight_of(M, m) -> tuple:
    """(mu; lam_1, ..., lam_n) for a joint Cartan eigenvector m of M."""
    return weight_of_raw(M, m.terms)
