"""Differential superforms on the (1|n)-dimensional superline.

A monomial t^a xi_I dt^e dxi^beta is stored as the key (a, I, e, beta)
with a in Z (Laurent), I a bitmask, e in {0, 1}, beta a tuple of n
non-negative ints.  Parities: t, dxi_i even; xi_i, dt odd.  A form is a
dict key -> coeff.

Derivations are specified by their values on the generators
("t",), ("xi", i), ("dt",), ("dxi", i) and extended by the signed
Leibniz rule.
"""
from __future__ import annotations

from typing import Callable, Mapping

from .core import add_into, indices_of, mono_mul, popcount


def key_parity(key) -> int:
    return (popcount(key[1]) + key[2]) & 1


def key_degree(key) -> int:
    """Differential degree: number of dt and dxi factors."""
    return key[2] + sum(key[3])


def fmul_keys(x, y) -> tuple[int, tuple | None]:
    a1, I1, e1, b1 = x
    a2, I2, e2, b2 = y
    if e1 and e2:
        return 0, None
    s = mono_mul(I1, I2)
    if not s:
        return 0, None
    # move xi_I2 to the left past dt^e1
    if e1 and popcount(I2) & 1:
        s = -s
    return s, (a1 + a2, I1 | I2, e1 | e2, tuple(u + v for u, v in zip(b1, b2)))


def fmul(x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for kx, cx in x.items():
        for ky, cy in y.items():
            s, k = fmul_keys(kx, ky)
            if s:
                add_into(out, k, s * cx * cy)
    return out


def fadd(*forms: Mapping, coeffs=None) -> dict:
    out: dict = {}
    coeffs = coeffs or [1] * len(forms)
    for f, c in zip(forms, coeffs):
        for k, v in f.items():
            add_into(out, k, c * v)
    return out


def one(n: int) -> tuple:
    return (0, 0, 0, (0,) * n)


def gen_t(n, power=1):
    return (power, 0, 0, (0,) * n)


def gen_xi(n, i):
    return (0, 1 << (i - 1), 0, (0,) * n)


def gen_dt(n):
    return (0, 0, 1, (0,) * n)


def gen_dxi(n, i, power=1):
    b = [0] * n
    b[i - 1] = power
    return (0, 0, 0, tuple(b))


def monomial(n: int, a=0, I=0, e=0, beta=None) -> tuple:
    return (a, I, e, tuple(beta) if beta is not None else (0,) * n)


def factors(key, n) -> list:
    """Ordered factor list of a monomial: [(generator, exponent)]."""
    a, I, e, beta = key
    out = []
    if a:
        out.append((("t",), a))
    for i in indices_of(I):
        out.append((("xi", i), 1))
    if e:
        out.append((("dt",), 1))
    for i, b in enumerate(beta, start=1):
        if b:
            out.append((("dxi", i), b))
    return out


def gen_key(g, n, power=1):
    if g[0] == "t":
        return gen_t(n, power)
    if g[0] == "xi":
        return gen_xi(n, g[1])
    if g[0] == "dt":
        return gen_dt(n)
    return gen_dxi(n, g[1], power)


GEN_PARITY = {"t": 0, "xi": 1, "dt": 1, "dxi": 0}


def apply_derivation(values: Callable, parity: int, form: Mapping, n: int) -> dict:
    """Apply the derivation with D(g) = values(g) (a form) and given parity."""
    out: dict = {}
    for key, c in form.items():
        fs = factors(key, n)
        left = {one(n): 1}
        lpar = 0
        for pos, (g, p) in enumerate(fs):
            dg = values(g)
            if dg:
                # D(g^p) = p g^(p-1) D(g) for even g; g odd has p = 1
                if GEN_PARITY[g[0]] == 0 and p != 1:
                    dgp = fmul({gen_key(g, n, p - 1): p}, dg)
                else:
                    dgp = dg
                right = {one(n): 1}
                for g2, p2 in fs[pos + 1:]:
                    right = fmul(right, {gen_key(g2, n, p2): 1})
                sign = -1 if (parity & lpar) else 1
                term = fmul(fmul(left, dgp), right)
                for k, v in term.items():
                    add_into(out, k, sign * c * v)
            left = fmul(left, {gen_key(g, n, p): 1})
            if GEN_PARITY[g[0]]:
                lpar ^= 1
    return out


# ---------------------------------------------------------------------------
# standard operators


def de_rham(form: Mapping, n: int) -> dict:
    def vals(g):
        if g[0] == "t":
            return {gen_dt(n): 1}
        if g[0] == "xi":
            return {gen_dxi(n, g[1]): 1}
        return {}
    return apply_derivation(vals, 1, form, n)


def vector_field_values(coeffs: Mapping[int, Mapping], n: int) -> Callable:
    """Action on functions of D = sum_k coeffs[k] d_k (k = 0 is d_t)."""
    def vals(g):
        if g[0] == "t":
            return dict(coeffs.get(0, {}))
        if g[0] == "xi":
            return dict(coeffs.get(g[1], {}))
        return {}
    return vals


def lie_derivative(coeffs: Mapping[int, Mapping], parity: int, form: Mapping, n: int) -> dict:
    """L_D with L_D(dx) = (-1)^{p(D)} d(D x)."""
    fv = vector_field_values(coeffs, n)
    sg = -1 if parity else 1

    def vals(g):
        if g[0] in ("t", "xi"):
            return fv(g)
        base = fv(("t",)) if g[0] == "dt" else fv(("xi", g[1]))
        return {k: sg * v for k, v in de_rham(base, n).items()}
    return apply_derivation(vals, parity, form, n)


def contraction(coeffs: Mapping[int, Mapping], parity: int, form: Mapping, n: int) -> dict:
    """iota_D with iota_D(dx) = (-1)^{p(D)} D(x); parity p(D) + 1."""
    fv = vector_field_values(coeffs, n)
    sg = -1 if parity else 1

    def vals(g):
        if g[0] in ("t", "xi"):
            return {}
        base = fv(("t",)) if g[0] == "dt" else fv(("xi", g[1]))
        return {k: sg * v for k, v in base.items()}
    return apply_derivation(vals, parity ^ 1, form, n)


def basis_forms(n: int, degree: int, with_t: bool = True, with_xi: bool = True) -> list:
    """Monomials with a = 0 of the given differential degree."""
    from itertools import product
    out = []
    masks = range(1 << n) if with_xi else [0]
    for e in ((0, 1) if with_t else (0,)):
        rest = degree - e
        if rest < 0:
            continue
        for beta in product(range(rest + 1), repeat=n):
            if sum(beta) != rest:
                continue
            for I in masks:
                out.append((0, I, e, tuple(beta)))
    return sorted(out, key=lambda k: (k[2], tuple(-b for b in k[3]), popcount(k[1]), k[1]))


def form_str(key) -> str:
    a, I, e, beta = key
    parts = []
    if a:
        parts.append("t" if a == 1 else f"t^{a}")
    parts += [f"ξ{i}" for i in indices_of(I)]
    if e:
        parts.append("dt")
    for i, b in enumerate(beta, start=1):
        if b:
            parts.append(f"dξ{i}" + (f"^{b}" if b > 1 else ""))
    return "".join(parts) or "1"
