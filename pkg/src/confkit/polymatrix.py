"""Matrices over the principal ideal domain Q[d].

Polynomials are tuples of coefficients, lowest degree first, with no
trailing zeros (the zero polynomial is the empty tuple).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import GradedBasis, ModuleVector, _norm, add_into

Poly = tuple

ZERO: Poly = ()
ONE: Poly = (1,)
D: Poly = (0, 1)


def ptrim(c) -> Poly:
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return tuple(_norm(x) for x in c)


def pdeg(a: Poly) -> int:
    return len(a) - 1


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return ptrim([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pneg(b))


def pscale(a: Poly, c) -> Poly:
    return ptrim([x * c for x in a]) if c else ZERO


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lb = Fraction(b[-1])
    for s in range(len(a) - len(b), -1, -1):
        c = r[s + len(b) - 1] / lb
        if c:
            q[s] = c
            for i, y in enumerate(b):
                r[s + i] -= c * y
    return ptrim(q), ptrim(r[: len(b) - 1])


def pmonic(a: Poly) -> Poly:
    return pscale(a, Fraction(1) / Fraction(a[-1])) if a else a


def peval_neg(a: Poly) -> Poly:
    """a(d) -> a(-d)."""
    return tuple(-x if i & 1 else x for i, x in enumerate(a))


def pstr(a: Poly) -> str:
    if not a:
        return "0"
    parts = []
    for i, c in enumerate(a):
        if not c:
            continue
        c = Fraction(c)
        cs = str(c) if c.denominator == 1 else f"({c})"
        parts.append(cs if i == 0 else f"{cs}*∂" + (f"^{i}" if i > 1 else ""))
    return " + ".join(parts)


# ---------------------------------------------------------------------------


@dataclass
class PolyMatrix:
    rows: list  # list of lists of Poly

    @staticmethod
    def zeros(m: int, n: int) -> "PolyMatrix":
        return PolyMatrix([[ZERO] * n for _ in range(m)])

    @staticmethod
    def identity(m: int) -> "PolyMatrix":
        return PolyMatrix([[ONE if i == j else ZERO for j in range(m)] for i in range(m)])

    @staticmethod
    def from_lists(rows: Sequence[Sequence]) -> "PolyMatrix":
        return PolyMatrix([[ptrim(e) if isinstance(e, (tuple, list)) else ptrim((e,)) for e in r] for r in rows])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def copy(self) -> "PolyMatrix":
        return PolyMatrix([list(r) for r in self.rows])

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = ZERO
                for t in range(k):
                    a = self.rows[i][t]
                    if a:
                        b = other.rows[t][j]
                        if b:
                            acc = padd(acc, pmul(a, b))
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def is_zero(self) -> bool:
        return all(not e for r in self.rows for e in r)

    def __str__(self):
        return "\n".join("[" + ", ".join(pstr(e) for e in r) + "]" for r in self.rows)


@dataclass
class SNF:
    diag: list          # nonzero monic invariant factors d_1 | d_2 | ...
    U: PolyMatrix
    Uinv: PolyMatrix
    V: PolyMatrix
    Vinv: PolyMatrix
    shape: tuple

    @property
    def rank(self) -> int:
        return len(self.diag)


def smith(M: PolyMatrix) -> SNF:
    """Smith normal form U M V = diag(d_1, ..., d_r, 0, ...).

    Pivot choice: lowest-degree nonzero entry, first in row-major order.
    """
    m, n = M.shape
    A = [list(r) for r in M.rows]
    U = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    Ui = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    V = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    Vi = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]

    def row_add(i, j, q):  # row_i += q row_j
        A[i] = [padd(x, pmul(q, y)) for x, y in zip(A[i], A[j])]
        U[i] = [padd(x, pmul(q, y)) for x, y in zip(U[i], U[j])]
        for r in Ui:
            r[j] = psub(r[j], pmul(q, r[i]))

    def row_swap(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def row_scale(i, c):
        A[i] = [pscale(x, c) for x in A[i]]
        U[i] = [pscale(x, c) for x in U[i]]
        inv = 1 / Fraction(c)
        for r in Ui:
            r[i] = pscale(r[i], inv)

    def col_add(i, j, q):  # col_i += q col_j
        for r in A:
            r[i] = padd(r[i], pmul(q, r[j]))
        for r in V:
            r[i] = padd(r[i], pmul(q, r[j]))
        Vi[j] = [psub(x, pmul(q, y)) for x, y in zip(Vi[j], Vi[i])]

    def col_swap(i, j):
        if i != j:
            for r in A:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    diag = []
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    e = A[i][j]
                    if e and (best is None or len(e) < best[0]):
                        best = (len(e), i, j)
            if best is None:
                break
            _, i0, j0 = best
            row_swap(t, i0)
            col_swap(t, j0)
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q, r = pdivmod(A[i][t], piv)
                    row_add(i, t, pneg(q))
                    dirty = dirty or bool(r)
            for j in range(t + 1, n):
                if A[t][j]:
                    q, r = pdivmod(A[t][j], piv)
                    col_add(j, t, pneg(q))
                    dirty = dirty or bool(r)
            if dirty:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] and pdivmod(A[i][j], piv)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, ONE)
        if best is None and not A[t][t]:
            break
        row_scale(t, 1 / Fraction(A[t][t][-1]))
        diag.append(A[t][t])
    return SNF(diag, PolyMatrix(U), PolyMatrix(Ui), PolyMatrix(V), PolyMatrix(Vi), (m, n))


@dataclass
class KernelImage:
    kernel: list      # list of column vectors (lists of Poly), free basis of ker M
    image: list       # free basis of im M
    diag: list        # SNF invariant factors
    snf: SNF

    @property
    def cokernel_torsion(self) -> list:
        return [d for d in self.diag if pdeg(d) > 0]

    @property
    def cokernel_free_rank(self) -> int:
        return self.snf.shape[0] - len(self.diag)


def kernel_image(M: PolyMatrix) -> KernelImage:
    s = smith(M)
    r = s.rank
    m, n = s.shape
    ker = [s.V.column(j) for j in range(r, n)]
    img = [[pmul(s.diag[i], e) for e in s.Uinv.column(i)] for i in range(r)]
    return KernelImage(ker, img, list(s.diag), s)


def vec_to_polys(v: ModuleVector, dim: int) -> list:
    out = [[0] for _ in range(dim)]
    for (k, b), c in v.terms.items():
        col = out[b]
        while len(col) <= k:
            col.append(0)
        col[k] += c
    return [ptrim(c) for c in out]


def polys_to_vec(p: Sequence[Poly], basis: GradedBasis | None = None) -> ModuleVector:
    d: dict = {}
    for b, poly in enumerate(p):
        for k, c in enumerate(poly):
            add_into(d, (k, b), c)
    return ModuleVector(d, basis)


def kernel_free_basis(M: PolyMatrix, basis: GradedBasis | None = None) -> dict:
    """Free C[d]-bases of ker M (over the column basis) and im M, plus SNF diagonal."""
    ki = kernel_image(M)
    return {
        "kernel": [polys_to_vec(c, basis) for c in ki.kernel],
        "image": [polys_to_vec(c) for c in ki.image],
        "diag": ki.diag,
        "snf": ki.snf,
    }


# ---------------------------------------------------------------------------
# Hermite form of a submodule of Q[d]^N given by generating vectors


def _reduce_against(v: list, rows: list) -> list:
    v = list(v)
    for piv, row in rows:
        if v[piv]:
            q, _ = pdivmod(v[piv], row[piv])
            if q:
                v = [psub(x, pmul(q, y)) for x, y in zip(v, row)]
    return v


def hermite(vectors: Sequence[Sequence[Poly]], ncols: int) -> list:
    """Reduced row-echelon Hermite basis: list of (pivot column, row).

    Pivots are monic; entries above a pivot have lower degree.  Two
    generating sets span the same submodule iff their Hermite bases agree.
    """
    pending = [list(v) for v in vectors if any(v)]
    done: list = []
    for c in range(ncols):
        active = [v for v in pending if v[c]]
        rest = [v for v in pending if not v[c]]
        while len(active) > 1:
            active.sort(key=lambda v: len(v[c]))
            p = active[0]
            nxt = [p]
            for v in active[1:]:
                q, _ = pdivmod(v[c], p[c])
                w = [psub(x, pmul(q, y)) for x, y in zip(v, p)]
                if w[c]:
                    nxt.append(w)
                elif any(w):
                    rest.append(w)
            active = nxt
        if active:
            p = active[0]
            inv = 1 / Fraction(p[c][-1])
            p = [pscale(x, inv) for x in p]
            for idx, (pc, row) in enumerate(done):
                if row[c]:
                    q, _ = pdivmod(row[c], p[c])
                    if q:
                        done[idx] = (pc, [psub(x, pmul(q, y)) for x, y in zip(row, p)])
            done.append((c, p))
        pending = rest
    return [(pc, [tuple(x) for x in row]) for pc, row in done]


def in_submodule(v: Sequence[Poly], herm: list) -> bool:
    r = list(v)
    for piv, row in herm:
        if r[piv]:
            q, rem = pdivmod(r[piv], row[piv])
            if rem:
                return False
            r = [psub(x, pmul(q, y)) for x, y in zip(r, row)]
    return not any(r)
