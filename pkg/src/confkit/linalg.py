"""Sparse exact linear algebra over Q (rows are dicts column -> coeff)."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class RowReducer:
    """Incremental reduced row echelon form.

    Pivot rows are kept fully reduced against each other, so reducing a
    new row needs one pass over its pivot columns.
    """

    def __init__(self):
        self.pivots: dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping) -> dict:
        r = {c: Fraction(v) for c, v in row.items() if v}
        for c in [c for c in r if c in self.pivots]:
            f = r.get(c)
            if not f:
                continue
            for cc, vv in self.pivots[c].items():
                nv = r.get(cc, 0) - f * vv
                if nv:
                    r[cc] = nv
                else:
                    r.pop(cc, None)
        return r

    def add(self, row: Mapping) -> bool:
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {c: v * inv for c, v in r.items()}
        for other in self.pivots.values():
            f = other.get(p)
            if f:
                for cc, vv in r.items():
                    nv = other.get(cc, 0) - f * vv
                    if nv:
                        other[cc] = nv
                    else:
                        other.pop(cc, None)
        self.pivots[p] = r
        return True

    def nullspace(self, ncols: Iterable[int]) -> list[dict]:
        """Kernel basis over the given column set, one vector per free column."""
        out = []
        for f in sorted(ncols):
            if f in self.pivots:
                continue
            v = {f: Fraction(1)}
            for p, row in self.pivots.items():
                c = row.get(f)
                if c:
                    v[p] = -c
            out.append(v)
        return out


def nullspace(rows: Iterable[Mapping], cols: Iterable[int]) -> list[dict]:
    rr = RowReducer()
    for r in rows:
        rr.add(r)
    return rr.nullspace(cols)


def rank(rows: Iterable[Mapping]) -> int:
    rr = RowReducer()
    for r in rows:
        rr.add(r)
    return rr.rank


def span_basis(vectors: Iterable[Mapping]) -> list[dict]:
    rr = RowReducer()
    for v in vectors:
        rr.add(v)
    return [rr.pivots[p] for p in sorted(rr.pivots)]


def in_span(v: Mapping, basis_rr: RowReducer) -> bool:
    return not basis_rr.reduce(v)


def intersect(A: list[Mapping], B: list[Mapping]) -> list[dict]:
    """Basis of span(A) ∩ span(B) (vectors as dicts)."""
    # solve sum x_i a_i = sum y_j b_j
    rows: dict = {}
    na = len(A)
    for i, a in enumerate(A):
        for c, v in a.items():
            rows.setdefault(c, {})[i] = v
    for j, b in enumerate(B):
        for c, v in b.items():
            rows.setdefault(c, {})[na + j] = rows.get(c, {}).get(na + j, 0) - v
    ker = nullspace(rows.values(), range(na + len(B)))
    out = []
    for k in ker:
        vec: dict = {}
        for i, x in k.items():
            if i < na:
                for c, v in A[i].items():
                    vec[c] = vec.get(c, 0) + x * v
        vec = {c: v for c, v in vec.items() if v}
        if vec:
            out.append(vec)
    return span_basis(out)
