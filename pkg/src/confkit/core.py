"""Exact scalars, the Grassmann algebra and sparse lambda-polynomials.

Everything here is a plain value.  Module elements are stored as dicts
keyed by small integer tuples:

* ModuleVector     (k, b)        -> coeff   meaning  coeff * d^k b
* LambdaValued     (j, k, b)     -> coeff   meaning  coeff * lam^j d^k b
* BiLambdaValued   (j, l, k, b)  -> coeff   meaning  coeff * lam^j mu^l d^k b

where d is the translation operator and b an index into a GradedBasis.
Coefficients are ints or Fractions; zero coefficients are never stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping


class MixedParityError(ValueError):
    pass


def scalar(x) -> Fraction | int:
    """Normalise user input ("1/2", 3, Fraction) to an exact scalar."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return scalar(Fraction(x))
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a string like '1/2'")
    raise TypeError(f"cannot interpret {x!r} as a rational scalar")


def fmt_scalar(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def add_into(acc: dict, key, c) -> None:
    """acc[key] += c, dropping the key when it cancels."""
    if not c:
        return
    v = acc.get(key, 0) + c
    if v:
        acc[key] = _norm(v)
    else:
        acc.pop(key, None)


def clean(d: Mapping) -> dict:
    return {k: _norm(v) for k, v in d.items() if v}


# ---------------------------------------------------------------------------
# Grassmann algebra on bitmasks (bit i-1 <-> xi_i)


def popcount(x: int) -> int:
    return bin(x).count("1")


@lru_cache(maxsize=None)
def mono_mul(I: int, J: int) -> int:
    """Sign of xi_I * xi_J (0 if they overlap)."""
    if I & J:
        return 0
    s = 0
    j = J
    while j:
        low = j & -j
        s += popcount(I & ~((low << 1) - 1))
        j ^= low
    return -1 if s & 1 else 1


@lru_cache(maxsize=None)
def mono_deriv(i: int, I: int) -> tuple[int, int]:
    """d/dxi_i applied to xi_I: returns (sign, mask); sign 0 if absent."""
    bit = 1 << (i - 1)
    if not I & bit:
        return 0, 0
    return (-1 if popcount(I & (bit - 1)) & 1 else 1), I ^ bit


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mono_str(mask: int) -> str:
    if not mask:
        return "1"
    return "".join(f"ξ{i}" for i in indices_of(mask))


@dataclass(frozen=True)
class GrassmannElement:
    n: int
    terms: tuple  # sorted tuple of (mask, coeff)

    @staticmethod
    def from_dict(n: int, d: Mapping[int, object]) -> "GrassmannElement":
        full = (1 << n) - 1
        for m in d:
            if m & ~full:
                raise ValueError(f"monomial {m} outside Λ({n})")
        return GrassmannElement(n, tuple(sorted(clean(d).items())))

    @staticmethod
    def monomial(n: int, indices: Iterable[int], coeff=1) -> "GrassmannElement":
        idx = list(indices)
        for i in idx:
            if not 1 <= i <= n:
                raise ValueError(f"index {i} out of range for n={n}")
        # product in the given order, so unsorted input picks up a sign
        m, s = 0, 1
        for i in idx:
            b = 1 << (i - 1)
            s *= mono_mul(m, b)
            m |= b
        return GrassmannElement.from_dict(n, {m: s * coeff} if s else {})

    @staticmethod
    def one(n: int) -> "GrassmannElement":
        return GrassmannElement(n, ((0, 1),))

    @staticmethod
    def xi_star(n: int) -> "GrassmannElement":
        return GrassmannElement(n, (((1 << n) - 1, 1),))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other):
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"mismatched n: {self.n} vs {other.n}")
        return None

    def __add__(self, other):
        self._check(other)
        d = self.as_dict()
        for m, c in other.terms:
            add_into(d, m, c)
        return GrassmannElement.from_dict(self.n, d)

    def __neg__(self):
        return GrassmannElement(self.n, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return gmul(self, other)
        c = scalar(other)
        return GrassmannElement.from_dict(self.n, {m: v * c for m, v in self.terms})

    __rmul__ = __mul__

    def parity(self) -> int:
        ps = {popcount(m) & 1 for m, _ in self.terms}
        if len(ps) > 1:
            raise MixedParityError(f"{self} is not homogeneous")
        return ps.pop() if ps else 0

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt_scalar(c)}*{mono_str(m)}" for m, c in self.terms)


def gmul(x: GrassmannElement, y: GrassmannElement) -> GrassmannElement:
    if x.n != y.n:
        raise ValueError(f"mismatched n: {x.n} vs {y.n}")
    d: dict = {}
    for I, a in x.terms:
        for J, b in y.terms:
            s = mono_mul(I, J)
            if s:
                add_into(d, I | J, s * a * b)
    return GrassmannElement.from_dict(x.n, d)


def gderiv(i: int, x: GrassmannElement) -> GrassmannElement:
    if not 1 <= i <= x.n:
        raise ValueError(f"index {i} out of range for n={x.n}")
    d: dict = {}
    for I, a in x.terms:
        s, J = mono_deriv(i, I)
        if s:
            add_into(d, J, s * a)
    return GrassmannElement.from_dict(x.n, d)


def parity(x) -> int:
    if isinstance(x, GrassmannElement):
        return x.parity()
    if isinstance(x, int):
        return popcount(x) & 1
    raise TypeError(x)


# ---------------------------------------------------------------------------
# Graded bases and the three sparse value types


@dataclass(frozen=True, eq=False)
class GradedBasis:
    labels: tuple
    parities: tuple
    weights: tuple | None = None
    names: tuple | None = None
    index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")
        if len(self.parities) != len(self.labels):
            raise ValueError("one parity per label")
        if self.weights is not None and len(self.weights) != len(self.labels):
            raise ValueError("weight tags must cover every label")
        self.index.update({lab: i for i, lab in enumerate(self.labels)})

    def __len__(self):
        return len(self.labels)

    def name(self, b: int) -> str:
        if self.names is not None:
            return self.names[b]
        return str(self.labels[b])


def term_str(basis: GradedBasis | None, k: int, b: int) -> str:
    nm = basis.name(b) if basis is not None else f"e{b}"
    return nm if k == 0 else (f"∂{nm}" if k == 1 else f"∂^{k}{nm}")


class _Sparse:
    __slots__ = ("terms", "basis")
    _arity = 0

    def __init__(self, terms: Mapping | None = None, basis: GradedBasis | None = None):
        self.terms = clean(terms or {})
        self.basis = basis

    def _new(self, terms):
        return type(self)(terms, self.basis)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if type(other) is not type(self):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        d = dict(self.terms)
        for k, c in other.terms.items():
            add_into(d, k, c)
        return self._new(d)

    def __sub__(self, other):
        d = dict(self.terms)
        for k, c in other.terms.items():
            add_into(d, k, -c)
        return self._new(d)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def scale(self, c):
        c = scalar(c)
        return self._new({k: v * c for k, v in self.terms.items()}) if c else self._new({})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def d(self, power: int = 1):
        """Left multiplication by d^power."""
        return self._new({k[:-2] + (k[-2] + power, k[-1]): c for k, c in self.terms.items()})

    def parity(self) -> int:
        if self.basis is None:
            raise ValueError("parity needs a basis")
        ps = {self.basis.parities[k[-1]] for k in self.terms}
        if len(ps) > 1:
            raise MixedParityError("mixed parity element")
        return ps.pop() if ps else 0

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class ModuleVector(_Sparse):
    """Element of a free C[d]-module: {(k, b): coeff}."""

    @staticmethod
    def gen(basis: GradedBasis, b, k: int = 0, coeff=1) -> "ModuleVector":
        if not isinstance(b, int):
            b = basis.index[b]
        return ModuleVector({(k, b): coeff}, basis)

    def degree(self) -> int:
        return max((k for k, _ in self.terms), default=-1)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt_scalar(c)}*{term_str(self.basis, k, b)}"
                          for (k, b), c in sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0])))


class LambdaValued(_Sparse):
    """Polynomial in lam with ModuleVector coefficients: {(j, k, b): coeff}."""

    @staticmethod
    def from_coefficients(coeffs: Mapping[int, ModuleVector], basis=None) -> "LambdaValued":
        d: dict = {}
        for j, v in coeffs.items():
            basis = basis or v.basis
            for (k, b), c in v.terms.items():
                add_into(d, (j, k, b), c)
        return LambdaValued(d, basis)

    def coefficient(self, j: int) -> ModuleVector:
        return ModuleVector({(k, b): c for (jj, k, b), c in self.terms.items() if jj == j}, self.basis)

    def lam_degree(self) -> int:
        return max((j for j, _, _ in self.terms), default=-1)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (j, k, b), c in sorted(self.terms.items()):
            lam = "" if j == 0 else ("λ" if j == 1 else f"λ^{j}")
            parts.append(f"{fmt_scalar(c)}*{lam}{'·' if lam else ''}{term_str(self.basis, k, b)}")
        return " + ".join(parts)


class BiLambdaValued(_Sparse):
    """Polynomial in lam, mu with ModuleVector coefficients: {(j, l, k, b): coeff}."""

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt_scalar(c)}*λ^{j}μ^{l}{term_str(self.basis, k, b)}"
                          for (j, l, k, b), c in sorted(self.terms.items()))


# ---------------------------------------------------------------------------
# raw-dict kernels shared by every bracket/action computation


def mul_lam_plus_d(terms: Mapping, q: int, out: dict | None = None, coeff=1, lam_shift: int = 0) -> dict:
    """coeff * lam^lam_shift * (lam + d)^q applied to a LambdaValued dict."""
    out = {} if out is None else out
    if q == 0:
        for (j, k, b), c in terms.items():
            add_into(out, (j + lam_shift, k, b), coeff * c)
        return out
    binoms = [comb(q, r) for r in range(q + 1)]
    for (j, k, b), c in terms.items():
        cc = coeff * c
        for r in range(q + 1):
            add_into(out, (j + r + lam_shift, k + q - r, b), cc * binoms[r])
    return out


def sesqui(table, x: Mapping, y: Mapping, out: dict | None = None) -> dict:
    """[x_lam y] for ModuleVector dicts x, y, given table(a, b) -> LambdaValued dict.

    Uses [(d^p a)_lam (d^q b)] = (-lam)^p (lam + d)^q [a_lam b].
    """
    out = {} if out is None else out
    for (p, a), cx in x.items():
        sgn = -1 if p & 1 else 1
        for (q, b), cy in y.items():
            base = table(a, b)
            if base:
                mul_lam_plus_d(base, q, out, sgn * cx * cy, p)
    return out


def subst_skew_raw(terms: Mapping) -> dict:
    """lam^j -> (-lam - d)^j."""
    out: dict = {}
    for (j, k, b), c in terms.items():
        s = -c if j & 1 else c
        for r in range(j + 1):
            add_into(out, (r, k + j - r, b), s * comb(j, r))
    return out


def subst_sum_raw(terms: Mapping) -> dict:
    """nu^j -> (lam + mu)^j, producing a BiLambdaValued dict."""
    out: dict = {}
    for (j, k, b), c in terms.items():
        for r in range(j + 1):
            add_into(out, (r, j - r, k, b), c * comb(j, r))
    return out


def subst_skew(p: LambdaValued) -> LambdaValued:
    return LambdaValued(subst_skew_raw(p.terms), p.basis)


def subst_sum(p: LambdaValued) -> BiLambdaValued:
    return BiLambdaValued(subst_sum_raw(p.terms), p.basis)
