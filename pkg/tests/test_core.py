from fractions import Fraction

import pytest

from confkit import polymatrix as pm
from confkit.core import (GradedBasis, GrassmannElement, LambdaValued, MixedParityError, ModuleVector,
                          gderiv, gmul, scalar, subst_skew, subst_sum)
from confkit.linalg import intersect, nullspace, rank, span_basis


def xi(n, *idx, c=1):
    return GrassmannElement.monomial(n, idx, c)


def test_grassmann_products():
    assert gmul(xi(2, 1), xi(2, 2)) == xi(2, 1, 2)
    assert gmul(xi(2, 2), xi(2, 1)) == xi(2, 1, 2, c=-1)
    assert gmul(xi(2, 1), xi(2, 1)).is_zero()
    assert xi(3, 3, 1) == xi(3, 1, 3, c=-1)


def test_grassmann_derivations():
    x = xi(2, 1, 2)
    assert gderiv(1, x) == xi(2, 2)
    assert gderiv(2, x) == xi(2, 1, c=-1)
    assert gderiv(1, xi(2, 2)).is_zero()
    with pytest.raises(ValueError):
        gderiv(3, x)


def test_grassmann_parity():
    assert xi(3, 1, 2).parity() == 0
    assert xi(3, 2).parity() == 1
    with pytest.raises(MixedParityError):
        (GrassmannElement.one(2) + xi(2, 1)).parity()


def test_scalar_rejects_floats():
    assert scalar("1/2") == Fraction(1, 2)
    assert scalar(Fraction(4, 2)) == 2 and isinstance(scalar(Fraction(4, 2)), int)
    with pytest.raises(TypeError):
        scalar(0.5)
    with pytest.raises(TypeError):
        scalar(True)


def test_subst_skew_and_sum():
    B = GradedBasis(("a",), (0,))
    # lam^2 a  ->  (lam + d)^2 a
    p = LambdaValued({(2, 0, 0): 1}, B)
    assert dict(subst_skew(p).terms) == {(2, 0, 0): 1, (1, 1, 0): 2, (0, 2, 0): 1}
    # lam a -> -(lam + d) a
    q = LambdaValued({(1, 0, 0): 1}, B)
    assert dict(subst_skew(q).terms) == {(1, 0, 0): -1, (0, 1, 0): -1}
    # nu^2 -> lam^2 + 2 lam mu + mu^2
    assert dict(subst_sum(p).terms) == {(0, 2, 0, 0): 1, (1, 1, 0, 0): 2, (2, 0, 0, 0): 1}


def test_module_vector_d():
    B = GradedBasis(("a", "b"), (0, 1))
    v = ModuleVector({(0, 0): 1, (1, 1): 2}, B)
    assert v.d() == ModuleVector({(1, 0): 1, (2, 1): 2}, B)
    with pytest.raises(MixedParityError):
        v.parity()


def test_smith_normal_form():
    # [[d, 0], [0, d^2]] -> diag(d, d^2); [[d, 1]] -> diag(1)
    M = pm.PolyMatrix([[pm.D, pm.ZERO], [pm.ZERO, (0, 0, 1)]])
    s = pm.smith(M)
    assert s.diag == [pm.D, (0, 0, 1)]
    assert (s.U @ M @ s.V) == pm.PolyMatrix([[pm.D, pm.ZERO], [pm.ZERO, (0, 0, 1)]])
    assert pm.smith(pm.PolyMatrix([[pm.D, pm.ONE]])).diag == [pm.ONE]


def test_smith_unimodular_transforms():
    M = pm.PolyMatrix([[(1, 1), (0, 1)], [(2, 1), (1, 0, 1)], [pm.ONE, (3,)]])
    s = pm.smith(M)
    prod = s.U @ M @ s.V
    for i, row in enumerate(prod.rows):
        for j, e in enumerate(row):
            if i != j:
                assert e == pm.ZERO
    assert s.U @ s.Uinv == pm.PolyMatrix.identity(3)
    assert s.V @ s.Vinv == pm.PolyMatrix.identity(2)


def test_kernel_image_of_d():
    ki = pm.kernel_image(pm.PolyMatrix([[pm.D]]))
    assert ki.kernel == [] and ki.cokernel_torsion == [pm.D]


def test_linalg():
    rows = [{0: 1, 1: 1}, {1: 1, 2: Fraction(1, 2)}]
    assert rank(rows) == 2
    ns = nullspace(rows, range(3))
    assert len(ns) == 1
    v = ns[0]
    for r in rows:
        assert sum(c * v.get(k, 0) for k, c in r.items()) == 0
    assert len(span_basis([{0: 1}, {0: 2}, {1: 1}])) == 2
    assert len(intersect([{0: 1}, {1: 1}], [{0: 1, 1: 1}])) == 1
