from fractions import Fraction

import pytest

from confkit.conformal import (build_S, build_Sb, build_Stilde, build_Vir, build_W, check_div_identity,
                               check_jacobi, check_jacobi_elements, check_skew, check_skew_elements,
                               closure_report, generated_subalgebra, s_generator_elements, stilde_matches)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_W_axioms_and_rank(n):
    W = build_W(n)
    assert W.rank == (n + 1) * 2 ** n
    assert check_skew(W).ok
    assert check_jacobi(W).ok


def test_vir():
    V = build_Vir()
    assert check_skew(V).ok and check_jacobi(V).ok
    L = V.gen(V.basis.labels[0])
    # [L_lam L] = (d + 2 lam) L
    assert dict(V.bracket(L, L).terms) == {(0, 1, 0): 1, (1, 0, 0): 2}


def test_W1_bracket_of_one_with_itself():
    W = build_W(1)
    one = W.gen(("fun", 0))
    br = W.bracket(one, one)
    # [f_lam g] = -(d + 2 lam) fg
    assert br.coefficient(0) == -one.d() and br.coefficient(1) == one.scale(-2)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mutations_detected(seed):
    W = build_W(2)
    Wm, info = W.mutated(seed)
    assert not (check_skew(Wm).ok and check_jacobi(Wm).ok), info


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("b", [0, 1, -1, Fraction(1, 2)])
def test_S_family(n, b):
    W = build_W(n)
    S = build_Sb(n, b, W)
    assert S.rank == n * 2 ** n
    assert closure_report(S).ok
    assert check_skew_elements(W, S.basis).ok
    assert check_jacobi_elements(W, S.basis).ok


def test_Stilde():
    W = build_W(2)
    St = build_Stilde(2, W)
    assert St.rank == 8
    assert check_jacobi_elements(W, St.basis).ok
    assert stilde_matches(2, W)
    with pytest.raises(ValueError):
        build_Stilde(3)


@pytest.mark.parametrize("n", [2, 3])
def test_div_identity(n):
    W = build_W(n)
    G = [W.gen(lab) for lab in W.basis.labels]
    for b in (0, 1):
        assert all(check_div_identity(W, x, y, b) for x in G for y in G)


def test_S1_rank():
    assert build_S(1).rank == 2


def test_S_generated_by_elements():
    W = build_W(2)
    gens = s_generator_elements(W)
    herm = generated_subalgebra(W, gens)
    assert len(herm) == build_S(2, W).rank
