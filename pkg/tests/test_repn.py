import json
from fractions import Fraction

import pytest

from confkit.repn import (build_bar_forms, build_L0b, build_La_minus_a, build_M_ab, build_standard,
                          build_submodule_N, build_theta, check_module_axioms, check_morphism, cokernel_diag,
                          conformal_dual, double_dual_matches, glrep_from_json, highest_vectors,
                          is_surjective, quotient_L0b_from_M, rm22_map, tens, transpose, twist,
                          validate_glrep)

GRID = [-2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_reps_satisfy_gl_relations(n):
    for V in [build_standard(n)] + [build_theta(k, n) for k in range(3)] + \
             [build_bar_forms(k, n) for k in range(3)]:
        assert validate_glrep(V).ok, V.name


def test_standard_highest_vector():
    V = build_standard(2)
    hv = highest_vectors(V)
    assert len(hv) == 1 and set(hv[0]) == {0}


@pytest.mark.parametrize("make", [build_standard, lambda n: build_theta(1, n), lambda n: build_bar_forms(2, n)])
def test_tens_axioms(make):
    assert check_module_axioms(tens(make(2))).ok


@pytest.mark.parametrize("alpha", [1, Fraction(-1, 2)])
def test_twist_axioms(alpha):
    M = twist(tens(build_standard(2)), alpha)
    assert check_module_axioms(M).ok


def test_double_dual():
    for M in (tens(build_standard(2)), build_M_ab(Fraction(1, 2), Fraction(1, 3))):
        D = conformal_dual(M)
        assert check_module_axioms(D).ok
        assert double_dual_matches(M)["graded"]


def test_rm22_transpose_not_surjective():
    T = rm22_map()
    assert check_morphism(T).ok
    assert not is_surjective(T)
    assert cokernel_diag(transpose(T))


@pytest.mark.parametrize("b", [0, 1, Fraction(1, 3)])
def test_submodule_N_and_quotient(b):
    T = build_submodule_N(b)
    assert check_module_axioms(T.source).ok
    assert check_morphism(T).ok
    assert is_surjective(transpose(T))
    L = build_L0b(b)
    assert check_module_axioms(L).ok
    assert quotient_L0b_from_M(b).full_table() == L.full_table()


@pytest.mark.parametrize("a", GRID)
@pytest.mark.parametrize("b", GRID)
def test_M_ab_axioms(a, b):
    assert check_module_axioms(build_M_ab(a, b)).ok


@pytest.mark.parametrize("a", GRID)
def test_La_minus_a(a):
    assert check_module_axioms(build_La_minus_a(a)).ok


def test_json_rep_roundtrip(tmp_path):
    data = {"n": 1, "dim": 2, "parities": [0, 1],
            "E": {"0,0": [[1, 0], [0, 0]], "1,1": [[0, 0], [0, 1]],
                  "1,0": [[0, 0], [1, 0]], "0,1": [[0, 1], [0, 0]]}}
    V = glrep_from_json(json.loads(json.dumps(data)))
    assert validate_glrep(V).ok
    bad = dict(data, parities=[0])
    with pytest.raises(ValueError):
        glrep_from_json(bad)
