from fractions import Fraction

import pytest

from confkit import singular as sg
from confkit.annihilation import cartan
from confkit.repn import build_bar_forms, build_M_ab, build_standard, build_theta, tens, twist

FAMILIES = {"theta": build_theta, "bar": build_bar_forms}


def _module(fam, k, n, alpha=0):
    V = build_standard(n) if fam == "standard" else FAMILIES[fam](k, n)
    M = tens(V)
    return V, twist(M, alpha) if alpha else M


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("fam,k", [("theta", k) for k in range(4)] + [("bar", k) for k in range(4)] +
                         [("standard", 0)])
def test_W_inventory(n, fam, k):
    V, M = _module(fam, k, n)
    rep = sg.classify_W(V, Dmax=3)
    assert sg.inventory(rep) == sorted(sg.engine_W(fam, k, n))
    assert sg.verify_degree_lemma(rep, M)
    assert sg.raw_recheck(M, rep)
    assert sg.cartan_invariant(M, rep)


@pytest.mark.parametrize("fam,k", [("theta", 1), ("bar", 1), ("bar", 2)])
def test_ann_mode_agrees_with_lambda_mode(fam, k):
    V, _ = _module(fam, k, 2)
    a = sg.classify_W(V, 2, mode="W")
    b = sg.classify_W(V, 2, mode="ann")
    assert sg.inventory(a) == sg.inventory(b)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_dmax_stable(k):
    V = build_theta(k, 2)
    assert sg.dmax_stable(lambda d: sg.classify_W(V, d))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_proof_identities_theta(n, k):
    V, M = _module("theta", k, n)
    rep = sg.classify_W(V, 2)
    for sv in rep.vectors:
        res = sg.proof_identities(M, sv.vector.terms)
        assert all(res.values()), res


def test_theta_shape():
    # the Theta^k vector is xi^n ⊗ v_n: xi_* with xi_n removed, d-degree 0
    V, M = _module("theta", 2, 3)
    (sv,) = sg.classify_W(V, 2).vectors
    assert {(k, M.basis.labels[b][0]) for k, b in sv.vector.terms} == {(0, 0b011)}


@pytest.mark.parametrize("variant", ["S", "S'"])
@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("fam,k", [("theta", k) for k in range(4)] + [("bar", k) for k in range(4)] +
                         [("standard", 0)])
def test_S_inventory(variant, n, fam, k):
    V, _ = _module(fam, k, n)
    rep = sg.classify_S(V, variant, 2)
    assert sg.inventory(rep) == sorted(sg.engine_S(fam, k, n, variant))


def test_S_variants_differ_only_at_n2():
    V2, V3 = build_standard(2), build_standard(3)
    assert sg.classify_S(V2, "S", 2).count == 2
    assert sg.classify_S(V2, "S'", 2).count == 3
    assert sg.inventory(sg.classify_S(V3, "S", 2)) == sg.inventory(sg.classify_S(V3, "S'", 2))


def test_star_dt_outside_span():
    assert not sg.s_conditions(2, 2, "S'").star_in_span


@pytest.mark.parametrize("alpha", [1, Fraction(-1, 2)])
@pytest.mark.parametrize("fam,k", [("theta", 1), ("bar", 1), ("bar", 2), ("standard", 0)])
def test_twist_invariance_W(alpha, fam, k):
    V, _ = _module(fam, k, 2)
    assert sg.inventory(sg.classify_W(V, 2, alpha)) == sg.inventory(sg.classify_W(V, 2))


def test_degeneracy_locus_small():
    g = [-1, 0, Fraction(1, 2), 1]
    res = sg.degeneracy_grid(g)
    for (a, b), tot in res.items():
        assert (tot > 1) == (a == 0 or a + b == 0), (a, b, tot)


def test_degeneracy_generic_module():
    d = sg.degeneracy(build_M_ab(Fraction(1, 2), Fraction(1, 3)))
    assert d["nontrivial"] == 0 and d["total"] == 1


def test_weight_str():
    assert sg.weight_str((0, Fraction(-1, 2))) == "(0,-1/2)"
    assert sg.weight_str(None) == "?"


def test_cartan_size():
    _, M = _module("theta", 0, 2)
    assert len(cartan(M.algebra)) == 3
