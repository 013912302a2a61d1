import pytest

from confkit.annihilation import (AnnElement, NotEigenvector, ann_bracket, ann_jacobi_report, cartan,
                                  oracle_match, weight_of)
from confkit.conformal import build_W
from confkit.repn import build_standard, tens


@pytest.mark.parametrize("n", [0, 1, 2])
def test_oracle_matches_commutators(n):
    rep = oracle_match(build_W(n), 4)
    assert rep.ok, rep.failures[:3]
    assert rep.info["compared_columns"] > 0


def test_oracle_rejects_wrong_sign():
    assert not oracle_match(build_W(1), 2, fun_sign=-1).ok


def test_ann_jacobi():
    assert ann_jacobi_report(build_W(1), 3).ok


def test_ann_bracket_t_dt():
    W = build_W(0)
    one = W.basis.index[("fun", 0)]
    # [t^1, t^2] as fields t d_t, t^2 d_t gives t^2 d_t
    br = ann_bracket(W, AnnElement.gen(one, 1), AnnElement.gen(one, 2))
    assert br.as_dict() == {(one, 2): 1}


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        AnnElement.gen(0, -1)


def test_cartan_weights_on_tens():
    M = tens(build_standard(2))
    assert len(cartan(M.algebra)) == 3
    v = M.vec(0)
    w = weight_of(M, v)
    assert len(w) == 3
    with pytest.raises(NotEigenvector):
        weight_of(M, M.vec(0) + M.vec(1).d())
