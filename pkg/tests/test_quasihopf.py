import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qhgeom.exactcore import GF, QQ
from qhgeom.quasihopf import (BadOrder, NotNormalized, QuasiHopf, TwistData, build_group_hopf,
                              trivial_hopf, twist_from_cochain, twist_hopf, validate_quasi_hopf)
from qhgeom import twistfun as tf


def test_trivial_hopf_validates():
    rep = validate_quasi_hopf(trivial_hopf(QQ))
    assert rep.ok, str(rep)
    assert "pentagon" in rep.names() and "triangularity" in rep.names()


@pytest.mark.parametrize("orders,F,dim", [((2, 2, 2), QQ, 8), ((4,), GF(5), 4),
                                          ((3, 3), GF(7), 9), ((2,), QQ, 2)])
@pytest.mark.parametrize("basis", ["group", "characters"])
def test_group_hopf_validates(orders, F, dim, basis):
    H = build_group_hopf(orders, F, basis=basis)
    assert H.n == dim
    assert validate_quasi_hopf(H).ok


def test_group_hopf_z4_over_q_in_group_basis():
    H = build_group_hopf((4,), QQ)
    assert H.n == 4 and validate_quasi_hopf(H).ok
    with pytest.raises(BadOrder):
        build_group_hopf((4,), QQ, basis="characters")


def test_bad_orders():
    with pytest.raises(BadOrder):
        build_group_hopf((0,), QQ)
    with pytest.raises(BadOrder):
        build_group_hopf((3,), GF(3))


def test_counit_and_antipode_of_unit():
    for H in (build_group_hopf((2, 2, 2), QQ), tf.build_octonion_twist()[0],
              tf.build_abelian_twist()[0]):
        for i in range(H.n):
            h = H.basis_element(i)
            assert H.eps(H.apply_S(h)) == H.eps(h)
        assert H.F.equal(H.apply_S(H.unit), H.unit)


def test_identity_twist_changes_nothing():
    H = build_group_hopf((2, 2, 2), QQ, basis="characters")
    assert twist_hopf(H, TwistData(H, H.one(2))).same_as(H)


def test_octonion_twist(octonion):
    H, T, HF = octonion
    F = HF.F
    rep = validate_quasi_hopf(HF)
    assert rep.ok, str(rep)
    assert not HF.is_one(HF.phi)
    assert not F.equal(HF.R, HF.one(2))
    assert F.equal(HF.tmul(HF.flip(HF.R), HF.R), HF.one(2))


def test_octonion_associator_matches_coboundary(octonion):
    """phi_F from the twisting formula against sum dsigma^-1 e_p (x) e_q (x) e_r."""
    H, T, HF = octonion
    assert H.F.equal(HF.phi, tf.phi_from_coboundary(H, tf.octonion_sigma))


def test_abelian_twist_is_a_cocycle_twist():
    H, T = tf.build_abelian_twist()
    HF = twist_hopf(H, T)
    assert validate_quasi_hopf(HF).ok
    assert HF.is_one(HF.phi)
    assert not HF.F.equal(HF.R, HF.one(2))


def test_twisting_back_by_the_inverse(octonion):
    H, T, HF = octonion
    assert twist_hopf(HF, T.inverse_twist(HF)).same_as(H)


def test_unnormalized_twist_rejected():
    H = build_group_hopf((2,), QQ, basis="characters")
    with pytest.raises(NotNormalized):
        TwistData(H, H.F.smul(2, H.one(2)))


def test_non_triangular_example(braided_z4):
    H = braided_z4
    F = H.F
    rep = validate_quasi_hopf(H)
    assert rep.ok
    assert not F.equal(H.tmul(H.flip(H.R), H.R), H.one(2))


def test_validator_reports_a_wrong_associator(octonion):
    """Replacing phi_F by 1 (x) 1 (x) 1 keeps quasi-coassociativity (the
    group is abelian, so Delta_F = Delta) but breaks both hexagons."""
    H, T, HF = octonion
    one3 = HF.one(3)
    bad = QuasiHopf(HF.F, HF.labels, HF.mul, HF.unit, HF.cop, HF.counit, HF.anti, HF.alpha,
                    HF.beta, one3, HF.R, phi_inv=one3, triangular=True, meta=HF.meta)
    rep = validate_quasi_hopf(bad)
    assert rep["quasi-coassociativity"]
    assert not rep["hexagon (Delta,id)"] and not rep["hexagon (id,Delta)"]
    assert rep.failures()[0][2] is not None


def test_validator_reports_a_false_triangular_flag(braided_z4):
    H = braided_z4
    flagged = QuasiHopf(H.F, H.labels, H.mul, H.unit, H.cop, H.counit, H.anti, H.alpha, H.beta,
                        H.phi, H.R, phi_inv=H.phi_inv, triangular=True, meta=H.meta)
    assert not validate_quasi_hopf(flagged)["triangularity"]


_Z2SQ = list(itertools.product(range(2), range(2)))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.sampled_from([1, -1]), min_size=9, max_size=9))
def test_random_cochain_twists_validate(signs):
    """Every normalized +-1 cochain on Z_2 x Z_2 gives a valid triangular
    quasi-Hopf algebra whose associator is the coboundary."""
    vals = iter(signs)
    table = {(p, q): (1 if (p == (0, 0) or q == (0, 0)) else next(vals))
             for p in _Z2SQ for q in _Z2SQ}
    sigma = lambda p, q: table[(tuple(p), tuple(q))]
    H = build_group_hopf((2, 2), QQ, basis="characters")
    T = twist_from_cochain(H, sigma)
    HF = twist_hopf(H, T)
    assert validate_quasi_hopf(HF).ok
    assert H.F.equal(HF.phi, tf.phi_from_coboundary(H, sigma))
    assert twist_hopf(HF, T.inverse_twist(HF)).same_as(H)
