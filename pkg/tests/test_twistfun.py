import pytest

from qhgeom.hmod import compose
from qhgeom.algmod import check_algebra, check_bimodule
from qhgeom import diffgeo as dg
from qhgeom import twistfun as tf


@pytest.mark.parametrize("name", ["abelian-twist-plane", "octonion-twist", "octonion-exterior"])
def test_twisted_examples_check_out(name, twisted_examples):
    ex = twisted_examples(name)
    rep = tf.check_twisted_example(ex)
    assert rep.ok, str(rep.failures())
    assert any(n.startswith("diff: gamma(diff^") for n in rep.names())


def test_twisted_derham_without_the_filtration(twisted_examples):
    rep = tf.check_twisted_example(twisted_examples("abelian-twist-fp"), full=False)
    assert rep.ok, str(rep.failures())


def test_twisted_differential_is_nilpotent(twisted_examples):
    for name in ("octonion-exterior", "abelian-twist-fp"):
        ex = twisted_examples(name)
        M, F = ex.AF.module, ex.AF.F
        DF = ex.calcF.D
        assert not F.is_zero(DF)
        assert F.is_zero(compose(M, M, M, DF, DF))
        assert dg.derivation_condition(ex.AF, DF) is None


def test_twisted_differential_has_order_one(twisted_examples):
    ex = twisted_examples("octonion-exterior")
    filtF = dg.diff_filtration(ex.VF)
    assert filtF.stable and filtF.dims()[-1] == ex.V.dim ** 2
    assert dg.order_of(filtF, ex.calcF.D) == 1


def test_twisted_exterior_algebra(twisted_examples):
    ex = twisted_examples("octonion-exterior")
    assert check_algebra(ex.AF).ok and check_bimodule(ex.VF).ok
    assert ex.A.associativity_witness() is None
    assert ex.AF.associativity_witness() is not None


def test_quantum_plane_commutation(twisted_examples):
    """Twisting by the bicharacter makes x and y anticommute."""
    AF = twisted_examples("abelian-twist-plane").AF
    F = AF.F
    x, y = AF.element(x=1), AF.element(y=1)
    assert F.equal(AF.mult(y, x), F.smul(-1, AF.mult(x, y)))
    assert not F.is_zero(AF.mult(x, y))


@pytest.mark.parametrize("spec", [(1, 2, 0, 1), (3, 4, 1, 0), (7, 1, 1, 1)])
def test_gamma_on_weight_modules(spec, octonion, wmod):
    H, T, HF = octonion
    U, W = wmod(H, *spec), wmod(H, 5, 6, 0, 0)
    for X, Y in ((U, U), (U, W)):
        rep = tf.check_gamma(X, Y, T, HF)
        assert rep.ok, str(rep)


def test_gamma_depends_on_the_twist(octonion):
    """On an abelian group every cochain gives an equivariant gamma, so the
    check that matters is that gamma is a nontrivial signed map that tells
    the twists apart."""
    H, T, HF = octonion
    from qhgeom.algmod import graded_group_algebra
    from qhgeom.quasihopf import twist_from_cochain
    M = graded_group_algebra(H).module
    F = H.F
    other = twist_from_cochain(H, lambda p, q: -1 if (p[0] and q[1]) else 1)
    G = tf.gamma_sandwich(M, M, T).matrix()
    assert not F.equal(G, F.eye(G.shape[0]))
    assert not F.equal(G, tf.gamma_sandwich(M, M, other).matrix())


def test_coboundary_of_octonion_cochain_is_nontrivial():
    H, T = tf.build_octonion_twist()
    phi = tf.phi_from_coboundary(H, tf.octonion_sigma)
    assert not H.is_one(phi)
    phi_ab = tf.phi_from_coboundary(H, lambda p, q: -1 if (p[0] and q[1]) else 1)
    assert H.is_one(phi_ab)
