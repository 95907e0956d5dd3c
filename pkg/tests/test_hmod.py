import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qhgeom.exactcore import QQ, GF, ShapeMismatch
from qhgeom.quasihopf import build_group_hopf, trivial_hopf
from qhgeom.hmod import (HModule, HMorphism, associator_component, associator_inverse_component,
                         braiding_component, check_currying, check_internal_identities,
                         check_morphism, compose, composition, curry, end_obj, ev_sandwich,
                         evaluation, identity, internal_hom, internal_tensor, left_unitor,
                         module_from_weights, morphism_basis, otimes, right_unitor, tensor_maps,
                         tensor_obj, trivial_module, uncurry, unit_hom, unit_obj, _comp_tensor,
                         _witness)


@pytest.fixture(scope="module")
def z2():
    H = build_group_hopf((2,), QQ)
    sign = HModule(H, [0], QQ.array([[[1]], [[-1]]]), name="sign")
    triv = trivial_module(H, [0], name="triv")
    return H, sign, triv


def _rand_combo(F, mats, rng):
    out = F.zeros(mats[0].shape)
    for m in mats:
        out = F.add(out, F.smul(F.scalar(int(rng.integers(-2, 3))), m))
    return out


# --- morphisms and tensor products

def test_check_morphism_examples(z2):
    H, sign, triv = z2
    assert check_morphism(identity(sign), sign, sign)
    assert check_morphism(QQ.zeros((1, 1)), sign, triv)
    assert not check_morphism(QQ.eye(1), sign, triv)
    with pytest.raises(ShapeMismatch):
        check_morphism(QQ.eye(2), sign, triv)


def test_tensor_dimensions():
    H = trivial_hopf(QQ)
    V = trivial_module(H, [0, 0, 1])
    W = trivial_module(H, [0, 1])
    assert tensor_obj(V, W).space.dims == {0: 2, 1: 3, 2: 1}


def test_sign_times_sign_is_trivial(z2):
    H, sign, triv = z2
    T = tensor_obj(sign, sign)
    assert QQ.equal(T.rho, triv.rho)


def test_unit_objects():
    H = build_group_hopf((2, 2, 2), QQ)
    for k in (0, 1, -2):
        I = unit_obj(H, k)
        assert I.space.dims == {k: 1}
        assert QQ.equal(I.rho[:, 0, 0], H.counit)


def test_unitors_are_morphisms(octonion_probes):
    V = octonion_probes[0]
    assert left_unitor(V).check() and right_unitor(V).check()


def test_trivial_associator_is_identity():
    H = build_group_hopf((2, 2), QQ)
    V = module_from_weights(H, [(1, 0), (0, 1)], [0, 1])
    assert QQ.equal(associator_component(V, V, V).matrix, QQ.eye(8))


def test_octonion_associator_on_regular_module(octonion):
    HF = octonion[2]
    from qhgeom.hmod import regular_module
    R = regular_module(HF)
    P = associator_component(R, R, R)
    Pi = associator_inverse_component(R, R, R)
    assert not QQ.equal(P.matrix, QQ.eye(512))
    assert QQ.equal(QQ.dot(P.matrix, Pi.matrix), QQ.eye(512))
    assert P.check() and Pi.check()


def test_pentagon_and_triangle(octonion_probes):
    V, W, X, Y = octonion_probes[:4]
    F = V.F
    lhs = associator_component(V, W, tensor_obj(X, Y)) @ associator_component(tensor_obj(V, W), X, Y)
    rhs = tensor_maps(identity(V), associator_component(W, X, Y)) @ \
        associator_component(V, tensor_obj(W, X), Y) @ \
        tensor_maps(associator_component(V, W, X), identity(Y))
    assert F.equal(lhs.matrix, rhs.matrix)
    I = unit_obj(V.H)
    tri = tensor_maps(identity(V), left_unitor(W)) @ associator_component(V, I, W)
    assert F.equal(tri.matrix, tensor_maps(right_unitor(V), identity(W)).matrix)


def test_braiding_signs():
    H = trivial_hopf(QQ)
    even = trivial_module(H, [0, 0])
    odd = trivial_module(H, [1, 1])
    flip = QQ.zeros((4, 4))
    for v in range(2):
        for w in range(2):
            flip[w * 2 + v, v * 2 + w] = 1
    assert QQ.equal(braiding_component(even, even).matrix, flip)
    assert QQ.equal(braiding_component(odd, odd).matrix, QQ.smul(-1, flip))


def test_octonion_braiding_squares_to_one(octonion_probes):
    V, W = octonion_probes[0], octonion_probes[3]
    t = braiding_component(V, W)
    assert t.check()
    assert QQ.equal((braiding_component(W, V) @ t).matrix, QQ.eye(V.dim * W.dim))


def test_braiding_is_natural(octonion, wmod):
    HF = octonion[2]
    rng = np.random.default_rng(3)
    V = wmod(HF, 1, 1, 0, 0)
    W = wmod(HF, 1, 2, 0, 0)
    fs, gs = morphism_basis(V, V), morphism_basis(W, W)
    f = HMorphism(V, V, _rand_combo(QQ, fs, rng))
    g = HMorphism(W, W, _rand_combo(QQ, gs, rng))
    lhs = braiding_component(V, W) @ tensor_maps(f, g)
    rhs = tensor_maps(g, f) @ braiding_component(V, W)
    assert QQ.equal(lhs.matrix, rhs.matrix)


# --- internal homs

def test_internal_hom_dimensions():
    H = trivial_hopf(QQ)
    V = trivial_module(H, [0, 1])
    assert end_obj(V).space.dims == {-1: 1, 0: 2, 1: 1}
    W = trivial_module(H, [0, 0, 2])
    assert internal_hom(unit_obj(H), W).space.dims == W.space.dims


def test_end_of_sign_is_trivial(z2):
    H, sign, triv = z2
    assert QQ.equal(end_obj(sign).rho, triv.rho)


def test_internal_hom_is_a_module(octonion_probes):
    M = internal_hom(octonion_probes[0], octonion_probes[1])
    assert M.check().ok


# --- currying

def test_curry_in_the_hopf_case():
    H = build_group_hopf((2, 2), QQ)
    V = module_from_weights(H, [(1, 0), (0, 1)], [0, 0])
    W = module_from_weights(H, [(0, 1), (1, 0)], [0, 1])
    X = module_from_weights(H, [(1, 1), (1, 1), (0, 0)], [0, 1, 0])
    rng = np.random.default_rng(0)
    VW = tensor_obj(V, W)
    f = _rand_combo(QQ, morphism_basis(VW, X), rng)
    g = curry(HMorphism(VW, X, f), V, W)
    for v in range(V.dim):
        gv = g.matrix[:, v].reshape(X.dim, W.dim)
        assert QQ.equal(gv, f.reshape(X.dim, V.dim, W.dim)[:, v, :])


def test_curry_of_left_unitor_is_unit_hom(octonion_probes):
    V = octonion_probes[1]
    g = curry(left_unitor(V), unit_obj(V.H), V)
    assert QQ.equal(g.matrix[:, 0].reshape(V.dim, V.dim), unit_hom(V))


def test_ev_of_unit_hom_is_beta(octonion_probes):
    V = octonion_probes[2]
    H = V.H
    e = evaluation(V, V)
    one = unit_hom(V).reshape(-1)
    for j in range(V.dim):
        v = V.basis_vector(j)
        assert QQ.equal(e(np.kron(one, v)), V.act_vector(H.beta, v))


def test_ev_is_application_for_trivial_h():
    H = trivial_hopf(QQ)
    V = trivial_module(H, [0, 1])
    W = trivial_module(H, [0, 1, 1])
    e = evaluation(V, W)
    L = QQ.array([[1, 0], [0, 2], [0, 3]])
    v = QQ.array([5, 7])
    assert QQ.equal(e(np.kron(L.reshape(-1), v)), QQ.dot(L, v))


def test_uncurry_is_ev_after_g_tensor_id(octonion, wmod):
    from conftest import WEIGHTS
    HF = octonion[2]
    V, W = wmod(HF, 1, 2, 0, 1), wmod(HF, 3, 4, 1, 0)
    X = module_from_weights(HF, WEIGHTS * 2, [0] * 8 + [1] * 8)
    rng = np.random.default_rng(1)
    hWX = internal_hom(W, X)
    gs = morphism_basis(V, hWX)
    assert gs
    g = HMorphism(V, hWX, _rand_combo(QQ, gs, rng))
    lhs = uncurry(g, W)
    rhs = evaluation(W, X) @ tensor_maps(g, identity(W))
    assert QQ.equal(lhs.matrix, rhs.matrix)
    assert QQ.equal(curry(lhs, V, W).matrix, g.matrix)


def test_currying_round_trips(octonion_probes):
    V, W = octonion_probes[:2]
    rep, nf, ng = check_currying(V, W, tensor_obj(V, W))
    assert rep.ok, str(rep)
    assert nf == ng and nf > 0


@settings(max_examples=6, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 1)), min_size=3, max_size=3))
def test_currying_on_random_weight_modules(spec):
    from qhgeom import twistfun as tf
    from qhgeom.quasihopf import twist_hopf
    from conftest import WEIGHTS
    H, T = tf.build_octonion_twist()
    HF = twist_hopf(H, T)
    mods = [module_from_weights(HF, [WEIGHTS[w], WEIGHTS[(w + 3) % 8]], [d, 1 - d])
            for w, d in spec]
    rep, nf, ng = check_currying(*mods)
    assert rep.ok and nf == ng


# --- ev, composition and the internal tensor product

def test_structure_maps_are_morphisms(octonion_probes):
    V, W, X, Y = octonion_probes[:4]
    assert evaluation(V, W).check()
    assert composition(V, W, X).check()
    assert internal_tensor(V, W, X, Y).check()


def test_composition_is_composition_for_trivial_h():
    H = trivial_hopf(QQ)
    V, W, X = trivial_module(H, [0, 1]), trivial_module(H, [0]), trivial_module(H, [1, 1])
    c = composition(V, W, X)
    Lp = QQ.array([[2], [3]])
    L = QQ.array([[1, 4]])
    out = c(np.kron(Lp.reshape(-1), L.reshape(-1))).reshape(2, 2)
    assert QQ.equal(out, QQ.dot(Lp, L))
    one = unit_hom(W)
    assert QQ.equal(c(np.kron(Lp.reshape(-1), QQ.dot(one, L).reshape(-1))).reshape(2, 2),
                    QQ.dot(Lp, L))


def test_internal_tensor_for_trivial_h():
    H = trivial_hopf(QQ)
    V, W = trivial_module(H, [0, 0]), trivial_module(H, [0])
    X, Y = trivial_module(H, [0]), trivial_module(H, [0, 0])
    t = internal_tensor(V, W, X, Y)
    L = QQ.array([[1, 2]])
    Lp = QQ.array([[3], [5]])
    out = t(np.kron(L.reshape(-1), Lp.reshape(-1))).reshape(2, 2)
    assert QQ.equal(out, np.kron(L, Lp))
    ones = t(np.kron(unit_hom(V).reshape(-1), unit_hom(X).reshape(-1)))
    assert QQ.equal(ones.reshape(2, 2), QQ.eye(2))


def test_element_routes_match_structure_maps(octonion_probes):
    """compose / ev_sandwich / otimes against the literal morphisms built by
    currying, on every pair of basis elements."""
    V, W, X, Y = octonion_probes[:4]
    F = QQ
    c = composition(V, W, X)
    for p in range(X.dim * W.dim):
        Lp = F.eye(X.dim * W.dim)[p].reshape(X.dim, W.dim)
        for q in range(W.dim * V.dim):
            L = F.eye(W.dim * V.dim)[q].reshape(W.dim, V.dim)
            lit = c(np.kron(Lp.reshape(-1), L.reshape(-1))).reshape(X.dim, V.dim)
            assert F.equal(lit, compose(V, W, X, Lp, L))
    e = evaluation(V, W)
    S = ev_sandwich(V, W)
    for q in range(W.dim * V.dim):
        L = F.eye(W.dim * V.dim)[q].reshape(W.dim, V.dim)
        for j in range(V.dim):
            v = V.basis_vector(j)
            assert F.equal(e(np.kron(L.reshape(-1), v)), F.dot(S(L), v))
    t = internal_tensor(V, W, X, Y)
    for p in range(W.dim * V.dim):
        L = F.eye(W.dim * V.dim)[p].reshape(W.dim, V.dim)
        for q in range(Y.dim * X.dim):
            Lp = F.eye(Y.dim * X.dim)[q].reshape(Y.dim, X.dim)
            lit = t(np.kron(L.reshape(-1), Lp.reshape(-1)))
            assert F.equal(lit.reshape(W.dim * Y.dim, V.dim * X.dim), otimes(V, W, X, Y, L, Lp))


def test_internal_identities_on_octonion_probes(octonion_probes):
    rep = check_internal_identities(*octonion_probes)
    assert rep.ok, str(rep)
    assert len(rep) == 9


def test_composition_is_not_strictly_associative(octonion_probes):
    U, V, W, X = octonion_probes[:4]
    lhs = QQ.einsum("oip,ijk->ojkp", _comp_tensor(U, V, X), _comp_tensor(V, W, X))
    rhs = QQ.einsum("ors,sti->orti", _comp_tensor(U, W, X), _comp_tensor(U, V, W))
    assert _witness(QQ, lhs, rhs) is not None


def test_internal_identities_over_a_prime_field():
    from qhgeom import twistfun as tf
    from qhgeom.quasihopf import twist_hopf
    H, T = tf.build_octonion_twist(GF(5))
    HF = twist_hopf(H, T)
    from conftest import WEIGHTS
    mods = [module_from_weights(HF, [WEIGHTS[i], WEIGHTS[(i + 2) % 8]], [i % 2, 0])
            for i in range(1, 6)]
    assert check_internal_identities(*mods).ok
