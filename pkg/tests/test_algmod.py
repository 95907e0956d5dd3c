import numpy as np
import pytest

from qhgeom.exactcore import QQ, nullspace
from qhgeom.quasihopf import trivial_hopf
from qhgeom.hmod import HMorphism, check_morphism, internal_hom, unit_hom
from qhgeom.algmod import (RelativeTensor, braiding_A, check_algebra, check_bimodule, curry_A,
                           exterior_algebra, free_module, hom_A, left_unitor_A, right_unitor_A,
                           uncurry_A)


def grassmann(n, F=QQ):
    return exterior_algebra(trivial_hopf(F), n)


@pytest.fixture(scope="module")
def octonion_algebra(twisted_examples):
    return twisted_examples("octonion-twist")


# --- algebras

@pytest.mark.parametrize("n", [1, 2, 3])
def test_grassmann_algebra_checks(n):
    A = grassmann(n)
    assert A.dim == 2 ** n
    rep = check_algebra(A)
    assert rep.ok, str(rep)
    assert A.associativity_witness() is None


def test_truncated_derham_checks(derham1, derham2):
    for A in (derham1, derham2):
        assert check_algebra(A).ok
        assert check_bimodule(A.bimodule).ok
    assert derham1.dim == 6 and derham2.dim == 36


def test_twisted_group_algebra_is_weakly_but_not_plainly_associative(octonion_algebra):
    AF = octonion_algebra.AF
    rep = check_algebra(AF)
    assert rep.ok, str(rep)
    assert AF.associativity_witness() is not None
    assert octonion_algebra.A.associativity_witness() is None


def test_corrupted_product_fails_unitality():
    A = grassmann(1)
    mu = A.F.smul(2, A.mu)
    from qhgeom.algmod import AlgebraObject
    bad = AlgebraObject(A.module, mu, A.unit)
    assert not check_algebra(bad)["unitality"]


def test_free_module_is_a_bimodule(derham1):
    V = free_module(derham1, degrees=(0, 1))
    assert V.dim == 12
    assert check_bimodule(V).ok


# --- relative tensor products

def test_grassmann_tensor_over_itself():
    A = grassmann(1)
    Q = RelativeTensor(A.bimodule, A.bimodule)
    assert Q.dims == {0: 1, 1: 1}
    assert Q.actions_descend()


def test_derham_tensor_over_itself(derham1):
    Q = RelativeTensor(derham1.bimodule, derham1.bimodule)
    assert Q.dim == 6
    assert check_bimodule(Q.bimodule).ok


def test_unitors_are_isomorphisms(derham1, octonion_algebra):
    for A in (derham1, octonion_algebra.AF):
        V = A.bimodule
        F = A.F
        for unitor in (left_unitor_A, right_unitor_A):
            u = unitor(V)
            assert u.matrix.shape == (V.dim, V.dim)
            assert check_morphism(u, u.source, u.target)
            assert nullspace(F, u.matrix).shape[0] == 0


def test_relative_braiding_is_an_involution(derham1, octonion_algebra):
    for A in (derham1, octonion_algebra.AF):
        V = A.bimodule
        F = A.F
        Q = RelativeTensor(V, V)
        t = braiding_A(V, V, Q, Q)
        assert F.equal(F.dot(t.matrix, t.matrix), F.eye(Q.dim))


def test_right_unitor_after_braiding_is_left_unitor(derham1):
    V = derham1.bimodule
    QAV = RelativeTensor(derham1.bimodule, V)
    QVA = RelativeTensor(V, derham1.bimodule)
    t = braiding_A(derham1.bimodule, V, QAV, QVA)
    F = derham1.F
    assert F.equal(F.dot(right_unitor_A(V, QVA).matrix, t.matrix), left_unitor_A(V, QAV).matrix)


# --- the curried left action

def test_lhat_of_unit_is_the_unit_hom(derham2, octonion_algebra):
    """lhat(1) is the identity for trivial H and the unit of end(V) in general,
    which for the octonion twist is not the identity matrix."""
    assert derham2.F.equal(derham2.bimodule.lhat(derham2.unit), derham2.F.eye(derham2.dim))
    A = octonion_algebra.AF
    V = A.bimodule
    u = unit_hom(V.module).reshape(V.dim, V.dim)
    assert A.F.equal(V.lhat(A.unit), u)
    assert not A.F.equal(u, A.F.eye(V.dim))


def test_lhat_is_multiplicative_for_trivial_h(derham1):
    V = derham1.bimodule
    F = derham1.F
    for i in range(derham1.dim):
        for j in range(derham1.dim):
            a, b = derham1.basis_vector(i), derham1.basis_vector(j)
            assert F.equal(V.lhat(derham1.mult(a, b)), F.dot(V.lhat(a), V.lhat(b)))


def test_lhat_is_a_morphism(octonion_algebra):
    V = octonion_algebra.AF.bimodule
    f = V.lhat_morphism()
    assert check_morphism(f, octonion_algebra.AF.module, internal_hom(V.module, V.module))


# --- A-linear maps

def test_hom_a_dimensions(derham1, octonion_algebra):
    A = grassmann(1)
    assert hom_A(A.bimodule, A.bimodule).dims == {0: 1, 1: 1}
    assert hom_A(derham1.bimodule, derham1.bimodule).dim == 6
    assert hom_A(octonion_algebra.AF.bimodule, octonion_algebra.AF.bimodule).dim == 8


def test_hom_a_from_a_is_the_module(derham1):
    W = free_module(derham1, degrees=(0, 1))
    assert hom_A(derham1.bimodule, W).dims == W.module.space.dims


def _brute_force_hom_a(V, W):
    """Graded maps L with L(a v) = (-1)^{|L||a|} a L(v), solved degree by degree."""
    F, A = V.F, V.A
    dV, dW = np.array(V.degrees), np.array(W.degrees)
    out = []
    for n in sorted({int(b - a) for a in dV for b in dW}):
        cells = [(x, y) for x in range(W.dim) for y in range(V.dim) if dW[x] - dV[y] == n]
        if not cells:
            continue
        blocks = []
        for i in range(A.dim):
            a = A.basis_vector(i)
            s = (-1) ** ((n * int(A.degrees[i])) % 2)
            La, Wa = V.lmat(a), W.lmat(a)
            cols = []
            for (x, y) in cells:
                E = F.zeros((W.dim, V.dim))
                E[x, y] = F.one
                cols.append(F.sub(F.dot(E, La), F.smul(s, F.dot(Wa, E))).reshape(-1))
            blocks.append(F.array(cols).T)
        M = np.concatenate(blocks)
        for k in nullspace(F, M):
            E = F.zeros((W.dim, V.dim))
            for c, (x, y) in zip(k, cells):
                E[x, y] = c
            out.append(E.reshape(-1))
    return out


@pytest.mark.parametrize("which", ["grassmann2", "derham1"])
def test_hom_a_matches_brute_force(which, derham1):
    A = grassmann(2) if which == "grassmann2" else derham1
    V = A.bimodule
    W = free_module(A, degrees=(0, 1))
    for X, Y in ((V, V), (V, W)):
        h = hom_A(X, Y)
        brute = _brute_force_hom_a(X, Y)
        assert h.dim == len(brute)
        assert all(h.contains(L) for L in brute)


def test_hom_a_routes_agree(octonion_algebra, derham1):
    for A in (derham1, octonion_algebra.AF):
        V = A.bimodule
        a, b = hom_A(V, V), hom_A(V, V, route="plain")
        assert a.sub.equals(b.sub)


def test_hom_a_bimodule(derham1):
    h = hom_A(derham1.bimodule, derham1.bimodule)
    assert check_bimodule(h.bimodule).ok


# --- relative currying

def test_relative_curry_round_trip(derham1, octonion_algebra):
    for A in (derham1, octonion_algebra.AF):
        V = A.bimodule
        F = A.F
        Q = RelativeTensor(V, V)
        full = F.einsum("ijk->kij", A.mu).reshape(A.dim, -1)
        assert Q.descends(full)
        f = HMorphism(Q.module, A.module, Q.induced(full))
        g = curry_A(f, Q)
        for L in g.matrix.T:
            assert hom_A(V, V).contains(L)
        back = uncurry_A(g, Q)
        assert F.equal(back.matrix, f.matrix)
