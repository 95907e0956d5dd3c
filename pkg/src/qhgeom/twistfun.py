"""
Cochain twisting of algebras, bimodules and differential structures,
the coherence map gamma on internal homs, and the checks that kernels
computed from scratch over H_F are the gamma-images of the untwisted ones.
"""

import itertools

import numpy as np

from .exactcore import QQ, GF, rref
from .quasihopf import (ValidationReport, build_group_hopf, twist_from_cochain, twist_hopf,
                        validate_quasi_hopf, TwistData)
from .hmod import HModule, Sandwich
from .algmod import (AlgebraObject, BimoduleObject, check_algebra, check_bimodule,
                     exterior_algebra, graded_group_algebra, truncated_derham)
from . import diffgeo as dg


# ---------------------------------------------------------------------------
# cochains

def octonion_sigma(p, q):
    """Normalized +-1 cochain on Z_2^3 whose coboundary is not trivial."""
    x, y = p, q
    e = (y[0] * x[1] * x[2] + x[0] * y[1] * x[2] + x[0] * x[1] * y[2]
         + x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
    return -1 if e % 2 else 1


def coboundary(sigma, orders):
    """d sigma(p, q, r) = sigma(q, r) sigma(p+q, r)^-1 sigma(p, q+r) sigma(p, q)^-1
    on every triple, for a +-1 valued sigma."""
    els = list(itertools.product(*[range(o) for o in orders]))

    def add(a, b):
        return tuple((s + t) % o for s, t, o in zip(a, b, orders))
    return {(p, q, r): sigma(q, r) * sigma(add(p, q), r) * sigma(p, add(q, r)) * sigma(p, q)
            for p in els for q in els for r in els}


def phi_from_coboundary(H, sigma):
    """phi_F predicted from d sigma: sum dsigma(p,q,r)^-1 e_p (x) e_q (x) e_r
    (for the untwisted H with trivial phi, in the character basis)."""
    g = H.meta["group"]
    orders = g["orders"]
    els = [tuple(e) for e in g["elements"]]
    F = H.F
    ds = coboundary(sigma, orders)
    P = H.idempotents()
    S = F.zeros((H.n,) * 3)
    for i, p in enumerate(els):
        for j, q in enumerate(els):
            for k, r in enumerate(els):
                S[i, j, k] = F.inv(F.scalar(ds[(p, q, r)]))
    return F.einsum("pqr,pi,qj,rk->ijk", S, P, P, P)


def build_octonion_twist(F=QQ):
    H = build_group_hopf((2, 2, 2), F, basis="characters")
    return H, twist_from_cochain(H, octonion_sigma)


def bicharacter_sigma(p, q):
    return -1 if (p[0] * q[1]) % 2 else 1


def build_abelian_twist(F=None):
    """Z_2 x Z_2 with the bicharacter (-1)^{p_0 q_1}; a cocycle, so phi_F = 1
    while R_F is not."""
    F = F or GF(3)
    H = build_group_hopf((2, 2), F, basis="characters")
    return H, twist_from_cochain(H, bicharacter_sigma)


# ---------------------------------------------------------------------------
# the functor on algebras and bimodules

def _same_module(M, HF, name=None):
    return HModule(HF, M.degrees, M.rho, M.labels, name or M.name)


def twist_algebra(A, T, HF=None):
    """A with product a * b = mu(F^-1 |> (a (x) b)) over H_F."""
    H, F = A.H, A.F
    if not isinstance(T, TwistData):
        T = TwistData(H, T)
    HF = HF or twist_hopf(H, T)
    rho = A.module.rho
    mu = F.einsum("ij,iax,jby,xyc->abc", T.F_inv, rho, rho, A.mu)
    M = _same_module(A.module, HF, A.name + "_F")
    out = AlgebraObject(M, mu, A.unit, name=A.name + "_F")
    out.words = None
    out.generators = getattr(A, "generators", None)
    return out


def twist_bimodule(V, T, AF):
    """V with l_F = l o F^-1 and r_F = r o F^-1 over twist_algebra(V.A)."""
    F = V.F
    if not isinstance(T, TwistData):
        T = TwistData(V.H, T)
    rA, rV = V.A.module.rho, V.module.rho
    lt = F.einsum("ij,iax,jby,xyc->abc", T.F_inv, rA, rV, V.lt)
    rt = F.einsum("ij,iax,jby,xyc->abc", T.F_inv, rV, rA, V.rt)
    M = _same_module(V.module, AF.H, V.name + "_F")
    return BimoduleObject(AF, M, lt, rt, name=V.name + "_F", frame=V.frame)


# ---------------------------------------------------------------------------
# gamma

def gamma_sandwich(V, W, T, inverse=False):
    """gamma(L) = sum F^-1_1 |> . o L o S(F^-1_2) |> . as a Sandwich on
    hom(V, W); the inverse uses F in place of F^-1."""
    H, F = V.H, V.F
    f = T.F if inverse else T.F_inv
    Sf = F.einsum("ij,jk->ik", f, H.anti)
    # terms indexed by the first leg i:  rho_W(e_i) L rho_V(sum_j f[i,j] S(e_j))
    Q = F.einsum("ij,jab->iab", Sf, V.rho)
    return Sandwich(F, W.rho, Q).compress()


def coherence_gamma(V, W, T):
    return gamma_sandwich(_m(V), _m(W), T)


def coherence_gamma_inverse(V, W, T):
    return gamma_sandwich(_m(V), _m(W), T, inverse=True)


def _m(V):
    return getattr(V, "module", V)


def check_gamma(V, W, T, HF):
    """gamma is H_F-equivariant (from the H_F hom action to the H one) and
    gamma^-1 inverts it, on the basis of hom(V, W)."""
    from .hmod import hom_action_basis
    Vm, Wm = _m(V), _m(W)
    F = Vm.F
    VF, WF = _same_module(Vm, HF), _same_module(Wm, HF)
    g = gamma_sandwich(Vm, Wm, T)
    gi = gamma_sandwich(Vm, Wm, T, inverse=True)
    G, Gi = g.matrix(), gi.matrix()
    rep = ValidationReport()
    I = F.eye(G.shape[0])
    rep.add("gamma o gamma^-1 = id", F.equal(F.dot(G, Gi), I) and F.equal(F.dot(Gi, G), I))
    ok = True
    actH = hom_action_basis(Vm, Wm)
    actF = hom_action_basis(VF, WF)
    for i in range(Vm.H.n):
        if not F.equal(F.dot(G, actF[i].matrix()), F.dot(actH[i].matrix(), G)):
            ok = False
            break
    rep.add("gamma is equivariant", ok)
    return rep


def _gamma_rows(V, W, T, rows):
    g = gamma_sandwich(_m(V), _m(W), T)
    return g.apply_flat(rows) if len(rows) else rows


def _same_span(F, X, Y):
    if X.shape[0] != Y.shape[0]:
        return False
    if X.shape[0] == 0:
        return True
    return F.equal(rref(F, X)[0], rref(F, Y)[0])


# ---------------------------------------------------------------------------
# verification of the twisting isomorphisms

def verify_twisted_derivations(A, T, AF=None):
    F = A.F
    HF = AF.H if AF is not None else twist_hopf(A.H, T)
    AF = AF or twist_algebra(A, T, HF)
    der = dg.derivations(A)
    derF = dg.derivations(AF)
    rep = ValidationReport()
    rep.add("dims agree", der.dims == derF.dims, (der.dims, derF.dims))
    img = _gamma_rows(A.module, A.module, T, derF.basis)
    rep.add("gamma(der_F) = der", _same_span(F, img, der.basis))
    return rep


def verify_twisted_diff(V, T, VF, max_order=None):
    """For n = 0, 1, ... up to stabilization of both filtrations."""
    F = V.F
    filt = dg.diff_filtration(V, max_order)
    filtF = dg.diff_filtration(VF, max_order)
    rep = ValidationReport()
    rep.add("stabilization orders agree", filt.order == filtF.order, (filt.order, filtF.order))
    top = max(filt.order, filtF.order)
    if not (filt.stable and filtF.stable):
        top = min(filt.order, filtF.order)
    for n in range(top + 1):
        a, b = filt[n], filtF[n]
        img = _gamma_rows(V, V, T, b.basis)
        rep.add("gamma(diff^%d_F) = diff^%d" % (n, n), _same_span(F, img, a.basis),
                (a.dims, b.dims))
    rep.dims = filt.dims()
    return rep


def twist_calculus(calc, T, AF):
    """D_F = gamma^-1(D), validated over H_F."""
    A = calc.A
    gi = gamma_sandwich(A.module, A.module, T, inverse=True)
    DF = gi(calc.D)
    return dg.check_calculus(AF, DF)


def verify_twisted_connections(calc, V, T, calcF, VF):
    F = V.F
    con = dg.connections(calc, V)
    conF = dg.connections(calcF, VF)
    rep = ValidationReport()
    rows = conF.rows
    if len(rows):
        img = np.concatenate([_gamma_rows(V, V, T, rows[:, :-1]), rows[:, -1:]], axis=1)
    else:
        img = rows
    rep.add("(gamma x psi)(con_F) = con", _same_span(F, img, con.rows), (con.dims, conF.dims))
    rep.add("affine dimensions agree", con.affine_dim() == conF.affine_dim(),
            (con.affine_dim(), conF.affine_dim()))
    return rep


# ---------------------------------------------------------------------------
# bundled twisted examples

class TwistedExample(object):
    """(H, T, H_F, A, A_F, calculus, twisted calculus)."""

    def __init__(self, H, T, A, name):
        self.H, self.T, self.name = H, T, name
        self.HF = twist_hopf(H, T)
        self.A = A
        self.AF = twist_algebra(A, T, self.HF)
        self.V = A.bimodule
        self.VF = twist_bimodule(self.V, T, self.AF)
        self.calc = dg.check_calculus(A)
        self.calcF = twist_calculus(self.calc, T, self.AF)
        self.AF.calculus = self.calcF.D


def octonion_group_example():
    H, T = build_octonion_twist()
    A = graded_group_algebra(H, "QZ2^3")
    return TwistedExample(H, T, A, "octonion-twist")


OCTONION_WEIGHTS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0)]


def octonion_exterior_example():
    """Lambda(t1..t4) over Q[Z_2^3] with D t4 = t1 t2, twisted by the octonion cochain."""
    H, T = build_octonion_twist()
    A = exterior_algebra(H, 4, weights=OCTONION_WEIGHTS, name="Lambda4")
    from .algmod import derivation_from_generators
    g = A.generators
    imgs = {j: A.F.zeros(A.dim) for j in g}
    imgs[g[3]] = A.mult(A.basis_vector(g[0]), A.basis_vector(g[1]))
    A.calculus = derivation_from_generators(A, imgs, 1)
    return TwistedExample(H, T, A, "octonion-exterior")


def abelian_plane_example():
    """F_3[x, y]/(x^3, y^3) over F_3[Z_2 x Z_2] twisted into a quantum plane."""
    H, T = build_abelian_twist()
    A = _truncated_poly(H, 3, [(1, 0), (0, 1)])
    return TwistedExample(H, T, A, "abelian-twist-plane")


def abelian_derham_example():
    """Two-variable truncated de Rham over F_3 with the Z_2 x Z_2 twist."""
    H, T = build_abelian_twist()
    A = truncated_derham(H, 3, 2, weights=[(1, 0), (0, 1)], name="dR2")
    return TwistedExample(H, T, A, "abelian-twist-fp")


def _truncated_poly(H, p, weights):
    """k[x, y]/(x^p, y^p) as the degree-0 part of the truncated de Rham algebra."""
    F = H.F
    D = truncated_derham(H, p, len(weights), weights=weights)
    idx = [i for i in range(D.dim) if D.degrees[i] == 0]
    mu = D.mu[np.ix_(idx, idx, idx)]
    M = D.module
    labels = [D.labels[i] for i in idx]
    rho = M.rho[:, idx][:, :, idx]
    mod = HModule(H, [0] * len(idx), rho, labels, "k[x,y]/(x^%d,y^%d)" % (p, p))
    A = AlgebraObject(mod, mu, F.eye(len(idx))[0], name=mod.name)
    A.calculus = F.zeros((len(idx), len(idx)))
    return A


def check_twisted_example(ex, full=True):
    """Validators, gamma, and the three kernel comparisons."""
    rep = ValidationReport()
    rep.extend(validate_quasi_hopf(ex.HF), "H_F: ")
    rep.extend(check_algebra(ex.AF), "A_F: ")
    rep.extend(check_bimodule(ex.VF), "V_F: ")
    rep.extend(check_gamma(ex.A.module, ex.A.module, ex.T, ex.HF), "gamma: ")
    rep.extend(verify_twisted_derivations(ex.A, ex.T, ex.AF), "derivations: ")
    if full:
        rep.extend(verify_twisted_diff(ex.V, ex.T, ex.VF), "diff: ")
        rep.extend(verify_twisted_connections(ex.calc, ex.V, ex.T, ex.calcF, ex.VF), "connections: ")
    return rep
