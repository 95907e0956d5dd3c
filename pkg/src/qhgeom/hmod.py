"""
Graded left modules over a quasi-Hopf algebra H and the braided closed
monoidal structure on them.

A module is a graded basis plus an action stack rho[i] (the matrix of the
basis element e_i of H acting on column vectors).  Elements of internal
homs hom(V, W) are plain (dim W x dim V) matrices; their basis is E_{w,v}
in row-major order, so a vectorised element is ``L.reshape(-1)``.

Two independent routes are provided.  The *literal* route builds the
evaluation, composition and internal tensor morphisms as matrices, by
currying composites of associators and braidings.  The *element* route
evaluates the same operations directly from universal elements of H
(see QuasiHopf.compose_element and friends) and is what the heavier
modules use.  Tests hold the two against each other.
"""

import threading
from functools import cached_property

import numpy as np
from gmpy2 import mpq

from .exactcore import (ExactError, GradedSpace, ShapeMismatch, nullspace, row_basis)
from .quasihopf import ValidationReport


class NotMorphism(ExactError):
    pass


# ---------------------------------------------------------------------------
# modules

class HModule(object):
    """Graded H-module given by an action stack (n, d, d)."""

    def __init__(self, H, degrees, rho=None, labels=None, name=None, rho_fn=None):
        self.H = H
        self.F = H.F
        self.space = GradedSpace(list(degrees), labels)
        self.degrees = self.space.degree_array()
        self.dim = self.space.dim
        if rho is not None:
            rho = self.F.array(rho)
            if rho.shape != (H.n, self.dim, self.dim):
                raise ShapeMismatch("action stack %s for module of dim %d over dim %d"
                                    % (rho.shape, self.dim, H.n))
        self._rho = rho
        self._rho_fn = rho_fn
        self._lock = threading.Lock()
        self.name = name or "V"
        self.factors = None      # (V, W) for tensor products
        self.hom_of = None       # (V, W) for internal homs
        self.summands = None     # (V, W) for direct sums
        self._cache = {}

    @property
    def rho(self):
        if self._rho is None:
            with self._lock:
                if self._rho is None:
                    self._rho = self.F.array(self._rho_fn())
        return self._rho

    def __repr__(self):
        return "HModule(%s, %s)" % (self.name, self.space.dims)

    @property
    def labels(self):
        return self.space.labels

    def act(self, h):
        """Matrix of h in H."""
        return self.F.einsum("i,ixy->xy", self.F.array(h), self.rho)

    def act_vector(self, h, v):
        return self.F.dot(self.act(h), self.F.array(v))

    @cached_property
    def parity(self):
        return self.space.parity(self.F)

    def basis_vector(self, j):
        e = self.F.zeros(self.dim)
        e[j] = self.F.one
        return e

    def cached(self, key, fn):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        val = fn()
        with self._lock:
            return self._cache.setdefault(key, val)

    def check(self):
        """Unit acts as 1, action is multiplicative and preserves degree."""
        F, H = self.F, self.H
        rep = ValidationReport()
        rep.add("unit acts trivially", F.equal(self.act(H.unit), F.eye(self.dim)))
        lhs = F.einsum("ixy,jyz->ijxz", self.rho, self.rho)
        rhs = F.einsum("ijk,kxz->ijxz", H.mul, self.rho)
        rep.add("action is multiplicative", F.equal(lhs, rhs))
        off = self.degrees[:, None] != self.degrees[None, :]
        rep.add("action preserves degree", F.is_zero(self.rho[:, off]))
        return rep


def module_from_weights(H, weights, degrees, labels=None, name=None):
    """Module spanned by weight vectors of an abelian group algebra."""
    return HModule(H, degrees, H.weight_action(weights), labels, name)


def trivial_module(H, degrees, labels=None, name=None):
    """H acting through the counit."""
    F = H.F
    d = len(degrees)
    rho = F.einsum("i,xy->ixy", H.counit, F.eye(d))
    return HModule(H, degrees, rho, labels, name)


def unit_obj(H, shift=0):
    """The unit object I (or its shift I[k])."""
    return trivial_module(H, [shift], ["1"], "I" if not shift else "I[%d]" % shift)


def regular_module(H, degree=0):
    """H acting on itself by left multiplication."""
    F = H.F
    rho = F.einsum("ijk->ikj", H.mul)
    return HModule(H, [degree] * H.n, rho, list(H.labels), "H")


def tensor_obj(V, W):
    """V (x) W with the coproduct action; basis index v*dW + w."""
    def key():
        return ("tensor", id(W))

    def make():
        H, F = V.H, V.F

        def rho():
            return F.einsum("ijk,jab,kcd->iacbd", H.cop, V.rho, W.rho).reshape(
                H.n, V.dim * W.dim, V.dim * W.dim)

        sp = V.space.tensor(W.space)
        T = HModule(H, sp.degrees, None, sp.labels, "(%s*%s)" % (V.name, W.name), rho)
        T.factors = (V, W)
        T._keep = (V, W)
        return T
    return V.cached(key(), make)


def direct_sum(V, W):
    def make():
        H, F = V.H, V.F

        def rho():
            out = F.zeros((H.n, V.dim + W.dim, V.dim + W.dim))
            out[:, :V.dim, :V.dim] = V.rho
            out[:, V.dim:, V.dim:] = W.rho
            return out

        sp = V.space.direct_sum(W.space)
        S = HModule(H, sp.degrees, None, sp.labels, "(%s+%s)" % (V.name, W.name), rho)
        S.summands = (V, W)
        S._keep = (V, W)
        return S
    return V.cached(("sum", id(W)), make)


def shifted(V, k):
    """V[k]: same action, degrees raised by k."""
    def make():
        S = HModule(V.H, [d + k for d in V.space.degrees], V.rho, V.labels,
                    "%s[%d]" % (V.name, k))
        S._keep = (V,)
        return S
    return V.cached(("shift", k), make)


def internal_hom(V, W):
    """hom(V, W) with the adjoint action h |> L = h1 L S(h2).

    The action stack is only materialised on first use of ``rho``; the
    element route acts through hom_action instead."""
    def make():
        H, F = V.H, V.F

        def rho():
            return F.einsum("hpq,pab,qdc->hacbd", H.adjoint, W.rho, V.rho).reshape(
                H.n, W.dim * V.dim, W.dim * V.dim)

        sp = V.space.hom(W.space)
        M = HModule(H, sp.degrees, None, sp.labels, "hom(%s,%s)" % (V.name, W.name), rho)
        M.hom_of = (V, W)
        M._keep = (V, W)
        return M
    return V.cached(("hom", id(W)), make)


def end_obj(V):
    return internal_hom(V, V)


# ---------------------------------------------------------------------------
# morphisms

class HMorphism(object):
    """A degree-0 linear map between modules, stored as (dim T x dim S)."""

    def __init__(self, source, target, matrix):
        F = source.F
        M = F.array(matrix)
        if M.shape != (target.dim, source.dim):
            raise ShapeMismatch("matrix %s for %s -> %s" % (M.shape, source, target))
        self.source = source
        self.target = target
        self.matrix = M
        self.F = F

    def __call__(self, v):
        return self.F.dot(self.matrix, self.F.array(v))

    def __matmul__(self, other):
        if other.target.dim != self.source.dim:
            raise ShapeMismatch("cannot compose %s after %s" % (self, other))
        return HMorphism(other.source, self.target, self.F.dot(self.matrix, other.matrix))

    def __add__(self, other):
        return HMorphism(self.source, self.target, self.F.add(self.matrix, other.matrix))

    def __sub__(self, other):
        return HMorphism(self.source, self.target, self.F.sub(self.matrix, other.matrix))

    def scale(self, c):
        return HMorphism(self.source, self.target, self.F.smul(c, self.matrix))

    def __eq__(self, other):
        return isinstance(other, HMorphism) and self.F.equal(self.matrix, other.matrix)

    __hash__ = None

    def __repr__(self):
        return "HMorphism(%s -> %s)" % (self.source.name, self.target.name)

    def check(self):
        return check_morphism(self.matrix, self.source, self.target)


def identity(V):
    return HMorphism(V, V, V.F.eye(V.dim))


def check_morphism(f, V, W):
    """True iff f is degree-preserving and H-linear.  Wrong shapes raise."""
    F = V.F
    M = f.matrix if isinstance(f, HMorphism) else F.array(f)
    if M.shape != (W.dim, V.dim):
        raise ShapeMismatch("matrix %s for %d -> %d" % (M.shape, V.dim, W.dim))
    off = W.degrees[:, None] != V.degrees[None, :]
    if not F.is_zero(M[off]):
        return False
    lhs = F.einsum("xy,iyz->ixz", M, V.rho)
    rhs = F.einsum("ixy,yz->ixz", W.rho, M)
    return F.equal(lhs, rhs)


def tensor_maps(f, g):
    """f (x) g for degree-0 maps (plain Kronecker product)."""
    F = f.F
    S = tensor_obj(f.source, g.source)
    T = tensor_obj(f.target, g.target)
    return HMorphism(S, T, F.einsum("ab,cd->acbd", f.matrix, g.matrix).reshape(T.dim, S.dim))


def _kron3(F, x, A, B, C):
    nA, nB, nC = A.shape[1], B.shape[1], C.shape[1]
    out = F.einsum("abc,aux,bvy,cwz->uvwxyz", x, A, B, C)
    return out.reshape(nA * nB * nC, nA * nB * nC)


def associator_component(U, V, W):
    """Phi_{U,V,W}: (U (x) V) (x) W -> U (x) (V (x) W)."""
    H = U.H
    M = _kron3(U.F, H.phi, U.rho, V.rho, W.rho)
    return HMorphism(tensor_obj(tensor_obj(U, V), W), tensor_obj(U, tensor_obj(V, W)), M)


def associator_inverse_component(U, V, W):
    H = U.H
    M = _kron3(U.F, H.phi_inv, U.rho, V.rho, W.rho)
    return HMorphism(tensor_obj(U, tensor_obj(V, W)), tensor_obj(tensor_obj(U, V), W), M)


def braiding_component(V, W):
    """tau(v (x) w) = (-1)^{|v||w|} R2.w (x) R1.v."""
    F, H = V.F, V.H
    RW = F.einsum("ab,avx,bwy->vwxy", H.R, V.rho, W.rho)   # (R1 v)(x)(R2 w)
    sign = np.array([[(-1) ** ((int(a) * int(b)) % 2) for b in W.degrees] for a in V.degrees])
    out = F.zeros((W.dim, V.dim, V.dim, W.dim))
    # output index (w, v) from input (x, y)
    out[...] = np.transpose(RW, (1, 0, 2, 3))
    out = F.mul(out, F.array(sign.T)[:, :, None, None])
    return HMorphism(tensor_obj(V, W), tensor_obj(W, V), out.reshape(W.dim * V.dim, V.dim * W.dim))


def left_unitor(V):
    I = unit_obj(V.H)
    return HMorphism(tensor_obj(I, V), V, V.F.eye(V.dim))


def right_unitor(V):
    I = unit_obj(V.H)
    return HMorphism(tensor_obj(V, I), V, V.F.eye(V.dim))


# ---------------------------------------------------------------------------
# the closed structure, literal route

def curry(f, V=None, W=None):
    """zeta(f): V -> hom(W, X) for f: V (x) W -> X."""
    if V is None:
        V, W = f.source.factors
    X = f.target
    F, H = V.F, V.H
    f3 = f.matrix.reshape(X.dim, V.dim, W.dim)
    g = F.einsum("ij,xab,iav,jbw->xwv", H.curry_element, f3, V.rho, W.rho)
    return HMorphism(V, internal_hom(W, X), g.reshape(X.dim * W.dim, V.dim))


def uncurry(g, W=None):
    """zeta^{-1}(g): V (x) W -> X for g: V -> hom(W, X)."""
    V = g.source
    if W is None:
        W, X = g.target.hom_of
    else:
        X = g.target.hom_of[1]
    F, H = V.F, V.H
    g3 = g.matrix.reshape(X.dim, W.dim, V.dim)
    f = F.einsum("ij,ixy,ybv,jbw->xvw", H.ev_element, X.rho, g3, W.rho)
    return HMorphism(tensor_obj(V, W), X, f.reshape(X.dim, V.dim * W.dim))


def evaluation(V, W):
    """ev: hom(V, W) (x) V -> W."""
    return uncurry(identity(internal_hom(V, W)), V)


def composition(V, W, X):
    """Internal composition hom(W, X) (x) hom(V, W) -> hom(V, X)."""
    P, Q = internal_hom(W, X), internal_hom(V, W)
    f = evaluation(W, X) @ tensor_maps(identity(P), evaluation(V, W)) @ \
        associator_component(P, Q, V)
    return curry(f, tensor_obj(P, Q), V)


def internal_tensor(V, W, X, Y):
    """hom(V, W) (x) hom(X, Y) -> hom(V (x) X, W (x) Y)."""
    P, Q = internal_hom(V, W), internal_hom(X, Y)
    idP = identity(P)
    s = associator_component(P, Q, tensor_obj(V, X))
    s = tensor_maps(idP, associator_inverse_component(Q, V, X)) @ s
    s = tensor_maps(idP, tensor_maps(braiding_component(Q, V), identity(X))) @ s
    s = tensor_maps(idP, associator_component(V, Q, X)) @ s
    s = associator_inverse_component(P, V, tensor_obj(Q, X)) @ s
    s = tensor_maps(evaluation(V, W), evaluation(X, Y)) @ s
    return curry(s, tensor_obj(P, Q), tensor_obj(V, X))


def hom_map_as_matrix(f, L):
    """Apply a morphism with target some hom(V, W) and return the matrix."""
    V, W = f.target.hom_of
    return f(L).reshape(W.dim, V.dim)


# ---------------------------------------------------------------------------
# linear maps between hom spaces:  L -> sum_t P_t L Q_t

class Sandwich(object):
    """A linear map between matrix spaces written as sum_t P_t L Q_t.

    Most operators on internal homs (the adjoint action, composing with a
    fixed element, brackets) have this shape with few terms, which keeps
    them cheap to apply to a whole stack of matrices at once."""

    def __init__(self, F, P, Q):
        self.F = F
        self.P = F.array(P)
        self.Q = F.array(Q)
        assert self.P.ndim == 3 and self.Q.ndim == 3 and len(self.P) == len(self.Q)

    @classmethod
    def identity(cls, F, dW, dV):
        return cls(F, F.eye(dW)[None], F.eye(dV)[None])

    @classmethod
    def zero(cls, F, dW, dV, dW2=None, dV2=None):
        return cls(F, F.zeros((0, dW2 or dW, dW)), F.zeros((0, dV, dV2 or dV)))

    @property
    def terms(self):
        return len(self.P)

    @property
    def in_shape(self):
        return (self.P.shape[2], self.Q.shape[1])

    @property
    def out_shape(self):
        return (self.P.shape[1], self.Q.shape[2])

    def __call__(self, L):
        F = self.F
        L = F.array(L)
        single = L.ndim == 2
        if single:
            L = L[None]
        if self.terms == 0:
            out = F.zeros((L.shape[0],) + self.out_shape)
        else:
            out = _sandwich_apply(F, self.P, L, self.Q)
        return out[0] if single else out

    def apply_flat(self, X):
        """Act on rows of flattened matrices."""
        k = X.shape[0]
        return self(X.reshape((k,) + self.in_shape)).reshape(k, -1)

    def then(self, other):
        """other o self."""
        F = self.F
        if self.terms == 0 or other.terms == 0:
            return Sandwich.zero(F, self.P.shape[2], self.Q.shape[1],
                                 other.P.shape[1], other.Q.shape[2])
        P = F.einsum("sab,tbc->stac", other.P, self.P).reshape(
            -1, other.P.shape[1], self.P.shape[2])
        Q = F.einsum("tab,sbc->stac", self.Q, other.Q).reshape(
            -1, self.Q.shape[1], other.Q.shape[2])
        return Sandwich(F, P, Q).compress()

    def __add__(self, other):
        F = self.F
        return Sandwich(F, np.concatenate([self.P, other.P]),
                        np.concatenate([self.Q, other.Q])).compress()

    @staticmethod
    def total(F, parts, shape=None):
        """Sum of several sandwiches, compressed once."""
        parts = [S for S in parts if S.terms]
        if not parts:
            dW, dV, dW2, dV2 = shape
            return Sandwich.zero(F, dW, dV, dW2, dV2)
        return Sandwich(F, np.concatenate([S.P for S in parts]),
                        np.concatenate([S.Q for S in parts])).compress()

    def scale(self, c):
        return Sandwich(self.F, self.F.smul(c, self.P), self.Q)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def compress(self):
        """Drop zero terms, merge terms sharing a Q (or a P), then rewrite
        over a basis of the span of the Q's (or of the P's, whichever
        matrices are smaller)."""
        F = self.F
        T = self.terms
        if T <= 1:
            return self
        Pf = self.P.reshape(T, -1)
        Qf = self.Q.reshape(T, -1)
        live = [t for t in range(T) if not (F.is_zero(Pf[t]) or F.is_zero(Qf[t]))]
        if not live:
            return Sandwich.zero(F, self.P.shape[2], self.Q.shape[1],
                                 self.P.shape[1], self.Q.shape[2])
        P, Q = _merge_terms(F, self.P[live], self.Q[live])
        Q, P = (x.transpose(0, 2, 1) for x in _merge_terms(F, Q.transpose(0, 2, 1),
                                                           P.transpose(0, 2, 1)))
        T = len(P)
        if T <= 2:
            return Sandwich(F, P, Q)
        Pf, Qf = P.reshape(T, -1), Q.reshape(T, -1)
        if Qf.shape[1] <= Pf.shape[1]:
            B, piv = row_basis(F, Qf)
            if len(piv) >= T:
                return Sandwich(F, P, Q)
            coef = Qf[:, piv]                      # Q_t = sum_s coef[t,s] B_s
            return Sandwich(F, F.einsum("ts,tab->sab", coef, P),
                            B.reshape((len(piv),) + Q.shape[1:]))
        B, piv = row_basis(F, Pf)
        if len(piv) >= T:
            return Sandwich(F, P, Q)
        coef = Pf[:, piv]
        return Sandwich(F, B.reshape((len(piv),) + P.shape[1:]),
                        F.einsum("ts,tab->sab", coef, Q))

    def matrix(self):
        """Matrix on row-major vectorised inputs."""
        F = self.F
        a, b = self.out_shape
        c, d = self.in_shape
        return F.einsum("tac,tdb->abcd", self.P, self.Q).reshape(a * b, c * d)

    def __repr__(self):
        return "Sandwich(%d terms, %s -> %s)" % (self.terms, self.in_shape, self.out_shape)


def _merge_terms(F, P, Q):
    """Sum the P's of terms whose Q's coincide."""
    groups = {}
    order = []
    for t in range(len(Q)):
        key = Q[t].tobytes() if Q.dtype != object else tuple(Q[t].flat)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(t)
    if len(order) == len(Q):
        return P, Q
    newP = []
    newQ = []
    for key in order:
        ts = groups[key]
        acc = P[ts[0]]
        for t in ts[1:]:
            acc = F.add(acc, P[t])
        newP.append(acc)
        newQ.append(Q[ts[0]])
    return np.stack(newP), np.stack(newQ)


def _sandwich_apply(F, P, L, Q):
    """sum_t P_t L Q_t over a stack of L, by batched matrix products."""
    if F.dtype != object:
        p = F.p
        b, c = P.shape[2], Q.shape[1]
        if (p - 1) ** 3 * len(P) * b * c < 2 ** 52:
            Lf = L.astype(np.float64)
            acc = None
            for Pt, Qt in zip(P.astype(np.float64), Q.astype(np.float64)):
                term = np.matmul(np.matmul(Pt, Lf), Qt)
                acc = term if acc is None else acc + term
            return np.rint(acc).astype(np.int64) % p
        acc = None
        for Pt, Qt in zip(P, Q):
            term = F.dot(F.dot(Pt, L), Qt)
            acc = term if acc is None else F.add(acc, term)
        return acc
    from .exactcore import _dyadic_scaled, _from_float_ints
    p, l, q = _dyadic_scaled(P), _dyadic_scaled(L), _dyadic_scaled(Q)
    if p is not None and l is not None and q is not None and \
            p[2] * l[2] * q[2] * len(P) * P.shape[2] * Q.shape[1] < 2.0 ** 52:
        acc = None
        for Pt, Qt in zip(p[0], q[0]):
            term = np.matmul(np.matmul(Pt, l[0]), Qt)
            acc = term if acc is None else acc + term
        return _from_float_ints(acc, mpq(2) ** (p[1] + l[1] + q[1]))
    acc = None
    for Pt, Qt in zip(P, Q):
        term = np.matmul(np.matmul(Pt, L), Qt)
        acc = term if acc is None else acc + term
    return acc


def parity_sandwich(V, W, k=1):
    """L -> (-1)^{k|L|} L on hom(V, W), entrywise."""
    F = V.F
    if k % 2 == 0:
        return Sandwich.identity(F, W.dim, V.dim)
    return Sandwich(F, np.diag(W.parity)[None], np.diag(V.parity)[None])


# ---------------------------------------------------------------------------
# the closed structure, element route

def hom_action(V, W, h):
    """Sandwich of h |> . on hom(V, W)."""
    F, H = V.F, V.H
    X = F.einsum("i,ipq->pq", F.array(h), H.adjoint)
    P = F.einsum("pq,pab->qab", X, W.rho)
    return Sandwich(F, P, V.rho).compress()


def hom_action_basis(V, W):
    """List of sandwiches for the basis of H (cached)."""
    def make():
        H = V.H
        return [hom_action(V, W, H.basis_element(i)) for i in range(H.n)]
    return V.cached(("hom_action_basis", id(W)), make)


def act_on_hom(V, W, h, L):
    return hom_action(V, W, h)(L)


def unit_hom(V):
    """1_V = beta |> . as an element of end(V)."""
    return V.act(V.H.beta)


def ev_sandwich(V, W):
    """L -> sum E1 L E2, so that ev(L (x) v) = ev_sandwich(L) v."""
    def make():
        F, H = V.F, V.H
        Q = F.einsum("ij,jab->iab", H.ev_element, V.rho)
        return Sandwich(F, W.rho, Q).compress()
    return V.cached(("ev", id(W)), make)


def ev(V, W, L, v):
    return V.F.dot(ev_sandwich(V, W)(L), V.F.array(v))


def compose(V, W, X, Lp, L):
    """L' . L for L' in hom(W, X), L in hom(V, W)."""
    return compose_right_fixed(V, W, X, L)(Lp)


def compose_right_fixed(V, W, X, M):
    """Sandwich L' -> L' . M on hom(W, X), with M in hom(V, W)."""
    F, H = V.F, V.H
    G = F.einsum("abc,bxy,yz,czw->axw", H.compose_element, W.rho, F.array(M), V.rho)
    return Sandwich(F, X.rho, G).compress()


def compose_left_fixed(V, W, X, N):
    """Sandwich L -> N . L on hom(V, W), with N in hom(W, X)."""
    F, H = V.F, V.H
    G = F.einsum("abc,axy,yz,bzw->cxw", H.compose_element, X.rho, F.array(N), W.rho)
    return Sandwich(F, G, V.rho).compress()


def homogeneous_parts(V, W, L):
    """Split an element of hom(V, W) by degree: {deg: part}."""
    F = V.F
    L = F.array(L)
    D = W.degrees[:, None] - V.degrees[None, :]
    out = {}
    for d in sorted(set(D.flat)):
        part = F.zeros(L.shape)
        mask = D == d
        part[mask] = L[mask]
        if not F.is_zero(part):
            out[int(d)] = part
    return out


def degree_of(V, W, L):
    parts = homogeneous_parts(V, W, L)
    if len(parts) > 1:
        raise ShapeMismatch("element mixes degrees %s" % sorted(parts))
    return next(iter(parts)) if parts else 0


def otimes(V, W, X, Y, L, Lp):
    """L (x). L' in hom(V (x) X, W (x) Y) for L in hom(V, W), L' in hom(X, Y)."""
    F, H = V.F, V.H
    Mt = H.tensor_element
    out = F.zeros((W.dim * Y.dim, V.dim * X.dim))
    for d, part in homogeneous_parts(X, Y, Lp).items():
        A = F.einsum("awx,xy,byv->abwv", W.rho, F.array(L), V.rho)    # (a,b) on L
        B = F.einsum("cwx,xy,eyv->cewv", Y.rho, part, X.rho)          # (c,e) on L'
        BB = F.einsum("abce,cewv->abwv", Mt, B)
        if d % 2:
            A = F.mul(A, V.parity[None, None, None, :])
        K = F.einsum("abwv,abxy->wxvy", A, BB)
        out = F.add(out, K.reshape(out.shape))
    return out


# ---------------------------------------------------------------------------
# identities for ev, composition and the internal tensor product
#
# Every identity below is multilinear, so it is checked once as an equality
# of structure tensors; a tensor index is a tuple of basis elements, hence a
# failure names the offending homogeneous basis elements.

def _witness(F, A, B):
    D = F.sub(F.array(A), F.array(B))
    if F.is_zero(D):
        return None
    idx = np.argwhere(D != 0)[0]
    return tuple(int(i) for i in idx)


def _comp_tensor(V, W, X):
    """c[o, l', l]: (L' . L) = sum c L' L over hom basis elements."""
    P, Q, R = internal_hom(W, X), internal_hom(V, W), internal_hom(V, X)
    return composition(V, W, X).matrix.reshape(R.dim, P.dim, Q.dim)


def _ev_tensor(V, W):
    P = internal_hom(V, W)
    return evaluation(V, W).matrix.reshape(W.dim, P.dim, V.dim)


def _otimes_tensor(V, W, X, Y):
    P, Q = internal_hom(V, W), internal_hom(X, Y)
    out = internal_hom(tensor_obj(V, X), tensor_obj(W, Y))
    return internal_tensor(V, W, X, Y).matrix.reshape(out.dim, P.dim, Q.dim)


def _unit_vec(V):
    return V.F.array(unit_hom(V)).reshape(-1)


def ev_composition_identity(V, W, X):
    """ev((L'.L) (x) v) against ev((phi1 |> L') (x) ev((phi2 |> L) (x) (phi3 |> v)))."""
    F, H = V.F, V.H
    P, Q = internal_hom(W, X), internal_hom(V, W)
    lhs = F.einsum("xov,opq->xpqv", _ev_tensor(V, X), _comp_tensor(V, W, X))
    rhs = F.einsum("abc,xrw,arp,wsu,bsq,cuv->xpqv", H.phi, _ev_tensor(W, X), P.rho,
                   _ev_tensor(V, W), Q.rho, V.rho)
    return _witness(F, lhs, rhs)


def weak_associativity_identity(V, W, X, Y):
    """(L''.L').L against (phi1 |> L'').((phi2 |> L').(phi3 |> L))."""
    F, H = V.F, V.H
    A, B, C = internal_hom(X, Y), internal_hom(W, X), internal_hom(V, W)
    lhs = F.einsum("oip,ijk->ojkp", _comp_tensor(V, W, Y), _comp_tensor(W, X, Y))
    rhs = F.einsum("abc,ors,arj,sti,btk,cip->ojkp", H.phi, _comp_tensor(V, X, Y), A.rho,
                   _comp_tensor(V, W, X), B.rho, C.rho)
    return _witness(F, lhs, rhs)


def otimes_via_composition_identity(V, W, X, Y):
    """L (x). L' against (L (x). 1_Y) . (1_V (x). L')."""
    F = V.F
    T1 = F.einsum("opq,q->op", _otimes_tensor(V, W, Y, Y), _unit_vec(Y))
    T2 = F.einsum("opq,p->oq", _otimes_tensor(V, V, X, Y), _unit_vec(V))
    C = _comp_tensor(tensor_obj(V, X), tensor_obj(V, Y), tensor_obj(W, Y))
    lhs = _otimes_tensor(V, W, X, Y)
    rhs = F.einsum("oij,ip,jq->opq", C, T1, T2)
    return _witness(F, lhs, rhs)


def composition_otimes_unit_identity(V, W, X, Y, left=False):
    """(K.L) (x). 1_Y = (K (x). 1_Y).(L (x). 1_Y), or 1_Y (x). (K.L) = ... if left."""
    F = V.F
    if left:
        TK = F.einsum("opq,p->oq", _otimes_tensor(Y, Y, W, X), _unit_vec(Y))
        TL = F.einsum("opq,p->oq", _otimes_tensor(Y, Y, V, W), _unit_vec(Y))
        TKL = F.einsum("opq,p->oq", _otimes_tensor(Y, Y, V, X), _unit_vec(Y))
        C = _comp_tensor(tensor_obj(Y, V), tensor_obj(Y, W), tensor_obj(Y, X))
    else:
        TK = F.einsum("opq,q->op", _otimes_tensor(W, X, Y, Y), _unit_vec(Y))
        TL = F.einsum("opq,q->op", _otimes_tensor(V, W, Y, Y), _unit_vec(Y))
        TKL = F.einsum("opq,q->op", _otimes_tensor(V, X, Y, Y), _unit_vec(Y))
        C = _comp_tensor(tensor_obj(V, Y), tensor_obj(W, Y), tensor_obj(X, Y))
    lhs = F.einsum("oi,ijk->ojk", TKL, _comp_tensor(V, W, X))
    rhs = F.einsum("oij,ik,jl->okl", C, TK, TL)
    return _witness(F, lhs, rhs)


def braided_interchange_identity(V, W, X, Y):
    """(-1)^{|L||L'|} (R2 |> L) (x). (R1 |> L') against (1_W (x). L').(L (x). 1_X)."""
    F, H = V.F, V.H
    P, Q = internal_hom(V, W), internal_hom(X, Y)
    sign = F.array(np.array([[(-1) ** ((int(a) * int(b)) % 2) for b in Q.degrees]
                             for a in P.degrees]))
    lhs = F.einsum("ab,oij,bip,ajq->opq", H.R, _otimes_tensor(V, W, X, Y), P.rho, Q.rho)
    lhs = F.mul(lhs, sign[None, :, :])
    TL = F.einsum("opq,q->op", _otimes_tensor(V, W, X, X), _unit_vec(X))
    TR = F.einsum("opq,p->oq", _otimes_tensor(W, W, X, Y), _unit_vec(W))
    C = _comp_tensor(tensor_obj(V, X), tensor_obj(W, X), tensor_obj(W, Y))
    rhs = F.einsum("oij,iq,jp->opq", C, TR, TL)
    return _witness(F, lhs, rhs)


def _conj_assoc(U, V, W, X, Y, Z, T):
    """Phi_{V,X,Z} o M o Phi^{-1}_{U,W,Y} for each column M of T (vectorised)."""
    F = U.F
    A = associator_component(V, X, Z).matrix
    B = associator_inverse_component(U, W, Y).matrix
    n, m, k = A.shape[0], B.shape[0], T.shape[1]
    out = F.einsum("oi,ijk,jp->opk", A, T.reshape(n, m, k), B)
    return out.reshape(n * m, k)


def associator_conjugation_identities(U, V, W, X, Y, Z):
    """The three ways of moving an internal tensor factor across Phi.

    Returns a list of three witnesses (None when the identity holds)."""
    F = U.F
    out = []
    # L in hom(U, V)
    T = F.einsum("opq,q->op", _otimes_tensor(U, V, W, W), _unit_vec(W))
    lhs = F.einsum("opq,pi,q->oi", _otimes_tensor(tensor_obj(U, W), tensor_obj(V, W), Y, Y),
                   T, _unit_vec(Y))
    lhs = _conj_assoc(U, V, W, W, Y, Y, lhs)
    WY = tensor_obj(W, Y)
    one = F.einsum("opq,p,q->o", _otimes_tensor(W, W, Y, Y), _unit_vec(W), _unit_vec(Y))
    rhs = F.einsum("opq,q->op", _otimes_tensor(U, V, WY, WY), one)
    out.append(_witness(F, lhs, rhs))
    # L' in hom(W, X)
    T = F.einsum("opq,p->oq", _otimes_tensor(U, U, W, X), _unit_vec(U))
    lhs = F.einsum("opq,pi,q->oi", _otimes_tensor(tensor_obj(U, W), tensor_obj(U, X), Y, Y),
                   T, _unit_vec(Y))
    lhs = _conj_assoc(U, U, W, X, Y, Y, lhs)
    T2 = F.einsum("opq,q->op", _otimes_tensor(W, X, Y, Y), _unit_vec(Y))
    rhs = F.einsum("opq,p,qi->oi", _otimes_tensor(U, U, WY, tensor_obj(X, Y)), _unit_vec(U), T2)
    out.append(_witness(F, lhs, rhs))
    # L'' in hom(Y, Z)
    UW = tensor_obj(U, W)
    one = F.einsum("opq,p,q->o", _otimes_tensor(U, U, W, W), _unit_vec(U), _unit_vec(W))
    lhs = F.einsum("opq,p->oq", _otimes_tensor(UW, UW, Y, Z), one)
    lhs = _conj_assoc(U, U, W, W, Y, Z, lhs)
    T2 = F.einsum("opq,p->oq", _otimes_tensor(W, W, Y, Z), _unit_vec(W))
    rhs = F.einsum("opq,p,qi->oi", _otimes_tensor(U, U, WY, tensor_obj(W, Z)), _unit_vec(U), T2)
    out.append(_witness(F, lhs, rhs))
    return out


def check_internal_identities(U, V, W, X, Y, Z=None):
    """All printed identities of ev, composition and the internal tensor
    product, quantified over basis elements of the hom spaces involved."""
    Z = Y if Z is None else Z
    rep = ValidationReport()
    w = ev_composition_identity(U, V, W)
    rep.add("ev of a composite", w is None, w)
    w = weak_associativity_identity(U, V, W, X)
    rep.add("weak associativity of composition", w is None, w)
    w = otimes_via_composition_identity(U, V, W, X)
    rep.add("internal tensor via composition", w is None, w)
    w = composition_otimes_unit_identity(U, V, W, X)
    rep.add("composition then tensor with a right unit", w is None, w)
    w = composition_otimes_unit_identity(U, V, W, X, left=True)
    rep.add("composition then tensor with a left unit", w is None, w)
    w = braided_interchange_identity(U, V, W, X)
    rep.add("braided interchange", w is None, w)
    for name, w in zip(["first", "second", "third"],
                       associator_conjugation_identities(U, V, W, X, Y, Z)):
        rep.add("associator moves the %s factor" % name, w is None, w)
    return rep


# ---------------------------------------------------------------------------
# spanning sets of morphisms and the currying round trips

def morphism_basis(V, W):
    """Basis of the H-equivariant degree-0 maps V -> W, as matrices."""
    F = V.F
    idx = np.flatnonzero((W.degrees[:, None] == V.degrees[None, :]).reshape(-1))
    N = W.dim * V.dim
    if len(idx) == 0:
        return []
    K = F.zeros((len(idx), N))
    K[np.arange(len(idx)), idx] = F.one
    X = K.reshape(-1, W.dim, V.dim)
    Y = F.sub(F.einsum("kxy,iyz->kixz", X, V.rho), F.einsum("ixy,kyz->kixz", W.rho, X))
    C = nullspace(F, Y.reshape(len(idx), -1).T)
    return [r.reshape(W.dim, V.dim) for r in F.dot(C, K)]


def check_currying(V, W, X):
    """zeta and zeta^{-1} are inverse on spanning sets of Hom(V (x) W, X) and
    Hom(V, hom(W, X)), and zeta^{-1}(g) = ev o (g (x) id)."""
    F = V.F
    VW, P = tensor_obj(V, W), internal_hom(W, X)
    rep = ValidationReport()
    fs = morphism_basis(VW, X)
    bad = next((i for i, f in enumerate(fs)
                if not F.equal(uncurry(curry(HMorphism(VW, X, f), V, W), W).matrix, f)), None)
    rep.add("uncurry after curry is the identity", bad is None, bad)
    gs = morphism_basis(V, P)
    bad = next((i for i, g in enumerate(gs)
                if not F.equal(curry(uncurry(HMorphism(V, P, g), W), V, W).matrix, g)), None)
    rep.add("curry after uncurry is the identity", bad is None, bad)
    E = evaluation(W, X)
    bad = None
    for i, g in enumerate(gs):
        g = HMorphism(V, P, g)
        if not F.equal(uncurry(g, W).matrix, (E @ tensor_maps(g, identity(W))).matrix):
            bad = i
            break
    rep.add("uncurry is evaluation after (g (x) id)", bad is None, bad)
    rep.add("curried maps are morphisms",
            all(check_morphism(curry(HMorphism(VW, X, f), V, W), V, P) for f in fs))
    return rep, len(fs), len(gs)
