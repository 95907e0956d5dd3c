"""
Algebras and symmetric bimodules inside the category of H-modules:
weak associativity, the actions and their curried forms, A-linear
internal homs, and the relative tensor product over A.

Kernels of curried maps Ker zeta(f) are computed by kernel_family, which
intersects the kernels of x -> sum_i f(h_i |> x (x) a_i) one a at a time
(a_i running over C1 (x) C2 |> a).  largest_submodule gives the second
route: the biggest H-stable subspace of {x : f(x (x) a) = 0 for all a}.
"""

from functools import cached_property

import numpy as np

from .exactcore import (GradedSpace, ShapeMismatch, nullspace, reduce_rows, rref,
                        row_basis, _quotient_from_rref)
from .quasihopf import ValidationReport
from .hmod import (HModule, HMorphism, Sandwich, check_morphism, compose_left_fixed,
                   compose_right_fixed, hom_action, hom_action_basis, internal_hom,
                   parity_sandwich, tensor_obj)


# ---------------------------------------------------------------------------
# algebras

class AlgebraObject(object):
    """An algebra in H-mod: mu[i, j, k] is the coefficient of a_k in a_i a_j."""

    def __init__(self, module, mu, unit, name="A"):
        self.module = module
        self.H = module.H
        self.F = module.F
        self.dim = module.dim
        self.degrees = module.degrees
        self.space = module.space
        self.mu = self.F.array(mu).reshape(self.dim, self.dim, self.dim)
        self.unit = self.F.array(unit).reshape(self.dim)
        self.name = name
        self.calculus = None

    def __repr__(self):
        return "AlgebraObject(%s, %s)" % (self.name, self.space.dims)

    @property
    def labels(self):
        return self.module.labels

    def basis_vector(self, j):
        return self.module.basis_vector(j)

    def element(self, **coeffs):
        """Element from label=coefficient pairs."""
        v = self.F.zeros(self.dim)
        for lab, c in coeffs.items():
            v[self.labels.index(lab)] = self.F.scalar(c)
        return v

    def mult(self, a, b):
        return self.F.einsum("i,j,ijk->k", self.F.array(a), self.F.array(b), self.mu)

    def lmat(self, a):
        """Matrix of b -> a b."""
        return self.F.einsum("i,ijk->kj", self.F.array(a), self.mu)

    def rmat(self, b):
        """Matrix of a -> a b."""
        return self.F.einsum("j,ijk->ki", self.F.array(b), self.mu)

    def product_morphism(self):
        M = self.module
        return HMorphism(tensor_obj(M, M), M,
                         self.F.einsum("ijk->kij", self.mu).reshape(self.dim, -1))

    def degree(self, a):
        return self.space.homogeneous(a, self.F)

    def associativity_witness(self):
        """A basis triple (i, j, k) with (a_i a_j) a_k != a_i (a_j a_k), or None."""
        F = self.F
        lhs = F.einsum("ijm,mko->ijko", self.mu, self.mu)
        rhs = F.einsum("jkm,imo->ijko", self.mu, self.mu)
        diff = F.sub(lhs, rhs)
        for idx in np.ndindex(diff.shape[:3]):
            if not F.is_zero(diff[idx]):
                return idx
        return None

    @cached_property
    def generating_set(self):
        """Indices of basis elements that, with the unit, generate A."""
        F = self.F
        gens = []
        B, piv = row_basis(F, self.unit[None])
        for j in range(self.dim):
            e = self.basis_vector(j)
            if F.is_zero(reduce_rows(F, B, piv, e[None])):
                continue
            gens.append(j)
            B, piv = self._closure(gens)
            if len(piv) == self.dim:
                break
        return gens

    def _closure(self, gens):
        F = self.F
        rows = [self.unit] + [self.basis_vector(j) for j in gens]
        B, piv = row_basis(F, np.array(rows))
        while True:
            prods = F.einsum("si,tj,ijk->stk", B, B, self.mu).reshape(-1, self.dim)
            new = reduce_rows(F, B, piv, prods)
            if F.is_zero(new):
                return B, piv
            B, piv = row_basis(F, np.concatenate([B, new]))

    @cached_property
    def bimodule(self):
        """A as a bimodule over itself."""
        return BimoduleObject(self, self.module, self.mu, self.mu, name=self.name)


def check_algebra(A):
    F, H = A.F, A.H
    rep = ValidationReport()
    rep.add("product is a morphism", check_morphism(A.product_morphism(), tensor_obj(A.module, A.module), A.module))
    unit_ok = F.equal(F.einsum("ixy,y->ix", A.module.rho, A.unit),
                      F.einsum("i,x->ix", H.counit, A.unit))
    unit_ok = unit_ok and A.degree(A.unit) == 0
    rep.add("unit is invariant of degree 0", unit_ok)
    rho = A.module.rho
    lhs = F.einsum("ijm,mko->ijko", A.mu, A.mu)
    rhs = F.einsum("pqr,pai,qbj,rck,bcm,amo->ijko", H.phi, rho, rho, rho, A.mu, A.mu)
    rep.add("weak associativity", F.equal(lhs, rhs))
    E = F.eye(A.dim)
    rep.add("unitality", F.equal(A.lmat(A.unit), E) and F.equal(A.rmat(A.unit), E))
    rep.add("braided commutativity", F.equal(A.mu, _braided_swap(A, A.module, A.module, A.mu)))
    return rep


def _sign_matrix(F, dA, dB):
    return F.array([[(-1) ** ((int(a) * int(b)) % 2) for b in dB] for a in dA])


def _braided_swap(A, X, Y, t):
    """Given t[y, x, k] for a product Y (x) X -> Z, return the product
    X (x) Y -> Z, x (x) y -> (-1)^{|x||y|} t(R2 y (x) R1 x)."""
    F, H = A.F, A.H
    out = F.einsum("pq,pax,qby,bak->xyk", H.R, X.rho, Y.rho, t)
    return F.mul(out, _sign_matrix(F, X.degrees, Y.degrees)[:, :, None])


# ---------------------------------------------------------------------------
# bimodules

class BimoduleObject(object):
    """Symmetric A-bimodule in H-mod.

    lt[i, j, k]: coefficient of v_k in a_i v_j;  rt[j, i, k]: in v_j a_i."""

    def __init__(self, A, module, lt, rt, name=None, frame=None):
        self.A = A
        self.module = module
        self.H = module.H
        self.F = module.F
        self.dim = module.dim
        self.degrees = module.degrees
        self.space = module.space
        self.lt = self.F.array(lt).reshape(A.dim, self.dim, self.dim)
        self.rt = self.F.array(rt).reshape(self.dim, A.dim, self.dim)
        self.name = name or module.name
        self.frame = frame

    def __repr__(self):
        return "BimoduleObject(%s over %s, %s)" % (self.name, self.A.name, self.space.dims)

    @property
    def labels(self):
        return self.module.labels

    @classmethod
    def symmetric_from_left(cls, A, module, lt, name=None, frame=None):
        """Right action defined from the left one through the braiding."""
        F = A.F
        lt = F.array(lt)
        rt = _braided_swap(A, module, A.module, lt)
        return cls(A, module, lt, rt, name, frame)

    def lmat(self, a):
        return self.F.einsum("i,ijk->kj", self.F.array(a), self.lt)

    def rmat(self, a):
        return self.F.einsum("i,jik->kj", self.F.array(a), self.rt)

    def left(self, a, v):
        return self.F.einsum("i,j,ijk->k", self.F.array(a), self.F.array(v), self.lt)

    def right(self, v, a):
        return self.F.einsum("j,i,jik->k", self.F.array(v), self.F.array(a), self.rt)

    def left_morphism(self):
        return HMorphism(tensor_obj(self.A.module, self.module), self.module,
                         self.F.einsum("ijk->kij", self.lt).reshape(self.dim, -1))

    def right_morphism(self):
        return HMorphism(tensor_obj(self.module, self.A.module), self.module,
                         self.F.einsum("jik->kji", self.rt).reshape(self.dim, -1))

    @cached_property
    def lhat_basis(self):
        """Stack of lhat(a_i) for the basis of A."""
        F, H = self.F, self.H
        rA, rV = self.A.module.rho, self.module.rho
        # lhat(a) = sum C[i,j] lmat(rho_A(i) a) rho_V(j)
        return F.einsum("ij,iba,bxy,jyz->axz", H.curry_element, rA, self.lt.transpose(0, 2, 1), rV)

    def lhat(self, a):
        """The curried left action: lhat(a) in end(V)."""
        return self.F.einsum("a,axz->xz", self.F.array(a), self.lhat_basis)

    def lhat_morphism(self):
        V = self.module
        M = self.F.einsum("axz->xza", self.lhat_basis).reshape(V.dim * V.dim, self.A.dim)
        return HMorphism(self.A.module, internal_hom(V, V), M)


def check_bimodule(V, symmetric=True):
    F, H, A = V.F, V.H, V.A
    rA, rV, mu, lt, rt = A.module.rho, V.module.rho, A.mu, V.lt, V.rt
    rep = ValidationReport()
    rep.add("left action is a morphism",
            check_morphism(V.left_morphism(), tensor_obj(A.module, V.module), V.module))
    rep.add("right action is a morphism",
            check_morphism(V.right_morphism(), tensor_obj(V.module, A.module), V.module))
    lhs = F.einsum("jim,mnk->jink", rt, rt)
    rhs = F.einsum("pqr,pyj,qai,rbn,abm,ymk->jink", H.phi, rV, rA, rA, mu, rt)
    rep.add("right action is weakly associative", F.equal(lhs, rhs))
    lhs = F.einsum("njm,imk->injk", lt, lt)
    rhs = F.einsum("pqr,pai,qbn,ryj,abm,myk->injk", H.phi_inv, rA, rA, rV, mu, lt)
    rep.add("left action is weakly associative", F.equal(lhs, rhs))
    lhs = F.einsum("jnm,imk->ijnk", rt, lt)
    rhs = F.einsum("pqr,pai,qyj,rbn,aym,mbk->ijnk", H.phi_inv, rA, rV, rA, lt, rt)
    rep.add("actions weakly commute", F.equal(lhs, rhs))
    E = F.eye(V.dim)
    rep.add("unitality", F.equal(V.lmat(A.unit), E) and F.equal(V.rmat(A.unit), E))
    if symmetric:
        ok = F.equal(lt, _braided_swap(A, A.module, V.module, rt)) and \
            F.equal(rt, _braided_swap(A, V.module, A.module, lt))
        rep.add("symmetric", ok)
    return rep


def free_module(A, degrees=(0,), name=None):
    """A (x) E with E a trivial graded module; the frame is 1 (x) e_j."""
    from .hmod import trivial_module
    F = A.F
    E = trivial_module(A.H, list(degrees), ["f%d" % j for j in range(len(degrees))], "E")
    M = tensor_obj(A.module, E)
    m = len(degrees)
    Mmod = HModule(A.H, M.degrees, M.rho, M.labels, name or "%s^%d" % (A.name, m))
    lt = F.einsum("ijk,st->ijskt", A.mu, F.eye(m)).reshape(A.dim, A.dim * m, A.dim * m)
    frame = [F.einsum("a,s->as", A.unit, F.eye(m)[j]).reshape(-1) for j in range(m)]
    return BimoduleObject.symmetric_from_left(A, Mmod, lt, name=Mmod.name, frame=frame)


# ---------------------------------------------------------------------------
# sub-objects

class SubHModule(object):
    """A subspace of a module, stored as an RREF basis of row vectors."""

    def __init__(self, ambient, basis, check=True, name=None):
        F = ambient.F
        self.ambient = ambient
        self.F = F
        B = F.array(basis).reshape(-1, ambient.dim)
        if B.shape[0]:
            B, piv = rref(F, B)
        else:
            piv = []
        self.basis = B
        self.pivots = list(piv)
        self.dim = B.shape[0]
        degs = [ambient.space.homogeneous(b, F) for b in B]
        if any(d is None for d in degs):
            raise ShapeMismatch("subspace basis is not homogeneous")
        self.degrees = np.array(degs, dtype=np.int64)
        self.space = GradedSpace(degs)
        self.name = name or "sub(%s)" % ambient.name
        self._module = None
        if check and not self.is_stable():
            raise ShapeMismatch("subspace is not H-stable")

    def __repr__(self):
        return "SubHModule(%s, %s)" % (self.name, self.space.dims)

    @property
    def dims(self):
        return self.space.dims

    def coords(self, X):
        """Coordinates of ambient vectors (assumed to lie in the span)."""
        X = self.F.array(X)
        return X[..., self.pivots]

    def embed(self, c):
        return self.F.dot(self.F.array(c), self.basis)

    def contains(self, X):
        X = self.F.array(X).reshape(-1, self.ambient.dim)
        if self.dim == 0:
            return self.F.is_zero(X)
        return self.F.is_zero(reduce_rows(self.F, self.basis, self.pivots, X))

    def __contains__(self, x):
        return self.contains(x)

    def subspace_of(self, other):
        return other.contains(self.basis)

    def equals(self, other):
        return self.dim == other.dim and self.F.equal(self.basis, other.basis)

    def _act_rows(self, i):
        """e_i acting on every basis vector, as rows."""
        amb = self.ambient
        if amb.hom_of is not None:
            V, W = amb.hom_of
            return hom_action_basis(V, W)[i].apply_flat(self.basis)
        return self.F.dot(self.basis, amb.rho[i].T)

    def is_stable(self):
        if self.dim == 0:
            return True
        return all(self.contains(self._act_rows(i)) for i in range(self.ambient.H.n))

    @property
    def module(self):
        """The subspace as an HModule in its own right."""
        if self._module is None:
            F, H = self.F, self.ambient.H
            rho = F.zeros((H.n, self.dim, self.dim))
            for i in range(H.n):
                rho[i] = self.coords(self._act_rows(i)).T
            self._module = HModule(H, self.degrees, rho, None, self.name)
        return self._module

    def matrices(self):
        """Basis vectors reshaped as matrices when the ambient is a hom."""
        V, W = self.ambient.hom_of
        return self.basis.reshape(self.dim, W.dim, V.dim)


# ---------------------------------------------------------------------------
# kernels of curried maps

def kernel_family(F, degrees, fns, start=None):
    """RREF basis of the common kernel of the linear maps in fns.

    Each fn takes a stack of row vectors (k, N) and returns (k, m).  All
    fns must be homogeneous, so the kernel splits over degree blocks of
    the ambient coordinates (given by ``degrees``)."""
    degrees = np.asarray(degrees)
    N = len(degrees)
    rows = []
    for d in sorted(set(degrees.tolist())):
        idx = np.flatnonzero(degrees == d)
        K = F.zeros((len(idx), N))
        K[np.arange(len(idx)), idx] = F.one
        if start is not None:
            K = _restrict(F, start, idx, N)
            if K.shape[0] == 0:
                continue
        for fn in fns:
            Y = F.array(fn(K)).reshape(K.shape[0], -1)
            if F.is_zero(Y):
                continue
            C = nullspace(F, Y.T)
            K = F.dot(C, K)
            if K.shape[0] == 0:
                break
        if K.shape[0]:
            rows.append(K)
    if not rows:
        return F.zeros((0, N))
    return rref(F, np.concatenate(rows))[0]


def _restrict(F, start, idx, N):
    """Rows of ``start`` supported on the coordinates idx."""
    S = F.array(start)
    if S.shape[0] == 0:
        return F.zeros((0, N))
    mask = np.zeros(N, dtype=bool)
    mask[idx] = True
    keep = [r for r in S if F.is_zero(r[~mask])]
    return F.array(np.array(keep)) if keep else F.zeros((0, N))


def curried_terms(A, a):
    """For a in A, the pairs (k, h_k) with sum_i f(h_i |> x (x) a_i)
    = sum_k f(h_k |> x (x) e_k), where a_i = sum_j C[i,j] e_j |> a.

    Returns a list of (k, h) with h an element of H."""
    F, H = A.F, A.H
    ai = F.einsum("ij,jxy,y->ix", H.curry_element, A.module.rho, F.array(a))   # (i, k)
    out = []
    for k in range(A.dim):
        h = ai[:, k]
        if not F.is_zero(h):
            out.append((k, h))
    return out


def curried_sandwich(A, V, W, basis_sandwiches, a, extra=None):
    """Sandwich on hom(V, W) for x -> zeta(f)(x)(a) when f(. (x) e_k) is the
    sandwich basis_sandwiches[k]."""
    F = A.F
    P = basis_sandwiches[0]
    parts = [hom_action(V, W, h).then(basis_sandwiches[k]) for k, h in curried_terms(A, a)]
    return Sandwich.total(F, parts, (P.in_shape[0], P.in_shape[1], P.out_shape[0], P.out_shape[1]))


def largest_submodule(ambient, rows):
    """Largest H-stable subspace of span(rows) (second route for kernels
    of curried maps)."""
    F = ambient.F
    K = F.array(rows).reshape(-1, ambient.dim)
    if K.shape[0]:
        K = rref(F, K)[0]
    while K.shape[0]:
        sub = SubHModule(ambient, K, check=False)
        _, P, _ = _quotient_from_rref(F, ambient.space, sub.basis, sub.pivots)
        blocks = [F.dot(sub._act_rows(i), P.matrix.T) for i in range(ambient.H.n)]
        Y = np.concatenate(blocks, axis=1)
        C = nullspace(F, Y.T)
        if C.shape[0] == K.shape[0]:
            break
        K = rref(F, F.dot(C, K))[0] if C.shape[0] else C
    return K


# ---------------------------------------------------------------------------
# the bracket with A on hom(V, W) and A-linear maps

def bracket_sandwich(V, W, a):
    """L -> [L, a] = L . lhat_V(a) - (-1)^{|L||a|} lhat_W(R2 |> a) . (R1 |> L)
    on hom(V, W), for a homogeneous a in A."""
    A, F, H = V.A, V.F, V.H
    a = F.array(a)
    dega = A.degree(a)
    if dega is None:
        raise ShapeMismatch("bracket wants a homogeneous element")
    Vm, Wm = V.module, W.module
    S = compose_right_fixed(Vm, Vm, Wm, V.lhat(a))
    # second term: sum_i  lhat_W(sum_j R[i,j] e_j a) . (e_i |> L)
    Ra = F.einsum("ij,jxy,y->ix", H.R, A.module.rho, a)
    sgn = parity_sandwich(Vm, Wm, dega)
    parts = [S]
    for i in range(H.n):
        if F.is_zero(Ra[i]):
            continue
        T = sgn.then(hom_action_basis(Vm, Wm)[i]).then(
            compose_left_fixed(Vm, Wm, Wm, W.lhat(Ra[i])))
        parts.append(-T)
    return Sandwich.total(F, parts)


def bracket(V, W, L, a):
    """[L, a] for L in hom(V, W) (any degrees) and a in A."""
    F = V.F
    out = F.zeros((W.dim, V.dim))
    for da, part in _parts(V.A, a):
        out = F.add(out, bracket_sandwich(V, W, part)(L))
    return out


def _parts(A, a):
    F = A.F
    a = F.array(a)
    out = []
    for d in A.space.support:
        part = F.zeros(A.dim)
        idx = A.space.indices(d)
        part[idx] = a[idx]
        if not F.is_zero(part):
            out.append((d, part))
    return out


def bracket_basis(V, W):
    """Cached list of bracket sandwiches for the basis of A."""
    key = ("bracket_basis", id(W.module), id(V), id(W))
    return V.module.cached(key, lambda: [bracket_sandwich(V, W, V.A.basis_vector(k))
                                         for k in range(V.A.dim)])


def _hom_kernel_fns(V, W, basis_sandwiches):
    A = V.A
    fns = []
    for j in range(A.dim):
        S = curried_sandwich(A, V.module, W.module, basis_sandwiches, A.basis_vector(j))
        fns.append(S.apply_flat)
    return fns


def hom_A(V, W, route="curried"):
    """A-linear maps as the sub-bimodule Ker zeta([., .]) of hom(V, W)."""
    amb = internal_hom(V.module, W.module)
    F = V.F
    Sb = bracket_basis(V, W)
    if route == "curried":
        rows = kernel_family(F, amb.degrees, _hom_kernel_fns(V, W, Sb))
    else:
        rows = kernel_family(F, amb.degrees, [S.apply_flat for S in Sb])
        rows = largest_submodule(amb, rows)
    sub = SubHModule(amb, rows, check=False, name="hom_A(%s,%s)" % (V.name, W.name))
    return HomA(V, W, sub)


class HomA(object):
    """hom_A(V, W) with its bimodule structure  l = . o (lhat (x) id),
    r = . o (id (x) lhat)."""

    def __init__(self, V, W, sub):
        self.V, self.W, self.sub = V, W, sub
        self.A = V.A
        self.F = V.F
        self.dim = sub.dim
        self.dims = sub.dims

    def __repr__(self):
        return "hom_A(%s, %s) %s" % (self.V.name, self.W.name, self.dims)

    def contains(self, L):
        return self.sub.contains(self.F.array(L).reshape(1, -1))

    def matrices(self):
        return self.sub.matrices()

    @cached_property
    def bimodule(self):
        F, A = self.F, self.A
        Vm, Wm = self.V.module, self.W.module
        Ls = self.matrices()
        lt = F.zeros((A.dim, self.dim, self.dim))
        rt = F.zeros((self.dim, A.dim, self.dim))
        for i in range(A.dim):
            a = A.basis_vector(i)
            left = compose_left_fixed(Vm, Wm, Wm, self.W.lhat(a))(Ls)
            right = compose_right_fixed(Vm, Vm, Wm, self.V.lhat(a))(Ls)
            left = left.reshape(self.dim, -1)
            right = right.reshape(self.dim, -1)
            if not (self.sub.contains(left) and self.sub.contains(right)):
                raise ShapeMismatch("A-action leaves hom_A")
            lt[i] = self.sub.coords(left)
            rt[:, i, :] = self.sub.coords(right)
        return BimoduleObject(A, self.sub.module, lt, rt, name=self.sub.name)


def curry_A(f, Q):
    """zeta^A(f): V -> hom(W, X) for f: V (x)_A W -> X (f a matrix on Q)."""
    from .hmod import curry
    full = HMorphism(tensor_obj(Q.V.module, Q.W.module), f.target, Q.F.dot(f.matrix, Q.proj))
    return curry(full)


def uncurry_A(g, Q):
    """(zeta^A)^{-1}(g): V (x)_A W -> X, for g landing in hom_A(W, X)."""
    from .hmod import uncurry
    full = uncurry(g)
    if not Q.F.is_zero(Q.F.dot(full.matrix, Q.relations.T)):
        raise ShapeMismatch("map does not descend to the relative tensor product")
    return HMorphism(Q.module, full.target, Q.F.dot(full.matrix, Q.sec))


# ---------------------------------------------------------------------------
# relative tensor product

def relation_block(V, W, a):
    """Rows (v (x) w indexed) of (v a) (x) w - phi1 v (x) (phi2 a)(phi3 w)
    for all basis v, w and one a."""
    F, H, A = V.F, V.H, V.A
    a = F.array(a)
    dV, dW = V.dim, W.dim
    first = F.einsum("kv,wx->vwkx", V.rmat(a), F.eye(dW))
    # second term: sum phi[p,q,r] (rho_V(p) v) (x) lmat_W(rho_A(q) a) rho_W(r) w
    aq = F.einsum("qxy,y->qx", A.module.rho, a)
    Lq = F.einsum("qi,ijk->qkj", aq, W.lt)
    second = F.einsum("pqr,pkv,qxy,ryw->vwkx", H.phi, V.module.rho, Lq, W.module.rho)
    return F.sub(first, second).reshape(dV * dW, dV * dW)


class RelativeTensor(object):
    """V (x)_A W as a quotient of V (x) W, with projection and section.

    The relation span is found from the blocks of the generators of A and
    then checked against every basis element of A; any block that fails
    is added and the check repeated, so the result is always exact."""

    def __init__(self, V, W):
        F = V.F
        self.V, self.W, self.A, self.F = V, W, V.A, F
        T = tensor_obj(V.module, W.module)
        self.full = T
        A = V.A
        degs = T.degrees
        used = list(A.generating_set)
        rest = [j for j in range(A.dim) if j not in used]
        rel = [relation_block(V, W, A.basis_vector(j)) for j in used]
        B = self._span(rel, degs)
        while True:
            bad = []
            Pm = self._proj_from(B)
            for j in rest:
                R = relation_block(V, W, A.basis_vector(j))
                if not F.is_zero(F.dot(R, Pm.T)):
                    bad.append(j)
                    rel.append(R)
            if not bad:
                break
            rest = [j for j in rest if j not in bad]
            B = self._span(rel, degs)
        self.relations = B
        Q, P, S = _quotient_from_rref(F, T.space, B, self._piv)
        self.space = Q
        self.proj = P.matrix
        self.sec = S.matrix
        self.dim = Q.dim
        self.dims = Q.dims
        rho = F.einsum("xa,iab,by->ixy", self.proj, T.rho, self.sec) if self.dim else \
            F.zeros((V.H.n, 0, 0))
        self.module = HModule(V.H, Q.degrees, rho, Q.labels, "%s*_A%s" % (V.name, W.name))

    def _span(self, rel, degs):
        F = self.F
        X = np.concatenate(rel) if rel else F.zeros((0, len(degs)))
        out = []
        for d in sorted(set(degs.tolist())):
            idx = np.flatnonzero(degs == d)
            sub = X[:, idx]
            sub = sub[[not F.is_zero(r) for r in sub]] if len(sub) else sub
            if len(sub) == 0:
                continue
            R, _ = rref(F, sub)
            full = F.zeros((R.shape[0], len(degs)))
            full[:, idx] = R
            out.append(full)
        if not out:
            self._piv = []
            return F.zeros((0, len(degs)))
        B, piv = rref(F, np.concatenate(out))
        self._piv = piv
        return B

    def _proj_from(self, B):
        return _quotient_from_rref(self.F, self.full.space, B, self._piv)[1].matrix

    def __repr__(self):
        return "RelativeTensor(%s)" % (self.dims,)

    def project(self, x):
        return self.F.dot(self.proj, self.F.array(x))

    def pair(self, v, w):
        """The class of v (x) w."""
        return self.project(self.F.einsum("a,b->ab", self.F.array(v), self.F.array(w)).reshape(-1))

    def descends(self, K):
        """True iff the linear map K on V (x) W (any target) kills the
        relations modulo the target relations: pass a pair (K, Q2) or a
        plain matrix for maps out of V (x)_A W."""
        F = self.F
        if isinstance(K, tuple):
            M, Q2 = K
            return F.is_zero(F.dot(F.dot(Q2.proj, M), self.relations.T))
        return F.is_zero(F.dot(F.array(K), self.relations.T))

    def induced(self, M, Q2=None):
        """Matrix on the quotient induced by M (on V (x) W)."""
        F = self.F
        left = Q2.proj if Q2 is not None else None
        out = F.dot(F.array(M), self.sec)
        return F.dot(left, out) if left is not None else out

    # --- bimodule structure
    @cached_property
    def bimodule(self):
        F, A = self.F, self.A
        Lfull = self._left_full()
        Rfull = self._right_full()
        lt = F.einsum("xa,iab,bj->ijx", self.proj, Lfull, self.sec)
        rt = F.einsum("xa,iab,bj->jix", self.proj, Rfull, self.sec)
        return BimoduleObject(A, self.module, lt, rt, name=self.module.name)

    def _left_full(self):
        """Stack over a_i of the matrix of a_i . on V (x) W."""
        F, H, A, V, W = self.F, self.V.H, self.A, self.V, self.W
        rA, rV, rW = A.module.rho, V.module.rho, W.module.rho
        # (psi1 a_i)(psi2 v): coefficient on v'  ->  lt[x, y, v'] with x=psi1 a_i, y=psi2 v
        T = F.einsum("pqr,pxi,xyu,qyv,rtw->iutvw", H.phi_inv, rA, V.lt, rV, rW)
        return T.reshape(A.dim, V.dim * W.dim, V.dim * W.dim)

    def _right_full(self):
        F, H, A, V, W = self.F, self.V.H, self.A, self.V, self.W
        rA, rV, rW = A.module.rho, V.module.rho, W.module.rho
        # (v (x) w) a = phi1 v (x) ((phi2 w)(phi3 a))
        T = F.einsum("pqr,puv,qyw,rxi,yxt->iutvw", H.phi, rV, rW, rA, W.rt)
        return T.reshape(A.dim, V.dim * W.dim, V.dim * W.dim)

    def actions_descend(self):
        F = self.F
        ok = True
        for M in list(self._left_full()) + list(self._right_full()):
            ok = ok and F.is_zero(F.dot(F.dot(self.proj, M), self.relations.T))
        return ok


def tensor_over_A(V, W):
    return RelativeTensor(V, W)


def left_unitor_A(V, Q=None):
    """lambda^A: A (x)_A V -> V,  a (x) v -> a v."""
    A = V.A
    Q = Q or RelativeTensor(A.bimodule, V)
    full = V.F.einsum("ijk->kij", V.lt).reshape(V.dim, -1)
    assert Q.descends(full)
    return HMorphism(Q.module, V.module, V.F.dot(full, Q.sec))


def right_unitor_A(V, Q=None):
    """rho^A: V (x)_A A -> V,  v (x) a -> v a."""
    A = V.A
    Q = Q or RelativeTensor(V, A.bimodule)
    full = V.F.einsum("jik->kji", V.rt).reshape(V.dim, -1)
    assert Q.descends(full)
    return HMorphism(Q.module, V.module, V.F.dot(full, Q.sec))


def braiding_A(V, W, QVW=None, QWV=None):
    """tau^A: V (x)_A W -> W (x)_A V."""
    from .hmod import braiding_component
    QVW = QVW or RelativeTensor(V, W)
    QWV = QWV or RelativeTensor(W, V)
    tau = braiding_component(V.module, W.module).matrix
    assert QVW.descends((tau, QWV))
    return HMorphism(QVW.module, QWV.module, QVW.induced(tau, QWV))


def associator_A(U, V, W):
    """Phi^A: (U (x)_A V) (x)_A W -> U (x)_A (V (x)_A W), plus the four
    quotient objects used to build it."""
    from .hmod import associator_component
    F = U.F
    QUV = RelativeTensor(U, V)
    QUV_W = RelativeTensor(QUV.bimodule, W)
    QVW = RelativeTensor(V, W)
    QU_VW = RelativeTensor(U, QVW.bimodule)
    Phi = associator_component(U.module, V.module, W.module).matrix
    # (U V) W  ->  quotient on the left factor, then the outer quotient
    lift = F.einsum("ab,cd->acbd", QUV.sec, F.eye(W.dim)).reshape(
        U.dim * V.dim * W.dim, QUV.dim * W.dim)
    down = F.einsum("ab,cd->acbd", F.eye(U.dim), QVW.proj).reshape(
        U.dim * QVW.dim, U.dim * V.dim * W.dim)
    M = F.dot(QU_VW.proj, F.dot(down, F.dot(Phi, F.dot(lift, QUV_W.sec))))
    return HMorphism(QUV_W.module, QU_VW.module, M), (QUV, QUV_W, QVW, QU_VW)


# ---------------------------------------------------------------------------
# builders

def _module_for(H, degrees, weights, labels, name):
    from .hmod import module_from_weights, trivial_module
    if weights is None:
        return trivial_module(H, degrees, labels, name)
    return module_from_weights(H, weights, degrees, labels, name)


def _wsum(ws, orders):
    out = [0] * len(orders)
    for w in ws:
        out = [(a + b) % o for a, b, o in zip(out, w, orders)]
    return tuple(out)


def _merge_sign(S, T):
    """Sign of sorting the concatenation S + T of two sorted index tuples,
    or 0 if they overlap."""
    if set(S) & set(T):
        return 0
    inv = sum(1 for s in S for t in T if s > t)
    return -1 if inv % 2 else 1


def exterior_algebra(H, n, weights=None, names=None, name=None):
    """Lambda(theta_1..theta_n), theta_i of degree 1 (and weight weights[i])."""
    import itertools
    F = H.F
    names = names or ["t%d" % (i + 1) for i in range(n)]
    basis = []
    for k in range(n + 1):
        basis += list(itertools.combinations(range(n), k))
    index = {S: i for i, S in enumerate(basis)}
    d = len(basis)
    mu = F.zeros((d, d, d))
    for i, S in enumerate(basis):
        for j, T in enumerate(basis):
            s = _merge_sign(S, T)
            if s:
                mu[i, j, index[tuple(sorted(S + T))]] = F.scalar(s)
    labels = ["*".join(names[i] for i in S) or "1" for S in basis]
    degs = [len(S) for S in basis]
    ws = None
    if weights is not None:
        orders = H.meta["group"]["orders"]
        ws = [_wsum([weights[i] for i in S], orders) for S in basis]
    M = _module_for(H, degs, ws, labels, name or "Lambda%d" % n)
    A = AlgebraObject(M, mu, F.eye(d)[0], name=name or "Lambda%d" % n)
    A.words = {i: [index[(s,)] for s in S] for i, S in enumerate(basis)}
    A.generators = [index[(i,)] for i in range(n)]
    return A


def truncated_derham(H, p, nvars, weights=None, names=None, name=None):
    """k[x_i]/(x_i^p) (x) Lambda(dx_i) with the de Rham differential.

    Basis: x^alpha dx^S ordered by (|S|, S, alpha)."""
    import itertools
    F = H.F
    names = names or (["x", "y", "z", "w"][:nvars] if nvars <= 4 else
                      ["x%d" % (i + 1) for i in range(nvars)])
    basis = []
    for k in range(nvars + 1):
        for S in itertools.combinations(range(nvars), k):
            for alpha in itertools.product(range(p), repeat=nvars):
                basis.append((S, alpha[::-1]))
    basis = [(S, tuple(a)) for S, a in basis]
    index = {b: i for i, b in enumerate(basis)}
    d = len(basis)
    mu = F.zeros((d, d, d))
    for i, (S, a) in enumerate(basis):
        for j, (T, b) in enumerate(basis):
            c = tuple(x + y for x, y in zip(a, b))
            if any(x >= p for x in c):
                continue
            s = _merge_sign(S, T)
            if s:
                mu[i, j, index[(tuple(sorted(S + T)), c)]] = F.scalar(s)

    def lab(S, a):
        parts = []
        for v, e in enumerate(a):
            if e:
                parts.append(names[v] + (str(e) if e > 1 else ""))
        parts += ["d" + names[v] for v in S]
        return "*".join(parts) or "1"
    labels = [lab(S, a) for S, a in basis]
    degs = [len(S) for S, _ in basis]
    ws = None
    if weights is not None:
        orders = H.meta["group"]["orders"]
        ws = []
        for S, a in basis:
            parts = [weights[v] for v in S]
            for v, e in enumerate(a):
                parts += [weights[v]] * e
            ws.append(_wsum(parts, orders))
    nm = name or "dR(%d,%d)" % (p, nvars)
    M = _module_for(H, degs, ws, labels, nm)
    A = AlgebraObject(M, mu, F.eye(d)[0], name=nm)
    gens_x = [index[((), tuple(1 if u == v else 0 for u in range(nvars)))] for v in range(nvars)]
    gens_dx = [index[((v,), (0,) * nvars)] for v in range(nvars)]
    A.generators = gens_x + gens_dx
    words = {}
    for i, (S, a) in enumerate(basis):
        w = []
        for v, e in enumerate(a):
            w += [gens_x[v]] * e
        w += [gens_dx[v] for v in S]
        words[i] = w
    A.words = words
    images = {}
    for v in range(nvars):
        images[gens_x[v]] = A.basis_vector(gens_dx[v])
        images[gens_dx[v]] = F.zeros(d)
    A.calculus = derivation_from_generators(A, images, 1)
    return A


def derivation_from_generators(A, images, degree):
    """Matrix of the graded derivation of an associative algebra with
    basis words A.words[i] (basis_i = product of the generator basis
    vectors in the word) and D(g) = images[g]."""
    F = A.F
    D = F.zeros((A.dim, A.dim))
    for i, word in A.words.items():
        total = F.zeros(A.dim)
        for r, g in enumerate(word):
            left = A.unit
            for h in word[:r]:
                left = A.mult(left, A.basis_vector(h))
            sdeg = sum(int(A.degrees[h]) for h in word[:r])
            term = A.mult(left, images[g])
            for h in word[r + 1:]:
                term = A.mult(term, A.basis_vector(h))
            total = F.add(total, F.smul(F.sign(degree * sdeg), term))
        if word:
            # check the word really is the basis element
            prod = A.unit
            for h in word:
                prod = A.mult(prod, A.basis_vector(h))
            assert F.equal(prod, A.basis_vector(i)), (i, word)
        D[:, i] = total
    return D


def graded_group_algebra(H, name="kG"):
    """k[G] for the abelian group of H, e_g of weight g and degree 0."""
    F = H.F
    g = H.meta["group"]
    els = [tuple(e) for e in g["elements"]]
    orders = g["orders"]
    index = {e: i for i, e in enumerate(els)}
    d = len(els)
    mu = F.zeros((d, d, d))
    for i, x in enumerate(els):
        for j, y in enumerate(els):
            mu[i, j, index[_wsum([x, y], orders)]] = F.one
    labels = ["e" + "".join(str(c) for c in x) for x in els]
    M = _module_for(H, [0] * d, els, labels, name)
    return AlgebraObject(M, mu, F.eye(d)[index[tuple([0] * len(orders))]], name=name)
