"""
Commutators, derivations, differential operators, calculi, connections,
their sums and internal-hom lifts, curvature, Bianchi tensor and trace.

Everything lives in end(V) for a symmetric A-bimodule V and is computed
with the element route of hmod.  Subobjects defined as kernels of curried
maps are computed with algmod.kernel_family; the literal versions (built
from universal elements of H acting legwise) are kept alongside as
cross-checks.
"""

import numpy as np

from .exactcore import ExactError, reduce_rows, rref
from .quasihopf import ValidationReport
from .hmod import (Sandwich, compose, compose_left_fixed, compose_right_fixed,
                   degree_of, ev_sandwich, hom_action, hom_action_basis, homogeneous_parts,
                   internal_hom, otimes, parity_sandwich, unit_hom)
from .algmod import (RelativeTensor, SubHModule, bracket_basis, bracket_sandwich,
                     curried_sandwich, curried_terms, hom_A, kernel_family)


class NotDerivation(ExactError):
    pass


class NotInvariant(ExactError):
    pass


class NotNilpotent(ExactError):
    pass


class NotTriangular(ExactError):
    pass


class NotConnection(ExactError):
    pass


class FibredMismatch(ExactError):
    pass


class RelationNotPreserved(ExactError):
    pass


class SubspaceNotPreserved(ExactError):
    pass


class MembershipViolated(ExactError):
    pass


class NotFree(ExactError):
    pass


def _mod(V):
    """Accept a bimodule or a bare module."""
    return getattr(V, "module", V)


# ---------------------------------------------------------------------------
# the internal commutator on end(V)

def commutator(V, L, Lp):
    """[L, L'] = L . L' - (-1)^{|L||L'|} (R2 |> L') . (R1 |> L)."""
    M = _mod(V)
    F, H = M.F, M.H
    out = F.zeros((M.dim, M.dim))
    acts = hom_action_basis(M, M)
    for dl, Lh in homogeneous_parts(M, M, L).items():
        for dlp, Lph in homogeneous_parts(M, M, Lp).items():
            term = compose(M, M, M, Lh, Lph)
            sgn = F.sign(dl * dlp)
            for p in range(H.n):
                q = H.R[p]
                if F.is_zero(q):
                    continue
                left = hom_action(M, M, q)(Lph)
                term = F.sub(term, F.smul(sgn, compose(M, M, M, left, acts[p](Lh))))
            out = F.add(out, term)
    return out


def commutator_sandwich(V, L):
    """Sandwich of L' -> [L, L'] on end(V), for applying one L to a stack."""
    M = _mod(V)
    F, H = M.F, M.H
    acts = hom_action_basis(M, M)
    parts = []
    for d, Lh in homogeneous_parts(M, M, L).items():
        parts.append(compose_left_fixed(M, M, M, Lh))
        sgn = parity_sandwich(M, M, d)
        for p in range(H.n):
            q = H.R[p]
            N = acts[p](Lh)
            if F.is_zero(q) or F.is_zero(N):
                continue
            parts.append(-(sgn.then(hom_action(M, M, q)).then(compose_right_fixed(M, M, M, N))))
    return Sandwich.total(F, parts, (M.dim, M.dim, M.dim, M.dim))


def hom_basis_matrices(M, N=None):
    N = N or M
    F = M.F
    D = M.dim * N.dim
    return F.eye(D).reshape(D, N.dim, M.dim)


def structure_tensors(V):
    """Multilinear tensors on end(V) in the E_{w,v} basis, for the checks
    on all basis triples: composition, commutator and the action stack."""
    M = _mod(V)

    def make():
        F, H = M.F, M.H
        E = internal_hom(M, M)
        D = E.dim
        Bs = hom_basis_matrices(M)
        comp = F.zeros((D, D, D))
        for y in range(D):
            S = compose_right_fixed(M, M, M, Bs[y])
            comp[:, y, :] = S(Bs).reshape(D, D)
        rho = E.rho
        sign = F.array([[(-1) ** ((int(a) * int(b)) % 2) for b in E.degrees] for a in E.degrees])
        swapped = F.einsum("pq,pax,qby,bam->xym", H.R, rho, rho, comp)
        cm = F.sub(comp, F.mul(sign[:, :, None], swapped))
        return {"comp": comp, "bracket": cm, "rho": rho, "sign": sign, "degrees": E.degrees}
    return M.cached("structure_tensors", make)


def antisymmetry_defect(V):
    """[., .] + [., .] o tau as a tensor (zero when H is triangular)."""
    T = structure_tensors(V)
    F, H = _mod(V).F, _mod(V).H
    cm, rho, sign = T["bracket"], T["rho"], T["sign"]
    swapped = F.einsum("pq,pax,qby,bam->xym", H.R, rho, rho, cm)
    return F.add(cm, F.mul(sign[:, :, None], swapped))


def _jac_elements(H):
    U2 = H.tmul(H.cop_leg(H.R, 1), H.phi)
    U3 = H.tmul(H.place(H.phi_inv, (2, 0, 1), 3), H.cop_leg(H.R, 0))
    return U2, U3


def jacobiator_tensor(V):
    """Jac on all basis triples, as a tensor J[x, y, z, out]."""
    M = _mod(V)
    F, H = M.F, M.H
    T = structure_tensors(V)
    cm, rho, deg = T["bracket"], T["rho"], T["degrees"]
    U2, U3 = _jac_elements(H)
    t1 = F.einsum("xym,mzo->xyzo", cm, cm)
    t2 = F.einsum("ijk,iax,jby,kcz,bcm,mao->xyzo", U2, rho, rho, rho, cm, cm)
    t3 = F.einsum("ijk,iax,jby,kcz,cam,mbo->xyzo", U3, rho, rho, rho, cm, cm)
    par = np.array(deg) % 2
    s2 = F.array((-1) ** ((par[:, None, None] * (par[None, :, None] + par[None, None, :])) % 2))
    s3 = F.array((-1) ** ((par[None, None, :] * (par[:, None, None] + par[None, :, None])) % 2))
    return F.add(t1, F.add(F.mul(s2[..., None], t2), F.mul(s3[..., None], t3)))


def jacobiator(V, L, Lp, Lpp):
    """Jac((L (x) L') (x) L'') for elements of end(V).  Raises NotTriangular
    when H is not flagged triangular unless the caller only wants the value
    (use jacobiator_value)."""
    M = _mod(V)
    if not M.H.triangular:
        raise NotTriangular("the braided Jacobi identity needs a triangular R-matrix")
    return jacobiator_value(V, L, Lp, Lpp)


def jacobiator_value(V, L, Lp, Lpp):
    M = _mod(V)
    F = M.F
    out = F.zeros((M.dim, M.dim))
    for x in homogeneous_parts(M, M, L).values():
        for y in homogeneous_parts(M, M, Lp).values():
            for z in homogeneous_parts(M, M, Lpp).values():
                out = F.add(out, _jac_homogeneous(M, x, y, z))
    return out


def _jac_homogeneous(M, x, y, z):
    F, H = M.F, M.H
    dx, dy, dz = (degree_of(M, M, t) for t in (x, y, z))
    U2, U3 = _jac_elements(H)
    acts = hom_action_basis(M, M)
    ax = [S(x) for S in acts]
    ay = [S(y) for S in acts]
    az = [S(z) for S in acts]
    out = commutator(M, commutator(M, x, y), z)
    for (i, j, k), c in F.nonzero_entries(U2):
        t = commutator(M, commutator(M, ay[j], az[k]), ax[i])
        out = F.add(out, F.smul(c * F.sign(dx * (dy + dz)), t))
    for (i, j, k), c in F.nonzero_entries(U3):
        t = commutator(M, commutator(M, az[k], ax[i]), ay[j])
        out = F.add(out, F.smul(c * F.sign(dz * (dx + dy)), t))
    return out


def derivation_property_tensor(V):
    """[., .] o (. (x) id) minus the right hand side of the braided
    derivation identity, on all basis triples."""
    M = _mod(V)
    F, H = M.F, M.H
    T = structure_tensors(V)
    comp, cm, rho, deg = T["comp"], T["bracket"], T["rho"], T["degrees"]
    lhs = F.einsum("xym,mzo->xyzo", comp, cm)
    r1 = F.einsum("abc,aux,bvy,cwz,vwm,umo->xyzo", H.phi, rho, rho, rho, cm, comp)
    U = H.tmul(H.place(H.phi_inv, (0, 2, 1), 3), H.tmul(H.place(H.R, (1, 2), 3), H.phi))
    r2 = F.einsum("abc,aux,bvy,cwz,uwm,mvo->xyzo", U, rho, rho, rho, cm, comp)
    par = np.array(deg) % 2
    s = F.array((-1) ** ((par[None, :, None] * par[None, None, :]) % 2) * np.ones((len(deg),) * 3, dtype=np.int64))
    rhs = F.add(r1, F.mul(s[..., None], r2))
    return F.sub(lhs, rhs)


def check_bracket_properties(V):
    """Antisymmetry, Jacobi and derivation property on all basis triples of end(V)."""
    M = _mod(V)
    F, H = M.F, M.H
    rep = ValidationReport()
    if H.triangular:
        rep.add("braided antisymmetry", F.is_zero(antisymmetry_defect(V)))
        rep.add("braided Jacobi identity", F.is_zero(jacobiator_tensor(V)))
    rep.add("braided derivation property", F.is_zero(derivation_property_tensor(V)))
    return rep


def first_nonzero(F, T):
    for idx in np.ndindex(T.shape):
        if T[idx] != 0:
            return idx
    return None


# ---------------------------------------------------------------------------
# derivations

def _ev_lhat_fn(V, a):
    """x -> lhat(ev(x (x) a)) on flattened end(A) rows."""
    A = V.A
    F = V.F
    S = ev_sandwich(A.module, A.module)
    a = F.array(a)
    lb = V.lhat_basis
    d = V.dim

    def fn(X):
        k = X.shape[0]
        Ls = X.reshape(k, A.dim, A.dim)
        vec = F.einsum("kxy,y->kx", S(Ls), a)
        return F.einsum("kx,xyz->kyz", vec, lb).reshape(k, d * d)
    return fn


def _der_fns(A):
    V = A.bimodule
    M = A.module
    Sb = bracket_basis(V, V)
    fns = []
    for j in range(A.dim):
        a = A.basis_vector(j)
        terms = curried_terms(A, a)

        def fn(X, terms=terms):
            F = A.F
            out = None
            for k, h in terms:
                Y = hom_action(M, M, h).apply_flat(X)
                part = F.sub(Sb[k].apply_flat(Y), _ev_lhat_fn(V, A.basis_vector(k))(Y))
                out = part if out is None else F.add(out, part)
            return out if out is not None else F.zeros(X.shape)
        fns.append(fn)
    return fns


class DerivationSpace(SubHModule):
    pass


def derivations(A, route="curried"):
    """der(A) = Ker zeta([., .] - lhat o ev) inside end(A)."""
    M = A.module
    amb = internal_hom(M, M)
    F = A.F
    if route == "curried":
        rows = kernel_family(F, amb.degrees, _der_fns(A))
    else:
        from .algmod import largest_submodule
        V = A.bimodule
        Sb = bracket_basis(V, V)
        fns = []
        for j in range(A.dim):
            a = A.basis_vector(j)
            fns.append(lambda X, j=j, a=a: F.sub(Sb[j].apply_flat(X), _ev_lhat_fn(V, a)(X)))
        rows = largest_submodule(amb, kernel_family(F, amb.degrees, fns))
    return DerivationSpace(amb, rows, check=False, name="der(%s)" % A.name)


def derivation_closure(A, der=None):
    """Index pair (i, j) of der-basis elements whose commutator leaves der(A),
    or None when der(A) is closed under [., .]."""
    der = der if der is not None else derivations(A)
    if der.dim == 0:
        return None
    Ls = der.matrices()
    for i in range(der.dim):
        Y = commutator_sandwich(A.module, Ls[i])(Ls).reshape(der.dim, -1)
        if der.contains(Y):
            continue
        for j in range(der.dim):
            if not der.contains(Y[j:j + 1]):
                return (i, j)
    return None


def derivation_condition(A, L):
    """Largest defect of [L, a] = lhat(ev(L (x) a)) over basis a (0 if it holds)."""
    V = A.bimodule
    F = A.F
    Sb = bracket_basis(V, V)
    for j in range(A.dim):
        a = A.basis_vector(j)
        lhs = Sb[j](L)
        rhs = _ev_lhat_fn(V, a)(F.array(L).reshape(1, -1)).reshape(A.dim, A.dim)
        if not F.equal(lhs, rhs):
            return j
    return None


def leibniz_derivations(A):
    """Graded derivations by brute force on the Leibniz rule
    L(ab) = L(a) b + (-1)^{|L||a|} a L(b).  Independent of H; it agrees
    with der(A) when phi and R are trivial."""
    F = A.F
    d = A.dim
    mu = A.mu
    amb_deg = (A.degrees[:, None] - A.degrees[None, :]).reshape(-1)
    fns = []
    for i in range(d):
        def fn(X, i=i):
            k = X.shape[0]
            n = int(amb_deg[np.flatnonzero([x != 0 for x in X[0]])[0]])
            s = F.sign(n * int(A.degrees[i]))
            L = X.reshape(k, d, d)
            lhs = F.einsum("kyx,jx->kyj", L, mu[i])
            t1 = F.einsum("kx,xjy->kyj", L[:, :, i], mu)
            t2 = F.einsum("kxj,xy->kyj", L, mu[i])
            return F.sub(lhs, F.add(t1, F.smul(s, t2))).reshape(k, -1)
        fns.append(fn)
    return kernel_family(F, amb_deg, fns)


# ---------------------------------------------------------------------------
# multi-commutators and differential operators

def _expand_left(H, x, leg, m):
    for _ in range(m - 1):
        x = H.cop_leg(x, leg)
    return x


def _expand_right(H, x, leg, m):
    for j in range(m - 1):
        x = H.cop_leg(x, leg + j)
    return x


def rebracket_element(H, n, kX=1):
    """Phi^{(-n)}: X (x) (A (x) (A (x) ...)) -> ((X (x) A) (x) A) ... as an
    element of H^{(x)(kX+n)}, X being left-nested with kX legs.  Built by
    peeling one A at a time from the left."""
    if n <= 1:
        return H.one(kX + n)
    E1 = _expand_right(H, H.phi_inv, 2, n - 1)
    E1 = _expand_left(H, E1, 0, kX)
    rest = rebracket_element(H, n - 1, kX + 1)
    return H.tmul(rest, E1)


def _peel(H, kX, m):
    """X (x) L_m -> left-nested, where L_m is itself left-nested."""
    total = kX + m
    if m <= 1:
        return H.one(total)
    E = _expand_left(H, H.phi_inv, 1, m - 1)
    E = _expand_left(H, E, 0, kX)
    inner = _peel(H, kX, m - 1)
    inner = H.place(inner, tuple(range(total - 1)), total)
    return H.tmul(inner, E)


def _right_to_left(H, n):
    """A (x) (A (x) ...) -> (... (A (x) A) ...) (x) A on n legs."""
    if n <= 2:
        return H.one(n)
    inner = H.place(_right_to_left(H, n - 1), tuple(range(1, n)), n)
    return H.tmul(_peel(H, 1, n - 1), inner)


def rebracket_element_alt(H, n):
    """Another coherent composite for Phi^{(-n)}: first re-bracket the A
    factors among themselves, then peel them off from the right."""
    if n <= 1:
        return H.one(1 + n)
    first = H.place(_right_to_left(H, n), tuple(range(1, n + 1)), n + 1)
    return H.tmul(_peel(H, 1, n), first)


def _multi_bracket(V, Z, Ls, a_list):
    """sum Z[i0..in] [[..[i0 |> L, i1 |> a1].., in |> an] for a stack Ls."""
    M = _mod(V)
    F, H, A = M.F, M.H, V.A
    Ls = F.array(Ls)
    n = len(a_list)
    acts = hom_action_basis(M, M)
    # cur[i1, .., in] : stack of k matrices
    stack = np.stack([S(Ls) for S in acts])
    cur = F.reduce(np.moveaxis(np.tensordot(Z, stack, axes=([0], [0])), range(n), range(n)))
    for a in a_list:
        a = F.array(a)
        nxt = None
        for i in range(H.n):
            b = F.dot(A.module.rho[i], a)
            if F.is_zero(b):
                continue
            X = cur[i]
            shp = X.shape
            flat = X.reshape(-1, M.dim, M.dim)
            out = F.zeros(flat.shape)
            for _, part in _parts(A, b):
                out = F.add(out, bracket_sandwich(V, V, part)(flat))
            out = out.reshape(shp)
            nxt = out if nxt is None else F.add(nxt, out)
        if nxt is None:
            nxt = F.zeros(cur.shape[1:])
        cur = nxt
    return cur


def _parts(A, a):
    from .algmod import _parts as p
    return p(A, a)


def multi_commutator(V, L, a_list, rebracket=True, element=None):
    """[., .]^{(n)} o Phi^{(-n)} applied to L (x) (a1 (x) (a2 (x) ...))."""
    M = _mod(V)
    H = M.H
    n = len(a_list)
    if element is not None:
        Z = element
    elif rebracket:
        Z = rebracket_element(H, n)
    else:
        Z = H.one(n + 1)
    return _multi_bracket(V, Z, M.F.array(L)[None], a_list)[0]


def nested_bracket(V, L, a_list):
    """[[..[L, a1], ..], an] with no re-bracketing."""
    return multi_commutator(V, L, a_list, rebracket=False)


def _curried_element(H, n):
    """C with its second leg spread over n right-nested legs."""
    return _expand_right(H, H.curry_element, 1, n)


def diff_n(V, n, lower=None, route="recursive"):
    """diff^n(V) inside end(V).

    The recursive route uses diff^n = Ker zeta(pi o [., .]) with pi the
    projection to end(V)/diff^{n-1}; ``lower`` may pass diff^{n-1}.
    The literal route evaluates zeta([., .]^{(n+1)} o Phi^{(-(n+1))})
    on every basis tuple of A^{(x)(n+1)} (small cases only)."""
    M = _mod(V)
    F = M.F
    amb = internal_hom(M, M)
    A = V.A
    if route == "literal":
        import itertools
        H = M.H
        Z = H.tmul(rebracket_element(H, n + 1), _curried_element(H, n + 1))
        fns = []
        for tup in itertools.product(range(A.dim), repeat=n + 1):
            a_list = [A.basis_vector(j) for j in tup]

            def fn(X, a_list=a_list):
                k = X.shape[0]
                return _multi_bracket(V, Z, X.reshape(k, M.dim, M.dim), a_list).reshape(k, -1)
            fns.append(fn)
        rows = kernel_family(F, amb.degrees, fns)
        return SubHModule(amb, rows, check=False, name="diff%d(%s)" % (n, V.name))
    if n == 0:
        return hom_A(V, V).sub
    if lower is None:
        lower = diff_n(V, n - 1)
    B, piv = lower.basis, lower.pivots
    Sb = bracket_basis(V, V)
    fns = []
    for j in range(A.dim):
        S = curried_sandwich(A, M, M, Sb, A.basis_vector(j))

        def fn(X, S=S):
            Y = S.apply_flat(X)
            return reduce_rows(F, B, piv, Y) if len(piv) else Y
        fns.append(fn)
    rows = kernel_family(F, amb.degrees, fns, start=None)
    return SubHModule(amb, rows, check=False, name="diff%d(%s)" % (n, V.name))


class DiffFiltration(object):
    """diff^0 in diff^1 in ... up to the first n with diff^n = diff^{n+1}.
    ``stable`` is False when the computation stopped at an order cap, in
    which case levels past ``order`` are unknown."""

    def __init__(self, V, levels, stable=True):
        self.V = V
        self.levels = levels
        self.order = len(levels) - 1
        self.stable = stable

    def __getitem__(self, n):
        if n > self.order and not self.stable:
            raise IndexError("diff^%d lies past the order cap" % n)
        return self.levels[min(n, self.order)]

    def dims(self):
        return [lvl.dim for lvl in self.levels]

    def __repr__(self):
        return "DiffFiltration(%s)" % self.dims()


def diff_filtration(V, max_order=None):
    levels = [diff_n(V, 0)]
    M = _mod(V)
    full = M.dim * M.dim
    stable = True
    if max_order == 0 and levels[0].dim < full:
        return DiffFiltration(V, levels, False)
    while True:
        n = len(levels)
        nxt = diff_n(V, n, lower=levels[-1])
        if not levels[-1].subspace_of(nxt):
            raise MembershipViolated("diff^%d is not contained in diff^%d" % (n - 1, n))
        if nxt.equals(levels[-1]):
            break
        levels.append(nxt)
        if nxt.dim == full:
            break
        if max_order is not None and n >= max_order:
            stable = False
            break
    return DiffFiltration(V, levels, stable)


def order_of(filt, L):
    """Smallest n with L in diff^n, or None."""
    F = filt.V.F
    x = F.array(L).reshape(1, -1)
    for n, lvl in enumerate(filt.levels):
        if lvl.contains(x):
            return n
    return None


def diff_compose(V, filt, L, Lp, n, m):
    """L . L' for L in diff^n and L' in diff^m; membership of the product in
    diff^{n+m} is checked, not assumed."""
    M = _mod(V)
    F = M.F
    if not filt[n].contains(F.array(L).reshape(1, -1)):
        raise MembershipViolated("first factor not in diff^%d" % n)
    if not filt[m].contains(F.array(Lp).reshape(1, -1)):
        raise MembershipViolated("second factor not in diff^%d" % m)
    P = compose(M, M, M, L, Lp)
    if not filt[n + m].contains(P.reshape(1, -1)):
        raise MembershipViolated("product leaves diff^%d" % (n + m))
    return P


def composition_defect(filt, orders=None):
    """First (n, m, i) such that the i-th basis element of diff^n composed
    with some element of diff^m leaves diff^{n+m}; None if all products
    stay inside.  Levels past the last one are the stable level; for a
    capped filtration only pairs with n + m <= order are checked."""
    V = filt.V
    M = _mod(V)
    top = filt.order if orders is None else orders
    full = M.dim * M.dim
    for n in range(top + 1):
        Ls = filt[n].matrices()
        for m in range(top + 1):
            if n + m > filt.order and not filt.stable:
                continue
            target = filt[n + m]
            if target.dim == full or filt[m].dim == 0:
                continue
            stack = filt[m].matrices()
            for i in range(filt[n].dim):
                Y = compose_left_fixed(M, M, M, Ls[i])(stack).reshape(len(stack), -1)
                if not target.contains(Y):
                    return (n, m, i)
    return None


# ---------------------------------------------------------------------------
# calculi

class DifferentialCalculus(object):
    def __init__(self, A, D):
        self.A = A
        self.D = A.F.array(D)
        self.F = A.F

    def d(self, c):
        return self.F.smul(c, self.D)

    def __repr__(self):
        return "DifferentialCalculus(%s)" % self.A.name


def check_calculus(A, D=None):
    """Validate D as the generator of a differential calculus on A."""
    F, H = A.F, A.H
    D = A.calculus if D is None else D
    if D is None:
        D = F.zeros((A.dim, A.dim))
    D = F.array(D)
    M = A.module
    if not F.is_zero(D):
        deg = set(homogeneous_parts(M, M, D))
        if deg != {1}:
            raise NotDerivation("D must be homogeneous of degree 1, got %s" % sorted(deg))
    for i in range(H.n):
        if not F.equal(hom_action_basis(M, M)[i](D), F.smul(H.counit[i], D)):
            raise NotInvariant("h |> D != eps(h) D for basis element %d" % i)
    j = derivation_condition(A, D)
    if j is not None:
        raise NotDerivation("derivation condition fails against basis element %s" % A.labels[j])
    if not F.is_zero(compose(M, M, M, D, D)):
        raise NotNilpotent("D . D != 0")
    return DifferentialCalculus(A, D)


# ---------------------------------------------------------------------------
# connections

class Connection(object):
    """(L, c) in end(V) x I[1]."""

    def __init__(self, V, L, c):
        self.V = V
        self.L = V.F.array(L)
        self.c = V.F.scalar(c)

    def __repr__(self):
        return "Connection(on %s, c=%s)" % (self.V.name, self.c)


class ConnectionSpace(object):
    """con(V) as a kernel inside end(V) (+) I[1]; rows are (vec L, c)."""

    def __init__(self, calc, V, rows):
        self.calc, self.V, self.F = calc, V, V.F
        self.rows = rows
        M = _mod(V)
        self.D = M.dim * M.dim
        self.dim = rows.shape[0]
        self._degs = np.concatenate([internal_hom(M, M).degrees, [1]])

    @property
    def dims(self):
        out = {}
        for r in self.rows:
            d = int(self._degs[np.flatnonzero([x != 0 for x in r])[0]])
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def contains(self, conn):
        F = self.F
        x = np.concatenate([conn.L.reshape(-1), F.array([conn.c])])[None]
        if self.dim == 0:
            return F.is_zero(x)
        B, piv = rref(F, self.rows)
        return F.is_zero(reduce_rows(F, B, piv, x))

    def ordinary(self):
        """(point, linear part): an ordinary connection (c = 1) and a basis
        of the c = 0 slice in degree 1, or (None, ...) when no connection
        with c != 0 exists."""
        F = self.F
        deg1 = [r for r in self.rows if self._degs[np.flatnonzero([x != 0 for x in r])[0]] == 1]
        lin, point = [], None
        for r in deg1:
            if r[-1] != 0:
                if point is None:
                    point = F.smul(F.inv(r[-1]), r)
                    continue
                r = F.sub(r, F.smul(r[-1], point))
            lin.append(r)
        M = _mod(self.V)
        pt = None if point is None else Connection(self.V, point[:-1].reshape(M.dim, M.dim), 1)
        if lin:
            lin = rref(F, np.array(lin))[0]
        return pt, [Connection(self.V, r[:-1].reshape(M.dim, M.dim), 0) for r in lin]

    def affine_dim(self):
        pt, lin = self.ordinary()
        return None if pt is None else len(lin)

    def basis(self):
        M = _mod(self.V)
        return [Connection(self.V, r[:-1].reshape(M.dim, M.dim), r[-1]) for r in self.rows]

    def c_zero_part(self):
        """end(V)-rows of the c = 0 slice (all degrees)."""
        F = self.F
        out = []
        pt = None
        for r in self.rows:
            if r[-1] == 0:
                out.append(r[:-1])
            elif pt is None:
                pt = r
            else:
                out.append(F.sub(r, F.smul(F.mul(r[-1], F.inv(pt[-1])), pt))[:-1])
        return out


def _con_fns(calc, V):
    A, F = V.A, V.F
    M = _mod(V)
    Sb = bracket_basis(V, V)
    D = calc.D
    Sev = ev_sandwich(A.module, A.module)
    lb = V.lhat_basis
    H = M.H
    fns = []
    for j in range(A.dim):
        a = A.basis_vector(j)
        terms = curried_terms(A, a)
        u = F.zeros((M.dim, M.dim))
        for k, h in terms:
            e = F.dot(Sev(D), A.basis_vector(k))
            u = F.add(u, F.smul(H.eps(h), F.einsum("x,xyz->yz", e, lb)))
        u = u.reshape(-1)
        S = curried_sandwich(A, M, M, Sb, a)

        def fn(X, S=S, u=u):
            Lpart = S.apply_flat(X[:, :-1])
            return F.sub(Lpart, F.einsum("k,y->ky", X[:, -1], u))
        fns.append(fn)
    return fns


def connections(calc, V):
    """con(V) = Ker zeta([., .] o (pr1 (x) id) - lhat o ev o (d (x) id) o (pr2 (x) id))."""
    M = _mod(V)
    F = M.F
    degs = np.concatenate([internal_hom(M, M).degrees, [1]])
    rows = kernel_family(F, degs, _con_fns(calc, V))
    return ConnectionSpace(calc, V, rows)


def connection_condition(calc, conn):
    """Basis index of a with [L, a] != lhat(ev(d(c) (x) a)), or None."""
    V = conn.V
    A, F = V.A, V.F
    from .algmod import bracket_basis
    S = ev_sandwich(A.module, A.module)
    dc = S(calc.d(conn.c))
    brackets = bracket_basis(V, V)
    for j in range(A.dim):
        lhs = brackets[j](conn.L)
        rhs = V.lhat(F.dot(dc, A.basis_vector(j)))
        if not F.equal(lhs, rhs):
            return j
    return None


def bracket(V, L, a):
    from .algmod import bracket as br
    return br(V, V, L, a)


# --- sums of connections

def _ones(V):
    return unit_hom(_mod(V))


def sum_endos(V, W, L, Lp):
    """L (x). 1 + 1 (x). L' on V (x) W."""
    Vm, Wm = _mod(V), _mod(W)
    F = Vm.F
    return F.add(otimes(Vm, Vm, Wm, Wm, L, _ones(W)), otimes(Vm, Vm, Wm, Wm, _ones(V), Lp))


def sum_connection(cV, cW, Q=None, check=True):
    """nabla_V [+] nabla_W on V (x) W and, when the c's agree, the descended
    connection on V (x)_A W.  Returns (full Connection-like pair, descended
    matrix or None, Q)."""
    V, W = cV.V, cW.V
    K = sum_endos(V, W, cV.L, cW.L)
    if cV.c != cW.c:
        raise FibredMismatch("sum of connections needs equal c (%s != %s)" % (cV.c, cW.c))
    Q = Q or RelativeTensor(V, W)
    if check and not Q.descends((K, Q)):
        raise RelationNotPreserved("L (x). 1 + 1 (x). L' does not preserve the relations")
    return K, Q.induced(K, Q), Q


def sum_connection_associativity(cU, cV, cW):
    """Phi o (sum o (sum x id)) o Phi^{-1} == sum o (id x sum), exactly."""
    from .hmod import associator_component, associator_inverse_component, tensor_obj
    U, V, W = cU.V, cV.V, cW.V
    Um, Vm, Wm = _mod(U), _mod(V), _mod(W)
    F = Um.F
    if not (cU.c == cV.c == cW.c):
        raise FibredMismatch("associativity needs a common c")
    UV, VW = tensor_obj(Um, Vm), tensor_obj(Vm, Wm)
    left = F.add(otimes(UV, UV, Wm, Wm, sum_endos(U, V, cU.L, cV.L), unit_hom(Wm)),
                 otimes(UV, UV, Wm, Wm, unit_hom(UV), cW.L))
    right = F.add(otimes(Um, Um, VW, VW, cU.L, unit_hom(VW)),
                  otimes(Um, Um, VW, VW, unit_hom(Um), sum_endos(V, W, cV.L, cW.L)))
    Phi = associator_component(Um, Vm, Wm).matrix
    Phii = associator_inverse_component(Um, Vm, Wm).matrix
    return F.equal(F.dot(Phi, F.dot(left, Phii)), right)


def fibred_basis(conV, conW):
    """Basis of con(V) x_{I[1]} con(W): pairs of Connections."""
    F = conV.F
    MV, MW = _mod(conV.V), _mod(conW.V)
    zV = F.zeros((MV.dim, MV.dim))
    zW = F.zeros((MW.dim, MW.dim))
    out = []
    for r in conV.c_zero_part():
        out.append((Connection(conV.V, r.reshape(MV.dim, MV.dim), 0), Connection(conW.V, zW, 0)))
    for r in conW.c_zero_part():
        out.append((Connection(conV.V, zV, 0), Connection(conW.V, r.reshape(MW.dim, MW.dim), 0)))
    pV = [r for r in conV.rows if r[-1] != 0]
    pW = [r for r in conW.rows if r[-1] != 0]
    if pV and pW:
        a = F.smul(F.inv(pV[0][-1]), pV[0])
        b = F.smul(F.inv(pW[0][-1]), pW[0])
        out.append((Connection(conV.V, a[:-1].reshape(MV.dim, MV.dim), 1),
                    Connection(conW.V, b[:-1].reshape(MW.dim, MW.dim), 1)))
    return out


# --- the internal-hom lift

def left_mult_sandwich(V, W, Lp):
    """calL(L') = zeta(.)(L') on hom(V, W), for L' in end(W)."""
    Vm, Wm = _mod(V), _mod(W)
    F, H = Vm.F, Vm.H
    C = H.curry_element
    acts = hom_action_basis(Wm, Wm)
    parts = []
    for i in range(H.n):
        if F.is_zero(C[i]):
            continue
        N = acts[i](Lp)
        if F.is_zero(N):
            continue
        parts.append(hom_action(Vm, Wm, C[i]).then(compose_left_fixed(Vm, Wm, Wm, N)))
    return Sandwich.total(F, parts, (Wm.dim, Vm.dim, Wm.dim, Vm.dim))


def right_mult_sandwich(V, W, L):
    """calR(L) = zeta(. o tau)(L) on hom(V, W), for L in end(V)."""
    Vm, Wm = _mod(V), _mod(W)
    F, H = Vm.F, Vm.H
    Y = H.tmul(H.R, H.curry_element)
    acts = hom_action_basis(Vm, Vm)
    parts = []
    for d, Lh in homogeneous_parts(Vm, Vm, L).items():
        sgn = parity_sandwich(Vm, Wm, d)
        for a in range(H.n):
            if F.is_zero(Y[a]):
                continue
            N = acts[a](Lh)
            if F.is_zero(N):
                continue
            parts.append(sgn.then(hom_action(Vm, Wm, Y[a])).then(
                compose_right_fixed(Vm, Vm, Wm, N)))
    return Sandwich.total(F, parts, (Wm.dim, Vm.dim, Wm.dim, Vm.dim))


def adjoint_connection(cW, cV, homA=None, check=True):
    """ad.((L', c'), (L, c)) = (calL(L') - calR(L), c') on hom(V, W), and its
    restriction to hom_A(V, W) (as a matrix in the hom_A basis)."""
    V, W = cV.V, cW.V
    F = V.F
    if cV.c != cW.c:
        raise FibredMismatch("adjoint connection needs equal c (%s != %s)" % (cW.c, cV.c))
    K = left_mult_sandwich(V, W, cW.L) - right_mult_sandwich(V, W, cV.L)
    homA = homA or hom_A(V, W)
    Ls = homA.matrices() if homA.dim else None
    if homA.dim == 0:
        return K, F.zeros((0, 0)), homA
    img = K(Ls).reshape(homA.dim, -1)
    if check and not homA.sub.contains(img):
        raise SubspaceNotPreserved("ad. does not preserve hom_A")
    return K, homA.sub.coords(img).T, homA


def dual_connection(calc, conn, homA=None):
    """nabla^vee = ad.((D, 1), nabla) on hom_A(V, A)."""
    A = conn.V.A
    return adjoint_connection(Connection(A.bimodule, calc.D, conn.c), conn, homA)


def lift_identities(V, W, L, Lp, K=None):
    """calL(L) . calL(L') == calL(L . L') for L, L' in end(W), and
    calR(K) . calL(L) == (-1)^{|K||L|} calL(R2 |> L) . calR(R1 |> K)
    for K in end(V), L in end(W), all as matrices on hom(V, W)."""
    Vm, Wm = _mod(V), _mod(W)
    F, H = Vm.F, Vm.H
    m1 = F.dot(left_mult_sandwich(V, W, L).matrix(), left_mult_sandwich(V, W, Lp).matrix())
    m2 = left_mult_sandwich(V, W, compose(Wm, Wm, Wm, L, Lp)).matrix()
    ok1 = F.equal(m1, m2)
    if K is None:
        return ok1, None
    lhs = F.dot(right_mult_sandwich(V, W, K).matrix(), left_mult_sandwich(V, W, L).matrix())
    rhs = F.zeros(lhs.shape)
    actsV = hom_action_basis(Vm, Vm)
    dK = next(iter(homogeneous_parts(Vm, Vm, K)), 0)
    dL = next(iter(homogeneous_parts(Wm, Wm, L)), 0)
    for (p, q), c in F.nonzero_entries(H.R):
        Lq = hom_action_basis(Wm, Wm)[q](L)
        Kp = actsV[p](K)
        term = F.dot(left_mult_sandwich(V, W, Lq).matrix(), right_mult_sandwich(V, W, Kp).matrix())
        rhs = F.add(rhs, F.smul(c, term))
    return ok1, F.equal(lhs, F.smul(F.sign(dK * dL), rhs))


# ---------------------------------------------------------------------------
# curvature

def _need_triangular(V):
    if not _mod(V).H.triangular:
        raise NotTriangular("curvature needs a triangular R-matrix")


def double_bracket(calc, conn, connp, conV=None, endA=None):
    """[[(L, c), (L', c')]] = [L, L'], checked to lie in end_A(V)."""
    V = conn.V
    _need_triangular(V)
    if conV is not None:
        for x in (conn, connp):
            if not conV.contains(x):
                raise NotConnection("argument is not in con(V)")
    out = commutator(V, conn.L, connp.L)
    endA = endA or hom_A(V, V)
    if not endA.contains(out):
        raise MembershipViolated("double bracket left end_A(V)")
    return out


def curvature(calc, conn, conV=None, endA=None):
    return double_bracket(calc, conn, conn, conV, endA)


def ev_on_end(V, K, X):
    """ev(K (x) X) for K in end(hom(V, V)) given as a Sandwich and X in end(V)."""
    M = _mod(V)
    F, H = M.F, M.H
    E = H.ev_element
    acts = hom_action_basis(M, M)
    out = F.zeros((M.dim, M.dim))
    for (i, j), c in F.nonzero_entries(E):
        out = F.add(out, F.smul(c, acts[i](K(acts[j](X)))))
    return out


def bianchi(calc, conn, conV=None, endA=None):
    """ev(ad.(nabla, nabla) (x) Curv(nabla))."""
    V = conn.V
    curv = curvature(calc, conn, conV, endA)
    K = left_mult_sandwich(V, V, conn.L) - right_mult_sandwich(V, V, conn.L)
    return ev_on_end(V, K, curv)


def curvature_additivity(calc, cV, cW, Q=None):
    """Curv(nabla_V [+] nabla_W) == Curv(nabla_V) (x). 1 + 1 (x). Curv(nabla_W),
    on V (x) W and through the projection on V (x)_A W."""
    from .hmod import tensor_obj
    V, W = cV.V, cW.V
    F = V.F
    _need_triangular(V)
    K, Kq, Q = sum_connection(cV, cW, Q)
    T = tensor_obj(_mod(V), _mod(W))
    lhs = commutator(T, K, K)
    cv = commutator(V, cV.L, cV.L)
    cw = commutator(W, cW.L, cW.L)
    rhs = sum_endos(V, W, cv, cw)
    full = F.equal(lhs, rhs)
    lq = Q.induced(lhs, Q)
    rq = Q.induced(rhs, Q)
    return full and F.equal(lq, rq)


# ---------------------------------------------------------------------------
# trace

def trace(V, T):
    """Pointwise trace of T in end_A(V) in the frame of a free module
    A (x) E: sum_s of the s-th component of T(1 (x) e_s)."""
    if getattr(V, "frame", None) is None:
        raise NotFree("module has no declared frame")
    F, A = V.F, V.A
    m = len(V.frame)
    T = F.array(T)
    out = F.zeros(A.dim)
    for s, f in enumerate(V.frame):
        img = F.dot(T, f).reshape(A.dim, m)
        out = F.add(out, img[:, s])
    return out
