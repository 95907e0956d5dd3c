"""
Finite-dimensional quasitriangular quasi-Hopf algebras.

All structure is kept as dense coefficient arrays over the basis of H:

    mul[i, j, k]   e_i e_j = sum_k mul[i,j,k] e_k
    cop[i, j, k]   Delta(e_i) = sum cop[i,j,k] e_j (x) e_k
    anti[i, j]     S(e_i) = sum_j anti[i,j] e_j
    phi[i, j, k]   associator, R[i, j] the R-matrix, etc.

Elements of H^{(x)k} are arrays with k axes ("legs").  The small leg
calculus below (multiply, coproduct on a leg, antipode on a leg, ...) is
enough to write every axiom and every universal element used by the
module categories.
"""

import itertools
from functools import cached_property

import numpy as np

from .exactcore import SparseTensor, NotInvertible, solve

LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class NotNormalized(Exception):
    pass

class BadOrder(ValueError):
    pass


class ValidationReport(object):
    """Ordered list of (name, passed, witness)."""

    def __init__(self, entries=None):
        self.entries = list(entries or [])

    def add(self, name, ok, witness=None):
        self.entries.append((name, bool(ok), None if ok else witness))

    def extend(self, other, prefix=""):
        for name, ok, w in other.entries:
            self.entries.append((prefix + name, ok, w))

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.entries)

    def failures(self):
        return [e for e in self.entries if not e[1]]

    def __getitem__(self, name):
        for n, ok, w in self.entries:
            if n == name:
                return ok
        raise KeyError(name)

    def names(self):
        return [n for n, _, _ in self.entries]

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        lines = []
        for name, ok, w in self.entries:
            lines.append("%-4s %s%s" % ("ok" if ok else "FAIL", name,
                                        "" if ok else "  witness=%s" % (w,)))
        return "\n".join(lines)


def _first_diff(F, A, B):
    D = F.sub(A, B)
    for idx in np.ndindex(D.shape):
        if D[idx] != 0:
            return tuple(int(i) for i in idx)
    return None


class QuasiHopf(object):

    def __init__(self, F, labels, mul, unit, cop, counit, anti, alpha, beta,
                 phi, R, phi_inv=None, R_inv=None, triangular=False, meta=None):
        self.F = F
        self.labels = tuple(str(l) for l in labels)
        n = self.n = len(self.labels)
        A = F.array
        self.mul = A(mul).reshape(n, n, n)
        self.unit = A(unit).reshape(n)
        self.cop = A(cop).reshape(n, n, n)
        self.counit = A(counit).reshape(n)
        self.anti = A(anti).reshape(n, n)
        self.alpha = A(alpha).reshape(n)
        self.beta = A(beta).reshape(n)
        self.phi = A(phi).reshape(n, n, n)
        self.R = A(R).reshape(n, n)
        self.triangular = bool(triangular)
        self.meta = dict(meta or {})
        self._phi_inv_given = phi_inv is not None
        self._R_inv_given = R_inv is not None
        self.phi_inv = A(phi_inv).reshape(n, n, n) if phi_inv is not None else self.inverse(self.phi)
        self.R_inv = A(R_inv).reshape(n, n) if R_inv is not None else self.inverse(self.R)

    # ------------------------------------------------------------------
    # basic elements

    @property
    def dim(self):
        return self.n

    def one(self, k=1):
        out = self.unit
        for _ in range(k - 1):
            out = np.multiply.outer(out, self.unit)
        return self.F.reduce(out) if k > 1 else out.copy()

    def basis_element(self, i):
        e = self.F.zeros(self.n)
        e[i] = self.F.one
        return e

    @cached_property
    def diagonal(self):
        """True when the basis consists of orthogonal idempotents, so that
        products in every tensor power are entrywise."""
        D = self.F.zeros((self.n,) * 3)
        for i in range(self.n):
            D[i, i, i] = self.F.one
        return self.F.equal(self.mul, D)

    def is_one(self, x):
        return self.F.equal(x, self.one(x.ndim))

    def is_trivial(self):
        """phi, R, alpha, beta all units (a genuine Hopf algebra with trivial R)."""
        return (self.is_one(self.phi) and self.is_one(self.R)
                and self.is_one(self.alpha) and self.is_one(self.beta))

    # ------------------------------------------------------------------
    # leg calculus

    def contract(self, spec, *ops):
        """einsum where operands given as the string 'M' stand for the
        structure constants mul.  With an idempotent basis every 'M' is a
        Kronecker delta and its three indices are simply identified."""
        ins, out = spec.split("->")
        terms = ins.split(",")
        assert len(terms) == len(ops)
        if not self.diagonal:
            real = [self.mul if (isinstance(o, str) and o == "M") else o for o in ops]
            return self.F.einsum(spec, *real)
        parent = {}

        def find(c):
            while parent.get(c, c) != c:
                c = parent[c]
            return c

        keep_terms, keep_ops = [], []
        for t, o in zip(terms, ops):
            if isinstance(o, str) and o == "M":
                r = find(t[0])
                for c in t[1:]:
                    rc = find(c)
                    if rc != r:
                        # prefer output letters as representatives
                        if rc in out and r not in out:
                            parent[r] = rc
                            r = rc
                        else:
                            parent[rc] = r
            else:
                keep_terms.append(t)
                keep_ops.append(o)
        keep_terms = ["".join(find(c) for c in t) for t in keep_terms]
        out2 = "".join(find(c) for c in out)
        if len(set(out2)) != len(out2):
            # identified output indices: compute on the reduced set then embed
            uniq = "".join(dict.fromkeys(out2))
            core = self.F.einsum(",".join(keep_terms) + "->" + uniq, *keep_ops)
            res = self.F.zeros((self.n,) * len(out))
            for idx in np.ndindex(core.shape):
                full = tuple(idx[uniq.index(c)] for c in out2)
                res[full] = core[idx]
            return res
        return self.F.einsum(",".join(keep_terms) + "->" + out2, *keep_ops)

    def tmul(self, x, y):
        """Product in H^{(x)k}."""
        x = self.F.array(x)
        y = self.F.array(y)
        assert x.shape == y.shape, (x.shape, y.shape)
        k = x.ndim
        if self.is_one(x):
            return y.copy()
        if self.is_one(y):
            return x.copy()
        if self.diagonal:
            return self.F.mul(x, y)
        a = LETTERS[:k]
        b = LETTERS[k:2 * k]
        c = LETTERS[2 * k:3 * k]
        spec = ",".join([a, b] + [a[i] + b[i] + c[i] for i in range(k)]) + "->" + c
        return self.contract(spec, x, y, *(["M"] * k))

    def prod(self, *xs):
        out = xs[0]
        for y in xs[1:]:
            out = self.tmul(out, y)
        return out

    def cop_leg(self, x, leg):
        """Apply Delta to one leg; the two new legs replace it in place."""
        k = x.ndim
        a = LETTERS[:k]
        new = LETTERS[k:k + 2]
        out = a[:leg] + new + a[leg + 1:]
        return self.F.einsum(a + "," + a[leg] + new + "->" + out, x, self.cop)

    def anti_leg(self, x, leg):
        k = x.ndim
        a = LETTERS[:k]
        z = LETTERS[k]
        out = a[:leg] + z + a[leg + 1:]
        return self.F.einsum(a + "," + a[leg] + z + "->" + out, x, self.anti)

    def eps_leg(self, x, leg):
        k = x.ndim
        a = LETTERS[:k]
        out = a[:leg] + a[leg + 1:]
        return self.F.einsum(a + "," + a[leg] + "->" + out, x, self.counit)

    def lin_leg(self, x, leg, M):
        """Apply a linear map (matrix M[i, j]: e_i -> sum_j M[i,j] e_j) to a leg."""
        k = x.ndim
        a = LETTERS[:k]
        z = LETTERS[k]
        out = a[:leg] + z + a[leg + 1:]
        return self.F.einsum(a + "," + a[leg] + z + "->" + out, x, M)

    def lmul_leg(self, x, leg, h):
        """h * (leg)."""
        k = x.ndim
        a = LETTERS[:k]
        y, z = LETTERS[k], LETTERS[k + 1]
        out = a[:leg] + z + a[leg + 1:]
        return self.contract("%s,%s,%s->%s" % (a, y, y + a[leg] + z, out), x, h, "M")

    def rmul_leg(self, x, leg, h):
        """(leg) * h."""
        k = x.ndim
        a = LETTERS[:k]
        y, z = LETTERS[k], LETTERS[k + 1]
        out = a[:leg] + z + a[leg + 1:]
        return self.contract("%s,%s,%s->%s" % (a, y, a[leg] + y + z, out), x, h, "M")

    def merge(self, x, leg):
        """Multiply leg and leg+1 together into one leg."""
        k = x.ndim
        a = LETTERS[:k]
        z = LETTERS[k]
        out = a[:leg] + z + a[leg + 2:]
        return self.contract("%s,%s->%s" % (a, a[leg] + a[leg + 1] + z, out), x, "M")

    def place(self, x, positions, k):
        """Embed x (m legs) into H^{(x)k}: leg i of x goes to slot
        positions[i], units fill the remaining slots."""
        m = x.ndim
        assert len(positions) == m and len(set(positions)) == m
        out = x
        for _ in range(k - m):
            out = np.multiply.outer(out, self.unit)
        out = self.F.reduce(out) if k > m else out
        rest = [p for p in range(k) if p not in positions]
        src_of = list(positions) + rest
        perm = [src_of.index(s) for s in range(k)]
        return np.transpose(out, perm).copy()

    def flip(self, x):
        return np.transpose(x, (1, 0)).copy()

    def apply_S(self, h):
        return self.F.einsum("i,ij->j", h, self.anti)

    def hmul(self, *hs):
        return self.prod(*[self.F.array(h) for h in hs])

    def eps(self, h):
        return self.F.einsum("i,i->", h, self.counit)

    def delta(self, h):
        return self.F.einsum("i,ijk->jk", h, self.cop)

    def inverse(self, x):
        """Inverse of x in H^{(x)k}."""
        x = self.F.array(x)
        if self.is_one(x):
            return x.copy()
        if self.diagonal:
            out = self.F.zeros(x.shape)
            for idx in np.ndindex(x.shape):
                if x[idx] == 0:
                    raise NotInvertible("zero entry in idempotent basis")
                out[idx] = self.F.inv(x[idx])
            return out
        k = x.ndim
        a = LETTERS[:k]
        b = LETTERS[k:2 * k]
        c = LETTERS[2 * k:3 * k]
        spec = ",".join([a] + [a[i] + b[i] + c[i] for i in range(k)]) + "->" + c + b
        N = self.n ** k
        Lx = self.F.einsum(spec, x, *([self.mul] * k)).reshape(N, N)
        y = solve(self.F, Lx, self.one(k).reshape(-1))
        if y is None:
            raise NotInvertible("element is not invertible")
        y = y.reshape(x.shape)
        if not self.F.equal(self.tmul(x, y), self.one(k)):
            raise NotInvertible("only a one-sided inverse exists")
        return y

    # ------------------------------------------------------------------
    # universal elements used by the module categories

    @cached_property
    def adjoint(self):
        """AD[h, p, q]:  h |> L = sum AD[h,p,q] p L q  (p acting on the
        target, q on the source)."""
        return self.anti_leg(self.cop, 2)

    @cached_property
    def ev_element(self):
        """E with ev(L (x) v) = sum E1 . L(E2 . v):  phi1 (x) S(phi2) alpha phi3."""
        x = self.anti_leg(self.phi, 1)
        x = self.rmul_leg(x, 1, self.alpha)
        return self.merge(x, 1)

    @cached_property
    def curry_element(self):
        """C with zeta(f)(v)(w) = sum f(C1.v (x) C2.w):
        phi^-1_1 (x) phi^-1_2 beta S(phi^-1_3)."""
        x = self.anti_leg(self.phi_inv, 2)
        x = self.lmul_leg(x, 2, self.beta)
        return self.merge(x, 1)

    @cached_property
    def uncurry_element(self):
        """phi1 (x) phi2 (x) S(phi2)... kept for clarity: equals ev_element."""
        return self.ev_element

    @cached_property
    def compose_element(self):
        """K with  L' . L = sum K1 L' K2 L K3  for the internal composition
        built as zeta(ev o (id (x) ev) o Phi)."""
        C = self.curry_element
        E = self.ev_element
        # arguments after Phi and the currying insertion
        T = self.tmul(self.phi, self.cop_leg(C, 0))
        # split the factors hitting L' and L into adjoint halves
        U = self.cop_leg(self.cop_leg(T, 1), 0)
        U = self.anti_leg(self.anti_leg(U, 1), 3)
        # K0 = E1 U0;  K1 = U1 E2 E'1 U2;  K2 = U3 E'2 U4
        G = self.merge(np.multiply.outer(E, E), 1)
        return self.contract("xyz,abcde,xaP,byQ,QcR,dzS,SeT->PRT",
                             G, U, "M", "M", "M", "M", "M")

    @cached_property
    def tensor_element(self):
        """M with (L (x). L')(v (x) x) = (-1)^{|L'||v|} sum
        (M0 L M1 v) (x) (M2 L' M3 x).

        The internal tensor product is the curry of (ev (x) ev) composed
        with the re-bracketing
            (L L')(v x) -> L(L'(v x)) -> L((L' v) x) -> L((v L') x)
                        -> L(v(L' x)) -> (L v)(L' x)
        whose middle step is the braiding hom(X,Y) (x) V -> V (x) hom(X,Y).
        Legs of the running element: (a on L, b on L', c on v, e on x)."""
        C = self.curry_element
        phi, psi, R = self.phi, self.phi_inv, self.R
        s = self.cop_leg(self.cop_leg(C, 1), 0)
        s = self.tmul(self.cop_leg(phi, 2), s)
        s = self.tmul(self.place(psi, (1, 2, 3), 4), s)
        s = self.tmul(self.place(R, (1, 2), 4), s)
        s = self.tmul(self.place(phi, (2, 1, 3), 4), s)
        s = self.tmul(self.place(self.cop_leg(psi, 2), (0, 2, 1, 3), 4), s)
        E = self.ev_element
        t = self.cop_leg(self.cop_leg(s, 1), 0)      # a1 a2 b1 b2 c e
        t = self.anti_leg(self.anti_leg(t, 1), 3)
        return self.contract("xy,zw,abcdef,xaP,byQ,QeU,zcV,dwW,WfX->PUVX",
                             E, E, t, "M", "M", "M", "M", "M", "M")

    # ------------------------------------------------------------------

    def as_sparse(self, name):
        return SparseTensor.from_dense(self.F, getattr(self, name))

    def __repr__(self):
        return "QuasiHopf(dim=%d, %s)" % (self.n, self.F)

    def same_as(self, other):
        """Componentwise equality of all structure."""
        F = self.F
        if self.n != other.n or self.F != other.F:
            return False
        for name in ("mul", "unit", "cop", "counit", "anti", "alpha", "beta",
                     "phi", "phi_inv", "R", "R_inv"):
            if not F.equal(getattr(self, name), getattr(other, name)):
                return False
        return True

    # ------------------------------------------------------------------
    # abelian group data (present only for builder-made algebras)

    def idempotents(self):
        """Rows: coefficient vectors of the character idempotents e_p,
        ordered like meta['elements']."""
        g = self.meta.get("group")
        if g is None:
            raise ValueError("not an abelian group algebra")
        return self.F.array(g["idempotents"])

    def weight_action(self, weights):
        """Action stack for a module spanned by weight vectors:
        g |> v_j = chi_{w_j}(g) v_j."""
        g = self.meta["group"]
        elements = [tuple(e) for e in g["elements"]]
        F = self.F
        d = len(weights)
        rho = F.zeros((self.n, d, d))
        if g["basis"] == "group":
            for i, h in enumerate(elements):
                for j, w in enumerate(weights):
                    rho[i, j, j] = character(F, g["orders"], g["omega"], tuple(w), h)
        else:
            for i, p in enumerate(elements):
                for j, w in enumerate(weights):
                    if tuple(x % o for x, o in zip(w, g["orders"])) == p:
                        rho[i, j, j] = F.one
        return rho


# ---------------------------------------------------------------------------
# validation

def validate_quasi_hopf(H):
    """Check the quasitriangular quasi-Hopf axioms on basis elements."""
    F, n = H.F, H.n
    rep = ValidationReport()
    mul, cop = H.mul, H.cop
    one1, one2, one3 = H.one(1), H.one(2), H.one(3)

    # algebra
    lhs = F.einsum("ijm,mkl->ijkl", mul, mul)
    rhs = F.einsum("jkm,iml->ijkl", mul, mul)
    rep.add("associativity", F.equal(lhs, rhs), _first_diff(F, lhs, rhs))
    I = F.eye(n)
    left = F.einsum("i,ijk->jk", H.unit, mul)
    right = F.einsum("j,ijk->ik", H.unit, mul)
    rep.add("unit", F.equal(left, I) and F.equal(right, I), _first_diff(F, left, I))

    # coproduct / counit are algebra maps
    dprod = F.einsum("ijm,mab->ijab", mul, cop)
    proddelta = np.stack([np.stack([H.tmul(cop[i], cop[j]) for j in range(n)]) for i in range(n)])
    rep.add("coproduct multiplicative", F.equal(dprod, proddelta), _first_diff(F, dprod, proddelta))
    rep.add("coproduct unital", F.equal(H.delta(H.unit), one2))
    eprod = F.einsum("ijm,m->ij", mul, H.counit)
    rep.add("counit multiplicative", F.equal(eprod, np.multiply.outer(H.counit, H.counit)))
    rep.add("counit unital", H.eps(H.unit) == F.one)

    # counit laws
    l = H.eps_leg(cop, 1)
    r = H.eps_leg(cop, 2)
    rep.add("counit laws", F.equal(l, I) and F.equal(r, I), _first_diff(F, l, I))

    # invertibility of phi and R
    rep.add("associator invertible", F.equal(H.tmul(H.phi, H.phi_inv), one3)
            and F.equal(H.tmul(H.phi_inv, H.phi), one3))
    rep.add("R-matrix invertible", F.equal(H.tmul(H.R, H.R_inv), one2)
            and F.equal(H.tmul(H.R_inv, H.R), one2))

    # quasi-coassociativity
    bad = None
    for i in range(n):
        a = H.cop_leg(cop[i], 1)   # (id (x) Delta) Delta
        b = H.cop_leg(cop[i], 0)   # (Delta (x) id) Delta
        if not F.equal(H.tmul(a, H.phi), H.tmul(H.phi, b)):
            bad = (i,)
            break
    rep.add("quasi-coassociativity", bad is None, bad)

    # normalizations of phi
    for name, leg in (("(eps,id,id)", 0), ("(id,eps,id)", 1), ("(id,id,eps)", 2)):
        val = H.eps_leg(H.phi, leg)
        rep.add("associator normalization %s" % name, F.equal(val, one2))

    # pentagon
    p = H.phi
    lhs = H.tmul(H.cop_leg(p, 2), H.cop_leg(p, 0))
    rhs = H.prod(H.place(p, (1, 2, 3), 4), H.cop_leg(p, 1), H.place(p, (0, 1, 2), 4))
    rep.add("pentagon", F.equal(lhs, rhs), _first_diff(F, lhs, rhs))

    # antipode
    Sm = H.anti
    santi = F.einsum("ijm,mk->ijk", mul, Sm)
    santi2 = F.einsum("ia,jb,bak->ijk", Sm, Sm, mul)
    rep.add("antipode anti-multiplicative", F.equal(santi, santi2), _first_diff(F, santi, santi2))
    bad_a = bad_b = None
    for i in range(n):
        d = cop[i]
        e = H.counit[i]
        # S(h1) alpha h2
        x = H.rmul_leg(H.anti_leg(d, 0), 0, H.alpha)
        v = H.merge(x, 0)
        if not F.equal(v, F.smul(e, H.alpha)):
            bad_a = bad_a or (i,)
        # h1 beta S(h2)
        y = H.rmul_leg(d, 0, H.beta)
        y = H.merge(H.anti_leg(y, 1), 0)
        if not F.equal(y, F.smul(e, H.beta)):
            bad_b = bad_b or (i,)
    rep.add("antipode alpha identity", bad_a is None, bad_a)
    rep.add("antipode beta identity", bad_b is None, bad_b)

    # phi1 beta S(phi2) alpha phi3 = 1
    x = H.rmul_leg(H.phi, 0, H.beta)
    x = H.rmul_leg(H.anti_leg(x, 1), 1, H.alpha)
    v = H.merge(H.merge(x, 0), 0)
    rep.add("associator antipode identity", F.equal(v, one1))
    # S(psi1) alpha psi2 beta S(psi3) = 1
    x = H.rmul_leg(H.anti_leg(H.phi_inv, 0), 0, H.alpha)
    x = H.rmul_leg(x, 1, H.beta)
    x = H.anti_leg(x, 2)
    v = H.merge(H.merge(x, 0), 0)
    rep.add("inverse associator antipode identity", F.equal(v, one1))

    # quasitriangularity
    R = H.R
    rep.add("R normalization", F.equal(H.eps_leg(R, 0), one1) and F.equal(H.eps_leg(R, 1), one1))
    bad = None
    for i in range(n):
        d = cop[i]
        if not F.equal(H.tmul(R, d), H.tmul(H.flip(d), R)):
            bad = (i,)
            break
    rep.add("R intertwines coproduct", bad is None, bad)
    # (Delta (x) id) R = phi_312 R_13 phi^-1_132 R_23 phi
    lhs = H.cop_leg(R, 0)
    rhs = H.prod(H.place(p, (2, 0, 1), 3), H.place(R, (0, 2), 3),
                 H.place(H.phi_inv, (0, 2, 1), 3), H.place(R, (1, 2), 3), p)
    rep.add("hexagon (Delta,id)", F.equal(lhs, rhs), _first_diff(F, lhs, rhs))
    # (id (x) Delta) R = phi^-1_231 R_13 phi_213 R_12 phi^-1
    lhs = H.cop_leg(R, 1)
    rhs = H.prod(H.place(H.phi_inv, (1, 2, 0), 3), H.place(R, (0, 2), 3),
                 H.place(p, (1, 0, 2), 3), H.place(R, (0, 1), 3), H.phi_inv)
    rep.add("hexagon (id,Delta)", F.equal(lhs, rhs), _first_diff(F, lhs, rhs))

    if H.triangular:
        v = H.tmul(H.flip(R), R)
        rep.add("triangularity", F.equal(v, one2), _first_diff(F, v, one2))
    return rep


# ---------------------------------------------------------------------------
# twisting

class TwistData(object):
    """An invertible normalized F in H (x) H."""

    def __init__(self, H, F, F_inv=None):
        self.H = H
        self.F = H.F.array(F).reshape(H.n, H.n)
        self.F_inv = H.F.array(F_inv).reshape(H.n, H.n) if F_inv is not None else H.inverse(self.F)
        if not (H.F.equal(H.tmul(self.F, self.F_inv), H.one(2))
                and H.F.equal(H.tmul(self.F_inv, self.F), H.one(2))):
            raise NotInvertible("F and F_inv are not inverse")
        one = H.one(1)
        if not (H.F.equal(H.eps_leg(self.F, 0), one) and H.F.equal(H.eps_leg(self.F, 1), one)):
            raise NotNormalized("(eps (x) id)(F) = 1 = (id (x) eps)(F) fails")

    def inverse_twist(self, HF):
        """F^-1 viewed as a twist of H_F; twisting H_F by it gives back H."""
        return TwistData(HF, self.F_inv, self.F)

    def as_sparse(self):
        return SparseTensor.from_dense(self.H.F, self.F)


def twist_hopf(H, T):
    """H_F for the cochain twist T (a TwistData over H)."""
    if not isinstance(T, TwistData):
        T = TwistData(H, T)
    Fx, Fi = T.F, T.F_inv
    n = H.n
    cop = np.stack([H.prod(Fx, H.cop[i], Fi) for i in range(n)])
    F23 = H.place(Fx, (1, 2), 3)
    F12 = H.place(Fx, (0, 1), 3)
    Fi23 = H.place(Fi, (1, 2), 3)
    Fi12 = H.place(Fi, (0, 1), 3)
    phi = H.prod(F23, H.cop_leg(Fx, 1), H.phi, H.cop_leg(Fi, 0), Fi12)
    phi_inv = H.prod(F12, H.cop_leg(Fx, 0), H.phi_inv, H.cop_leg(Fi, 1), Fi23)
    R = H.prod(H.flip(Fx), H.R, Fi)
    R_inv = H.prod(Fx, H.R_inv, H.flip(Fi))
    # alpha_F = S(Fi1) alpha Fi2 ;  beta_F = F1 beta S(F2)
    a = H.merge(H.rmul_leg(H.anti_leg(Fi, 0), 0, H.alpha), 0)
    b = H.merge(H.anti_leg(H.rmul_leg(Fx, 0, H.beta), 1), 0)
    meta = dict(H.meta)
    meta["twisted"] = True
    return QuasiHopf(H.F, H.labels, H.mul, H.unit, cop, H.counit, H.anti, a, b,
                     phi, R, phi_inv=phi_inv, R_inv=R_inv,
                     triangular=H.triangular, meta=meta)


# ---------------------------------------------------------------------------
# builders

def trivial_hopf(F):
    """The ground field as a Hopf algebra."""
    one = [[[1]]]
    return QuasiHopf(F, ["1"], one, [1], one, [1], [[1]], [1], [1],
                     one, [[1]], phi_inv=one, R_inv=[[1]], triangular=True,
                     meta={"group": {"orders": [], "basis": "group", "elements": [()],
                                     "omega": [], "idempotents": [[1]]}})


def _root_of_unity(F, N):
    if N == 1:
        return F.one
    if F.char == 0:
        if N == 2:
            return F.scalar(-1)
        raise BadOrder("the rationals only contain square roots of unity")
    p = F.p
    if (p - 1) % N:
        raise BadOrder("no primitive %d-th root of unity in GF(%d)" % (N, p))
    for g in range(2, p):
        w = pow(g, (p - 1) // N, p)
        if all(pow(w, N // q, p) != 1 for q in _prime_factors(N)):
            return w
    return 1 if N == 1 else None


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def character(F, orders, omega, p, g):
    """chi_p(g) = prod omega_i^(p_i g_i)."""
    val = F.one
    for o, w, a, b in zip(orders, omega, p, g):
        val = F.scalar(val * F.scalar(w) ** ((a * b) % o))
    return val


def build_group_hopf(orders, F, basis="group"):
    """Group algebra of Z_{N1} x ... x Z_{Nk}.

    basis='group' uses the group elements; basis='characters' uses the
    character idempotents e_p (needs the roots of unity in F), in which
    the algebra is diagonal."""
    orders = [int(o) for o in orders]
    if any(o < 1 for o in orders):
        raise BadOrder("orders must be positive")
    order = int(np.prod(orders)) if orders else 1
    if F.char and order % F.char == 0:
        raise BadOrder("characteristic divides the group order")
    elements = list(itertools.product(*[range(o) for o in orders]))
    index = {g: i for i, g in enumerate(elements)}
    n = len(elements)

    def add(g, h):
        return tuple((a + b) % o for a, b, o in zip(g, h, orders))

    def neg(g):
        return tuple((-a) % o for a, o in zip(g, orders))

    zero = tuple(0 for _ in orders)
    omega = None
    try:
        omega = [_root_of_unity(F, o) for o in orders]
    except BadOrder:
        if basis != "group":
            raise
    if omega is not None:
        inv_order = F.inv(order)
        P = F.zeros((n, n))
        for i, p in enumerate(elements):
            for j, g in enumerate(elements):
                P[i, j] = F.scalar(character(F, orders, omega, p, neg(g)) * inv_order)
        idem = P
    else:
        idem = None

    mul = F.zeros((n, n, n))
    cop = F.zeros((n, n, n))
    anti = F.zeros((n, n))
    counit = F.zeros(n)
    unit = F.zeros(n)
    if basis == "group":
        for g in elements:
            for h in elements:
                mul[index[g], index[h], index[add(g, h)]] = F.one
            cop[index[g], index[g], index[g]] = F.one
            anti[index[g], index[neg(g)]] = F.one
            counit[index[g]] = F.one
        unit[index[zero]] = F.one
        if idem is not None:
            idem_rows = idem
    elif basis == "characters":
        for p in elements:
            i = index[p]
            mul[i, i, i] = F.one
            unit[i] = F.one
            for q in elements:
                cop[i, index[q], index[add(p, neg(q))]] = F.one
            anti[i, index[neg(p)]] = F.one
        counit[index[zero]] = F.one
        idem_rows = F.eye(n)
    else:
        raise ValueError("basis must be 'group' or 'characters'")
    e0 = unit
    phi = np.multiply.outer(np.multiply.outer(e0, e0), e0)
    R = np.multiply.outer(e0, e0)
    if basis == "group":
        labels = ["g" + "".join(str(a) for a in g) if g else "1" for g in elements]
    else:
        labels = ["e" + "".join(str(a) for a in p) for p in elements]
    meta = {"group": {"orders": orders, "basis": basis, "elements": elements,
                      "omega": omega, "idempotents": idem_rows if idem is not None else None}}
    return QuasiHopf(F, labels, mul, unit, cop, counit, anti, unit, unit,
                     F.reduce(phi), F.reduce(R), phi_inv=F.reduce(phi), R_inv=F.reduce(R),
                     triangular=True, meta=meta)


def twist_from_cochain(H, sigma):
    """F = sum sigma(p, q) e_p (x) e_q over the character idempotents of an
    abelian group algebra; sigma is a callable on pairs of group tuples."""
    g = H.meta["group"]
    elements = [tuple(e) for e in g["elements"]]
    P = H.idempotents()
    F = H.F
    n = H.n
    S = F.zeros((n, n))
    for i, p in enumerate(elements):
        for j, q in enumerate(elements):
            S[i, j] = F.scalar(sigma(p, q))
    Fx = F.einsum("pq,pi,qj->ij", S, P, P)
    Si = F.zeros((n, n))
    for idx in np.ndindex(S.shape):
        Si[idx] = F.inv(S[idx])
    Fi = F.einsum("pq,pi,qj->ij", Si, P, P)
    return TwistData(H, Fx, Fi)
