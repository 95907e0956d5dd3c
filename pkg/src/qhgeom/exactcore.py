"""
Exact scalars, graded vector spaces, graded maps and sparse tensors.

Two kinds of field are supported: the rationals (entries are gmpy2.mpq
held in object arrays) and prime fields F_p (entries are int64 reduced
mod p, or python ints in object arrays when p is large).  Everything
downstream goes through the handful of primitives here: einsum/dot with
reduction, row reduction, nullspaces and quotients.
"""

import numpy as np
import gmpy2
from gmpy2 import mpq


class ExactError(Exception):
    pass

class DependentBasis(ExactError):
    pass

class NotInvertible(ExactError):
    pass

class ShapeMismatch(ExactError):
    pass


# ---------------------------------------------------------------------------
# fields

class Field(object):
    """Base class. Subclasses fix dtype and the reduction rule."""

    char = None
    dtype = object

    def __eq__(self, other):
        return isinstance(other, Field) and self.key == other.key

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return self.name

    # construction
    def zeros(self, shape):
        return np.zeros(shape, dtype=self.dtype) if self.dtype != object \
            else np.full(shape, self.zero, dtype=object)

    def eye(self, n):
        A = self.zeros((n, n))
        for i in range(n):
            A[i, i] = self.one
        return A

    def ones(self, shape):
        A = self.zeros(shape)
        A[...] = self.one
        return A

    def is_zero(self, A):
        A = np.asarray(A)
        if A.size == 0:
            return True
        if A.dtype == object:
            return not np.any(A != 0)
        return not A.any()

    def equal(self, A, B):
        A = self.array(A)
        B = self.array(B)
        if A.shape != B.shape:
            return False
        return self.is_zero(self.sub(A, B))

    def add(self, A, B):
        return self.reduce(np.asarray(A) + np.asarray(B))

    def sub(self, A, B):
        return self.reduce(np.asarray(A) - np.asarray(B))

    def neg(self, A):
        return self.reduce(-np.asarray(A))

    def mul(self, A, B):
        return self.reduce(np.asarray(A) * np.asarray(B))

    def smul(self, c, A):
        return self.reduce(np.asarray(A) * self.scalar(c))

    def dot(self, A, B):
        return self.einsum_raw(np.matmul, A, B)

    def einsum(self, spec, *ops):
        ops = [self.array(op) for op in ops]
        return self._einsum(spec, ops)

    def sign(self, k):
        return self.one if k % 2 == 0 else self.neg(self.one)

    def nonzero_entries(self, A):
        """Sorted list of (index tuple, scalar) for the nonzero entries."""
        A = np.asarray(A)
        if A.dtype == object:
            idx = [i for i in np.ndindex(A.shape) if A[i] != 0]
        else:
            idx = [tuple(int(t) for t in i) for i in zip(*np.nonzero(A))]
        return [(i, self.scalar(A[i])) for i in idx]


class Rationals(Field):
    """The rational field; entries are mpq in object arrays."""

    char = 0
    dtype = object
    name = "Q"
    key = ("Q",)

    def __init__(self):
        self.zero = mpq(0)
        self.one = mpq(1)

    def scalar(self, x):
        if isinstance(x, np.ndarray) and x.ndim == 0:
            x = x[()]
        if isinstance(x, str):
            x = x.strip()
            try:
                return mpq(x)
            except ValueError:
                raise ValueError("not a rational: %r" % x)
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        return mpq(x)

    def array(self, data):
        if isinstance(data, np.ndarray) and data.dtype == object:
            return data
        A = np.asarray(data, dtype=object)
        if A.size and not all(type(x) is type(self.one) for x in A.flat):
            A = np.frompyfunc(self.scalar, 1, 1)(A)
            A = np.asarray(A, dtype=object)
        return A

    def reduce(self, A):
        A = np.asarray(A, dtype=object)
        return A[()] if A.ndim == 0 else A

    def inv(self, x):
        x = self.scalar(x)
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return 1 / x

    def einsum_raw(self, fn, *ops):
        ops = [self.array(op) for op in ops]
        if fn is np.matmul and len(ops) == 2:
            return self.reduce(qq_matmul(*ops))
        return self.reduce(fn(*ops))

    def _einsum(self, spec, ops):
        if len(ops) == 1:
            return np.asarray(np.einsum(spec, *ops), dtype=object)
        return object_einsum(spec, ops)

    def format(self, x):
        x = self.scalar(x)
        if x.denominator == 1:
            return str(x.numerator)
        return "%d/%d" % (x.numerator, x.denominator)

    def parse(self, s):
        if isinstance(s, bool):
            raise ValueError("not a rational: %r" % (s,))
        if isinstance(s, int):
            return mpq(s)
        if not isinstance(s, str):
            raise ValueError("rationals are written as strings, got %r" % (s,))
        return self.scalar(s)


def _dyadic_scaled(A):
    """(float array of integers, exponent k) with A = out / 2^k exactly, or
    None when A has entries that are not small dyadic rationals."""
    try:
        X = A.astype(np.float64)
    except (TypeError, OverflowError):
        return None
    if not np.all(X == A):
        return None
    m = np.abs(X).max() if X.size else 0.0
    for k in range(0, 40):
        Y = X * (2.0 ** k)
        if np.all(Y == np.rint(Y)):
            return Y, k, m * 2.0 ** k
    return None


def qq_matmul(A, B):
    """Exact matmul of object arrays of rationals.  Dyadic inputs whose
    scaled products stay below 2^53 go through float64 BLAS (then every
    partial sum is an exactly representable integer); anything else is
    multiplied as python objects."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.dtype != object or B.dtype != object or A.size == 0 or B.size == 0 \
            or A.ndim == 0 or B.ndim == 0:
        return np.matmul(A, B)
    a = _dyadic_scaled(A)
    b = _dyadic_scaled(B) if a is not None else None
    if a is not None and b is not None:
        K = A.shape[-1]
        if a[2] * b[2] * K < 2.0 ** 52:
            Z = np.matmul(a[0], b[0])
            den = mpq(2) ** (a[1] + b[1])
            return _from_float_ints(Z, den)
    return np.matmul(A, B)


def _from_float_ints(Z, den):
    out = np.frompyfunc(lambda z: mpq(int(z)) / den, 1, 1)(Z) if den != 1 else \
        np.frompyfunc(lambda z: mpq(int(z)), 1, 1)(Z)
    return np.asarray(out, dtype=object)


def object_einsum(spec, ops):
    """Exact einsum for object arrays: numpy's contraction order, executed
    pairwise as batched matmuls restricted to the rows, columns and inner
    indices that are not identically zero."""
    ins, out = spec.replace(" ", "").split("->")
    terms = ins.split(",")
    if any(len(set(t)) != len(t) for t in terms) or "." in spec:
        return np.asarray(np.einsum(spec, *ops), dtype=object)
    kind = "optimal" if len(ops) <= 5 else "greedy"
    path = np.einsum_path(spec, *ops, optimize=kind)[0][1:]
    work = list(zip([np.asarray(op, dtype=object) for op in ops], terms))
    for step in path:
        picked = [work[i] for i in step]
        for i in sorted(step, reverse=True):
            del work[i]
        rest = "".join(t for _, t in work) + out
        x, sx = picked[0]
        for j in range(1, len(picked)):
            y, sy = picked[j]
            keep = rest + "".join(t for _, t in picked[j + 1:])
            x, sx = _contract_pair(x, sx, y, sy, keep)
        if len(picked) == 1:
            x, sx = _sum_out(x, sx, rest)
        work.append((x, sx))
    x, sx = work[0]
    x, sx = _sum_out(x, sx, out)
    return np.transpose(x, [sx.index(c) for c in out]) if out else x


def _sum_out(x, sx, keep):
    axes = tuple(i for i, c in enumerate(sx) if c not in keep)
    if axes:
        x = np.sum(x, axis=axes, dtype=object) if x.ndim > len(axes) else \
            np.asarray(np.sum(x, dtype=object), dtype=object)
        sx = "".join(c for c in sx if c in keep)
    return x, sx


def _contract_pair(x, sx, y, sy, keep):
    x, sx = _sum_out(x, sx, sy + keep)
    y, sy = _sum_out(y, sy, sx + keep)
    batch = [c for c in sx if c in sy and c in keep]
    inner = [c for c in sx if c in sy and c not in keep]
    xf = [c for c in sx if c not in sy]
    yf = [c for c in sy if c not in sx]
    dims = dict(zip(sx, x.shape))
    dims.update(zip(sy, y.shape))
    size = lambda cs: int(np.prod([dims[c] for c in cs])) if cs else 1
    B, M, K, N = size(batch), size(xf), size(inner), size(yf)
    X = np.transpose(x, [sx.index(c) for c in batch + xf + inner]).reshape(B, M, K)
    Y = np.transpose(y, [sy.index(c) for c in batch + inner + yf]).reshape(B, K, N)
    nzX = X != 0
    nzY = Y != 0
    rows = np.flatnonzero(nzX.any(axis=(0, 2)))
    cols = np.flatnonzero(nzY.any(axis=(0, 1)))
    mids = np.flatnonzero(nzX.any(axis=(0, 1)) & nzY.any(axis=(0, 2)))
    Z = np.full((B, M, N), mpq(0), dtype=object)
    if len(rows) and len(cols) and len(mids):
        Xs = X[:, rows][:, :, mids]
        Ys = Y[:, mids][:, :, cols]
        Z[np.ix_(np.arange(B), rows, cols)] = qq_matmul(Xs, Ys)
    sz = "".join(batch + xf + yf)
    return Z.reshape([dims[c] for c in sz]), sz


def _is_prime(p):
    return p >= 2 and gmpy2.is_prime(p)


class PrimeField(Field):
    """F_p. Small p uses int64 storage and float64 BLAS where it is exact."""

    SMALL = 97

    def __init__(self, p):
        p = int(p)
        if not _is_prime(p):
            raise ValueError("%d is not prime" % p)
        self.p = p
        self.char = p
        self.name = "GF(%d)" % p
        self.key = ("GF", p)
        self.small = p <= self.SMALL
        self.dtype = np.int64 if self.small else object
        self.zero = 0
        self.one = 1

    def scalar(self, x):
        if isinstance(x, np.ndarray) and x.ndim == 0:
            x = x[()]
        if isinstance(x, str):
            x = mpq(x.strip())
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        if hasattr(x, "denominator"):
            n, d = int(x.numerator), int(x.denominator)
            if d % self.p == 0:
                raise ZeroDivisionError("denominator divisible by p")
            return (n * pow(d, -1, self.p)) % self.p
        return int(x) % self.p

    def array(self, data):
        A = np.asarray(data)
        if self.small:
            if A.dtype == object:
                A = np.frompyfunc(self.scalar, 1, 1)(A)
            return np.asarray(A, dtype=np.int64) % self.p
        A = np.asarray(data, dtype=object)
        if A.size:
            A = np.asarray(np.frompyfunc(self.scalar, 1, 1)(A), dtype=object)
        return A

    def reduce(self, A):
        A = np.asarray(A)
        if self.small:
            A = np.asarray(A, dtype=np.int64) % self.p
        else:
            A = np.asarray(A % self.p, dtype=object)
        return A[()] if A.ndim == 0 else A

    def inv(self, x):
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(x, -1, self.p)

    def einsum_raw(self, fn, *ops):
        ops = [self.array(op) for op in ops]
        if self.small:
            inner = ops[0].shape[-1] if ops[0].ndim else 1
            if (self.p - 1) ** 2 * max(inner, 1) < 2 ** 52:
                out = fn(*[op.astype(np.float64) for op in ops])
                return np.rint(out).astype(np.int64) % self.p
        return self.reduce(fn(*ops))

    def _einsum(self, spec, ops):
        if not self.small:
            return self.reduce(np.einsum(spec, *ops, optimize="greedy"))
        ins, out = spec.split("->")
        ins = ins.split(",")
        sizes = {}
        for term, op in zip(ins, ops):
            for ch, n in zip(term, op.shape):
                sizes[ch] = n
        summed = set("".join(ins)) - set(out)
        bound = (self.p - 1) ** len(ops)
        for ch in summed:
            bound *= sizes[ch]
        if bound < 2 ** 52:
            res = np.einsum(spec, *[op.astype(np.float64) for op in ops],
                            optimize="greedy")
            return np.rint(res).astype(np.int64) % self.p
        if bound < 2 ** 62:
            return np.einsum(spec, *ops, optimize="greedy") % self.p
        # contract pairwise with reduction in between
        return self.reduce(np.einsum(spec, *[op.astype(object) for op in ops],
                                     optimize="greedy"))

    def format(self, x):
        return int(self.scalar(x))

    def parse(self, s):
        if isinstance(s, bool) or not isinstance(s, int):
            raise ValueError("prime field elements are written as integers, got %r" % (s,))
        if not 0 <= s < self.p:
            raise ValueError("%d is not a canonical representative mod %d" % (s, self.p))
        return s


QQ = Rationals()

_fields = {}

def GF(p):
    if p not in _fields:
        _fields[p] = PrimeField(p)
    return _fields[p]


def field_from_name(name):
    """'Q' or 'GF(p)' (also 'F_p', 'Fp')."""
    s = str(name).strip()
    if s in ("Q", "QQ"):
        return QQ
    for pre in ("GF(", "F_", "F"):
        if s.startswith(pre):
            body = s[len(pre):].rstrip(")")
            if body.isdigit():
                return GF(int(body))
    raise ValueError("unknown field %r" % name)


# ---------------------------------------------------------------------------
# row reduction

def rref(F, M):
    """Reduced row echelon form. Returns (R, pivots) with R holding only
    the nonzero rows."""
    M = F.array(M).copy()
    if M.ndim != 2:
        raise ShapeMismatch("rref wants a matrix")
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c] != 0)
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = F.smul(F.inv(M[r, c]), M[r])
        hit = np.flatnonzero(M[:, c] != 0)
        hit = hit[hit != r]
        if len(hit):
            M[hit] = F.sub(M[hit], F.reduce(np.multiply.outer(M[hit, c], M[r])))
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace(F, M):
    """Rows form the RREF basis of {x : M x = 0}."""
    M = F.array(M)
    n = M.shape[1]
    if M.shape[0] == 0:
        return F.eye(n)
    R, piv = rref(F, M)
    free = [c for c in range(n) if c not in set(piv)]
    K = F.zeros((len(free), n))
    for j, f in enumerate(free):
        K[j, f] = F.one
        for i, pc in enumerate(piv):
            K[j, pc] = F.neg(R[i, f])
    if len(free) == 0:
        return K
    return rref(F, K)[0]


def rank(F, M):
    M = F.array(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def row_basis(F, M):
    """Canonical (RREF) basis of the row span."""
    M = F.array(M)
    if M.shape[0] == 0:
        return M, []
    return rref(F, M)


def reduce_rows(F, B, piv, X):
    """Residual of the rows of X modulo the RREF basis (B, piv)."""
    X = F.array(X)
    if len(piv) == 0:
        return X
    return F.sub(X, F.dot(X[:, piv], B))


def in_span(F, B, piv, X):
    X = F.array(X)
    if X.ndim == 1:
        X = X[None, :]
    return F.is_zero(reduce_rows(F, B, piv, X))


def solve(F, A, b):
    """One solution x of A x = b, or None."""
    A = F.array(A)
    b = F.array(b)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    aug = np.concatenate([A, b], axis=1)
    R, piv = rref(F, aug)
    n = A.shape[1]
    if any(p >= n for p in piv):
        return None
    x = F.zeros((n, b.shape[1]))
    for i, pc in enumerate(piv):
        x[pc] = R[i, n:]
    return x[:, 0] if vec else x


def inverse_matrix(F, A):
    A = F.array(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeMismatch("inverse of non-square matrix")
    X = solve(F, A, F.eye(n))
    if X is None or not F.equal(F.dot(A, X), F.eye(n)):
        raise NotInvertible("singular matrix")
    return X


def intersect_rows(F, B1, B2):
    """RREF basis of span(B1) ∩ span(B2) (rows)."""
    B1 = F.array(B1)
    B2 = F.array(B2)
    if B1.shape[0] == 0 or B2.shape[0] == 0:
        return F.zeros((0, B1.shape[1]))
    # x B1 = y B2
    K = nullspace(F, np.concatenate([B1, F.neg(B2)], axis=0).T)
    if K.shape[0] == 0:
        return F.zeros((0, B1.shape[1]))
    V = F.dot(K[:, :B1.shape[0]], B1)
    return row_basis(F, V)[0]


# ---------------------------------------------------------------------------
# graded spaces and maps

class GradedSpace(object):
    """A finite basis with an integer degree attached to each vector.

    Basis order is the declaration order; blocks are read off by degree.
    """

    def __init__(self, degrees, labels=None):
        self.degrees = tuple(int(d) for d in degrees)
        if labels is None:
            labels = ["e%d" % i for i in range(len(self.degrees))]
        labels = [str(l) for l in labels]
        assert len(labels) == len(self.degrees)
        self.labels = tuple(labels)
        self._deg = np.array(self.degrees, dtype=np.int64)

    @classmethod
    def from_dims(cls, dims, prefix="e"):
        degs = []
        for n in sorted(dims):
            degs += [n] * dims[n]
        return cls(degs, ["%s%d" % (prefix, i) for i in range(len(degs))])

    @property
    def dim(self):
        return len(self.degrees)

    def __len__(self):
        return self.dim

    @property
    def dims(self):
        out = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    @property
    def support(self):
        return sorted(set(self.degrees))

    def indices(self, n):
        return np.flatnonzero(self._deg == n)

    def degree_array(self):
        return self._deg.copy()

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.degrees == other.degrees

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.degrees)

    def __repr__(self):
        return "GradedSpace(%s)" % (self.dims,)

    def tensor(self, other):
        degs = [a + b for a in self.degrees for b in other.degrees]
        labs = ["%s*%s" % (a, b) for a in self.labels for b in other.labels]
        return GradedSpace(degs, labs)

    def shift(self, k):
        return GradedSpace([d + k for d in self.degrees], self.labels)

    def hom(self, other):
        """Graded space of linear maps self -> other, basis E_{w,v}
        in row-major order (w outer, v inner), degree |w| - |v|."""
        degs = [b - a for b in other.degrees for a in self.degrees]
        labs = ["%s<%s" % (b, a) for b in other.labels for a in self.labels]
        return GradedSpace(degs, labs)

    def direct_sum(self, other):
        return GradedSpace(self.degrees + other.degrees, self.labels + other.labels)

    def parity(self, F):
        """Diagonal of the Koszul grading involution."""
        return F.array([(-1) ** (d % 2) for d in self.degrees])

    def homogeneous(self, vec, F):
        """Degree of a nonzero vector, or None if it mixes degrees."""
        vec = np.asarray(vec)
        if vec.dtype == object:
            nz = [i for i, x in enumerate(vec) if x != 0]
        else:
            nz = list(np.flatnonzero(vec))
        degs = set(self.degrees[i] for i in nz)
        if len(degs) == 1:
            return degs.pop()
        return None if degs else 0


def shift_mask(source, target, shift):
    """Boolean matrix of allowed (target, source) positions for a map of
    the given degree."""
    return (target.degree_array()[:, None] == source.degree_array()[None, :] + shift)


class GradedMap(object):
    """A homogeneous linear map of degree ``shift`` stored as one dense
    matrix (target.dim x source.dim) that vanishes off the allowed blocks."""

    def __init__(self, F, source, target, shift, matrix, check=True):
        self.F = F
        self.source = source
        self.target = target
        self.shift = int(shift)
        M = F.array(matrix)
        if M.shape != (target.dim, source.dim):
            raise ShapeMismatch("matrix %s for map %d -> %d" % (M.shape, source.dim, target.dim))
        if check:
            bad = ~shift_mask(source, target, self.shift)
            if not F.is_zero(M[bad]):
                raise ShapeMismatch("matrix is not homogeneous of degree %d" % self.shift)
        self.matrix = M

    @classmethod
    def zero(cls, F, source, target, shift=0):
        return cls(F, source, target, shift, F.zeros((target.dim, source.dim)), check=False)

    @classmethod
    def identity(cls, F, space):
        return cls(F, space, space, 0, F.eye(space.dim), check=False)

    def block(self, n):
        """Matrix from source degree n to target degree n + shift."""
        return self.matrix[np.ix_(self.target.indices(n + self.shift), self.source.indices(n))]

    def blocks(self):
        out = {}
        for n in self.source.support:
            if len(self.target.indices(n + self.shift)):
                out[n] = self.block(n)
        return out

    def __call__(self, v):
        return self.F.dot(self.matrix, self.F.array(v))

    def __matmul__(self, other):
        assert self.source == other.target
        return GradedMap(self.F, other.source, self.target, self.shift + other.shift,
                         self.F.dot(self.matrix, other.matrix), check=False)

    def __add__(self, other):
        assert (self.source, self.target, self.shift) == (other.source, other.target, other.shift)
        return GradedMap(self.F, self.source, self.target, self.shift,
                         self.F.add(self.matrix, other.matrix), check=False)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return GradedMap(self.F, self.source, self.target, self.shift,
                         self.F.smul(c, self.matrix), check=False)

    def __eq__(self, other):
        return (isinstance(other, GradedMap) and self.source == other.source
                and self.target == other.target
                and self.F.equal(self.matrix, other.matrix))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def is_zero(self):
        return self.F.is_zero(self.matrix)

    def columns(self):
        return [self.matrix[:, j] for j in range(self.source.dim)]

    def rank(self):
        return rank(self.F, self.matrix)

    def __repr__(self):
        return "GradedMap(%d -> %d, shift %d)" % (self.source.dim, self.target.dim, self.shift)


def kernel_basis(f):
    """Degreewise RREF basis of Ker f, returned as the inclusion map
    Ker f -> source (its columns are the basis vectors)."""
    F = f.F
    rows = []
    degs = []
    for n in f.source.support:
        src = f.source.indices(n)
        tgt = f.target.indices(n + f.shift)
        if len(tgt):
            K = nullspace(F, f.matrix[np.ix_(tgt, src)])
        else:
            K = F.eye(len(src))
        for k in K:
            v = F.zeros(f.source.dim)
            v[src] = k
            rows.append(v)
            degs.append(n)
    ker = GradedSpace(degs, ["k%d" % i for i in range(len(degs))])
    M = F.zeros((f.source.dim, len(rows)))
    for j, v in enumerate(rows):
        M[:, j] = v
    return GradedMap(F, ker, f.source, 0, M, check=False)


def quotient_space(F, V, S):
    """Quotient of V by the span of the rows of S (each homogeneous).

    Returns (Q, projection, section).  The quotient basis is the set of
    non-pivot coordinates of RREF(S), so the section is a coordinate
    inclusion and projection o section = id.
    """
    S = F.array(S)
    if S.ndim == 1:
        S = S[None, :]
    S = S.reshape(-1, V.dim)
    for row in S:
        if V.homogeneous(row, F) is None:
            raise ShapeMismatch("relation vector is not homogeneous")
    if S.shape[0]:
        R, piv = rref(F, S)
        if len(piv) < S.shape[0]:
            raise DependentBasis("subspace vectors are linearly dependent")
    else:
        R, piv = S, []
    return _quotient_from_rref(F, V, R, piv)


def _quotient_from_rref(F, V, R, piv):
    pset = set(piv)
    keep = [c for c in range(V.dim) if c not in pset]
    Q = GradedSpace([V.degrees[c] for c in keep], [V.labels[c] for c in keep])
    P = F.zeros((len(keep), V.dim))
    for i, c in enumerate(keep):
        P[i, c] = F.one
    if len(piv):
        # x -> x[keep] - x[piv] R[:, keep]
        for j, pc in enumerate(piv):
            P[:, pc] = F.neg(R[j, keep])
    Sec = F.zeros((V.dim, len(keep)))
    for i, c in enumerate(keep):
        Sec[c, i] = F.one
    return (Q, GradedMap(F, V, Q, 0, P, check=False), GradedMap(F, Q, V, 0, Sec, check=False))


def quotient_by_span(F, V, S):
    """Like quotient_space but S may be dependent (it is reduced first)."""
    S = F.array(S).reshape(-1, V.dim)
    if S.shape[0]:
        R, piv = rref(F, S)
    else:
        R, piv = S, []
    return _quotient_from_rref(F, V, R, piv)


# ---------------------------------------------------------------------------
# sparse tensors

class SparseTensor(object):
    """Coefficients on index tuples; zero coefficients are never stored."""

    def __init__(self, F, shape, data=None):
        self.F = F
        self.shape = tuple(int(n) for n in shape)
        self.data = {}
        for idx, c in (data or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != len(self.shape):
                raise ShapeMismatch("index %s has wrong arity" % (idx,))
            for i, n in zip(idx, self.shape):
                if not 0 <= i < n:
                    raise IndexError("index %s out of range for %s" % (idx, self.shape))
            c = F.scalar(c)
            if c != 0:
                self.data[idx] = c

    @property
    def arity(self):
        return len(self.shape)

    @classmethod
    def from_dense(cls, F, A):
        A = F.array(A)
        return cls(F, A.shape, dict(F.nonzero_entries(A)))

    def to_dense(self):
        A = self.F.zeros(self.shape)
        for idx, c in self.data.items():
            A[idx] = c
        return A

    def __len__(self):
        return len(self.data)

    def items(self):
        return sorted(self.data.items())

    def __eq__(self, other):
        return (isinstance(other, SparseTensor) and self.shape == other.shape
                and self.data == other.data)

    __hash__ = None

    def __repr__(self):
        return "SparseTensor(%s, %d terms)" % (self.shape, len(self.data))


def tensor_power_mul(F, mul, k):
    """Structure constants of the k-fold tensor power of an algebra
    (mul[i, j, l] = coefficient of e_l in e_i e_j)."""
    n = mul.shape[0]
    out = F.array(mul)
    for _ in range(k - 1):
        m = out.shape[0]
        out = F.einsum("abc,ijk->aibjck", out, mul).reshape(m * n, m * n, m * n)
    return out


def invert_in_algebra(F, x, mul, unit):
    """Two-sided inverse of x in the algebra with structure constants mul.

    x, unit: dense coefficient vectors (or SparseTensors, which are
    flattened).  Raises NotInvertible when no inverse exists.
    """
    shape = None
    if isinstance(x, SparseTensor):
        shape = x.shape
        x = x.to_dense().reshape(-1)
    if isinstance(unit, SparseTensor):
        unit = unit.to_dense().reshape(-1)
    x = F.array(x).reshape(-1)
    unit = F.array(unit).reshape(-1)
    mul = F.array(mul)
    Lx = F.einsum("i,ijk->kj", x, mul)
    y = solve(F, Lx, unit)
    if y is None:
        raise NotInvertible("element is not invertible")
    if not F.equal(F.einsum("i,j,ijk->k", y, x, mul), unit):
        raise NotInvertible("only a one-sided inverse exists")
    if shape is not None:
        return SparseTensor.from_dense(F, y.reshape(shape))
    return y
