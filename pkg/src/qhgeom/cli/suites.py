"""
Named check suites.  Each suite takes a Workspace and options and returns a
Section: an ordered list of checks (name, passed, witness) plus facts
(dimensions and other computed values).
"""

import numpy as np

from ..exactcore import ExactError
from ..quasihopf import validate_quasi_hopf
from ..hmod import (check_currying, check_internal_identities, morphism_basis, curry,
                    uncurry, HMorphism, tensor_obj)
from ..algmod import check_algebra, check_bimodule, hom_A
from .. import diffgeo as dg
from .. import twistfun as tw


class InputError(Exception):
    """The document lacks something a command needs."""


SUITES = {}


def suite(name, description):
    def deco(fn):
        SUITES[name] = (description, fn)
        fn.suite_name = name
        return fn
    return deco


class Section(object):
    def __init__(self, suite):
        self.suite = suite
        self.description = SUITES[suite][0]
        self.checks = []
        self.facts = {}
        self.skipped = None

    def check(self, name, ok, witness=None):
        self.checks.append((name, bool(ok), None if ok else witness))

    def report(self, rep, prefix=""):
        for name, ok, w in rep.entries:
            self.check(prefix + name, ok, w)

    def attempt(self, name, fn):
        """Run fn; a library error becomes a failed check carrying its message."""
        try:
            out = fn()
        except ExactError as e:
            self.check(name, False, "%s: %s" % (type(e).__name__, e))
            return None
        return out

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def as_json(self):
        out = {"suite": self.suite, "description": self.description,
               "passed": self.passed,
               "checks": [{"name": n, "passed": ok, "witness": jsonable(w)}
                          for n, ok, w in self.checks],
               "facts": jsonable(self.facts)}
        if self.skipped:
            out["skipped"] = self.skipped
        return out


def jsonable(x):
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    return str(x)


def _need(ws, what):
    if what == "algebra" and ws.A is None:
        raise InputError("the document declares no algebra")
    if what == "bimodule" and ws.V is None:
        raise InputError("the document declares no bimodule over its algebra")
    if what == "calculus" and ws.calc is None:
        raise InputError("the document declares no calculus")
    if what == "twist" and not ws.twisted:
        raise InputError("the document declares no twist")
    if what == "probes" and not ws.probes:
        raise InputError("the document declares no probe modules")


def _dims(d):
    return {int(k): int(v) for k, v in d.items()}


# ---------------------------------------------------------------------------
# suites

@suite("quasi-hopf-axioms",
       "quasi-Hopf axioms (counit, quasi-coassociativity, 3-cocycle, antipode, "
       "quasitriangularity) of H and, for twisted documents, of H_F")
def suite_axioms(ws, opts):
    s = Section("quasi-hopf-axioms")
    s.report(validate_quasi_hopf(ws.H), "H: ")
    if ws.twisted:
        s.report(validate_quasi_hopf(ws.HF), "H_F: ")
    H = ws.target_H
    F = H.F
    w = tuple(int(i) for i in np.argwhere(F.sub(H.phi, H.one(3)) != 0)[0]) \
        if not H.is_one(H.phi) else None
    s.facts["associator_trivial"] = w is None
    s.facts["associator_witness"] = w
    s.facts["triangular"] = F.equal(H.tmul(H.flip(H.R), H.R), H.one(2))
    if H.triangular:
        s.check("declared triangular and R21 R = 1", s.facts["triangular"])
    return s


@suite("algebra-and-bimodule",
       "algebra axioms (weak associativity, unit, braided commutativity), symmetric "
       "bimodule axioms and the differential calculus")
def suite_objects(ws, opts):
    _need(ws, "algebra")
    s = Section("algebra-and-bimodule")
    A, V = ws.target_A, ws.target_V
    s.report(check_algebra(A), "algebra: ")
    if V is not None:
        s.report(check_bimodule(V), "bimodule: ")
    if ws.calc is not None:
        calc = s.attempt("calculus is a nilpotent invariant degree-1 derivation",
                         lambda: dg.check_calculus(A, ws.target_calc.D))
        if calc is not None:
            s.check("calculus is a nilpotent invariant degree-1 derivation", True)
    s.facts["algebra_dims"] = _dims(A.space.dims)
    w = A.associativity_witness()
    s.facts["strictly_associative"] = w is None
    s.facts["associativity_witness"] = w
    return s


def _probe_triples(P):
    k = len(P)
    return [(P[i % k], P[(i + 1) % k], P[(i + 2) % k]) for i in range(min(k, 3))]


@suite("currying",
       "curry and uncurry are mutually inverse on spanning sets of morphisms, and "
       "uncurry(g) = ev o (g (x) id)")
def suite_currying(ws, opts):
    _need(ws, "probes")
    s = Section("currying")
    P = ws.target_probes
    triples = _probe_triples(P)
    if len(P) >= 2:
        triples.append((P[0], P[1], tensor_obj(P[0], P[1])))
    A = ws.target_A
    if A is not None and A.dim <= 9:
        triples.append((A.module, A.module, A.module))
    sizes = []
    rng = np.random.default_rng(opts.get("seed", 0))
    for V, W, X in triples:
        rep, nf, ng = check_currying(V, W, X)
        s.report(rep, "(%s, %s, %s): " % (V.name, W.name, X.name))
        sizes.append([V.name, W.name, X.name, nf, ng])
        F = V.F
        fs = morphism_basis(tensor_obj(V, W), X)
        if fs:
            c = [F.scalar(int(x)) for x in rng.integers(-3, 4, size=len(fs))]
            f = fs[0] * 0
            for ci, fi in zip(c, fs):
                f = F.add(f, F.smul(ci, fi))
            g = curry(HMorphism(tensor_obj(V, W), X, f), V, W)
            s.check("(%s, %s, %s): random combination round trip" % (V.name, W.name, X.name),
                    F.equal(uncurry(g, W).matrix, f))
    s.facts["spanning_set_sizes"] = sizes
    s.facts["seed"] = opts.get("seed", 0)
    return s


@suite("internal-hom-identities",
       "ev of a composite, weak associativity of composition, the four internal "
       "tensor product identities and the three associator conjugation identities, "
       "over all basis elements")
def suite_internal_hom(ws, opts):
    _need(ws, "probes")
    s = Section("internal-hom-identities")
    P = ws.target_probes
    mods = [P[i % len(P)] for i in range(5)]
    s.report(check_internal_identities(*mods))
    s.facts["modules"] = [M.name for M in mods]
    return s


@suite("bracket-identities",
       "braided antisymmetry and braided Jacobi identity of the internal commutator "
       "(triangular H), braided derivation property of composition")
def suite_bracket(ws, opts):
    _need(ws, "probes")
    s = Section("bracket-identities")
    for M in ws.target_probes[:2]:
        s.report(dg.check_bracket_properties(M), "end(%s): " % M.name)
    return s


@suite("derivations",
       "der(A) as the kernel of the curried derivation condition; both kernel routes, "
       "closure under the commutator, and the classical graded Leibniz rule when H "
       "is trivial")
def suite_derivations(ws, opts):
    _need(ws, "algebra")
    s = Section("derivations")
    A = ws.target_A
    der = dg.derivations(A)
    s.facts["dims"] = _dims(der.dims)
    s.facts["total"] = der.dim
    other = dg.derivations(A, route="direct")
    s.check("curried and direct kernels agree", der.equals(other), (der.dims, other.dims))
    bad = next((i for i, L in enumerate(der.matrices() if der.dim else [])
                if dg.derivation_condition(A, L) is not None), None)
    s.check("every basis element satisfies the derivation condition", bad is None, bad)
    if A.H.triangular:
        w = dg.derivation_closure(A, der)
        s.check("closed under the commutator", w is None, w)
    if A.H.is_trivial():
        rows = dg.leibniz_derivations(A)
        s.check("agrees with the graded Leibniz solver",
                rows.shape[0] == der.dim and der.contains(rows), rows.shape[0])
    return s


@suite("diff-filtration",
       "differential operators diff^n(V): diff^0 = end_A(V), the increasing "
       "filtration, agreement with the literal multi-commutator kernel, and "
       "composition diff^n . diff^m in diff^{n+m}")
def suite_diff(ws, opts):
    _need(ws, "bimodule")
    s = Section("diff-filtration")
    V = ws.target_V
    order = opts.get("order")
    try:
        filt = dg.diff_filtration(V, order)
    except dg.MembershipViolated as e:
        s.check("filtration is increasing", False, str(e))
        return s
    s.check("filtration is increasing", all(filt[n].subspace_of(filt[n + 1])
                                            for n in range(filt.order)))
    s.facts["dims"] = filt.dims()
    s.facts["stabilized"] = filt.stable
    endA = _end_A(ws)
    s.check("diff^0 = end_A(V)", filt[0].dim == endA.dim and endA.sub.equals(filt[0]))
    lit_max = 1 if V.A.dim <= 6 else 0
    for n in range(min(lit_max, filt.order) + 1):
        lit = dg.diff_n(V, n, route="literal")
        s.check("diff^%d agrees with the literal multi-commutator kernel" % n,
                lit.equals(filt[n]), (lit.dim, filt[n].dim))
    w = dg.composition_defect(filt)
    s.check("diff^n . diff^m lies in diff^{n+m}", w is None, w)
    calc = ws.target_calc
    if calc is not None and V.A is calc.A:
        s.facts["order_of_d"] = dg.order_of(filt, calc.D)
    return s


def _con(ws):
    _need(ws, "bimodule")
    _need(ws, "calculus")
    V, calc = ws.target_V, ws.target_calc
    key = ("con", id(V))
    if key not in ws.__dict__:
        ws.__dict__[key] = dg.connections(calc, V)
    return ws.__dict__[key]


@suite("connections",
       "con(V) as a kernel in end(V) (+) I[1]: the connection condition, the ordinary "
       "slice and containment in diff^1(V) x I[1]")
def suite_connections(ws, opts):
    s = Section("connections")
    con = _con(ws)
    V, calc = ws.target_V, ws.target_calc
    s.facts["dims"] = _dims(con.dims)
    s.facts["ordinary_affine_dim"] = con.affine_dim()
    bad = next((i for i, c in enumerate(con.basis())
                if dg.connection_condition(calc, c) is not None), None)
    s.check("every basis element satisfies the connection condition", bad is None, bad)
    d1 = dg.diff_n(V, 1)
    s.check("con(V) lies in diff^1(V) x I[1]",
            all(d1.contains(c.L.reshape(1, -1)) for c in con.basis()))
    pt, lin = con.ordinary()
    s.check("an ordinary connection exists", pt is not None)
    return s


@suite("sum-connection-descent",
       "L (x). 1 + 1 (x). L' preserves the relations of V (x)_A W for every basis "
       "element of the fibred product con(V) x con(W), and sums are associative "
       "through the associator")
def suite_sum(ws, opts):
    s = Section("sum-connection-descent")
    con = _con(ws)
    V = ws.target_V
    from ..algmod import RelativeTensor
    Q = RelativeTensor(V, V)
    fb = dg.fibred_basis(con, con)
    s.facts["fibred_basis_size"] = len(fb)
    bad = None
    for i, (a, b) in enumerate(fb):
        try:
            dg.sum_connection(a, b, Q)
        except dg.RelationNotPreserved:
            bad = i
            break
    s.check("sum connections descend to V (x)_A V", bad is None, bad)
    pt, _ = con.ordinary()
    if pt is not None and V.dim <= 9:
        s.check("sum of connections is associative", dg.sum_connection_associativity(pt, pt, pt))
    return s


@suite("hom-connection-descent",
       "the adjoint connection on hom(V, W) preserves hom_A(V, W) for every basis "
       "element of the fibred product, and the dual connection exists")
def suite_hom(ws, opts):
    s = Section("hom-connection-descent")
    con = _con(ws)
    calc = ws.target_calc
    homA = _end_A(ws)
    fb = dg.fibred_basis(con, con)
    s.facts["fibred_basis_size"] = len(fb)
    s.facts["hom_A_dim"] = homA.dim
    bad = None
    for i, (a, b) in enumerate(fb):
        try:
            dg.adjoint_connection(a, b, homA)
        except dg.SubspaceNotPreserved:
            bad = i
            break
    s.check("adjoint connections preserve hom_A(V, V)", bad is None, bad)
    pt, _ = con.ordinary()
    if pt is not None:
        try:
            dg.dual_connection(calc, pt)
            s.check("dual connection preserves hom_A(V, A)", True)
        except dg.SubspaceNotPreserved as e:
            s.check("dual connection preserves hom_A(V, A)", False, str(e))
    return s


def _end_A(ws):
    V = ws.target_V
    key = ("endA", id(V))
    if key not in ws.__dict__:
        ws.__dict__[key] = hom_A(V, V)
    return ws.__dict__[key]


def _ordinary_family(con):
    """The chosen ordinary connection and its translates by each basis
    direction of the ordinary slice."""
    pt, lin = con.ordinary()
    if pt is None:
        return []
    F = con.F
    out = [pt]
    for c in lin:
        out.append(dg.Connection(pt.V, F.add(pt.L, c.L), 1))
    return out


@suite("curvature",
       "Curv(nabla) = [[nabla, nabla]] lies in end_A(V) and is additive on sums of "
       "connections")
def suite_curvature(ws, opts):
    s = Section("curvature")
    con = _con(ws)
    V, calc = ws.target_V, ws.target_calc
    if not V.H.triangular:
        s.skipped = "H is not triangular"
        return s
    endA = _end_A(ws)
    fam = _ordinary_family(con)
    zero, ranks = 0, []
    for i, c in enumerate(fam):
        K = s.attempt("curvature %d lies in end_A(V)" % i,
                      lambda c=c: dg.curvature(calc, c, endA=endA))
        if K is None:
            continue
        zero += V.F.is_zero(K)
        ranks.append(int(np.count_nonzero(K != 0)))
    s.check("curvatures lie in end_A(V)", all(ok for _, ok, _ in s.checks))
    s.facts["connections_tested"] = len(fam)
    s.facts["flat_connections"] = zero
    s.facts["curvature_support_sizes"] = ranks
    if fam and V.dim > 12 and V.H.n > 1:
        s.facts["additivity"] = "not checked: V (x) V has dimension %d" % (V.dim * V.dim)
    elif fam:
        from ..algmod import RelativeTensor
        Q = RelativeTensor(V, V)
        bad = next((i for i, c in enumerate(fam[:3])
                    if not dg.curvature_additivity(calc, c, c, Q)), None)
        s.check("curvature is additive on V (x) V and V (x)_A V", bad is None, bad)
    return s


@suite("bianchi",
       "the Bianchi tensor ev(ad(nabla, nabla) (x) Curv(nabla)); it vanishes when H "
       "is trivial")
def suite_bianchi(ws, opts):
    s = Section("bianchi")
    con = _con(ws)
    V, calc = ws.target_V, ws.target_calc
    if not V.H.triangular:
        s.skipped = "H is not triangular"
        return s
    vals = []
    for c in _ordinary_family(con):
        B = dg.bianchi(calc, c, endA=_end_A(ws))
        vals.append(bool(V.F.is_zero(B)))
    s.facts["bianchi_zero"] = vals
    if V.H.is_trivial():
        s.check("Bianchi tensor vanishes for every tested ordinary connection", all(vals),
                vals.index(False) if False in vals else None)
    return s


@suite("trace",
       "pointwise trace of curvatures in the declared frame")
def suite_trace(ws, opts):
    s = Section("trace")
    con = _con(ws)
    V, calc = ws.target_V, ws.target_calc
    if getattr(V, "frame", None) is None:
        raise InputError("the bimodule has no declared frame")
    if not V.H.triangular:
        s.skipped = "H is not triangular"
        return s
    A = V.A
    out = []
    for c in _ordinary_family(con):
        t = dg.trace(V, dg.curvature(calc, c, endA=_end_A(ws)))
        out.append({A.labels[k]: A.F.format(x) for k, x in enumerate(t) if x != 0})
    s.facts["traces"] = out
    s.check("traces computed", True)
    return s


@suite("twisting",
       "kernels computed from scratch over H_F are the gamma-images of the "
       "untwisted ones: derivations, every diff^n up to stabilization, connections; "
       "d_F is nilpotent")
def suite_twisting(ws, opts):
    _need(ws, "twist")
    _need(ws, "algebra")
    s = Section("twisting")
    T, HF = ws.T, ws.HF
    A, AF = ws.A, ws.AF
    s.report(tw.check_gamma(A.module, A.module, T, HF), "gamma: ")
    s.report(tw.verify_twisted_derivations(A, T, AF), "derivations: ")
    if ws.V is not None:
        rep = tw.verify_twisted_diff(ws.V, T, ws.VF, opts.get("order"))
        s.report(rep, "diff: ")
        s.facts["diff_dims"] = rep.dims
    if ws.calc is not None:
        calcF = s.attempt("twisted calculus is valid", lambda: dg.check_calculus(AF, ws.calcF.D))
        if calcF is not None:
            M = AF.module
            from ..hmod import compose
            s.check("d_F is nilpotent", AF.F.is_zero(compose(M, M, M, calcF.D, calcF.D)))
            s.report(tw.verify_twisted_connections(ws.calc, ws.V, T, calcF, ws.VF),
                     "connections: ")
    return s


def suite_requirements(ws):
    """Suites that make sense for this document (used by report --all)."""
    out = ["quasi-hopf-axioms"]
    if ws.A is not None:
        out += ["algebra-and-bimodule", "derivations"]
    if ws.probes:
        out += ["currying", "internal-hom-identities", "bracket-identities"]
    if ws.V is not None:
        out.append("diff-filtration")
    if ws.V is not None and ws.calc is not None:
        out += ["connections", "sum-connection-descent", "hom-connection-descent",
                "curvature", "bianchi"]
        if getattr(ws.V, "frame", None) is not None:
            out.append("trace")
    if ws.twisted and ws.A is not None:
        out.append("twisting")
    return [n for n in SUITES if n in out]
