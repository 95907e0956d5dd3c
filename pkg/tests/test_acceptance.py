"""One test per acceptance criterion.  Each prints a single PASS/FAIL line."""
import io
import itertools
import json

import numpy as np
import pytest

from qhgeom.exactcore import GF, QQ
from qhgeom.quasihopf import QuasiHopf, build_group_hopf, trivial_hopf, validate_quasi_hopf
from qhgeom.hmod import check_internal_identities, module_from_weights
from qhgeom.algmod import RelativeTensor, exterior_algebra, hom_A
from qhgeom import diffgeo as dg
from qhgeom.cli.examples import list_examples
from qhgeom.cli.main import main
from qhgeom.cli.suites import SUITES
from qhgeom.cli.workspace import build_document

from conftest import WEIGHTS


@pytest.fixture
def verdict(capsys):
    def say(n, ok, detail):
        with capsys.disabled():
            print("\n%s criterion %d: %s" % ("PASS" if ok else "FAIL", n, detail))
        assert ok, detail
    return say


def _suite(ws, name, order=None):
    return SUITES[name][1](ws, {"order": order, "seed": 0})


def _failed(section):
    return [n for n, ok, _ in section.checks if not ok]


def test_axiom_suite(workspace, verdict):
    bad = []
    for name in ("trivial-hopf-grassmann-1", "group-z2cubed", "abelian-twist-fp",
                 "octonion-twist"):
        ws = workspace(name)
        for label, H in (("H", ws.H), ("H_F", ws.HF)):
            if H is not None and not validate_quasi_hopf(H).ok:
                bad.append((name, label))
    HF = workspace("octonion-twist").HF
    F = HF.F
    nonassoc = not HF.is_one(HF.phi)
    tri = F.equal(HF.tmul(HF.flip(HF.R), HF.R), HF.one(2))
    ok = not bad and nonassoc and tri
    verdict(1, ok, "axioms hold on 4 examples (failures %s); octonion phi_F != 1: %s, "
            "R21 R = 1: %s" % (bad, nonassoc, tri))


def test_currying_round_trips(workspace, verdict):
    bad, total = [], 0
    for name in list_examples():
        s = _suite(workspace(name), "currying")
        total += len(s.checks)
        bad += [(name, n) for n in _failed(s)]
        assert all(x[3] > 0 for x in s.facts["spanning_set_sizes"][-1:])
    verdict(2, not bad, "%d currying checks (both round trips and uncurry = ev o (g (x) id)) "
            "on %d examples, failures %s" % (total, len(list_examples()), bad))


def test_internal_hom_identities(workspace, octonion_probes, verdict):
    bad, counts = [], []
    for name in ("octonion-twist", "octonion-exterior"):
        s = _suite(workspace(name), "internal-hom-identities")
        counts.append(len(s.checks))
        bad += [(name, n) for n in _failed(s)]
    rep = check_internal_identities(*octonion_probes)
    counts.append(len(rep))
    ok = not bad and rep.ok and all(c == 9 for c in counts)
    verdict(3, ok, "2 + 4 + 3 identities on the octonion twist, %s entries per run, "
            "failures %s" % (counts, bad + [f[0] for f in rep.failures()]))


def test_bracket_identities(workspace, octonion, braided_z4, verdict):
    bad = []
    for name in list_examples():
        s = _suite(workspace(name), "bracket-identities")
        bad += [(name, n) for n in _failed(s)]
        if workspace(name).target_H.triangular:
            assert any("Jacobi" in n for n, _, _ in s.checks)
    # non-triangular: the derivation property alone
    V = module_from_weights(braided_z4, [(1,), (3,)], [0, 1])
    z4 = dg.check_bracket_properties(V)
    if not z4.ok:
        bad.append(("braided-z4", z4.failures()))
    # negative control: the octonion associator with the untwisted R-matrix
    H, T, HF = octonion
    F = HF.F
    corrupt = QuasiHopf(F, HF.labels, HF.mul, HF.unit, HF.cop, HF.counit, HF.anti, HF.alpha,
                        HF.beta, HF.phi, H.R, phi_inv=HF.phi_inv, triangular=True, meta=HF.meta)
    W = module_from_weights(corrupt, WEIGHTS[:4], [0, 0, 0, 0])
    witness = dg.first_nonzero(F, dg.jacobiator_tensor(W))
    ok = not bad and witness is not None
    verdict(4, ok, "antisymmetry/Jacobi/derivation on all examples and a non-triangular "
            "algebra, failures %s; corrupted-R Jacobi witness %s" % (bad, witness))


def test_classical_derivations(verdict):
    totals, agree = [], []
    for n in (1, 2, 3):
        A = exterior_algebra(trivial_hopf(QQ), n)
        der = dg.derivations(A)
        rows = dg.leibniz_derivations(A)
        totals.append(der.dim)
        agree.append(rows.shape[0] == der.dim and der.contains(rows))
    ok = totals == [n * 2 ** n for n in (1, 2, 3)] and all(agree)
    verdict(5, ok, "dim der(Lambda_n) = %s (expected [2, 8, 24]), Leibniz solver agrees: %s"
            % (totals, agree))


def test_filtration(workspace, derham1, verdict):
    bad = []
    for name in ("derham-f3-1var", "trivial-hopf-grassmann-2", "octonion-exterior",
                 "abelian-twist-plane", "octonion-twist"):
        s = _suite(workspace(name), "diff-filtration")
        if not s.facts["stabilized"]:
            bad.append((name, "not stabilized"))
        bad += [(name, n) for n in _failed(s)]
    V = derham1.bimodule
    filt = dg.diff_filtration(V)
    D = derham1.calculus.reshape(1, -1)
    d_order = (filt[0].contains(D), filt[1].contains(D))
    ok = not bad and filt[0].dim == 6 and d_order == (False, True)
    verdict(6, ok, "diff^0 = end_A, increasing, composition closed on 5 examples to "
            "stabilization (failures %s); derham-f3-1var diff^0 = %d, D in diff^0/diff^1 = %s"
            % (bad, filt[0].dim, d_order))


def test_connections(derham1, derham2, verdict):
    dims, inside = [], []
    for A in (derham1, derham2):
        calc = dg.check_calculus(A)
        con = dg.connections(calc, A.bimodule)
        dims.append(con.affine_dim())
        d1 = dg.diff_n(A.bimodule, 1)
        inside.append(all(d1.contains(c.L.reshape(1, -1)) for c in con.basis()))
    ok = dims == [3, 18] and all(inside)
    verdict(7, ok, "ordinary affine dimensions %s (expected [3, 18]), con in diff^1 x I[1]: %s"
            % (dims, inside))


def test_descent(workspace, verdict):
    bad, sizes = [], {}
    for name in list_examples():
        ws = workspace(name)
        for suite in ("sum-connection-descent", "hom-connection-descent"):
            s = _suite(ws, suite)
            sizes[name] = s.facts["fibred_basis_size"]
            bad += [(name, n) for n in _failed(s)]
    ok = not bad and all(v > 0 for v in sizes.values())
    verdict(8, ok, "sum and adjoint connections descend for every fibred basis element on "
            "%d examples (including nonassociative ones), failures %s" % (len(sizes), bad))


def _ordinary_connections(con, rng, extra):
    """The chosen point, its translates along each basis direction and
    `extra` random points of the ordinary slice (all of it when small)."""
    F = con.F
    pt, lin = con.ordinary()
    p = F.char
    if p and p ** len(lin) <= 81:
        for cs in itertools.product(range(p), repeat=len(lin)):
            L = pt.L
            for c, l in zip(cs, lin):
                L = F.add(L, F.smul(c, l.L))
            yield dg.Connection(pt.V, L, 1)
        return
    yield pt
    for l in lin:
        yield dg.Connection(pt.V, F.add(pt.L, l.L), 1)
    for _ in range(extra):
        L = pt.L
        for c, l in zip(rng.integers(0, p, size=len(lin)), lin):
            L = F.add(L, F.smul(int(c), l.L))
        yield dg.Connection(pt.V, L, 1)


def test_curvature(derham1, derham2, verdict):
    rng = np.random.default_rng(0)
    A = derham2
    F = A.F
    V = A.bimodule
    calc = dg.check_calculus(A)
    endA = hom_A(V, V)
    x_dy = A.mult(A.element(x=1), A.element(dy=1))
    K = dg.curvature(calc, dg.Connection(V, F.add(A.calculus, V.lhat(x_dy)), 1), endA=endA)
    dxdy = A.mult(A.element(dx=1), A.element(dy=1))
    formula = F.equal(K, F.smul(2, V.lhat(dxdy))) and not F.is_zero(K)
    flat, bianchi, additive, counts = True, True, True, []
    for B in (derham1, derham2):
        W = B.bimodule
        c = dg.check_calculus(B)
        con = dg.connections(c, W)
        eA = hom_A(W, W)
        Q = RelativeTensor(W, W)
        n = 0
        for conn in _ordinary_connections(con, rng, 10):
            n += 1
            curv = dg.curvature(c, conn, endA=eA)
            if B is derham1:
                flat = flat and F.is_zero(curv)
            bianchi = bianchi and F.is_zero(dg.bianchi(c, conn, endA=eA))
            if n <= 3:
                additive = additive and dg.curvature_additivity(c, conn, conn, Q)
        counts.append(n)
    ok = formula and flat and bianchi and additive
    verdict(9, ok, "Curv(D + lhat(x dy)) = 2 lhat(dx dy): %s; %d ordinary connections on "
            "derham-f3-1var all flat: %s; Bianchi zero on %s connections: %s; additivity: %s"
            % (formula, counts[0], flat, counts, bianchi, additive))


def test_twisting_isomorphisms(workspace, verdict):
    bad, stab = [], {}
    runs = [("octonion-exterior", None), ("abelian-twist-plane", None), ("octonion-twist", None),
            ("abelian-twist-fp", 1)]
    for name, order in runs:
        s = _suite(workspace(name), "twisting", order)
        bad += [(name, n) for n in _failed(s)]
        stab[name] = s.facts.get("diff_dims")
        assert any(n == "d_F is nilpotent" for n, _, _ in s.checks)
        assert any(n.startswith("connections: ") for n, _, _ in s.checks)
    ok = not bad
    verdict(10, ok, "derivations, diff^n and connections match through gamma on 4 twisted "
            "examples (filtrations %s), d_F nilpotent; failures %s" % (stab, bad))


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue()


def _failing_document(path):
    F = GF(5)
    H = build_group_hopf((4,), F, basis="characters")
    doc = json.loads(build_document("z4", H).to_json())
    els = H.meta["group"]["elements"]
    doc["hopf"]["R"] = [[i, j, pow(2, p[0] * q[0], 5)]
                        for i, p in enumerate(els) for j, q in enumerate(els)]
    doc["hopf"]["flags"] = {"triangular": True}
    path.write_text(json.dumps(doc))
    return str(path)


def test_cli_determinism(tmp_path, verdict):
    differ, codes = [], {}
    for name in list_examples():
        argv = ["report", "--all", "--order", "1", "--example", name, "--json", "-"]
        c1, first = _run(argv)
        c2, second = _run(argv)
        codes[name] = (c1, c2)
        if first != second or not first:
            differ.append(name)
    passing = all(c == (0, 0) for c in codes.values())
    fail_code = _run(["check", "--suite", "quasi-hopf-axioms",
                      "--doc", _failing_document(tmp_path / "bad.json")])[0]
    input_code = _run(["validate", "--example", "no-such-example"])[0]
    ok = not differ and passing and fail_code == 1 and input_code == 2
    verdict(11, ok, "byte-identical JSON reports on %d examples (differing: %s); exit codes "
            "pass=%s fail=%d input-error=%d" % (len(codes), differ, sorted(set(codes.values())),
                                                fail_code, input_code))
