"""
Turning input documents into library objects and back.
"""

from ..exactcore import ExactError
from ..quasihopf import QuasiHopf, TwistData, trivial_hopf, twist_hopf
from ..hmod import HModule
from ..algmod import AlgebraObject, BimoduleObject
from ..diffgeo import DifferentialCalculus
from ..twistfun import twist_algebra, twist_bimodule, _same_module, gamma_sandwich
from .document import RangeError, dumps, parse_spec, sparse_entries


def _dense(doc, path):
    F = doc.field
    shape, data = doc.tensor(path)
    A = F.zeros(shape)
    for idx, c in data.items():
        A[idx] = c
    return A


class Workspace(object):
    """Objects built from a document.

    ``H, A, V, calc`` are the objects the document states; when a twist is
    present ``HF, AF, VF, calcF`` are its images and the ``target_*``
    attributes point at them (checks run on the deformed side)."""

    def __init__(self, doc):
        self.doc = doc
        data = doc.data
        F = self.F = doc.field
        if "hopf" in data:
            h = data["hopf"]
            g = lambda k: _dense(doc, "$.hopf." + k)
            inv = g("associator_inverse") if "associator_inverse" in h else None
            tri = bool(h.get("flags", {}).get("triangular", False))
            self.H = QuasiHopf(F, h["basis"], g("mul"), g("unit"), g("coproduct"), g("counit"),
                               g("antipode"), g("alpha"), g("beta"), g("associator"), g("R"),
                               phi_inv=inv, triangular=tri)
        else:
            self.H = trivial_hopf(F)
        H = self.H
        self.modules = {}
        for i, m in enumerate(data.get("modules", [])):
            self.modules[m["name"]] = HModule(H, m["degrees"], _dense(doc, "$.modules[%d].action" % i),
                                              m.get("labels"), m["name"])
        self.algebras = {}
        for i, a in enumerate(data.get("algebras", [])):
            p = "$.algebras[%d]" % i
            self.algebras[a["name"]] = AlgebraObject(self.modules[a["module"]], _dense(doc, p + ".product"),
                                                     _dense(doc, p + ".unit"), a["name"])
        frames = {}
        for i, fr in enumerate(data.get("frames", [])):
            frames[fr["bimodule"]] = [_dense(doc, "$.frames[%d].vectors[%d]" % (i, j))
                                      for j in range(len(fr["vectors"]))]
        self.bimodules = {}
        for i, b in enumerate(data.get("bimodules", [])):
            p = "$.bimodules[%d]" % i
            A = self.algebras[b["algebra"]]
            if b.get("regular"):
                V = BimoduleObject(A, A.module, A.mu, A.mu, name=b["name"])
            elif "right" in b:
                V = BimoduleObject(A, self.modules[b["module"]], _dense(doc, p + ".left"),
                                   _dense(doc, p + ".right"), name=b["name"])
            else:
                V = BimoduleObject.symmetric_from_left(A, self.modules[b["module"]],
                                                       _dense(doc, p + ".left"), name=b["name"])
            V.frame = frames.get(b["name"])
            self.bimodules[b["name"]] = V
        self.A = next(iter(self.algebras.values()), None)
        self.V = None
        if self.A is not None:
            self.V = next((V for V in self.bimodules.values() if V.A is self.A), None)
        self.calc = None
        if "calculus" in data:
            A = self.algebras[data["calculus"]["algebra"]]
            D = _dense(doc, "$.calculus.D")
            A.calculus = D
            self.calc = DifferentialCalculus(A, D)
        self.probes = [self.modules[n] for n in data.get("probes", [])]
        self.T = self.HF = self.AF = self.VF = self.calcF = None
        if "twist" in data:
            t = data["twist"]
            Fi = _dense(doc, "$.twist.F_inverse") if "F_inverse" in t else None
            try:
                self.T = TwistData(H, _dense(doc, "$.twist.F"), Fi)
            except ExactError as e:
                raise RangeError(str(e), "$.twist.F")
            self.HF = twist_hopf(H, self.T)
            if self.A is not None:
                self.AF = twist_algebra(self.A, self.T, self.HF)
            if self.V is not None:
                self.VF = twist_bimodule(self.V, self.T, self.AF)
                self.VF.frame = self.V.frame
            if self.calc is not None:
                gi = gamma_sandwich(self.A.module, self.A.module, self.T, inverse=True)
                DF = gi(self.calc.D)
                self.AF.calculus = DF
                self.calcF = DifferentialCalculus(self.AF, DF)
            self.probesF = [_same_module(M, self.HF) for M in self.probes]

    @property
    def twisted(self):
        return self.T is not None

    @property
    def target_H(self):
        return self.HF if self.twisted else self.H

    @property
    def target_A(self):
        return self.AF if self.twisted else self.A

    @property
    def target_V(self):
        return self.VF if self.twisted else self.V

    @property
    def target_calc(self):
        return self.calcF if self.twisted else self.calc

    @property
    def target_probes(self):
        return self.probesF if self.twisted else self.probes


# ---------------------------------------------------------------------------
# objects -> document

def _hopf_block(H):
    F = H.F
    out = {"basis": list(H.labels)}
    for key, arr in [("mul", H.mul), ("unit", H.unit), ("coproduct", H.cop),
                     ("counit", H.counit), ("antipode", H.anti), ("alpha", H.alpha),
                     ("beta", H.beta), ("associator", H.phi), ("R", H.R)]:
        out[key] = sparse_entries(F, arr)
    out["flags"] = {"triangular": bool(H.triangular)}
    return out


def _module_block(M):
    return {"name": M.name, "degrees": [int(d) for d in M.degrees],
            "labels": list(M.labels), "action": sparse_entries(M.F, M.rho)}


def build_document(name, H, algebra=None, bimodule=None, calculus=None, twist=None,
                   probes=(), description=None, hopf_block=True):
    """A format-1 document for the given objects (the algebra's module, the
    bimodule's module when distinct, and the probes become module blocks)."""
    F = H.F
    data = {"format": 1, "name": name, "field": repr(F)}
    if description:
        data["description"] = description
    if hopf_block:
        data["hopf"] = _hopf_block(H)
    mods = []
    names = set()

    def add(M):
        if M.name not in names:
            names.add(M.name)
            mods.append(_module_block(M))
    if algebra is not None:
        add(algebra.module)
        data["algebras"] = [{"name": algebra.name, "module": algebra.module.name,
                             "product": sparse_entries(F, algebra.mu),
                             "unit": sparse_entries(F, algebra.unit)}]
    if bimodule is not None:
        if bimodule.module is algebra.module and F.equal(bimodule.lt, algebra.mu) \
                and F.equal(bimodule.rt, algebra.mu):
            data["bimodules"] = [{"name": bimodule.name, "algebra": algebra.name, "regular": True}]
        else:
            add(bimodule.module)
            data["bimodules"] = [{"name": bimodule.name, "algebra": algebra.name,
                                  "module": bimodule.module.name,
                                  "left": sparse_entries(F, bimodule.lt),
                                  "right": sparse_entries(F, bimodule.rt)}]
        if bimodule.frame is not None:
            data["frames"] = [{"bimodule": bimodule.name,
                               "vectors": [sparse_entries(F, v) for v in bimodule.frame]}]
    if calculus is not None:
        data["calculus"] = {"algebra": algebra.name, "D": sparse_entries(F, calculus)}
    if twist is not None:
        data["twist"] = {"F": sparse_entries(F, twist.F), "F_inverse": sparse_entries(F, twist.F_inv)}
    for P in probes:
        add(P)
    if probes:
        data["probes"] = [P.name for P in probes]
    data["modules"] = mods
    return parse_spec(dumps(data))
