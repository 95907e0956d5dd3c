"""
Built-in examples, each delivered as an input document.
"""

import re

from ..exactcore import QQ, GF
from ..quasihopf import build_group_hopf, trivial_hopf
from ..hmod import module_from_weights, trivial_module
from ..algmod import (derivation_from_generators, exterior_algebra, graded_group_algebra,
                      truncated_derham)
from ..twistfun import (OCTONION_WEIGHTS, build_abelian_twist, build_octonion_twist,
                        _truncated_poly)
from .workspace import build_document


class UnknownExample(KeyError):
    pass


def _trivial_probes(H):
    return [trivial_module(H, [0, 1], ["p0", "p1"], "P"),
            trivial_module(H, [1, 1], ["q0", "q1"], "Q"),
            trivial_module(H, [0], ["r0"], "R")]


_Z2CUBED_PROBES = [((1, 0, 0), (0, 1, 0), 0, 1), ((0, 0, 1), (1, 1, 0), 1, 0),
                   ((1, 0, 1), (0, 1, 1), 0, 0), ((1, 1, 1), (1, 0, 0), 1, 1),
                   ((0, 1, 0), (0, 0, 1), 0, 1)]
_Z2SQ_PROBES = [((1, 0), (0, 1), 0, 1), ((1, 1), (1, 0), 1, 0), ((0, 1), (1, 1), 0, 0),
                ((0, 0), (1, 1), 1, 1), ((1, 0), (1, 0), 0, 1)]


def _weight_probes(H, table):
    return [module_from_weights(H, [a, b], [da, db], name="P%d" % (i + 1))
            for i, (a, b, da, db) in enumerate(table)]


def _regular_frame(A):
    V = A.bimodule
    V.frame = [A.unit]
    return V


def grassmann(n):
    H = trivial_hopf(QQ)
    A = exterior_algebra(H, n, name="Lambda%d" % n)
    return build_document("trivial-hopf-grassmann-%d" % n, H, A, _regular_frame(A),
                          A.F.zeros((A.dim, A.dim)), probes=_trivial_probes(H),
                          description="Grassmann algebra on %d odd generators, trivial H" % n)


def derham(nvars):
    H = trivial_hopf(GF(3))
    A = truncated_derham(H, 3, nvars, name="dR%d" % nvars)
    return build_document("derham-f3-%dvar" % nvars, H, A, _regular_frame(A), A.calculus,
                          probes=_trivial_probes(H),
                          description="F_3[x_i]/(x_i^3) with its de Rham differential")


def group_z2cubed():
    H = build_group_hopf((2, 2, 2), QQ, basis="characters")
    A = graded_group_algebra(H, "QZ2^3")
    return build_document("group-z2cubed", H, A, _regular_frame(A), A.F.zeros((A.dim, A.dim)),
                          probes=_weight_probes(H, _Z2CUBED_PROBES),
                          description="Q[Z_2^3] over its own group algebra, trivial associator")


def octonion_twist():
    H, T = build_octonion_twist()
    A = graded_group_algebra(H, "QZ2^3")
    return build_document("octonion-twist", H, A, _regular_frame(A), A.F.zeros((A.dim, A.dim)),
                          twist=T, probes=_weight_probes(H, _Z2CUBED_PROBES),
                          description="Q[Z_2^3] deformed by a non-cocycle twist into the octonions")


def octonion_exterior():
    H, T = build_octonion_twist()
    A = exterior_algebra(H, 4, weights=OCTONION_WEIGHTS, name="Lambda4")
    g = A.generators
    imgs = {j: A.F.zeros(A.dim) for j in g}
    imgs[g[3]] = A.mult(A.basis_vector(g[0]), A.basis_vector(g[1]))
    D = derivation_from_generators(A, imgs, 1)
    return build_document("octonion-exterior", H, A, _regular_frame(A), D, twist=T,
                          probes=_weight_probes(H, _Z2CUBED_PROBES),
                          description="graded Grassmann algebra on four generators with Z_2^3 "
                                      "weights and d t4 = t1 t2, deformed by the octonion twist")


def abelian_plane():
    H, T = build_abelian_twist()
    A = _truncated_poly(H, 3, [(1, 0), (0, 1)])
    return build_document("abelian-twist-plane", H, A, _regular_frame(A), A.calculus, twist=T,
                          probes=_weight_probes(H, _Z2SQ_PROBES),
                          description="F_3[x, y]/(x^3, y^3) deformed into a quantum plane")


def abelian_derham():
    H, T = build_abelian_twist()
    A = truncated_derham(H, 3, 2, weights=[(1, 0), (0, 1)], name="dR2")
    return build_document("abelian-twist-fp", H, A, _regular_frame(A), A.calculus, twist=T,
                          probes=_weight_probes(H, _Z2SQ_PROBES),
                          description="two-variable truncated de Rham calculus over F_3, "
                                      "deformed by a Z_2 x Z_2 bicharacter twist")


_REGISTRY = {
    "trivial-hopf-grassmann-1": lambda: grassmann(1),
    "trivial-hopf-grassmann-2": lambda: grassmann(2),
    "trivial-hopf-grassmann-3": lambda: grassmann(3),
    "derham-f3-1var": lambda: derham(1),
    "derham-f3-2var": lambda: derham(2),
    "group-z2cubed": group_z2cubed,
    "octonion-twist": octonion_twist,
    "abelian-twist-fp": abelian_derham,
    "octonion-exterior": octonion_exterior,
    "abelian-twist-plane": abelian_plane,
}


def list_examples():
    return list(_REGISTRY)


def load_example(name):
    """The document of a built-in example; trivial-hopf-grassmann-N works
    for every N >= 1."""
    m = re.fullmatch(r"trivial-hopf-grassmann-(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return grassmann(int(m.group(1)))
    if name not in _REGISTRY:
        raise UnknownExample(name)
    return _REGISTRY[name]()
