"""Connections and curvature on the truncated de Rham algebra
F_3[x, y]/(x^3, y^3) (x) Lambda(dx, dy)."""
from qhgeom.exactcore import GF
from qhgeom.quasihopf import trivial_hopf
from qhgeom.algmod import hom_A, truncated_derham
from qhgeom import diffgeo as dg


def main():
    A = truncated_derham(trivial_hopf(GF(3)), 3, 2)
    V, F = A.bimodule, A.F
    calc = dg.check_calculus(A)
    filt = dg.diff_filtration(V)
    print("diff^n dimensions:", filt.dims())
    con = dg.connections(calc, V)
    print("ordinary connections form an affine space of dimension", con.affine_dim())
    x_dy = A.mult(A.element(x=1), A.element(dy=1))
    conn = dg.Connection(V, F.add(A.calculus, V.lhat(x_dy)), 1)
    K = dg.curvature(calc, conn, endA=hom_A(V, V))
    dxdy = A.mult(A.element(dx=1), A.element(dy=1))
    print("Curv(D + x dy) == 2 dx dy:", F.equal(K, F.smul(2, V.lhat(dxdy))))
    print("Bianchi tensor vanishes:", F.is_zero(dg.bianchi(calc, conn)))


if __name__ == "__main__":
    main()
