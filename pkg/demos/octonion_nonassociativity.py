"""The octonion cochain on Z_2^3 twists the group algebra into a
nonassociative (but weakly associative) algebra in H_F-mod."""
from qhgeom.quasihopf import twist_hopf, validate_quasi_hopf
from qhgeom.algmod import check_algebra, graded_group_algebra
from qhgeom import twistfun as tf


def main():
    H, T = tf.build_octonion_twist()
    HF = twist_hopf(H, T)
    print("H_F axioms:")
    print(validate_quasi_hopf(HF))
    A = graded_group_algebra(H, "QZ2^3")
    AF = tf.twist_algebra(A, T, HF)
    print("A_F:", check_algebra(AF).ok)
    i, j, k = AF.associativity_witness()
    a, b, c = (AF.basis_vector(n) for n in (i, j, k))
    F = AF.F
    names = "(%s, %s, %s)" % (AF.labels[i], AF.labels[j], AF.labels[k])
    print("(a b) c  for", names, ":", [F.format(x) for x in AF.mult(AF.mult(a, b), c)])
    print("a (b c)  for", names, ":", [F.format(x) for x in AF.mult(a, AF.mult(b, c))])


if __name__ == "__main__":
    main()
