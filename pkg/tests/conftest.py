import functools

import pytest

from qhgeom.exactcore import GF
from qhgeom.quasihopf import QuasiHopf, build_group_hopf, trivial_hopf, twist_hopf
from qhgeom.hmod import module_from_weights
from qhgeom.algmod import truncated_derham
from qhgeom import twistfun as tf
from qhgeom.cli.examples import load_example
from qhgeom.cli.workspace import Workspace


WEIGHTS = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)]


def weight_module(H, i, j, di, dj):
    return module_from_weights(H, [WEIGHTS[i], WEIGHTS[j]], [di, dj])


@pytest.fixture(scope="session")
def octonion():
    """(H, T, H_F) for the octonion cochain on Z_2^3."""
    H, T = tf.build_octonion_twist()
    return H, T, twist_hopf(H, T)


@pytest.fixture(scope="session")
def octonion_probes(octonion):
    HF = octonion[2]
    return [weight_module(HF, 1, 2, 0, 1), weight_module(HF, 3, 4, 1, 0),
            weight_module(HF, 5, 6, 0, 0), weight_module(HF, 7, 1, 1, 1),
            weight_module(HF, 2, 3, 0, 1)]


@pytest.fixture(scope="session")
def braided_z4():
    """A quasitriangular Hopf algebra that is not triangular: GF(5)[Z_4]
    with R = sum 2^{pq} e_p (x) e_q (2 is a primitive 4th root of unity)."""
    F = GF(5)
    H0 = build_group_hopf((4,), F, basis="characters")
    els = H0.meta["group"]["elements"]
    R = F.zeros((4, 4))
    for i, p in enumerate(els):
        for j, q in enumerate(els):
            R[i, j] = pow(2, p[0] * q[0], 5)
    return QuasiHopf(F, H0.labels, H0.mul, H0.unit, H0.cop, H0.counit, H0.anti, H0.alpha,
                     H0.beta, H0.phi, R, phi_inv=H0.phi_inv, triangular=False, meta=H0.meta)


@pytest.fixture(scope="session")
def derham1():
    return truncated_derham(trivial_hopf(GF(3)), 3, 1)


@pytest.fixture(scope="session")
def derham2():
    return truncated_derham(trivial_hopf(GF(3)), 3, 2)


@pytest.fixture(scope="session")
def twisted_examples():
    """Lazily built bundled twisted examples, keyed by name."""
    makers = {"octonion-twist": tf.octonion_group_example,
              "octonion-exterior": tf.octonion_exterior_example,
              "abelian-twist-plane": tf.abelian_plane_example,
              "abelian-twist-fp": tf.abelian_derham_example}
    return functools.lru_cache(maxsize=None)(lambda name: makers[name]())


@pytest.fixture(scope="session")
def workspace():
    return functools.lru_cache(maxsize=None)(lambda name: Workspace(load_example(name)))


@pytest.fixture(scope="session")
def wmod():
    return weight_module
