import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


def tmsv_sigma(r):
    """Closed-form XXPP covariance of one OPA (theta = 0) on vacuum."""
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    x = np.array([[c, -s], [-s, c]])
    p = np.array([[c, s], [s, c]])
    z = np.zeros((2, 2))
    return np.block([[x, z], [z, p]])


def xpxp_omega(n):
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def pt_eigs_oracle(sigma_xxpp, b_modes):
    """PT symplectic eigenvalues by an XPXP eigensolve, independent of the package."""
    n = sigma_xxpp.shape[0] // 2
    perm = np.ravel(np.column_stack([np.arange(n), np.arange(n) + n]))
    s = sigma_xxpp[np.ix_(perm, perm)]
    flip = np.ones(2 * n)
    for b in b_modes:
        flip[2 * (b - 1) + 1] = -1
    s = flip[:, None] * s * flip[None, :]
    ev = np.abs(np.linalg.eigvals(1j * xpxp_omega(n) @ s))
    return np.sort(ev)[::2]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
