"""Shared fixtures: tolerances, random generators and the published example systems."""

import numpy as np
import pytest

from errors import SynthesisError
from krein_linalg import double_up, krein_schur
from lqss_model import GeneralLqss, PassiveLqss

ADMISSIBLE_DRAWS = 50


@pytest.fixture(scope="session")
def tol():
    """Numerical tolerance for exact-arithmetic identities."""
    return 1e-8


@pytest.fixture
def rng():
    """Seeded generator, fresh for every test."""
    return np.random.default_rng(1234)


def _random_unitary(m, rng):
    # QR of a complex Ginibre matrix with the phases of R divided out
    Z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))[np.newaxis, :]


def _random_bogoliubov(m, rng, max_squeeze=0.5):
    U1, U2 = _random_unitary(m, rng), _random_unitary(m, rng)
    x = rng.uniform(0.05, max_squeeze, m)
    middle = np.block([[np.diag(np.cosh(x)), np.diag(np.sinh(x))],
                       [np.diag(np.sinh(x)), np.diag(np.cosh(x))]]).astype(complex)
    zero = np.zeros((m, m))
    return double_up(U2, zero) @ middle @ double_up(U1, zero)


def _random_hermitian(n, rng):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (A + A.conj().T) / 2


def _random_passive_system(n, m, rng):
    N = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return PassiveLqss(S=_random_unitary(m, rng), N=N, M=_random_hermitian(n, rng))


def _random_general_system(n, m, rng, active=0.3):
    N1 = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    N2 = active * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    M2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return GeneralLqss(
        S=_random_bogoliubov(m, rng),
        N=double_up(N1, N2),
        M=double_up(_random_hermitian(n, rng), 0.5 * active * (M2 + M2.T)),
    )


def _admissible_general_system(n, m, rng, active=0.3, max_cond=1e3):
    """Random general system whose generator has a well-conditioned Bogoliubov Schur form.

    Draws again on failure; after ``ADMISSIBLE_DRAWS`` rejected draws the
    calling test is skipped with the rejection reasons.
    """
    rejected = []
    for _ in range(ADMISSIBLE_DRAWS):
        sys = _random_general_system(n, m, rng, active)
        try:
            W = krein_schur(sys.generator()).W
        except SynthesisError as exc:
            rejected.append(type(exc).__name__)
            continue
        if np.linalg.cond(W) > max_cond:
            rejected.append("ill-conditioned")
            continue
        return sys
    pytest.skip(f"no admissible {n}-mode system in {ADMISSIBLE_DRAWS} draws: {sorted(set(rejected))}")


@pytest.fixture(scope="session")
def random_unitary():
    return _random_unitary


@pytest.fixture(scope="session")
def random_bogoliubov():
    return _random_bogoliubov


@pytest.fixture(scope="session")
def random_hermitian():
    return _random_hermitian


@pytest.fixture(scope="session")
def random_passive_system():
    return _random_passive_system


@pytest.fixture(scope="session")
def random_general_system():
    return _random_general_system


@pytest.fixture(scope="session")
def three_mode_passive():
    """Three-mode passive system with ``S = I``."""
    M = np.array([[5, 1, -2], [1, 3, 0], [-2, 0, 4]], dtype=complex)
    N = np.array([[1, 2, 1], [0, -1, 3], [2, 3, 5]], dtype=complex)
    return PassiveLqss(S=np.eye(3), N=N, M=M)


@pytest.fixture(scope="session")
def two_mode_active():
    """Two-mode active system with ``S = I``."""
    M = np.array([[2, 1, 0, -1], [1, 2, -1, 0], [0, -1, 2, 1], [-1, 0, 1, 2]], dtype=complex)
    N = np.array([[0, 1, 2, 0], [-1, 2, 1, -1], [2, 0, 0, 1], [1, -1, -1, 2]], dtype=complex)
    return GeneralLqss(S=np.eye(4), N=N, M=M)


@pytest.fixture(scope="session")
def admissible_general_system():
    return _admissible_general_system
