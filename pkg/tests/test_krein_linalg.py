r"""Unit tests for the Krein-space linear algebra module"""
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from errors import (
    AssumptionIViolated,
    CayleySingular,
    DegenerateComplement,
    DimensionError,
    KernelMismatch,
    NeutralVector,
    NotSemisimple,
    StructureError,
    UnitEigenvalue,
    UnsupportedSpectrum,
)
from krein_linalg import (
    DoubledUpMatrix,
    KreinStructure,
    blocks,
    bogoliubov_residual,
    cayley,
    complex_pair_block,
    complex_pair_parameters,
    conj_partner,
    double_up,
    flat_adjoint,
    inverse_cayley,
    is_bogoliubov,
    is_doubled_up,
    is_unitary,
    j_inner,
    j_sign,
    krein_gram_schmidt,
    krein_normalize,
    krein_schur,
    krein_svd,
    signature,
    skew_form,
    swap,
    unitary_schur,
)

# published values for the two-mode active system
ACTIVE_T1_DIAGONAL = np.array([-2.0305 - 2.2667j, 2.0305 - 2.6660j])
ACTIVE_NHAT = np.array(
    [
        [1.6818, 0, 0, 0],
        [0, 0, 0, 1.6818],
        [0, 0, 1.6818, 0],
        [0, 1.6818, 0, 0],
    ]
)

PASSIVE_X = 1j * np.array(
    [
        [6.2631, 0.0740, -1.4400],
        [0.0740, 8.8556, -4.4337],
        [-1.4400, -4.4337, 8.8814],
    ]
)
PASSIVE_R = np.array(
    [
        [0.9429, -0.0145, -0.0237],
        [-0.0145, 0.9438, -0.0467],
        [-0.0237, -0.0467, 0.9389],
    ]
) + 1j * np.array(
    [
        [0.3245, 0.0276, 0.0637],
        [0.0276, 0.2918, 0.1449],
        [0.0637, 0.1449, 0.3010],
    ]
)

ACTIVE_X = 1j * np.array(
    [
        [7.2889, 2.0271, 0.8858, -6.7904],
        [2.0271, 8.6924, -6.7904, -3.4497],
        [-0.8858, 6.7904, -7.2889, -2.0271],
        [6.7904, 3.4497, -2.0271, -8.6924],
    ]
)
ACTIVE_R = np.array(
    [
        [-0.3731, 0.9082, 0, 0.0450],
        [0.9082, 0.3125, -0.0450, 0],
        [0, 0.0450, -0.3731, 0.9082],
        [-0.0450, 0, 0.9082, 0.3125],
    ]
) + 1j * np.array(
    [
        [7.8624, -5.2659, 7.4743, -5.8003],
        [-5.2659, 4.4401, -5.8003, 3.7042],
        [-7.4743, 5.8003, -7.8624, 5.2659],
        [5.8003, -3.7042, 5.2659, -4.4401],
    ]
)


def nilpotent_flat_hermitian():
    """Doubled-up ``K`` with ``K^flat = K`` and ``K @ K = 0``."""
    return double_up(np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class TestStructure:
    """Signature, swap and doubled-up helpers"""

    def test_signature_and_swap(self):
        """J squares to the identity and Sigma exchanges the halves"""
        J, Sigma = signature(2), swap(2)
        assert np.allclose(J @ J, np.eye(4))
        assert np.allclose(Sigma @ np.arange(4), [2, 3, 0, 1])
        structure = KreinStructure(2)
        assert np.allclose(structure.J, J)
        assert np.allclose(structure.Sigma, Sigma)

    def test_double_up_blocks(self):
        """blocks() returns the upper blocks that double_up() mirrors"""
        X1 = np.array([[1 + 1j, 2], [0, -1j]])
        X2 = np.array([[0, 3j], [1, 1]])
        X = double_up(X1, X2)
        assert np.allclose(X[2:, 2:], X1.conj())
        assert np.allclose(X[2:, :2], X2.conj())
        b1, b2 = blocks(X)
        assert np.allclose(b1, X1)
        assert np.allclose(b2, X2)

    def test_double_up_shape_mismatch(self):
        """Blocks of different shapes are rejected"""
        with pytest.raises(DimensionError, match="blocks differ in shape"):
            double_up(np.eye(2), np.eye(3))

    def test_is_doubled_up(self, two_mode_active):
        """The active system's N and M are doubled-up; a generic matrix is not"""
        assert is_doubled_up(two_mode_active.N)
        assert is_doubled_up(two_mode_active.M)
        assert not is_doubled_up(np.arange(16, dtype=complex).reshape(4, 4))

    def test_odd_dimension(self):
        """Odd dimensions cannot be doubled-up"""
        with pytest.raises(DimensionError, match="even dimensions"):
            is_doubled_up(np.eye(3))
        with pytest.raises(DimensionError, match="even dimensions"):
            flat_adjoint(np.ones((3, 2)))

    def test_doubled_up_matrix(self, two_mode_active):
        """DoubledUpMatrix stores only the upper blocks"""
        D = DoubledUpMatrix.from_full(two_mode_active.N)
        assert (D.half_rows, D.half_cols) == (2, 2)
        assert np.allclose(D.full(), two_mode_active.N)
        with pytest.raises(StructureError, match="not doubled-up"):
            DoubledUpMatrix.from_full(np.arange(16).reshape(4, 4))

    def test_flat_adjoint_rectangular(self):
        """The flat-adjoint of a 2r x 2s matrix is 2s x 2r and an involution"""
        rng = np.random.default_rng(3)
        X = double_up(rng.standard_normal((3, 2)), rng.standard_normal((3, 2)))
        Xf = flat_adjoint(X)
        assert Xf.shape == (4, 6)
        assert np.allclose(Xf, signature(2) @ X.conj().T @ signature(3))
        assert np.allclose(flat_adjoint(Xf), X)

    def test_random_bogoliubov(self, random_bogoliubov, random_unitary, tol):
        """Products of passive and squeezing stages are Bogoliubov"""
        rng = np.random.default_rng(11)
        R = random_bogoliubov(3, rng)
        assert is_doubled_up(R)
        assert is_bogoliubov(R)
        assert np.allclose(flat_adjoint(R) @ R, np.eye(6), atol=tol, rtol=0)
        # unitary but not doubled-up
        assert not is_bogoliubov(random_unitary(4, rng))
        assert is_unitary(random_unitary(4, rng))


class TestInnerProduct:
    """J-inner product and normalization"""

    def test_j_inner_sign(self):
        """Annihilation directions are positive, creation directions negative"""
        e1 = np.array([1, 0, 0, 0], dtype=complex)
        e3 = np.array([0, 0, 1, 0], dtype=complex)
        assert j_inner(e1, e1) == 1
        assert j_inner(e3, e3) == -1
        assert j_sign(e1 + 0.5 * e3) == 1

    def test_length_mismatch(self):
        """Vectors of different lengths have no inner product"""
        with pytest.raises(DimensionError):
            j_inner(np.ones(2), np.ones(4))

    def test_normalize_negative(self):
        """A negative vector is replaced by its partner"""
        v = np.array([0, 0, 2, 0], dtype=complex)
        u, sign = krein_normalize(v)
        assert sign == -1
        assert np.allclose(u, [1, 0, 0, 0])
        assert np.isclose(j_inner(u, u), 1)

    def test_normalize_neutral(self):
        """A J-neutral vector cannot be normalized"""
        with pytest.raises(NeutralVector):
            krein_normalize(np.array([1, 0, 1, 0], dtype=complex))

    def test_partner_is_orthogonal(self):
        """<v, Sigma v#>_J equals the conjugate of the skew form"""
        rng = np.random.default_rng(5)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert np.isclose(j_inner(v, conj_partner(w)), np.conj(skew_form(v, w)))
        assert np.isclose(skew_form(v, v), 0)


class TestGramSchmidt:
    """Krein Gram-Schmidt"""

    def test_unit_pool(self, tol):
        """Completing the unit vectors gives a Bogoliubov matrix"""
        W = krein_gram_schmidt([], list(np.eye(6, dtype=complex)))
        assert W.shape == (6, 6)
        assert is_bogoliubov(W)

    def test_fixed_vector_is_kept(self, random_bogoliubov, tol):
        """A fixed J-normalized vector stays the first x"""
        R = random_bogoliubov(2, np.random.default_rng(8))
        x = R[:, 0]
        W = krein_gram_schmidt([x], list(np.eye(4, dtype=complex)))
        assert np.allclose(W[:, 0], x, atol=tol, rtol=0)
        assert np.allclose(W[:, 2], conj_partner(x), atol=tol, rtol=0)
        assert is_bogoliubov(W)

    def test_neutral_candidates_combined(self):
        """Two neutral candidates are summed into a non-neutral one"""
        e = np.eye(4, dtype=complex)
        pool = [e[0] + e[2], e[0] - e[2], e[1]]
        W = krein_gram_schmidt([], pool)
        assert is_bogoliubov(W)

    def test_all_neutral(self):
        """Only neutral candidates and neutral combinations"""
        e = np.eye(4, dtype=complex)
        with pytest.raises(DegenerateComplement):
            krein_gram_schmidt([], [e[0] + e[2], e[1] + e[3]])


class TestKreinSchur:
    """Bogoliubov Schur form"""

    @staticmethod
    def check_form(A, result, tol):
        W, T = result.W, result.T
        n = A.shape[0] // 2
        T1, T2 = blocks(T)
        scale = max(1.0, np.max(np.abs(A))) * max(1.0, np.max(np.abs(W))) ** 2
        assert np.max(np.abs(A @ W - W @ T)) <= tol * scale
        assert bogoliubov_residual(W) <= 1e-8 * max(1.0, np.max(np.abs(W))) ** 2
        assert is_doubled_up(T, 1e-6 * scale)
        assert np.allclose(np.triu(T1, 1), 0, atol=1e-7 * scale)
        assert np.allclose(np.triu(T2), 0, atol=1e-7 * scale)
        assert np.allclose(np.diag(T1), result.eigen_order, atol=1e-12 * scale)
        assert len(result.eigen_order) == n

    def test_two_mode_active(self, two_mode_active):
        """Placed eigenvalues are the J-positive half of the spectrum"""
        A = two_mode_active.generator()
        result = krein_schur(A)
        self.check_form(A, result, 1e-8)
        found = sorted(result.eigen_order, key=lambda z: z.real)
        assert np.allclose(found, ACTIVE_T1_DIAGONAL, atol=1e-3)

    def test_explicit_targets(self, two_mode_active):
        """Explicit targets fix the diagonal order"""
        A = two_mode_active.generator()
        for targets in (ACTIVE_T1_DIAGONAL, ACTIVE_T1_DIAGONAL[::-1]):
            result = krein_schur(A, list(targets))
            assert np.allclose(result.eigen_order, targets, atol=1e-3)

    def test_policy_order(self, two_mode_active):
        """Named policies order the diagonal from position 1"""
        A = two_mode_active.generator()
        desc = krein_schur(A, "real-desc").eigen_order
        asc = krein_schur(A, "real-asc").eigen_order
        assert np.allclose(desc, ACTIVE_T1_DIAGONAL[::-1], atol=1e-3)
        assert np.allclose(asc, ACTIVE_T1_DIAGONAL, atol=1e-3)

    def test_default_policy(self, two_mode_active):
        """Largest real part first"""
        result = krein_schur(two_mode_active.generator())
        assert np.allclose(result.eigen_order, ACTIVE_T1_DIAGONAL[::-1], atol=1e-3)

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**16))
    def test_random(self, seed, admissible_general_system):
        """A W = W T on random doubled-up generators"""
        A = admissible_general_system(3, 3, np.random.default_rng(seed)).generator()
        self.check_form(A, krein_schur(A), 1e-8)

    def test_all_neutral_eigenvectors(self):
        """A nilpotent block with a J-neutral eigenvector"""
        A = np.array([[1j, 1], [1, -1j]])
        with pytest.raises(AssumptionIViolated) as excinfo:
            krein_schur(A)
        assert excinfo.value.step == 1

    def test_not_doubled_up(self):
        """General square matrices are refused"""
        with pytest.raises(StructureError):
            krein_schur(np.arange(16, dtype=complex).reshape(4, 4))

    def test_bad_ordering(self, two_mode_active):
        """Unknown policy names and wrong target counts"""
        A = two_mode_active.generator()
        with pytest.raises(ValueError, match="unknown ordering policy"):
            krein_schur(A, "sideways")
        with pytest.raises(ValueError, match="needs 2 eigenvalues"):
            krein_schur(A, [1j])


class TestUnitarySchur:
    """Unitary lower-triangular Schur form"""

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**16))
    def test_random(self, seed):
        """A W = W T with T lower triangular and the diagonal in policy order"""
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        result = unitary_schur(A, "real-desc")
        W, T = result.W, result.T
        assert np.allclose(A @ W, W @ T, atol=1e-9)
        assert is_unitary(W)
        assert np.allclose(np.triu(T, 1), 0, atol=1e-9)
        reals = [z.real for z in result.eigen_order]
        assert all(a >= b - 1e-9 for a, b in zip(reals, reals[1:]))

    def test_three_mode_passive(self, three_mode_passive):
        """Targets reproduce the published diagonal"""
        targets = [-23.1603 - 3.1301j, -1.9103 - 5.5835j, -1.9294 - 3.2865j]
        result = unitary_schur(three_mode_passive.generator(), targets)
        assert np.allclose(result.eigen_order, targets, atol=1e-3)


class TestKreinSvd:
    """Bogoliubov singular value decomposition"""

    def test_two_mode_active(self, two_mode_active, tol):
        """One positive and one negative eigenvalue of N^flat N"""
        N = two_mode_active.N
        svd = krein_svd(N)
        assert np.allclose(svd.lambdas_plus, [2.8284], atol=1e-4)
        assert np.allclose(svd.lambdas_minus, [-2.8284], atol=1e-4)
        assert svd.lambdas_complex == ()
        assert svd.n_zero == 0 and svd.rank == 2
        assert np.allclose(svd.Nhat, ACTIVE_NHAT, atol=1e-4)
        assert np.allclose(svd.V @ svd.Nhat @ flat_adjoint(svd.W), N, atol=1e-8)
        assert is_bogoliubov(svd.V)
        assert is_bogoliubov(svd.W)

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**16))
    def test_random(self, seed, random_general_system):
        """N = V Nhat W^flat with Bogoliubov V and W"""
        N = random_general_system(2, 3, np.random.default_rng(seed)).N
        try:
            svd = krein_svd(N)
        except (UnsupportedSpectrum, NotSemisimple, KernelMismatch):
            assume(False)
        scale = max(1.0, np.max(np.abs(N)))
        assert np.max(np.abs(N - svd.V @ svd.Nhat @ flat_adjoint(svd.W))) <= 1e-6 * scale
        assert svd.rank + svd.n_zero == 2

    def test_complex_pair(self):
        """A non-real eigenvalue becomes a complex-pair block"""
        lam = 1 + 2j
        alpha, beta = complex_pair_parameters(lam)
        assert np.isclose(alpha ** 2 - beta ** 2, lam.real)
        assert np.isclose(2 * alpha * beta, lam.imag)
        N = complex_pair_block(alpha, beta)
        svd = krein_svd(N)
        assert np.allclose(svd.lambdas_complex, [lam], atol=1e-8)
        assert svd.rank == 2 and svd.n_zero == 0
        assert np.allclose(svd.alphas, [alpha]) and np.allclose(svd.betas, [beta])
        assert np.allclose(svd.V @ svd.Nhat @ flat_adjoint(svd.W), N, atol=1e-8)

    def test_kernel(self):
        """A rank-deficient passive coupling leaves kernel modes"""
        N = double_up(np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]), np.zeros((2, 3)))
        svd = krein_svd(N)
        assert svd.n_zero == 1
        assert np.allclose(sorted(svd.lambdas_plus), [1.0, 4.0])
        assert np.allclose(svd.V @ svd.Nhat @ flat_adjoint(svd.W), N, atol=1e-8)

    def test_not_semisimple(self):
        """N^flat N = 4I + K with K nilpotent"""
        N = 2 * np.eye(4) + nilpotent_flat_hermitian() / 4
        with pytest.raises(NotSemisimple):
            krein_svd(N)

    def test_kernel_mismatch(self):
        """N^flat N vanishes while N does not"""
        with pytest.raises(KernelMismatch):
            krein_svd(np.ones((2, 2)))


class TestCayley:
    """Cayley transform pair"""

    def test_unitary_round_trip(self, random_unitary, tol):
        """Unitary R gives skew-Hermitian X"""
        R = random_unitary(4, np.random.default_rng(21))
        X = cayley(R)
        assert np.allclose(X + X.conj().T, 0, atol=1e-9)
        assert np.allclose(inverse_cayley(X), R, atol=1e-9)

    def test_bogoliubov_round_trip(self, random_bogoliubov):
        """Bogoliubov R gives a flat-skew-Hermitian X"""
        R = random_bogoliubov(2, np.random.default_rng(4))
        X = cayley(R)
        assert np.allclose(X + flat_adjoint(X), 0, atol=1e-9)
        assert is_doubled_up(X, 1e-9)
        assert np.allclose(inverse_cayley(X), R, atol=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**16), m=st.integers(1, 4))
    def test_random_unitary_round_trip(self, seed, m, random_unitary):
        R = random_unitary(m, np.random.default_rng(seed))
        assume(np.min(np.abs(np.linalg.eigvals(R) - 1)) > 1e-3)
        X = cayley(R)
        scale = max(1.0, np.max(np.abs(X)))
        assert np.max(np.abs(X + X.conj().T)) <= 1e-10 * scale
        assert np.max(np.abs(inverse_cayley(X) - R)) <= 1e-10 * scale

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**16), m=st.integers(1, 3))
    def test_random_bogoliubov_round_trip(self, seed, m, random_bogoliubov):
        R = random_bogoliubov(m, np.random.default_rng(seed))
        assume(np.min(np.abs(np.linalg.eigvals(R) - 1)) > 1e-3)
        X = cayley(R)
        scale = max(1.0, np.max(np.abs(X))) * max(1.0, np.max(np.abs(R)))
        assert np.max(np.abs(X + flat_adjoint(X))) <= 1e-10 * scale
        assert np.max(np.abs(inverse_cayley(X) - R)) <= 1e-10 * scale

    def test_passive_published(self):
        """Published passive gain"""
        assert np.allclose(inverse_cayley(PASSIVE_X), PASSIVE_R, atol=2e-3)

    def test_active_published(self):
        """Published active gain, which is sensitive to the rounding of X"""
        R = inverse_cayley(ACTIVE_X)
        assert np.allclose(R, ACTIVE_R, atol=5e-2)
        assert is_bogoliubov(R, 1e-6)

    def test_unit_eigenvalue(self):
        with pytest.raises(UnitEigenvalue):
            cayley(np.eye(3))

    def test_singular(self):
        with pytest.raises(CayleySingular):
            inverse_cayley(-np.eye(2))
