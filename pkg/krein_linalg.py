"""Dense linear algebra over Krein spaces.

A Krein space here is ``C^{2k}`` with the indefinite inner product
``<v, w>_J = v^dag J w``, ``J = diag(I_k, -I_k)``.  Matrices acting on
annihilation/creation pairs are *doubled-up*::

    X = [[X1,  X2 ],
         [X2#, X1#]]

and the physically allowed static transformations are the Bogoliubov
matrices, i.e. doubled-up matrices ``R`` with ``R R^flat = R^flat R = I``
where ``R^flat = J R^dag J``.

The module provides the structural helpers, J-normalization and Krein
Gram-Schmidt, the Bogoliubov Schur form (:func:`krein_schur`), its unitary
counterpart (:func:`unitary_schur`), the Bogoliubov SVD (:func:`krein_svd`)
and the Cayley transform pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import linalg as sla

from config import ORDERING_POLICIES, config
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
from logger import get_logger

logger = get_logger(__name__)

Ordering = Union[str, Sequence[complex], None]

# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


def _as_matrix(X, name: str = "matrix") -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DimensionError(f"{name} has non-finite entries")
    return X


def _check_even(X: np.ndarray, name: str = "matrix") -> None:
    rows, cols = X.shape
    if rows % 2 or cols % 2:
        raise DimensionError(f"{name} must have even dimensions, got {rows}x{cols}")


def signature(k: int) -> np.ndarray:
    """Return ``J_{2k} = diag(I_k, -I_k)``."""
    return np.diag(np.concatenate([np.ones(k), -np.ones(k)])).astype(complex)


def swap(k: int) -> np.ndarray:
    """Return ``Sigma_{2k}``, the matrix exchanging the two halves."""
    eye = np.eye(k)
    zero = np.zeros((k, k))
    return np.block([[zero, eye], [eye, zero]]).astype(complex)


@dataclass(frozen=True)
class KreinStructure:
    """Signature and swap matrices of ``C^{2k}``."""

    half_dim: int

    @property
    def J(self) -> np.ndarray:
        return signature(self.half_dim)

    @property
    def Sigma(self) -> np.ndarray:
        return swap(self.half_dim)


def double_up(X1, X2) -> np.ndarray:
    """Materialize ``[[X1, X2], [X2#, X1#]]``."""
    X1 = np.atleast_2d(np.asarray(X1, dtype=complex))
    X2 = np.atleast_2d(np.asarray(X2, dtype=complex))
    if X1.shape != X2.shape:
        raise DimensionError(f"blocks differ in shape: {X1.shape} vs {X2.shape}")
    return np.block([[X1, X2], [X2.conj(), X1.conj()]])


def blocks(X) -> tuple[np.ndarray, np.ndarray]:
    """Return the upper blocks ``(X1, X2)`` of a doubled-up matrix."""
    X = _as_matrix(X)
    _check_even(X)
    r, s = X.shape[0] // 2, X.shape[1] // 2
    return X[:r, :s].copy(), X[:r, s:].copy()


@dataclass(frozen=True)
class DoubledUpMatrix:
    """A ``2r x 2s`` doubled-up matrix stored by its upper blocks."""

    block1: np.ndarray
    block2: np.ndarray

    def __post_init__(self):
        b1 = np.atleast_2d(np.asarray(self.block1, dtype=complex))
        b2 = np.atleast_2d(np.asarray(self.block2, dtype=complex))
        if b1.shape != b2.shape:
            raise DimensionError(f"blocks differ in shape: {b1.shape} vs {b2.shape}")
        object.__setattr__(self, "block1", b1)
        object.__setattr__(self, "block2", b2)

    @property
    def half_rows(self) -> int:
        return self.block1.shape[0]

    @property
    def half_cols(self) -> int:
        return self.block1.shape[1]

    def full(self) -> np.ndarray:
        return double_up(self.block1, self.block2)

    @classmethod
    def from_full(cls, X, tol: float | None = None) -> "DoubledUpMatrix":
        """Split a full matrix, refusing it unless it is doubled-up."""
        X = _as_matrix(X)
        if not is_doubled_up(X, tol):
            raise StructureError("matrix is not doubled-up")
        return cls(*blocks(X))


def doubled_direct_sum(*mats: np.ndarray) -> np.ndarray:
    """Direct sum of doubled-up matrices, re-doubled so the result is doubled-up."""
    if not mats:
        return np.zeros((0, 0), dtype=complex)
    firsts, seconds = zip(*(blocks(m) for m in mats))
    return double_up(sla.block_diag(*firsts), sla.block_diag(*seconds))


def flat_adjoint(X) -> np.ndarray:
    """Return the flat-adjoint ``J_{2s} X^dag J_{2r}`` of a ``2r x 2s`` matrix.

    Raises:
        DimensionError: If ``X`` has an odd dimension.
    """
    X = _as_matrix(X)
    _check_even(X)
    r, s = X.shape[0] // 2, X.shape[1] // 2
    jr = np.concatenate([np.ones(r), -np.ones(r)])
    js = np.concatenate([np.ones(s), -np.ones(s)])
    return js[:, None] * X.conj().T * jr[None, :]


def _structure_tol(tol: float | None, X: np.ndarray) -> float:
    base = config.STRUCTURE_TOL if tol is None else tol
    return base * max(1.0, float(np.max(np.abs(X), initial=0.0)))


def is_doubled_up(X, tol: float | None = None) -> bool:
    """True iff ``||Sigma X Sigma - X#||_max <= tol``.

    With ``tol=None`` the configured structure tolerance is used, scaled by
    ``max(1, ||X||_max)``.
    """
    X = _as_matrix(X)
    _check_even(X)
    r, s = X.shape[0] // 2, X.shape[1] // 2
    mirrored = np.block([[X[r:, s:], X[r:, :s]], [X[:r, s:], X[:r, :s]]])
    limit = _structure_tol(None, X) if tol is None else tol
    return bool(np.max(np.abs(mirrored - X.conj()), initial=0.0) <= limit)


def bogoliubov_residual(R) -> float:
    R = _as_matrix(R)
    _check_even(R)
    eye = np.eye(R.shape[0])
    Rf = flat_adjoint(R)
    return float(max(np.max(np.abs(R @ Rf - eye), initial=0.0), np.max(np.abs(Rf @ R - eye), initial=0.0)))


def is_bogoliubov(R, tol: float | None = None) -> bool:
    """True iff ``R`` is square, doubled-up and flat-unitary within ``tol``."""
    R = _as_matrix(R)
    _check_even(R)
    if R.shape[0] != R.shape[1]:
        return False
    limit = _structure_tol(tol, R)
    return is_doubled_up(R, limit) and bogoliubov_residual(R) <= limit


def unitarity_residual(U) -> float:
    U = _as_matrix(U)
    eye = np.eye(U.shape[0])
    return float(max(
        np.max(np.abs(U.conj().T @ U - eye), initial=0.0),
        np.max(np.abs(U @ U.conj().T - eye), initial=0.0),
    ))


def is_unitary(U, tol: float | None = None) -> bool:
    U = _as_matrix(U)
    if U.shape[0] != U.shape[1]:
        return False
    return unitarity_residual(U) <= _structure_tol(tol, U)


# ---------------------------------------------------------------------------
# Inner product
# ---------------------------------------------------------------------------


def _signs(length: int) -> np.ndarray:
    if length % 2:
        raise DimensionError(f"vector length {length} is odd")
    k = length // 2
    return np.concatenate([np.ones(k), -np.ones(k)])


def conj_partner(v) -> np.ndarray:
    """Return ``Sigma v#``, the creation-side partner of ``v``."""
    v = np.asarray(v, dtype=complex)
    k = v.shape[0] // 2
    return np.concatenate([v[k:], v[:k]]).conj()


def j_inner(v, w) -> complex:
    """Indefinite inner product ``v^dag J w``.

    Raises:
        DimensionError: If the vectors differ in length or have odd length.
    """
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape != w.shape:
        raise DimensionError(f"vector lengths differ: {v.shape} vs {w.shape}")
    return complex(np.vdot(v, _signs(v.shape[0]) * w))


def j_norm_sq(v) -> float:
    return j_inner(v, v).real


def j_norm(v) -> float:
    """``sqrt(|<v, v>_J|)``; see :func:`j_sign` for the sign."""
    return float(np.sqrt(abs(j_norm_sq(v))))


def j_sign(v) -> int:
    value = j_norm_sq(v)
    return int(np.sign(value))


def skew_form(u, v) -> complex:
    """Bilinear skew form ``u^T J Sigma v``.

    Bogoliubov maps preserve it, and ``<u, Sigma v#>_J`` is its conjugate.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    k = u.shape[0] // 2
    return complex(u[:k] @ v[k:] - u[k:] @ v[:k])


def canonical_phase(v, rel: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so its first significant entry is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    peak = mags.max(initial=0.0)
    if peak == 0.0:
        return v
    idx = int(np.argmax(mags > rel * peak))
    return v * (abs(v[idx]) / v[idx])


def krein_normalize(v, tol: float | None = None) -> tuple[np.ndarray, int]:
    """J-normalize ``v`` to J-norm ``+1``.

    A vector of negative J-norm is replaced by ``Sigma v#`` first, so the
    returned vector always has ``<u, u>_J = 1``.

    Returns:
        tuple[array, int]: the normalized vector and the sign of the
            original J-norm.

    Raises:
        NeutralVector: If ``|<v, v>_J| <= tol * ||v||^2``.
    """
    v = np.asarray(v, dtype=complex)
    tol = config.NEUTRAL_TOL if tol is None else tol
    value = j_norm_sq(v)
    size = float(np.vdot(v, v).real)
    if size == 0.0 or abs(value) <= tol * size:
        raise NeutralVector(f"vector has J-norm {value:.3e} relative to ||v||^2 = {size:.3e}")
    if value > 0:
        return v / np.sqrt(value), 1
    return conj_partner(v) / np.sqrt(-value), -1


# ---------------------------------------------------------------------------
# Krein Gram-Schmidt
# ---------------------------------------------------------------------------


def _project_out(v: np.ndarray, basis: list[np.ndarray], norms: list[float]) -> np.ndarray:
    # twice is enough
    for _ in range(2):
        for b, nb in zip(basis, norms):
            v = v - b * (j_inner(b, v) / nb)
    return v


def krein_gram_schmidt(
    fixed: Sequence[np.ndarray],
    pool: Sequence[np.ndarray],
    tol: float | None = None,
    size: int | None = None,
) -> np.ndarray:
    """Extend J-orthonormal vectors to a basis of x's and their partners.

    ``fixed`` vectors keep their position: the positive-norm ones (or the
    partners of negative-norm ones) become the leading x's.  New x's are
    taken from ``pool`` greedily, always using the projected candidate of
    largest relative J-norm.  When every remaining candidate is neutral,
    sums ``w_i + w_j`` and ``w_i + 1j w_j`` are tried.

    Args:
        fixed: J-orthonormal vectors, closed under ``v -> Sigma v#`` up to
            duplicates.
        pool: candidates spanning (together with ``fixed``) the target space.
        tol: relative neutrality threshold.
        size: number of x's wanted; defaults to half the vector length.

    Returns:
        array: columns ``[x_1..x_p, Sigma x_1#..Sigma x_p#]``.

    Raises:
        DegenerateComplement: If no non-neutral candidate remains.
    """
    tol = config.NEUTRAL_TOL if tol is None else tol
    vectors = [np.asarray(v, dtype=complex) for v in list(fixed) + list(pool)]
    if not vectors:
        return np.zeros((0, 0), dtype=complex)
    length = vectors[0].shape[0]
    _signs(length)
    target = length // 2 if size is None else size

    xs: list[np.ndarray] = []
    for f in fixed:
        f = np.asarray(f, dtype=complex)
        x = f if j_norm_sq(f) > 0 else conj_partner(f)
        if any(abs(j_inner(prev, x)) > 0.5 for prev in xs):
            continue
        xs.append(x)

    def _basis() -> tuple[list[np.ndarray], list[float]]:
        partners = [conj_partner(x) for x in xs]
        return xs + partners, [1.0] * len(xs) + [-1.0] * len(xs)

    def _ratio(w: np.ndarray) -> float:
        return abs(j_norm_sq(w)) / float(np.vdot(w, w).real)

    pending = [np.asarray(v, dtype=complex) for v in pool]
    while len(xs) < target:
        basis, norms = _basis()
        projected = []
        for v, w in ((v, _project_out(v, basis, norms)) for v in pending):
            scale = np.linalg.norm(v)
            if scale > 0 and np.linalg.norm(w) > 1e-10 * scale:
                projected.append(w)
        if not projected:
            raise DegenerateComplement(
                f"candidates exhausted after {len(xs)} of {target} basis vectors"
            )

        ratios = [_ratio(w) for w in projected]
        best = int(np.argmax(ratios))
        if ratios[best] > tol:
            x, _ = krein_normalize(projected[best], tol)
            xs.append(x)
            pending = projected[:best] + projected[best + 1:]
            continue

        combos = []
        for i in range(len(projected)):
            for j in range(i + 1, len(projected)):
                for c in (1.0, 1j):
                    w = projected[i] + c * projected[j]
                    if np.linalg.norm(w) > 0:
                        combos.append(w)
        if not combos:
            raise DegenerateComplement("only one neutral candidate remains")
        combo_ratios = [_ratio(w) for w in combos]
        best = int(np.argmax(combo_ratios))
        if combo_ratios[best] <= tol:
            raise DegenerateComplement(
                f"all remaining candidates are J-neutral after {len(xs)} of {target} vectors"
            )
        x, _ = krein_normalize(combos[best], tol)
        xs.append(x)
        pending = projected

    xs = xs[:target]
    return np.column_stack(xs + [conj_partner(x) for x in xs])


# ---------------------------------------------------------------------------
# Eigenvalue placement
# ---------------------------------------------------------------------------


def _cluster(evals: np.ndarray, rel_tol: float) -> list[np.ndarray]:
    scale = max(1.0, float(np.max(np.abs(evals), initial=0.0)))
    remaining = list(range(len(evals)))
    groups = []
    while remaining:
        seed = remaining[0]
        members = [j for j in remaining if abs(evals[j] - evals[seed]) <= rel_tol * scale]
        groups.append(np.array(members))
        remaining = [j for j in remaining if j not in members]
    return groups


def _policy_key(policy: str):
    if policy not in ORDERING_POLICIES:
        raise ValueError(f"unknown ordering policy {policy!r}; expected one of {ORDERING_POLICIES}")
    keys = {
        "real-desc": lambda z: (-round(z.real, 10), -round(z.imag, 10)),
        "real-asc": lambda z: (round(z.real, 10), round(z.imag, 10)),
        "imag-desc": lambda z: (-round(z.imag, 10), -round(z.real, 10)),
        "imag-asc": lambda z: (round(z.imag, 10), round(z.real, 10)),
        "magnitude-desc": lambda z: (-round(abs(z), 10), -round(z.real, 10), -round(z.imag, 10)),
        "magnitude-asc": lambda z: (round(abs(z), 10), round(z.real, 10), round(z.imag, 10)),
    }
    return keys[policy]


def _resolve_ordering(ordering: Ordering, n: int):
    """Return ``(policy_key, targets)``; exactly one of them is not None."""
    if ordering is None:
        ordering = config.ORDERING
    if isinstance(ordering, str):
        return _policy_key(ordering.strip().lower()), None
    targets = [complex(t) for t in ordering]
    if len(targets) != n:
        raise ValueError(f"explicit ordering needs {n} eigenvalues, got {len(targets)}")
    return None, targets


def _choose(candidates: list[tuple[complex, np.ndarray]], key, targets, k: int):
    if targets is not None:
        goal = targets[k - 1]
        return min(candidates, key=lambda c: abs(c[0] - goal))
    # position k is filled from the candidates left for positions 1..k
    return max(candidates, key=lambda c: key(c[0]))


def _embed(active: np.ndarray, block: np.ndarray, dim: int) -> np.ndarray:
    E = np.eye(dim, dtype=complex)
    E[np.ix_(active, active)] = block
    return E


@dataclass(frozen=True)
class KreinSchurResult:
    """Triangular form ``A W = W T``.

    For :func:`krein_schur`, ``W`` is Bogoliubov and ``T`` is doubled-up
    with ``T1`` lower and ``T2`` strictly lower triangular.  For
    :func:`unitary_schur`, ``W`` is unitary and ``T`` lower triangular.
    """

    W: np.ndarray
    T: np.ndarray
    eigen_order: tuple[complex, ...]


def _krein_eigen_candidates(B: np.ndarray, tol: float) -> list[tuple[complex, np.ndarray]]:
    evals, evecs = sla.eig(B)
    dim = B.shape[0]
    candidates: list[tuple[complex, np.ndarray]] = []
    for idx in _cluster(evals, config.CLUSTER_TOL):
        mu = complex(np.mean(evals[idx]))
        shifted = B - mu * np.eye(dim)
        cutoff = config.RANK_CUTOFF
        Q = sla.null_space(shifted, rcond=cutoff) if np.any(shifted) else np.eye(dim)
        if Q.shape[1] == 0:
            Q = evecs[:, idx[:1]] / np.linalg.norm(evecs[:, idx[0]])
        H = Q.conj().T @ (_signs(dim)[:, None] * Q)
        hvals, hvecs = np.linalg.eigh((H + H.conj().T) / 2)
        pick = int(np.argmax(np.abs(hvals)))
        if abs(hvals[pick]) <= tol:
            logger.debug("eigenvalue %.6g is J-neutral, skipped", mu)
            continue
        v = Q @ hvecs[:, pick]
        if hvals[pick] < 0:
            v = conj_partner(v)
        v = canonical_phase(v / np.sqrt(j_norm_sq(v)))
        lam = j_inner(v, B @ v)
        if any(abs(lam - c[0]) <= config.CLUSTER_TOL * max(1.0, abs(lam)) for c in candidates):
            continue
        candidates.append((lam, v))
    return candidates


def krein_schur(A, ordering: Ordering = None, tol: float | None = None) -> KreinSchurResult:
    """Bogoliubov triangularization of a doubled-up matrix.

    Deflates one mode at a time: at step ``k`` an eigenvector ``x`` of the
    active ``2k x 2k`` block with non-zero J-norm is chosen (replaced by
    ``Sigma x#`` when the J-norm is negative), completed to a J-orthonormal
    basis and placed so that ``x`` becomes the last active mode.  Positions
    are filled from ``n`` down to ``1``.

    Args:
        A: ``2n x 2n`` doubled-up matrix.
        ordering: a policy name (see ``config.ORDERING_POLICIES``) giving
            the order of the diagonal from position 1, or ``n`` complex targets
            where position ``k`` receives the admissible eigenvalue closest to
            ``targets[k-1]``.
        tol: relative J-norm neutrality threshold.

    Raises:
        StructureError: If ``A`` is not doubled-up.
        AssumptionIViolated: If every eigenvector of some active block is
            J-neutral.
    """
    A = _as_matrix(A, "A")
    _check_even(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got {A.shape}")
    if not is_doubled_up(A):
        raise StructureError("krein_schur needs a doubled-up matrix")
    tol = config.NEUTRAL_TOL if tol is None else tol
    n = A.shape[0] // 2
    key, targets = _resolve_ordering(ordering, n)

    W = np.eye(2 * n, dtype=complex)
    for k in range(n, 0, -1):
        active = np.r_[0:k, n:n + k]
        T = flat_adjoint(W) @ A @ W
        B = T[np.ix_(active, active)]
        candidates = _krein_eigen_candidates(B, tol)
        if not candidates:
            raise AssumptionIViolated(k)
        lam, x = _choose(candidates, key, targets, k)
        logger.debug("deflation step %d: placed eigenvalue %.6g", k, lam)

        unit = np.eye(2 * k, dtype=complex)
        Wk = krein_gram_schmidt([x], list(unit.T), tol)
        order = np.r_[1:k, 0, k + 1:2 * k, k]
        W = W @ _embed(active, Wk[:, order], 2 * n)

    T = flat_adjoint(W) @ A @ W
    eigen_order = tuple(complex(z) for z in np.diag(T)[:n])
    logger.info("Krein-Schur form computed for n=%d (eigenvalues %s)", n, _fmt(eigen_order))
    return KreinSchurResult(W=W, T=T, eigen_order=eigen_order)


def unitary_schur(A, ordering: Ordering = None) -> KreinSchurResult:
    """Unitary lower-triangular Schur form ``A W = W T`` with ordered diagonal.

    Same deflation and placement rules as :func:`krein_schur`, using the
    Euclidean inner product and a QR completion.
    """
    A = _as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"A must be square, got {A.shape}")
    n = A.shape[0]
    key, targets = _resolve_ordering(ordering, n)

    W = np.eye(n, dtype=complex)
    for k in range(n, 0, -1):
        active = np.arange(k)
        B = (W.conj().T @ A @ W)[:k, :k]
        evals, evecs = sla.eig(B)
        candidates = []
        for lam, v in zip(evals, evecs.T):
            candidates.append((complex(lam), canonical_phase(v / np.linalg.norm(v))))
        lam, x = _choose(candidates, key, targets, k)
        Q, _ = np.linalg.qr(np.column_stack([x, np.eye(k)]))
        Q = Q[:, :k]
        Q[:, 0] = x
        W = W @ _embed(active, np.column_stack([Q[:, 1:], Q[:, :1]]), n)

    T = W.conj().T @ A @ W
    eigen_order = tuple(complex(z) for z in np.diag(T))
    logger.info("unitary Schur form computed for n=%d (eigenvalues %s)", n, _fmt(eigen_order))
    return KreinSchurResult(W=W, T=T, eigen_order=eigen_order)


def _fmt(values) -> str:
    return ", ".join(f"{z.real:.4g}{z.imag:+.4g}j" for z in values)


# ---------------------------------------------------------------------------
# Krein SVD
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KreinSvdResult:
    """Bogoliubov SVD ``N = V Nhat W^flat``.

    The spectrum of ``N^flat N`` is split into positive, negative and
    non-real (positive imaginary part) eigenvalues, listed once per mode
    (respectively once per mode pair for the non-real class); ``n_zero``
    counts the kernel modes.
    """

    V: np.ndarray
    W: np.ndarray
    Nhat: np.ndarray
    lambdas_plus: tuple[float, ...]
    lambdas_minus: tuple[float, ...]
    lambdas_complex: tuple[complex, ...]
    n_zero: int
    alphas: tuple[float, ...] = field(default=())
    betas: tuple[float, ...] = field(default=())
    residual: float = 0.0

    @property
    def rank(self) -> int:
        return len(self.lambdas_plus) + len(self.lambdas_minus) + 2 * len(self.lambdas_complex)


def complex_pair_parameters(lam: complex) -> tuple[float, float]:
    """``(alpha, beta)`` of the coupling block realizing a non-real eigenvalue."""
    lam = complex(lam)
    total = abs(lam) + lam.real
    alpha = float(np.sqrt(total / 2))
    beta = float(lam.imag / np.sqrt(2 * total))
    return alpha, beta


def complex_pair_block(alpha: float, beta: float) -> np.ndarray:
    """Doubled-up 4x4 coupling ``[[alpha I, -beta s2], [-beta s2#, alpha I]]``."""
    B = np.array([[0, 1j * beta], [-1j * beta, 0]])
    return double_up(alpha * np.eye(2), B)


def _canonical_pair_frame() -> np.ndarray:
    """Eigenvectors of the 4x4 complex-pair block and their partners.

    ``c1`` (eigenvalue ``lam``) and ``c2`` satisfy ``skew_form(c1, c2) = 2j``.
    """
    e_plus = np.array([1, 1j]) / np.sqrt(2)
    e_minus = np.array([1, -1j]) / np.sqrt(2)
    c1 = np.concatenate([e_plus, -1j * e_plus])
    c2 = np.concatenate([e_minus, 1j * e_minus])
    return np.column_stack([c1, c2, conj_partner(c1), conj_partner(c2)])


def _numerical_rank(X: np.ndarray, cutoff: float) -> int:
    if X.size == 0:
        return 0
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > cutoff * sv[0]))


def _projected_pool(Q: np.ndarray) -> list[np.ndarray]:
    P = Q @ Q.conj().T
    return [P[:, i] for i in range(P.shape[0]) if np.linalg.norm(P[:, i]) > 1e-12]


def _symplectic_pairs(basis: np.ndarray, tol: float) -> list[tuple[np.ndarray, np.ndarray]]:
    vecs = [basis[:, i].copy() for i in range(basis.shape[1])]
    if len(vecs) % 2:
        raise UnsupportedSpectrum("non-real eigenspace of odd dimension")
    pairs = []
    while vecs:
        u1 = vecs.pop(0)
        pairing = [abs(skew_form(u1, w)) for w in vecs]
        j = int(np.argmax(pairing))
        if pairing[j] <= tol * np.linalg.norm(u1) * np.linalg.norm(vecs[j]):
            raise UnsupportedSpectrum("skew pairing degenerates on a non-real eigenspace")
        u2 = vecs.pop(j)
        c = skew_form(u1, u2)
        vecs = [w + u1 * (skew_form(u2, w) / c) - u2 * (skew_form(u1, w) / c) for w in vecs]
        pairs.append((u1, u2))
    return pairs


def krein_svd(N, tol: float | None = None) -> KreinSvdResult:
    """Bogoliubov singular value decomposition of a doubled-up ``N``.

    Requires the eigenvalues of ``N^flat N`` to be semisimple and its kernel
    to equal ``ker N``.  Columns of ``W`` are ordered: positive eigenvalues
    (descending), negative (descending magnitude), non-real pairs
    (descending magnitude), kernel.

    Raises:
        StructureError: If ``N`` is not doubled-up.
        NotSemisimple: If ``N^flat N`` has a defective eigenvalue.
        KernelMismatch: If ``ker N^flat N != ker N``.
        UnsupportedSpectrum: If the construction fails to reproduce ``N``.
    """
    N = _as_matrix(N, "N")
    _check_even(N, "N")
    if not is_doubled_up(N):
        raise StructureError("krein_svd needs a doubled-up matrix")
    tol = config.NEUTRAL_TOL if tol is None else tol
    m, n = N.shape[0] // 2, N.shape[1] // 2
    gram = flat_adjoint(N) @ N
    cutoff = config.RANK_CUTOFF

    evals = sla.eigvals(gram) if n else np.zeros(0, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(evals), initial=0.0)))
    ctol = config.CLUSTER_TOL * scale

    plus, minus, cplx = [], [], []
    zero_size = 0
    for idx in _cluster(evals, config.CLUSTER_TOL):
        mu = complex(np.mean(evals[idx]))
        if abs(mu) <= ctol:
            mu = 0.0
        elif abs(mu.imag) <= ctol:
            mu = complex(mu.real)
        shifted = gram - mu * np.eye(2 * n)
        nullity = 2 * n - _numerical_rank(shifted, cutoff)
        if mu == 0.0:
            zero_size = len(idx)
            kernel_n = 2 * n - _numerical_rank(N, cutoff)
            if kernel_n != nullity:
                raise KernelMismatch(
                    f"dim ker N = {kernel_n} but dim ker N^flat N = {nullity}"
                )
        if nullity != len(idx):
            raise NotSemisimple(
                f"eigenvalue {mu:.6g} of N^flat N has multiplicity {len(idx)} "
                f"but only {nullity} eigenvectors"
            )
        if mu == 0.0:
            continue
        basis = sla.null_space(shifted, rcond=cutoff)
        if mu.imag == 0.0:
            (plus if mu.real > 0 else minus).append((mu.real, basis))
        elif mu.imag > 0:
            cplx.append((mu, basis))

    plus.sort(key=lambda item: -item[0])
    minus.sort(key=lambda item: item[0])
    cplx.sort(key=lambda item: -abs(item[0]))

    xs: list[np.ndarray] = []
    lam_plus: list[float] = []
    lam_minus: list[float] = []
    lam_cplx: list[complex] = []
    try:
        for group, store in ((plus, lam_plus), (minus, lam_minus)):
            for mu, basis in group:
                d = basis.shape[1] // 2
                if basis.shape[1] % 2:
                    raise UnsupportedSpectrum(f"real eigenvalue {mu:.6g} has odd multiplicity")
                frame = krein_gram_schmidt([], _projected_pool(basis), tol, size=d)
                xs.extend(canonical_phase(frame[:, i]) for i in range(d))
                store.extend([mu] * d)

        frame_inv = np.linalg.inv(_canonical_pair_frame())
        for mu, basis in cplx:
            for u1, u2 in _symplectic_pairs(basis, tol):
                factor = np.sqrt(2j / skew_form(u1, u2))
                p1, p2 = factor * u1, factor * u2
                G = np.column_stack([p1, p2, conj_partner(p1), conj_partner(p2)])
                block = G @ frame_inv
                xs.extend([block[:, 0], block[:, 1]])
                lam_cplx.append(mu)

        W = krein_gram_schmidt(xs, list(np.eye(2 * n, dtype=complex)), tol) if n else np.zeros((0, 0))
    except DegenerateComplement as exc:
        raise UnsupportedSpectrum(f"could not build a J-orthonormal frame: {exc}") from exc

    alphas, betas = zip(*(complex_pair_parameters(mu) for mu in lam_cplx)) if lam_cplx else ((), ())
    r = len(lam_plus) + len(lam_minus) + 2 * len(lam_cplx)
    if r > m:
        raise UnsupportedSpectrum(f"rank {r} exceeds the number of ports {m}")

    bar1 = np.zeros((r, r), dtype=complex)
    bar2 = np.zeros((r, r), dtype=complex)
    p = 0
    for mu in lam_plus:
        bar1[p, p] = np.sqrt(mu)
        p += 1
    for mu in lam_minus:
        bar2[p, p] = np.sqrt(-mu)
        p += 1
    for alpha, beta in zip(alphas, betas):
        pair = complex_pair_block(alpha, beta)
        bar1[p:p + 2, p:p + 2], bar2[p:p + 2, p:p + 2] = blocks(pair)
        p += 2
    hat1 = np.zeros((m, n), dtype=complex)
    hat2 = np.zeros((m, n), dtype=complex)
    hat1[:r, :r], hat2[:r, :r] = bar1, bar2
    Nhat = double_up(hat1, hat2)

    try:
        if r:
            cols = np.r_[0:r, n:n + r]
            V_range = (N @ W)[:, cols] @ np.linalg.inv(double_up(bar1, bar2))
            fixed = [V_range[:, i] for i in range(r)]
        else:
            fixed = []
        V = krein_gram_schmidt(fixed, list(np.eye(2 * m, dtype=complex)), tol) if m else np.zeros((0, 0))
    except (DegenerateComplement, np.linalg.LinAlgError) as exc:
        raise UnsupportedSpectrum(f"could not complete the output frame: {exc}") from exc

    residual = float(np.max(np.abs(N - V @ Nhat @ flat_adjoint(W)), initial=0.0))
    relative = residual / max(1.0, float(np.max(np.abs(N), initial=0.0)))
    if relative > config.RECONSTRUCTION_TOL:
        raise UnsupportedSpectrum(
            f"Krein SVD reconstruction residual {relative:.3e} exceeds "
            f"{config.RECONSTRUCTION_TOL:.1e}"
        )

    logger.info(
        "Krein SVD: r+=%d r-=%d rc=%d kernel=%d residual=%.2e",
        len(lam_plus), len(lam_minus), len(lam_cplx), n - r, relative,
    )
    if zero_size != 2 * (n - r):
        logger.warning("kernel multiplicity %d does not match %d kernel modes", zero_size, n - r)
    return KreinSvdResult(
        V=V,
        W=W,
        Nhat=Nhat,
        lambdas_plus=tuple(lam_plus),
        lambdas_minus=tuple(lam_minus),
        lambdas_complex=tuple(lam_cplx),
        n_zero=n - r,
        alphas=tuple(alphas),
        betas=tuple(betas),
        residual=relative,
    )


# ---------------------------------------------------------------------------
# Cayley transforms
# ---------------------------------------------------------------------------


def _singular(A: np.ndarray, limit: float | None) -> bool:
    limit = config.SINGULAR_COND if limit is None else limit
    if A.size == 0:
        return False
    cond = np.linalg.cond(A)
    return not np.isfinite(cond) or cond > limit


def cayley(R, cond_limit: float | None = None) -> np.ndarray:
    """``X = (I - R)^{-1} (I + R)``.

    Unitary ``R`` gives skew-Hermitian ``X``; Bogoliubov ``R`` gives a
    doubled-up flat-skew-Hermitian ``X``.

    Raises:
        UnitEigenvalue: If ``I - R`` is numerically singular.
    """
    R = _as_matrix(R, "R")
    eye = np.eye(R.shape[0])
    if _singular(eye - R, cond_limit):
        raise UnitEigenvalue("R has an eigenvalue at 1, so I - R is singular")
    return np.linalg.solve(eye - R, eye + R)


def inverse_cayley(X, cond_limit: float | None = None) -> np.ndarray:
    """``R = (X - I)(X + I)^{-1}``.

    Always defined for skew-Hermitian ``X``; a flat-skew-Hermitian ``X`` may
    hit a singular ``X + I``.

    Raises:
        CayleySingular: If ``X + I`` is numerically singular.
    """
    X = _as_matrix(X, "X")
    eye = np.eye(X.shape[0])
    if _singular(X + eye, cond_limit):
        raise CayleySingular(
            "X + I is singular; choose different cavity detunings or interconnection couplings"
        )
    return np.linalg.solve((X + eye).T, (X - eye).T).T
