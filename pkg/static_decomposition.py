"""Static optical networks: device matrices and their factorization.

Passive networks (unitary ``U``) are factored into beam splitters and
phase shifters by triangular nulling.  Active networks (Bogoliubov ``R``)
go through the Bloch-Messiah reduction::

    R = diag(U2, U2#) [[cosh X, sinh X], [sinh X, cosh X]] diag(U1, U1#)

and then each of ``U1`` and ``U2`` is factored the passive way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.linalg import block_diag, sqrtm

from config import config
from errors import DimensionError, StructureError
from krein_linalg import blocks, double_up, is_bogoliubov, is_unitary
from logger import get_logger

logger = get_logger(__name__)


# ---------------------------------------------------------------------------
# Elementary devices
# ---------------------------------------------------------------------------


def phase_shifter_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(1j * theta)]])


def beam_splitter_matrix(theta: float, phi: float = 0.0, psi: float = 0.0, zeta: float = 0.0) -> np.ndarray:
    """2x2 unitary of a beam splitter with mixing angle ``theta``.

    ``phi`` and ``psi`` are the input and output phase differences, ``zeta``
    a common output phase.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.exp(1j * zeta) * np.array(
        [
            [np.exp(0.5j * (phi + psi)) * c, np.exp(0.5j * (psi - phi)) * s],
            [-np.exp(0.5j * (phi - psi)) * s, np.exp(-0.5j * (phi + psi)) * c],
        ]
    )


def squeezer_matrix(x: float, phi: float = 0.0, psi: float = 0.0) -> np.ndarray:
    """2x2 Bogoliubov matrix of a squeezer with squeezing parameter ``x``."""
    return np.array(
        [
            [np.exp(1j * (phi + psi)) * np.cosh(x), np.exp(1j * (psi - phi)) * np.sinh(x)],
            [np.exp(1j * (phi - psi)) * np.sinh(x), np.exp(-1j * (phi + psi)) * np.cosh(x)],
        ]
    )


def elementary_matrix(kind: str, **params) -> np.ndarray:
    """Dispatch on ``kind`` in ``{"phase", "beamsplitter", "squeezer"}``."""
    makers = {
        "phase": phase_shifter_matrix,
        "beamsplitter": beam_splitter_matrix,
        "squeezer": squeezer_matrix,
    }
    try:
        maker = makers[kind]
    except KeyError:
        raise ValueError(f"unknown device kind {kind!r}; expected one of {sorted(makers)}")
    return maker(**params)


@dataclass(frozen=True)
class PhaseShift:
    channel: int
    theta: float

    kind = "phase"

    def local_matrix(self) -> np.ndarray:
        return phase_shifter_matrix(self.theta)

    @property
    def channels(self) -> tuple[int, ...]:
        return (self.channel,)


@dataclass(frozen=True)
class BeamSplit:
    pair: tuple[int, int]
    theta: float
    phi: float = 0.0
    psi: float = 0.0
    zeta: float = 0.0

    kind = "beamsplitter"

    def local_matrix(self) -> np.ndarray:
        return beam_splitter_matrix(self.theta, self.phi, self.psi, self.zeta)

    @property
    def channels(self) -> tuple[int, ...]:
        return tuple(self.pair)


@dataclass(frozen=True)
class Squeeze:
    channel: int
    x: float
    phi: float = 0.0
    psi: float = 0.0

    kind = "squeezer"

    def local_matrix(self) -> np.ndarray:
        return squeezer_matrix(self.x, self.phi, self.psi)

    @property
    def channels(self) -> tuple[int, ...]:
        return (self.channel,)


Element = Union[PhaseShift, BeamSplit, Squeeze]


def embed_element(element: Element, n_channels: int, doubled: bool) -> np.ndarray:
    """Full network matrix of one element; other channels pass through."""
    idx = list(element.channels)
    local = element.local_matrix()
    if not doubled:
        if isinstance(element, Squeeze):
            raise StructureError("squeezers only appear in active (doubled-up) networks")
        full = np.eye(n_channels, dtype=complex)
        full[np.ix_(idx, idx)] = local
        return full
    full = np.eye(2 * n_channels, dtype=complex)
    if isinstance(element, Squeeze):
        rows = [element.channel, n_channels + element.channel]
        full[np.ix_(rows, rows)] = local
        return full
    rows = idx + [n_channels + i for i in idx]
    full[np.ix_(rows, rows)] = block_diag(local, local.conj())
    return full


@dataclass(frozen=True)
class StaticDecomposition:
    """Element list of a static network, in the order light traverses it.

    ``factors`` holds ``(U1, x, U2)`` for the general kind.
    """

    kind: str
    n_channels: int
    elements: tuple[Element, ...] = field(default=())
    factors: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @property
    def doubled(self) -> bool:
        return self.kind == "general"

    def matrix(self) -> np.ndarray:
        dim = self.n_channels * (2 if self.doubled else 1)
        result = np.eye(dim, dtype=complex)
        for element in self.elements:
            result = embed_element(element, self.n_channels, self.doubled) @ result
        return result

    def count(self, kind: str) -> int:
        return sum(1 for e in self.elements if e.kind == kind)


# ---------------------------------------------------------------------------
# Passive networks
# ---------------------------------------------------------------------------


def _beam_split_from_su2(pair: tuple[int, int], p: complex, q: complex) -> BeamSplit:
    # [[p, q], [-q*, p*]] with |p|^2 + |q|^2 = 1
    arg_p = float(np.angle(p)) if abs(p) > 1e-15 else 0.0
    arg_q = float(np.angle(q)) if abs(q) > 1e-15 else 0.0
    theta = 2 * float(np.arctan2(abs(q), abs(p)))
    return BeamSplit(pair=pair, theta=theta, phi=arg_p - arg_q, psi=arg_p + arg_q)


def reck_decompose(U, tol: float | None = None) -> StaticDecomposition:
    """Factor a unitary into beam splitters on neighbouring channels and phase shifts.

    Below-diagonal entries are nulled column by column from the bottom, each
    by an SU(2) rotation of rows ``(row - 1, row)``.  What is left is
    diagonal and becomes the phase shifters, which light meets first.

    Raises:
        StructureError: If ``U`` is not unitary.
    """
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionError(f"U must be square, got {U.shape}")
    if not is_unitary(U, tol):
        raise StructureError("reck_decompose needs a unitary matrix")
    m = U.shape[0]
    work = U.copy()
    rotations: list[BeamSplit] = []
    for col in range(m - 1):
        for row in range(m - 1, col, -1):
            a, b = work[row - 1, col], work[row, col]
            if abs(b) <= 1e-14:
                continue
            rho = np.hypot(abs(a), abs(b))
            T = np.array([[a.conj(), b.conj()], [-b, a]]) / rho
            work[[row - 1, row], :] = T @ work[[row - 1, row], :]
            # the element undoing T is T^dag = [[a, -b*], [b, a*]] / rho
            rotations.append(_beam_split_from_su2((row - 1, row), a / rho, -b.conj() / rho))

    phases = [PhaseShift(i, float(np.angle(work[i, i]))) for i in range(m)]
    phases = [p for p in phases if abs(p.theta) > 1e-14]
    elements = tuple(phases + rotations[::-1])
    logger.debug("Reck: %d beam splitters, %d phase shifters on %d channels",
                 len(rotations), len(phases), m)
    return StaticDecomposition(kind="passive", n_channels=m, elements=elements)


# ---------------------------------------------------------------------------
# Active networks
# ---------------------------------------------------------------------------


def takagi(Z, tol: float = 1e-10, rounding: int = 10) -> tuple[np.ndarray, np.ndarray]:
    r"""Autonne-Takagi factorization ``Z = Q diag(t) Q^T`` of a complex symmetric matrix.

    Singular values equal after rounding to ``rounding`` decimals are treated
    as degenerate; their subspaces are fixed with a matrix square root.

    Args:
        Z (array[complex]): square symmetric matrix
        tol (float): symmetry tolerance, relative to ``max(1, ||Z||)``
        rounding (int): decimals used to detect degenerate singular values

    Returns:
        tuple[array, array]: ``(t, Q)`` with ``t`` descending and ``Q`` unitary.
    """
    Z = np.asarray(Z, dtype=complex)
    n, m = Z.shape
    if n != m:
        raise DimensionError("The input matrix must be square")
    if np.linalg.norm(Z - Z.T) > tol * max(1.0, np.linalg.norm(Z)):
        raise StructureError("The input matrix is not symmetric")

    # real input: eigendecomposition
    if np.all(Z.imag == 0):
        values, vectors = np.linalg.eigh(Z.real)
        phase = np.ones(values.size, dtype=complex)
        phase[values < 0] = 1j
        Q = vectors * phase[np.newaxis, :]
        values = np.abs(values)
        order = np.argsort(-values, kind="stable")
        return values[order], Q[:, order]

    v, values, wh = np.linalg.svd(Z)
    w = wh.T.conj()
    rounded = np.round(values, rounding)
    _, first_seen, counts = np.unique(-rounded, return_index=True, return_counts=True)
    pieces = []
    for start, count in sorted(zip(first_seen, counts)):
        span = slice(start, start + count)
        pieces.append(sqrtm(v[:, span].T @ w[:, span]))
    Q = v @ np.conj(block_diag(*pieces))
    return values, Q


def _echelon_basis(block: np.ndarray, real: bool, rel: float = 1e-9) -> np.ndarray:
    """Recombine the orthonormal columns of ``block`` into column echelon form.

    Each column gets its first significant entry, the pivot, real and
    positive, and every later column is zero at that row.  The result only
    depends on the span.  With ``real`` the recombination is real orthogonal
    and pivots are searched in ``Re`` rows first, then ``Im`` rows.
    """
    work = np.vstack([block.real, block.imag]) if real else block.astype(complex)
    k = block.shape[1]
    O = np.eye(k, dtype=work.dtype)
    col = 0
    for row in range(work.shape[0]):
        if col == k:
            break
        tail = work[row, col:]
        size = np.linalg.norm(tail)
        if size <= rel:
            continue
        c = tail.conj() / size
        H, _ = np.linalg.qr(np.column_stack([c, np.eye(k - col, dtype=work.dtype)]))
        H[:, 0] = c
        work[:, col:] = work[:, col:] @ H
        O[:, col:] = O[:, col:] @ H
        col += 1
    return block @ O


def _canonical_takagi(x: np.ndarray, Q: np.ndarray, rounding: int = 10) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(-np.round(x, rounding), kind="stable")
    x, Q = x[order], Q[:, order]
    keys = np.round(x, rounding)
    start = 0
    while start < x.size:
        stop = start + int(np.sum(keys[start:] == keys[start]))
        Q[:, start:stop] = _echelon_basis(Q[:, start:stop], real=keys[start] > 0)
        start = stop
    return x, Q


def bloch_messiah(R, tol: float | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor a Bogoliubov matrix into passive, squeezing and passive stages.

    Returns:
        tuple[array, array, array]: ``(U2, x, U1)`` with
            ``R = diag(U2, U2#) [[cosh X, sinh X], [sinh X, cosh X]] diag(U1, U1#)``
            and ``x`` non-negative, descending.  Values below the clamp are
            exactly zero, and a passive ``R`` gives ``U1 = I``.

    Raises:
        StructureError: If ``R`` is not Bogoliubov.
    """
    R = np.asarray(R, dtype=complex)
    if not is_bogoliubov(R, tol):
        raise StructureError("bloch_messiah needs a Bogoliubov matrix")
    m = R.shape[0] // 2
    R1, R2 = blocks(R)
    Z = np.linalg.solve(R1, R2)
    Z = (Z + Z.T) / 2
    clamp = config.SQUEEZE_CLAMP
    if np.max(np.abs(Z), initial=0.0) <= clamp:
        return R1.copy(), np.zeros(m), np.eye(m, dtype=complex)

    t, Q = takagi(Z)
    t = np.clip(t, 0.0, 1.0 - 1e-16)
    x = np.arctanh(t)
    x[x < clamp] = 0.0
    x, Q = _canonical_takagi(x, Q)
    U1 = Q.conj().T
    U2 = R1 @ Q / np.cosh(x)[np.newaxis, :]
    logger.debug("Bloch-Messiah squeezing %s", np.array2string(x, precision=4))
    return U2, x, U1


def decompose_static(R, tol: float | None = None, kind: str | None = None) -> StaticDecomposition:
    """Element list for a unitary (passive) or Bogoliubov (general) network matrix.

    Without ``kind`` the structure decides; a matrix that is both unitary
    and Bogoliubov (such as ``I_2``) is then treated as general.
    """
    R = np.asarray(R, dtype=complex)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"static network matrix must be square, got {R.shape}")
    if kind == "passive":
        return reck_decompose(R, tol)
    if kind == "general" or (R.shape[0] % 2 == 0 and is_bogoliubov(R, tol)):
        m = R.shape[0] // 2
        U2, x, U1 = bloch_messiah(R, tol)
        first = reck_decompose(U1, tol).elements
        squeezers = tuple(Squeeze(i, float(xi)) for i, xi in enumerate(x) if xi > 0)
        last = reck_decompose(U2, tol).elements
        return StaticDecomposition(
            kind="general",
            n_channels=m,
            elements=first + squeezers + last,
            factors=(U1, x, U2),
        )
    if is_unitary(R, tol):
        return reck_decompose(R, tol)
    raise StructureError("static network matrix is neither unitary nor Bogoliubov")


def passive_embedding(U) -> np.ndarray:
    """``diag(U, U#)``, the doubled-up form of a passive network."""
    U = np.asarray(U, dtype=complex)
    return double_up(U, np.zeros_like(U))
