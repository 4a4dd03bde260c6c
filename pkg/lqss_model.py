"""Linear quantum stochastic systems: parameter triples and their algebra.

A system is described by its scattering matrix ``S``, coupling matrix ``N``
and Hamiltonian matrix ``M``.  Passive systems use plain ``m x m``,
``m x n`` and ``n x n`` matrices; general systems use the doubled-up
``2m x 2m``, ``2m x 2n`` and ``2n x 2n`` forms.  The dynamics are::

    da = F a dt - N^flat S dU,   dY = N a dt + S dU,
    F  = -i J M - 1/2 N^flat N

(with ``J -> I`` and ``flat -> dagger`` for passive systems), and the
transfer function is ``G(s) = [I - N (sI - F)^{-1} N^flat] S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import linalg as sla

from config import config
from errors import AlgebraicLoop, DimensionError, ParameterError, PoleAt, StructureError, ValidationError
from krein_linalg import (
    blocks,
    bogoliubov_residual,
    double_up,
    doubled_direct_sum,
    flat_adjoint,
    is_bogoliubov,
    signature,
    unitarity_residual,
)
from logger import get_logger

logger = get_logger(__name__)


def _matrix(X, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        X = X.reshape((rows or 0, cols or 0)) if X.size == 0 else np.atleast_2d(X)
    return X


@dataclass(frozen=True)
class PassiveLqss:
    """Passive system (annihilation operators only)."""

    S: np.ndarray
    N: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        M = _matrix(self.M)
        N = _matrix(self.N, 0, M.shape[0])
        S = _matrix(self.S, N.shape[0], N.shape[0])
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "M", M)

    @property
    def n_modes(self) -> int:
        return self.M.shape[0]

    @property
    def n_io(self) -> int:
        return self.S.shape[0]

    @property
    def passive(self) -> bool:
        return True

    def generator(self) -> np.ndarray:
        """``F = -i M - 1/2 N^dag N``."""
        return -1j * self.M - 0.5 * self.N.conj().T @ self.N


@dataclass(frozen=True)
class GeneralLqss:
    """General system in doubled-up form."""

    S: np.ndarray
    N: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        M = _matrix(self.M)
        N = _matrix(self.N, 0, M.shape[0])
        S = _matrix(self.S, N.shape[0], N.shape[0])
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "M", M)

    @classmethod
    def from_blocks(cls, S1, S2, N1, N2, M1, M2) -> "GeneralLqss":
        return cls(S=double_up(S1, S2), N=double_up(N1, N2), M=double_up(M1, M2))

    @property
    def n_modes(self) -> int:
        return self.M.shape[0] // 2

    @property
    def n_io(self) -> int:
        return self.S.shape[0] // 2

    @property
    def passive(self) -> bool:
        return False

    def generator(self) -> np.ndarray:
        """``F = -i J M - 1/2 N^flat N``."""
        J = signature(self.n_modes)
        return -1j * J @ self.M - 0.5 * flat_adjoint(self.N) @ self.N


Lqss = Union[PassiveLqss, GeneralLqss]


@dataclass(frozen=True)
class CavityPort:
    """One port of a cavity: passive coupling ``kappa`` and active coupling ``g``."""

    kappa: float = 0.0
    phi: float = 0.0
    g: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class CavitySpec:
    """Single-mode cavity with detuning and a list of ports."""

    detuning: float
    ports: tuple[CavityPort, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))

    @property
    def decay(self) -> float:
        """``gamma = sum(kappa_i - g_i)``."""
        return float(sum(p.kappa - p.g for p in self.ports))

    @property
    def is_passive(self) -> bool:
        return all(p.g == 0.0 for p in self.ports)


@dataclass(frozen=True)
class Violation:
    """One failed structural check and its max-norm residual."""

    check: str
    residual: float
    tolerance: float

    def __str__(self) -> str:
        return f"{self.check}: residual {self.residual:.3e} > {self.tolerance:.1e}"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _shape_violations(sys: Lqss) -> list[Violation]:
    scale = 1 if sys.passive else 2
    n, m = sys.M.shape[0], sys.S.shape[0]
    problems = []
    if sys.M.shape[0] != sys.M.shape[1]:
        problems.append(f"M must be square, got {sys.M.shape}")
    if sys.S.shape[0] != sys.S.shape[1]:
        problems.append(f"S must be square, got {sys.S.shape}")
    if sys.N.shape != (m, n):
        problems.append(f"N must be {m}x{n}, got {sys.N.shape[0]}x{sys.N.shape[1]}")
    if scale == 2 and (n % 2 or m % 2):
        problems.append(f"doubled-up dimensions must be even, got M {n}, S {m}")
    return [Violation(f"shape: {p}", float("inf"), 0.0) for p in problems]


def _mirror_residual(X: np.ndarray) -> float:
    if X.size == 0:
        return 0.0
    X1, X2 = blocks(X)
    return float(np.max(np.abs(X - double_up(X1, X2))))


def validate(sys: Lqss, tol: float | None = None) -> list[Violation]:
    """List the structural invariants ``sys`` violates.

    Passive: ``M`` Hermitian, ``S`` unitary.  General: additionally ``M``
    and ``N`` doubled-up and ``S`` Bogoliubov.  An empty list means valid.
    """
    problems = _shape_violations(sys)
    if problems:
        return problems
    base = config.STRUCTURE_TOL if tol is None else tol

    def _check(name: str, residual: float, scale_of: np.ndarray) -> None:
        limit = base * max(1.0, float(np.max(np.abs(scale_of), initial=0.0)))
        if not residual <= limit:
            problems.append(Violation(name, residual, limit))

    herm = float(np.max(np.abs(sys.M - sys.M.conj().T), initial=0.0))
    _check("Hermiticity of M", herm, sys.M)
    if sys.passive:
        if sys.S.size:
            _check("unitarity of S", unitarity_residual(sys.S), sys.S)
    else:
        _check("doubled-up M", _mirror_residual(sys.M), sys.M)
        _check("doubled-up N", _mirror_residual(sys.N), sys.N)
        _check("doubled-up S", _mirror_residual(sys.S), sys.S)
        if sys.S.size:
            _check("Bogoliubov S", bogoliubov_residual(sys.S), sys.S)
    return problems


def require_valid(sys: Lqss, tol: float | None = None, what: str = "system") -> None:
    """Raise :class:`ValidationError` carrying the report unless ``sys`` is valid."""
    report = validate(sys, tol)
    if report:
        raise ValidationError(f"{what} is invalid: " + "; ".join(map(str, report)), report)


# ---------------------------------------------------------------------------
# Conversions and evaluation
# ---------------------------------------------------------------------------


def embed_passive(sys: PassiveLqss) -> GeneralLqss:
    """Doubled-up form of a passive system (all second blocks zero)."""
    require_valid(sys, what="passive system")
    zero = np.zeros_like
    return GeneralLqss(
        S=double_up(sys.S, zero(sys.S)),
        N=double_up(sys.N, zero(sys.N)),
        M=double_up(sys.M, zero(sys.M)),
    )


def as_general(sys: Lqss) -> GeneralLqss:
    return embed_passive(sys) if isinstance(sys, PassiveLqss) else sys


def _adjoint(sys: Lqss, X: np.ndarray) -> np.ndarray:
    return X.conj().T if sys.passive else flat_adjoint(X)


def transfer_function(sys: Lqss, s: complex, cond_limit: float | None = None) -> np.ndarray:
    """Evaluate ``G(s) = [I - N (sI - F)^{-1} N^flat] S``.

    Passive systems give the ``m x m`` matrix, general ones the doubled-up
    ``2m x 2m`` matrix.

    Raises:
        PoleAt: If ``sI - F`` has condition number above the pole limit.
    """
    s = complex(s)
    if sys.M.shape[0] == 0:
        return sys.S.copy()
    limit = config.POLE_COND if cond_limit is None else cond_limit
    F = sys.generator()
    resolvent = s * np.eye(F.shape[0]) - F
    cond = np.linalg.cond(resolvent)
    if not np.isfinite(cond) or cond > limit:
        raise PoleAt(s)
    inner = np.linalg.solve(resolvent, _adjoint(sys, sys.N))
    return (np.eye(sys.S.shape[0]) - sys.N @ inner) @ sys.S


def state_transform(sys: GeneralLqss, V) -> GeneralLqss:
    """Change of state coordinates ``a -> V a``.

    Returns ``(S, N V^-1, V^-dag M V^-1)`` with ``V^-1 = V^flat``.

    Raises:
        StructureError: If ``V`` is not Bogoliubov.
    """
    V = np.asarray(V, dtype=complex)
    if V.shape != sys.M.shape:
        raise DimensionError(f"V must be {sys.M.shape}, got {V.shape}")
    if not is_bogoliubov(V):
        raise StructureError("state transformation must be Bogoliubov to preserve the structure")
    Vinv = flat_adjoint(V)
    M = Vinv.conj().T @ sys.M @ Vinv
    return GeneralLqss(S=sys.S, N=sys.N @ Vinv, M=(M + M.conj().T) / 2)


def cavity_system(spec: CavitySpec) -> GeneralLqss:
    """Single-mode cavity with one system port per entry of ``spec.ports``.

    Raises:
        ParameterError: If a coupling coefficient is negative.
    """
    for i, port in enumerate(spec.ports):
        if port.kappa < 0 or port.g < 0:
            raise ParameterError(
                f"port {i}: couplings must be non-negative (kappa={port.kappa}, g={port.g})"
            )
    m = len(spec.ports)
    N1 = np.array([[np.exp(1j * p.phi) * np.sqrt(p.kappa)] for p in spec.ports], dtype=complex)
    N2 = np.array([[np.exp(1j * p.theta) * np.sqrt(p.g)] for p in spec.ports], dtype=complex)
    N1 = N1.reshape(m, 1)
    N2 = N2.reshape(m, 1)
    return GeneralLqss(
        S=np.eye(2 * m, dtype=complex),
        N=double_up(N1, N2),
        M=np.diag([spec.detuning, spec.detuning]).astype(complex),
    )


def static_system(S, passive: bool = False) -> Lqss:
    """System without modes whose transfer function is ``S``."""
    S = np.asarray(S, dtype=complex)
    sys_type = PassiveLqss if passive else GeneralLqss
    return sys_type(S=S, N=np.zeros((S.shape[0], 0)), M=np.zeros((0, 0)))


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------


def _join_columns(sys: Lqss, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Place two per-subsystem matrices side by side in the composite mode order."""
    if sys.passive:
        return np.hstack([first, second])
    a1, a2 = blocks(first)
    b1, b2 = blocks(second)
    return double_up(np.hstack([a1, b1]), np.hstack([a2, b2]))


def _join_square(sys: Lqss, uu, ud, du, dd) -> np.ndarray:
    if sys.passive:
        return np.block([[uu, ud], [du, dd]])
    parts = [blocks(x) for x in (uu, ud, du, dd)]
    first = np.block([[parts[0][0], parts[1][0]], [parts[2][0], parts[3][0]]])
    second = np.block([[parts[0][1], parts[1][1]], [parts[2][1], parts[3][1]]])
    return double_up(first, second)


def series(downstream: Lqss, upstream: Lqss) -> Lqss:
    """Cascade: outputs of ``upstream`` drive the inputs of ``downstream``.

    Modes are stacked upstream first.  The composite has ``S = S_d S_u``,
    ``N = [S_d N_u, N_d]`` and a block-lower-triangular generator with
    off-diagonal block ``-N_d^flat S_d N_u``, so ``G = G_d G_u``.
    """
    if downstream.passive != upstream.passive:
        downstream, upstream = as_general(downstream), as_general(upstream)
    if downstream.S.shape != upstream.S.shape:
        raise DimensionError(
            f"port counts differ: downstream {downstream.n_io}, upstream {upstream.n_io}"
        )
    sys_type = type(downstream)
    Sd, Nd, Md = downstream.S, downstream.N, downstream.M
    Su, Nu, Mu = upstream.S, upstream.N, upstream.M
    coupled = Sd @ Nu
    if downstream.passive:
        cross = -0.5j * Nd.conj().T @ coupled
    else:
        cross = -0.5j * Nd.conj().T @ signature(downstream.n_io) @ coupled
    N = _join_columns(downstream, coupled, Nd)
    M = _join_square(downstream, Mu, cross.conj().T, cross, Md)
    return sys_type(S=Sd @ Su, N=N, M=(M + M.conj().T) / 2)


def series_chain(systems: Sequence[Lqss]) -> Lqss:
    """Compose ``systems`` in light order (first element sees the input first)."""
    if not systems:
        raise ValueError("series_chain needs at least one system")
    result = systems[0]
    for sys in systems[1:]:
        result = series(sys, result)
    return result


def concatenate(a: Lqss, b: Lqss) -> Lqss:
    """Direct sum: ports and modes of ``a`` first, then those of ``b``."""
    if a.passive != b.passive:
        a, b = as_general(a), as_general(b)
    if a.passive:
        return PassiveLqss(
            S=sla.block_diag(a.S, b.S),
            N=sla.block_diag(a.N, b.N),
            M=sla.block_diag(a.M, b.M),
        )
    return GeneralLqss(
        S=doubled_direct_sum(a.S, b.S),
        N=doubled_direct_sum(a.N, b.N),
        M=doubled_direct_sum(a.M, b.M),
    )


def concatenate_all(systems: Iterable[Lqss]) -> Lqss:
    systems = list(systems)
    if not systems:
        raise ValueError("concatenate_all needs at least one system")
    result = systems[0]
    for sys in systems[1:]:
        result = concatenate(result, sys)
    return result


def embed_channels(sys: Lqss, channels: Sequence[int], total: int) -> Lqss:
    """Widen ``sys`` to ``total`` ports; its ports map to ``channels``, others pass through."""
    channels = list(channels)
    m = sys.n_io
    if len(channels) != m or len(set(channels)) != m:
        raise DimensionError(f"need {m} distinct channels, got {channels}")
    if any(c < 0 or c >= total for c in channels):
        raise DimensionError(f"channels {channels} out of range for {total} ports")
    n_states = sys.M.shape[0]
    if sys.passive:
        S = np.eye(total, dtype=complex)
        S[np.ix_(channels, channels)] = sys.S
        N = np.zeros((total, n_states), dtype=complex)
        N[channels, :] = sys.N
        return PassiveLqss(S=S, N=N, M=sys.M)
    rows = channels + [total + c for c in channels]
    S = np.eye(2 * total, dtype=complex)
    S[np.ix_(rows, rows)] = sys.S
    N = np.zeros((2 * total, n_states), dtype=complex)
    N[rows, :] = sys.N
    return GeneralLqss(S=S, N=N, M=sys.M)


def _doubled_indices(sys: Lqss, ports: Sequence[int]) -> list[int]:
    ports = list(ports)
    return ports if sys.passive else ports + [sys.n_io + p for p in ports]


def close_feedback(sys: Lqss, interconnect_ports: Sequence[int], R, cond_limit: float | None = None) -> Lqss:
    """Feed the outputs of ``interconnect_ports`` back to their inputs through ``R``.

    With ``u_I = R y_I`` and ``Q = (I - R S_II)^{-1} R`` the reduced system is
    ``S' = S_EE + S_EI Q S_IE``, ``N' = N_E + S_EI Q N_I`` and
    ``F' = F - (N^flat S)_{:, I} Q N_I``; the Hamiltonian is recovered from
    ``F'``.  For ``S_II = I`` this is the ``(I - R)^{-1} R = (X - I)/2``
    relation of the Cayley transform.

    Raises:
        DimensionError: If the port set or ``R`` do not fit ``sys``.
        AlgebraicLoop: If ``I - R S_II`` is singular.
    """
    ports = sorted(set(int(p) for p in interconnect_ports))
    if any(p < 0 or p >= sys.n_io for p in ports):
        raise DimensionError(f"interconnection ports {ports} out of range for {sys.n_io} ports")
    R = np.asarray(R, dtype=complex)
    inner = _doubled_indices(sys, ports)
    outer = _doubled_indices(sys, [p for p in range(sys.n_io) if p not in ports])
    if R.shape != (len(inner), len(inner)):
        raise DimensionError(f"R must be {len(inner)}x{len(inner)}, got {R.shape}")

    S, N = sys.S, sys.N
    S_ii = S[np.ix_(inner, inner)]
    loop = np.eye(len(inner)) - R @ S_ii
    limit = config.SINGULAR_COND if cond_limit is None else cond_limit
    cond = np.linalg.cond(loop) if loop.size else 1.0
    if not np.isfinite(cond) or cond > limit:
        raise AlgebraicLoop("I - R S_II is singular; the feedback loop is ill-posed")
    Q = np.linalg.solve(loop, R) if loop.size else R

    S_ee = S[np.ix_(outer, outer)]
    S_ei = S[np.ix_(outer, inner)]
    S_ie = S[np.ix_(inner, outer)]
    N_e, N_i = N[outer, :], N[inner, :]
    S_new = S_ee + S_ei @ Q @ S_ie
    N_new = N_e + S_ei @ Q @ N_i

    F = sys.generator()
    drive = _adjoint(sys, N) @ S
    F_new = F - drive[:, inner] @ Q @ N_i
    sys_type = type(sys)
    damping = 0.5 * _adjoint(sys, N_new) @ N_new if N_new.size else np.zeros_like(F)
    if sys.passive:
        M_new = 1j * (F_new + damping)
    else:
        M_new = 1j * signature(sys.n_modes) @ (F_new + damping)
    logger.debug("closed %d interconnection ports; %d ports remain", len(ports), sys.n_io - len(ports))
    return sys_type(S=S_new, N=N_new, M=(M_new + M_new.conj().T) / 2)
