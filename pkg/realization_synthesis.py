"""Synthesis of cavity networks realizing a given system.

Two families of netlists are produced:

* cascades: a static network followed by a chain of single-mode cavities,
  one per mode, each with a port on every channel;
* feedback networks: a bank of cavities whose interconnection ports are
  closed through a static gain ``R``, sandwiched between a pre-network and
  a post-network.

Passive systems use the unitary Schur form and the ordinary SVD, general
systems their Bogoliubov counterparts from :mod:`krein_linalg`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from config import config
from errors import DimensionError, ParameterError, StructureError
from krein_linalg import (
    Ordering,
    blocks,
    canonical_phase,
    double_up,
    flat_adjoint,
    inverse_cayley,
    krein_schur,
    krein_svd,
    signature,
    unitary_schur,
)
from logger import get_logger
from lqss_model import (
    CavityPort,
    CavitySpec,
    Lqss,
    PassiveLqss,
    as_general,
    require_valid,
)

logger = get_logger(__name__)

# 2x2 coupler between the two cavities of a complex-pair block
PAIR_COUPLER = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)

_ZERO_COUPLING = 1e-14


# ---------------------------------------------------------------------------
# Netlist types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CascadeRealization:
    """Static ``pre_network`` followed by ``cavities`` in light order.

    ``pre_network`` is ``m x m`` for the passive kind and ``2m x 2m``
    otherwise; ``transform`` is the state transformation ``V`` that
    triangularized the generator.
    """

    kind: str
    pre_network: np.ndarray
    cavities: tuple[CavitySpec, ...]
    transform: np.ndarray
    eigen_order: tuple[complex, ...] = field(default=())
    ordering: str | tuple[complex, ...] | None = None

    @property
    def n_io(self) -> int:
        dim = self.pre_network.shape[0]
        return dim if self.kind == "passive" else dim // 2

    @property
    def n_modes(self) -> int:
        return len(self.cavities)


@dataclass(frozen=True)
class FeedbackCavity:
    """A cavity of a feedback bank.

    System port ``k`` of ``spec`` drives system channel ``channels[k]``; the
    last port of ``spec`` is the interconnection port.
    """

    spec: CavitySpec
    channels: tuple[int, ...]

    @property
    def interconnect_port(self) -> int:
        return len(self.spec.ports) - 1

    @property
    def n_ports(self) -> int:
        return len(self.spec.ports)


@dataclass(frozen=True)
class CoupledCavityPair:
    """Two identical cavities joined by :data:`PAIR_COUPLER` on ``channels``.

    Light passes cavity ``modes[0]``, then the coupler, then ``modes[1]``.
    """

    modes: tuple[int, int]
    channels: tuple[int, int]
    coupler: np.ndarray = field(default_factory=lambda: PAIR_COUPLER.copy())


@dataclass(frozen=True)
class SpectrumAudit:
    r_plus: int
    r_minus: int
    r_complex: int
    n_kernel: int

    @property
    def rank(self) -> int:
        return self.r_plus + self.r_minus + 2 * self.r_complex


@dataclass(frozen=True)
class FreeParameters:
    """Cavity detunings ``D`` and interconnection coupling amplitudes ``Ntilde``."""

    detunings: tuple[float, ...]
    couplings: tuple[float, ...]


@dataclass(frozen=True)
class FeedbackRealization:
    kind: str
    pre_network: np.ndarray
    post_network: np.ndarray
    cavities: tuple[FeedbackCavity, ...]
    pairs: tuple[CoupledCavityPair, ...]
    feedback_gain: np.ndarray
    free_params: FreeParameters
    spectrum_audit: SpectrumAudit
    Nhat: np.ndarray
    Mhat: np.ndarray
    Mbar: np.ndarray
    X: np.ndarray

    @property
    def n_io(self) -> int:
        dim = self.pre_network.shape[0]
        return dim if self.kind == "passive" else dim // 2

    @property
    def n_modes(self) -> int:
        return len(self.cavities)

    def port_counts(self) -> dict[int, int]:
        """Number of cavities per port count, e.g. ``{1: 1, 2: 2}``."""
        counts: dict[int, int] = {}
        for cavity in self.cavities:
            counts[cavity.n_ports] = counts.get(cavity.n_ports, 0) + 1
        return counts


# ---------------------------------------------------------------------------
# Cavity parameters
# ---------------------------------------------------------------------------


def _polar(z: complex) -> tuple[float, float]:
    if abs(z) <= _ZERO_COUPLING:
        return 0.0, 0.0
    return float(abs(z) ** 2), float(np.angle(z))


def extract_cavity_params(column_pair, detuning: float) -> CavitySpec:
    """Cavity whose doubled-up coupling column pair is ``column_pair``.

    Entry ``i`` of the first block is ``e^{i phi} sqrt(kappa)`` and of the
    second ``e^{i theta} sqrt(g)``; phases of vanishing couplings are 0.
    """
    first, second = blocks(column_pair)
    if first.shape[1] != 1:
        raise DimensionError(f"expected a 2m x 2 column pair, got {np.shape(column_pair)}")
    ports = []
    for a, b in zip(first[:, 0], second[:, 0]):
        kappa, phi = _polar(a)
        g, theta = _polar(b)
        ports.append(CavityPort(kappa=kappa, phi=phi, g=g, theta=theta))
    return CavitySpec(detuning=float(detuning), ports=tuple(ports))


def _column_pair(Nhat: np.ndarray, i: int, n: int) -> np.ndarray:
    return Nhat[:, [i, n + i]]


# ---------------------------------------------------------------------------
# Cascades
# ---------------------------------------------------------------------------


def cascade_passive(sys: PassiveLqss, ordering: Ordering = None) -> CascadeRealization:
    """Chain of ``n`` cavities behind the beam-splitter network ``S``.

    ``F = W T W^dag`` with ``T`` lower triangular; cavity ``i`` has detuning
    ``-Im T_ii`` and couplings given by column ``i`` of ``N W``.
    """
    if not isinstance(sys, PassiveLqss):
        raise StructureError("cascade_passive needs a passive system")
    require_valid(sys, what="passive system")
    n = sys.n_modes
    schur = unitary_schur(sys.generator(), ordering)
    Nhat = sys.N @ schur.W
    zeros = np.zeros((Nhat.shape[0], 1))
    cavities = tuple(
        extract_cavity_params(double_up(Nhat[:, [i]], zeros), -schur.T[i, i].imag)
        for i in range(n)
    )
    logger.info(
        "passive cascade: %d cavities, detunings %s",
        n, ", ".join(f"{c.detuning:.4f}" for c in cavities),
    )
    return CascadeRealization(
        kind="passive",
        pre_network=sys.S.copy(),
        cavities=cavities,
        transform=schur.W.conj().T,
        eigen_order=schur.eigen_order,
        ordering=_ordering_label(ordering),
    )


def cascade_general(sys: Lqss, ordering: Ordering = None) -> CascadeRealization:
    """Chain of ``n`` cavities behind the squeezing network ``S``.

    Raises:
        AssumptionIViolated: If the Bogoliubov Schur form does not exist.
    """
    sys = as_general(sys)
    require_valid(sys, what="general system")
    n = sys.n_modes
    schur = krein_schur(sys.generator(), ordering)
    Nhat = sys.N @ schur.W
    cavities = tuple(
        extract_cavity_params(_column_pair(Nhat, i, n), -schur.T[i, i].imag)
        for i in range(n)
    )
    logger.info(
        "general cascade: %d cavities, detunings %s",
        n, ", ".join(f"{c.detuning:.4f}" for c in cavities),
    )
    return CascadeRealization(
        kind="general",
        pre_network=sys.S.copy(),
        cavities=cavities,
        transform=flat_adjoint(schur.W),
        eigen_order=schur.eigen_order,
        ordering=_ordering_label(ordering),
    )


def _ordering_label(ordering: Ordering):
    if ordering is None or isinstance(ordering, str):
        return ordering
    return tuple(complex(z) for z in ordering)


# ---------------------------------------------------------------------------
# Closed-loop Hamiltonian
# ---------------------------------------------------------------------------


def free_parameters(
    n: int,
    detunings: Sequence[float] | None = None,
    couplings: Sequence[float] | None = None,
) -> FreeParameters:
    """Defaults ``D = 0`` and ``Ntilde = I``.

    Raises:
        DimensionError: If a list does not have ``n`` entries.
        ParameterError: If a coupling is not strictly positive.
    """
    D = tuple(float(d) for d in (np.zeros(n) if detunings is None else detunings))
    K = tuple(float(k) for k in (np.ones(n) if couplings is None else couplings))
    if len(D) != n or len(K) != n:
        raise DimensionError(f"need {n} detunings and {n} couplings, got {len(D)} and {len(K)}")
    bad = [k for k in K if not k > 0]
    if bad:
        raise ParameterError(f"interconnection couplings must be positive, got {bad}")
    return FreeParameters(detunings=D, couplings=K)


def coupling_matrix(couplings: Sequence[float], passive: bool) -> np.ndarray:
    """``Ntilde`` as a matrix: ``diag(k)`` or its doubled-up form."""
    diag = np.diag(np.asarray(couplings, dtype=complex))
    return diag if passive else double_up(diag, np.zeros_like(diag))


def network_hamiltonian(Mbar, Ntilde, X, passive: bool) -> np.ndarray:
    """Hamiltonian of a cavity bank closed through ``R = inverse_cayley(X)``.

    Passive: ``Mbar - (i/2) Ntilde^dag X Ntilde``; general:
    ``Mbar - (i/2) J Ntilde^flat X Ntilde``.
    """
    Mbar, Ntilde, X = (np.asarray(a, dtype=complex) for a in (Mbar, Ntilde, X))
    if passive:
        M = Mbar - 0.5j * Ntilde.conj().T @ X @ Ntilde
    else:
        J = signature(Mbar.shape[0] // 2)
        M = Mbar - 0.5j * J @ flat_adjoint(Ntilde) @ X @ Ntilde
    return (M + M.conj().T) / 2


def interconnection_gain(Mhat, Mbar, Ntilde, passive: bool,
                         cond_limit: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Solve :func:`network_hamiltonian` for ``X`` and return ``(X, R)``.

    Raises:
        CayleySingular: If ``X + I`` is singular (general systems only).
    """
    Mhat, Mbar, Ntilde = (np.asarray(a, dtype=complex) for a in (Mhat, Mbar, Ntilde))
    Ninv = np.linalg.inv(Ntilde)
    if passive:
        X = 2j * Ninv.conj().T @ (Mhat - Mbar) @ Ninv
    else:
        J = signature(Mhat.shape[0] // 2)
        X = 2j * np.linalg.inv(flat_adjoint(Ntilde)) @ J @ (Mhat - Mbar) @ Ninv
    return X, inverse_cayley(X, cond_limit)


# ---------------------------------------------------------------------------
# Feedback networks
# ---------------------------------------------------------------------------


def _passive_svd(N: np.ndarray, cutoff: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    m, n = N.shape
    U, sv, Wh = np.linalg.svd(N) if N.size else (np.eye(m), np.zeros(0), np.eye(n))
    W = Wh.conj().T.astype(complex)
    V = U.astype(complex)
    r = int(np.sum(sv > cutoff * sv[0])) if sv.size and sv[0] > 0 else 0
    for i in range(n):
        W[:, i] = canonical_phase(W[:, i])
    for i in range(m):
        V[:, i] = N @ W[:, i] / sv[i] if i < r else canonical_phase(V[:, i])
    Nhat = np.zeros((m, n), dtype=complex)
    Nhat[np.arange(r), np.arange(r)] = sv[:r]
    return V, Nhat, W, r


def feedback_passive(
    sys: PassiveLqss,
    detunings: Sequence[float] | None = None,
    couplings: Sequence[float] | None = None,
) -> FeedbackRealization:
    """Bank of ``r`` two-port and ``n - r`` one-port cavities closed through a unitary ``R``.

    ``N = V Nhat W^dag`` is the SVD with rank ``r``; cavities carry the
    detunings ``D`` and couplings ``Nhat_ii`` and the modes of the closed
    loop have Hamiltonian ``W^dag M W``.
    """
    if not isinstance(sys, PassiveLqss):
        raise StructureError("feedback_passive needs a passive system")
    require_valid(sys, what="passive system")
    m, n = sys.n_io, sys.n_modes
    params = free_parameters(n, detunings, couplings)
    V, Nhat, W, r = _passive_svd(sys.N, config.RANK_CUTOFF)
    Mhat = W.conj().T @ sys.M @ W
    Mhat = (Mhat + Mhat.conj().T) / 2
    Mbar = np.diag(np.asarray(params.detunings, dtype=complex))
    Ntilde = coupling_matrix(params.couplings, passive=True)
    X, R = interconnection_gain(Mhat, Mbar, Ntilde, passive=True)

    cavities = []
    for i in range(n):
        link = CavityPort(kappa=params.couplings[i] ** 2)
        if i < r:
            spec = CavitySpec(params.detunings[i], (CavityPort(kappa=float(Nhat[i, i].real ** 2)), link))
            cavities.append(FeedbackCavity(spec, (i,)))
        else:
            cavities.append(FeedbackCavity(CavitySpec(params.detunings[i], (link,)), ()))
    logger.info("passive feedback: rank %d, %d two-port and %d one-port cavities", r, r, n - r)
    return FeedbackRealization(
        kind="passive",
        pre_network=V.conj().T @ sys.S,
        post_network=V,
        cavities=tuple(cavities),
        pairs=(),
        feedback_gain=R,
        free_params=params,
        spectrum_audit=SpectrumAudit(r_plus=r, r_minus=0, r_complex=0, n_kernel=n - r),
        Nhat=Nhat,
        Mhat=Mhat,
        Mbar=Mbar,
        X=X,
    )


def pair_hamiltonian(detunings: Sequence[float], lambdas_complex: Sequence[complex], first_pair: int) -> np.ndarray:
    """``Mbar = diag(D, D) + E + E^T`` of a cavity bank with coupled pairs.

    Pair ``k`` occupies modes ``p, p + 1`` with ``p = first_pair + 2k``; its
    coupler contributes ``-Im(lambda_k) / 2`` at ``(p, n + p + 1)`` and
    ``(p + 1, n + p)``.
    """
    D = np.asarray(detunings, dtype=float)
    n = D.size
    E = np.zeros((2 * n, 2 * n))
    for k, lam in enumerate(lambdas_complex):
        p = first_pair + 2 * k
        E[p, n + p + 1] = -complex(lam).imag / 2
        E[p + 1, n + p] = -complex(lam).imag / 2
    return (np.diag(np.concatenate([D, D])) + E + E.T).astype(complex)


def feedback_general(
    sys: Lqss,
    detunings: Sequence[float] | None = None,
    couplings: Sequence[float] | None = None,
) -> FeedbackRealization:
    """Feedback network of one-, two- and three-port cavities closed through a Bogoliubov ``R``.

    With ``N = V Nhat W^flat`` from :func:`krein_svd`:

    * each positive eigenvalue of ``N^flat N`` gives a passive two-port
      cavity (``kappa = lambda``),
    * each negative one an active two-port cavity (``g = |lambda|``),
    * each non-real pair two identical three-port cavities joined by
      :data:`PAIR_COUPLER`,
    * each kernel mode a one-port cavity.

    The inverse couplers are folded into the pre-network, which becomes
    ``Pi V^flat S``.

    Raises:
        NotSemisimple, KernelMismatch, UnsupportedSpectrum: From the SVD.
        CayleySingular: If ``X + I`` is singular for the chosen parameters.
    """
    sys = as_general(sys)
    require_valid(sys, what="general system")
    m, n = sys.n_io, sys.n_modes
    params = free_parameters(n, detunings, couplings)
    svd = krein_svd(sys.N)
    Mhat = svd.W.conj().T @ sys.M @ svd.W
    Mhat = (Mhat + Mhat.conj().T) / 2

    r_plus, r_minus = len(svd.lambdas_plus), len(svd.lambdas_minus)
    first_pair = r_plus + r_minus
    Mbar = pair_hamiltonian(params.detunings, svd.lambdas_complex, first_pair)
    Ntilde = coupling_matrix(params.couplings, passive=False)
    X, R = interconnection_gain(Mhat, Mbar, Ntilde, passive=False)

    cavities: list[FeedbackCavity] = []
    pairs: list[CoupledCavityPair] = []
    for i in range(n):
        link = CavityPort(kappa=params.couplings[i] ** 2)
        D = params.detunings[i]
        if i < r_plus:
            port = CavityPort(kappa=float(svd.lambdas_plus[i]))
            cavities.append(FeedbackCavity(CavitySpec(D, (port, link)), (i,)))
        elif i < first_pair:
            port = CavityPort(g=float(abs(svd.lambdas_minus[i - r_plus])))
            cavities.append(FeedbackCavity(CavitySpec(D, (port, link)), (i,)))
        elif i < svd.rank:
            k = (i - first_pair) // 2
            alpha, beta = svd.alphas[k], svd.betas[k]
            p = first_pair + 2 * k
            ports = (CavityPort(g=beta ** 2, theta=np.pi / 2), CavityPort(kappa=alpha ** 2), link)
            cavities.append(FeedbackCavity(CavitySpec(D, ports), (p, p + 1)))
            if i == p:
                pairs.append(CoupledCavityPair(modes=(p, p + 1), channels=(p, p + 1)))
        else:
            cavities.append(FeedbackCavity(CavitySpec(D, (link,)), ()))

    Pi = np.eye(m, dtype=complex)
    for pair in pairs:
        idx = list(pair.channels)
        Pi[np.ix_(idx, idx)] = pair.coupler.T
    pre = double_up(Pi, np.zeros_like(Pi)) @ flat_adjoint(svd.V) @ sys.S

    audit = SpectrumAudit(
        r_plus=r_plus, r_minus=r_minus, r_complex=len(svd.lambdas_complex), n_kernel=svd.n_zero
    )
    logger.info(
        "general feedback: r+=%d r-=%d rc=%d kernel=%d, %d cavities",
        audit.r_plus, audit.r_minus, audit.r_complex, audit.n_kernel, n,
    )
    return FeedbackRealization(
        kind="general",
        pre_network=pre,
        post_network=svd.V,
        cavities=tuple(cavities),
        pairs=tuple(pairs),
        feedback_gain=R,
        free_params=params,
        spectrum_audit=audit,
        Nhat=svd.Nhat,
        Mhat=Mhat,
        Mbar=Mbar,
        X=X,
    )
