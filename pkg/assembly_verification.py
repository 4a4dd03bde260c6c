"""Assemble netlists back into systems and compare transfer functions.

The transfer function does not depend on the realization, so a netlist is
accepted when its assembled system reproduces ``G(s)`` of the source on a
grid of frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from config import config
from errors import DimensionError, PoleAt, SamplingError
from krein_linalg import bogoliubov_residual, double_up
from logger import get_logger
from lqss_model import (
    GeneralLqss,
    Lqss,
    as_general,
    cavity_system,
    close_feedback,
    embed_channels,
    series_chain,
    static_system,
    transfer_function,
    validate,
)
from realization_synthesis import CascadeRealization, FeedbackRealization

logger = get_logger(__name__)

Realization = Union[CascadeRealization, FeedbackRealization]

_JITTER = 1e-3
_MAX_JITTER = 8


@dataclass(frozen=True)
class StructuralCheck:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass(frozen=True)
class EquivalenceReport:
    """Sampled comparison of two transfer functions.

    ``per_frequency_errors[k]`` is ``||G_a - G_b||_max / max(1, ||G_a||_max)``
    at ``frequencies[k]``, where the sample may have been jittered off a pole.
    """

    frequencies: tuple[complex, ...]
    per_frequency_errors: tuple[float, ...]
    max_rel_error: float
    tolerance: float
    structural_checks: tuple[StructuralCheck, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance and all(c.passed for c in self.structural_checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "max_rel_error": self.max_rel_error,
            "frequencies": [[s.real, s.imag] for s in self.frequencies],
            "per_frequency_errors": list(self.per_frequency_errors),
            "structural_checks": [
                {"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed}
                for c in self.structural_checks
            ],
        }


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def _doubled(U: np.ndarray, kind: str) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    return double_up(U, np.zeros_like(U)) if kind == "passive" else U


def assemble_cascade(r: CascadeRealization) -> GeneralLqss:
    """Static pre-network, then the cavities in order."""
    m = r.n_io
    chain: list[Lqss] = [static_system(_doubled(r.pre_network, r.kind))]
    for i, spec in enumerate(r.cavities):
        if len(spec.ports) != m:
            raise DimensionError(f"cavity {i} has {len(spec.ports)} ports, the network {m} channels")
        chain.append(cavity_system(spec))
    result = series_chain(chain)
    logger.debug("assembled cascade with %d cavities on %d channels", len(r.cavities), m)
    return result


def assemble_feedback(r: FeedbackRealization) -> GeneralLqss:
    """Close the cavity bank through ``R`` and add the pre and post networks.

    Channels ``0..m-1`` are the system channels and ``m + i`` is the
    interconnection channel of cavity ``i``.

    Raises:
        AlgebraicLoop: If the loop through ``R`` is ill-posed.
    """
    m, n = r.n_io, r.n_modes
    total = m + n
    couplers_after = {pair.modes[0]: pair for pair in r.pairs}
    chain: list[Lqss] = []
    for i, cavity in enumerate(r.cavities):
        if len(cavity.channels) != cavity.n_ports - 1:
            raise DimensionError(
                f"cavity {i} has {cavity.n_ports} ports but {len(cavity.channels)} system channels"
            )
        chain.append(embed_channels(cavity_system(cavity.spec), list(cavity.channels) + [m + i], total))
        pair = couplers_after.get(i)
        if pair is not None:
            coupler = static_system(double_up(pair.coupler, np.zeros_like(pair.coupler)))
            chain.append(embed_channels(coupler, list(pair.channels), total))

    bank = series_chain(chain)
    closed = close_feedback(bank, range(m, total), _doubled(r.feedback_gain, r.kind))
    result = series_chain([
        static_system(_doubled(r.pre_network, r.kind)),
        closed,
        static_system(_doubled(r.post_network, r.kind)),
    ])
    logger.debug("assembled feedback network: %d cavities, %d pairs", n, len(r.pairs))
    return result


def assemble(r: Realization) -> GeneralLqss:
    if isinstance(r, CascadeRealization):
        return assemble_cascade(r)
    return assemble_feedback(r)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def frequency_grid(
    freq_min: float | None = None,
    freq_max: float | None = None,
    count: int | None = None,
) -> list[complex]:
    """``s = 0`` followed by ``count`` log-spaced points ``i w`` in ``[freq_min, freq_max]``."""
    lo = config.FREQ_MIN if freq_min is None else freq_min
    hi = config.FREQ_MAX if freq_max is None else freq_max
    count = config.FREQ_COUNT if count is None else count
    if not 0 < lo < hi or count < 1:
        raise ValueError(f"invalid frequency grid [{lo}, {hi}] with {count} points")
    return [0j] + [1j * w for w in np.logspace(np.log10(lo), np.log10(hi), count)]


def _sample(a: GeneralLqss, b: GeneralLqss, s: complex) -> tuple[complex, np.ndarray, np.ndarray]:
    for attempt in range(_MAX_JITTER + 1):
        # jitter along the imaginary axis, alternating sides
        shift = 1j * _JITTER * ((attempt + 1) // 2) * (1 if attempt % 2 else -1)
        point = s + shift * max(1.0, abs(s))
        try:
            return point, transfer_function(a, point), transfer_function(b, point)
        except PoleAt:
            logger.warning("pole near s = %s, jittering the sample", f"{point:.6g}")
    raise SamplingError(f"no pole-free sample near s = {s:.6g} after {_MAX_JITTER} jitters")


def relative_error(G_ref: np.ndarray, G: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(G_ref), initial=0.0)))
    return float(np.max(np.abs(G - G_ref), initial=0.0)) / scale


def verify_equivalence(
    source: Lqss,
    realized: Lqss,
    freq_spec: Sequence[complex] | None = None,
    tol: float | None = None,
) -> EquivalenceReport:
    """Compare ``G`` of ``source`` and ``realized`` on ``freq_spec`` (default :func:`frequency_grid`).

    Structural checks cover the port counts, the validity of the realized
    system and the J-unitarity of its ``G(i w)`` on the imaginary-axis
    samples.

    Raises:
        DimensionError: If the port counts differ.
        SamplingError: If a sample cannot be moved off a pole.
    """
    tol = config.VERIFY_TOL if tol is None else tol
    a, b = as_general(source), as_general(realized)
    if a.n_io != b.n_io:
        raise DimensionError(f"port counts differ: source {a.n_io}, realization {b.n_io}")
    points = frequency_grid() if freq_spec is None else [complex(s) for s in freq_spec]

    used, errors, unitarity = [], [], 0.0
    for s in points:
        point, Ga, Gb = _sample(a, b, s)
        used.append(point)
        errors.append(relative_error(Ga, Gb))
        if abs(point.real) <= 1e-12 * max(1.0, abs(point)):
            scale = max(1.0, float(np.max(np.abs(Gb), initial=0.0))) ** 2
            unitarity = max(unitarity, bogoliubov_residual(Gb) / scale)

    violations = validate(b)
    checks = (
        StructuralCheck("port count", float(abs(a.n_io - b.n_io)), 0.0),
        StructuralCheck(
            "realization structure",
            max((v.residual for v in violations), default=0.0),
            max((v.tolerance for v in violations), default=0.0),
        ),
        StructuralCheck("J-unitarity of G(iw)", unitarity, max(tol, 1e-8)),
    )
    report = EquivalenceReport(
        frequencies=tuple(used),
        per_frequency_errors=tuple(errors),
        max_rel_error=max(errors, default=0.0),
        tolerance=tol,
        structural_checks=checks,
    )
    logger.info(
        "equivalence over %d samples: max relative error %.3e (%s)",
        len(used), report.max_rel_error, report.verdict,
    )
    return report

