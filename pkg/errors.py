"""Exception hierarchy for lqss-synth.

Library code raises these; only the command-line layer turns them into
process exit codes, using the ``exit_code`` class attribute.
"""

from __future__ import annotations


class LqssError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = 1


# ---------------------------------------------------------------------------
# Input files
# ---------------------------------------------------------------------------


class ParseError(LqssError):
    """A system, netlist or matrix file could not be decoded.

    ``path`` is the JSON location of the offending value, e.g. ``N[1][2]``.
    """

    exit_code = 2

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


class ValidationError(LqssError):
    """A parameter triple or matrix violates a structural invariant."""

    exit_code = 3

    def __init__(self, message: str, report: list | None = None) -> None:
        self.report = list(report or [])
        super().__init__(message)


class DimensionError(ValidationError, ValueError):
    """Shapes are odd where a doubled-up shape is needed, or do not conform."""


class StructureError(ValidationError):
    """A matrix required to be Bogoliubov, unitary or doubled-up is not."""


class ParameterError(ValidationError, ValueError):
    """A physical parameter is outside its admissible range (e.g. negative coupling)."""


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------


class SynthesisError(LqssError):
    """A decomposition or synthesis step cannot be carried out."""

    exit_code = 4


class NeutralVector(SynthesisError):
    """A vector has (numerically) zero J-norm and cannot be J-normalized."""


class DegenerateComplement(SynthesisError):
    """Krein Gram-Schmidt ran out of non-neutral candidates."""


class AssumptionIViolated(SynthesisError):
    """Every eigenvector of a deflated block is J-neutral.

    ``step`` is the size of the block (in modes) being deflated when the
    failure occurred, counting down from ``n``.
    """

    def __init__(self, step: int, message: str | None = None) -> None:
        self.step = step
        super().__init__(
            message
            or f"no eigenvector with non-zero J-norm at deflation step {step}; "
            "the generator is not triangularizable by a Bogoliubov transformation"
        )


class NotSemisimple(SynthesisError):
    """``N^flat N`` has a defective eigenvalue."""


class KernelMismatch(SynthesisError):
    """The kernels of ``N^flat N`` and ``N`` differ."""


class UnsupportedSpectrum(SynthesisError):
    """The Krein SVD construction did not reproduce ``N``."""


class UnitEigenvalue(SynthesisError):
    """``I - R`` is singular, so the Cayley transform is undefined."""


class CayleySingular(SynthesisError):
    """``X + I`` is singular, so the inverse Cayley transform is undefined."""


class AlgebraicLoop(SynthesisError):
    """Closing the feedback loop leads to an ill-posed algebraic loop."""


class PoleAt(SynthesisError):
    """The transfer function was evaluated at (or next to) a pole."""

    def __init__(self, s: complex, message: str | None = None) -> None:
        self.s = complex(s)
        super().__init__(message or f"s = {self.s:.6g} is a pole of the transfer function")


class SamplingError(SynthesisError):
    """No pole-free frequency could be found for a sample point."""


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


class VerificationFailed(LqssError):
    """An assembled realization does not reproduce the source transfer function."""

    exit_code = 5

    def __init__(self, message: str, report=None) -> None:
        self.report = report
        super().__init__(message)
