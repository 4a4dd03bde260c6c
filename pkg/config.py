"""Configuration module for lqss-synth.

Loads numerical tolerances and defaults from a ``.env`` file (or environment
variables) at import time and exposes a validated :class:`Config` dataclass
singleton called ``config``.  Library functions take explicit tolerance
arguments that default to ``None``, meaning "use ``config``".
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()

ORDERING_POLICIES = (
    "real-desc",
    "real-asc",
    "imag-desc",
    "imag-asc",
    "magnitude-desc",
    "magnitude-asc",
)


@dataclass
class Config:
    """Application configuration loaded from environment variables."""

    NEUTRAL_TOL: float
    RANK_CUTOFF: float
    CLUSTER_TOL: float
    STRUCTURE_TOL: float
    POLE_COND: float
    SINGULAR_COND: float
    RECONSTRUCTION_TOL: float
    SQUEEZE_CLAMP: float
    VERIFY_TOL: float
    FREQ_MIN: float
    FREQ_MAX: float
    FREQ_COUNT: int
    ORDERING: str
    LOG_LEVEL: str
    LOG_FILE: str


def _build_config() -> Config:
    """Read environment variables and return a :class:`Config` instance.

    Raises:
        ValueError: If a numeric variable does not parse, a tolerance is not
            positive, the frequency window is empty or ``LQSS_ORDERING`` names
            an unknown policy.
    """

    def _parse_int(var_name: str, default: str) -> int:
        raw = os.getenv(var_name, default)
        try:
            return int(raw)
        except ValueError:
            raise ValueError(
                f"Environment variable {var_name}={raw!r} must be an integer."
            )

    def _parse_float(var_name: str, default: str) -> float:
        raw = os.getenv(var_name, default)
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(
                f"Environment variable {var_name}={raw!r} must be a number."
            )
        if not value > 0:
            raise ValueError(
                f"Environment variable {var_name}={raw!r} must be positive."
            )
        return value

    freq_min = _parse_float("LQSS_FREQ_MIN", "1e-2")
    freq_max = _parse_float("LQSS_FREQ_MAX", "1e3")
    if freq_max <= freq_min:
        raise ValueError(
            f"LQSS_FREQ_MAX={freq_max!r} must be larger than LQSS_FREQ_MIN={freq_min!r}."
        )

    freq_count = _parse_int("LQSS_FREQ_COUNT", "20")
    if freq_count < 1:
        raise ValueError(f"Environment variable LQSS_FREQ_COUNT={freq_count!r} must be >= 1.")

    ordering = os.getenv("LQSS_ORDERING", "real-desc").strip().lower()
    if ordering not in ORDERING_POLICIES:
        raise ValueError(
            f"LQSS_ORDERING={ordering!r} is not one of {', '.join(ORDERING_POLICIES)}."
        )

    return Config(
        NEUTRAL_TOL=_parse_float("LQSS_NEUTRAL_TOL", "1e-9"),
        RANK_CUTOFF=_parse_float("LQSS_RANK_CUTOFF", "1e-9"),
        CLUSTER_TOL=_parse_float("LQSS_CLUSTER_TOL", "1e-7"),
        STRUCTURE_TOL=_parse_float("LQSS_STRUCTURE_TOL", "1e-8"),
        POLE_COND=_parse_float("LQSS_POLE_COND", "1e12"),
        SINGULAR_COND=_parse_float("LQSS_SINGULAR_COND", "1e12"),
        RECONSTRUCTION_TOL=_parse_float("LQSS_RECONSTRUCTION_TOL", "1e-6"),
        SQUEEZE_CLAMP=_parse_float("LQSS_SQUEEZE_CLAMP", "1e-10"),
        VERIFY_TOL=_parse_float("LQSS_VERIFY_TOL", "1e-6"),
        FREQ_MIN=freq_min,
        FREQ_MAX=freq_max,
        FREQ_COUNT=freq_count,
        ORDERING=ordering,
        LOG_LEVEL=os.getenv("LOG_LEVEL", "INFO"),
        LOG_FILE=os.getenv("LOG_FILE", "logs/lqss.log"),
    )


config = _build_config()
