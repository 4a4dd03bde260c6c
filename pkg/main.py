"""
Main entry point for lqss-synth.

Runs the command-line application defined in :mod:`cli_io`.
"""

import os

os.makedirs("logs", exist_ok=True)

from cli_io import app  # noqa: E402


def main() -> None:
    """Run the lqss-synth command line."""
    app()


if __name__ == "__main__":
    main()
