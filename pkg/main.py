"""
adiavac - Main Entry Point
Adiabatic vacuum states for a Klein-Gordon field on Robertson-Walker
backgrounds: frequency towers, mode integration, particle creation and probes.
"""

import sys

from src.ui.cli import main as run_cli


def main():
    """Parse the command line, run the requested command and exit with its status."""
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
