"""
GRL Runner - command-line entry point

Puts src/ on the import path and dispatches to main_pipeline.main().

Examples:
    python grl_runner.py exact-energy --qubits 2 --field 1.0
    python grl_runner.py grl-pipeline --preset ci --out runs/ci
    python grl_runner.py report runs/ci
"""

import sys
import os

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from main_pipeline import main


if __name__ == "__main__":
    sys.exit(main())
