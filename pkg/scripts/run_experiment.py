#!/usr/bin/env python3
"""
Run closed-loop experiments and the labeler evaluation.

Examples:
    python scripts/run_experiment.py run --schedule eval12 --mode paired --out runs/eval12
    python scripts/run_experiment.py table1 --out runs/table1
"""

import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.orchestrator.cli import main


if __name__ == "__main__":
    sys.exit(main())
