"""
Entry point for running the proximal-gradient flow experiments
Usage: python run_experiment.py run data/lasso_1d.yaml
"""

import sys

from src.main import main

if __name__ == "__main__":
    sys.exit(main())
