"""Six-method rate table for a synthetic device over a few noise seeds.

Usage: python3 demos/rate_table.py [n_seeds]
"""
import sys
import warnings

from ratefit import pipeline
from ratefit.cli import format_table
from ratefit.exceptions import FitWarning
from ratefit.presets import default_config


def main(n_seeds=3):
    cfg = default_config()
    warnings.simplefilter("ignore", FitWarning)
    for seed in range(n_seeds):
        rows, _ = pipeline.table1(cfg, seed)
        print(f"seed {seed}")
        print(format_table(pipeline.report(rows, cfg, seed)))
        print()


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
