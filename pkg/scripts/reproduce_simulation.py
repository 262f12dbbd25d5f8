"""Replication study on both built-in models.

Writes per-replication and sweep CSVs for the three headline sizes and, with
--fine, a denser grid for the average-error-versus-size curve.

    python scripts/reproduce_simulation.py --out-dir results --seed 7
"""

import argparse
import time
from pathlib import Path

from pnsbounds.experiment import error_sweep
from pnsbounds.oracle import informer
from pnsbounds.scm import PRESETS, preset

HEADLINE = [385, 1537, 6147]
FINE = [50, 100, 200, 300, 385, 500, 750, 1000, 1537, 2000, 3000, 4000, 5000, 6147, 8000, 10000]


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--fine", action="store_true", help="also run the dense size grid")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    for name in PRESETS:
        model = preset(name)
        truth = informer(model)
        b = truth.bounds
        print(f"{name}: true PNS {truth.true_pns:.4f}, bounds [{b.lower:.4f}, {b.upper:.4f}]")
        grids = {"headline": HEADLINE}
        if args.fine:
            grids["fine"] = FINE
        for label, grid in grids.items():
            t0 = time.perf_counter()
            report = error_sweep(model, grid, args.reps, args.seed, truth=truth, workers=args.threads)
            report.write(args.out_dir, prefix=f"{name}_{label}")
            print(f"  {label} grid ({time.perf_counter() - t0:.1f}s)")
            for row in report.rows:
                print(
                    f"    size {row.size:>6}: mean err lower {row.mean_err_lower:.4f}"
                    f" upper {row.mean_err_upper:.4f}  contains {row.frac_contains:.3f}"
                    f"  failed {row.failed_reps}"
                )


if __name__ == "__main__":
    main()
