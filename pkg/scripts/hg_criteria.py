"""Compare d_1100, d_1001, MGVT and the second-moment criterion over (σ₊, σ₋).

Without ± squeezing the minors use closed forms against the optimal
coherent reference; with ``--xi > 1`` they fall back to truncated states.

    python scripts/hg_criteria.py --phi 0.7853981634 --output results/hg_rot.csv
"""
import argparse
from collections import Counter

import numpy as np

from cvwitness.states import HermiteGaussian, PMTransform, build, covariance_matrix
from cvwitness.witness import analytic_minor, mgvt, minor_d, optimal_reference, second_moment_criterion

from tables import write_table


def minors(fam):
    out = {}
    for key, spec in (("d1100", (1, 1, 0, 0)), ("d1001", (1, 0, 0, 1))):
        if fam.transform.xi == 1.0:
            ref = optimal_reference(fam, spec)
            out[key] = analytic_minor(fam, spec, (ref.gamma, ref.delta)).value
        else:
            # d' with the optimal reference is d/2
            out[key] = 0.5 * minor_d(build(fam), spec).value
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma", type=float, nargs=3, default=(0.2, 5.0, 25), metavar=("LO", "HI", "N"))
    ap.add_argument("--phi", type=float, default=0.0)
    ap.add_argument("--xi", type=float, default=1.0)
    ap.add_argument("--squeeze-axis", choices=("r", "s"), default="r")
    ap.add_argument("--output", default="results/hg_criteria.csv")
    args = ap.parse_args(argv)
    transform = PMTransform(args.phi, args.xi, args.squeeze_axis)
    sigmas = np.geomspace(args.sigma[0], args.sigma[1], int(args.sigma[2]))
    rows, tally = [], Counter()
    for sp in sigmas:
        for sm in sigmas:
            fam = HermiteGaussian(sp, sm, transform)
            cov = covariance_matrix(fam)
            row = {"sigma_plus": sp, "sigma_minus": sm, **minors(fam),
                   "mgvt": min(mgvt(cov, b) for b in "+-"),
                   "second_moment": min(second_moment_criterion(cov, b) for b in "+-")}
            flags = (row["d1100"] < 0, row["d1001"] < 0, row["mgvt"] < 1, row["second_moment"] < 0)
            row.update(zip(("w_d1100", "w_d1001", "w_mgvt", "w_second"), flags))
            tally[flags] += 1
            rows.append(row)
    print("(d1100, d1001, mgvt, second) -> points")
    for flags, count in sorted(tally.items()):
        print(" ", tuple(int(f) for f in flags), count)
    write_table(rows, args.output, {"phi": args.phi, "xi": args.xi, "squeeze_axis": args.squeeze_axis})


if __name__ == "__main__":
    main()
