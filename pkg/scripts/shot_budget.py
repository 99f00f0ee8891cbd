"""Critical shot counts: Chebyshev m₀ for the odd cat d_1100 and Hoeffding m₀ for NOON d_00NN.

    python scripts/shot_budget.py --output results/shot_budget.json
"""
import argparse

import numpy as np

from cvwitness.sampling import fig6a_point, fig6b_point

from tables import write_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, nargs=3, default=(0.3, 2.0, 18), metavar=("LO", "HI", "N"))
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--reading", choices=("observable", "estimator"), default="observable")
    ap.add_argument("--output", default="results/shot_budget.json")
    args = ap.parse_args(argv)
    rows = [dict(panel="cat", **fig6a_point(a)) for a in np.linspace(*args.alpha[:2], int(args.alpha[2]))]
    rows += [dict(panel="noon", **fig6b_point(N, k, reading=args.reading))
             for N in range(1, args.max_n + 1) for k in (0.5, 1.0)]
    for r in rows:
        key = f"alpha={r['alpha']:.2f}" if r["panel"] == "cat" else f"N={r['N']} at {r['k_sigma']} sigma"
        print(f"{r['panel']:4s} {key:18s} m0={r['m0']}")
    write_table(rows, args.output, {"confidence": 0.9, "sigma_reading": args.reading})


if __name__ == "__main__":
    main()
