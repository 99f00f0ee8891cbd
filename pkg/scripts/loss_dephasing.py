"""Lossy and dephased witnesses for the NOON N=2 and odd cat states.

Writes three tables next to ``--prefix``: NOON over (η₁, η₂), cat over
(α, η) with ``η₁ = ratio·η₂``, and cat over (α, p).  A lossy value only
certifies entanglement where ``η₁ ≥ η₂/2``.

    python scripts/loss_dephasing.py --prefix results/lossy
"""
import argparse
import math

import numpy as np

from cvwitness.states import NOON, Cat, build
from cvwitness.witness import MinorSpec, minor_d, minor_d_lossy

from tables import write_table


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--orders", nargs="+", default=["1,1", "2,2"], help="cat minors (m,n,0,0)")
    ap.add_argument("--ratio", type=float, default=0.5, help="η₁/η₂ for the cat loss table")
    ap.add_argument("--prefix", default="results/lossy")
    args = ap.parse_args(argv)
    grid = np.linspace(0.0, 1.0, args.points)
    alphas = np.linspace(0.1, 2.0, args.points)
    orders = [tuple(int(t) for t in o.split(",")) for o in args.orders]

    noon = build(NOON(2, 1 / math.sqrt(2)))
    spec = MinorSpec(0, 0, 2, 2)
    rows = []
    for e1 in grid:
        for e2 in grid:
            v = minor_d_lossy(noon, spec, e1, e2).value
            sound = e1 >= e2 / 2
            rows.append({"eta1": e1, "eta2": e2, "d_lossy": v, "sound": sound, "witnessed": sound and v < 0})
    write_table(rows, f"{args.prefix}_noon.csv", {"state": "NOON N=2 balanced", "spec": str(spec)})

    rows_loss, rows_deph = [], []
    for alpha in alphas:
        cat = build(Cat(alpha, alpha))
        for m, n in orders:
            spec = MinorSpec(m, n, 0, 0)
            for eta in grid:
                e1 = args.ratio * eta
                v = minor_d_lossy(cat, spec, e1, eta).value
                sound = e1 >= eta / 2
                rows_loss.append({"m": m, "n": n, "alpha": alpha, "eta2": eta, "eta1": e1, "d_lossy": v,
                                  "sound": sound, "witnessed": sound and v < 0})
        for p in grid:
            dephased = build(Cat(alpha, alpha, dephasing=p))
            for m, n in orders:
                v = minor_d(dephased, MinorSpec(m, n, 0, 0)).value
                rows_deph.append({"m": m, "n": n, "alpha": alpha, "p": p, "d": v, "witnessed": v < 0})
    write_table(rows_loss, f"{args.prefix}_cat_loss.csv", {"ratio": args.ratio})
    write_table(rows_deph, f"{args.prefix}_cat_dephasing.csv")


if __name__ == "__main__":
    main()
