"""Find distributions where a row that only the dependent region carries is
not implied by the others.

For each draw the row is dropped and the region compared with the full one;
a strict difference means the row is active.  Prints every hit with its
seed, index and the gap by which the row cuts the remaining region.
"""

import argparse

from icregions.bounds import bound_constants
from icregions.polytope import IneqSystem, parse_row
from icregions.polytope.lp import LPSolver
from icregions.probspace import build_joint
from icregions.regions import RegionId, build
from icregions.sampling import random_spec, seeded

ROWS = ("2*R1 + R2 <= 2*A1 + E2 + F2", "R1 + 2*R2 <= 2*A2 + E1 + F1")


def gap(region: IneqSystem, row_text: str, values) -> float:
    """How far the remaining rows let the row's left side exceed its bound."""
    row = parse_row(row_text)
    bound = row.rhs.evaluate(values)
    rest = [r for r in region.rows if not (r.coeffs == row.coeffs and abs(r.rhs - bound) < 1e-15)]
    A = [[r.coeff(v) for v in region.variables] for r in rest]
    res = LPSolver(A, [r.rhs for r in rest]).maximize([row.coeff(v) for v in region.variables])
    return float(res.value) - bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=77)
    ap.add_argument("--count", type=int, default=3000)
    ap.add_argument("--max-card", type=int, default=3)
    args = ap.parse_args()
    hits = 0
    for i in range(args.count):
        c = bound_constants("HOD", build_joint(random_spec("HOD", seeded(args.seed, i), max_card=args.max_card)))
        region = build(RegionId.R_HOD, c)
        for row in ROWS:
            g = gap(region, row, c.values)
            if g > 1e-9:
                hits += 1
                print(f"seed {args.seed} index {i}: {row} active, gap {g:.3g}")
    print(f"{hits} active rows in {args.count} draws")


if __name__ == "__main__":
    main()
