"""Error of the binning code along a ray through the (T,S) region.

Writes one CSV row per (blocklength, fraction).  The default instance is a
noiseless channel where sender 1 has a correlated pair and sender 2 is
silent, so only receiver 1's private rate moves.
"""

import argparse
import sys

from icregions import __version__
from icregions.binning_sim import config_at, identity_channel_spec, results_csv, simulate
from icregions.bounds import bound_constants
from icregions.probspace import Family, build_joint, mutual_info
from icregions.regions import RegionId, build


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="6,8,10")
    ap.add_argument("--fractions", default="0.4,0.7,1.0,1.3,1.6")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    spec = identity_channel_spec()
    joint = build_joint(spec)
    region = build(RegionId.S_HOD, bound_constants(Family.HOD, joint))
    slack = (mutual_info(joint, "U1", "W1", ("Q",)), 0.0)
    results = []
    for n in (int(x) for x in args.n.split(",")):
        for f in (float(x) for x in args.fractions.split(",")):
            cfg = config_at(region, {"S1": 1.0}, f, slack, n=n, trials=args.trials, seed=args.seed)
            results.append(simulate(spec, cfg))
            r = results[-1].receivers[0]
            print(f"n={n} fraction={f}: error {r.rate:.4f} [{r.ci_low:.4f}, {r.ci_high:.4f}]", file=sys.stderr)
    sys.stdout.write(results_csv(results, f"icregions {__version__} seed={args.seed}"))


if __name__ == "__main__":
    main()
