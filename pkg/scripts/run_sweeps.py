"""Run every seeded sweep and write the summary table.

    python scripts/run_sweeps.py --seed 42 --count 200 --out results/sweeps.txt
"""

import argparse
from pathlib import Path

from icregions import __version__
from icregions.sweeps import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    rep = verify(args.seed, args.count)
    text = f"# icregions {__version__} seed={args.seed} sweeps={args.count} ({rep.seconds:.1f}s)\n"
    text += rep.summary_text()
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text)
    print(text, end="")


if __name__ == "__main__":
    main()
