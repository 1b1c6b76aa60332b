#!/usr/bin/env python3
"""Run every verification suite plus the two landmark central charges.

Writes JSON reports into ./reports (CSV too, for the sweep) and exits
nonzero if anything failed.  Pass --seed to vary the sampled inputs.
"""

import argparse
import sys
from pathlib import Path

from virasoro_transgression import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="reports")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(exist_ok=True)
    jobs = [
        (["verify", "all"], "verify_all.json"),
        (["central-charge", "p1hat"], "central_charge_p1hat.json"),
        (["central-charge", "1"], "central_charge_unnormalized.json"),
        (["sweep", "lambda", "--values=-1,-0.5,0,0.5,1"], "sweep_lambda.json"),
    ]
    worst = 0
    for cmd, name in jobs:
        code = cli.main(cmd + ["--seed", str(args.seed), "--report", str(out / name)])
        print(f"{' '.join(cmd):55s} -> exit {code} ({name})")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
