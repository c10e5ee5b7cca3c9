"""Flip random bytes in chain dumps and measure how often (and where) the validator notices."""

import argparse
import random
from collections import Counter

from robonomics import fuzz, simulation


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dump", action="append", help="dump file(s); defaults to the bundled scenarios")
    args = ap.parse_args()

    if args.dump:
        dumps = [open(p, "rb").read() for p in args.dump]
    else:
        dumps = [simulation.run(simulation.bundled_path(n)).dump.encode() for n in simulation.BUNDLED]
    rng = random.Random(args.seed)
    outcomes = [fuzz.tamper_trial(dumps[i % len(dumps)], rng) for i in range(args.trials)]

    missed = sum(not o.detected for o in outcomes)
    mislocated = sum(o.detected and o.located_height != o.line for o in outcomes)
    print(f"{args.trials} mutations: {missed} undetected, {mislocated} located at the wrong height")
    reasons = Counter((o.reason or "").split(":")[0] for o in outcomes)
    for reason, n in reasons.most_common():
        print(f"  {n:6d}  {reason}")
    return 1 if missed or mislocated else 0


if __name__ == "__main__":
    raise SystemExit(main())
