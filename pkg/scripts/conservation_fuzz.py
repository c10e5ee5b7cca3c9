"""Randomized ledger workloads; checks total funds against supply + reward x height after every block."""

import argparse
import dataclasses
import time

from robonomics import fuzz


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--first-seed", type=int, default=0)
    for f in dataclasses.fields(fuzz.FuzzConfig):
        ap.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    args = ap.parse_args()
    config = fuzz.FuzzConfig(**{f.name: getattr(args, f.name) for f in dataclasses.fields(fuzz.FuzzConfig)})

    pool = fuzz.actor_pool(config.actors)
    start = time.perf_counter()
    bad, blocks, submitted, rejected, failed = [], 0, 0, 0, 0
    for seed in range(args.first_seed, args.first_seed + args.runs):
        r = fuzz.conservation_run(seed, config, pool)
        blocks += r.blocks
        submitted, rejected, failed = submitted + r.submitted, rejected + r.rejected, failed + r.failed
        if r.violations:
            bad.append((seed, r.violations))
    print(f"{args.runs} runs, {blocks} blocks, {submitted} submitted, {rejected} rejected at admission, "
          f"{failed} failed in execution, {time.perf_counter() - start:.1f} s")
    print("violations:", bad or "none")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
