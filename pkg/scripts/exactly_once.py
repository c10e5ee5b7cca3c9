"""Random call sequences against each contract kind; looks for double payouts and stranded funds."""

import argparse
from collections import Counter, defaultdict

from robonomics import fuzz


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sequences", type=int, default=10_000)
    ap.add_argument("--kind", choices=fuzz.KINDS)
    ap.add_argument("--max-calls", type=int, default=24)
    args = ap.parse_args()

    pool = fuzz.actor_pool(5)
    phases: dict[str, Counter] = defaultdict(Counter)
    problems = []
    for seed in range(args.sequences):
        r = fuzz.exactly_once_sequence(seed, kind=args.kind, pool=pool, max_calls=args.max_calls)
        phases[r.kind][r.final_phase] += 1
        if r.double_payout or r.stuck_funds or not r.conservation_ok:
            problems.append((seed, r))
    for kind in sorted(phases):
        spread = ", ".join(f"{p}={n}" for p, n in phases[kind].most_common())
        print(f"{kind:22s} {spread}")
    print(f"{args.sequences} sequences, {len(problems)} problems")
    for seed, r in problems[:10]:
        print("  seed", seed, r)
    return 1 if problems else 0


if __name__ == "__main__":
    raise SystemExit(main())
