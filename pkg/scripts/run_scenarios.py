"""Run every bundled scenario (or the named ones) and report timings and assertion results."""

import argparse
import sys
import time

from robonomics import simulation


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(simulation.BUNDLED))
    ap.add_argument("--out", help="directory for dumps and transcripts")
    args = ap.parse_args()

    failures = 0
    for name in args.names:
        start = time.perf_counter()
        t = simulation.run(simulation.resolve_scenario_path(name))
        ms = (time.perf_counter() - start) * 1000
        ok = sum(a["passed"] for a in t.assertions)
        print(f"{name:22s} {'pass' if t.passed else 'FAIL'}  {ok}/{len(t.assertions)} assertions  "
              f"height {t.document['head_height']:3d}  {ms:7.1f} ms")
        failures += not t.passed
        if args.out:
            from pathlib import Path
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{name}.jsonl").write_text(t.dump)
            (out / f"{name}.transcript.json").write_text(t.to_json())
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
