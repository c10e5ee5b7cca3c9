"""Command-line entry point.

Exit codes: 0 when every assertion passes or the chain is valid, 1 on an
assertion or validation failure, 2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import encoding, simulation
from .crypto import generate_keypair
from .did import DID_PREFIX
from .errors import FormatError, ParseError, SeedLengthError, ValidationFailure
from .ledger import query_events, validate_dump

OK, FAILED, USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        print(encoding.canonical_json(doc))
    else:
        print("\n".join(lines))


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def cmd_keygen(args) -> int:
    try:
        seed = bytes.fromhex(args.seed)
    except ValueError:
        raise SeedLengthError("seed must be hex") from None
    kp = generate_keypair(seed)
    doc = {"address": kp.address, "public_key": kp.public_key.hex(), "did": DID_PREFIX + kp.address}
    _emit(args, doc, [f"{k}: {v}" for k, v in doc.items()])
    return OK


def cmd_scenario_list(args) -> int:
    _emit(args, {"scenarios": list(simulation.BUNDLED)}, list(simulation.BUNDLED))
    return OK


def cmd_scenario_run(args) -> int:
    transcript = simulation.run(simulation.resolve_scenario_path(args.file))
    if args.dump:
        Path(args.dump).write_text(transcript.dump)
    if args.transcript:
        Path(args.transcript).write_text(transcript.to_json())
    if args.json:
        print(encoding.canonical_json(transcript.document))
    else:
        doc = transcript.document
        print(f"scenario {doc['scenario']}: height {doc['head_height']}, "
              f"{len(doc['events'])} events, {len(doc['rejections'])} rejections")
        for r in doc["rejections"]:
            print(f"  rejected tick {r['tick']} {r['agent']} {r['action']}: {r['reason']} ({r['message']})")
        for a in transcript.assertions:
            mark = "PASS" if a["passed"] else "FAIL"
            print(f"  {mark} {encoding.canonical_json(a['expect'])} actual={json.dumps(a['actual'])}")
        print("passed" if transcript.passed else "FAILED")
    return OK if transcript.passed else FAILED


def cmd_chain_validate(args) -> int:
    report = validate_dump(_read(args.dump))
    if report.valid:
        line = f"valid: height {report.head_height}, state {report.state_hash}"
    else:
        line = f"invalid at height {report.height}: {report.reason}"
    _emit(args, report.to_json(), [line])
    return OK if report.valid else FAILED


def cmd_chain_events(args) -> int:
    _, world, _ = simulation.replay_blocks(_read(args.dump))
    events = query_events(world.events, contract=args.contract, name=args.name)
    if args.json:
        for e in events:
            print(encoding.canonical_json(e.to_json()))
    else:
        for e in events:
            print(f"{e.block_height} {e.contract} {e.name} {encoding.canonical_json(dict(e.fields))}")
    return OK


def cmd_replay(args) -> int:
    report = simulation.replay(args.dump)
    doc = report.to_json()
    lines = [f"valid: height {report.head_height}, head {report.head_hash}",
             f"state {report.state_hash}, {report.event_count} events, "
             f"{report.failed_transactions} failed transactions"]
    lines += [f"  {addr} {bal}" for addr, bal in report.balances.items()]
    _emit(args, doc, lines)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    p = _Parser(prog="robonomics")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kg = sub.add_parser("keygen", parents=[common], help="derive a keypair and address from a seed")
    kg.add_argument("--seed", required=True, help="32-byte seed as 64 hex digits")
    kg.set_defaults(func=cmd_keygen)

    sc = sub.add_parser("scenario", help="run bundled or custom scenarios")
    sc_sub = sc.add_subparsers(dest="scenario_command", required=True, parser_class=_Parser)
    run = sc_sub.add_parser("run", parents=[common], help="run a scenario file or bundled name")
    run.add_argument("file")
    run.add_argument("--dump", help="write the chain dump here")
    run.add_argument("--transcript", help="write the canonical transcript here")
    run.set_defaults(func=cmd_scenario_run)
    ls = sc_sub.add_parser("list", parents=[common], help="list bundled scenarios")
    ls.set_defaults(func=cmd_scenario_list)

    ch = sub.add_parser("chain", help="inspect chain dumps")
    ch_sub = ch.add_subparsers(dest="chain_command", required=True, parser_class=_Parser)
    val = ch_sub.add_parser("validate", parents=[common], help="verify hashes, signatures and state")
    val.add_argument("dump")
    val.set_defaults(func=cmd_chain_validate)
    ev = ch_sub.add_parser("events", parents=[common], help="list events from a dump")
    ev.add_argument("dump")
    ev.add_argument("--contract")
    ev.add_argument("--name")
    ev.set_defaults(func=cmd_chain_events)

    rp = sub.add_parser("replay", parents=[common], help="re-execute a dump from genesis")
    rp.add_argument("dump")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"invalid at height {exc.height}: {exc.detail}", file=sys.stderr)
        return FAILED
    except (FormatError, ParseError, SeedLengthError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
