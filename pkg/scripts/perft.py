"""Count leaf nodes of the legal move tree (perft) for a FEN position."""

import argparse
import time

from robonomics.contracts import chess


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fen", default=chess.START_FEN)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--divide", action="store_true", help="break the last depth down by first move")
    args = ap.parse_args()

    pos = chess.Position.from_fen(args.fen)
    if args.divide:
        for move in sorted(pos.legal_moves(), key=lambda m: m.uci):
            print(move.uci, chess.perft(pos.play(move), args.depth - 1))
    for depth in range(1, args.depth + 1):
        start = time.perf_counter()
        nodes = chess.perft(pos, depth)
        print(f"depth {depth}: {nodes:>9d} nodes  {time.perf_counter() - start:6.2f} s")


if __name__ == "__main__":
    main()
