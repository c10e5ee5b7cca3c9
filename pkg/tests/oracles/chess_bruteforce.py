"""Brute-force legal move enumerator used as a perft oracle.

Deliberately naive and independent of ``robonomics.contracts.chess``: every
(from, to) pair on the board is tested against per-piece geometric rules, the
move is applied to a copied dict board, and it is kept only if the mover's king
is not attacked afterwards.  Slow, but obviously correct.
"""

FILES = "abcdefgh"


def sq(name):
    return FILES.index(name[0]) + 8 * (int(name[1]) - 1)


def name(s):
    return FILES[s % 8] + str(s // 8 + 1)


def parse_fen(fen):
    parts = fen.split()
    board = {}
    rank = 7
    for row in parts[0].split("/"):
        f = 0
        for ch in row:
            if ch.isdigit():
                f += int(ch)
            else:
                board[f + 8 * rank] = ch
                f += 1
        rank -= 1
    side = parts[1]
    castling = "" if len(parts) < 3 or parts[2] == "-" else parts[2]
    ep = None if len(parts) < 4 or parts[3] == "-" else sq(parts[3])
    return {"board": board, "side": side, "castling": castling, "ep": ep}


def is_white(piece):
    return piece.isupper()


def own(piece, side):
    return piece is not None and (piece.isupper() == (side == "w"))


def path_clear(board, a, b):
    fa, ra, fb, rb = a % 8, a // 8, b % 8, b // 8
    df = (fb > fa) - (fb < fa)
    dr = (rb > ra) - (rb < ra)
    f, r = fa + df, ra + dr
    while (f, r) != (fb, rb):
        if f + 8 * r in board:
            return False
        f, r = f + df, r + dr
    return True


def attacks(board, frm, to):
    """True if the piece on ``frm`` attacks square ``to`` (ignoring pins)."""
    piece = board[frm]
    kind = piece.lower()
    df = to % 8 - frm % 8
    dr = to // 8 - frm // 8
    adf, adr = abs(df), abs(dr)
    if frm == to:
        return False
    if kind == "p":
        step = 1 if is_white(piece) else -1
        return adf == 1 and dr == step
    if kind == "n":
        return (adf, adr) in ((1, 2), (2, 1))
    if kind == "k":
        return max(adf, adr) == 1
    straight = df == 0 or dr == 0
    diagonal = adf == adr
    if kind == "r" and not straight:
        return False
    if kind == "b" and not diagonal:
        return False
    if kind == "q" and not (straight or diagonal):
        return False
    return path_clear(board, frm, to)


def square_attacked(board, target, by_side):
    for s, p in board.items():
        if own(p, by_side) and attacks(board, s, target):
            return True
    return False


def king_square(board, side):
    k = "K" if side == "w" else "k"
    for s, p in board.items():
        if p == k:
            return s
    raise ValueError("no king")


def other(side):
    return "b" if side == "w" else "w"


def candidate_ok(pos, frm, to):
    """Geometric legality of frm->to, excluding the self-check test."""
    board = pos["board"]
    side = pos["side"]
    piece = board.get(frm)
    if not own(piece, side) or frm == to:
        return False
    target = board.get(to)
    if own(target, side):
        return False
    kind = piece.lower()
    df = to % 8 - frm % 8
    dr = to // 8 - frm // 8
    if kind == "p":
        step = 1 if side == "w" else -1
        start_rank = 1 if side == "w" else 6
        if df == 0:
            if target is not None:
                return False
            if dr == step:
                return True
            if dr == 2 * step and frm // 8 == start_rank:
                return frm + 8 * step not in board
            return False
        if abs(df) == 1 and dr == step:
            return target is not None or to == pos["ep"]
        return False
    if kind == "k" and abs(df) == 2 and dr == 0:
        return castle_ok(pos, frm, to)
    return attacks(board, frm, to)


def castle_ok(pos, frm, to):
    side = pos["side"]
    home = 4 if side == "w" else 60
    if frm != home:
        return False
    kingside = to > frm
    right = ("K" if kingside else "Q") if side == "w" else ("k" if kingside else "q")
    if right not in pos["castling"]:
        return False
    rook_sq = home + 3 if kingside else home - 4
    rook = "R" if side == "w" else "r"
    if pos["board"].get(rook_sq) != rook:
        return False
    if not path_clear(pos["board"], frm, rook_sq):
        return False
    enemy = other(side)
    through = home + 1 if kingside else home - 1
    for s in (home, through, to):
        if square_attacked(pos["board"], s, enemy):
            return False
    return True


def apply(pos, frm, to, promo=None):
    board = dict(pos["board"])
    side = pos["side"]
    piece = board.pop(frm)
    kind = piece.lower()
    captured_sq = to
    if kind == "p" and to == pos["ep"] and to not in board:
        captured_sq = to - 8 if side == "w" else to + 8
    board.pop(captured_sq, None)
    if promo:
        piece = promo.upper() if side == "w" else promo.lower()
    board[to] = piece
    if kind == "k" and abs(to - frm) == 2:
        if to > frm:
            board[frm + 1] = board.pop(frm + 3)
        else:
            board[frm - 1] = board.pop(frm - 4)
    rights = pos["castling"]
    lost = set()
    if kind == "k":
        lost |= {"K", "Q"} if side == "w" else {"k", "q"}
    corner = {0: "Q", 7: "K", 56: "q", 63: "k"}
    for s in (frm, to):
        if s in corner:
            lost.add(corner[s])
    rights = "".join(c for c in rights if c not in lost)
    ep = None
    if kind == "p" and abs(to - frm) == 16:
        ep = (to + frm) // 2
    return {"board": board, "side": other(side), "castling": rights, "ep": ep}


def legal_moves(pos):
    moves = []
    side = pos["side"]
    for frm in range(64):
        if not own(pos["board"].get(frm), side):
            continue
        for to in range(64):
            if not candidate_ok(pos, frm, to):
                continue
            piece = pos["board"][frm]
            last_rank = 7 if side == "w" else 0
            promos = ["q", "r", "b", "n"] if piece.lower() == "p" and to // 8 == last_rank else [None]
            for promo in promos:
                nxt = apply(pos, frm, to, promo)
                if not square_attacked(nxt["board"], king_square(nxt["board"], side), other(side)):
                    moves.append((name(frm) + name(to) + (promo or ""), nxt))
    return moves


def perft(pos, depth):
    if depth == 0:
        return 1
    moves = legal_moves(pos)
    if depth == 1:
        return len(moves)
    return sum(perft(nxt, depth - 1) for _, nxt in moves)


START = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"
