"""Chess move validation on a 0x88 board.

Full movement rules: castling, en passant, promotion, check, checkmate and
stalemate.  Fifty-move and repetition draws are not adjudicated.
Moves use coordinate notation: ``e2e4``, ``e7e8q``.
"""

from __future__ import annotations

from dataclasses import dataclass

START_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

KNIGHT = (33, 31, 18, 14, -14, -18, -31, -33)
KING = (1, -1, 16, -16, 17, 15, -15, -17)
ROOK_DIRS = (1, -1, 16, -16)
BISHOP_DIRS = (17, 15, -15, -17)
PROMOTIONS = "qrbn"

# castling right -> (king from, king to, rook from, rook to, squares that must be empty)
_CASTLES = {
    "K": (0x04, 0x06, 0x07, 0x05, (0x05, 0x06)),
    "Q": (0x04, 0x02, 0x00, 0x03, (0x03, 0x02, 0x01)),
    "k": (0x74, 0x76, 0x77, 0x75, (0x75, 0x76)),
    "q": (0x74, 0x72, 0x70, 0x73, (0x73, 0x72, 0x71)),
}
# a move touching one of these squares removes the listed rights
_RIGHTS_LOST = {0x04: "KQ", 0x00: "Q", 0x07: "K", 0x74: "kq", 0x70: "q", 0x77: "k"}


def on_board(sq: int) -> bool:
    return not sq & 0x88


def square_name(sq: int) -> str:
    return "abcdefgh"[sq & 7] + str((sq >> 4) + 1)


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in "abcdefgh" or name[1] not in "12345678":
        raise ValueError(f"bad square {name!r}")
    return (int(name[1]) - 1) * 16 + "abcdefgh".index(name[0])


def _white(piece: str) -> bool:
    return piece.isupper()


@dataclass(frozen=True)
class Move:
    frm: int
    to: int
    promotion: str | None = None

    @property
    def uci(self) -> str:
        return square_name(self.frm) + square_name(self.to) + (self.promotion or "")

    @classmethod
    def parse(cls, text: str) -> "Move":
        if not isinstance(text, str) or len(text) not in (4, 5):
            raise ValueError(f"move must look like 'e2e4' or 'e7e8q', got {text!r}")
        promo = text[4] if len(text) == 5 else None
        if promo is not None and promo not in PROMOTIONS:
            raise ValueError(f"bad promotion piece {promo!r}")
        return cls(parse_square(text[:2]), parse_square(text[2:4]), promo)


class Position:
    __slots__ = ("board", "white_to_move", "castling", "ep", "halfmove", "fullmove")

    def __init__(self, board, white_to_move, castling, ep, halfmove=0, fullmove=1):
        self.board = board
        self.white_to_move = white_to_move
        self.castling = castling
        self.ep = ep
        self.halfmove = halfmove
        self.fullmove = fullmove

    # -- FEN -----------------------------------------------------------------

    @classmethod
    def from_fen(cls, fen: str = START_FEN) -> "Position":
        fields = fen.split()
        if len(fields) < 4:
            raise ValueError(f"bad FEN {fen!r}")
        board: list[str | None] = [None] * 128
        rows = fields[0].split("/")
        if len(rows) != 8:
            raise ValueError(f"bad FEN board {fields[0]!r}")
        for r, row in enumerate(rows):
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                elif ch in "pnbrqkPNBRQK":
                    board[(7 - r) * 16 + f] = ch
                    f += 1
                else:
                    raise ValueError(f"bad FEN piece {ch!r}")
            if f != 8:
                raise ValueError(f"bad FEN rank {row!r}")
        castling = "" if fields[2] == "-" else fields[2]
        ep = None if fields[3] == "-" else parse_square(fields[3])
        halfmove = int(fields[4]) if len(fields) > 4 else 0
        fullmove = int(fields[5]) if len(fields) > 5 else 1
        return cls(board, fields[1] == "w", castling, ep, halfmove, fullmove)

    def fen(self) -> str:
        rows = []
        for r in range(7, -1, -1):
            row, empty = "", 0
            for f in range(8):
                p = self.board[r * 16 + f]
                if p is None:
                    empty += 1
                else:
                    row += (str(empty) if empty else "") + p
                    empty = 0
            rows.append(row + (str(empty) if empty else ""))
        return " ".join([
            "/".join(rows),
            "w" if self.white_to_move else "b",
            self.castling or "-",
            square_name(self.ep) if self.ep is not None else "-",
            str(self.halfmove),
            str(self.fullmove),
        ])

    # -- attacks -------------------------------------------------------------

    def attacked(self, sq: int, by_white: bool) -> bool:
        board = self.board
        pawn = "P" if by_white else "p"
        # a white pawn attacks upward, so look one rank down from sq
        for d in ((-15, -17) if by_white else (15, 17)):
            s = sq + d
            if on_board(s) and board[s] == pawn:
                return True
        knight = "N" if by_white else "n"
        for d in KNIGHT:
            s = sq + d
            if on_board(s) and board[s] == knight:
                return True
        king = "K" if by_white else "k"
        for d in KING:
            s = sq + d
            if on_board(s) and board[s] == king:
                return True
        straight = ("R", "Q") if by_white else ("r", "q")
        diagonal = ("B", "Q") if by_white else ("b", "q")
        for dirs, sliders in ((ROOK_DIRS, straight), (BISHOP_DIRS, diagonal)):
            for d in dirs:
                s = sq + d
                while on_board(s):
                    p = board[s]
                    if p is not None:
                        if p in sliders:
                            return True
                        break
                    s += d
        return False

    def king_square(self, white: bool) -> int:
        king = "K" if white else "k"
        for sq in range(128):
            if on_board(sq) and self.board[sq] == king:
                return sq
        raise ValueError("position has no king")

    def in_check(self, white: bool | None = None) -> bool:
        side = self.white_to_move if white is None else white
        return self.attacked(self.king_square(side), not side)

    # -- move generation -----------------------------------------------------

    def pseudo_moves(self) -> list[Move]:
        board, white = self.board, self.white_to_move
        moves: list[Move] = []
        for sq in range(128):
            if sq & 0x88:
                continue
            p = board[sq]
            if p is None or _white(p) != white:
                continue
            kind = p.lower()
            if kind == "p":
                self._pawn_moves(sq, moves)
            elif kind in "nk":
                for d in (KNIGHT if kind == "n" else KING):
                    t = sq + d
                    if on_board(t) and (board[t] is None or _white(board[t]) != white):
                        moves.append(Move(sq, t))
            else:
                dirs = {"r": ROOK_DIRS, "b": BISHOP_DIRS, "q": ROOK_DIRS + BISHOP_DIRS}[kind]
                for d in dirs:
                    t = sq + d
                    while on_board(t):
                        if board[t] is None:
                            moves.append(Move(sq, t))
                        else:
                            if _white(board[t]) != white:
                                moves.append(Move(sq, t))
                            break
                        t += d
        self._castle_moves(moves)
        return moves

    def _pawn_moves(self, sq: int, moves: list[Move]) -> None:
        board, white = self.board, self.white_to_move
        fwd = 16 if white else -16
        start_rank, last_rank = (1, 7) if white else (6, 0)

        def add(t):
            if t >> 4 == last_rank:
                moves.extend(Move(sq, t, pr) for pr in PROMOTIONS)
            else:
                moves.append(Move(sq, t))

        t = sq + fwd
        if on_board(t) and board[t] is None:
            add(t)
            t2 = t + fwd
            if sq >> 4 == start_rank and board[t2] is None:
                moves.append(Move(sq, t2))
        for d in (fwd - 1, fwd + 1):
            t = sq + d
            if not on_board(t):
                continue
            if board[t] is not None and _white(board[t]) != white:
                add(t)
            elif t == self.ep:
                moves.append(Move(sq, t))

    def _castle_moves(self, moves: list[Move]) -> None:
        white = self.white_to_move
        for right in (("K", "Q") if white else ("k", "q")):
            if right not in self.castling:
                continue
            k_from, k_to, r_from, _, empty = _CASTLES[right]
            if self.board[k_from] != ("K" if white else "k"):
                continue
            if self.board[r_from] != ("R" if white else "r"):
                continue
            if any(self.board[s] is not None for s in empty):
                continue
            passing = (k_from + k_to) // 2
            if any(self.attacked(s, not white) for s in (k_from, passing, k_to)):
                continue
            moves.append(Move(k_from, k_to))

    def play(self, move: Move) -> "Position":
        """Return the position after ``move`` (not checked for legality)."""
        board = list(self.board)
        white = self.white_to_move
        piece = board[move.frm]
        captured = board[move.to]
        board[move.frm] = None
        if piece in "Pp" and move.to == self.ep and captured is None:
            board[move.to - (16 if white else -16)] = None
            captured = "p"
        if move.promotion:
            piece = move.promotion.upper() if white else move.promotion
        board[move.to] = piece
        if piece in "Kk" and abs(move.to - move.frm) == 2:
            for right, (k_from, k_to, r_from, r_to, _) in _CASTLES.items():
                if k_from == move.frm and k_to == move.to:
                    board[r_to], board[r_from] = board[r_from], None
        castling = self.castling
        for sq in (move.frm, move.to):
            for right in _RIGHTS_LOST.get(sq, ""):
                castling = castling.replace(right, "")
        ep = None
        if piece in "Pp" and abs(move.to - move.frm) == 32:
            ep = (move.to + move.frm) // 2
        halfmove = 0 if piece in "Pp" or captured is not None else self.halfmove + 1
        fullmove = self.fullmove + (0 if white else 1)
        return Position(board, not white, castling, ep, halfmove, fullmove)

    def legal_moves(self) -> list[Move]:
        white = self.white_to_move
        out = []
        for move in self.pseudo_moves():
            after = self.play(move)
            if not after.attacked(after.king_square(white), not white):
                out.append(move)
        return out

    def outcome(self) -> str | None:
        """``"checkmate"`` (side to move lost), ``"stalemate"`` or None."""
        if self.legal_moves():
            return None
        return "checkmate" if self.in_check() else "stalemate"


def perft(position: Position, depth: int) -> int:
    if depth == 0:
        return 1
    moves = position.legal_moves()
    if depth == 1:
        return len(moves)
    return sum(perft(position.play(m), depth - 1) for m in moves)


def apply_move(fen: str, text: str) -> tuple[str, str | None, int]:
    """Validate ``text`` in ``fen``.

    Returns ``(new_fen, outcome, work)`` where ``work`` is the number of
    candidate moves examined (for step accounting).  Raises ValueError on an
    illegal or malformed move.
    """
    position = Position.from_fen(fen)
    move = Move.parse(text)
    legal = position.legal_moves()
    if move not in legal:
        # a bare pawn move to the last rank is ambiguous; require the piece letter
        if move.promotion is None and Move(move.frm, move.to, "q") in legal:
            raise ValueError(f"{text} needs a promotion piece")
        raise ValueError(f"{text} is not legal in this position")
    after = position.play(move)
    replies = after.legal_moves()
    outcome = None
    if not replies:
        outcome = "checkmate" if after.in_check() else "stalemate"
    return after.fen(), outcome, len(legal) + len(replies)
