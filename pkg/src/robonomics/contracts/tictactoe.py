"""Tic-tac-toe rules. The board is a 9-character string of ``X``, ``O`` and ``.``."""

EMPTY_BOARD = "." * 9
LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)


def winner(board: str) -> str | None:
    for a, b, c in LINES:
        if board[a] != "." and board[a] == board[b] == board[c]:
            return board[a]
    return None


def apply_move(board: str, cell, mark: str) -> tuple[str, str | None]:
    """Place ``mark`` on ``cell`` (0-8). Returns ``(board, outcome)``.

    ``outcome`` is ``"win"`` (mover won), ``"draw"`` or None.
    """
    if isinstance(cell, str) and cell.isdigit() and len(cell) == 1:
        cell = int(cell)
    if type(cell) is not int or not 0 <= cell <= 8:
        raise ValueError(f"cell must be 0-8, got {cell!r}")
    if board[cell] != ".":
        raise ValueError(f"cell {cell} is taken")
    board = board[:cell] + mark + board[cell + 1:]
    if winner(board) == mark:
        return board, "win"
    if "." not in board:
        return board, "draw"
    return board, None
