"""Two-player game with stakes held by the contract.

Each player joins by attaching the stake.  Moves are validated against the
rules (tic-tac-toe or chess) and only accepted from the player on turn.  A
terminal position settles automatically: the winner takes the pot, a draw
splits it evenly with any odd unit to the first player.

Funds cannot get stuck.  ``settle`` refunds a lone player once the join
window has passed.  It also awards the pot to the waiting player when the
player on turn has not moved for ``move_timeout`` blocks.  ``resign``
concedes.
"""

from __future__ import annotations

from . import chess, tictactoe
from ..engine import Contract, as_amount, contract_method
from ..errors import (
    ConstructorError,
    ContractUnauthorized,
    IllegalMove,
    NotYourTurn,
    StateError,
    WrongStake,
)

RULES = ("tictactoe", "chess")
TERMINAL = ("Settled", "Drawn", "Cancelled")


class GameBetting(Contract):
    kind = "game_betting"

    def __init__(self, ctx, rules, stake, move_timeout=20, join_timeout=20):
        if rules not in RULES:
            raise ConstructorError(f"rules must be one of {RULES}")
        self.rules = rules
        self.stake = as_amount(stake, "stake", ConstructorError, positive=True)
        self.move_timeout = as_amount(move_timeout, "move_timeout", ConstructorError, positive=True)
        self.join_deadline = ctx.height + as_amount(join_timeout, "join_timeout", ConstructorError,
                                                    positive=True)
        self.players: list[str] = []
        self.board = tictactoe.EMPTY_BOARD if rules == "tictactoe" else chess.START_FEN
        self.turn = 0
        self.moves: list[str] = []
        self.last_move_height = ctx.height
        self.pot = 0
        self.winner = None
        self.phase = "AwaitingPlayers"

    def state_json(self):
        return {
            "rules": self.rules,
            "stake": self.stake,
            "players": list(self.players),
            "board": self.board,
            "turn": self.turn,
            "moves": list(self.moves),
            "last_move_height": self.last_move_height,
            "move_timeout": self.move_timeout,
            "join_deadline": self.join_deadline,
            "pot": self.pot,
            "winner": self.winner,
            "phase": self.phase,
        }

    @contract_method(payable=True)
    def join(self, ctx):
        if self.phase != "AwaitingPlayers":
            raise StateError(f"game is {self.phase}")
        if ctx.sender in self.players:
            raise StateError("already joined")
        if ctx.amount != self.stake:
            raise WrongStake(f"stake is {self.stake}, got {ctx.amount}")
        self.players.append(ctx.sender)
        self.pot += ctx.amount
        ctx.emit("Joined", player=ctx.sender, stake=ctx.amount)
        if len(self.players) == 2:
            self.phase = "InPlay"
            self.last_move_height = ctx.height
            ctx.emit("GameStarted", first=self.players[0], second=self.players[1], pot=self.pot)

    def _player_index(self, ctx) -> int:
        if ctx.sender not in self.players:
            raise ContractUnauthorized(f"{ctx.sender} is not a player")
        return self.players.index(ctx.sender)

    @contract_method
    def move(self, ctx, move):
        if self.phase != "InPlay":
            raise StateError(f"game is {self.phase}")
        index = self._player_index(ctx)
        if index != self.turn:
            raise NotYourTurn(f"it is player {self.turn}'s turn")
        try:
            if self.rules == "tictactoe":
                ctx.step(9)
                self.board, outcome = tictactoe.apply_move(self.board, move, "XO"[index])
            else:
                self.board, outcome, work = chess.apply_move(self.board, move)
                ctx.step(work)
        except ValueError as exc:
            raise IllegalMove(str(exc)) from None
        self.moves.append(str(move))
        self.last_move_height = ctx.height
        ctx.emit("Moved", player=ctx.sender, move=str(move))
        if outcome in ("win", "checkmate"):
            self._award(ctx, index, outcome)
        elif outcome in ("draw", "stalemate"):
            self._draw(ctx, outcome)
        else:
            self.turn = 1 - index

    def _award(self, ctx, index, reason):
        self.phase = "Settled"
        self.winner = self.players[index]
        pot, self.pot = self.pot, 0
        ctx.pay(self.winner, pot)
        ctx.emit("GameSettled", winner=self.winner, pot=pot, reason=reason)

    def _draw(self, ctx, reason):
        self.phase = "Drawn"
        half, odd = divmod(self.pot, 2)
        shares = [half + odd, half]
        self.pot = 0
        for player, share in zip(self.players, shares):
            ctx.pay(player, share)
        ctx.emit("GameDrawn", shares=shares, reason=reason)

    @contract_method
    def resign(self, ctx):
        if self.phase != "InPlay":
            raise StateError(f"game is {self.phase}")
        index = self._player_index(ctx)
        self._award(ctx, 1 - index, "resignation")

    @contract_method
    def settle(self, ctx):
        if self.phase == "AwaitingPlayers":
            if ctx.height <= self.join_deadline:
                raise StateError(f"players may join until height {self.join_deadline}")
            self.phase = "Cancelled"
            for player in self.players:
                ctx.pay(player, self.stake)
            self.pot = 0
            ctx.emit("GameCancelled", refunded=list(self.players))
        elif self.phase == "InPlay":
            if ctx.height <= self.last_move_height + self.move_timeout:
                raise StateError("the player on turn has not timed out")
            self._award(ctx, 1 - self.turn, "timeout")
        else:
            raise StateError(f"game is already {self.phase}")
