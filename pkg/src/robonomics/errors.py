"""Exception hierarchy shared by every layer of the ledger."""


class RobonomicsError(Exception):
    """Base class. ``reason`` is the short machine-readable name."""

    @property
    def reason(self) -> str:
        return type(self).__name__


# -- keys and identity --------------------------------------------------------

class SeedLengthError(RobonomicsError, ValueError):
    pass


class KeyFormatError(RobonomicsError, ValueError):
    pass


class NotFound(RobonomicsError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class Unauthorized(RobonomicsError):
    pass


class Deactivated(RobonomicsError):
    pass


# -- transaction admission ----------------------------------------------------

class TxRejected(RobonomicsError):
    """A transaction refused by ``submit_transaction`` or block validation."""


class BadSignature(TxRejected):
    pass


class UnknownSender(TxRejected):
    pass


class BadNonce(TxRejected):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected nonce {expected}, got {got}")
        self.expected = expected
        self.got = got


class InsufficientFunds(TxRejected):
    def __init__(self, balance: int, needed: int):
        super().__init__(f"balance {balance} < needed {needed}")
        self.balance = balance
        self.needed = needed


class DifficultyTooHigh(RobonomicsError, ValueError):
    pass


# -- contract execution -------------------------------------------------------

class ContractError(RobonomicsError):
    """Any failure inside a contract call; the call's effects are rolled back."""


class ConstructorError(ContractError):
    pass


class MethodNotFound(ContractError):
    pass


class StateError(ContractError):
    pass


class ContractUnauthorized(ContractError, Unauthorized):
    @property
    def reason(self) -> str:
        return "Unauthorized"


class StepLimitExceeded(ContractError):
    pass


class NotPayable(ContractError):
    pass


class WrongAmount(ContractError):
    pass


class WrongStake(WrongAmount):
    pass


class InsufficientTokenBalance(ContractError):
    pass


class BadAttestation(ContractError):
    pass


class Expired(ContractError):
    pass


class DoubleVote(ContractError):
    pass


class IllegalMove(ContractError):
    pass


class NotYourTurn(ContractError):
    pass


class BadArguments(ContractError):
    pass


# -- scenarios and dumps ------------------------------------------------------

class ParseError(RobonomicsError, ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class UnknownAlias(ParseError):
    pass


class UnsortedSteps(ParseError):
    pass


class FormatError(RobonomicsError, ValueError):
    pass


class ValidationFailure(RobonomicsError):
    def __init__(self, height: int, reason: str):
        super().__init__(f"height {height}: {reason}")
        self.height = height
        self.detail = reason
