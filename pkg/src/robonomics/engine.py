"""Deterministic contract execution.

Contracts are native Python state machines registered by ``kind``.  A call runs
the contract's transition method against a :class:`CallContext`; every call is
atomic (balances, contract state and the event log are restored on any
exception) and bounded by a step counter standing in for gas.
"""

from __future__ import annotations

import copy
import hashlib
import inspect
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar

from . import encoding
from .crypto import Address, is_address
from .errors import (
    BadArguments,
    ConstructorError,
    ContractError,
    ContractUnauthorized,
    InsufficientFunds,
    InsufficientTokenBalance,
    MethodNotFound,
    NotPayable,
    StepLimitExceeded,
)
from .state import ChainEvent, ContractInstance, WorldState
from .transaction import CALL, DEPLOY, Payload, SignedTransaction

STEP_LIMIT = 1_000_000

_REGISTRY: dict[str, type["Contract"]] = {}


def contract_method(fn=None, *, payable: bool = False):
    """Mark a Contract method as callable from transactions."""
    def mark(f):
        f.__contract_method__ = {"payable": payable}
        return f
    return mark(fn) if fn is not None else mark


class Contract:
    """Base class for contract kinds.

    Subclasses set ``kind``, implement ``__init__(self, ctx, **args)`` as the
    constructor and ``state_json``, and expose transitions with
    :func:`contract_method`.  Instances must not keep a reference to ``ctx``.
    """

    kind: ClassVar[str] = ""
    payable_constructor: ClassVar[bool] = False
    methods: ClassVar[dict[str, dict]] = {}

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        cls.methods = {
            name: fn.__contract_method__
            for name, fn in inspect.getmembers(cls, inspect.isfunction)
            if hasattr(fn, "__contract_method__")
        }
        if cls.kind:
            _REGISTRY[cls.kind] = cls

    def state_json(self) -> dict[str, Any]:
        raise NotImplementedError


def contract_kinds() -> dict[str, type[Contract]]:
    from . import contracts  # noqa: F401  (registers the scenario contracts)
    return dict(_REGISTRY)


def contract_address(deployer: str, nonce: int) -> Address:
    digest = hashlib.sha3_256(encoding.encode(["rbn-contract", str(deployer), nonce])).digest()
    return Address(digest[-20:])


def as_address(value, what: str = "address", error=BadArguments) -> Address:
    if not is_address(value):
        raise error(f"{what} must be a 0x-prefixed 20-byte hex address, got {value!r}")
    return Address(value)


def as_amount(value, what: str = "amount", error=BadArguments, positive: bool = False) -> int:
    if type(value) is not int or value < 0 or (positive and value == 0):
        kind = "positive" if positive else "non-negative"
        raise error(f"{what} must be a {kind} integer, got {value!r}")
    return value


class CallContext:
    """What a contract sees while one of its transitions runs."""

    def __init__(self, engine: "Engine", instance: ContractInstance, sender: str,
                 amount: int, height: int):
        self._engine = engine
        self._instance = instance
        self.sender = Address(sender)
        self.amount = amount
        self.height = height
        self.address = Address(instance.address)

    @property
    def held_funds(self) -> int:
        return self._instance.held_funds

    def step(self, n: int = 1) -> None:
        self._engine._tick(n)

    def emit(self, name: str, **fields) -> None:
        self.step()
        self._engine.world.append_event(ChainEvent(self.height, self.address, name, fields))

    def pay(self, to: str, amount: int) -> None:
        """Move ``amount`` of the contract's held funds to account ``to``."""
        self.step()
        if amount < 0 or amount > self._instance.held_funds:
            raise ContractError(f"payout {amount} exceeds held funds {self._instance.held_funds}")
        if amount == 0:
            return
        self._instance.held_funds -= amount
        self._engine.world.credit(str(to), amount)

    def require(self, condition: bool, error: type[ContractError], message: str) -> None:
        self.step()
        if not condition:
            raise error(message)

    def only(self, *parties: str) -> None:
        if self.sender not in parties:
            raise ContractUnauthorized(f"{self.sender} may not call this method")

    def public_key_of(self, address: str) -> bytes | None:
        return self._engine.world.keys.get(str(address))


@dataclass(frozen=True)
class Receipt:
    tx_hash: str
    height: int
    status: str  # "ok" | "failed"
    error: str | None = None
    message: str | None = None
    result: Any = None
    contract: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> dict[str, Any]:
        return {
            "tx_hash": self.tx_hash,
            "height": self.height,
            "status": self.status,
            "error": self.error,
            "message": self.message,
            "result": self.result,
            "contract": self.contract,
        }


@dataclass
class Engine:
    world: WorldState
    step_limit: int = STEP_LIMIT
    fault_hook: Callable[[int], None] | None = None
    _steps: int = field(default=0, repr=False)

    def _tick(self, n: int) -> None:
        self._steps += n
        if self._steps > self.step_limit:
            raise StepLimitExceeded(f"call exceeded {self.step_limit} steps")
        if self.fault_hook is not None:
            self.fault_hook(self._steps)

    # -- atomic execution --------------------------------------------------

    def _atomically(self, touched: str | None, body: Callable[[], Any]) -> Any:
        world = self.world
        balances = dict(world.balances)
        instance = world.contracts.get(touched) if touched else None
        saved_state = copy.deepcopy(instance.state) if instance else None
        saved_held = instance.held_funds if instance else 0
        n_events, digest = len(world.events), world.event_digest
        contracts_before = set(world.contracts)
        self._steps = 0
        try:
            return body()
        except BaseException:
            world.balances = balances
            if instance is not None:
                instance.state = saved_state
                instance.held_funds = saved_held
            for addr in set(world.contracts) - contracts_before:
                del world.contracts[addr]
            del world.events[n_events:]
            world.event_digest = digest
            raise

    def deploy(self, sender: str, kind: str, args: dict, amount: int, height: int,
               nonce: int) -> Address:
        """Create a contract of ``kind``; ``amount`` seeds its held funds."""
        cls = contract_kinds().get(kind)
        if cls is None:
            raise ConstructorError(f"unknown contract kind {kind!r}")
        address = contract_address(sender, nonce)

        def body():
            if amount and not cls.payable_constructor:
                raise NotPayable(f"{kind} constructor does not accept funds")
            self._take(sender, amount)
            instance = ContractInstance(address, kind, None, amount, height)
            self.world.contracts[address] = instance
            ctx = CallContext(self, instance, sender, amount, height)
            try:
                sig = inspect.signature(cls.__init__)
                sig.bind(None, ctx, **args)
            except TypeError as exc:
                raise ConstructorError(f"{kind}: {exc}") from None
            try:
                instance.state = cls(ctx, **args)
            except BadArguments as exc:
                raise ConstructorError(f"{kind}: {exc}") from None
            ctx.emit("Deployed", kind=kind, deployer=str(sender))
            return address

        if address in self.world.contracts:
            raise ConstructorError(f"address {address} already hosts a contract")
        return self._atomically(None, body)

    def call(self, sender: str, address: str, method: str, args: dict, amount: int,
             height: int) -> Any:
        instance = self.world.contracts.get(address)
        if instance is None:
            raise MethodNotFound(f"no contract at {address}")
        spec = type(instance.state).methods.get(method)
        if spec is None:
            raise MethodNotFound(f"{instance.kind} has no method {method!r}")
        if amount and not spec["payable"]:
            raise NotPayable(f"{instance.kind}.{method} is not payable")
        fn = getattr(instance.state, method)
        try:
            inspect.signature(fn).bind(None, **args)
        except TypeError as exc:
            raise BadArguments(f"{instance.kind}.{method}: {exc}") from None

        def body():
            self._take(sender, amount)
            instance.held_funds += amount
            ctx = CallContext(self, instance, sender, amount, height)
            ctx.step()
            return fn(ctx, **args)

        return self._atomically(address, body)

    def transfer(self, sender: str, to: str, amount: int) -> None:
        if to in self.world.contracts:
            raise NotPayable("plain transfers to contracts are refused; call a payable method")

        def body():
            self._take(sender, amount)
            self.world.credit(to, amount)

        self._atomically(None, body)

    def _take(self, sender: str, amount: int) -> None:
        balance = self.world.balance(sender)
        if amount > balance:
            raise InsufficientFunds(balance, amount)
        if amount:
            self.world.debit(sender, amount)

    # -- transactions ------------------------------------------------------

    def apply(self, tx: SignedTransaction, height: int) -> Receipt:
        """Execute an already-admitted transaction; nonce is consumed either way."""
        world = self.world
        world.nonces[tx.sender] = world.nonces.get(tx.sender, 0) + 1
        if tx.public_key is not None and tx.sender not in world.keys:
            world.keys[tx.sender] = tx.public_key
        tx_hash = tx.tx_hash
        contract = None
        try:
            payload = tx.decoded_payload()
            if payload is None:
                if tx.to is None:
                    raise BadArguments("transaction without payload needs a recipient")
                self.transfer(tx.sender, tx.to, tx.amount)
                result = None
            elif payload.action == DEPLOY:
                contract = self.deploy(tx.sender, payload.name, dict(payload.args), tx.amount,
                                       height, tx.nonce)
                result = contract
            else:
                if tx.to is None:
                    raise BadArguments("contract call needs a target address")
                result = self.call(tx.sender, tx.to, payload.name, dict(payload.args),
                                   tx.amount, height)
        except Exception as exc:  # any failure reverts; the reason goes in the receipt
            reason = exc.reason if hasattr(exc, "reason") else type(exc).__name__
            return Receipt(tx_hash, height, "failed", reason, str(exc), None, None)
        return Receipt(tx_hash, height, "ok", None, None, result, contract)


# -- fungible tokens ------------------------------------------------------------

@dataclass
class TokenLedger:
    symbol: str
    owner: str
    total_supply: int = 0
    balances: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "symbol": self.symbol,
            "owner": self.owner,
            "total_supply": self.total_supply,
            "balances": [[a, self.balances[a]] for a in sorted(self.balances) if self.balances[a]],
        }


def token_mint(ledger: TokenLedger, to: str, amount: int, caller: str,
               emit: Callable[..., None] | None = None) -> None:
    if caller != ledger.owner:
        raise ContractUnauthorized(f"only {ledger.owner} may mint {ledger.symbol}")
    as_amount(amount)
    ledger.balances[to] = ledger.balances.get(to, 0) + amount
    ledger.total_supply += amount
    if emit:
        emit("TokenTransfer", symbol=ledger.symbol, **{"from": None}, to=str(to), amount=amount)


def token_transfer(ledger: TokenLedger, sender: str, to: str, amount: int,
                   emit: Callable[..., None] | None = None) -> None:
    as_amount(amount)
    have = ledger.balances.get(sender, 0)
    if amount > have:
        raise InsufficientTokenBalance(f"{sender} holds {have} {ledger.symbol}, needs {amount}")
    ledger.balances[sender] = have - amount
    ledger.balances[to] = ledger.balances.get(to, 0) + amount
    if emit:
        emit("TokenTransfer", symbol=ledger.symbol, **{"from": str(sender)}, to=str(to),
             amount=amount)


def token_balance(ledger: TokenLedger, address: str) -> int:
    return ledger.balances.get(address, 0)


class TokenContract(Contract):
    """Minimal fungible token: the deployer is the minting authority."""

    kind = "token"

    def __init__(self, ctx: CallContext, symbol: str):
        if not isinstance(symbol, str) or not symbol:
            raise ConstructorError("token symbol must be a non-empty string")
        self.ledger = TokenLedger(symbol=symbol, owner=str(ctx.sender))

    def state_json(self):
        return self.ledger.to_json()

    @contract_method
    def mint(self, ctx, to, amount):
        token_mint(self.ledger, as_address(to), amount, ctx.sender, ctx.emit)

    @contract_method
    def transfer(self, ctx, to, amount):
        token_transfer(self.ledger, ctx.sender, as_address(to), amount, ctx.emit)

    @contract_method
    def balance_of(self, ctx, address):
        return token_balance(self.ledger, as_address(address))


__all__ = [
    "CALL", "DEPLOY", "CallContext", "Contract", "Engine", "Payload", "Receipt", "STEP_LIMIT",
    "TokenContract", "TokenLedger", "contract_address", "contract_kinds", "contract_method",
    "token_balance", "token_mint", "token_transfer",
]
