"""Hash-chained ledger with nonce replay protection and toy proof-of-work.

A single producer owns the chain.  ``submit_transaction`` may be called from any
thread; it admits a transaction into the FIFO pending pool after checking its
signature, nonce and the sender's spendable balance (committed balance minus
what already-pending transactions will spend).  ``produce_block`` drains the
pool, executes every transaction, credits the block reward, and searches a
nonce until the block hash has ``difficulty`` leading zero bits.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from . import encoding
from .crypto import ZERO_ADDRESS, Address, derive_address
from .engine import STEP_LIMIT, Engine, Receipt
from .errors import (
    BadNonce,
    BadSignature,
    DifficultyTooHigh,
    FormatError,
    InsufficientFunds,
    TxRejected,
    UnknownSender,
)
from .state import ChainEvent, WorldState
from .transaction import SignedTransaction

MAX_DIFFICULTY = 20
DEFAULT_SUPPLY = 10**9
DEFAULT_REWARD = 50
ZERO_HASH = "0" * 64
RESERVE = ZERO_ADDRESS  # holds the genesis supply not allocated to named accounts


@dataclass(frozen=True)
class Genesis:
    """Chain parameters and initial allocation.

    ``supply`` defaults to ``DEFAULT_SUPPLY``; whatever ``alloc`` does not
    assign sits in the reserve account at the zero address.
    """

    alloc: Mapping[str, int] = field(default_factory=dict)
    keys: Mapping[str, bytes] = field(default_factory=dict)
    supply: int = DEFAULT_SUPPLY
    reward: int = DEFAULT_REWARD
    chain_id: str = "rbn-local"

    def __post_init__(self):
        allocated = sum(self.alloc.values())
        if any(type(v) is not int or v < 0 for v in self.alloc.values()):
            raise ValueError("genesis balances must be non-negative integers")
        if allocated > self.supply:
            raise ValueError(f"genesis allocates {allocated} > supply {self.supply}")
        for addr, key in self.keys.items():
            if derive_address(key) != addr:
                raise ValueError(f"public key does not belong to {addr}")

    def balances(self) -> dict[str, int]:
        out = {Address(a): v for a, v in self.alloc.items()}
        reserve = self.supply - sum(out.values())
        if reserve:
            out[RESERVE] = out.get(RESERVE, 0) + reserve
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "chain_id": self.chain_id,
            "supply": self.supply,
            "reward": self.reward,
            "alloc": [[a, self.alloc[a]] for a in sorted(self.alloc)],
            "keys": [[a, self.keys[a].hex()] for a in sorted(self.keys)],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Genesis":
        try:
            if list(obj) != ["chain_id", "supply", "reward", "alloc", "keys"]:
                raise FormatError("genesis fields missing or out of order")
            return cls(
                alloc={Address(a): v for a, v in obj["alloc"]},
                keys={Address(a): bytes.fromhex(k) for a, k in obj["keys"]},
                supply=obj["supply"],
                reward=obj["reward"],
                chain_id=obj["chain_id"],
            )
        except (TypeError, ValueError, KeyError) as exc:
            raise FormatError(f"bad genesis record: {exc}") from None

    def world(self) -> WorldState:
        return WorldState(balances=self.balances(), keys=dict(self.keys))


@dataclass(frozen=True)
class Block:
    height: int
    parent_hash: str
    miner: str
    reward: int
    difficulty: int
    state_hash: str
    transactions: tuple[SignedTransaction, ...]
    nonce: int
    hash: str
    genesis: Genesis | None = None

    def header_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "height": self.height,
            "parent_hash": self.parent_hash,
            "miner": self.miner,
            "reward": self.reward,
            "difficulty": self.difficulty,
            "state_hash": self.state_hash,
            "transactions": [tx.to_json() for tx in self.transactions],
        }
        if self.genesis is not None:
            obj["genesis"] = self.genesis.to_json()
        obj["nonce"] = self.nonce
        return obj

    def to_json(self) -> dict[str, Any]:
        obj = self.header_json()
        obj["hash"] = self.hash
        return obj

    def compute_hash(self) -> str:
        return block_hash(self.header_json())

    def to_line(self) -> str:
        return encoding.canonical_json(self.to_json())

    @classmethod
    def from_json(cls, obj: Any) -> "Block":
        expected = ["height", "parent_hash", "miner", "reward", "difficulty", "state_hash",
                    "transactions", "nonce", "hash"]
        if isinstance(obj, dict) and "genesis" in obj:
            expected.insert(7, "genesis")
        if not isinstance(obj, dict) or list(obj) != expected:
            raise FormatError("block fields missing or out of order")
        for key in ("height", "reward", "difficulty", "nonce"):
            if type(obj[key]) is not int or obj[key] < 0:
                raise FormatError(f"block {key} must be a non-negative integer")
        for key in ("parent_hash", "state_hash", "hash"):
            if not _is_hash(obj[key]):
                raise FormatError(f"block {key} must be 64 lowercase hex digits")
        if not isinstance(obj["transactions"], list):
            raise FormatError("block transactions must be a list")
        try:
            miner = Address(obj["miner"])
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        return cls(
            height=obj["height"],
            parent_hash=obj["parent_hash"],
            miner=miner,
            reward=obj["reward"],
            difficulty=obj["difficulty"],
            state_hash=obj["state_hash"],
            transactions=tuple(SignedTransaction.from_json(t) for t in obj["transactions"]),
            nonce=obj["nonce"],
            hash=obj["hash"],
            genesis=Genesis.from_json(obj["genesis"]) if "genesis" in obj else None,
        )


def _is_hash(value) -> bool:
    return isinstance(value, str) and len(value) == 64 and all(c in "0123456789abcdef" for c in value)


def block_hash(header: Mapping[str, Any]) -> str:
    return encoding.sha256(encoding.canonical_json(header).encode()).hex()


def leading_zero_bits(hex_digest: str) -> int:
    value = int(hex_digest, 16)
    return len(hex_digest) * 4 - value.bit_length()


def meets_difficulty(hex_digest: str, difficulty: int) -> bool:
    return leading_zero_bits(hex_digest) >= difficulty


def seal(header: dict[str, Any], difficulty: int) -> tuple[int, str]:
    """Search nonces from 0 upward until the header hash meets ``difficulty``."""
    if difficulty > MAX_DIFFICULTY:
        raise DifficultyTooHigh(f"difficulty {difficulty} > {MAX_DIFFICULTY}")
    nonce = 0
    while True:
        header["nonce"] = nonce
        digest = block_hash(header)
        if meets_difficulty(digest, difficulty):
            return nonce, digest
        nonce += 1


def genesis_block(genesis: Genesis) -> Block:
    world = genesis.world()
    header = Block(0, ZERO_HASH, ZERO_ADDRESS, 0, 0, world.state_hash(), (), 0, "",
                   genesis).header_json()
    return Block(0, ZERO_HASH, ZERO_ADDRESS, 0, 0, world.state_hash(), (), 0,
                 block_hash(header), genesis)


def check_admission(world: WorldState, tx: SignedTransaction, *, expected_nonce: int | None = None,
                    committed_spend: int = 0) -> None:
    """Raise the typed rejection for ``tx`` against ``world``, or return None.

    ``expected_nonce`` and ``committed_spend`` account for transactions from
    the same sender that are already pending ahead of this one.
    """
    key = world.keys.get(tx.sender)
    if key is None:
        if tx.public_key is None:
            raise UnknownSender(f"no public key registered for {tx.sender}")
        if not tx.key_matches_sender():
            raise BadSignature(f"attached public key does not derive to {tx.sender}")
        key = tx.public_key
    elif tx.public_key is not None and tx.public_key != key:
        raise BadSignature("attached public key differs from the registered one")
    if not tx.signature_valid(key):
        raise BadSignature(f"signature does not verify for {tx.sender}")
    want = world.nonces.get(tx.sender, 0) if expected_nonce is None else expected_nonce
    if tx.nonce != want:
        raise BadNonce(want, tx.nonce)
    balance = world.balance(tx.sender) - committed_spend
    if tx.amount > balance:
        raise InsufficientFunds(balance, tx.amount)


@dataclass(frozen=True)
class SubmitReceipt:
    tx_hash: str
    position: int


class Ledger:
    def __init__(self, genesis: Genesis | None = None, *, step_limit: int = STEP_LIMIT):
        self.genesis = genesis or Genesis()
        self.world = self.genesis.world()
        self.engine = Engine(self.world, step_limit=step_limit)
        self.blocks: list[Block] = [genesis_block(self.genesis)]
        self.receipts: dict[str, Receipt] = {}
        self._pending: list[SignedTransaction] = []
        self._lock = threading.Lock()

    @property
    def height(self) -> int:
        return self.blocks[-1].height

    @property
    def head(self) -> Block:
        return self.blocks[-1]

    # -- admission -----------------------------------------------------------

    def _pending_from(self, sender: str) -> list[SignedTransaction]:
        return [t for t in self._pending if t.sender == sender]

    def next_nonce(self, address: str) -> int:
        with self._lock:
            return self.world.nonces.get(address, 0) + len(self._pending_from(address))

    def submit_transaction(self, tx: SignedTransaction) -> SubmitReceipt:
        with self._lock:
            ahead = self._pending_from(tx.sender)
            check_admission(
                self.world, tx,
                expected_nonce=self.world.nonces.get(tx.sender, 0) + len(ahead),
                committed_spend=sum(t.amount for t in ahead),
            )
            self._pending.append(tx)
            return SubmitReceipt(tx.tx_hash, len(self._pending) - 1)

    @property
    def pending(self) -> tuple[SignedTransaction, ...]:
        with self._lock:
            return tuple(self._pending)

    # -- production ----------------------------------------------------------

    def produce_block(self, miner: str, difficulty: int = 0) -> Block:
        if difficulty > MAX_DIFFICULTY:
            raise DifficultyTooHigh(f"difficulty {difficulty} > {MAX_DIFFICULTY}")
        miner = Address(miner)
        with self._lock:
            batch, self._pending = self._pending, []
            height = self.height + 1
            included = []
            for tx in batch:
                try:
                    check_admission(self.world, tx)
                except TxRejected:
                    continue  # only reachable if the pool was bypassed
                self.receipts[tx.tx_hash] = self.engine.apply(tx, height)
                included.append(tx)
            self.world.credit(miner, self.genesis.reward)
            header = Block(height, self.head.hash, miner, self.genesis.reward, difficulty,
                           self.world.state_hash(), tuple(included), 0, "").header_json()
            nonce, digest = seal(header, difficulty)
            block = Block(height, self.head.hash, miner, self.genesis.reward, difficulty,
                          header["state_hash"], tuple(included), nonce, digest)
            self.blocks.append(block)
            return block

    # -- reads ---------------------------------------------------------------

    def get_balance(self, address: str) -> int:
        return self.world.balance(address)

    def get_nonce(self, address: str) -> int:
        return self.world.nonces.get(address, 0)

    def contract(self, address: str):
        return self.world.contracts.get(address)

    def query_events(self, contract: str | None = None, name: str | None = None) -> list[ChainEvent]:
        return query_events(self.world.events, contract, name)

    def total_funds(self) -> int:
        return self.world.total_funds()

    def expected_supply(self) -> int:
        return self.genesis.supply + self.genesis.reward * self.height

    def dump(self) -> str:
        return dump_chain(self.blocks)

    def write_dump(self, path: str | Path) -> None:
        Path(path).write_bytes(self.dump().encode())


def query_events(events: Iterable[ChainEvent], contract: str | None = None,
                 name: str | None = None) -> list[ChainEvent]:
    return [
        e for e in events
        if (contract is None or e.contract == contract) and (name is None or e.name == name)
    ]


# -- dumps and validation ---------------------------------------------------------

def dump_chain(blocks: Iterable[Block]) -> str:
    return "".join(b.to_line() + "\n" for b in blocks)


def parse_dump(data: bytes | str) -> list[Block]:
    """Parse a JSON-lines chain dump; any deviation from canonical form is a FormatError."""
    blocks, error = _parse_lines(data)
    if error is not None:
        raise FormatError(f"line {error[0] + 1}: {error[1]}")
    return blocks


def _parse_lines(data: bytes | str) -> tuple[list[Block], tuple[int, str] | None]:
    raw = data.encode() if isinstance(data, str) else bytes(data)
    if not raw:
        return [], (0, "empty dump")
    lines = raw.split(b"\n")
    if lines[-1] != b"":
        return [], (len(lines) - 1, "dump truncated: last line lacks a newline")
    lines.pop()
    blocks = []
    for i, line in enumerate(lines):
        try:
            text = line.decode("ascii")
            obj = json.loads(text)
            block = Block.from_json(obj)
        except (UnicodeDecodeError, json.JSONDecodeError, FormatError, RecursionError) as exc:
            return blocks, (i, f"unparseable block: {exc}")
        if block.to_line() != text:
            return blocks, (i, "block is not in canonical encoding")
        blocks.append(block)
    return blocks, None


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    height: int | None = None
    reason: str | None = None
    head_height: int | None = None
    state_hash: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "violation_height": self.height,
            "reason": self.reason,
            "head_height": self.head_height,
            "state_hash": self.state_hash,
        }


def replay_chain(blocks: list[Block], *, step_limit: int = STEP_LIMIT
                 ) -> tuple[ValidationReport, WorldState | None, dict[str, Receipt]]:
    """Re-verify every block and re-execute every transaction from genesis."""
    receipts: dict[str, Receipt] = {}

    def fail(h, why, world=None):
        return ValidationReport(False, h, why), world, receipts

    if not blocks:
        return fail(0, "chain is empty")
    first = blocks[0]
    if first.height != 0 or first.genesis is None:
        return fail(0, "first block is not a genesis block")
    if first.compute_hash() != first.hash:
        return fail(0, "hash mismatch")
    if first.parent_hash != ZERO_HASH or first.transactions or first.reward or first.difficulty:
        return fail(0, "malformed genesis block")
    genesis = first.genesis
    world = genesis.world()
    if world.state_hash() != first.state_hash:
        return fail(0, "state hash mismatch")
    engine = Engine(world, step_limit=step_limit)
    for i, block in enumerate(blocks[1:], start=1):
        if block.genesis is not None:
            return fail(i, "unexpected genesis record", world)
        if block.height != i:
            return fail(i, f"height {block.height} out of sequence", world)
        if block.parent_hash != blocks[i - 1].hash:
            return fail(i, "parent hash does not link to previous block", world)
        if block.compute_hash() != block.hash:
            return fail(i, "hash mismatch", world)
        if block.difficulty > MAX_DIFFICULTY or not meets_difficulty(block.hash, block.difficulty):
            return fail(i, "hash does not meet difficulty", world)
        if block.reward != genesis.reward:
            return fail(i, f"reward {block.reward} differs from chain reward {genesis.reward}", world)
        seen = set()
        for tx in block.transactions:
            if (tx.sender, tx.nonce) in seen:
                return fail(i, f"duplicate nonce {tx.nonce} from {tx.sender}", world)
            seen.add((tx.sender, tx.nonce))
            try:
                check_admission(world, tx)
            except TxRejected as exc:
                return fail(i, f"transaction rejected: {exc.reason}: {exc}", world)
            receipts[tx.tx_hash] = engine.apply(tx, i)
        world.credit(block.miner, block.reward)
        if world.state_hash() != block.state_hash:
            return fail(i, "state hash mismatch after re-execution", world)
    expected = genesis.supply + genesis.reward * (len(blocks) - 1)
    if world.total_funds() != expected:
        return fail(len(blocks) - 1, "conservation violated", world)
    report = ValidationReport(True, None, None, len(blocks) - 1, world.state_hash())
    return report, world, receipts


def validate_chain(chain: list[Block] | Ledger) -> ValidationReport:
    blocks = chain.blocks if isinstance(chain, Ledger) else list(chain)
    return replay_chain(blocks)[0]


def validate_dump(data: bytes | str) -> ValidationReport:
    """Validate a raw dump; parse failures are reported at the offending line's height."""
    blocks, error = _parse_lines(data)
    if error is not None:
        return ValidationReport(False, error[0], error[1])
    return validate_chain(blocks)
