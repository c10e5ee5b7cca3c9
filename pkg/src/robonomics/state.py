"""Committed world state: accounts, registered keys, contracts and the event log."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Mapping

from . import encoding


@dataclass(frozen=True)
class ChainEvent:
    block_height: int
    contract: str
    name: str
    fields: Mapping[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {
            "block_height": self.block_height,
            "contract": self.contract,
            "name": self.name,
            "fields": dict(self.fields),
        }


@dataclass
class ContractInstance:
    address: str
    kind: str
    state: Any  # a robonomics.engine.Contract
    held_funds: int = 0
    created_at: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "address": self.address,
            "kind": self.kind,
            "created_at": self.created_at,
            "held_funds": self.held_funds,
            "state": self.state.state_json(),
        }


@dataclass
class AccountState:
    balance: int = 0
    nonce: int = 0


@dataclass
class WorldState:
    balances: dict[str, int] = field(default_factory=dict)
    nonces: dict[str, int] = field(default_factory=dict)
    keys: dict[str, bytes] = field(default_factory=dict)
    contracts: dict[str, ContractInstance] = field(default_factory=dict)
    events: list[ChainEvent] = field(default_factory=list)
    event_digest: str = "0" * 64

    def balance(self, address: str) -> int:
        return self.balances.get(address, 0)

    def account(self, address: str) -> AccountState:
        return AccountState(self.balances.get(address, 0), self.nonces.get(address, 0))

    def credit(self, address: str, amount: int) -> None:
        self.balances[address] = self.balances.get(address, 0) + amount

    def debit(self, address: str, amount: int) -> None:
        balance = self.balances.get(address, 0)
        if amount > balance:
            raise AssertionError("debit below zero")  # callers check first
        self.balances[address] = balance - amount

    def append_event(self, event: ChainEvent) -> None:
        self.events.append(event)
        blob = bytes.fromhex(self.event_digest) + encoding.canonical_json(event.to_json()).encode()
        self.event_digest = hashlib.sha256(blob).hexdigest()

    def total_funds(self) -> int:
        return sum(self.balances.values()) + sum(c.held_funds for c in self.contracts.values())

    def to_json(self) -> dict[str, Any]:
        accounts = sorted(set(self.balances) | set(self.nonces))
        return {
            "accounts": [[a, self.balances.get(a, 0), self.nonces.get(a, 0)] for a in accounts],
            "keys": [[a, self.keys[a].hex()] for a in sorted(self.keys)],
            "contracts": [self.contracts[a].to_json() for a in sorted(self.contracts)],
            "event_count": len(self.events),
            "event_digest": self.event_digest,
        }

    def state_hash(self) -> str:
        return encoding.json_digest(self.to_json())
