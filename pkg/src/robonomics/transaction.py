"""Signed transactions and contract-call payloads."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from . import encoding
from .crypto import Address, KeyPair, derive_address, verify
from .errors import FormatError

CALL = "call"
DEPLOY = "deploy"


@dataclass(frozen=True)
class Payload:
    """A contract call (``action="call"``, ``name`` = method) or a deployment
    (``action="deploy"``, ``name`` = contract kind)."""

    action: str
    name: str
    args: Mapping[str, Any]

    def encode(self) -> bytes:
        return encoding.encode([self.action, self.name, dict(self.args)])

    @classmethod
    def decode(cls, raw: bytes) -> "Payload":
        try:
            value = encoding.decode(raw)
        except (ValueError, UnicodeDecodeError) as exc:
            raise FormatError(f"undecodable payload: {exc}") from None
        if (
            not isinstance(value, list)
            or len(value) != 3
            or value[0] not in (CALL, DEPLOY)
            or not isinstance(value[1], str)
            or not isinstance(value[2], dict)
        ):
            raise FormatError("payload must be [action, name, args]")
        return cls(value[0], value[1], value[2])


def call_payload(method: str, **args) -> bytes:
    return Payload(CALL, method, args).encode()


def deploy_payload(kind: str, **args) -> bytes:
    return Payload(DEPLOY, kind, args).encode()


@dataclass(frozen=True)
class SignedTransaction:
    sender: Address
    to: Address | None
    nonce: int
    amount: int
    payload: bytes | None
    signature: bytes
    public_key: bytes | None = None

    @staticmethod
    def signing_bytes_for(sender, to, nonce, amount, payload) -> bytes:
        return encoding.encode(["rbn-tx", str(sender), None if to is None else str(to),
                                nonce, amount, payload])

    def signing_bytes(self) -> bytes:
        return self.signing_bytes_for(self.sender, self.to, self.nonce, self.amount, self.payload)

    @classmethod
    def create(cls, keypair: KeyPair, to: str | None, nonce: int, amount: int = 0,
               payload: bytes | None = None, include_key: bool = True) -> "SignedTransaction":
        sender = keypair.address
        to = Address(to) if to is not None else None
        message = cls.signing_bytes_for(sender, to, nonce, amount, payload)
        return cls(sender, to, nonce, amount, payload, keypair.sign(message),
                   keypair.public_key if include_key else None)

    @property
    def tx_hash(self) -> str:
        return encoding.json_digest(self.to_json())

    def decoded_payload(self) -> Payload | None:
        return None if self.payload is None else Payload.decode(self.payload)

    def signature_valid(self, public_key: bytes) -> bool:
        return verify(self.signature, self.signing_bytes(), public_key)

    def key_matches_sender(self) -> bool:
        return self.public_key is not None and derive_address(self.public_key) == self.sender

    def to_json(self) -> dict[str, Any]:
        return {
            "from": str(self.sender),
            "to": None if self.to is None else str(self.to),
            "nonce": self.nonce,
            "amount": self.amount,
            "payload": None if self.payload is None else self.payload.hex(),
            "public_key": None if self.public_key is None else self.public_key.hex(),
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "SignedTransaction":
        if not isinstance(obj, dict) or list(obj) != [
            "from", "to", "nonce", "amount", "payload", "public_key", "signature",
        ]:
            raise FormatError("transaction fields missing or out of order")
        try:
            nonce, amount = obj["nonce"], obj["amount"]
            if type(nonce) is not int or type(amount) is not int or nonce < 0 or amount < 0:
                raise FormatError("nonce and amount must be non-negative integers")
            return cls(
                sender=Address(obj["from"]),
                to=None if obj["to"] is None else Address(obj["to"]),
                nonce=nonce,
                amount=amount,
                payload=None if obj["payload"] is None else _hex(obj["payload"]),
                signature=_hex(obj["signature"]),
                public_key=None if obj["public_key"] is None else _hex(obj["public_key"]),
            )
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad transaction: {exc}") from None


def _hex(value) -> bytes:
    if not isinstance(value, str) or value != value.lower():
        raise FormatError("hex fields must be lowercase strings")
    return bytes.fromhex(value)
