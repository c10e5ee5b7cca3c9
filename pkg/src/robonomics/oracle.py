"""Signed attestations from a designated data-source identity.

Attestations travel off-chain on an :class:`AttestationBus` and are checked
on-chain by signature only.  A contract that consumes them pins the oracle's
address at construction.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any, Mapping

from . import encoding
from .crypto import Address, KeyPair, derive_address, verify
from .errors import KeyFormatError, Unauthorized


def attestation_message(subject: str, value: Any, height: int) -> bytes:
    return encoding.encode(["rbn-attestation", subject, value, height])


def service_subject(vehicle: str, obligations_digest: str) -> str:
    return f"service-ok:{vehicle}:{obligations_digest}"


def obligations_digest(obligations: str) -> str:
    return encoding.sha256(obligations.encode("utf-8")).hex()


@dataclass(frozen=True)
class Attestation:
    oracle: Address
    subject: str
    value: Any
    height: int
    public_key: bytes
    signature: bytes

    def to_json(self) -> dict[str, Any]:
        return {
            "oracle": self.oracle,
            "subject": self.subject,
            "value": self.value,
            "height": self.height,
            "public_key": self.public_key.hex(),
            "signature": self.signature.hex(),
        }

    def canonical(self) -> str:
        return encoding.canonical_json(self.to_json())

    def to_payload(self) -> dict[str, Any]:
        """The form passed as a contract-call argument (raw bytes, not hex)."""
        return {
            "oracle": str(self.oracle),
            "subject": self.subject,
            "value": self.value,
            "height": self.height,
            "public_key": self.public_key,
            "signature": self.signature,
        }

    @classmethod
    def from_payload(cls, obj: Mapping[str, Any]) -> "Attestation":
        if not isinstance(obj, Mapping):
            raise ValueError("attestation must be a map")
        try:
            return cls(
                oracle=Address(obj["oracle"]),
                subject=str(obj["subject"]),
                value=obj["value"],
                height=int(obj["height"]),
                public_key=bytes(obj["public_key"]),
                signature=bytes(obj["signature"]),
            )
        except (KeyError, TypeError, KeyFormatError) as exc:
            raise ValueError(f"malformed attestation: {exc}") from None

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Attestation":
        return cls(
            oracle=Address(obj["oracle"]),
            subject=obj["subject"],
            value=obj["value"],
            height=obj["height"],
            public_key=bytes.fromhex(obj["public_key"]),
            signature=bytes.fromhex(obj["signature"]),
        )


def publish_attestation(keypair: KeyPair, subject: str, value: Any, height: int) -> Attestation:
    signature = keypair.sign(attestation_message(subject, value, height))
    return Attestation(keypair.address, subject, value, height, keypair.public_key, signature)


def verify_attestation(att: Attestation, expected_oracle: str) -> bool:
    try:
        key_owner = derive_address(att.public_key)
    except KeyFormatError:
        return False
    if att.oracle != expected_oracle or key_owner != expected_oracle:
        return False
    try:
        message = attestation_message(att.subject, att.value, att.height)
    except TypeError:
        return False
    return verify(att.signature, message, att.public_key)


class AttestationBus:
    """Append-only attestation store shared by the agents of one simulation."""

    def __init__(self):
        self._oracles: set[str] = set()
        self._log: list[Attestation] = []
        self._lock = threading.Lock()

    def register_oracle(self, address: str) -> None:
        self._oracles.add(Address(address))

    def publish(self, keypair: KeyPair, subject: str, value: Any, height: int) -> Attestation:
        if keypair.address not in self._oracles:
            raise Unauthorized(f"{keypair.address} is not a registered oracle")
        att = publish_attestation(keypair, subject, value, height)
        with self._lock:
            self._log.append(att)
        return att

    def query_latest(self, subject: str) -> Attestation | None:
        best = None
        for att in self._log:
            if att.subject == subject and (best is None or att.height >= best.height):
                best = att
        return best

    def latest(self) -> Attestation | None:
        return self._log[-1] if self._log else None

    def all(self) -> list[Attestation]:
        return list(self._log)
