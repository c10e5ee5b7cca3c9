"""Ed25519 keys, account addresses and signatures."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from .errors import KeyFormatError, SeedLengthError

SEED_LENGTH = 32
PUBLIC_KEY_LENGTH = 32
SIGNATURE_LENGTH = 64
ADDRESS_LENGTH = 20

_ADDRESS_RE = re.compile(r"^0x[0-9a-f]{40}$")


class Address(str):
    """A 20-byte account identifier, held in its ``0x``-prefixed lowercase hex form."""

    def __new__(cls, value: str | bytes) -> "Address":
        if isinstance(value, Address):
            return value
        if isinstance(value, (bytes, bytearray)):
            if len(value) != ADDRESS_LENGTH:
                raise KeyFormatError(f"address must be {ADDRESS_LENGTH} bytes, got {len(value)}")
            value = "0x" + bytes(value).hex()
        if not isinstance(value, str) or not _ADDRESS_RE.match(value):
            raise KeyFormatError(f"malformed address {value!r}")
        return super().__new__(cls, value)

    @property
    def raw(self) -> bytes:
        return bytes.fromhex(self[2:])

    def __repr__(self) -> str:
        return f"Address({str.__repr__(self)})"


ZERO_ADDRESS = Address(bytes(ADDRESS_LENGTH))


def is_address(value) -> bool:
    return isinstance(value, str) and bool(_ADDRESS_RE.match(value))


@dataclass(frozen=True)
class KeyPair:
    secret_key: bytes
    public_key: bytes

    @property
    def address(self) -> Address:
        return derive_address(self.public_key)

    def sign(self, message: bytes) -> bytes:
        return sign(message, self.secret_key)

    def __repr__(self) -> str:
        return f"KeyPair(address={self.address!s})"


def generate_keypair(seed: bytes) -> KeyPair:
    """Deterministic keypair from 32 bytes of entropy (the Ed25519 secret seed)."""
    if not isinstance(seed, (bytes, bytearray)) or len(seed) != SEED_LENGTH:
        length = len(seed) if isinstance(seed, (bytes, bytearray, str)) else "?"
        raise SeedLengthError(f"seed must be exactly {SEED_LENGTH} bytes, got {length}")
    private = Ed25519PrivateKey.from_private_bytes(bytes(seed))
    public = private.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return KeyPair(secret_key=bytes(seed), public_key=public)


def derive_address(public_key: bytes) -> Address:
    """Last 20 bytes of SHA3-256 over the raw public key."""
    if not isinstance(public_key, (bytes, bytearray)) or len(public_key) != PUBLIC_KEY_LENGTH:
        raise KeyFormatError("public key must be 32 raw bytes")
    return Address(hashlib.sha3_256(bytes(public_key)).digest()[-ADDRESS_LENGTH:])


def sign(message: bytes, secret_key: bytes) -> bytes:
    if len(secret_key) != SEED_LENGTH:
        raise KeyFormatError("secret key must be 32 bytes")
    return Ed25519PrivateKey.from_private_bytes(bytes(secret_key)).sign(bytes(message))


def verify(signature: bytes, message: bytes, public_key: bytes) -> bool:
    if (
        not isinstance(signature, (bytes, bytearray))
        or not isinstance(public_key, (bytes, bytearray))
        or len(signature) != SIGNATURE_LENGTH
        or len(public_key) != PUBLIC_KEY_LENGTH
    ):
        return False
    try:
        Ed25519PublicKey.from_public_bytes(bytes(public_key)).verify(bytes(signature), bytes(message))
    except (InvalidSignature, ValueError):
        return False
    return True


def seed_from_label(master_seed: bytes, label: str) -> bytes:
    """Derive a per-agent 32-byte seed from a scenario seed and an alias."""
    return hashlib.sha256(bytes(master_seed) + b"/" + label.encode()).digest()
