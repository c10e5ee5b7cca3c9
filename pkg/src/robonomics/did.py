"""Decentralized identifiers (``did:rbn:<address>``) and a single-writer registry."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from . import encoding
from .crypto import Address, KeyPair, derive_address, is_address, verify
from .errors import Deactivated, KeyFormatError, NotFound, Unauthorized

DID_PREFIX = "did:rbn:"

_CHANGE_KEYS = {"attributes", "service_endpoints", "controller"}


def did_for(address: str) -> str:
    return DID_PREFIX + Address(address)


def address_of(did: str) -> Address:
    if not did.startswith(DID_PREFIX):
        raise KeyFormatError(f"not a did:rbn identifier: {did!r}")
    return Address(did[len(DID_PREFIX):])


@dataclass(frozen=True)
class DidDocument:
    did: str
    controller: Address | None
    public_key: bytes
    attributes: Mapping[str, str] = field(default_factory=dict)
    service_endpoints: tuple[str, ...] = ()
    active: bool = True
    version: int = 1

    def to_json(self) -> dict[str, Any]:
        return {
            "did": self.did,
            "controller": self.controller,
            "public_key": self.public_key.hex(),
            "attributes": dict(self.attributes),
            "service_endpoints": list(self.service_endpoints),
            "active": self.active,
            "version": self.version,
        }

    def canonical(self) -> str:
        return encoding.canonical_json(self.to_json())

    def digest(self) -> str:
        return encoding.json_digest(self.to_json())

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "DidDocument":
        controller = obj.get("controller")
        return cls(
            did=obj["did"],
            controller=Address(controller) if controller is not None else None,
            public_key=bytes.fromhex(obj["public_key"]),
            attributes=dict(obj.get("attributes", {})),
            service_endpoints=tuple(obj.get("service_endpoints", ())),
            active=bool(obj["active"]),
            version=int(obj["version"]),
        )


def update_message(did: str, version: int, changes: Mapping[str, Any]) -> bytes:
    """Bytes the owner or controller signs to move ``did`` past ``version``."""
    return encoding.encode(["rbn-did-update", did, version, dict(changes)])


def deactivate_message(did: str, version: int) -> bytes:
    return encoding.encode(["rbn-did-deactivate", did, version])


def sign_update(keypair: KeyPair, doc: DidDocument, changes: Mapping[str, Any]) -> bytes:
    return keypair.sign(update_message(doc.did, doc.version, changes))


def sign_deactivate(keypair: KeyPair, doc: DidDocument) -> bytes:
    return keypair.sign(deactivate_message(doc.did, doc.version))


def _apply_changes(doc: DidDocument, changes: Mapping[str, Any]) -> DidDocument:
    unknown = set(changes) - _CHANGE_KEYS
    if unknown:
        raise ValueError(f"unsupported DID change keys: {sorted(unknown)}")
    attributes = dict(doc.attributes)
    for key, value in dict(changes.get("attributes", {})).items():
        if value is None:
            attributes.pop(key, None)
        else:
            attributes[str(key)] = str(value)
    endpoints = doc.service_endpoints
    if "service_endpoints" in changes:
        endpoints = tuple(str(e) for e in changes["service_endpoints"])
    controller = doc.controller
    if "controller" in changes:
        controller = Address(changes["controller"]) if changes["controller"] is not None else None
    return replace(
        doc,
        attributes=attributes,
        service_endpoints=endpoints,
        controller=controller,
        version=doc.version + 1,
    )


class DidRegistry:
    """In-memory DID store. Reads are lock-free; writes take the registry lock."""

    def __init__(self):
        self._docs: dict[str, DidDocument] = {}
        self._lock = threading.Lock()

    def __contains__(self, did: str) -> bool:
        return did in self._docs

    def __len__(self) -> int:
        return len(self._docs)

    def documents(self) -> list[DidDocument]:
        return [self._docs[k] for k in sorted(self._docs)]

    def register(
        self,
        keypair: KeyPair,
        attributes: Mapping[str, str] | None = None,
        controller: str | None = None,
        service_endpoints: tuple[str, ...] = (),
    ) -> DidDocument:
        doc = DidDocument(
            did=did_for(keypair.address),
            controller=Address(controller) if controller is not None else None,
            public_key=keypair.public_key,
            attributes={str(k): str(v) for k, v in (attributes or {}).items()},
            service_endpoints=tuple(service_endpoints),
        )
        with self._lock:
            if doc.did in self._docs:
                raise ValueError(f"{doc.did} already registered")
            self._docs[doc.did] = doc
        return doc

    def resolve(self, did: str) -> DidDocument:
        try:
            return self._docs[did]
        except KeyError:
            raise NotFound(f"unknown DID {did}") from None

    def _authorized(self, doc: DidDocument, message: bytes, signature: bytes,
                    signer_public_key: bytes | None) -> bool:
        if verify(signature, message, doc.public_key):
            return True
        if doc.controller is None:
            return False
        keys = []
        controller_doc = self._docs.get(did_for(doc.controller))
        if controller_doc is not None and controller_doc.active:
            keys.append(controller_doc.public_key)
        if signer_public_key is not None and derive_address(signer_public_key) == doc.controller:
            keys.append(signer_public_key)
        return any(verify(signature, message, k) for k in keys)

    def update(self, did: str, changes: Mapping[str, Any], signature: bytes,
               signer_public_key: bytes | None = None) -> DidDocument:
        """Apply ``changes`` if signed by the document key or its controller.

        ``signer_public_key`` is only needed when the controller has no DID of
        its own in this registry.
        """
        with self._lock:
            doc = self.resolve(did)
            if not doc.active:
                raise Deactivated(did)
            message = update_message(did, doc.version, changes)
            if not self._authorized(doc, message, signature, signer_public_key):
                raise Unauthorized(f"signature does not match {did} or its controller")
            new = _apply_changes(doc, changes)
            self._docs[did] = new
            return new

    def deactivate(self, did: str, signature: bytes,
                   signer_public_key: bytes | None = None) -> DidDocument:
        with self._lock:
            doc = self.resolve(did)
            if not doc.active:
                raise Deactivated(did)
            message = deactivate_message(did, doc.version)
            if not self._authorized(doc, message, signature, signer_public_key):
                raise Unauthorized(f"signature does not match {did} or its controller")
            new = replace(doc, active=False, version=doc.version + 1)
            self._docs[did] = new
            return new


_default_registry = DidRegistry()


def register_did(keypair: KeyPair, attributes=None, controller=None,
                 registry: DidRegistry | None = None) -> DidDocument:
    return (registry or _default_registry).register(keypair, attributes, controller)


def resolve_did(did: str, registry: DidRegistry | None = None) -> DidDocument:
    return (registry or _default_registry).resolve(did)


def update_did(did: str, changes, signature: bytes, registry: DidRegistry | None = None,
               signer_public_key: bytes | None = None) -> DidDocument:
    return (registry or _default_registry).update(did, changes, signature, signer_public_key)


def deactivate_did(did: str, signature: bytes, registry: DidRegistry | None = None,
                   signer_public_key: bytes | None = None) -> DidDocument:
    return (registry or _default_registry).deactivate(did, signature, signer_public_key)


__all__ = [
    "DID_PREFIX", "DidDocument", "DidRegistry", "address_of", "deactivate_did", "did_for",
    "is_address", "register_did", "resolve_did", "sign_deactivate", "sign_update",
    "update_did",
]
