"""A deterministic, single-process ledger for robot and human economic agreements.

Identities are Ed25519 keypairs with DID documents.  A proof-of-work chain
commits signed transactions.  Native contracts (ride sharing, maintenance
escrow, rewards, arbitrated escrow, game bets and time-lock commitments) run
inside an atomic, step-metered engine, and oracles feed signed facts into them.
A scripted simulator drives whole scenarios and produces replayable dumps.
"""

from .crypto import Address, KeyPair, derive_address, generate_keypair, sign, verify
from .did import DidDocument, DidRegistry
from .engine import Contract, Engine, Receipt, contract_method
from .ledger import Block, Genesis, Ledger, validate_chain, validate_dump
from .oracle import Attestation, AttestationBus, publish_attestation, verify_attestation
from .simulation import load_scenario, replay, run
from .transaction import SignedTransaction, call_payload, deploy_payload

__all__ = [
    "Address", "Attestation", "AttestationBus", "Block", "Contract", "DidDocument",
    "DidRegistry", "Engine", "Genesis", "KeyPair", "Ledger", "Receipt", "SignedTransaction",
    "call_payload", "contract_method", "deploy_payload", "derive_address", "generate_keypair",
    "load_scenario", "publish_attestation", "replay", "run", "sign", "validate_chain",
    "validate_dump", "verify", "verify_attestation",
]
