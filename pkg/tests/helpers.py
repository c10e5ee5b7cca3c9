"""Small driver used across the suite: named keypairs plus a ledger you can poke."""

from __future__ import annotations

from robonomics.crypto import generate_keypair, seed_from_label
from robonomics.engine import Engine
from robonomics.ledger import Genesis, Ledger
from robonomics.state import WorldState
from robonomics.transaction import SignedTransaction, call_payload, deploy_payload

MASTER = bytes(32)


def key(name: str, master: bytes = MASTER):
    return generate_keypair(seed_from_label(master, name))


def addr(name: str) -> str:
    return key(name).address


class Chain:
    """Wraps a Ledger; ``send`` signs with the next free nonce and queues the tx."""

    def __init__(self, balances: dict[str, int] | None = None, supply: int = 10**6,
                 reward: int = 50):
        alloc = {addr(n): v for n, v in (balances or {}).items()}
        self.ledger = Ledger(Genesis(alloc=alloc, supply=supply, reward=reward))
        self.miner = addr("miner")

    def tx(self, who: str, to=None, amount=0, payload=None, nonce=None):
        kp = key(who)
        if nonce is None:
            nonce = self.ledger.next_nonce(kp.address)
        return SignedTransaction.create(kp, to, nonce, amount, payload)

    def send(self, who, to=None, amount=0, payload=None):
        tx = self.tx(who, to, amount, payload)
        self.ledger.submit_transaction(tx)
        return tx

    def deploy(self, who, kind, amount=0, **args):
        tx = self.send(who, None, amount, deploy_payload(kind, **args))
        self.mine()
        receipt = self.ledger.receipts[tx.tx_hash]
        assert receipt.ok, receipt
        return receipt.contract

    def call(self, who, contract, method, amount=0, **args):
        """Call in its own block and return the receipt."""
        tx = self.send(who, contract, amount, call_payload(method, **args))
        self.mine()
        return self.ledger.receipts[tx.tx_hash]

    def mine(self, n: int = 1):
        for _ in range(n):
            self.ledger.produce_block(self.miner)

    def mine_to(self, height: int):
        while self.ledger.height < height:
            self.mine()

    def balance(self, name: str) -> int:
        return self.ledger.get_balance(addr(name))

    def state(self, contract):
        return self.ledger.contract(contract).state


def engine_with(balances: dict[str, int]) -> Engine:
    """A bare engine over a world with the given (named) balances."""
    return Engine(WorldState(balances={addr(n): v for n, v in balances.items()}))


class Desk:
    """Engine-level driver: explicit heights, contract errors raise."""

    def __init__(self, balances: dict[str, int]):
        self.engine = engine_with(balances)
        self._nonce = 0

    def deploy(self, who, kind, at=1, amount=0, **args):
        self._nonce += 1
        return self.engine.deploy(addr(who), kind, args, amount, at, self._nonce)

    def call(self, who, contract, method, at, amount=0, **args):
        return self.engine.call(addr(who), contract, method, args, amount, at)

    def balance(self, name):
        return self.engine.world.balance(addr(name))

    def state(self, contract):
        return self.engine.world.contracts[contract].state

    def held(self, contract):
        return self.engine.world.contracts[contract].held_funds

    def events(self, name=None):
        return [e for e in self.engine.world.events if name is None or e.name == name]
