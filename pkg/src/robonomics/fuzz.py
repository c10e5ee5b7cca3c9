"""Randomized workloads for the property checks and experiment scripts.

Three drivers live here:

* :func:`conservation_run` pushes a random mix of transfers, deployments and
  contract calls through a full :class:`~robonomics.ledger.Ledger` and checks
  the monetary identity ``total funds == supply + reward * height`` after every
  block.
* :func:`exactly_once_sequence` drives a single contract on a bare engine
  with a random call sequence, counts settlement events and then checks that
  any funds still held can be recovered through a timeout or other action.
* :func:`mutate_byte` and :func:`tamper_trial` flip single bytes in a chain
  dump and ask the validator to locate the damage.

Every driver takes an explicit seed and is fully deterministic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .contracts import chess, tictactoe
from .crypto import KeyPair, generate_keypair, seed_from_label
from .engine import Engine, contract_address
from .errors import RobonomicsError, TxRejected
from .ledger import Genesis, Ledger, validate_dump
from .oracle import publish_attestation
from .state import WorldState
from .transaction import SignedTransaction, call_payload, deploy_payload

KINDS = (
    "ride_sharing",
    "maintenance_escrow",
    "unilateral_reward",
    "arbitrated_escrow",
    "game_betting",
    "time_lock_commitment",
)

# Events that move held funds out for good; a one-shot contract may emit at most one.
SETTLEMENTS = {
    "maintenance_escrow": ("Released", "Refunded"),
    "unilateral_reward": ("RewardPaid", "RewardExpired"),
    "arbitrated_escrow": ("Released", "Refunded"),
    "game_betting": ("GameSettled", "GameDrawn", "GameCancelled"),
    "time_lock_commitment": ("CommitmentExpired",),
}
RECOVERY_METHODS = ("refund_after_timeout", "expire", "timeout", "settle", "cancel_ride")
VIN = "5f" * 32


def actor_pool(n: int = 6, label: str = "fuzz") -> list[KeyPair]:
    master = seed_from_label(bytes(32), label)
    return [generate_keypair(seed_from_label(master, f"actor{i}")) for i in range(n)]


# -- per-kind argument generators -------------------------------------------------

@dataclass
class Cast:
    """The parties a contract was deployed with, by role."""

    deployer: str
    roles: dict[str, Any] = field(default_factory=dict)
    oracle: KeyPair | None = None


def deploy_args(kind: str, rng: random.Random, pool: list[KeyPair], height: int,
                chess_share: float = 0.1) -> tuple[str, dict, int, Cast]:
    """Pick a deployer and plausible constructor arguments. Returns (deployer, args, amount, cast)."""
    addrs = [k.address for k in pool]
    picks = rng.sample(addrs, 4)
    d, a, b, c = picks
    if kind == "ride_sharing":
        owners = rng.sample(addrs, rng.randint(1, 3))
        args = {"vehicle": a, "vin": VIN, "owners": owners, "service_fee": rng.randint(1, 20),
                "maintenance_fund_rate": rng.choice([0, 0, 10, 25, 50]), "ride_timeout": rng.randint(1, 8)}
        return owners[0], args, 0, Cast(owners[0], {"vehicle": a, "owners": owners})
    if kind == "maintenance_escrow":
        oracle = pool[addrs.index(c)]
        args = {"provider": a, "oracle": c, "quote": rng.randint(1, 40), "obligations": "svc",
                "timeout": rng.randint(1, 8)}
        return d, args, 0, Cast(d, {"vehicle": d, "provider": a}, oracle)
    if kind == "unilateral_reward":
        reward = rng.randint(1, 40)
        args = {"task": "fetch", "deadline": height + rng.randint(0, 8), "reward": reward}
        return d, args, reward, Cast(d, {"offeror": d})
    if kind == "arbitrated_escrow":
        args = {"buyer": d, "seller": a, "agent": b, "price": rng.randint(1, 40),
                "dispute_deadline": height + rng.randint(0, 8), "arbitration_window": rng.randint(1, 5)}
        return d, args, 0, Cast(d, {"buyer": d, "seller": a, "agent": b})
    if kind == "game_betting":
        rules = "chess" if rng.random() < chess_share else "tictactoe"
        args = {"rules": rules, "stake": rng.randint(1, 10), "move_timeout": rng.randint(1, 6),
                "join_timeout": rng.randint(2, 10)}
        return d, args, 0, Cast(d, {"players": [a, b]})
    if kind == "time_lock_commitment":
        penalty = rng.randint(1, 5)
        if rng.random() < 0.5:
            start = height + rng.randint(0, 6)
            window, period = [start, start + rng.randint(0, 6)], 0
        else:
            period = rng.randint(4, 12)
            window, period = [rng.randrange(period), rng.randrange(period)], period
            if window[0] > window[1] and rng.random() < 0.3:
                window.reverse()
        args = {"device": a, "locked_resource": "door", "window": window, "penalty": penalty,
                "duration": rng.randint(1, 20), "period": period}
        if rng.random() < 0.5:
            args["beneficiary"] = b
        return d, args, penalty * rng.randint(1, 4), Cast(d, {"device": a})
    raise ValueError(kind)


def _who(rng: random.Random, preferred: list[str], pool: list[str]) -> str:
    if preferred and rng.random() < 0.8:
        return rng.choice(preferred)
    return rng.choice(pool)


def _near(rng: random.Random, value: int) -> int:
    return value if rng.random() < 0.8 else max(0, value + rng.choice([-1, 1]))


def next_call(kind: str, state: Any, cast: Cast, rng: random.Random, pool: list[KeyPair],
              height: int) -> tuple[str, str, dict, int]:
    """A plausible (sender, method, args, amount) for the contract's current state."""
    addrs = [k.address for k in pool]
    r = cast.roles
    if kind == "ride_sharing":
        owners = list(state.owners)
        choice = rng.choice(["request_ride", "request_ride", "complete_ride", "complete_ride",
                             "cancel_ride", "propose", "vote", "vote", "execute", "approve_transfer",
                             "accept_transfer", "set_owners"])
        if choice == "request_ride":
            return rng.choice(addrs), choice, {}, _near(rng, state.ride_cost)
        if choice == "complete_ride":
            return _who(rng, [r["vehicle"]], addrs), choice, {}, 0
        if choice == "cancel_ride":
            return _who(rng, [r["vehicle"], state.passenger or r["vehicle"]], addrs), choice, {}, 0
        if choice == "propose":
            param = rng.choice(["service_fee", "maintenance_fund_rate"])
            value = rng.randint(1, 30) if param == "service_fee" else rng.randint(0, 60)
            return (_who(rng, owners, addrs), choice,
                    {"param": param, "value": value, "deadline": height + rng.randint(0, 4)}, 0)
        if choice in ("vote", "execute"):
            args = {"ballot": rng.randint(0, len(state.ballots))}
            if choice == "vote":
                args["yes"] = rng.random() < 0.6
            return _who(rng, owners, addrs), choice, args, 0
        if choice == "approve_transfer":
            return _who(rng, owners, addrs), choice, {"to": rng.choice(addrs)}, 0
        if choice == "accept_transfer":
            target = state.pending_transfer[1] if state.pending_transfer else rng.choice(addrs)
            return _who(rng, [target], addrs), choice, {}, 0
        return _who(rng, owners, addrs), choice, {"owners": rng.sample(addrs, rng.randint(1, 3))}, 0

    if kind == "maintenance_escrow":
        choice = rng.choice(["fund", "signal_complete", "confirm", "confirm", "refund_after_timeout"])
        if choice == "fund":
            return _who(rng, [r["vehicle"]], addrs), choice, {}, _near(rng, state.quote)
        if choice == "signal_complete":
            return _who(rng, [r["provider"]], addrs), choice, {}, 0
        if choice == "confirm":
            signer = cast.oracle if rng.random() < 0.85 else rng.choice(pool)
            value = rng.random() < 0.9
            subject = state.subject if rng.random() < 0.9 else "other"
            att = publish_attestation(signer, subject, value, max(0, height - rng.randint(0, 2)))
            return _who(rng, [r["vehicle"]], addrs), choice, {"sensor_attestation": att.to_payload()}, 0
        return rng.choice(addrs), choice, {}, 0

    if kind == "unilateral_reward":
        choice = rng.choice(["claim", "claim", "reject_claim", "confirm_and_pay", "confirm_and_pay", "expire"])
        if choice == "claim":
            return rng.choice(addrs), choice, {"evidence": "photo"}, 0
        if choice in ("reject_claim", "confirm_and_pay"):
            return _who(rng, [r["offeror"]], addrs), choice, {}, 0
        return rng.choice(addrs), choice, {}, 0

    if kind == "arbitrated_escrow":
        choice = rng.choice(["fund", "mark_delivered", "release", "dispute", "arbitrate", "timeout"]
                            + ["arbitrate"] * 3 * (state.phase == "Disputed"))
        if choice == "fund":
            return _who(rng, [r["buyer"]], addrs), choice, {}, _near(rng, state.price)
        if choice == "mark_delivered":
            return _who(rng, [r["seller"]], addrs), choice, {}, 0
        if choice == "release":
            return _who(rng, [r["buyer"]], addrs), choice, {}, 0
        if choice == "dispute":
            return _who(rng, [r["buyer"], r["seller"]], addrs), choice, {}, 0
        if choice == "arbitrate":
            decision = rng.choice(["refund", "pay", "pay", "refund", "split"])
            return _who(rng, [r["agent"]], addrs), choice, {"decision": decision}, 0
        return rng.choice(addrs), choice, {}, 0

    if kind == "game_betting":
        players = list(state.players) or r["players"]
        if state.phase == "AwaitingPlayers":
            choice = rng.choice(["join", "join", "join", "move", "settle"])
        else:
            choice = rng.choice(["move"] * 8 + ["join", "resign", "settle"])
        if choice == "join":
            return _who(rng, r["players"], addrs), choice, {}, _near(rng, state.stake)
        if choice == "move":
            on_turn = players[state.turn] if len(players) == 2 else rng.choice(addrs)
            return _who(rng, [on_turn], addrs), choice, {"move": _game_move(state, rng)}, 0
        if choice == "resign":
            return _who(rng, players, addrs), choice, {}, 0
        return rng.choice(addrs), choice, {}, 0

    if kind == "time_lock_commitment":
        choice = rng.choice(["request_access", "request_access", "request_access", "top_up", "expire"])
        if choice == "request_access":
            return _who(rng, [r["device"]], addrs), choice, {}, 0
        if choice == "top_up":
            return _who(rng, [cast.deployer], addrs), choice, {}, rng.randint(0, 5)
        return rng.choice(addrs), choice, {}, 0
    raise ValueError(kind)


def _game_move(state, rng: random.Random):
    if state.rules == "tictactoe":
        empty = [i for i, c in enumerate(state.board) if c == "."]
        if empty and rng.random() < 0.9:
            return rng.choice(empty)
        return rng.randint(0, 9)
    legal = chess.Position.from_fen(state.board).legal_moves()
    if legal and rng.random() < 0.9:
        return rng.choice(legal).uci
    return rng.choice(["a2a5", "e1e3", "h7h1"])


# -- exactly-once driver -----------------------------------------------------------

@dataclass
class SequenceResult:
    kind: str
    calls: int
    succeeded: int
    settlements: int
    double_payout: bool
    stuck_funds: int
    conservation_ok: bool
    final_phase: str | None


def _phase(state) -> str | None:
    return getattr(state, "phase", None)


def exactly_once_sequence(seed: int, kind: str | None = None, pool: list[KeyPair] | None = None,
                          max_calls: int = 24, chess_share: float = 0.05) -> SequenceResult:
    """Random calls against one fresh contract, then a recovery sweep far in the future."""
    rng = random.Random(seed)
    pool = pool or actor_pool()
    kind = kind or rng.choice(KINDS)
    world = WorldState(balances={k.address: 200 for k in pool})
    engine = Engine(world)
    total = world.total_funds()
    height = rng.randint(1, 5)
    deployer, args, amount, cast = deploy_args(kind, rng, pool, height, chess_share)
    try:
        contract = engine.deploy(deployer, kind, args, amount, height, 0)
    except RobonomicsError:
        return SequenceResult(kind, 0, 0, 0, False, 0, world.total_funds() == total, None)

    def held() -> int:
        return world.contracts[contract].held_funds

    def funds_ok() -> bool:
        return sum(world.balances.values()) + held() == total and held() >= 0

    conservation_ok = funds_ok()
    succeeded = 0
    n_calls = rng.randint(1, max_calls)
    for _ in range(n_calls):
        height += rng.choice([0, 1, 1, 1, 2, 3])
        state = world.contracts[contract].state
        sender, method, cargs, value = next_call(kind, state, cast, rng, pool, height)
        if world.balance(sender) < value:
            value = world.balance(sender)
        try:
            engine.call(sender, contract, method, cargs, value, height)
            succeeded += 1
        except RobonomicsError:
            pass
        conservation_ok = conservation_ok and funds_ok()

    # recovery sweep: far past every deadline, anyone may try every timeout path
    height += 10_000
    for _ in range(3):
        if held() == 0:
            break
        for method in RECOVERY_METHODS:
            for k in pool:
                try:
                    engine.call(k.address, contract, method, {}, 0, height)
                except RobonomicsError:
                    pass
    conservation_ok = conservation_ok and funds_ok()

    names = [e.name for e in world.events if e.contract == contract]
    if kind == "ride_sharing":
        requests = names.count("RideReq")
        closed = names.count("RideCompleted") + names.count("RideCancelled")
        settlements = closed
        double = closed > requests
    else:
        settlements = sum(names.count(n) for n in SETTLEMENTS[kind])
        double = settlements > 1
    return SequenceResult(kind, n_calls, succeeded, settlements, double, held(), conservation_ok,
                          _phase(world.contracts[contract].state))


# -- conservation driver -----------------------------------------------------------

@dataclass
class FuzzConfig:
    ops: int = 200
    actors: int = 6
    initial_balance: int = 500
    supply: int = 10**6
    reward: int = 50
    mine_probability: float = 0.12
    chess_share: float = 0.0


@dataclass
class ConservationResult:
    seed: int
    ops: int
    blocks: int
    submitted: int
    rejected: int
    failed: int
    violations: list[int]
    ledger: Ledger = field(repr=False)


def conservation_run(seed: int, config: FuzzConfig = FuzzConfig(),
                     pool: list[KeyPair] | None = None,
                     on_block: Callable[[Ledger], None] | None = None) -> ConservationResult:
    rng = random.Random(seed)
    pool = pool or actor_pool(config.actors)
    addrs = [k.address for k in pool]
    genesis = Genesis(alloc={a: config.initial_balance for a in addrs},
                      keys={k.address: k.public_key for k in pool},
                      supply=config.supply, reward=config.reward, chain_id=f"fuzz-{seed}")
    ledger = Ledger(genesis)
    miner = addrs[rng.randrange(len(addrs))]
    keys = {k.address: k for k in pool}
    deployed: list[tuple[str, str, Cast]] = []
    pending_deploys: list[tuple[str, str, Cast]] = []
    submitted = rejected = 0
    violations: list[int] = []

    def mine():
        ledger.produce_block(miner)
        for address, kind, cast in pending_deploys:
            if ledger.contract(address) is not None:
                deployed.append((address, kind, cast))
        pending_deploys.clear()
        if ledger.total_funds() != ledger.expected_supply():
            violations.append(ledger.height)
        if any(v < 0 for v in ledger.world.balances.values()):
            violations.append(ledger.height)
        if on_block:
            on_block(ledger)

    def submit(sender, to, amount, payload, nonce=None):
        nonlocal submitted, rejected
        kp = keys[sender]
        if nonce is None:
            nonce = ledger.next_nonce(sender)
        tx = SignedTransaction.create(kp, to, nonce, amount, payload, include_key=rng.random() < 0.5)
        submitted += 1
        try:
            ledger.submit_transaction(tx)
        except TxRejected:
            rejected += 1
            return None
        return nonce

    for _ in range(config.ops):
        roll = rng.random()
        height = ledger.height + 1
        if not deployed and 0.45 <= roll < 0.92:
            roll = 0.0
        if roll < 0.3:
            sender = rng.choice(addrs)
            amount = rng.randint(0, config.initial_balance // 4)
            if rng.random() < 0.05:
                amount = ledger.get_balance(sender) + 1
            submit(sender, rng.choice(addrs), amount, None)
        elif roll < 0.45:
            kind = rng.choice(KINDS)
            deployer, args, amount, cast = deploy_args(kind, rng, pool, height, config.chess_share)
            nonce = submit(deployer, None, amount, deploy_payload(kind, **args))
            if nonce is not None:
                pending_deploys.append((contract_address(deployer, nonce), kind, cast))
        elif roll < 0.92:
            address, kind, cast = rng.choice(deployed)
            state = ledger.contract(address).state
            sender, method, args, amount = next_call(kind, state, cast, rng, pool, height)
            submit(sender, address, amount, call_payload(method, **args))
        else:
            sender = rng.choice(addrs)
            bad_nonce = ledger.next_nonce(sender) + rng.choice([-1, 1, 2])
            submit(sender, rng.choice(addrs), 1, None, nonce=max(0, bad_nonce))
        if rng.random() < config.mine_probability:
            mine()
    mine()
    failed = sum(1 for r in ledger.receipts.values() if not r.ok)
    return ConservationResult(seed, config.ops, ledger.height, submitted, rejected, failed,
                              violations, ledger)


# -- tamper driver -----------------------------------------------------------------

def mutate_byte(data: bytes, rng: random.Random) -> tuple[bytes, int, int]:
    """Replace one byte with a different value; returns (mutated, offset, line index)."""
    offset = rng.randrange(len(data))
    new = rng.randrange(255)
    if new >= data[offset]:
        new += 1
    mutated = data[:offset] + bytes([new]) + data[offset + 1:]
    return mutated, offset, data.count(b"\n", 0, offset)


@dataclass
class TamperOutcome:
    offset: int
    line: int
    detected: bool
    located_height: int | None
    reason: str | None


def tamper_trial(dump: bytes, rng: random.Random) -> TamperOutcome:
    mutated, offset, line = mutate_byte(dump, rng)
    report = validate_dump(mutated)
    return TamperOutcome(offset, line, not report.valid, report.height, report.reason)
