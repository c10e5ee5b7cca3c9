"""Deterministic scenario runner.

A scenario is a JSON document naming agents, their genesis balances and a list
of timed actions.  ``run`` submits each tick's actions as signed transactions,
produces exactly one block per tick, and checks the ``expected`` block against
the final state.  Rejected transactions are recorded, never raised.

Argument values inside ``args`` are resolved before signing:

``"@alias"``                 address of an agent or deployed contract
``"$value:<subject>"``       value of the latest attestation for ``subject``
``"$attestation:<subject>"`` the latest attestation for ``subject``
``"$last_attestation"``      the most recently published attestation
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from . import encoding
from .crypto import Address, KeyPair, generate_keypair, seed_from_label
from .did import DidRegistry, did_for, sign_update
from .engine import contract_address, contract_kinds
from .errors import (
    FormatError,
    ParseError,
    RobonomicsError,
    TxRejected,
    UnknownAlias,
    UnsortedSteps,
    ValidationFailure,
)
from .ledger import (
    DEFAULT_REWARD,
    DEFAULT_SUPPLY,
    MAX_DIFFICULTY,
    Genesis,
    Ledger,
    parse_dump,
    query_events,
    replay_chain,
)
from .oracle import AttestationBus
from .transaction import SignedTransaction, call_payload, deploy_payload

ROLES = ("robot", "human", "vehicle", "owner", "passenger", "provider", "oracle", "agent",
         "device", "miner", "operator")
ACTIONS = ("transfer", "deploy", "call", "attest", "attest_service", "register_did", "update_did")
_ACTION_FIELDS = {
    "transfer": {"to", "amount"},
    "deploy": {"kind", "args", "amount", "as"},
    "call": {"contract", "method", "args", "amount"},
    "attest": {"subject", "value"},
    "attest_service": {"contract", "value"},
    "register_did": {"controller", "attributes", "service_endpoints"},
    "update_did": {"did", "changes"},
}
_REQUIRED = {
    "transfer": ("to", "amount"),
    "deploy": ("kind", "as"),
    "call": ("contract", "method"),
    "attest": ("subject", "value"),
    "attest_service": ("contract",),
    "register_did": (),
    "update_did": ("did", "changes"),
}
BUNDLED = ("ride_service", "maintenance_timeout", "reward_transport", "escrow_dispute",
           "chess_bet", "fridge_timelock")


@dataclass(frozen=True)
class Agent:
    alias: str
    role: str
    keypair: KeyPair

    @property
    def address(self) -> Address:
        return self.keypair.address


@dataclass(frozen=True)
class Step:
    tick: int
    agent: str
    action: str
    params: dict[str, Any]


@dataclass
class ScenarioScript:
    name: str
    seed: bytes
    agents: dict[str, Agent]
    genesis: dict[str, int]
    steps: list[Step]
    expected: list[dict[str, Any]]
    difficulty: int = 0
    reward: int = DEFAULT_REWARD
    supply: int = DEFAULT_SUPPLY
    ticks: int = 0
    description: str = ""
    contract_aliases: set[str] = field(default_factory=set)

    @property
    def miner(self) -> Agent:
        return next(a for a in self.agents.values() if a.role == "miner")

    def address_book(self) -> dict[str, Address]:
        return {alias: a.address for alias, a in self.agents.items()}


# -- loading ------------------------------------------------------------------------

def bundled_path(name: str) -> Path:
    return Path(str(resources.files("robonomics") / "scenarios" / f"{name}.json"))


def resolve_scenario_path(name_or_path: str | Path) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    if str(name_or_path) in BUNDLED:
        return bundled_path(str(name_or_path))
    raise ParseError(f"no scenario file or bundled scenario named {name_or_path!r}")


def load_scenario(path: str | Path) -> ScenarioScript:
    path = resolve_scenario_path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return parse_scenario(doc, default_name=path.stem)


def _field(doc: dict, key: str, kind, where: str, default=None, required=True):
    if key not in doc:
        if required:
            raise ParseError("missing field", field=f"{where}{key}")
        return default
    value = doc[key]
    if kind is int and type(value) is not int or kind is not int and not isinstance(value, kind):
        raise ParseError(f"expected {getattr(kind, '__name__', kind)}", field=f"{where}{key}")
    return value


def _hex32(value: str, where: str) -> bytes:
    try:
        raw = bytes.fromhex(value)
    except (TypeError, ValueError):
        raw = b""
    if len(raw) != 32:
        raise ParseError("expected 64 hex digits", field=where)
    return raw


def parse_scenario(doc: Any, default_name: str = "scenario") -> ScenarioScript:
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    name = _field(doc, "name", str, "", default_name, required=False)
    seed = _hex32(_field(doc, "seed", str, ""), "seed")
    config = _field(doc, "config", dict, "", {}, required=False)
    difficulty = _field(config, "difficulty", int, "config.", 0, required=False)
    if not 0 <= difficulty <= MAX_DIFFICULTY:
        raise ParseError(f"difficulty must be 0..{MAX_DIFFICULTY}", field="config.difficulty")

    agents: dict[str, Agent] = {}
    for i, entry in enumerate(_field(doc, "agents", list, "")):
        where = f"agents[{i}]."
        if not isinstance(entry, dict):
            raise ParseError("agent must be an object", field=f"agents[{i}]")
        alias = _field(entry, "alias", str, where)
        role = _field(entry, "role", str, where)
        if role not in ROLES:
            raise ParseError(f"unknown role {role!r}", field=f"{where}role")
        if alias in agents:
            raise ParseError(f"duplicate alias {alias!r}", field=f"{where}alias")
        if alias.startswith(("@", "$")):
            raise ParseError("aliases may not start with '@' or '$'", field=f"{where}alias")
        key_seed = entry.get("key_seed")
        seed_bytes = _hex32(key_seed, f"{where}key_seed") if key_seed else seed_from_label(seed, alias)
        agents[alias] = Agent(alias, role, generate_keypair(seed_bytes))
    if sum(a.role == "miner" for a in agents.values()) != 1:
        raise ParseError("exactly one agent must have role 'miner'", field="agents")

    genesis: dict[str, int] = {}
    for i, entry in enumerate(_field(doc, "genesis", list, "", [], required=False)):
        where = f"genesis[{i}]."
        alias = _field(entry, "alias", str, where)
        if alias not in agents:
            raise UnknownAlias(f"undeclared alias {alias!r}", field=f"{where}alias")
        balance = _field(entry, "balance", int, where)
        if balance < 0:
            raise ParseError("balance must be non-negative", field=f"{where}balance")
        genesis[alias] = genesis.get(alias, 0) + balance

    contract_aliases: set[str] = set()
    steps: list[Step] = []
    last_tick = 0
    kinds = contract_kinds()
    for i, entry in enumerate(_field(doc, "steps", list, "", [], required=False)):
        where = f"steps[{i}]."
        if not isinstance(entry, dict):
            raise ParseError("step must be an object", field=f"steps[{i}]")
        tick = _field(entry, "tick", int, where)
        if tick < 1:
            raise ParseError("ticks start at 1", field=f"{where}tick")
        if tick < last_tick:
            raise UnsortedSteps(f"tick {tick} follows tick {last_tick}", field=f"{where}tick")
        last_tick = tick
        agent = _field(entry, "agent", str, where)
        if agent not in agents:
            raise UnknownAlias(f"undeclared alias {agent!r}", field=f"{where}agent")
        action = _field(entry, "action", str, where)
        if action not in ACTIONS:
            raise ParseError(f"unknown action {action!r}", field=f"{where}action")
        params = {k: v for k, v in entry.items() if k not in ("tick", "agent", "action")}
        extra = set(params) - _ACTION_FIELDS[action]
        if extra:
            raise ParseError(f"unexpected fields {sorted(extra)}", field=f"steps[{i}]")
        for key in _REQUIRED[action]:
            if key not in params:
                raise ParseError("missing field", field=f"{where}{key}")
        if action == "deploy":
            kind = _field(params, "kind", str, where)
            if kind not in kinds:
                raise ParseError(f"unknown contract kind {kind!r}", field=f"{where}kind")
            alias = _field(params, "as", str, where)
            if alias in agents or alias in contract_aliases:
                raise ParseError(f"alias {alias!r} already in use", field=f"{where}as")
            contract_aliases.add(alias)
        steps.append(Step(tick, agent, action, params))
        _check_aliases(params, set(agents) | contract_aliases, f"steps[{i}]")

    expected = _field(doc, "expected", list, "", [], required=False)
    for i, exp in enumerate(expected):
        if not isinstance(exp, dict):
            raise ParseError("expectation must be an object", field=f"expected[{i}]")
        _check_aliases(exp, set(agents) | contract_aliases, f"expected[{i}]")

    return ScenarioScript(
        name=name,
        seed=seed,
        agents=agents,
        genesis=genesis,
        steps=steps,
        expected=expected,
        difficulty=difficulty,
        reward=_field(config, "reward", int, "config.", DEFAULT_REWARD, required=False),
        supply=_field(config, "supply", int, "config.", DEFAULT_SUPPLY, required=False),
        ticks=max(last_tick, _field(config, "ticks", int, "config.", 0, required=False)),
        description=doc.get("description", ""),
        contract_aliases=contract_aliases,
    )


_ALIAS_KEYS = ("to", "contract", "controller", "did", "balance", "phase", "state")


def _check_aliases(obj: Any, known: set[str], where: str) -> None:
    """Every ``@alias`` string and every alias-valued key must name a declared alias."""
    def walk(value, path):
        if isinstance(value, str) and value.startswith("@"):
            if value[1:] not in known:
                raise UnknownAlias(f"undeclared alias {value[1:]!r}", field=path)
        elif isinstance(value, dict):
            for k, v in value.items():
                walk(v, f"{path}.{k}")
        elif isinstance(value, list):
            for j, v in enumerate(value):
                walk(v, f"{path}[{j}]")

    walk(obj, where)
    for key in _ALIAS_KEYS:
        value = obj.get(key)
        if isinstance(value, str) and value.lstrip("@") not in known:
            raise UnknownAlias(f"undeclared alias {value!r}", field=f"{where}.{key}")


# -- running ----------------------------------------------------------------------

@dataclass
class RunTranscript:
    scenario: str
    document: dict[str, Any]
    dump: str
    ledger: Ledger = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.document["passed"]

    @property
    def assertions(self) -> list[dict[str, Any]]:
        return self.document["assertions"]

    @property
    def final_balances(self) -> dict[str, int]:
        return self.document["final_balances"]

    def to_json(self) -> str:
        return encoding.canonical_json(self.document) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()


class _Runner:
    def __init__(self, script: ScenarioScript):
        self.script = script
        agents = script.agents
        self.genesis = Genesis(
            alloc={agents[a].address: bal for a, bal in script.genesis.items()},
            keys={a.address: a.keypair.public_key for a in agents.values()},
            supply=script.supply,
            reward=script.reward,
            chain_id=f"rbn-{script.name}",
        )
        self.ledger = Ledger(self.genesis)
        self.bus = AttestationBus()
        for a in agents.values():
            if a.role == "oracle":
                self.bus.register_oracle(a.address)
        self.dids = DidRegistry()
        self.book: dict[str, Address] = script.address_book()
        self.contracts: dict[str, Address] = {}
        self.rejections: list[dict[str, Any]] = []
        self.pending_steps: dict[str, tuple[Step, int]] = {}

    # argument resolution

    def resolve(self, value: Any) -> Any:
        if isinstance(value, str):
            if value.startswith("@"):
                return self.book[value[1:]]
            if value == "$last_attestation":
                att = self.bus.latest()
                return att.to_payload() if att else None
            if value.startswith("$attestation:"):
                att = self.bus.query_latest(value[len("$attestation:"):])
                return att.to_payload() if att else None
            if value.startswith("$value:"):
                att = self.bus.query_latest(value[len("$value:"):])
                return att.value if att else None
            return value
        if isinstance(value, list):
            return [self.resolve(v) for v in value]
        if isinstance(value, dict):
            return {k: self.resolve(v) for k, v in value.items()}
        return value

    def target(self, name: str) -> Address:
        name = name[1:] if name.startswith("@") else name
        return self.book[name]

    def reject(self, step: Step, index: int, stage: str, reason: str, message: str) -> None:
        self.rejections.append({
            "step": index,
            "tick": step.tick,
            "agent": step.agent,
            "action": step.action,
            "stage": stage,
            "reason": reason,
            "message": message,
        })

    def submit(self, step: Step, index: int, to, amount: int, payload: bytes | None) -> Address | None:
        agent = self.script.agents[step.agent]
        nonce = self.ledger.next_nonce(agent.address)
        tx = SignedTransaction.create(agent.keypair, to, nonce, amount, payload)
        try:
            self.ledger.submit_transaction(tx)
        except TxRejected as exc:
            self.reject(step, index, "submit", exc.reason, str(exc))
            return None
        self.pending_steps[tx.tx_hash] = (step, index)
        return contract_address(agent.address, nonce)

    def perform(self, step: Step, index: int, height: int) -> None:
        p = step.params
        agent = self.script.agents[step.agent]
        try:
            if step.action == "transfer":
                self.submit(step, index, self.target(p["to"]), p["amount"], None)
            elif step.action == "deploy":
                payload = deploy_payload(p["kind"], **self.resolve(p.get("args", {})))
                address = self.submit(step, index, None, p.get("amount", 0), payload)
                if address is not None:
                    self.contracts[p["as"]] = address
                    self.book[p["as"]] = address
            elif step.action == "call":
                payload = call_payload(p["method"], **self.resolve(p.get("args", {})))
                self.submit(step, index, self.target(p["contract"]), p.get("amount", 0), payload)
            elif step.action == "attest":
                self.bus.publish(agent.keypair, p["subject"], self.resolve(p["value"]), height)
            elif step.action == "attest_service":
                instance = self.ledger.contract(self.target(p["contract"]))
                if instance is None or instance.kind != "maintenance_escrow":
                    raise RobonomicsError(f"{p['contract']} is not a deployed maintenance escrow")
                self.bus.publish(agent.keypair, instance.state.subject, p.get("value", True), height)
            elif step.action == "register_did":
                controller = p.get("controller")
                self.dids.register(
                    agent.keypair,
                    attributes=self.resolve(p.get("attributes", {})),
                    controller=self.target(controller) if controller else None,
                    service_endpoints=tuple(p.get("service_endpoints", ())),
                )
            elif step.action == "update_did":
                did = did_for(self.target(p["did"]))
                doc = self.dids.resolve(did)
                changes = self.resolve(p["changes"])
                self.dids.update(did, changes, sign_update(agent.keypair, doc, changes),
                                 signer_public_key=agent.keypair.public_key)
        except (RobonomicsError, TypeError, ValueError) as exc:
            reason = exc.reason if isinstance(exc, RobonomicsError) else type(exc).__name__
            self.reject(step, index, "action", reason, str(exc))

    def run(self) -> RunTranscript:
        script = self.script
        steps = list(enumerate(script.steps))
        cursor = 0
        for tick in range(1, script.ticks + 1):
            while cursor < len(steps) and steps[cursor][1].tick == tick:
                index, step = steps[cursor]
                self.perform(step, index, tick)
                cursor += 1
            block = self.ledger.produce_block(script.miner.address, script.difficulty)
            for tx in block.transactions:
                receipt = self.ledger.receipts[tx.tx_hash]
                step, index = self.pending_steps.pop(tx.tx_hash)
                if not receipt.ok:
                    self.reject(step, index, "execute", receipt.error, receipt.message)
        return self.transcript()

    # reporting

    def alias_of(self, address: str) -> str:
        for alias, addr in self.book.items():
            if addr == address:
                return alias
        return str(address)

    def transcript(self) -> RunTranscript:
        ledger = self.ledger
        dump = ledger.dump()
        balances = {alias: ledger.get_balance(addr) for alias, addr in self.book.items()
                    if alias in self.script.agents}
        contracts = {}
        for alias, addr in self.contracts.items():
            inst = ledger.contract(addr)
            contracts[alias] = None if inst is None else inst.to_json()
        events = []
        for e in ledger.world.events:
            obj = e.to_json()
            obj["contract_alias"] = self.alias_of(e.contract)
            events.append(obj)
        assertions = [self.check(exp) for exp in self.script.expected]
        doc = {
            "scenario": self.script.name,
            "head_height": ledger.height,
            "head_hash": ledger.head.hash,
            "state_hash": ledger.world.state_hash(),
            "chain_dump_sha256": hashlib.sha256(dump.encode()).hexdigest(),
            "agents": {alias: a.address for alias, a in self.script.agents.items()},
            "final_balances": balances,
            "total_funds": ledger.total_funds(),
            "expected_supply": ledger.expected_supply(),
            "contracts": contracts,
            "events": events,
            "attestations": [a.to_json() for a in self.bus.all()],
            "dids": [d.to_json() for d in self.dids.documents()],
            "rejections": self.rejections,
            "assertions": assertions,
            "passed": all(a["passed"] for a in assertions),
        }
        return RunTranscript(self.script.name, doc, dump, ledger)

    def check(self, exp: dict[str, Any]) -> dict[str, Any]:
        try:
            actual = self.observe(exp)
        except (KeyError, IndexError, TypeError, ValueError, RobonomicsError) as exc:
            return {"expect": exp, "actual": None, "passed": False, "error": str(exc)}
        want = self.resolve(exp.get("equals", exp.get("count")))
        return {"expect": exp, "actual": actual, "passed": actual == want}

    def observe(self, exp: dict[str, Any]) -> Any:
        ledger = self.ledger
        if "balance" in exp:
            return ledger.get_balance(self.target(exp["balance"]))
        if "phase" in exp:
            return ledger.contract(self.target(exp["phase"])).state.state_json()["phase"]
        if "state" in exp:
            value: Any = ledger.contract(self.target(exp["state"])).to_json()["state"]
            for part in exp["field"].split("."):
                value = value[int(part)] if isinstance(value, list) else value[part]
            return value
        if "events" in exp:
            contract = self.target(exp["contract"]) if "contract" in exp else None
            found = query_events(ledger.world.events, contract, exp["events"])
            where = self.resolve(exp.get("where", {}))
            return sum(all(e.fields.get(k) == v for k, v in where.items()) for e in found)
        if "did" in exp:
            return self.dids.resolve(did_for(self.target(exp["did"]))).to_json()[exp["field"]]
        if "rejections" in exp:
            return sum(1 for r in self.rejections if r["reason"] == exp["rejections"])
        if "conservation" in exp:
            return ledger.total_funds() == ledger.expected_supply()
        raise ValueError(f"unrecognised expectation {exp}")


def run(script: ScenarioScript | str | Path) -> RunTranscript:
    if not isinstance(script, ScenarioScript):
        script = load_scenario(script)
    return _Runner(script).run()


# -- replay -----------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayReport:
    valid: bool
    head_height: int
    head_hash: str
    state_hash: str
    balances: dict[str, int]
    contracts: dict[str, str]
    event_count: int
    failed_transactions: int

    def to_json(self) -> dict[str, Any]:
        return {
            "valid": self.valid,
            "head_height": self.head_height,
            "head_hash": self.head_hash,
            "state_hash": self.state_hash,
            "balances": self.balances,
            "contracts": self.contracts,
            "event_count": self.event_count,
            "failed_transactions": self.failed_transactions,
        }


def replay_blocks(data: bytes | str):
    """Parse and re-execute a dump; returns ``(blocks, world, receipts)``."""
    blocks = parse_dump(data)
    report, world, receipts = replay_chain(blocks)
    if not report.valid:
        raise ValidationFailure(report.height, report.reason)
    return blocks, world, receipts


def replay(path: str | Path) -> ReplayReport:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    blocks, world, receipts = replay_blocks(data)
    return ReplayReport(
        valid=True,
        head_height=blocks[-1].height,
        head_hash=blocks[-1].hash,
        state_hash=world.state_hash(),
        balances={a: b for a, b in sorted(world.balances.items())},
        contracts={a: c.kind for a, c in sorted(world.contracts.items())},
        event_count=len(world.events),
        failed_transactions=sum(1 for r in receipts.values() if not r.ok),
    )
