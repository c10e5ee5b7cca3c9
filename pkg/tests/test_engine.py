import copy

import pytest
from hypothesis import given, settings, strategies as st

from robonomics.engine import Contract, Engine, contract_method, contract_address
from robonomics.errors import (
    BadArguments,
    ConstructorError,
    ContractUnauthorized,
    InsufficientTokenBalance,
    MethodNotFound,
    NotPayable,
    StateError,
    StepLimitExceeded,
)

from helpers import Chain, addr, engine_with


class Splitter(Contract):
    """Test contract: holds deposits and fans them out with a chatty event trail."""

    kind = "test_splitter"

    def __init__(self, ctx, payees):
        self.payees = list(payees)
        self.rounds = 0

    def state_json(self):
        return {"payees": self.payees, "rounds": self.rounds}

    @contract_method(payable=True)
    def deposit(self, ctx):
        ctx.emit("Deposited", amount=ctx.amount)

    @contract_method
    def split(self, ctx):
        share = ctx.held_funds // len(self.payees)
        for p in self.payees:
            self.rounds += 1
            ctx.pay(p, share)
            ctx.emit("Paid", to=p, amount=share)

    @contract_method
    def spin(self, ctx, n):
        for _ in range(n):
            ctx.step()


class Boom(Exception):
    pass


def snapshot(engine):
    w = engine.world
    return (dict(w.balances), {a: (c.held_funds, copy.deepcopy(c.state.state_json()))
                               for a, c in w.contracts.items()},
            list(w.events), w.event_digest)


def splitter_engine():
    engine = engine_with({"alice": 100})
    payees = [addr(n) for n in ("p1", "p2", "p3")]
    c = engine.deploy(addr("alice"), "test_splitter", {"payees": payees}, 0, 1, 0)
    engine.call(addr("alice"), c, "deposit", {}, 90, 2)
    return engine, c


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=12))
def test_fault_at_any_step_leaves_no_trace(fail_at):
    engine, c = splitter_engine()
    before = snapshot(engine)

    def hook(step):
        if step == fail_at:
            raise Boom

    engine.fault_hook = hook
    try:
        engine.call(addr("alice"), c, "split", {}, 0, 3)
    except Boom:
        assert snapshot(engine) == before
    else:
        assert engine.world.balance(addr("p1")) == 30


def test_fault_during_deploy_removes_the_instance():
    engine = engine_with({"alice": 100})
    engine.fault_hook = lambda step: (_ for _ in ()).throw(Boom())
    with pytest.raises(Boom):
        engine.deploy(addr("alice"), "test_splitter", {"payees": [addr("p1")]}, 0, 1, 0)
    assert engine.world.contracts == {} and engine.world.events == []


def test_step_limit():
    engine, c = splitter_engine()
    engine.step_limit = 1000
    engine.call(addr("alice"), c, "spin", {"n": 900}, 0, 3)
    with pytest.raises(StepLimitExceeded):
        engine.call(addr("alice"), c, "spin", {"n": 1000}, 0, 3)


def test_step_limit_default_is_a_million():
    engine, c = splitter_engine()
    with pytest.raises(StepLimitExceeded):
        engine.call(addr("alice"), c, "spin", {"n": 10**6}, 0, 3)


def test_unknown_method_and_bad_arguments():
    engine, c = splitter_engine()
    with pytest.raises(MethodNotFound):
        engine.call(addr("alice"), c, "state_json", {}, 0, 3)
    with pytest.raises(MethodNotFound):
        engine.call(addr("alice"), addr("nowhere"), "split", {}, 0, 3)
    with pytest.raises(BadArguments):
        engine.call(addr("alice"), c, "spin", {"m": 1}, 0, 3)


def test_non_payable_method_refuses_value():
    engine, c = splitter_engine()
    with pytest.raises(NotPayable):
        engine.call(addr("alice"), c, "split", {}, 5, 3)
    with pytest.raises(NotPayable):
        engine.transfer(addr("alice"), c, 5)


def test_two_deploys_get_distinct_addresses():
    c = Chain({"alice": 10})
    first = c.deploy("alice", "token", symbol="A")
    second = c.deploy("alice", "token", symbol="B")
    assert first != second
    assert first == contract_address(addr("alice"), 0)


def test_escrow_constructor_and_guards():
    c = Chain({"buyer": 200})
    esc = c.deploy("buyer", "arbitrated_escrow", buyer=addr("buyer"), seller=addr("seller"),
                   agent=addr("agent"), price=100, dispute_deadline=10)
    inst = c.ledger.contract(esc)
    assert inst.state.phase == "Created" and inst.held_funds == 0
    assert c.call("buyer", esc, "release").error == "StateError"


@pytest.mark.parametrize("args", [
    {"agent": "buyer"},
    {"price": 0},
    {"seller": "0x12"},
    {"bogus": 1},
])
def test_escrow_constructor_errors(args):
    engine = engine_with({"buyer": 10})
    base = {"buyer": addr("buyer"), "seller": addr("seller"), "agent": addr("agent"),
            "price": 100, "dispute_deadline": 10}
    for k, v in args.items():
        base[k] = addr(v) if v == "buyer" else v
    with pytest.raises(ConstructorError):
        engine.deploy(addr("buyer"), "arbitrated_escrow", base, 0, 1, 0)


def test_unknown_kind_and_unpayable_constructor():
    engine = engine_with({"alice": 10})
    with pytest.raises(ConstructorError):
        engine.deploy(addr("alice"), "no_such_kind", {}, 0, 1, 0)
    with pytest.raises(NotPayable):
        engine.deploy(addr("alice"), "token", {"symbol": "X"}, 5, 1, 0)
    assert engine.world.balance(addr("alice")) == 10


def test_tokens():
    engine = engine_with({})
    a, b = addr("alice"), addr("bob")
    tok = engine.deploy(a, "token", {"symbol": "RIDE"}, 0, 1, 0)
    engine.call(a, tok, "mint", {"to": a, "amount": 1000}, 0, 1)
    ledger = engine.world.contracts[tok].state.ledger
    assert ledger.total_supply == 1000 and engine.call(a, tok, "balance_of", {"address": a}, 0, 1) == 1000
    engine.call(a, tok, "transfer", {"to": b, "amount": 400}, 0, 2)
    assert (ledger.balances[a], ledger.balances[b], ledger.total_supply) == (600, 400, 1000)
    with pytest.raises(InsufficientTokenBalance):
        engine.call(a, tok, "transfer", {"to": b, "amount": 700}, 0, 3)
    with pytest.raises(ContractUnauthorized):
        engine.call(b, tok, "mint", {"to": b, "amount": 1}, 0, 3)
    assert sum(ledger.balances.values()) == ledger.total_supply


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from("abc"), st.integers(0, 60)), max_size=30))
def test_token_transfers_conserve_supply(moves):
    engine = engine_with({})
    owner = addr("a")
    tok = engine.deploy(owner, "token", {"symbol": "T"}, 0, 1, 0)
    for name in "abc":
        engine.call(owner, tok, "mint", {"to": addr(name), "amount": 50}, 0, 1)
    for frm, to, amount in moves:
        try:
            engine.call(addr(frm), tok, "transfer", {"to": addr(to), "amount": amount}, 0, 2)
        except InsufficientTokenBalance:
            pass
    ledger = engine.world.contracts[tok].state.ledger
    assert sum(ledger.balances.values()) == ledger.total_supply == 150
    assert min(ledger.balances.values()) >= 0


def test_failed_receipt_carries_the_reason():
    c = Chain({"buyer": 200})
    esc = c.deploy("buyer", "arbitrated_escrow", buyer=addr("buyer"), seller=addr("seller"),
                   agent=addr("agent"), price=100, dispute_deadline=10)
    receipt = c.call("buyer", esc, "fund", amount=99)
    assert not receipt.ok and receipt.error == "WrongAmount"
    assert c.balance("buyer") == 200
