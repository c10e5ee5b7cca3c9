"""Maintenance escrow, unilateral reward, arbitrated escrow and time-lock commitment."""

import pytest

from robonomics.errors import (
    BadArguments,
    BadAttestation,
    ConstructorError,
    ContractUnauthorized,
    Expired,
    StateError,
    WrongAmount,
)
from robonomics.oracle import publish_attestation, service_subject

from helpers import Desk, addr, key


# -- maintenance ------------------------------------------------------------------

def maintenance(quote=80, timeout=10):
    d = Desk({"vehicle": 100})
    m = d.deploy("vehicle", "maintenance_escrow", provider=addr("garage"), oracle=addr("oracle"),
                 quote=quote, obligations="oil-change", timeout=timeout)
    return d, m


def service_ok(d, m, signer="oracle", value=True, height=3, subject=None):
    subject = subject or d.state(m).subject
    return publish_attestation(key(signer), subject, value, height).to_payload()


def test_maintenance_happy_path():
    d, m = maintenance()
    d.call("vehicle", m, "fund", 2, amount=80)
    d.call("garage", m, "signal_complete", 3)
    d.call("vehicle", m, "confirm", 4, sensor_attestation=service_ok(d, m))
    assert (d.balance("vehicle"), d.balance("garage"), d.held(m)) == (20, 80, 0)
    assert d.state(m).phase == "Confirmed"


def test_maintenance_timeout_refund():
    d, m = maintenance(timeout=10)
    d.call("vehicle", m, "fund", 2, amount=80)
    with pytest.raises(StateError):
        d.call("vehicle", m, "refund_after_timeout", 11)
    d.call("garage", m, "refund_after_timeout", 12)
    assert d.balance("vehicle") == 100 and d.state(m).phase == "Refunded"
    with pytest.raises(StateError):
        d.call("garage", m, "signal_complete", 13)


@pytest.mark.parametrize("tweak", ["signer", "subject", "value", "future", "garbage"])
def test_bad_attestations(tweak):
    d, m = maintenance()
    d.call("vehicle", m, "fund", 2, amount=80)
    d.call("garage", m, "signal_complete", 3)
    att = {
        "signer": lambda: service_ok(d, m, signer="mallory"),
        "subject": lambda: service_ok(d, m, subject=service_subject(addr("vehicle"), "0" * 64)),
        "value": lambda: service_ok(d, m, value=False),
        "future": lambda: service_ok(d, m, height=9),
        "garbage": lambda: {"oracle": 1},
    }[tweak]()
    with pytest.raises(BadAttestation):
        d.call("vehicle", m, "confirm", 4, sensor_attestation=att)
    assert d.state(m).phase == "ProviderSignaled" and d.held(m) == 80


def test_maintenance_roles_and_amounts():
    d, m = maintenance()
    with pytest.raises(WrongAmount):
        d.call("vehicle", m, "fund", 2, amount=79)
    with pytest.raises(ContractUnauthorized):
        d.call("garage", m, "fund", 2)
    with pytest.raises(StateError):
        d.call("vehicle", m, "refund_after_timeout", 50)


# -- unilateral reward ------------------------------------------------------------

def reward(deadline=10):
    d = Desk({"robot": 100})
    r = d.deploy("robot", "unilateral_reward", amount=25, task="carry me", deadline=deadline, reward=25)
    return d, r


def test_reward_claim_and_pay():
    d, r = reward()
    d.call("human", r, "claim", 2, evidence="done")
    d.call("robot", r, "confirm_and_pay", 3)
    assert d.balance("human") == 25 and d.balance("robot") == 75
    with pytest.raises(StateError):
        d.call("robot", r, "confirm_and_pay", 4)


def test_reward_expiry_refunds():
    d, r = reward(deadline=10)
    with pytest.raises(StateError):
        d.call("anyone", r, "expire", 10)
    d.call("anyone", r, "expire", 11)
    assert d.balance("robot") == 100 and d.state(r).phase == "Expired"
    with pytest.raises(StateError):
        d.call("human", r, "claim", 12)


def test_reward_claim_rules():
    d, r = reward(deadline=5)
    with pytest.raises(ContractUnauthorized):
        d.call("robot", r, "claim", 2)
    d.call("human", r, "claim", 2)
    with pytest.raises(StateError):
        d.call("other", r, "claim", 3)
    d.call("robot", r, "reject_claim", 3)
    with pytest.raises(Expired):
        d.call("other", r, "claim", 6)
    d.call("other", r, "expire", 6)
    assert d.balance("robot") == 100


def test_claimed_reward_can_still_expire():
    d, r = reward(deadline=5)
    d.call("human", r, "claim", 2)
    d.call("human", r, "expire", 6)
    assert d.balance("robot") == 100 and d.balance("human") == 0


def test_reward_must_be_attached():
    d = Desk({"robot": 100})
    with pytest.raises(WrongAmount):
        d.deploy("robot", "unilateral_reward", amount=20, task="t", deadline=5, reward=25)
    assert d.balance("robot") == 100


# -- arbitrated escrow --------------------------------------------------------------

def escrow(deadline=10, window=5):
    d = Desk({"buyer": 100})
    e = d.deploy("buyer", "arbitrated_escrow", buyer=addr("buyer"), seller=addr("seller"),
                 agent=addr("agent"), price=100, dispute_deadline=deadline, arbitration_window=window)
    return d, e


def test_escrow_no_dispute_path():
    d, e = escrow()
    d.call("buyer", e, "fund", 2, amount=100)
    d.call("seller", e, "mark_delivered", 3)
    with pytest.raises(ContractUnauthorized):
        d.call("seller", e, "release", 4)
    d.call("buyer", e, "release", 4)
    assert d.balance("seller") == 100 and d.state(e).phase == "Released"


@pytest.mark.parametrize("decision,phase,winner", [("refund", "ResolvedRefund", "buyer"),
                                                   ("pay", "ResolvedPay", "seller")])
def test_escrow_dispute_path(decision, phase, winner):
    d, e = escrow()
    d.call("buyer", e, "fund", 2, amount=100)
    d.call("seller", e, "dispute", 3)
    with pytest.raises(ContractUnauthorized):
        d.call("buyer", e, "arbitrate", 4, decision=decision)
    with pytest.raises(BadArguments):
        d.call("agent", e, "arbitrate", 4, decision="split")
    d.call("agent", e, "arbitrate", 4, decision=decision)
    assert d.state(e).phase == phase and d.balance(winner) == 100 and d.held(e) == 0


def test_escrow_timeouts():
    d, e = escrow(deadline=10, window=5)
    d.call("buyer", e, "fund", 2, amount=100)
    d.call("seller", e, "mark_delivered", 3)
    with pytest.raises(StateError):
        d.call("seller", e, "timeout", 10)
    d.call("seller", e, "timeout", 11)
    assert d.balance("seller") == 100

    d, e = escrow(deadline=10, window=5)
    d.call("buyer", e, "fund", 2, amount=100)
    d.call("buyer", e, "dispute", 10)
    with pytest.raises(StateError):
        d.call("buyer", e, "timeout", 15)
    d.call("buyer", e, "timeout", 16)
    assert d.balance("buyer") == 100 and d.state(e).phase == "ResolvedRefund"


def test_late_dispute_and_unfunded_release():
    d, e = escrow(deadline=10)
    with pytest.raises(StateError):
        d.call("buyer", e, "release", 2)
    d.call("buyer", e, "fund", 2, amount=100)
    with pytest.raises(StateError):
        d.call("buyer", e, "dispute", 11)
    with pytest.raises(ContractUnauthorized):
        d.call("agent", e, "dispute", 5)


# -- time-lock commitment -----------------------------------------------------------

def pact(window=(100, 110), penalty=5, duration=200, deposit=20, period=0):
    d = Desk({"human": 100})
    p = d.deploy("human", "time_lock_commitment", at=1, amount=deposit, device=addr("fridge"),
                 locked_resource="fridge-door", window=list(window), penalty=penalty,
                 duration=duration, period=period)
    return d, p


def test_access_inside_window_is_denied_with_penalty():
    d, p = pact()
    assert d.call("fridge", p, "request_access", 105, height=105) == "deny"
    assert d.balance("fridge") == 5 and d.held(p) == 15


@pytest.mark.parametrize("h,answer", [(99, "allow"), (100, "deny"), (110, "deny"), (111, "allow")])
def test_window_is_inclusive(h, answer):
    d, p = pact()
    assert d.call("fridge", p, "request_access", h) == answer
    assert d.balance("fridge") == (5 if answer == "deny" else 0)


def test_after_expiry_access_is_allowed_and_deposit_returned():
    d, p = pact(window=(0, 500), duration=50)
    assert d.call("fridge", p, "request_access", 20) == "deny"
    assert d.call("fridge", p, "request_access", 52) == "allow"
    assert d.state(p).phase == "Expired" and d.balance("human") == 95 and d.held(p) == 0
    with pytest.raises(StateError):
        d.call("human", p, "top_up", 53, amount=5)
    with pytest.raises(StateError):
        d.call("human", p, "expire", 53)


def test_penalty_never_exceeds_the_deposit():
    d, p = pact(window=(0, 500), penalty=8, deposit=10)
    assert d.call("fridge", p, "request_access", 2) == "deny"
    assert d.call("fridge", p, "request_access", 3) == "deny"
    assert d.balance("fridge") == 10 and d.held(p) == 0


def test_recurring_night_window():
    d, p = pact(window=(22, 5), period=24, deposit=50)
    answers = [d.call("fridge", p, "request_access", h) for h in (21, 22, 24, 29, 30, 46)]
    assert answers == ["allow", "deny", "deny", "deny", "allow", "deny"]


def test_commitment_validation():
    with pytest.raises(WrongAmount):
        pact(penalty=5, deposit=4)
    with pytest.raises(ConstructorError):
        pact(window=(110, 100))
    with pytest.raises(ConstructorError):
        pact(window=(22, 30), period=24)
    d, p = pact()
    with pytest.raises(ContractUnauthorized):
        d.call("human", p, "request_access", 105)
    with pytest.raises(BadArguments):
        d.call("fridge", p, "request_access", 105, height=104)
