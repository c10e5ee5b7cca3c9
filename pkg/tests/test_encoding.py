import pytest
from hypothesis import given, settings, strategies as st

from robonomics.encoding import canonical_json, decode, encode
from robonomics.errors import FormatError
from robonomics.transaction import Payload, SignedTransaction, call_payload, deploy_payload

from helpers import key

values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text() | st.binary(),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=20,
)


@settings(max_examples=300)
@given(values)
def test_binary_round_trip(value):
    raw = encode(value)
    assert decode(raw) == value
    assert encode(decode(raw)) == raw


@settings(max_examples=300)
@given(st.binary(max_size=40))
def test_anything_that_decodes_re_encodes_identically(raw):
    try:
        value = decode(raw)
    except (ValueError, UnicodeDecodeError):
        return
    assert encode(value) == raw


def test_map_key_order_does_not_matter_for_encoding():
    assert encode({"b": 1, "a": 2}) == encode({"a": 2, "b": 1})


@pytest.mark.parametrize("raw", [
    b"I\x00\x00\x00\x0201",            # leading zero
    b"M\x00\x00\x00\x02S\x00\x00\x00\x01bNS\x00\x00\x00\x01aN",  # keys descending
    b"NN",                              # trailing bytes
    b"S\x00\x00\x00\x05ab",             # truncated
    b"Z",
])
def test_non_canonical_bytes_are_refused(raw):
    with pytest.raises(ValueError):
        decode(raw)


def test_floats_are_not_encodable():
    with pytest.raises(TypeError):
        encode(1.5)
    with pytest.raises(ValueError):
        canonical_json(float("nan"))


def test_payload_helpers():
    assert Payload.decode(call_payload("fund")) == Payload("call", "fund", {})
    p = Payload.decode(deploy_payload("game_betting", rules="chess", stake=10))
    assert p.action == "deploy" and p.args == {"rules": "chess", "stake": 10}
    with pytest.raises(FormatError):
        Payload.decode(encode(["call", "fund"]))
    with pytest.raises(FormatError):
        Payload.decode(b"garbage")


def test_transaction_json_round_trip_and_signature():
    kp = key("alice")
    tx = SignedTransaction.create(kp, key("bob").address, 3, 30, call_payload("go", n=1))
    back = SignedTransaction.from_json(tx.to_json())
    assert back == tx and back.tx_hash == tx.tx_hash
    assert back.signature_valid(kp.public_key)
    assert not back.signature_valid(key("bob").public_key)


@pytest.mark.parametrize("field,value", [("nonce", -1), ("amount", "5"), ("signature", "ZZ")])
def test_malformed_transaction_json(field, value):
    obj = SignedTransaction.create(key("alice"), None, 0).to_json()
    obj[field] = value
    with pytest.raises(FormatError):
        SignedTransaction.from_json(obj)
