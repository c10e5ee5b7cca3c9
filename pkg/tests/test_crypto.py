import json
import os
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from robonomics.crypto import Address, derive_address, generate_keypair, sign, verify
from robonomics.errors import KeyFormatError, SeedLengthError

GOLDEN = json.loads((Path(__file__).parent / "golden" / "address_vector.json").read_text())
seeds = st.binary(min_size=32, max_size=32)


def test_golden_vector_public_key_and_address():
    kp = generate_keypair(bytes.fromhex(GOLDEN["secret_seed"]))
    assert kp.public_key.hex() == GOLDEN["public_key"]
    assert kp.address == GOLDEN["address"]
    assert derive_address(kp.public_key).raw == bytes.fromhex(GOLDEN["address"][2:])


def test_keypair_is_a_pure_function_of_the_seed():
    s0 = bytes(range(32))
    assert generate_keypair(s0) == generate_keypair(s0)
    assert generate_keypair(s0).public_key != generate_keypair(bytes(31) + b"\x01").public_key


@pytest.mark.parametrize("bad", [b"", bytes(31), bytes(33), "00" * 32, None])
def test_seed_length_is_enforced(bad):
    with pytest.raises(SeedLengthError):
        generate_keypair(bad)


@pytest.mark.parametrize("bad", [bytes(31), bytes(64), "ab" * 32])
def test_malformed_public_key(bad):
    with pytest.raises(KeyFormatError):
        derive_address(bad)


def test_ten_thousand_seeds_give_distinct_addresses():
    rng = __import__("random").Random(7)
    addresses = {generate_keypair(rng.randbytes(32)).address for _ in range(10_000)}
    assert len(addresses) == 10_000


def test_hundred_thousand_keys_give_distinct_addresses():
    keys = {os.urandom(32) for _ in range(100_000)}
    assert len({derive_address(k) for k in keys}) == len(keys)


def test_address_shape():
    a = generate_keypair(bytes(32)).address
    assert isinstance(a, Address) and a.startswith("0x") and len(a) == 42 and a == a.lower()
    with pytest.raises(KeyFormatError):
        Address("0x1234")


@settings(max_examples=1000, deadline=None)
@given(seed=seeds, message=st.binary(max_size=256), bit=st.integers(min_value=0))
def test_signatures_verify_and_break_under_a_flipped_bit(seed, message, bit):
    kp = generate_keypair(seed)
    sig = sign(message, kp.secret_key)
    assert verify(sig, message, kp.public_key)
    if message:
        i = bit % (len(message) * 8)
        flipped = bytearray(message)
        flipped[i // 8] ^= 1 << (i % 8)
        assert not verify(sig, bytes(flipped), kp.public_key)


@settings(max_examples=200, deadline=None)
@given(a=seeds, b=seeds, message=st.binary(max_size=64))
def test_signature_does_not_verify_under_another_key(a, b, message):
    if a == b:
        return
    ka, kb = generate_keypair(a), generate_keypair(b)
    assert not verify(ka.sign(message), message, kb.public_key)


def test_verify_returns_false_on_garbage():
    kp = generate_keypair(bytes(32))
    assert verify(b"short", b"m", kp.public_key) is False
    assert verify(bytes(64), b"m", b"not a key") is False
    assert verify(bytes(64), b"m", kp.public_key) is False
