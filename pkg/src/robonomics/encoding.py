"""Canonical byte and JSON encodings.

Two formats live here:

* canonical JSON: compact separators, ASCII only, keys in the insertion order
  the producer chose (every producer in this package builds its dicts in a
  fixed field order), no floats.
* the tagged, length-prefixed binary format used for transaction payloads and
  every other signed message.  One tag byte per value::

      N                      None
      T / F                  True / False
      I <u32 len> <ascii>    integer, base-10, optional leading '-'
      S <u32 len> <utf-8>    text
      B <u32 len> <raw>      bytes
      L <u32 n> item*n       list / tuple
      M <u32 n> (S-key value)*n   map, keys strictly ascending

  Lengths are big-endian.  Every value has exactly one encoding, so
  ``decode(encode(v)) == v`` and ``encode(decode(b)) == b`` for any ``b`` that
  decodes at all.
"""

from __future__ import annotations

import hashlib
import json
import struct
from typing import Any

_U32 = struct.Struct(">I")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True, allow_nan=False)


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def json_digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def encode(value: Any) -> bytes:
    out = bytearray()
    _encode_into(value, out)
    return bytes(out)


def _encode_into(value: Any, out: bytearray) -> None:
    if value is None:
        out += b"N"
    elif value is True:
        out += b"T"
    elif value is False:
        out += b"F"
    elif isinstance(value, int):
        raw = str(int(value)).encode()
        out += b"I" + _U32.pack(len(raw)) + raw
    elif isinstance(value, str):
        raw = value.encode("utf-8")
        out += b"S" + _U32.pack(len(raw)) + raw
    elif isinstance(value, (bytes, bytearray)):
        out += b"B" + _U32.pack(len(value)) + bytes(value)
    elif isinstance(value, (list, tuple)):
        out += b"L" + _U32.pack(len(value))
        for item in value:
            _encode_into(item, out)
    elif isinstance(value, dict):
        keys = list(value)
        if not all(isinstance(k, str) for k in keys):
            raise TypeError("map keys must be str")
        out += b"M" + _U32.pack(len(keys))
        for k in sorted(keys):
            _encode_into(k, out)
            _encode_into(value[k], out)
    else:
        raise TypeError(f"cannot encode {type(value).__name__}")


def decode(data: bytes) -> Any:
    value, pos = _decode_at(memoryview(bytes(data)), 0)
    if pos != len(data):
        raise ValueError("trailing bytes after encoded value")
    return value


def _take(buf: memoryview, pos: int, n: int) -> tuple[bytes, int]:
    if pos + n > len(buf):
        raise ValueError("truncated encoding")
    return bytes(buf[pos:pos + n]), pos + n


def _decode_at(buf: memoryview, pos: int) -> tuple[Any, int]:
    tag, pos = _take(buf, pos, 1)
    if tag == b"N":
        return None, pos
    if tag == b"T":
        return True, pos
    if tag == b"F":
        return False, pos
    if tag in (b"I", b"S", b"B"):
        head, pos = _take(buf, pos, 4)
        raw, pos = _take(buf, pos, _U32.unpack(head)[0])
        if tag == b"B":
            return raw, pos
        text = raw.decode("utf-8")
        if tag == b"S":
            return text, pos
        value = int(text)
        if str(value) != text:
            raise ValueError(f"non-canonical integer {text!r}")
        return value, pos
    if tag in (b"L", b"M"):
        head, pos = _take(buf, pos, 4)
        count = _U32.unpack(head)[0]
        if tag == b"L":
            items = []
            for _ in range(count):
                item, pos = _decode_at(buf, pos)
                items.append(item)
            return items, pos
        mapping: dict[str, Any] = {}
        last = None
        for _ in range(count):
            key, pos = _decode_at(buf, pos)
            if not isinstance(key, str) or (last is not None and key <= last):
                raise ValueError("map keys must be ascending strings")
            mapping[key], pos = _decode_at(buf, pos)
            last = key
        return mapping, pos
    raise ValueError(f"unknown tag {tag!r}")
