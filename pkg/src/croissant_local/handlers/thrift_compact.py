"""Minimal reader for the Thrift compact protocol, enough to decode Parquet footers.

Structs decode to ``{field_id: value}`` dicts; lists to Python lists. Unknown
fields are decoded generically, so readers only pick the ids they need.
"""

from __future__ import annotations

import struct

# compact protocol type ids
T_STOP = 0
T_TRUE = 1
T_FALSE = 2
T_BYTE = 3
T_I16 = 4
T_I32 = 5
T_I64 = 6
T_DOUBLE = 7
T_BINARY = 8
T_LIST = 9
T_SET = 10
T_MAP = 11
T_STRUCT = 12

MAX_DEPTH = 64


class ThriftError(ValueError):
    pass


class CompactReader:
    def __init__(self, data: bytes, pos: int = 0) -> None:
        self.data = data
        self.pos = pos

    def _byte(self) -> int:
        if self.pos >= len(self.data):
            raise ThriftError("unexpected end of thrift data")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def varint(self) -> int:
        shift = result = 0
        while True:
            b = self._byte()
            result |= (b & 0x7F) << shift
            if not b & 0x80:
                return result
            shift += 7
            if shift > 70:
                raise ThriftError("varint too long")

    def zigzag(self) -> int:
        n = self.varint()
        return (n >> 1) ^ -(n & 1)

    def binary(self) -> bytes:
        n = self.varint()
        end = self.pos + n
        if end > len(self.data):
            raise ThriftError("binary field runs past end of data")
        out = self.data[self.pos:end]
        self.pos = end
        return out

    def value(self, ttype: int, depth: int = 0):
        if depth > MAX_DEPTH:
            raise ThriftError("thrift nesting too deep")
        if ttype == T_TRUE:
            return True
        if ttype == T_FALSE:
            return False
        if ttype == T_BYTE:
            b = self._byte()
            return b - 256 if b > 127 else b
        if ttype in (T_I16, T_I32, T_I64):
            return self.zigzag()
        if ttype == T_DOUBLE:
            if self.pos + 8 > len(self.data):
                raise ThriftError("unexpected end of thrift data")
            (v,) = struct.unpack_from("<d", self.data, self.pos)
            self.pos += 8
            return v
        if ttype == T_BINARY:
            return self.binary()
        if ttype in (T_LIST, T_SET):
            header = self._byte()
            size = header >> 4
            etype = header & 0x0F
            if size == 15:
                size = self.varint()
            if etype in (T_TRUE, T_FALSE):
                # list<bool> elements are whole bytes
                return [self._byte() == T_TRUE for _ in range(size)]
            return [self.value(etype, depth + 1) for _ in range(size)]
        if ttype == T_MAP:
            size = self.varint()
            if size == 0:
                return {}
            kv = self._byte()
            ktype, vtype = kv >> 4, kv & 0x0F
            return {self.value(ktype, depth + 1): self.value(vtype, depth + 1) for _ in range(size)}
        if ttype == T_STRUCT:
            return self.struct(depth + 1)
        raise ThriftError(f"unknown thrift type {ttype}")

    def struct(self, depth: int = 0) -> dict[int, object]:
        out: dict[int, object] = {}
        last = 0
        while True:
            header = self._byte()
            ttype = header & 0x0F
            if ttype == T_STOP:
                return out
            delta = header >> 4
            fid = last + delta if delta else self.zigzag()
            out[fid] = self.value(ttype, depth)
            last = fid
