"""Byte framing for files and the on-disk share format.

A plaintext is prefixed with its length as an 8-byte big-endian integer,
zero-padded to a multiple of M bytes and cut into M-byte chunks; each
byte becomes one field symbol, so the modulus must exceed 255.

Share file layout (all integers big-endian)::

    magic "MOUL" | version u8 | n k d s u16 | modulus u32 | h u16 |
    a_h u32 | alpha u32 | chunks u64 | chunks * alpha symbols

Symbols are fixed-width, ``ceil(bits(modulus) / 8)`` bytes each, written
chunk by chunk.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MoulinError

MAGIC = b"MOUL"
VERSION = 1
_HEADER = struct.Struct(">4sBHHHHIHIIQ")
_LEN_PREFIX = 8


class ShareFormatError(MoulinError, ValueError):
    """A share file is damaged or belongs to an incompatible code."""


def symbol_width(modulus: int) -> int:
    return max(1, ((modulus - 1).bit_length() + 7) // 8)


def frame_bytes(data: bytes, M: int, modulus: int) -> np.ndarray:
    """Plaintext to an ``(M, chunks)`` symbol array."""
    if modulus < 256:
        raise ShareFormatError(f"byte packing needs a modulus above 255, got {modulus}")
    payload = len(data).to_bytes(_LEN_PREFIX, "big") + bytes(data)
    chunks = -(-len(payload) // M)
    payload += bytes(chunks * M - len(payload))
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(chunks, M)
    return arr.T.astype(np.int64)


def unframe_bytes(symbols: np.ndarray) -> bytes:
    """Inverse of :func:`frame_bytes`."""
    symbols = np.asarray(symbols)
    if symbols.ndim == 1:
        symbols = symbols[:, None]
    if symbols.size and (symbols.min() < 0 or symbols.max() > 255):
        raise ShareFormatError("decoded symbols are not bytes; shares are inconsistent")
    raw = symbols.T.astype(np.uint8).tobytes()
    if len(raw) < _LEN_PREFIX:
        raise ShareFormatError("decoded payload is shorter than its length prefix")
    length = int.from_bytes(raw[:_LEN_PREFIX], "big")
    if length > len(raw) - _LEN_PREFIX:
        raise ShareFormatError(f"length prefix {length} exceeds the decoded payload")
    return raw[_LEN_PREFIX:_LEN_PREFIX + length]


def pack_symbols(symbols: np.ndarray, modulus: int) -> bytes:
    width = symbol_width(modulus)
    flat = np.asarray(symbols, dtype=np.int64).reshape(-1)
    out = np.zeros((flat.size, width), dtype=np.uint8)
    for b in range(width):
        out[:, width - 1 - b] = (flat >> (8 * b)) & 0xFF
    return out.tobytes()


def unpack_symbols(buf: bytes, modulus: int, count: int) -> np.ndarray:
    width = symbol_width(modulus)
    if len(buf) != count * width:
        raise ShareFormatError(f"expected {count * width} payload bytes, got {len(buf)}")
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(count, width).astype(np.int64)
    vals = np.zeros(count, dtype=np.int64)
    for b in range(width):
        vals = (vals << 8) | raw[:, b]
    if count and vals.max() >= modulus:
        raise ShareFormatError("payload symbol outside the field")
    return vals


@dataclass(frozen=True)
class ShareFile:
    n: int
    k: int
    d: int
    s: int
    modulus: int
    h: int
    a_h: int
    alpha: int
    payload: np.ndarray  # (alpha, chunks)

    @property
    def chunks(self) -> int:
        return self.payload.shape[1]

    @property
    def code_key(self) -> tuple[int, int, int, int, int]:
        return (self.n, self.k, self.d, self.s, self.modulus)

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(
            MAGIC, VERSION, self.n, self.k, self.d, self.s,
            self.modulus, self.h, self.a_h, self.alpha, self.chunks,
        )
        return head + pack_symbols(self.payload.T, self.modulus)

    @classmethod
    def from_bytes(cls, buf: bytes) -> "ShareFile":
        if len(buf) < _HEADER.size:
            raise ShareFormatError("file too short for a share header")
        magic, version, n, k, d, s, modulus, h, a_h, alpha, chunks = _HEADER.unpack_from(buf)
        if magic != MAGIC:
            raise ShareFormatError("bad magic; not a share file")
        if version != VERSION:
            raise ShareFormatError(f"unsupported share format version {version}")
        if not (n - 1 >= d >= k >= s - 1 >= 1):
            raise ShareFormatError(f"header has inadmissible parameters {(n, k, d, s)}")
        if not 1 <= h <= n:
            raise ShareFormatError(f"node index {h} outside [1, {n}]")
        vals = unpack_symbols(buf[_HEADER.size:], modulus, alpha * chunks)
        return cls(n, k, d, s, modulus, h, a_h, alpha, vals.reshape(chunks, alpha).T.copy())

    def write(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def read(cls, path: str | Path) -> "ShareFile":
        return cls.from_bytes(Path(path).read_bytes())
