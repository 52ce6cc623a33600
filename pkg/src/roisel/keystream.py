"""AES-128-CTR keystream, bounded uniform draws and chaotic-map seeding.

The keystream is one continuous MSB-first bit sequence: counter block ``i``
is ``nonce (8 bytes) || i (8 bytes, big-endian)`` and its AES image supplies
bits ``128*i .. 128*i+127``.  Draws consume bits in order, so the counter
advances once per 128 consumed bits and no counter value is ever reused in a
session.

Compiled codec loops cannot call into ``cryptography``; they get a snapshot of
upcoming keystream bytes via :meth:`KeystreamDrawer.export` and report back how
many bits they consumed (:meth:`KeystreamDrawer.advance`).  ``ks_bits`` and
``ks_uniform`` below are the compiled twins of :meth:`next_int` and
:meth:`next_uniform`; both read the same bit positions.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from numba import njit

KEY_BYTES = 16
_CHUNK_BLOCKS = 64
_CHAOS_DOMAIN = 1 << 63

EPSILON = 2.0 ** -20
_EXCLUDED = (0.25, 0.5, 0.75)


def parse_key(hex_key: str) -> bytes:
    s = hex_key.strip().lower()
    if len(s) != 2 * KEY_BYTES:
        raise ValueError(f"key must be {2 * KEY_BYTES} hex characters, got {len(s)}")
    try:
        return bytes.fromhex(s)
    except ValueError as exc:
        raise ValueError("key is not valid hexadecimal") from exc


def random_nonce() -> int:
    return secrets.randbits(64)


def aes_block(key: bytes, block: bytes) -> bytes:
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


@dataclass(frozen=True)
class StreamKey:
    key: bytes
    nonce: int

    def __post_init__(self):
        if len(self.key) != KEY_BYTES:
            raise ValueError("AES-128 key must be 16 bytes")
        if not 0 <= self.nonce < 1 << 64:
            raise ValueError("nonce must fit in 64 bits")

    def drawer(self) -> "KeystreamDrawer":
        return KeystreamDrawer(self.key, self.nonce)

    def chaotic_key(self) -> bytes:
        """Key for the coefficient permutation generator.

        One AES block of the main key at counter ``2^63``, a counter value the
        element keystream never reaches.
        """
        return aes_block(self.key, self.nonce.to_bytes(8, "big") + _CHAOS_DOMAIN.to_bytes(8, "big"))


class KeystreamDrawer:
    def __init__(self, key: bytes, nonce: int):
        if len(key) != KEY_BYTES:
            raise ValueError("AES-128 key must be 16 bytes")
        self.nonce = nonce
        block0 = nonce.to_bytes(8, "big") + bytes(8)
        self._ctr = Cipher(algorithms.AES(key), modes.CTR(block0)).encryptor()
        self._buf = bytearray()
        self._blocks = 0
        self._pos = 0  # bit position inside _buf
        self._dropped = 0  # bytes already discarded from the front of _buf

    # -- generation
    def _ensure(self, nbytes: int) -> None:
        while len(self._buf) < nbytes:
            n = max(_CHUNK_BLOCKS, (nbytes - len(self._buf) + 15) // 16)
            if self._blocks + n > 1 << 64:
                raise OverflowError("keystream counter exhausted")
            self._buf += self._ctr.update(bytes(16 * n))
            self._blocks += n

    @property
    def bits_consumed(self) -> int:
        return 8 * self._dropped + self._pos

    @property
    def counter(self) -> int:
        """Index of the counter block the next bit comes from."""
        return self.bits_consumed // 128

    # -- draws
    def next_int(self, n: int) -> int:
        if not 1 <= n <= 128:
            raise ValueError("can draw 1..128 bits at a time")
        end = self._pos + n
        lo, hi = self._pos >> 3, (end + 7) >> 3
        self._ensure(hi)
        chunk = int.from_bytes(self._buf[lo:hi], "big")
        v = (chunk >> (8 * (hi - lo) - (end - 8 * lo))) & ((1 << n) - 1)
        self._pos = end
        return v

    def next_bits(self, n: int) -> str:
        return format(self.next_int(n), f"0{n}b")

    def next_uniform(self, m: int) -> int:
        if not 2 <= m <= 1 << 16:
            raise ValueError("modulus must be in [2, 2^16]")
        nb = (m - 1).bit_length()
        while True:
            v = self.next_int(nb)
            if v < m:
                return v

    # -- bulk access for compiled loops
    def export(self, nbytes: int) -> tuple[np.ndarray, int]:
        """Upcoming keystream bytes and the bit offset of the next unread bit."""
        lo = self._pos >> 3
        self._ensure(lo + nbytes)
        return np.frombuffer(bytes(self._buf[lo:lo + nbytes]), dtype=np.uint8), self._pos & 7

    def advance(self, nbits: int) -> None:
        if nbits < 0:
            raise ValueError("cannot rewind the keystream")
        self._pos += nbits
        self._ensure((self._pos + 7) >> 3)
        drop = (self._pos >> 3) - 4096
        if drop > 0:  # keep the buffer short on long sequences
            del self._buf[:drop]
            self._pos -= 8 * drop
            self._dropped += drop


# ------------------------------------------------------------ compiled twins

# kst layout: [bit position, bit limit, overflow flag]
@njit(cache=True)
def ks_bits(ks, kst, n):
    pos = kst[0]
    if pos + n > kst[1]:
        kst[2] = 1
        kst[0] = pos + n
        return 0
    v = 0
    for i in range(pos, pos + n):
        v = (v << 1) | ((ks[i >> 3] >> (7 - (i & 7))) & 1)
    kst[0] = pos + n
    return v


@njit(cache=True)
def ks_uniform(ks, kst, m):
    nb = 0
    while (1 << nb) < m:
        nb += 1
    while True:
        v = ks_bits(ks, kst, nb)
        if kst[2] or v < m:
            return v


def new_ks_state(bit_offset: int, nbytes: int) -> np.ndarray:
    return np.array([bit_offset, 8 * nbytes, 0], dtype=np.int64)


# ------------------------------------------------------------ chaotic seeding

@dataclass(frozen=True)
class ChaoticParams:
    x0: float
    r: float


def _avoid_fixed_points(x: float) -> float:
    x = min(max(x, EPSILON), 1.0 - EPSILON)
    for p in _EXCLUDED:
        if abs(x - p) < EPSILON:
            x = p + EPSILON if x >= p else p - EPSILON
    return x


def derive_chaotic_params(source: "KeystreamDrawer | bytes") -> ChaoticParams:
    """``x0`` from the first 52 keystream bits, ``r`` from the next 52."""
    drawer = source if isinstance(source, KeystreamDrawer) else KeystreamDrawer(source, 0)
    x0 = _avoid_fixed_points(drawer.next_int(52) / 2.0 ** 52)
    r = 3.9 + 0.0999 * drawer.next_int(52) / 2.0 ** 52
    return ChaoticParams(x0, r)


def tu_chaotic_params(chaotic_key: bytes, frame_idx: int, tu_index: int) -> ChaoticParams:
    """Per-TU generator seed: a fresh stream under the chaotic key, nonce = (frame, TU)."""
    return derive_chaotic_params(KeystreamDrawer(chaotic_key, (frame_idx << 32) | tu_index))
