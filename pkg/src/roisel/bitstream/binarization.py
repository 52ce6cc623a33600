"""EG_k, TR_k and FL binarizations.

Bins are returned as ``"0"``/``"1"`` strings together with the prefix length,
so callers can tell which bins belong to the information-carrying suffix
(the part the bypass ciphers are allowed to touch).

The Exp-Golomb form is the zeros-then-one variant::

    EG_k(v):  0^m 1 <m+k suffix bits>,   m = floor(log2(v / 2^k + 1))

so EG_0(0) = "1", EG_0(1) = "010", EG_1(0) = "10".
"""

from __future__ import annotations

from dataclasses import dataclass


class BitstreamCorruptError(ValueError):
    pass


@dataclass(frozen=True)
class Binarization:
    bits: str
    prefix_len: int

    @property
    def prefix(self) -> str:
        return self.bits[:self.prefix_len]

    @property
    def suffix(self) -> str:
        return self.bits[self.prefix_len:]

    def __str__(self) -> str:
        return self.bits

    def __len__(self) -> int:
        return len(self.bits)

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            return self.bits == other
        if isinstance(other, Binarization):
            return (self.bits, self.prefix_len) == (other.bits, other.prefix_len)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.bits, self.prefix_len))


def _bits(v: int, n: int) -> str:
    return format(v, f"0{n}b") if n else ""


def eg_class(v: int, k: int) -> int:
    """Number of leading zeros ``m`` of EG_k(v)."""
    return ((v >> k) + 1).bit_length() - 1


def eg_class_base(m: int, k: int) -> int:
    """Smallest value whose EG_k code has ``m`` leading zeros."""
    return ((1 << m) - 1) << k


def eg_encode(v: int, k: int) -> Binarization:
    if v < 0:
        raise ValueError(f"EG_k needs a non-negative value, got {v}")
    if not 0 <= k <= 31:
        raise ValueError(f"unsupported EG order {k}")
    m = eg_class(v, k)
    return Binarization("0" * m + "1" + _bits(v - eg_class_base(m, k), m + k), m + 1)


def eg_decode(bits: str, k: int, pos: int = 0) -> tuple[int, int]:
    """Decode one EG_k codeword starting at ``pos``; returns ``(value, next_pos)``."""
    m = 0
    while True:
        if pos >= len(bits):
            raise BitstreamCorruptError("EG_k prefix runs past the end of the bins")
        if bits[pos] == "1":
            pos += 1
            break
        m += 1
        pos += 1
        if m > 32:
            raise BitstreamCorruptError("EG_k prefix longer than 32 zeros")
    n = m + k
    if pos + n > len(bits):
        raise BitstreamCorruptError("EG_k suffix truncated")
    suffix = int(bits[pos:pos + n], 2) if n else 0
    return eg_class_base(m, k) + suffix, pos + n


def tr_suffix_present(v: int, k: int, c_max: int) -> bool:
    p, p_max = v >> k, c_max >> k
    return k > 0 and (p < p_max or (p_max << k) < c_max)


def tr_encode(v: int, k: int, c_max: int) -> Binarization:
    if v < 0 or v > c_max:
        raise ValueError(f"TR value {v} outside [0, {c_max}]")
    p, p_max = v >> k, c_max >> k
    prefix = "1" * p + ("0" if p < p_max else "")
    suffix = _bits(v & ((1 << k) - 1), k) if tr_suffix_present(v, k, c_max) else ""
    return Binarization(prefix + suffix, len(prefix))


def tr_decode(bits: str, k: int, c_max: int, pos: int = 0) -> tuple[int, int]:
    p_max = c_max >> k
    p = 0
    while p < p_max:
        if pos >= len(bits):
            raise BitstreamCorruptError("TR prefix truncated")
        b = bits[pos]
        pos += 1
        if b == "0":
            break
        p += 1
    v = p << k
    if k > 0 and (p < p_max or (p_max << k) < c_max):
        if pos + k > len(bits):
            raise BitstreamCorruptError("TR suffix truncated")
        v += int(bits[pos:pos + k], 2)
        pos += k
    if v > c_max:
        raise BitstreamCorruptError(f"TR value {v} exceeds cMax {c_max}")
    return v, pos


def fl_encode(v: int, n_bits: int) -> Binarization:
    if n_bits < 1:
        raise ValueError("FL needs at least one bit")
    if not 0 <= v < (1 << n_bits):
        raise ValueError(f"{v} does not fit in {n_bits} bits")
    return Binarization(_bits(v, n_bits), 0)


def fl_decode(bits: str, n_bits: int, pos: int = 0) -> tuple[int, int]:
    if pos + n_bits > len(bits):
        raise BitstreamCorruptError("FL codeword truncated")
    return int(bits[pos:pos + n_bits], 2), pos + n_bits
