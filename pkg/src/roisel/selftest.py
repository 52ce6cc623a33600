"""Exhaustive inversion oracles behind ``roisel selftest``.

Every check looks its functions up on the owning module at call time, so a
patched (faulty) inverse is caught and reported by name.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import edge_scrambler, encryptor
from .bitstream import binarization as bz
from .keystream import ChaoticParams


@dataclass
class OracleResult:
    name: str
    cases: int
    failures: int
    seconds: float
    first_failure: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0


class _Tally:
    def __init__(self):
        self.cases = 0
        self.failures = 0
        self.first = ""

    def check(self, ok: bool, what) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if not self.first:
                self.first = what() if callable(what) else str(what)


# ---------------------------------------------------------------- binarizations

def check_eg(t: _Tally, max_k: int = 3, max_v: int = 1 << 16) -> None:
    for k in range(max_k + 1):
        for v in range(max_v + 1):
            b = bz.eg_encode(v, k)
            try:
                got, end = bz.eg_decode(b.bits, k)
            except ValueError as e:
                got, end = f"error {e}", -1
            t.check(got == v and end == len(b.bits), lambda: f"EG_{k}({v}) -> {got}")


def check_tr(t: _Tally, max_v: int = 256) -> None:
    for k in range(5):
        for c_max in range(1, max_v + 1):
            for v in range(c_max + 1):
                b = bz.tr_encode(v, k, c_max)
                try:
                    got, end = bz.tr_decode(b.bits, k, c_max)
                except ValueError as e:
                    got, end = f"error {e}", -1
                t.check(got == v and end == len(b.bits),
                        lambda: f"TR_{k}(v={v}, cMax={c_max}) -> {got}")


def check_fl(t: _Tally, max_bits: int = 16) -> None:
    for n in range(1, max_bits + 1):
        for v in range(1 << n):
            b = bz.fl_encode(v, n)
            got, end = bz.fl_decode(b.bits, n)
            t.check(got == v and end == n and len(b.bits) == n, lambda: f"FL{n}({v}) -> {got}")


# ---------------------------------------------------------------- element ciphers

def _pair(t: _Tally, name: str, enc: Callable, dec: Callable, values, keys) -> None:
    for v in values:
        for s in keys:
            c = enc(v, s)
            p = dec(c, s)
            t.check(p == v, lambda: f"{name}: dec(enc({v}, {s})) = {p}")


def check_element_ciphers(t: _Tally) -> None:
    e = encryptor
    _pair(t, "sign", e.enc_bit, e.enc_bit, (0, 1), (0, 1))
    _pair(t, "merge_idx", e.enc_merge_idx, e.dec_merge_idx, range(5), range(5))
    _pair(t, "mpm_idx", e.enc_mpm_idx, e.dec_mpm_idx, range(3), range(3))
    _pair(t, "chroma_ipm", e.enc_chroma_ipm, e.dec_chroma_ipm, range(5), range(5))
    _pair(t, "luma_ipm_rem", e.enc_luma_ipm_rem, e.enc_luma_ipm_rem, range(32), range(32))
    _pair(t, "mvp_idx", e.enc_bit, e.enc_bit, (0, 1), (0, 1))
    for rn in (1, 2, 3, 4):
        keys = range(3) if rn == 3 else range(rn if rn in (2, 4) else 1)
        _pair(t, f"ref_idx[rn={rn}]", lambda v, s: e.enc_ref_idx(v, rn, s),
              lambda v, s: e.dec_ref_idx(v, rn, s), range(rn), keys)
    for m in range(1, 27):
        _pair(t, f"dqp_value[max={m}]", lambda v, s: e.enc_dqp_value(v, m, s),
              lambda v, s: e.dec_dqp_value(v, m, s), range(-m, m + 1), range(2 * m + 1))
        for v in range(-m, m + 1):
            for s in range(2 * m + 1):
                c = e.enc_dqp_value(v, m, s)
                t.check(-m <= c <= m, lambda: f"dqp_value[max={m}]: {c} out of range")
    # bypass suffixes: value-level XOR must be an involution and keep the code length
    for mag in range(0, 1 << 12):
        n = e.mvd_suffix_len(mag)
        for s in range(1 << min(n, 6)):
            c = e.enc_mvd_suffix(mag, s)
            p = e.enc_mvd_suffix(c, s)
            t.check(p == mag and e.mvd_suffix_len(c) == n,
                    lambda: f"mvd_suffix: |mvd|={mag} s={s} -> {c} -> {p}")
    for k in range(5):
        for rem in range((4 << k) + 8):
            n = e.coef_suffix_len(rem, k)
            for s in range(1 << n):
                c = e.enc_coef_suffix(rem, k, s)
                p = e.enc_coef_suffix(c, k, s)
                t.check(p == rem and e.coef_suffix_len(c, k) == n and (c >> k) == (rem >> k),
                        lambda: f"coef_suffix: rem={rem} k={k} s={s} -> {c} -> {p}")


# ---------------------------------------------------------------- advanced level

def check_embed_extract(t: _Tally, bound: int = 1 << 15) -> None:
    es = edge_scrambler
    for last in range(-bound, bound + 1):
        if last == 0:
            continue
        for w in (0, 1):
            c = es.embed_flag(last, w)
            got = es.extract_flag(c)
            t.check(got == (w, last) and c != 0, lambda: f"embed({last}, {w}) = {c} -> {got}")


def check_permutations(t: _Tally, exhaustive_max: int = 8, random_cases: int = 10_000,
                       seed: int = 0) -> None:
    es = edge_scrambler
    for n in range(1, exhaustive_max + 1):
        vals = np.arange(1, n + 1, dtype=np.int64) * 7 - 3
        for p in itertools.permutations(range(n)):
            perm = np.array(p, dtype=np.int64)
            inv = es.invert_permutation(perm)
            back = es.unpermute_values(es.permute_values(vals, perm), perm)
            t.check(np.array_equal(inv[perm], np.arange(n)) and np.array_equal(back, vals),
                    lambda: f"permutation {p} not inverted")
    rng = np.random.default_rng(seed)
    for _ in range(random_cases):
        n_nz = int(rng.integers(exhaustive_max + 2, 65))
        params = ChaoticParams(float(rng.uniform(0.01, 0.99)), float(rng.uniform(3.9, 3.9999)))
        mags = rng.integers(1, 200, n_nz) * rng.choice((-1, 1), n_nz)
        tu = np.zeros(64, dtype=np.int64)
        tu[np.sort(rng.choice(64, n_nz, replace=False))] = mags
        perm = es.chaotic_permutation(n_nz - 1, params)
        valid = np.array_equal(np.sort(perm), np.arange(n_nz - 1))
        back = es.unscramble(es.protect_tu(tu, True, params), params)
        t.check(valid and np.array_equal(back, tu),
                lambda: f"chaotic permutation n_p={n_nz - 1} x0={params.x0} r={params.r}")


ORACLES: dict[str, Callable[[_Tally], None]] = {
    "EG_k k<=3 v<=2^16": check_eg,
    "TR_k v<=256": check_tr,
    "FL <=16 bits": check_fl,
    "element ciphers": check_element_ciphers,
    "embed/extract |v|<=2^15": check_embed_extract,
    "permutation inverse": check_permutations,
}


def run_selftest(names=None) -> list[OracleResult]:
    results = []
    for name, fn in ORACLES.items():
        if names is not None and name not in names:
            continue
        t = _Tally()
        start = time.perf_counter()
        try:
            fn(t)
        except Exception as e:  # an oracle crashing is a failure of that oracle
            t.failures += 1
            t.first = t.first or f"raised {type(e).__name__}: {e}"
        results.append(OracleResult(name, t.cases, t.failures, time.perf_counter() - start,
                                    t.first))
    return results


def format_matrix(results: list[OracleResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'oracle':<{width}}  {'cases':>9}  {'fail':>5}  {'time':>7}  result"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {r.cases:>9}  {r.failures:>5}  {r.seconds:>6.2f}s  "
                     + ("PASS" if r.ok else f"FAIL  {r.first_failure}"))
    return "\n".join(lines)
