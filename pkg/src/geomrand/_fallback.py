"""Vectorized numpy versions of the compiled generator loops.

Used when the ``_kernels`` extension is not built. Integer outputs are
bit-identical to the compiled path; LCG blocks are produced with precomputed
affine jump tables, so no per-draw Python loop is needed.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

GOLD64, WEAK_LCG16, FULL_LCG64 = 0, 1, 2

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
LCG64_A, LCG64_C = 6364136223846793005, 1442695040888963407
LCG16_A, LCG16_C = 129, 1

_BLOCK = 1 << 16
_TWO_PI = 6.283185307179586


def _check_kind(kind: int) -> None:
    if kind not in (GOLD64, WEAK_LCG16, FULL_LCG64):
        raise ValueError(f"unknown generator kind {kind}")


def _lcg_constants(kind: int) -> tuple[int, int, int]:
    if kind == WEAK_LCG16:
        return LCG16_A, LCG16_C, 0xFFFF
    return LCG64_A, LCG64_C, MASK64


@lru_cache(maxsize=None)
def _jump_table(kind: int) -> tuple[np.ndarray, np.ndarray]:
    # x_{k} = A[k-1] * x_0 + C[k-1] for k = 1.._BLOCK
    a, c, mask = _lcg_constants(kind)
    mul = np.empty(_BLOCK, dtype=np.uint64)
    add = np.empty(_BLOCK, dtype=np.uint64)
    m, k = 1, 0
    for i in range(_BLOCK):
        m = (a * m) & mask
        k = (a * k + c) & mask
        mul[i] = m
        add[i] = k
    return mul, add


def advance(kind: int, state: int, steps: int) -> int:
    """State after ``steps`` draws, in O(log steps)."""
    _check_kind(kind)
    if kind == GOLD64:
        return (state + GOLDEN * steps) & MASK64
    a, c, mask = _lcg_constants(kind)
    # compose the affine map x -> a x + c with itself by squaring
    mul, add = 1, 0
    pa, pc = a, c
    while steps:
        if steps & 1:
            mul, add = (pa * mul) & mask, (pa * add + pc) & mask
        pa, pc = (pa * pa) & mask, (pa * pc + pc) & mask
        steps >>= 1
    return (mul * state + add) & mask


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def fill_raw(kind: int, state: int, n: int) -> tuple[np.ndarray, int]:
    _check_kind(kind)
    if kind == GOLD64:
        steps = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        out = _mix64(steps + np.uint64(state))
        return out, advance(kind, state, n)
    mul, add = _jump_table(kind)
    mask = np.uint64(_lcg_constants(kind)[2])
    out = np.empty(n, dtype=np.uint64)
    s = state
    for start in range(0, n, _BLOCK):
        m = min(_BLOCK, n - start)
        block = (mul[:m] * np.uint64(s) + add[:m]) & mask
        out[start:start + m] = block
        s = int(block[-1])
    return out, s


def _uniform(kind: int, raw: np.ndarray) -> np.ndarray:
    if kind == WEAK_LCG16:
        return (raw.astype(np.float64) + 0.5) * (1.0 / 65536.0)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def fill_uniform(kind: int, state: int, n: int) -> tuple[np.ndarray, int]:
    raw, state = fill_raw(kind, state, n)
    return _uniform(kind, raw), state


_CHUNK = 1 << 20


def _accepted(kind: int, state: int, n: int, last: int) -> tuple[list[np.ndarray], int]:
    """Raw draws ``<= last``, in order, until ``n`` are collected; plus the final state."""
    chunks = []
    produced = 0
    while produced < n:
        size = min(_CHUNK, max(1024, (n - produced) * 9 // 8))
        raw, after = fill_raw(kind, state, size)
        keep = raw <= np.uint64(last)
        accepted = int(np.count_nonzero(keep))
        if produced + accepted >= n:
            cut = int(np.flatnonzero(keep)[n - produced - 1]) + 1
            chunks.append(raw[:cut][keep[:cut]])
            return chunks, advance(kind, state, cut)
        chunks.append(raw[keep])
        produced += accepted
        state = after
    return chunks, state


def fill_symbols(kind: int, state: int, n: int, bucket: int, last: int) -> tuple[np.ndarray, int]:
    _check_kind(kind)
    chunks, state = _accepted(kind, state, n, last)
    if not chunks:
        return np.empty(0, dtype=np.int64), state
    raw = np.concatenate(chunks)
    return (raw // np.uint64(bucket)).astype(np.int64), state


def target_positions(kind: int, state: int, n: int, bucket: int, last: int,
                     target: int) -> tuple[np.ndarray, int]:
    _check_kind(kind)
    lo = np.uint64(target * bucket)
    width = np.uint64(bucket)
    chunks, state = _accepted(kind, state, n, last)
    hits = [np.empty(0, dtype=np.int64)]
    offset = 0
    for raw in chunks:
        hits.append(np.flatnonzero((raw - lo) < width) + offset)
        offset += raw.size
    return np.concatenate(hits).astype(np.int64), state


def fill_gamma(kind: int, state: int, shape: float, n: int) -> tuple[np.ndarray, int]:
    _check_kind(kind)
    if not shape > 0.0:
        raise ValueError("shape must be positive")
    alpha = shape if shape >= 1.0 else shape + 1.0
    d = alpha - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(n, dtype=np.float64)
    produced = 0
    with np.errstate(invalid="ignore", divide="ignore"):
        while produced < n:
            attempts = max(256, int((n - produced) * 1.1) + 16)
            raw, after = fill_raw(kind, state, 4 * attempts)
            u = _uniform(kind, raw).reshape(attempts, 4)
            z = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(_TWO_PI * u[:, 1])
            v = 1.0 + c * z
            v3 = v * v * v
            z2 = z * z
            ok = (v > 0.0) & (
                (u[:, 2] < 1.0 - 0.0331 * z2 * z2)
                | (np.log(u[:, 2]) < 0.5 * z2 + d * (1.0 - v3 + np.log(v3)))
            )
            idx = np.flatnonzero(ok)
            need = n - produced
            if idx.size >= need:
                idx = idx[:need]
                state = advance(kind, state, 4 * (int(idx[-1]) + 1))
            else:
                state = after
            vals = d * v3[idx]
            if shape < 1.0:
                vals = vals * np.exp(np.log(u[idx, 3]) * (1.0 / shape))
            out[produced:produced + idx.size] = vals
            produced += idx.size
    return out, state
