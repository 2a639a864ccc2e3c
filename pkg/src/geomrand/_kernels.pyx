# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled generator loops.

Every function takes the generator state as a Python int and returns
``(array, new_state)``; the pure-numpy module ``_fallback`` mirrors these
signatures and produces bit-identical integer output.
"""

import numpy as np
from libc.stdint cimport uint64_t, int64_t
from libc.math cimport log, sqrt, cos, exp

cdef enum:
    GOLD64 = 0
    WEAK_LCG16 = 1
    FULL_LCG64 = 2

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t LCG64_A = 6364136223846793005ULL
cdef uint64_t LCG64_C = 1442695040888963407ULL
cdef uint64_t LCG16_A = 129ULL
cdef uint64_t LCG16_C = 1ULL
cdef double TWO_PI = 6.283185307179586


cdef inline uint64_t _next(int kind, uint64_t *s) noexcept nogil:
    cdef uint64_t z
    if kind == GOLD64:
        s[0] += GOLDEN
        z = s[0]
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
        return z ^ (z >> 31)
    elif kind == WEAK_LCG16:
        s[0] = (LCG16_A * s[0] + LCG16_C) & 0xFFFFULL
        return s[0]
    else:
        s[0] = LCG64_A * s[0] + LCG64_C
        return s[0]


cdef inline double _uniform(int kind, uint64_t x) noexcept nogil:
    # open interval (0, 1)
    if kind == WEAK_LCG16:
        return (<double>x + 0.5) * (1.0 / 65536.0)
    return (<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0)


cdef inline int _check_kind(int kind) except -1:
    if kind < 0 or kind > 2:
        raise ValueError(f"unknown generator kind {kind}")
    return 0


def fill_raw(int kind, state, Py_ssize_t n):
    _check_kind(kind)
    cdef uint64_t s = state
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = _next(kind, &s)
    return out, int(s)


def fill_uniform(int kind, state, Py_ssize_t n):
    _check_kind(kind)
    cdef uint64_t s = state
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = _uniform(kind, _next(kind, &s))
    return out, int(s)


def fill_symbols(int kind, state, Py_ssize_t n, uint64_t bucket, uint64_t last):
    """Symbols ``x // bucket`` for raw draws ``x <= last``; larger draws are rejected."""
    _check_kind(kind)
    cdef uint64_t s = state
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] view = out
    cdef Py_ssize_t i = 0
    cdef uint64_t x
    with nogil:
        while i < n:
            x = _next(kind, &s)
            if x > last:
                continue
            view[i] = <int64_t>(x // bucket)
            i += 1
    return out, int(s)


def target_positions(int kind, state, Py_ssize_t n, uint64_t bucket, uint64_t last,
                     uint64_t target):
    """Indices, among the first ``n`` accepted symbols, where the symbol equals ``target``."""
    _check_kind(kind)
    cdef uint64_t s = state
    cdef uint64_t lo = target * bucket
    cdef uint64_t width = bucket
    cdef Py_ssize_t cap = 64 + n // 64
    out = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] view = out
    cdef Py_ssize_t i = 0, k = 0
    cdef uint64_t x
    while i < n:
        with nogil:
            while i < n:
                x = _next(kind, &s)
                if x > last:
                    continue
                if x - lo < width:
                    if k == cap:
                        break
                    view[k] = i
                    k += 1
                i += 1
        if i < n:
            # buffer full; the draw in x is still pending
            cap *= 2
            out = np.resize(out, cap)
            view = out
            view[k] = i
            k += 1
            i += 1
    return out[:k].copy(), int(s)


def fill_gamma(int kind, state, double shape, Py_ssize_t n):
    """Unit-scale gamma variates, Marsaglia-Tsang with four draws per attempt."""
    _check_kind(kind)
    if not shape > 0.0:
        raise ValueError("shape must be positive")
    cdef uint64_t s = state
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef double alpha = shape if shape >= 1.0 else shape + 1.0
    cdef double d = alpha - 1.0 / 3.0
    cdef double c = 1.0 / sqrt(9.0 * d)
    cdef double inv_shape = 1.0 / shape
    cdef int boost = shape < 1.0
    cdef double u1, u2, u3, u4, z, v, z2
    cdef Py_ssize_t i = 0
    with nogil:
        while i < n:
            u1 = _uniform(kind, _next(kind, &s))
            u2 = _uniform(kind, _next(kind, &s))
            u3 = _uniform(kind, _next(kind, &s))
            u4 = _uniform(kind, _next(kind, &s))
            z = sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)
            v = 1.0 + c * z
            if v <= 0.0:
                continue
            v = v * v * v
            z2 = z * z
            if u3 < 1.0 - 0.0331 * z2 * z2 or log(u3) < 0.5 * z2 + d * (1.0 - v + log(v)):
                if boost:
                    view[i] = d * v * exp(log(u4) * inv_shape)
                else:
                    view[i] = d * v
                i += 1
    return out, int(s)
