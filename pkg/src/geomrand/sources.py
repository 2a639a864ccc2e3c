"""Symbol sources: seeded built-in generators and external streams.

Built-in generators (all outputs reproducible bit-for-bit from the seed):

``gold64``
    SplitMix64: a Weyl counter stepped by 0x9E3779B97F4A7C15 and passed
    through the Stafford variant-13 mixer. Period 2**64.
``weak-lcg16``
    ``x <- (129 x + 1) mod 2**16``. Full period 65536 but the multiplier
    2**7 + 1 has potency 3, so successive outputs are strongly correlated.
    Negative control.
``full-lcg64``
    ``x <- (6364136223846793005 x + 1442695040888963407) mod 2**64``
    (Knuth's MMIX constants). Output is the full state.

Symbols over an alphabet of size ``m`` come from the top of the raw word:
with ``bucket = 2**bits // m``, raw values ``>= bucket * m`` are rejected and
the rest map to ``x // bucket``. Uniform variates are
``(x >> (bits - 53) + 0.5) / 2**53`` (``(x + 0.5) / 2**16`` for the 16-bit
generator), so they never hit 0 or 1.
"""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import advance, kernels

__all__ = [
    "GeneratorKind",
    "GeneratorHandle",
    "StreamFormat",
    "StreamSpec",
    "SourceError",
    "MalformedToken",
    "BiasedReduction",
    "StreamExhausted",
    "create_generator",
    "derive_seed",
    "next_symbol",
    "open_stream",
    "decode_stream",
    "reduction",
]

MASK64 = (1 << 64) - 1
STDIN = "-"


class GeneratorKind(str, enum.Enum):
    GOLD64 = "gold64"
    WEAK_LCG16 = "weak-lcg16"
    FULL_LCG64 = "full-lcg64"
    EXTERNAL = "external"


_KIND_CODE = {GeneratorKind.GOLD64: 0, GeneratorKind.WEAK_LCG16: 1, GeneratorKind.FULL_LCG64: 2}
_RAW_BITS = {GeneratorKind.GOLD64: 64, GeneratorKind.WEAK_LCG16: 16, GeneratorKind.FULL_LCG64: 64}


class SourceError(Exception):
    """Base class for stream decoding problems."""


class MalformedToken(SourceError, ValueError):
    pass


class BiasedReduction(SourceError, ValueError):
    """The alphabet size does not divide the raw range of the stream format."""


class StreamExhausted(SourceError):
    pass


def reduction(bits: int, alphabet_size: int) -> tuple[int, int]:
    """``(bucket, last)`` for unbiased reduction of ``bits``-bit words to ``alphabet_size`` symbols."""
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    if alphabet_size > 1 << bits:
        raise ValueError(f"alphabet_size {alphabet_size} exceeds the {bits}-bit raw range")
    bucket = (1 << bits) // alphabet_size
    return bucket, bucket * alphabet_size - 1


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for replicate ``index``: the ``index+1``-th SplitMix64 output from ``master_seed``.

    The mixer is a bijection and the counters differ, so distinct indices get
    distinct seeds.
    """
    return _mix64((master_seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64)


class GeneratorHandle:
    """Single-owner generator state. Not safe to share between threads."""

    def __init__(self, kind: GeneratorKind, seed: int | None = None,
                 stream: np.ndarray | None = None):
        self.kind = GeneratorKind(kind)
        if self.kind is GeneratorKind.EXTERNAL:
            if stream is None:
                raise ValueError("external handle needs a decoded symbol stream")
            self.seed = None
            self.stream = np.asarray(stream, dtype=np.int64)
            self.cursor = 0
            self._code = None
            self.state = None
            return
        if seed is None:
            raise ValueError("built-in generators need a seed")
        self.seed = int(seed) & MASK64
        self._code = _KIND_CODE[self.kind]
        self.bits = _RAW_BITS[self.kind]
        self.state = self.seed & ((1 << self.bits) - 1)

    def __repr__(self):
        if self.kind is GeneratorKind.EXTERNAL:
            return f"GeneratorHandle(external, cursor={self.cursor}/{self.stream.size})"
        return f"GeneratorHandle({self.kind.value}, seed={self.seed:#x})"

    def _builtin(self) -> int:
        if self._code is None:
            raise TypeError("operation needs a built-in generator, not an external stream")
        return self._code

    def copy(self) -> "GeneratorHandle":
        if self.kind is GeneratorKind.EXTERNAL:
            other = GeneratorHandle(self.kind, stream=self.stream)
            other.cursor = self.cursor
            return other
        other = GeneratorHandle(self.kind, self.seed)
        other.state = self.state
        return other

    def raw(self, n: int) -> np.ndarray:
        out, self.state = kernels.fill_raw(self._builtin(), self.state, n)
        return out

    def skip(self, n: int) -> None:
        if self.kind is GeneratorKind.EXTERNAL:
            self.cursor += n
        else:
            self.state = advance(self._builtin(), self.state, n)

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles in the open interval (0, 1)."""
        out, self.state = kernels.fill_uniform(self._builtin(), self.state, n)
        return out

    def standard_gamma(self, shape: float, n: int) -> np.ndarray:
        """``n`` unit-scale gamma variates (mean ``shape``)."""
        out, self.state = kernels.fill_gamma(self._builtin(), self.state, float(shape), n)
        return out

    def symbols(self, alphabet_size: int, n: int) -> np.ndarray:
        if self.kind is GeneratorKind.EXTERNAL:
            return self._take(n)
        bucket, last = reduction(self.bits, alphabet_size)
        out, self.state = kernels.fill_symbols(self._code, self.state, n, bucket, last)
        return out

    def target_positions(self, alphabet_size: int, target: int, n: int) -> np.ndarray:
        """Indices within the next ``n`` symbols where the symbol equals ``target``."""
        if not 0 <= target < alphabet_size:
            raise ValueError(f"target {target} outside [0, {alphabet_size})")
        if self.kind is GeneratorKind.EXTERNAL:
            return np.flatnonzero(self._take(n) == target)
        bucket, last = reduction(self.bits, alphabet_size)
        out, self.state = kernels.target_positions(self._code, self.state, n, bucket, last, target)
        return out

    def _take(self, n: int) -> np.ndarray:
        end = self.cursor + n
        if end > self.stream.size:
            raise StreamExhausted(
                f"requested symbols up to {end} but the stream holds {self.stream.size}"
            )
        out = self.stream[self.cursor:end]
        self.cursor = end
        return out


def create_generator(kind: GeneratorKind | str, seed: int) -> GeneratorHandle:
    kind = GeneratorKind(kind)
    if kind is GeneratorKind.EXTERNAL:
        raise ValueError("external streams are opened with open_stream, not seeded")
    return GeneratorHandle(kind, seed)


def next_symbol(rng: GeneratorHandle, alphabet_size: int) -> int:
    """One uniform symbol in ``[0, alphabet_size)``."""
    return int(rng.symbols(alphabet_size, 1)[0])


class StreamFormat(str, enum.Enum):
    RAW_BYTES = "raw"
    LE32 = "le32"
    ASCII = "ascii"


@dataclass(frozen=True)
class StreamSpec:
    origin: str | Path
    format: StreamFormat = StreamFormat.ASCII
    alphabet_size: int = 512

    def __post_init__(self):
        object.__setattr__(self, "origin", str(self.origin))
        object.__setattr__(self, "format", StreamFormat(self.format))
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be at least 2")


def _read_bytes(origin: str | Path) -> bytes:
    if str(origin) == STDIN:
        return sys.stdin.buffer.read()
    return Path(origin).read_bytes()


def decode_stream(data: bytes, fmt: StreamFormat | str, alphabet_size: int) -> np.ndarray:
    """Decode raw bytes to symbols in ``[0, alphabet_size)``."""
    fmt = StreamFormat(fmt)
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    if fmt is StreamFormat.RAW_BYTES:
        if 256 % alphabet_size:
            raise BiasedReduction(
                f"alphabet size {alphabet_size} does not divide 256; use le32 input instead"
            )
        return np.frombuffer(data, dtype=np.uint8).astype(np.int64) % alphabet_size
    if fmt is StreamFormat.LE32:
        if len(data) % 4:
            raise MalformedToken(f"le32 stream length {len(data)} is not a multiple of 4")
        words = np.frombuffer(data, dtype="<u4").astype(np.int64)
        bucket, last = reduction(32, alphabet_size)
        return words[words <= last] // bucket
    tokens = data.split()
    out = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        if not tok.isdigit():
            raise MalformedToken(f"token {i} ({tok[:20]!r}) is not a nonnegative decimal integer")
        v = int(tok)
        if v >= alphabet_size:
            raise MalformedToken(f"token {i} ({v}) is outside [0, {alphabet_size})")
        out[i] = v
    return out


def open_stream(spec: StreamSpec) -> np.ndarray:
    """Read and decode the stream described by ``spec``. OSError propagates."""
    return decode_stream(_read_bytes(spec.origin), spec.format, spec.alphabet_size)
