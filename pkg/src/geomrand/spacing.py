"""Separation statistics of a target symbol in a symbol stream."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gamma import SampleSummary

__all__ = [
    "GapConvention",
    "GapSeries",
    "InsufficientOccurrences",
    "extract_gaps",
    "gaps_from_positions",
    "summarize",
]


class GapConvention(str, enum.Enum):
    """How a separation is measured.

    ``index``: difference of occurrence indices (integer, >= 1, mean 1/p).
    ``jittered``: each index is shifted by an independent U(0,1) before
    differencing, which makes the gaps continuous without moving the mean.
    """

    INDEX_DIFFERENCE = "index"
    EXCLUSIVE_JITTERED = "jittered"


class InsufficientOccurrences(ValueError):
    """Fewer than two target occurrences, so no separations exist."""


@dataclass(frozen=True, eq=False)
class GapSeries:
    gaps: np.ndarray
    occurrences: int
    stream_length: int
    convention: GapConvention
    first_index: int = -1
    last_index: int = -1

    def __post_init__(self):
        self.gaps.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, GapSeries):
            return NotImplemented
        return (
            self.occurrences == other.occurrences
            and self.stream_length == other.stream_length
            and self.convention == other.convention
            and self.first_index == other.first_index
            and self.last_index == other.last_index
            and np.array_equal(self.gaps, other.gaps)
        )

    def __len__(self):
        return self.gaps.size


def gaps_from_positions(positions: np.ndarray, stream_length: int,
                        convention: GapConvention | str = GapConvention.INDEX_DIFFERENCE,
                        rng=None) -> GapSeries:
    """Build a :class:`GapSeries` from sorted occurrence indices.

    ``rng`` must be a built-in generator handle for the jittered convention;
    it supplies one uniform per occurrence.
    """
    convention = GapConvention(convention)
    positions = np.asarray(positions, dtype=np.int64)
    occ = int(positions.size)
    if convention is GapConvention.INDEX_DIFFERENCE:
        if rng is not None:
            raise ValueError("index-difference gaps take no generator")
        gaps = np.diff(positions).astype(np.float64)
    else:
        if rng is None:
            raise ValueError("jittered gaps need a generator handle")
        jitter = rng.uniforms(occ) if occ else np.empty(0)
        gaps = np.diff(positions.astype(np.float64) + jitter)
    first = int(positions[0]) if occ else -1
    last = int(positions[-1]) if occ else -1
    return GapSeries(gaps, occ, int(stream_length), convention, first, last)


def extract_gaps(stream: Sequence | np.ndarray, target, 
                 convention: GapConvention | str = GapConvention.INDEX_DIFFERENCE,
                 rng=None) -> GapSeries:
    """Separations between successive occurrences of ``target`` in ``stream``.

    Raises
    ------
    InsufficientOccurrences
        ``target`` occurs fewer than twice.
    """
    if len(stream) == 0:
        raise ValueError("empty stream")
    if isinstance(stream, np.ndarray):
        positions = np.flatnonzero(stream == target)
    else:
        positions = np.fromiter((i for i, s in enumerate(stream) if s == target), dtype=np.int64)
    if positions.size < 2:
        raise InsufficientOccurrences(
            f"target occurs {positions.size} time(s) in {len(stream)} symbols; need at least 2"
        )
    return gaps_from_positions(positions, len(stream), convention, rng)


def summarize(series: GapSeries | np.ndarray) -> SampleSummary:
    gaps = series.gaps if isinstance(series, GapSeries) else np.asarray(series, dtype=np.float64)
    if gaps.size < 2:
        raise InsufficientOccurrences(f"{gaps.size} gap(s); need at least 2 to summarize")
    mean = math.fsum(gaps) / gaps.size
    mean_log = math.fsum(np.log(gaps)) / gaps.size
    return SampleSummary(n=int(gaps.size), mean=mean, mean_log=mean_log)
