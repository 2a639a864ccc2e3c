import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geomrand.gamma import DegenerateSample, fit_mle
from geomrand.sources import create_generator
from geomrand.spacing import (
    GapConvention,
    GapSeries,
    InsufficientOccurrences,
    extract_gaps,
    summarize,
)

JIT = GapConvention.EXCLUSIVE_JITTERED


def test_simple_stream():
    s = extract_gaps(list("ABAAB"), "A")
    assert s.gaps.tolist() == [2.0, 1.0]
    assert s.occurrences == 3 and s.stream_length == 5
    assert (s.first_index, s.last_index) == (0, 3)


def test_all_target():
    assert extract_gaps(list("AAAA"), "A").gaps.tolist() == [1.0, 1.0, 1.0]


def test_numpy_stream():
    s = extract_gaps(np.array([5, 1, 5, 2, 2, 5]), 5)
    assert s.gaps.tolist() == [2.0, 3.0]


@pytest.mark.parametrize("stream", [list("ABBB"), list("BBBB")])
def test_insufficient(stream):
    with pytest.raises(InsufficientOccurrences):
        extract_gaps(stream, "A")


def test_empty_stream():
    with pytest.raises(ValueError):
        extract_gaps([], 0)


def test_jitter_needs_rng():
    with pytest.raises(ValueError):
        extract_gaps(list("AA"), "A", JIT)
    with pytest.raises(ValueError):
        extract_gaps(list("AA"), "A", GapConvention.INDEX_DIFFERENCE, create_generator("gold64", 1))


def test_uniform_stream_mean_gap():
    stream = create_generator("gold64", 17).symbols(512, 100_000)
    s = extract_gaps(stream, 0)
    assert abs(s.gaps.mean() - 512.8) <= 5 * 512.8 / math.sqrt(195)


def test_series_is_immutable():
    s = extract_gaps(list("ABA"), "A")
    with pytest.raises(ValueError):
        s.gaps[0] = 7


symbols = st.lists(st.integers(0, 3), min_size=2, max_size=200)


@given(symbols)
def test_index_difference_invariants(stream):
    if stream.count(0) < 2:
        return
    s = extract_gaps(stream, 0)
    assert len(s) == s.occurrences - 1
    assert np.all(s.gaps >= 1) and np.all(s.gaps == np.round(s.gaps))
    assert s.gaps.sum() + s.first_index == s.last_index


@given(symbols, st.randoms(use_true_random=False))
def test_permuting_non_targets_between_hits(stream, rnd):
    if stream.count(0) < 2:
        return
    hits = [i for i, v in enumerate(stream) if v == 0]
    shuffled = list(stream)
    for a, b in zip(hits, hits[1:]):
        inner = shuffled[a + 1:b]
        rnd.shuffle(inner)
        shuffled[a + 1:b] = inner
    assert extract_gaps(shuffled, 0) == extract_gaps(stream, 0)


@given(symbols, st.integers(0, 2**64 - 1))
def test_jittered_close_to_index(stream, seed):
    if stream.count(0) < 2:
        return
    exact = extract_gaps(stream, 0)
    jit = extract_gaps(stream, 0, JIT, create_generator("gold64", seed))
    assert np.all(jit.gaps > 0)
    assert np.all(np.abs(jit.gaps - exact.gaps) < 1)
    assert jit.convention is JIT


def test_summarize_constant():
    s = summarize(extract_gaps(list("AAAA"), "A"))
    assert (s.mean, s.mean_log, s.s_stat) == (1.0, 0.0, 0.0)
    with pytest.raises(DegenerateSample):
        fit_mle(s)


def test_summarize_1234():
    s = summarize(np.array([1.0, 2.0, 3.0, 4.0]))
    assert s.n == 4
    assert s.mean == 2.5
    # direct arithmetic: log(24)/4, log 2.5 - log(24)/4
    assert s.mean_log == pytest.approx(0.7945134575869864, abs=1e-15)
    assert s.s_stat == pytest.approx(0.12177727428716866, abs=1e-15)
    assert s.mean_log == pytest.approx(0.7945133, abs=1e-6)
    assert s.s_stat == pytest.approx(0.1217776, abs=1e-6)


def test_summarize_equal_values():
    s = summarize(np.array([math.e, math.e]))
    assert s.mean == pytest.approx(math.e) and s.mean_log == pytest.approx(1.0)
    assert abs(s.s_stat) < 1e-15


def test_summarize_needs_two():
    with pytest.raises(InsufficientOccurrences):
        summarize(np.array([3.0]))


@given(st.lists(st.floats(0.1, 1e3), min_size=2, max_size=50), st.floats(1e-3, 1e3))
def test_scale_invariance(gaps, c):
    a = summarize(np.array(gaps))
    b = summarize(np.array(gaps) * c)
    assert b.mean == pytest.approx(c * a.mean, rel=1e-12)
    assert b.s_stat == pytest.approx(a.s_stat, abs=1e-12)


def test_gap_series_equality():
    a = extract_gaps(list("ABA"), "A")
    assert a == extract_gaps(list("ABA"), "A")
    assert a != extract_gaps(list("ABBA"), "A")
    assert isinstance(a, GapSeries)
