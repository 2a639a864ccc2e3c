import io
import math

import numpy as np
import pytest
from scipy import stats

from geomrand.sources import (
    BiasedReduction,
    GeneratorHandle,
    GeneratorKind,
    MalformedToken,
    StreamExhausted,
    StreamFormat,
    StreamSpec,
    create_generator,
    decode_stream,
    derive_seed,
    next_symbol,
    open_stream,
    reduction,
)
from geomrand.spacing import extract_gaps

MASK = (1 << 64) - 1


def splitmix_reference(seed, n):
    """Plain-integer SplitMix64."""
    out, s = [], seed
    for _ in range(n):
        s = (s + 0x9E3779B97F4A7C15) & MASK
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def test_gold64_matches_reference_splitmix():
    assert create_generator("gold64", 1).raw(1000).tolist() == splitmix_reference(1, 1000)
    # published first output of SplitMix64 seeded with 0
    assert int(create_generator("gold64", 0).raw(1)[0]) == 0xE220A8397B1DCDAF


def test_lcg_recurrences():
    raw = create_generator("full-lcg64", 7).raw(5).tolist()
    x, ref = 7, []
    for _ in range(5):
        x = (6364136223846793005 * x + 1442695040888963407) & MASK
        ref.append(x)
    assert raw == ref
    raw = create_generator("weak-lcg16", 7).raw(5).tolist()
    x, ref = 7, []
    for _ in range(5):
        x = (129 * x + 1) & 0xFFFF
        ref.append(x)
    assert raw == ref


@pytest.mark.parametrize("kind", ["gold64", "weak-lcg16", "full-lcg64"])
def test_deterministic(kind):
    a = create_generator(kind, 1).raw(1000)
    b = create_generator(kind, 1).raw(1000)
    assert np.array_equal(a, b)
    assert np.array_equal(create_generator(kind, 1).symbols(512, 300),
                          create_generator(kind, 1).symbols(512, 300))


def test_weak_lcg_period():
    raw = create_generator("weak-lcg16", 12345).raw(3 * 65536)
    assert np.array_equal(raw[:65536], raw[65536:131072])
    assert np.unique(raw[:65536]).size == 65536  # full period, exactly 2**16


def test_unknown_kind():
    with pytest.raises(ValueError):
        create_generator("mersenne", 1)
    with pytest.raises(ValueError):
        create_generator(GeneratorKind.EXTERNAL, 1)


def test_gold64_uniformity_chi_square():
    sym = create_generator("gold64", 1).symbols(512, 1_000_000)
    counts = np.bincount(sym, minlength=512)
    chi2 = float(((counts - counts.mean()) ** 2 / counts.mean()).sum())
    lo, hi = stats.chi2.ppf([0.0005, 0.9995], 511)
    assert lo < chi2 < hi


def test_binary_alphabet_balance():
    sym = create_generator("gold64", 2).symbols(2, 1_000_000)
    assert abs(sym.mean() - 0.5) <= 0.0025


def test_symbol_range_and_next_symbol():
    rng = create_generator("gold64", 3)
    assert all(0 <= next_symbol(rng, 512) < 512 for _ in range(200))
    sym = create_generator("full-lcg64", 3).symbols(512, 10_000)
    assert sym.min() >= 0 and sym.max() < 512
    sym = create_generator("weak-lcg16", 3).symbols(1000, 10_000)
    assert sym.min() >= 0 and sym.max() < 1000


def test_rejection_reduction():
    bucket, last = reduction(16, 1000)
    assert (bucket, last) == (65, 64_999)
    bucket, last = reduction(64, 512)
    assert bucket == 1 << 55 and last == MASK
    # draws above `last` are skipped, not folded
    rng = create_generator("weak-lcg16", 0)
    raw = rng.copy().raw(20_000)
    kept = raw[raw <= last_16(1000)] // 65
    assert np.array_equal(rng.symbols(1000, kept.size), kept)


def last_16(m):
    return reduction(16, m)[1]


def test_target_positions_match_symbols():
    for kind in ("gold64", "weak-lcg16", "full-lcg64"):
        sym = create_generator(kind, 99).symbols(300, 50_000)
        pos = create_generator(kind, 99).target_positions(300, 7, 50_000)
        assert np.array_equal(pos, np.flatnonzero(sym == 7))


def test_target_frequency_large():
    n = 10_000_000
    p = 1 / 512
    hits = create_generator("gold64", 4).target_positions(512, 0, n).size
    assert abs(hits / n - p) <= 5 * math.sqrt(p * (1 - p) / n)


def test_derived_seeds():
    seeds = [derive_seed(42, r) for r in range(10_000)]
    assert len(set(seeds)) == len(seeds)
    assert seeds == [derive_seed(42, r) for r in range(10_000)]
    assert derive_seed(43, 0) != derive_seed(42, 0)
    a = create_generator("gold64", seeds[0]).symbols(512, 1000)
    b = create_generator("gold64", seeds[1]).symbols(512, 1000)
    assert not np.array_equal(a, b)


def test_skip_equals_draw():
    for kind in ("gold64", "weak-lcg16", "full-lcg64"):
        a = create_generator(kind, 5)
        a.raw(12_345)
        b = create_generator(kind, 5)
        b.skip(12_345)
        assert a.state == b.state


def test_uniform_open_interval():
    u = create_generator("gold64", 8).uniforms(100_000)
    assert u.min() > 0 and u.max() < 1
    u = create_generator("weak-lcg16", 8).uniforms(65536)
    assert u.min() > 0 and u.max() < 1


# --- external streams -------------------------------------------------------

def test_raw_bytes():
    assert decode_stream(bytes([0x00, 0x01, 0xFF]), "raw", 256).tolist() == [0, 1, 255]
    assert decode_stream(bytes([0x00, 0x81, 0xFF]), "raw", 128).tolist() == [0, 1, 127]


def test_raw_bytes_biased():
    with pytest.raises(BiasedReduction):
        decode_stream(b"\x00", "raw", 512)
    with pytest.raises(BiasedReduction):
        decode_stream(b"\x00", "raw", 100)


def test_ascii():
    assert decode_stream(b"3 7 11", "ascii", 512).tolist() == [3, 7, 11]
    assert decode_stream(b" 3\n\t7  11\n", "ascii", 512).tolist() == [3, 7, 11]


@pytest.mark.parametrize("text", [b"3 700", b"3 -1", b"3 x", b"3 1.5"])
def test_ascii_malformed(text):
    with pytest.raises(MalformedToken):
        decode_stream(text, "ascii", 512)


def test_le32_reduction():
    words = np.array([0, 1 << 23, (1 << 32) - 1, 5 << 23], dtype="<u4")
    assert decode_stream(words.tobytes(), "le32", 512).tolist() == [0, 1, 511, 5]
    # 2**32 // 3 * 3 - 1 is the largest accepted word for alphabet 3
    words = np.array([0, (1 << 32) - 1, 2863311530], dtype="<u4")
    assert decode_stream(words.tobytes(), "le32", 3).tolist() == [0, 2]
    with pytest.raises(MalformedToken):
        decode_stream(b"\x00\x01\x02", "le32", 512)


def test_open_stream_file_and_stdin(tmp_path, monkeypatch):
    f = tmp_path / "s.txt"
    f.write_text("1 2 3")
    assert open_stream(StreamSpec(f, "ascii", 4)).tolist() == [1, 2, 3]
    monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(b"4 5")))
    assert open_stream(StreamSpec("-", StreamFormat.ASCII, 8)).tolist() == [4, 5]
    with pytest.raises(OSError):
        open_stream(StreamSpec(tmp_path / "missing", "ascii", 4))


def test_ascii_round_trip_gaps(tmp_path):
    sym = create_generator("gold64", 21).symbols(512, 100_000)
    f = tmp_path / "seq.txt"
    f.write_text(" ".join(map(str, sym.tolist())))
    back = open_stream(StreamSpec(f, "ascii", 512))
    assert extract_gaps(back, 0) == extract_gaps(sym, 0)


def test_external_handle():
    h = GeneratorHandle(GeneratorKind.EXTERNAL, stream=np.arange(10) % 3)
    assert h.seed is None
    assert h.symbols(3, 4).tolist() == [0, 1, 2, 0]
    assert h.target_positions(3, 0, 6).tolist() == [2, 5]
    with pytest.raises(StreamExhausted):
        h.symbols(3, 1)
    with pytest.raises(TypeError):
        h.uniforms(1)
