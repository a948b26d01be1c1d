"""Index codec conventions, deterministic sample stream, file quantizer.

Boundary conventions under test: cells are half-open on the left, zero
belongs to the first positive cell, an input beyond the support maps to
the overload index of its sign, and negative inputs mirror positive
ones exactly.
"""

import math
import struct

import numpy as np
import pytest

from plscq import analysis, codec, design

SEED = 20260814


def make(N, L, x_max):
    return design.build_codebook(design.QuantizerConfig(N=N, L=L, x_max=x_max))


@pytest.fixture(scope="module")
def cb16():
    return make(16, 2, 3.0)


@pytest.fixture(scope="module")
def cb128():
    return make(128, 8, analysis.support_threshold_formula(128))


def test_zero_maps_to_first_positive_cell(cb16):
    assert codec.encode(cb16, 0.0) == 8
    assert codec.encode(cb16, -0.0) == 8


def test_support_edge_and_overload(cb16):
    x_max = cb16.config.x_max
    assert codec.encode(cb16, x_max) == 14  # last granular cell, half-open (lo, hi]
    assert codec.encode(cb16, np.nextafter(x_max, 4.0)) == 15
    assert codec.encode(cb16, 100.0) == 15
    assert codec.encode(cb16, -x_max) == 1
    assert codec.encode(cb16, -100.0) == 0


def test_interior_thresholds_belong_to_lower_cell(cb16):
    half = cb16.config.N // 2
    for j in range(1, len(cb16.cell_thresholds) - 1):
        t = cb16.cell_thresholds[j]
        assert codec.encode(cb16, t) == half + j - 1
        assert codec.encode(cb16, np.nextafter(t, 4.0)) == half + j
        assert codec.encode(cb16, -t) == half - j  # mirrored half-open convention


def test_mirror_symmetry(cb128):
    xs = codec.generate_gaussian(SEED, 4096) * 1.5
    idx_pos = codec.encode_many(cb128, np.abs(xs))
    idx_neg = codec.encode_many(cb128, -np.abs(xs))
    assert np.array_equal(idx_neg, cb128.config.N - 1 - idx_pos)
    for k in (0, 5, 63, 64, 127):
        assert codec.mirror_index(cb128, codec.mirror_index(cb128, k)) == k
        assert codec.decode(cb128, codec.mirror_index(cb128, k)) == -codec.decode(cb128, k)


def test_decode_levels(cb16):
    half = cb16.config.N // 2
    for k, level in enumerate(cb16.reproduction_levels):
        assert codec.decode(cb16, half + k) == level
        assert codec.decode(cb16, half - 1 - k) == -level
    with pytest.raises(ValueError):
        codec.decode(cb16, 16)
    with pytest.raises(ValueError):
        codec.decode_many(cb16, [0, -1])


def test_encode_decode_idempotent(cb128):
    every_index = np.arange(cb128.config.N)
    values = codec.decode_many(cb128, every_index)
    assert np.array_equal(codec.encode_many(cb128, values), every_index)


def test_reconstruction_error_bounded(cb128):
    xs = codec.generate_gaussian(SEED + 1, 100_000)
    xs = xs[np.abs(xs) <= cb128.config.x_max]
    err = np.abs(xs - codec.decode_many(cb128, codec.encode_many(cb128, xs)))
    assert err.max() <= max(cb128.layout.cell_lengths) / 2.0 + 1e-12


def test_every_index_reachable(cb16):
    xs = np.arange(-3.6, 3.6, 0.001)
    seen = set(codec.encode_many(cb16, xs).tolist())
    assert seen == set(range(16))


def test_vector_encode_matches_scalar(cb16):
    xs = codec.generate_gaussian(SEED + 2, 300) * 2.0
    vector = codec.encode_many(cb16, xs)
    assert vector.tolist() == [codec.encode(cb16, float(x)) for x in xs]


def test_encode_rejects_non_finite(cb16):
    with pytest.raises(ValueError, match="sample 2"):
        codec.encode_many(cb16, [0.0, 1.0, math.nan, 2.0])
    with pytest.raises(ValueError):
        codec.encode(cb16, math.inf)


def test_generator_is_deterministic():
    a = codec.generate_gaussian(7, 1000)
    b = codec.generate_gaussian(7, 1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, codec.generate_gaussian(8, 1000))


def test_generator_blocks_are_position_invariant():
    whole = codec.generate_gaussian(7, 1000)
    parts = np.concatenate(
        [codec._gaussian_block(7, 0, 600), codec._gaussian_block(7, 600, 400)]
    )
    assert np.array_equal(whole, parts)


def test_generator_moments():
    xs = codec.generate_gaussian(SEED + 3, 1_000_000)
    n = xs.size
    assert abs(xs.mean()) < 4.0 / math.sqrt(n)
    assert abs(xs.var() - 1.0) < 4.0 * math.sqrt(2.0 / n)
    assert abs((xs**3).mean()) < 4.0 * math.sqrt(15.0 / n)


def test_uniform_block_is_open_interval():
    u = codec._uniform_block(11, 0, 100_000)
    assert u.min() > 0.0
    assert u.max() < 1.0


def test_generate_rejects_bad_count():
    with pytest.raises(ValueError):
        codec.generate_gaussian(0, 0)


def test_monte_carlo_deterministic(cb128):
    first = codec.monte_carlo_sqnr(cb128, 42, 50_000)
    second = codec.monte_carlo_sqnr(cb128, 42, 50_000)
    assert first == second
    assert first.count == 50_000


def test_monte_carlo_matches_exact(cb128):
    exact = analysis.exact_distortion(cb128).sqnr_db
    stats = codec.monte_carlo_sqnr(cb128, 42, 1_000_000)
    assert abs(stats.sqnr_db - exact) < 0.05


def test_monte_carlo_chunking_matches_single_pass(cb128):
    count = 2_200_001  # crosses two chunk boundaries, odd tail
    stats = codec.monte_carlo_sqnr(cb128, 9, count)
    xs = codec.generate_gaussian(9, count)
    err = xs - codec.decode_many(cb128, codec.encode_many(cb128, xs))
    assert math.isclose(stats.signal_power, float(xs @ xs) / count, rel_tol=1e-12)
    assert math.isclose(stats.noise_power, float(err @ err) / count, rel_tol=1e-12)


def test_quantize_file_binary_round_trip(cb128, tmp_path):
    xs = codec.generate_gaussian(SEED + 4, 10_000)
    src = tmp_path / "samples.f64"
    dst = tmp_path / "indices.u16"
    xs.astype("<f8").tofile(src)
    stats = codec.quantize_file(cb128, str(src), str(dst))
    expected = codec.encode_many(cb128, xs)
    assert dst.read_bytes() == expected.astype("<u2").tobytes()
    err = xs - codec.decode_many(cb128, expected)
    assert math.isclose(stats.noise_power, float(err @ err) / xs.size, rel_tol=1e-12)


def test_quantize_file_output_is_little_endian(cb16, tmp_path):
    src = tmp_path / "one.f64"
    dst = tmp_path / "one.u16"
    np.array([100.0]).astype("<f8").tofile(src)  # positive overload, index 15
    codec.quantize_file(cb16, str(src), str(dst))
    assert dst.read_bytes() == struct.pack("<H", 15)


def test_quantize_file_text_mode(cb128, tmp_path):
    src = tmp_path / "samples.txt"
    dst = tmp_path / "indices.u16"
    src.write_text("0.5\n\n-1.25\n  2.0 \n")  # blank and padded lines are fine
    stats = codec.quantize_file(cb128, str(src), str(dst), text=True)
    assert stats.count == 3
    expected = codec.encode_many(cb128, [0.5, -1.25, 2.0])
    assert dst.read_bytes() == expected.astype("<u2").tobytes()


def test_quantize_file_text_reports_record_number(cb128, tmp_path):
    src = tmp_path / "bad.txt"
    src.write_text("0.5\n1.0\noops\n")
    with pytest.raises(ValueError, match="record 3"):
        codec.quantize_file(cb128, str(src), str(tmp_path / "out.u16"), text=True)


def test_quantize_file_rejects_truncated_binary(cb128, tmp_path):
    src = tmp_path / "trunc.f64"
    src.write_bytes(b"\x00" * 20)  # 2.5 doubles
    with pytest.raises(OSError, match="4 stray bytes"):
        codec.quantize_file(cb128, str(src), str(tmp_path / "out.u16"))


def test_quantize_file_rejects_empty_input(cb128, tmp_path):
    src = tmp_path / "empty.f64"
    src.write_bytes(b"")
    with pytest.raises(ValueError, match="no samples"):
        codec.quantize_file(cb128, str(src), str(tmp_path / "out.u16"))


def test_quantize_file_rejects_non_finite_sample(cb128, tmp_path):
    src = tmp_path / "nan.f64"
    np.array([1.0, math.nan, 2.0]).astype("<f8").tofile(src)
    with pytest.raises(ValueError, match="record 2"):
        codec.quantize_file(cb128, str(src), str(tmp_path / "out.u16"))


def test_quantize_file_rejects_oversized_codebook(tmp_path):
    cb = make(65538, 1, 4.0)
    src = tmp_path / "samples.f64"
    np.array([0.0]).astype("<f8").tofile(src)
    with pytest.raises(ValueError, match="16-bit"):
        codec.quantize_file(cb, str(src), str(tmp_path / "out.u16"))


def test_noiseless_input_reports_infinite_sqnr(cb16, tmp_path):
    levels = codec.decode_many(cb16, np.arange(16))
    src = tmp_path / "levels.f64"
    levels.astype("<f8").tofile(src)
    stats = codec.quantize_file(cb16, str(src), str(tmp_path / "out.u16"))
    assert stats.noise_power == 0.0
    assert math.isinf(stats.sqnr_db)
