"""Operational quantization: index codec, test-signal generator, empirical SQNR.

Index layout for an N-level codebook: indices 0 .. N/2-1 are the
negative-side levels from most negative upward, indices N/2 .. N-1 the
positive-side levels ascending, so index N-1 is the positive overload
level and mirror(k) = N-1-k negates a level.  Cells are half-open on the
left, (x_{j-1}, x_j], and x = 0 belongs to the first positive cell; an
input beyond +-x_max maps to the overload index of its sign.  Segment and
cell lookup are O(1) ceiling arithmetic followed by a containment check
against the threshold table that shifts the index by one when a rounding
error put the sample on the wrong side of a boundary.

The Gaussian test stream is fully specified so runs reproduce bit for bit
across platforms: sample k is produced by the SplitMix64 mix of the
64-bit counter seed + (k+1)*0x9E3779B97F4A7C15 (wrapping arithmetic),
mapped to a uniform in (0, 1) via ((z >> 11) + 0.5) * 2**-53, and pairs
of uniforms feed the Box-Muller transform (cos branch for even k, sin for
odd).  Only libm's last-bit variation in log/cos/sin can differ between
platforms, which is far inside the tolerances used anywhere downstream.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from . import design

__all__ = [
    "StreamStats",
    "mirror_index",
    "encode",
    "decode",
    "encode_many",
    "decode_many",
    "generate_gaussian",
    "monte_carlo_sqnr",
    "quantize_file",
]

_SPLITMIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SPLITMIX_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SPLITMIX_M2 = np.uint64(0x94D049BB133111EB)
_U64_TO_UNIT = 2.0**-53
_CHUNK = 1 << 20


@dataclass(frozen=True)
class StreamStats:
    count: int
    signal_power: float
    noise_power: float
    sqnr_db: float


def mirror_index(codebook: design.Codebook, idx: int) -> int:
    """Index of the sign-negated level."""
    return codebook.config.N - 1 - idx


def _tables(codebook):
    layout = codebook.layout
    breaks = np.asarray(layout.segment_breaks)
    thresholds = np.asarray(codebook.cell_thresholds)
    counts = np.asarray(layout.cells_per_segment, dtype=np.int64)
    deltas = np.asarray(layout.cell_lengths)
    first_cell = np.concatenate(([0], np.cumsum(counts)))  # cells before each segment
    levels = np.asarray(codebook.reproduction_levels)
    return breaks, thresholds, counts, deltas, first_cell, levels


def encode_many(codebook: design.Codebook, samples) -> np.ndarray:
    """Vectorized encode; returns int64 level indices."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        x = x.reshape(-1)
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise ValueError(f"sample {bad} is not finite: {x[bad]!r}")
    cfg = codebook.config
    breaks, thresholds, counts, deltas, first_cell, _ = _tables(codebook)
    a = np.abs(x)
    L, x_max = cfg.L, cfg.x_max

    seg = np.ceil(a * L / x_max).astype(np.int64)
    np.clip(seg, 1, L, out=seg)
    # repair off-by-one lookups at segment boundaries: cells are (lo, hi]
    seg[(a <= breaks[seg - 1]) & (seg > 1)] -= 1
    seg[(a > breaks[seg]) & (seg < L)] += 1

    cell = np.ceil((a - breaks[seg - 1]) / deltas[seg - 1]).astype(np.int64)
    np.clip(cell, 1, counts[seg - 1], out=cell)
    flat = first_cell[seg - 1] + cell - 1
    flat[(a <= thresholds[flat]) & (flat > 0)] -= 1
    flat[a > thresholds[flat + 1]] += 1

    positive_index = cfg.N // 2 + flat
    positive_index[a > x_max] = cfg.N - 1
    return np.where(x < 0.0, cfg.N - 1 - positive_index, positive_index)


def decode_many(codebook: design.Codebook, indices) -> np.ndarray:
    """Vectorized decode; returns reproduction values."""
    idx = np.asarray(indices, dtype=np.int64)
    n = codebook.config.N
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError(f"level index outside [0, {n - 1}]")
    levels = np.asarray(codebook.reproduction_levels)
    half = n // 2
    positive = idx >= half
    offset = np.where(positive, idx - half, half - 1 - idx)
    return np.where(positive, levels[offset], -levels[offset])


def encode(codebook: design.Codebook, x: float) -> int:
    """Level index of a single sample."""
    if not math.isfinite(x):
        raise ValueError(f"sample is not finite: {x!r}")
    return int(encode_many(codebook, np.array([x]))[0])


def decode(codebook: design.Codebook, idx: int) -> float:
    """Reproduction value of a single level index."""
    return float(decode_many(codebook, np.array([idx]))[0])


def _uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    counter = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + counter * _SPLITMIX_GAMMA
    z ^= z >> np.uint64(30)
    z *= _SPLITMIX_M1
    z ^= z >> np.uint64(27)
    z *= _SPLITMIX_M2
    z ^= z >> np.uint64(31)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _U64_TO_UNIT


def _gaussian_block(seed: int, first_sample: int, count: int) -> np.ndarray:
    """Samples [first_sample, first_sample+count) of the stream; first_sample even."""
    pairs = (count + 1) // 2
    u = _uniform_block(seed, first_sample, 2 * pairs)
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    angle = 2.0 * math.pi * u[1::2]
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def generate_gaussian(seed: int, count: int) -> np.ndarray:
    """Deterministic standard-normal stream; same seed, same stream, anywhere."""
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    return _gaussian_block(seed, 0, count)


def _stats_from_powers(count: int, signal_sum: float, noise_sum: float) -> StreamStats:
    signal_power = signal_sum / count
    noise_power = noise_sum / count
    if noise_power == 0.0:
        sqnr_db = math.inf  # constant or already-quantized input, noiseless
    else:
        sqnr_db = 10.0 * math.log10(signal_power / noise_power)
    return StreamStats(count, signal_power, noise_power, sqnr_db)


def _accumulate(codebook, block):
    idx = encode_many(codebook, block)
    err = block - decode_many(codebook, idx)
    return float(np.dot(block, block)), float(np.dot(err, err)), idx


def monte_carlo_sqnr(codebook: design.Codebook, seed: int, count: int) -> StreamStats:
    """Empirical SQNR of the codebook over a deterministic Gaussian stream."""
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    signal_parts, noise_parts = [], []
    done = 0
    while done < count:
        block = _gaussian_block(seed, done, min(_CHUNK, count - done))
        s, q, _ = _accumulate(codebook, block)
        signal_parts.append(s)
        noise_parts.append(q)
        done += block.size
    return _stats_from_powers(count, math.fsum(signal_parts), math.fsum(noise_parts))


def _read_samples(path: str, text: bool) -> np.ndarray:
    if text:
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            for record, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                try:
                    values.append(float(stripped))
                except ValueError:
                    raise ValueError(f"record {record}: not a decimal number: {stripped!r}") from None
        samples = np.array(values, dtype=np.float64)
    else:
        size = os.path.getsize(path)
        if size % 8 != 0:
            raise OSError(
                f"{path}: truncated sample file, {size % 8} stray bytes at byte offset {size - size % 8}"
            )
        samples = np.fromfile(path, dtype="<f8")
    if samples.size == 0:
        raise ValueError(f"{path}: input contains no samples")
    finite = np.isfinite(samples)
    if not finite.all():
        record = int(np.flatnonzero(~finite)[0]) + 1
        raise ValueError(f"record {record}: sample is not finite: {samples[record - 1]!r}")
    return samples


def quantize_file(codebook: design.Codebook, input_path: str, output_path: str, text: bool = False) -> StreamStats:
    """Quantize a sample file to little-endian uint16 indices; returns stream stats."""
    if codebook.config.N > 65536:
        raise ValueError(f"N={codebook.config.N} does not fit 16-bit indices")
    samples = _read_samples(input_path, text)
    signal_parts, noise_parts = [], []
    index_blocks = []
    for start in range(0, samples.size, _CHUNK):
        block = samples[start : start + _CHUNK]
        s, q, idx = _accumulate(codebook, block)
        signal_parts.append(s)
        noise_parts.append(q)
        index_blocks.append(idx.astype("<u2"))
    tmp = output_path + ".tmp"
    with open(tmp, "wb") as fh:
        for block in index_blocks:
            block.tofile(fh)
    os.replace(tmp, output_path)
    return _stats_from_powers(samples.size, math.fsum(signal_parts), math.fsum(noise_parts))
