"""Quantizer construction: segment layout, cell allocation, codebook.

An N-level quantizer with 2L segments splits each side of the support
region [0, x_max] into L equal-width segments.  Segment i receives an
integer number of cells N_i/2 proportional to the compressed length it
covers under the piecewise linear compressor, the per-side counts summing
to (N-2)/2 so that one level per side remains for the overload region.
Cells inside a segment share the length Delta_i = (x_max/L)/(N_i/2);
granular reproduction levels sit at cell midpoints and the outermost
level is the conditional mean (centroid) of the source beyond x_max.

Integer allocation policy (the proportional quotas are not integers):
largest-remainder apportionment.  Floor every quota, then hand the
remaining cells one each to the segments with the largest fractional
parts, ties broken toward the lower segment index.  If that still leaves
some segment empty (deep-tail segments at wide supports), pre-assign one
cell per segment and apportion the remaining (N-2)/2 - L cells by the
same rule applied to the rescaled quotas.  Either way the total is
conserved exactly and no count strays more than one cell from its quota.

Only the positive side is stored; the negative side is its mirror image
and sign handling belongs to the codec.
"""

import json
import math
import os
from dataclasses import dataclass, field

from . import compressor
from .gaussmath import SourceModel, tail_first_moment, tail_mass

__all__ = [
    "CODEBOOK_FORMAT_VERSION",
    "CodebookFormatError",
    "QuantizerConfig",
    "SegmentLayout",
    "Codebook",
    "allocate_cells",
    "build_layout",
    "build_codebook",
    "serialize_codebook",
    "deserialize_codebook",
    "save_codebook",
    "load_codebook",
]

CODEBOOK_FORMAT_VERSION = 1


class CodebookFormatError(ValueError):
    """Raised when a serialized codebook declares an unsupported version."""


@dataclass(frozen=True)
class QuantizerConfig:
    N: int
    L: int
    x_max: float
    source: SourceModel = field(default_factory=SourceModel)

    def __post_init__(self):
        if self.N < 4 or self.N % 2 != 0:
            raise ValueError(f"level count must be even and >= 4, got N={self.N}")
        if self.L < 1:
            raise ValueError(f"segment count must be >= 1, got L={self.L}")
        if (self.N - 2) // 2 < self.L:
            raise ValueError(
                f"N={self.N} provides only {(self.N - 2) // 2} granular cells per side, "
                f"fewer than L={self.L} segments"
            )
        if not (math.isfinite(self.x_max) and self.x_max > 0.0):
            raise ValueError(f"support threshold must be finite and positive, got {self.x_max}")

    @property
    def rate_bits(self) -> float:
        return math.log2(self.N)

    @property
    def cells_per_side(self) -> int:
        return (self.N - 2) // 2


@dataclass(frozen=True)
class SegmentLayout:
    segment_breaks: tuple
    midpoints: tuple
    cells_per_segment: tuple
    cell_lengths: tuple
    compressed_step: float


@dataclass(frozen=True)
class Codebook:
    config: QuantizerConfig
    layout: SegmentLayout
    cell_thresholds: tuple       # positive side, 0 up to x_max
    reproduction_levels: tuple   # positive side, granular midpoints then the overload centroid

    @property
    def overload_level(self) -> float:
        return self.reproduction_levels[-1]

    @property
    def granular_levels(self) -> tuple:
        return self.reproduction_levels[:-1]


def _largest_remainder(quotas, total: int):
    counts = [math.floor(q) for q in quotas]
    remainder = total - sum(counts)
    by_fraction = sorted(range(len(quotas)), key=lambda i: (counts[i] - quotas[i], i))
    for i in by_fraction[:remainder]:
        counts[i] += 1
    return counts


def allocate_cells(config: QuantizerConfig, pwl: compressor.PiecewiseLinearCompressor) -> tuple:
    """Integer cells per segment (one side) from the compressed-length quotas."""
    if pwl.L != config.L or pwl.x_max != config.x_max:
        raise ValueError(
            f"compressor built for (L={pwl.L}, x_max={pwl.x_max}) does not match "
            f"config (L={config.L}, x_max={config.x_max})"
        )
    per_side = config.cells_per_side
    quotas = [
        per_side * (pwl.knot_values[i + 1] - pwl.knot_values[i]) / pwl.x_max
        for i in range(config.L)
    ]
    counts = _largest_remainder(quotas, per_side)
    if min(counts) < 1:
        scale = (per_side - config.L) / per_side
        counts = [1 + c for c in _largest_remainder([q * scale for q in quotas], per_side - config.L)]
    return tuple(counts)


def build_layout(config: QuantizerConfig) -> SegmentLayout:
    """Segment breaks, midpoints, integer cell counts and cell lengths."""
    pwl = compressor.build_piecewise(config.L, config.x_max)
    counts = allocate_cells(config, pwl)
    return _layout_from_counts(config, counts, pwl)


def _layout_from_counts(config, counts, pwl=None):
    if pwl is None:
        pwl = compressor.build_piecewise(config.L, config.x_max)
    seg_width = config.x_max / config.L
    return SegmentLayout(
        segment_breaks=pwl.segment_breaks,
        midpoints=pwl.midpoints,
        cells_per_segment=tuple(counts),
        cell_lengths=tuple(seg_width / n for n in counts),
        compressed_step=config.x_max / config.cells_per_side,
    )


def _codebook_tables(config, layout):
    thresholds = [0.0]
    levels = []
    for i in range(config.L):
        lo = layout.segment_breaks[i]
        hi = layout.segment_breaks[i + 1]
        n = layout.cells_per_segment[i]
        delta = layout.cell_lengths[i]
        for j in range(1, n):
            thresholds.append(lo + j * delta)
        thresholds.append(hi)  # exact segment break, so cells tile with no seam
        for j in range(1, n + 1):
            levels.append(lo + (2 * j - 1) / 2.0 * delta)
    levels.append(tail_first_moment(config.x_max) / tail_mass(config.x_max))
    return tuple(thresholds), tuple(levels)


def build_codebook(config: QuantizerConfig) -> Codebook:
    """Full positive-side codebook: cell thresholds, midpoint levels, centroid."""
    layout = build_layout(config)
    thresholds, levels = _codebook_tables(config, layout)
    return Codebook(config, layout, thresholds, levels)


def serialize_codebook(codebook: Codebook) -> str:
    """Versioned JSON form. reproduction_levels holds the granular levels only;
    the overload centroid is the separate overload_level field."""
    doc = {
        "format_version": CODEBOOK_FORMAT_VERSION,
        "N": codebook.config.N,
        "L": codebook.config.L,
        "x_max": codebook.config.x_max,
        "cells_per_segment": list(codebook.layout.cells_per_segment),
        "cell_thresholds": list(codebook.cell_thresholds),
        "reproduction_levels": list(codebook.granular_levels),
        "overload_level": codebook.overload_level,
    }
    return json.dumps(doc, indent=2) + "\n"


def deserialize_codebook(text: str) -> Codebook:
    """Parse a serialized codebook, preserving the stored numbers bit for bit."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("codebook document must be a JSON object")
    version = doc.get("format_version")
    if version != CODEBOOK_FORMAT_VERSION:
        raise CodebookFormatError(
            f"unsupported codebook format_version {version!r}, expected {CODEBOOK_FORMAT_VERSION}"
        )
    try:
        config = QuantizerConfig(N=doc["N"], L=doc["L"], x_max=doc["x_max"])
        counts = tuple(int(c) for c in doc["cells_per_segment"])
        thresholds = tuple(float(t) for t in doc["cell_thresholds"])
        granular = tuple(float(y) for y in doc["reproduction_levels"])
        overload = float(doc["overload_level"])
    except KeyError as missing:
        raise ValueError(f"codebook document is missing field {missing}") from None
    per_side = config.cells_per_side
    if len(counts) != config.L or sum(counts) != per_side:
        raise ValueError("cells_per_segment is inconsistent with N and L")
    if len(thresholds) != per_side + 1 or len(granular) != per_side:
        raise ValueError("threshold/level table lengths are inconsistent with N")
    levels = granular + (overload,)
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])) or any(
        b <= a for a, b in zip(levels, levels[1:])
    ):
        raise ValueError("codebook tables are not strictly increasing")
    layout = _layout_from_counts(config, counts)
    return Codebook(config, layout, thresholds, levels)


def save_codebook(codebook: Codebook, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(serialize_codebook(codebook))
    os.replace(tmp, path)


def load_codebook(path: str) -> Codebook:
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize_codebook(fh.read())
