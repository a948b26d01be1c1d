"""Cell allocation, codebook construction and JSON round trip.

The frozen allocation vectors were computed with an independent
largest-remainder implementation before this suite was written.
"""

import json
import math
import os

import pytest

from plscq import compressor, design, gaussmath

# (N, L, x_max) -> cells per segment, one side
ALLOCATION_REF = {
    (128, 2, 3.80): (48, 15),
    (128, 4, 3.98): (28, 20, 11, 4),
    (128, 8, 4.03): (15, 14, 11, 9, 6, 4, 3, 1),
    (32, 8, 6.0): (4, 3, 2, 2, 1, 1, 1, 1),  # exercises the min-one fallback
}

CENTROID_AT_35 = 3.7513912648576997313


def make(N, L, x_max):
    return design.build_codebook(design.QuantizerConfig(N=N, L=L, x_max=x_max))


def test_config_validation():
    design.QuantizerConfig(N=4, L=1, x_max=3.0)  # smallest legal design
    with pytest.raises(ValueError):
        design.QuantizerConfig(N=7, L=2, x_max=3.0)
    with pytest.raises(ValueError):
        design.QuantizerConfig(N=2, L=1, x_max=3.0)
    with pytest.raises(ValueError):
        design.QuantizerConfig(N=8, L=4, x_max=3.0)  # only 3 cells per side
    with pytest.raises(ValueError):
        design.QuantizerConfig(N=8, L=0, x_max=3.0)
    with pytest.raises(ValueError):
        design.QuantizerConfig(N=8, L=2, x_max=math.inf)
    with pytest.raises(ValueError):
        design.QuantizerConfig(N=8, L=2, x_max=-1.0)


def test_config_properties():
    cfg = design.QuantizerConfig(N=128, L=8, x_max=4.03)
    assert cfg.rate_bits == 7.0
    assert cfg.cells_per_side == 63


@pytest.mark.parametrize("key,expected", sorted(ALLOCATION_REF.items()))
def test_allocation_reference_vectors(key, expected):
    N, L, x_max = key
    cfg = design.QuantizerConfig(N=N, L=L, x_max=x_max)
    pwl = compressor.build_piecewise(L, x_max)
    assert design.allocate_cells(cfg, pwl) == expected


@pytest.mark.parametrize("N", [16, 32, 64, 128, 256])
@pytest.mark.parametrize("L", [1, 2, 4, 7])
def test_allocation_conserves_total(N, L):
    for x_max in (2.0, 3.5, 5.0):
        cfg = design.QuantizerConfig(N=N, L=L, x_max=x_max)
        counts = design.allocate_cells(cfg, compressor.build_piecewise(L, x_max))
        assert sum(counts) == cfg.cells_per_side
        assert min(counts) >= 1


def test_allocation_rejects_mismatched_compressor():
    cfg = design.QuantizerConfig(N=128, L=8, x_max=4.03)
    with pytest.raises(ValueError):
        design.allocate_cells(cfg, compressor.build_piecewise(4, 4.03))
    with pytest.raises(ValueError):
        design.allocate_cells(cfg, compressor.build_piecewise(8, 3.5))


def test_codebook_tables():
    cb = make(128, 8, 4.03)
    per_side = cb.config.cells_per_side
    assert len(cb.cell_thresholds) == per_side + 1
    assert len(cb.reproduction_levels) == per_side + 1
    assert cb.cell_thresholds[0] == 0.0
    assert cb.cell_thresholds[-1] == 4.03  # exact endpoint
    assert all(b > a for a, b in zip(cb.cell_thresholds, cb.cell_thresholds[1:]))
    assert all(b > a for a, b in zip(cb.reproduction_levels, cb.reproduction_levels[1:]))


def test_granular_levels_are_cell_midpoints():
    cb = make(64, 4, 3.5)
    for k, y in enumerate(cb.granular_levels):
        lo, hi = cb.cell_thresholds[k], cb.cell_thresholds[k + 1]
        assert math.isclose(y, (lo + hi) / 2.0, abs_tol=1e-13)
        assert lo < y < hi


def test_overload_level_is_tail_centroid():
    cb = make(64, 4, 3.5)
    assert math.isclose(cb.overload_level, CENTROID_AT_35, rel_tol=1e-13)
    assert cb.overload_level > cb.config.x_max


def test_cell_lengths_tile_segments():
    cb = make(128, 8, 4.03)
    layout = cb.layout
    seg_width = cb.config.x_max / cb.config.L
    for n, delta in zip(layout.cells_per_segment, layout.cell_lengths):
        assert math.isclose(n * delta, seg_width, rel_tol=1e-14)


def test_serialize_round_trip_is_bit_exact():
    cb = make(128, 8, 4.027406153972326)
    text = design.serialize_codebook(cb)
    assert text.endswith("\n")
    back = design.deserialize_codebook(text)
    assert back.config == cb.config
    assert back.cell_thresholds == cb.cell_thresholds
    assert back.reproduction_levels == cb.reproduction_levels
    assert back.layout.cells_per_segment == cb.layout.cells_per_segment


def test_serialized_document_shape():
    cb = make(32, 2, 3.0)
    doc = json.loads(design.serialize_codebook(cb))
    assert doc["format_version"] == design.CODEBOOK_FORMAT_VERSION
    assert doc["N"] == 32 and doc["L"] == 2
    assert len(doc["reproduction_levels"]) == cb.config.cells_per_side  # granular only
    assert doc["overload_level"] == cb.overload_level
    assert len(doc["cell_thresholds"]) == cb.config.cells_per_side + 1


def test_deserialize_rejects_bad_documents():
    cb = make(32, 2, 3.0)
    doc = json.loads(design.serialize_codebook(cb))

    other = dict(doc, format_version=2)
    with pytest.raises(design.CodebookFormatError):
        design.deserialize_codebook(json.dumps(other))

    other = dict(doc)
    del other["overload_level"]
    with pytest.raises(ValueError):
        design.deserialize_codebook(json.dumps(other))

    other = dict(doc, cells_per_segment=[7, 9])  # wrong total
    with pytest.raises(ValueError):
        design.deserialize_codebook(json.dumps(other))

    other = dict(doc, cell_thresholds=list(reversed(doc["cell_thresholds"])))
    with pytest.raises(ValueError):
        design.deserialize_codebook(json.dumps(other))

    with pytest.raises(ValueError):
        design.deserialize_codebook("[1, 2, 3]")


def test_save_load_round_trip(tmp_path):
    cb = make(128, 4, 3.98)
    path = str(tmp_path / "codebook.json")
    design.save_codebook(cb, path)
    assert not os.path.exists(path + ".tmp")  # temp name was renamed away
    back = design.load_codebook(path)
    assert back.cell_thresholds == cb.cell_thresholds
    assert back.reproduction_levels == cb.reproduction_levels


def test_deserialized_centroid_still_beyond_support():
    cb = make(256, 8, gaussmath.tail_mass(0.0) + 4.0)  # x_max = 4.5
    back = design.deserialize_codebook(design.serialize_codebook(cb))
    assert back.overload_level > back.config.x_max
