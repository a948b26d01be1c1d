"""Piecewise linear scalar companding quantizer laboratory.

Designs symmetric N-level quantizers for a unit-variance Gaussian
source by compressing the support range [-x_max, x_max] with a
piecewise linear approximation of the optimal compressor, placing
uniform cells inside each of the 2L equal-width segments, and closing
each side with a centroid overload level.  The package evaluates
designs analytically (high-rate and exact granular distortion plus
overload distortion) and empirically (deterministic Monte Carlo), and
optimizes the support threshold per segment count.

Modules:

* gaussmath: closed-form Gaussian density, tails, and partial moments.
* compressor: optimal and piecewise linear compressor curves.
* design: cell allocation, codebook construction, JSON serialization.
* analysis: distortion reports, SQNR, threshold optimization, sweeps.
* codec: encode/decode, deterministic sample streams, Monte Carlo.
* cli: the plscq command-line front end.
"""

__version__ = "0.1.0"

from .analysis import (
    DistortionReport,
    Method,
    SweepResult,
    Variant,
    exact_distortion,
    high_rate_report,
    optimal_compander_sqnr,
    optimize_threshold,
    run_sweep,
    support_threshold_formula,
)
from .codec import (
    StreamStats,
    decode,
    decode_many,
    encode,
    encode_many,
    generate_gaussian,
    monte_carlo_sqnr,
    quantize_file,
)
from .compressor import build_optimal, build_piecewise, evaluate_optimal, evaluate_piecewise
from .design import (
    Codebook,
    CodebookFormatError,
    QuantizerConfig,
    build_codebook,
    load_codebook,
    save_codebook,
)

__all__ = [
    "__version__",
    "Codebook",
    "CodebookFormatError",
    "DistortionReport",
    "Method",
    "QuantizerConfig",
    "StreamStats",
    "SweepResult",
    "Variant",
    "build_codebook",
    "build_optimal",
    "build_piecewise",
    "decode",
    "decode_many",
    "encode",
    "encode_many",
    "evaluate_optimal",
    "evaluate_piecewise",
    "exact_distortion",
    "generate_gaussian",
    "high_rate_report",
    "load_codebook",
    "monte_carlo_sqnr",
    "optimal_compander_sqnr",
    "optimize_threshold",
    "quantize_file",
    "run_sweep",
    "save_codebook",
    "support_threshold_formula",
]
