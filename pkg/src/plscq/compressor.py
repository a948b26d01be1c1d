"""Compressor models for the companding quantizer.

Two compressors over the support region [-x_max, x_max] are provided:

* the nonlinear optimal compressor for the Gaussian source,
  c(x) = x_max * int_0^x p**(1/3) / int_0^x_max p**(1/3), extended as an
  odd function to negative inputs;

* its piecewise linear approximation over L equal-width segments per
  side, with the slope of segment i fixed to the optimal compressor's
  derivative at the segment midpoint s_i = (2i-1)*x_max/(2L).  Writing
  w_i = p**(1/3)(s_i), the knot value at the i-th segment break is

      c(x_i) = x_max * (w_1 + ... + w_i) / (w_1 + ... + w_L),

  which is the midpoint-rule approximation of the optimal curve.  The
  segments share knots, so the piecewise map is continuous, strictly
  increasing, odd, and fixes 0 and +-x_max by construction.

The piecewise inverse (the expander) is exact: locate the knot interval
by binary search and solve the single linear piece.
"""

import bisect
import math
from dataclasses import dataclass

from . import gaussmath

__all__ = [
    "OptimalCompressor",
    "PiecewiseLinearCompressor",
    "build_optimal",
    "evaluate_optimal",
    "optimal_derivative",
    "build_piecewise",
    "evaluate_piecewise",
    "invert_piecewise",
]


@dataclass(frozen=True)
class OptimalCompressor:
    x_max: float
    normalization: float  # int_0^x_max p**(1/3)


@dataclass(frozen=True)
class PiecewiseLinearCompressor:
    L: int
    x_max: float
    midpoints: tuple    # s_i, segment midpoints
    weights: tuple      # p**(1/3)(s_i)
    segment_breaks: tuple
    knot_values: tuple  # compressor value at each segment break


def _check_support(x_max: float) -> None:
    if not (math.isfinite(x_max) and x_max > 0.0):
        raise ValueError(f"support threshold must be finite and positive, got {x_max}")


def build_optimal(x_max: float) -> OptimalCompressor:
    """Construct the nonlinear optimal compressor for the given support."""
    _check_support(x_max)
    return OptimalCompressor(x_max, gaussmath.integral_pdf_cuberoot(0.0, x_max))


def evaluate_optimal(model: OptimalCompressor, x: float) -> float:
    """Evaluate the optimal compressor; odd in x, maps +-x_max to itself."""
    if abs(x) > model.x_max:
        raise ValueError(f"|x|={abs(x)} outside support [{-model.x_max}, {model.x_max}]")
    mag = model.x_max * gaussmath.integral_pdf_cuberoot(0.0, abs(x)) / model.normalization
    return -mag if x < 0.0 else mag


def optimal_derivative(model: OptimalCompressor, s: float) -> float:
    """Slope of the optimal compressor at s: x_max * p**(1/3)(s) / normalization.

    This is the plain derivative of the normalized integral map, even in s
    and strictly positive; the piecewise construction samples it at the
    segment midpoints.
    """
    if abs(s) > model.x_max:
        raise ValueError(f"|s|={abs(s)} outside support [{-model.x_max}, {model.x_max}]")
    return model.x_max * gaussmath.pdf_cuberoot(s) / model.normalization


def build_piecewise(L: int, x_max: float) -> PiecewiseLinearCompressor:
    """Construct the piecewise linear compressor with L segments per side."""
    if L < 1:
        raise ValueError(f"segment count must be >= 1, got {L}")
    _check_support(x_max)
    midpoints = tuple((2 * i - 1) * x_max / (2 * L) for i in range(1, L + 1))
    weights = tuple(gaussmath.pdf_cuberoot(s) for s in midpoints)
    total = 0.0
    for w in weights:
        total += w
    knots = [0.0]
    acc = 0.0
    for w in weights:
        acc += w
        knots.append(x_max * acc / total)
    knots[-1] = x_max  # pin the endpoint; acc/total can round off the last ulp
    breaks = [i * x_max / L for i in range(L + 1)]
    breaks[-1] = x_max
    return PiecewiseLinearCompressor(
        L=L,
        x_max=x_max,
        midpoints=midpoints,
        weights=weights,
        segment_breaks=tuple(breaks),
        knot_values=tuple(knots),
    )


def _segment_of(model: PiecewiseLinearCompressor, a: float) -> int:
    """1-based index of the segment containing a >= 0; O(1) on the equal grid."""
    i = math.ceil(a * model.L / model.x_max)
    return min(max(i, 1), model.L)


def evaluate_piecewise(model: PiecewiseLinearCompressor, x: float) -> float:
    """Evaluate the piecewise linear compressor; odd in x.

    Inputs outside [-x_max, x_max] are rejected: clamping overloaded samples
    is the codec's decision, not the compressor's.
    """
    a = abs(x)
    if a > model.x_max:
        raise ValueError(f"|x|={a} outside support [{-model.x_max}, {model.x_max}]")
    i = _segment_of(model, a)
    lo = model.segment_breaks[i - 1]
    seg_width = model.segment_breaks[i] - lo
    slope = (model.knot_values[i] - model.knot_values[i - 1]) / seg_width
    mag = model.knot_values[i - 1] + (a - lo) * slope
    return -mag if x < 0.0 else mag


def invert_piecewise(model: PiecewiseLinearCompressor, y: float) -> float:
    """Exact expander: map a compressed value back through the linear pieces."""
    m = abs(y)
    if m > model.x_max:
        raise ValueError(f"|y|={m} outside range [{-model.x_max}, {model.x_max}]")
    i = bisect.bisect_left(model.knot_values, m, 1, model.L)
    rise = model.knot_values[i] - model.knot_values[i - 1]
    run = model.segment_breaks[i] - model.segment_breaks[i - 1]
    mag = model.segment_breaks[i - 1] + (m - model.knot_values[i - 1]) * run / rise
    return -mag if y < 0.0 else mag
