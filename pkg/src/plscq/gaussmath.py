"""Closed-form primitives for the zero-mean, unit-variance Gaussian source.

Every integral used by the quantizer design reduces to erf/erfc for this
source, including the cube-root-density family: with
p(x) = (2*pi)**-0.5 * exp(-x**2/2),

    p(x)**(1/3)        = (2*pi)**(-1/6) * exp(-x**2/6)
    int p**(1/3) dx     = (2*pi)**(-1/6) * sqrt(6*pi)/2 * erf(x/sqrt(6)) + C
    int_a^inf x p dx    = p(a)
    int_a^inf x^2 p dx  = a*p(a) + tail_mass(a)

These closed forms are exact, so results are reproducible bit for bit;
numerical quadrature appears only as an oracle in the test suite.
"""

import math
from dataclasses import dataclass

__all__ = [
    "SourceModel",
    "pdf",
    "pdf_cuberoot",
    "integral_pdf",
    "integral_pdf_cuberoot",
    "tail_mass",
    "tail_first_moment",
    "tail_second_moment",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_CUBEROOT_AT_ZERO = (2.0 * math.pi) ** (-1.0 / 6.0)
_CUBEROOT_INTEGRAL_SCALE = _CUBEROOT_AT_ZERO * math.sqrt(6.0 * math.pi) / 2.0
_SQRT2 = math.sqrt(2.0)
_SQRT6 = math.sqrt(6.0)


@dataclass(frozen=True)
class SourceModel:
    """The source description. Only the unit-variance, zero-mean case exists;
    any other parameters are rejected rather than silently rescaled."""

    variance: float = 1.0
    mean: float = 0.0

    def __post_init__(self):
        if self.variance != 1.0:
            raise ValueError(f"only unit variance is supported, got {self.variance}")
        if self.mean != 0.0:
            raise ValueError(f"only zero mean is supported, got {self.mean}")


def pdf(x: float) -> float:
    """Gaussian density (2*pi)**-0.5 * exp(-x**2/2)."""
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def pdf_cuberoot(x: float) -> float:
    """pdf(x)**(1/3), evaluated directly as (2*pi)**(-1/6)*exp(-x**2/6)."""
    return _CUBEROOT_AT_ZERO * math.exp(-x * x / 6.0)


def integral_pdf(a: float, b: float) -> float:
    """Probability mass on [a, b]."""
    if a > b:
        raise ValueError(f"interval is reversed: a={a} > b={b}")
    return 0.5 * (math.erf(b / _SQRT2) - math.erf(a / _SQRT2))


def integral_pdf_cuberoot(a: float, b: float) -> float:
    """Integral of pdf**(1/3) over [a, b], in closed form via erf."""
    if a > b:
        raise ValueError(f"interval is reversed: a={a} > b={b}")
    return _CUBEROOT_INTEGRAL_SCALE * (math.erf(b / _SQRT6) - math.erf(a / _SQRT6))


def tail_mass(a: float) -> float:
    """Probability mass on [a, inf)."""
    return 0.5 * math.erfc(a / _SQRT2)


def tail_first_moment(a: float) -> float:
    """Integral of x*pdf(x) over [a, inf); equals pdf(a) for this source."""
    return pdf(a)


def tail_second_moment(a: float) -> float:
    """Integral of x^2*pdf(x) over [a, inf)."""
    return a * pdf(a) + tail_mass(a)
