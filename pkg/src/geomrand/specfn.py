"""Log-gamma, digamma and trigamma for positive real arguments.

All three shift the argument upward with the functional recurrence until it
reaches ``_SHIFT_TO`` and then sum the Stirling/de Moivre asymptotic series.
Seven correction terms at x >= 10 leave a truncation error below 1e-16.
"""

from __future__ import annotations

import math

__all__ = [
    "log_gamma",
    "digamma",
    "trigamma",
    "trigamma_excess",
    "log_minus_digamma",
    "DomainError",
]

_SHIFT_TO = 10.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2k / (2k (2k-1)), k = 1..7
_LGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)
# B_2k / (2k), k = 1..7
_DIGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
# B_2k, k = 1..7
_TRIGAMMA_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)


class DomainError(ValueError):
    """Argument outside the positive real half-line."""


def _check(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} requires a finite positive argument, got {x!r}")
    return x


def _poly(coef: tuple[float, ...], t: float) -> float:
    acc = 0.0
    for c in reversed(coef):
        acc = acc * t + c
    return acc


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = _check(x, "log_gamma")
    prod = 1.0
    while x < _SHIFT_TO:
        prod *= x
        x += 1.0
    r = 1.0 / x
    series = r * _poly(_LGAMMA_COEF, r * r)
    value = (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + series
    if prod != 1.0:
        value -= math.log(prod)
    return value


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function, psi(x) = Gamma'(x)/Gamma(x)."""
    x = _check(x, "digamma")
    shift = 0.0
    while x < _SHIFT_TO:
        shift += 1.0 / x
        x += 1.0
    r2 = 1.0 / (x * x)
    value = math.log(x) - 0.5 / x - r2 * _poly(_DIGAMMA_COEF, r2)
    return value - shift


def trigamma(x: float) -> float:
    """Second derivative of log-gamma, psi'(x)."""
    x = _check(x, "trigamma")
    shift = 0.0
    while x < _SHIFT_TO:
        shift += 1.0 / (x * x)
        x += 1.0
    r = 1.0 / x
    r2 = r * r
    value = r + 0.5 * r2 + r * r2 * _poly(_TRIGAMMA_COEF, r2)
    return value + shift


def trigamma_excess(x: float) -> float:
    """``trigamma(x) - 1/x``, the shape entry of the gamma Fisher metric.

    For large x the two terms nearly cancel, so the difference is summed
    directly from the asymptotic series there.
    """
    x = _check(x, "trigamma_excess")
    if x < _SHIFT_TO:
        return trigamma(x) - 1.0 / x
    r = 1.0 / x
    r2 = r * r
    return 0.5 * r2 + r * r2 * _poly(_TRIGAMMA_COEF, r2)


def log_minus_digamma(x: float) -> float:
    """``log(x) - digamma(x)``; strictly decreasing from +inf to 0 on x > 0."""
    x = _check(x, "log_minus_digamma")
    if x < _SHIFT_TO:
        return math.log(x) - digamma(x)
    r2 = 1.0 / (x * x)
    return 0.5 / x + r2 * _poly(_DIGAMMA_COEF, r2)
