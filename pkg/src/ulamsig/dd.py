"""Double-double arithmetic for carrying frequencies at ~32 significant digits.

A frequency is represented as an ordered pair ``(hi, lo)`` of machine doubles
with ``|lo| <= 0.5 ulp(hi)``; the represented value is the exact real sum
``hi + lo``.  Products use Dekker splitting, so no FMA support is assumed and
results are identical across the compiled and pure-Python code paths.
"""

from __future__ import annotations

import math
from fractions import Fraction

# 2*pi to three limbs: TWO_PI_HI + TWO_PI_LO + TWO_PI_LO2, each exactly
# representable, successive remainders of the real 2*pi.
TWO_PI_HI = 6.283185307179586
TWO_PI_LO = 2.4492935982947064e-16
TWO_PI_LO2 = -5.989539619436679e-33
INV_TWO_PI = 0.15915494309189535

_SPLITTER = 134217729.0  # 2**27 + 1

AlphaLike = "float | tuple[float, float] | str"


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Error-free sum: returns (s, e) with s + e == a + b exactly."""
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def two_prod(a: float, b: float) -> tuple[float, float]:
    """Error-free product via Dekker splitting: p + e == a * b exactly."""
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def from_decimal(text: str) -> tuple[float, float]:
    """Split a decimal string into an exact (hi, lo) pair.

    The string is parsed as an exact rational, so no precision is lost to
    shell-side or repr round-tripping.
    """
    value = Fraction(text)
    hi = float(value)
    lo = float(value - Fraction(hi))
    return hi, lo


def scale_int(alpha: tuple[float, float], k: int) -> tuple[float, float]:
    """Multiply a (hi, lo) pair by a small integer, keeping ~2^-106 accuracy."""
    hi, lo = alpha
    ph, pe = two_prod(hi, float(k))
    pe += lo * float(k)
    return two_sum(ph, pe)


def reduce_mod_2pi(t: float, alpha_hi: float, alpha_lo: float) -> float:
    """Reduce t * (alpha_hi + alpha_lo) into [0, 2*pi).

    Valid for 0 <= t <= 2**48 with t exactly representable; the absolute
    phase error is a few 1e-16 at the top of that range.  This is the scalar
    reference for the vectorized kernels, same operation sequence.
    """
    ph, pe = two_prod(t, alpha_hi)
    pe += t * alpha_lo
    k = math.floor((ph + pe) * INV_TWO_PI)
    kd = float(k)
    qh, qe = two_prod(kd, TWO_PI_HI)
    r = ph - qh  # exact: ph and qh agree to within ~2*pi
    r += pe - qe
    r -= kd * TWO_PI_LO
    r -= kd * TWO_PI_LO2
    if r < 0.0:
        r += TWO_PI_HI
        r += TWO_PI_LO
    if r >= TWO_PI_HI:
        r -= TWO_PI_HI
        r -= TWO_PI_LO
        if r < 0.0:
            r = 0.0
    return r


def _log_int(k: int) -> tuple[float, float]:
    import mpmath

    with mpmath.workprec(130):
        x = mpmath.log(k)
        hi = float(x)
        lo = float(x - hi)
    return hi, lo


def _sqrt_int(k: int) -> tuple[float, float]:
    import mpmath

    with mpmath.workprec(130):
        x = mpmath.sqrt(k)
        hi = float(x)
        lo = float(x - hi)
    return hi, lo


def _e_const() -> tuple[float, float]:
    import mpmath

    with mpmath.workprec(130):
        x = mpmath.e
        hi = float(x)
        lo = float(x - hi)
    return hi, lo


def parse_alpha(text: str) -> tuple[float, float]:
    """Parse a frequency string: a decimal, ``log:K``, ``sqrt:K``, or ``e``."""
    text = text.strip()
    if text == "e":
        return _e_const()
    if text.startswith("log:"):
        k = int(text[4:])
        if k < 2:
            raise ValueError(f"log:K needs an integer K >= 2, got {k}")
        return _log_int(k)
    if text.startswith("sqrt:"):
        k = int(text[5:])
        if k < 1:
            raise ValueError(f"sqrt:K needs an integer K >= 1, got {k}")
        return _sqrt_int(k)
    return from_decimal(text)


def as_alpha(alpha) -> tuple[float, float]:
    """Normalize a frequency given as float, (hi, lo) pair, or string."""
    if isinstance(alpha, str):
        return parse_alpha(alpha)
    if isinstance(alpha, (tuple, list)):
        if len(alpha) != 2:
            raise ValueError("frequency pair must have exactly two components")
        return two_sum(float(alpha[0]), float(alpha[1]))
    return float(alpha), 0.0
