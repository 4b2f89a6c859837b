"""Pure-Python/numpy implementations of the hot kernels.

Selected automatically when the compiled extension is unavailable (or when
``ULAMSIG_PURE_PYTHON=1``).  Same signatures and contracts as
``ulamsig._kernels``; slower, intended for small workloads, verification,
and platforms without a C toolchain.
"""

from __future__ import annotations

import math

import numpy as np

from .dd import INV_TWO_PI, TWO_PI_HI, TWO_PI_LO, TWO_PI_LO2, _SPLITTER
from .errors import MemoryBudgetError

_TERM_CHUNK = 65536
_POINT_BLOCK = 256


def ulam_sieve(a1, a2, count_cap, limit_cap, memory_cap):
    """Generate Ulam-type terms with big-integer bitsets.

    Three Python integers act as bit arrays over candidate values: sequence
    members, values with exactly one representation as a sum of two distinct
    members, and values with two or more.  Appending term t shifts the member
    mask by t and merges; bits that collide move from exactly-one to
    two-or-more.  Caps of 0 mean unset; at least one must be set (validated
    by the caller).
    """
    member = 1 << a1
    once = 0
    twice = 0
    terms = [a1]
    hmask = (1 << (limit_cap + 1)) - 1 if limit_cap else None
    generated_up_to = a1

    def append(t):
        nonlocal member, once, twice
        shifted = member << t
        if hmask is not None:
            shifted &= hmask
        both = once & shifted
        twice |= both
        once = (once | shifted) & ~twice
        member |= 1 << t

    if limit_cap and a2 > limit_cap:
        raise ValueError(
            f"limit {limit_cap} is below the second initial value {a2}; "
            "cannot produce two terms"
        )
    append(a2)
    terms.append(a2)
    frontier = a2 + 1
    budget_check = 0
    while True:
        if count_cap and len(terms) >= count_cap:
            generated_up_to = terms[-1]
            break
        tail = once >> frontier
        if tail == 0:
            # only possible in limit mode: no representable value remains
            generated_up_to = limit_cap
            break
        candidate = frontier + ((tail & -tail).bit_length() - 1)
        if limit_cap and candidate > limit_cap:
            generated_up_to = limit_cap
            break
        budget_check += 1
        if budget_check & 1023 == 0:
            approx_bits = limit_cap + 1 if limit_cap else 2 * candidate
            if 3 * (approx_bits // 8) > memory_cap:
                raise MemoryBudgetError(
                    f"sieve bitsets would exceed the memory budget of "
                    f"{memory_cap} bytes"
                )
        append(candidate)
        terms.append(candidate)
        frontier = candidate + 1
    return np.array(terms, dtype=np.uint64), int(generated_up_to)


def _two_prod_vec(a, b):
    # Dekker split, vectorized; b is a scalar double
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def _reduce_vec(t, alpha_hi, alpha_lo):
    """Vectorized phase reduction; same operation sequence as dd.reduce_mod_2pi."""
    ph, pe = _two_prod_vec(t, alpha_hi)
    pe = pe + t * alpha_lo
    kd = np.floor((ph + pe) * INV_TWO_PI)
    qh, qe = _two_prod_vec(kd, TWO_PI_HI)
    r = ph - qh
    r = r + (pe - qe)
    r = r - kd * TWO_PI_LO
    r = r - kd * TWO_PI_LO2
    neg = r < 0.0
    if neg.any():
        r[neg] = (r[neg] + TWO_PI_HI) + TWO_PI_LO
    high = r >= TWO_PI_HI
    if high.any():
        r[high] = np.maximum((r[high] - TWO_PI_HI) - TWO_PI_LO, 0.0)
    return r


def reduce_phases(terms, alpha_hi, alpha_lo, threads=0):
    """Phases t*alpha mod 2*pi for an array of terms, in [0, 2*pi)."""
    t = np.ascontiguousarray(terms, dtype=np.float64)
    out = np.empty(t.shape[0], dtype=np.float64)
    for start in range(0, t.shape[0], _TERM_CHUNK):
        stop = min(start + _TERM_CHUNK, t.shape[0])
        out[start:stop] = _reduce_vec(t[start:stop], alpha_hi, alpha_lo)
    return out


def cosine_mean(terms, alpha_hi, alpha_lo):
    """(1/N) sum of cos(t * alpha mod 2*pi), exactly-rounded accumulation."""
    t = np.ascontiguousarray(terms, dtype=np.float64)
    n = t.shape[0]
    partials = []
    for start in range(0, n, _TERM_CHUNK):
        stop = min(start + _TERM_CHUNK, n)
        c = np.cos(_reduce_vec(t[start:stop], alpha_hi, alpha_lo))
        partials.extend(c.tolist())
    total = math.fsum(partials)
    return min(1.0, max(-1.0, total / n))


def grid_cosine_means(terms, x0, dx, npts, threads=0):
    """Normalized cosine sums over the uniform grid x0 + k*dx, k < npts."""
    t = np.ascontiguousarray(terms, dtype=np.float64)
    n = t.shape[0]
    out = np.empty(npts, dtype=np.float64)
    for b0 in range(0, npts, _POINT_BLOCK):
        b1 = min(b0 + _POINT_BLOCK, npts)
        xs = x0 + np.arange(b0, b1, dtype=np.float64) * dx
        acc = np.zeros(b1 - b0, dtype=np.longdouble)
        for start in range(0, n, _TERM_CHUNK):
            stop = min(start + _TERM_CHUNK, n)
            chunk = t[start:stop]
            block = np.empty((stop - start, b1 - b0), dtype=np.float64)
            for j, x in enumerate(xs):
                block[:, j] = _reduce_vec(chunk, float(x), 0.0)
            acc += np.cos(block).sum(axis=0, dtype=np.longdouble)
        out[b0:b1] = np.asarray(acc, dtype=np.float64) / n
    np.clip(out, -1.0, 1.0, out=out)
    return out
