# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: the word-packed Ulam sieve, double-double phase
reduction, and compensated cosine-sum evaluation.

Grid sums are parallelized over fixed 256-point blocks and every output
element is accumulated in a fixed order, so results are bit-identical for
any thread count.  Compiled with -ffp-contract=off; the error-free
transformations below must not be fused.
"""

import numpy as np

cimport cython
cimport numpy as cnp
cimport openmp
from cython.parallel cimport prange
from libc.math cimport cos, fabs, floor, sin
from libc.stdint cimport int64_t, uint64_t

from .errors import MemoryBudgetError

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long x) nogil

cdef double TWO_PI_HI = 6.283185307179586
cdef double TWO_PI_LO = 2.4492935982947064e-16
cdef double TWO_PI_LO2 = -5.989539619436679e-33
cdef double INV_TWO_PI = 0.15915494309189535
cdef double SPLITTER = 134217729.0  # 2^27 + 1, Dekker split constant

DEF POINT_BLOCK = 256


# ---------------------------------------------------------------------------
# double-double phase reduction
# ---------------------------------------------------------------------------

cdef inline double _reduce_dd(double t, double ahi, double alo) nogil:
    # t * (ahi + alo) mod 2*pi for |t| <= 2^48; abs error a few 1e-16.
    # Same operation sequence as dd.reduce_mod_2pi / _purepy._reduce_vec.
    cdef double p, e, ca, xhi, xlo, cb, yhi, ylo, kd, qh, qe, r
    p = t * ahi
    ca = SPLITTER * t
    xhi = ca - (ca - t)
    xlo = t - xhi
    cb = SPLITTER * ahi
    yhi = cb - (cb - ahi)
    ylo = ahi - yhi
    e = ((xhi * yhi - p) + xhi * ylo + xlo * yhi) + xlo * ylo
    e = e + t * alo
    kd = floor((p + e) * INV_TWO_PI)
    qh = kd * TWO_PI_HI
    ca = SPLITTER * kd
    xhi = ca - (ca - kd)
    xlo = kd - xhi
    cb = SPLITTER * TWO_PI_HI
    yhi = cb - (cb - TWO_PI_HI)
    ylo = TWO_PI_HI - yhi
    qe = ((xhi * yhi - qh) + xhi * ylo + xlo * yhi) + xlo * ylo
    r = p - qh  # exact: p and qh agree to within ~2*pi
    r = r + (e - qe)
    r = r - kd * TWO_PI_LO
    r = r - kd * TWO_PI_LO2
    if r < 0.0:
        r = (r + TWO_PI_HI) + TWO_PI_LO
    if r >= TWO_PI_HI:
        r = (r - TWO_PI_HI) - TWO_PI_LO
        if r < 0.0:
            r = 0.0
    return r


def reduce_phases(terms, double alpha_hi, double alpha_lo, int threads=0):
    """Phases t*alpha mod 2*pi for an array of terms, in [0, 2*pi)."""
    cdef double[::1] t = np.ascontiguousarray(terms, dtype=np.float64)
    cdef Py_ssize_t i, n = t.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int nthreads = threads if threads > 0 else openmp.omp_get_max_threads()
    for i in prange(n, nogil=True, schedule="static", num_threads=nthreads):
        out[i] = _reduce_dd(t[i], alpha_hi, alpha_lo)
    return out_arr


# ---------------------------------------------------------------------------
# compensated cosine sums
# ---------------------------------------------------------------------------

def cosine_mean(terms, double alpha_hi, double alpha_lo):
    """(1/N) sum of cos(t * alpha mod 2*pi), Neumaier-compensated, fixed order."""
    cdef double[::1] t = np.ascontiguousarray(terms, dtype=np.float64)
    cdef Py_ssize_t i, n = t.shape[0]
    cdef double s = 0.0, comp = 0.0, v, tmp, total
    with nogil:
        for i in range(n):
            v = cos(_reduce_dd(t[i], alpha_hi, alpha_lo))
            tmp = s + v
            if fabs(s) >= fabs(v):
                comp = comp + ((s - tmp) + v)
            else:
                comp = comp + ((v - tmp) + s)
            s = tmp
    total = (s + comp) / <double> n
    if total > 1.0:
        total = 1.0
    if total < -1.0:
        total = -1.0
    return total


cdef void _grid_block(double[::1] t, double x0, double dx, Py_ssize_t npts,
                      Py_ssize_t block, double[::1] out) nogil:
    # One 256-point block: for each term, reduce the phase at the block start
    # and the per-point step once, then advance by complex rotation.  The
    # rotation drift over <= 256 steps is ~1e-13 and the per-point Neumaier
    # accumulators run in fixed term order, independent of threading.
    cdef Py_ssize_t p0 = block * POINT_BLOCK
    cdef Py_ssize_t p1 = p0 + POINT_BLOCK
    if p1 > npts:
        p1 = npts
    cdef Py_ssize_t m = p1 - p0, i, j
    cdef Py_ssize_t n = t.shape[0]
    cdef double sums[POINT_BLOCK]
    cdef double comps[POINT_BLOCK]
    cdef double xstart = x0 + (<double> p0) * dx
    cdef double th0, dth, c, s, cd, sd, v, tmp, cnext
    for j in range(m):
        sums[j] = 0.0
        comps[j] = 0.0
    for i in range(n):
        th0 = _reduce_dd(t[i], xstart, 0.0)
        dth = _reduce_dd(t[i], dx, 0.0)
        c = cos(th0)
        s = sin(th0)
        cd = cos(dth)
        sd = sin(dth)
        for j in range(m):
            v = c
            tmp = sums[j] + v
            if fabs(sums[j]) >= fabs(v):
                comps[j] = comps[j] + ((sums[j] - tmp) + v)
            else:
                comps[j] = comps[j] + ((v - tmp) + sums[j])
            sums[j] = tmp
            cnext = c * cd - s * sd
            s = s * cd + c * sd
            c = cnext
    for j in range(m):
        v = (sums[j] + comps[j]) / <double> n
        if v > 1.0:
            v = 1.0
        if v < -1.0:
            v = -1.0
        out[p0 + j] = v


def grid_cosine_means(terms, double x0, double dx, Py_ssize_t npts, int threads=0):
    """Normalized cosine sums over the uniform grid x0 + k*dx, k < npts."""
    cdef double[::1] t = np.ascontiguousarray(terms, dtype=np.float64)
    out_arr = np.empty(npts, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t b, nblocks = (npts + POINT_BLOCK - 1) // POINT_BLOCK
    cdef int nthreads = threads if threads > 0 else openmp.omp_get_max_threads()
    for b in prange(nblocks, nogil=True, schedule="static", num_threads=nthreads):
        _grid_block(t, x0, dx, npts, b, out)
    return out_arr


# ---------------------------------------------------------------------------
# word-packed Ulam sieve
# ---------------------------------------------------------------------------

cdef inline void _merge(uint64_t* member, uint64_t* once, uint64_t* twice,
                        uint64_t t, uint64_t lo_bit, uint64_t hi_bit) nogil:
    # OR (member << t) into the representation-count masks over out-bits
    # [lo_bit, hi_bit].  Bits seen once move to twice on collision.
    cdef uint64_t w0 = lo_bit >> 6
    cdef uint64_t w1 = hi_bit >> 6
    cdef uint64_t w, v, nw
    cdef uint64_t s = t >> 6
    cdef int r = <int> (t & 63)
    cdef int64_t j
    for w in range(w0, w1 + 1):
        j = <int64_t> w - <int64_t> s
        v = 0
        if r == 0:
            if j >= 0:
                v = member[j]
        else:
            if j >= 0:
                v = member[j] << r
            if j >= 1:
                v = v | (member[j - 1] >> (64 - r))
        nw = twice[w] | (once[w] & v)
        once[w] = (once[w] | v) & ~nw
        twice[w] = nw


cdef inline int64_t _next_once_bit(uint64_t* once, uint64_t start_bit,
                                   uint64_t nwords) nogil:
    cdef uint64_t w = start_bit >> 6
    cdef uint64_t x
    if w >= nwords:
        return -1
    x = once[w] & ((<uint64_t> 0xFFFFFFFFFFFFFFFF) << (start_bit & 63))
    while x == 0:
        w += 1
        if w >= nwords:
            return -1
        x = once[w]
    return <int64_t> (w << 6) + __builtin_ctzll(x)


def ulam_sieve(uint64_t a1, uint64_t a2, uint64_t count_cap, uint64_t limit_cap,
               uint64_t memory_cap):
    """Generate Ulam-type terms with three word-packed bitsets.

    Caps of 0 mean unset; the caller guarantees at least one is set and
    a1 < a2.  Returns (terms as uint64 array, generated_up_to).
    """
    cdef bint limited = limit_cap != 0
    cdef uint64_t H
    if limited:
        if a2 > limit_cap:
            raise ValueError(
                f"limit {limit_cap} is below the second initial value {a2}; "
                "cannot produce two terms"
            )
        H = ((limit_cap + 1 + 63) // 64) * 64
    else:
        H = 16384
        while H < 4 * a2 + 256:
            H *= 2
    if 3 * (H // 8) > memory_cap:
        raise MemoryBudgetError(
            f"sieve bitsets need {3 * (H // 8)} bytes, exceeding the memory "
            f"budget of {memory_cap} bytes"
        )

    member_arr = np.zeros(H // 64, dtype=np.uint64)
    once_arr = np.zeros(H // 64, dtype=np.uint64)
    twice_arr = np.zeros(H // 64, dtype=np.uint64)
    cdef uint64_t[::1] member = member_arr
    cdef uint64_t[::1] once = once_arr
    cdef uint64_t[::1] twice = twice_arr

    terms_arr = np.empty(count_cap if count_cap else 4096, dtype=np.uint64)
    cdef uint64_t[::1] terms = terms_arr

    cdef Py_ssize_t nterms = 0
    cdef uint64_t prev, frontier, gup, newH
    cdef int64_t c

    member[a1 >> 6] |= (<uint64_t> 1) << (a1 & 63)
    terms[0] = a1
    nterms = 1
    # append a2: the only prior member is a1
    _merge(&member[0], &once[0], &twice[0], a2, a2 + a1,
           min(a2 + a1, H - 1))
    member[a2 >> 6] |= (<uint64_t> 1) << (a2 & 63)
    terms[1] = a2
    nterms = 2
    prev = a2
    frontier = a2 + 1
    gup = a2

    while True:
        if count_cap and <uint64_t> nterms >= count_cap:
            gup = terms[nterms - 1]
            break
        c = _next_once_bit(&once[0], frontier, H // 64)
        if c < 0:
            if limited:
                gup = limit_cap
                break
            raise RuntimeError("sieve ran out of candidates below its horizon")
        if limited and <uint64_t> c > limit_cap:
            gup = limit_cap
            break
        if not limited and 2 * <uint64_t> c + 64 > H:
            newH = H
            while newH < 2 * <uint64_t> c + 64:
                newH *= 2
            if 3 * (newH // 8) > memory_cap:
                raise MemoryBudgetError(
                    f"sieve bitsets need {3 * (newH // 8)} bytes, exceeding "
                    f"the memory budget of {memory_cap} bytes"
                )
            grown = np.zeros(newH // 64, dtype=np.uint64)
            grown[: H // 64] = member_arr
            member_arr = grown
            member = member_arr
            grown = np.zeros(newH // 64, dtype=np.uint64)
            grown[: H // 64] = once_arr
            once_arr = grown
            once = once_arr
            grown = np.zeros(newH // 64, dtype=np.uint64)
            grown[: H // 64] = twice_arr
            twice_arr = grown
            twice = twice_arr
            H = newH
            continue  # rescan the same candidate with room to merge
        if nterms == terms_arr.shape[0]:
            bigger = np.empty(2 * terms_arr.shape[0], dtype=np.uint64)
            bigger[:nterms] = terms_arr
            terms_arr = bigger
            terms = terms_arr
        _merge(&member[0], &once[0], &twice[0], <uint64_t> c,
               <uint64_t> c + a1, min(<uint64_t> c + prev, H - 1))
        member[c >> 6] |= (<uint64_t> 1) << (c & 63)
        terms[nterms] = <uint64_t> c
        nterms += 1
        prev = <uint64_t> c
        frontier = <uint64_t> c + 1

    return terms_arr[:nterms].copy(), int(gup)
