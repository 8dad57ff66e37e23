# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels.

Same contract as ``_reference``: configuration index c assigns edge i the
symbol (c // prod(cards[i+1:])) % cards[i] (first edge varies slowest).
The hot loops run without the GIL so census drivers can thread them.
"""

from libc.math cimport INFINITY, fabs, log, exp
from libc.stdlib cimport free, malloc


cdef inline void _decode(long long c, long long[::1] cards,
                         long long* digits, Py_ssize_t n_edges) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n_edges - 1, -1, -1):
        digits[i] = c % cards[i]
        c //= cards[i]


cdef inline bint _advance(long long* digits, long long[::1] cards,
                          Py_ssize_t n_edges) noexcept nogil:
    # odometer increment, last edge fastest
    cdef Py_ssize_t i = n_edges - 1
    while i >= 0:
        digits[i] += 1
        if digits[i] < cards[i]:
            return True
        digits[i] = 0
        i -= 1
    return False


def sum_range(double[::1] values, long long[::1] table_offsets,
              long long[::1] slot_edges, long long[::1] slot_strides,
              long long[::1] factor_slot_offsets, long long[::1] cards,
              long long start, long long stop):
    """Sum of the global function over configurations [start, stop)."""
    cdef Py_ssize_t n_edges = cards.shape[0]
    cdef Py_ssize_t n_factors = table_offsets.shape[0]
    cdef long long c
    cdef Py_ssize_t fi, s
    cdef long long idx
    cdef double prod
    cdef double acc = 0.0
    cdef long long* digits
    if stop <= start:
        return 0.0
    digits = <long long*> malloc(n_edges * sizeof(long long))
    if digits == NULL:
        raise MemoryError()
    with nogil:
        _decode(start, cards, digits, n_edges)
        c = start
        while c < stop:
            prod = 1.0
            for fi in range(n_factors):
                idx = table_offsets[fi]
                for s in range(factor_slot_offsets[fi], factor_slot_offsets[fi + 1]):
                    idx += digits[slot_edges[s]] * slot_strides[s]
                prod *= values[idx]
            acc += prod
            c += 1
            if c < stop:
                _advance(digits, cards, n_edges)
    free(digits)
    return acc


def values_range(double[::1] values, long long[::1] table_offsets,
                 long long[::1] slot_edges, long long[::1] slot_strides,
                 long long[::1] factor_slot_offsets, long long[::1] cards,
                 long long start, long long stop, double[::1] out):
    """Write per-configuration global function values into ``out``."""
    cdef Py_ssize_t n_edges = cards.shape[0]
    cdef Py_ssize_t n_factors = table_offsets.shape[0]
    cdef long long c
    cdef Py_ssize_t fi, s
    cdef long long idx
    cdef double prod
    cdef long long* digits
    if stop <= start:
        return
    digits = <long long*> malloc(n_edges * sizeof(long long))
    if digits == NULL:
        raise MemoryError()
    with nogil:
        _decode(start, cards, digits, n_edges)
        c = start
        while c < stop:
            prod = 1.0
            for fi in range(n_factors):
                idx = table_offsets[fi]
                for s in range(factor_slot_offsets[fi], factor_slot_offsets[fi + 1]):
                    idx += digits[slot_edges[s]] * slot_strides[s]
                prod *= values[idx]
            out[c - start] = prod
            c += 1
            if c < stop:
                _advance(digits, cards, n_edges)
    free(digits)


def signed_log_sum_range(double[::1] values, long long[::1] table_offsets,
                         long long[::1] slot_edges, long long[::1] slot_strides,
                         long long[::1] factor_slot_offsets, long long[::1] cards,
                         long long start, long long stop):
    """Signed log-domain sum over [start, stop); returns (sign, log|sum|)."""
    cdef Py_ssize_t n_edges = cards.shape[0]
    cdef Py_ssize_t n_factors = table_offsets.shape[0]
    cdef long long c
    cdef Py_ssize_t fi, s
    cdef long long idx
    cdef double v, logmag
    cdef int sgn, zero
    # running signed log-sum-exp: total = ssum * exp(m)
    cdef double m = -INFINITY
    cdef double ssum = 0.0
    cdef long long* digits
    if stop <= start:
        return (0, -INFINITY)
    digits = <long long*> malloc(n_edges * sizeof(long long))
    if digits == NULL:
        raise MemoryError()
    with nogil:
        _decode(start, cards, digits, n_edges)
        c = start
        while c < stop:
            logmag = 0.0
            sgn = 1
            zero = 0
            for fi in range(n_factors):
                idx = table_offsets[fi]
                for s in range(factor_slot_offsets[fi], factor_slot_offsets[fi + 1]):
                    idx += digits[slot_edges[s]] * slot_strides[s]
                v = values[idx]
                if v == 0.0:
                    zero = 1
                    break
                if v < 0.0:
                    sgn = -sgn
                logmag += log(fabs(v))
            if not zero:
                if logmag <= m:
                    ssum += sgn * exp(logmag - m)
                else:
                    ssum = ssum * exp(m - logmag) + sgn
                    m = logmag
            c += 1
            if c < stop:
                _advance(digits, cards, n_edges)
    free(digits)
    if ssum == 0.0:
        return (0, -INFINITY)
    return (1 if ssum > 0 else -1, m + log(fabs(ssum)))
