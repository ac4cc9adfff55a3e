# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core. Mirrors numpy_backend exactly (same padding rule,
same accumulation semantics: per-output-pixel tap sums in tap order,
long-double accumulators for the widened reductions)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _reflect(Py_ssize_t i, Py_ssize_t n) nogil:
    # half-sample symmetric fold: b a | a b c d | d c
    while i < 0 or i >= n:
        if i < 0:
            i = -i - 1
        if i >= n:
            i = 2 * n - 1 - i
    return i


def blur2d(cnp.ndarray[cnp.float64_t, ndim=3] x, kernel):
    """Separable reflect-padded 2D blur of a (C, H, W) tensor."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k = np.ascontiguousarray(kernel, dtype=np.float64)
    if k.shape[0] % 2 == 0:
        raise ValueError("kernel must be 1D with odd length")
    cdef Py_ssize_t ks = k.shape[0]
    cdef Py_ssize_t r = ks // 2
    cdef Py_ssize_t c = x.shape[0], h = x.shape[1], w = x.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] tmp = np.empty((c, h, w), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out = np.empty((c, h, w), dtype=np.float64)
    cdef Py_ssize_t ci, i, j, t
    cdef double acc
    with nogil:
        for ci in range(c):
            for i in range(h):
                for j in range(w):
                    acc = 0.0
                    for t in range(ks):
                        acc += k[t] * x[ci, _reflect(i + t - r, h), j]
                    tmp[ci, i, j] = acc
            for i in range(h):
                for j in range(w):
                    acc = 0.0
                    for t in range(ks):
                        acc += k[t] * tmp[ci, i, _reflect(j + t - r, w)]
                    out[ci, i, j] = acc
    return out


def radial_power(power, bins, Py_ssize_t nbins):
    """Sum `power` into annuli indexed by `bins`; returns (sums, counts)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.ascontiguousarray(power, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] b = np.ascontiguousarray(bins, dtype=np.int64).ravel()
    if p.shape[0] != b.shape[0]:
        raise ValueError("power and bins must have the same number of elements")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sums = np.zeros(nbins, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(nbins, dtype=np.int64)
    cdef Py_ssize_t i, n = p.shape[0]
    with nogil:
        for i in range(n):
            sums[b[i]] += p[i]
            counts[b[i]] += 1
    return sums, counts


def dot_widened(a, b):
    """Dot product with a long-double accumulator."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bv = np.ascontiguousarray(b, dtype=np.float64).ravel()
    if av.shape[0] != bv.shape[0]:
        raise ValueError("length mismatch")
    cdef long double acc = 0.0
    cdef Py_ssize_t i, n = av.shape[0]
    with nogil:
        for i in range(n):
            acc += <long double> av[i] * <long double> bv[i]
    return float(acc)


def sumsq_widened(a):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef long double acc = 0.0
    cdef Py_ssize_t i, n = av.shape[0]
    with nogil:
        for i in range(n):
            acc += <long double> av[i] * <long double> av[i]
    return float(acc)
