# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled aggregation kernels for the social alignment graph.

Mirrors ``_kernels_py`` exactly; matrices are flat row-major ``array('d')``
of size n*n indexed ``src * n + dst``.
"""

from cpython.array cimport array, clone

cdef array _DOUBLES = array("d")
cdef array _LONGS = array("q")


def pair_sums(Py_ssize_t n, long long[:] src, long long[:] dst, double[:] weight,
              long long[:] day, long long max_day):
    cdef array pos = clone(_DOUBLES, n * n, zero=True)
    cdef array neg = clone(_DOUBLES, n * n, zero=True)
    cdef double[:] p = pos
    cdef double[:] q = neg
    cdef Py_ssize_t k, cell, m = src.shape[0]
    cdef double w
    for k in range(m):
        if max_day >= 0 and day[k] > max_day:
            continue
        w = weight[k]
        cell = src[k] * n + dst[k]
        if w > 0:
            p[cell] += w
        elif w < 0:
            q[cell] += w
    return pos, neg


def in_scores(Py_ssize_t n, double[:] pos, double[:] neg, long long exclude):
    cdef array pressure = clone(_DOUBLES, n, zero=True)
    cdef array support = clone(_DOUBLES, n, zero=True)
    cdef array accusers = clone(_LONGS, n, zero=True)
    cdef double[:] pr = pressure
    cdef double[:] su = support
    cdef long long[:] ac = accusers
    cdef Py_ssize_t s, t
    cdef double v
    for s in range(n):
        if s == exclude:
            continue
        for t in range(n):
            if s == t:
                continue
            v = neg[s * n + t]
            if v < 0:
                pr[t] -= v
                ac[t] += 1
            su[t] += pos[s * n + t]
    return pressure, accusers, support


def mutual_pairs(Py_ssize_t n, double[:] pos, double threshold):
    cdef list out = []
    cdef Py_ssize_t a, b
    cdef double ab, ba, score
    for a in range(n):
        for b in range(a + 1, n):
            ab = pos[a * n + b]
            ba = pos[b * n + a]
            score = ab if ab < ba else ba
            if score > 0 and score >= threshold:
                out.append((a, b, score))
    return out
