# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo trial kernels.

Mirrors `dibc._kernels_py` operation for operation (same draw order, same
inverse-CDF arithmetic) so both backends produce identical trial-by-trial
results from the same uniforms.
"""

import numpy as np


name = "cython"

cdef int PAIR_B[2][2]
cdef int PAIR_C[2][2]
PAIR_B[0][0] = 0; PAIR_C[0][0] = 1
PAIR_B[0][1] = 1; PAIR_C[0][1] = 0
PAIR_B[1][0] = 0; PAIR_C[1][0] = 0
PAIR_B[1][1] = 1; PAIR_C[1][1] = 1


cdef inline double _marginal(const double[:, ::1] table, int s_a, int r_a) nogil:
    cdef int base = 4 * r_a
    cdef int row = 4 * s_a
    return table[row, base] + table[row, base + 1] + table[row, base + 2] + table[row, base + 3]


cdef inline int _sample_pair_outputs(const double[:, ::1] table, int row, int r_first, double u) nogil:
    cdef int base = 4 * r_first
    cdef double norm = table[row, base] + table[row, base + 1] + table[row, base + 2] + table[row, base + 3]
    cdef double acc = 0.0
    cdef int j
    for j in range(4):
        acc += table[row, base + j] / norm
        if u < acc:
            return j
    return 3


cdef inline int _verify(const double[:, ::1] table, int claimed_s, int claimed_r,
                        int actual_input, int actual_outcome, int c,
                        double u_pair, double u_joint) nogil:
    cdef int choice, s_b, s_c, row, k, r_b, r_c
    if c != claimed_r and c != (claimed_r ^ claimed_s):
        return 1
    choice = 0 if u_pair < 0.5 else 1
    s_b = PAIR_B[claimed_s][choice]
    s_c = PAIR_C[claimed_s][choice]
    row = 4 * actual_input + 2 * s_b + s_c
    k = _sample_pair_outputs(table, row, actual_outcome, u_joint)
    r_b = k >> 1
    r_c = k & 1
    if (claimed_r ^ r_b ^ r_c) != ((claimed_s & s_b & s_c) ^ 1):
        return 2
    return 0


def bc_trials(const double[:, ::1] table, const unsigned char[::1] bits, const double[:, ::1] u):
    cdef Py_ssize_t n = bits.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int s_a, r_a, mask, c
    with nogil:
        for i in range(n):
            s_a = bits[i]
            r_a = 0 if u[i, 0] < _marginal(table, s_a, 0) else 1
            mask = 0 if u[i, 1] < 0.5 else 1
            c = r_a ^ (s_a & mask)
            out[i] = <unsigned char> _verify(table, s_a, r_a, s_a, r_a, c, u[i, 2], u[i, 3])
    return out_arr


def alice_cheat_trials(const double[:, ::1] table,
                       const unsigned char[::1] commit_c,
                       const unsigned char[:, ::1] reveal_s,
                       const unsigned char[:, ::1] reveal_r,
                       const unsigned char[::1] targets,
                       const double[:, ::1] u):
    cdef Py_ssize_t n = targets.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int tgt, o, c, s_a, r_a, verdict
    with nogil:
        for i in range(n):
            tgt = targets[i]
            o = 0 if u[i, 0] < _marginal(table, 0, 0) else 1
            c = commit_c[o]
            s_a = reveal_s[o, tgt]
            r_a = reveal_r[o, tgt]
            verdict = _verify(table, s_a, r_a, 0, o, c, u[i, 1], u[i, 2])
            out[i] = 1 if (verdict == 0 and s_a == tgt) else 0
    return out_arr


def gain_trials(const double[:, ::1] table,
                const unsigned char[:, ::1] guess,
                const unsigned char[:, ::1] rmap0, const unsigned char[:, ::1] rmap1,
                const double[:, ::1] u):
    cdef Py_ssize_t n = u.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int s_a, mask, r_a, c, k, result, g
    with nogil:
        for i in range(n):
            s_a = 0 if u[i, 0] < 0.5 else 1
            r_a = 0 if u[i, 1] < _marginal(table, s_a, 0) else 1
            mask = 0 if u[i, 2] < 0.5 else 1
            c = r_a ^ (s_a & mask)
            k = _sample_pair_outputs(table, 4 * s_a + 3 * c, r_a, u[i, 3])
            if c == 0:
                result = rmap0[k >> 1, k & 1]
            else:
                result = rmap1[k >> 1, k & 1]
            g = guess[c, result]
            out[i] = 1 if g == s_a else 0
    return out_arr


def coinflip_trials(const double[:, ::1] table, const double[:, ::1] u):
    cdef Py_ssize_t n = u.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int bit, r_a, mask, c, b, verdict
    with nogil:
        for i in range(n):
            bit = 0 if u[i, 0] < 0.5 else 1
            r_a = 0 if u[i, 1] < _marginal(table, bit, 0) else 1
            mask = 0 if u[i, 2] < 0.5 else 1
            c = r_a ^ (bit & mask)
            b = 0 if u[i, 3] < 0.5 else 1
            verdict = _verify(table, bit, r_a, bit, r_a, c, u[i, 4], u[i, 5])
            out[i] = <unsigned char> ((bit ^ b) if verdict == 0 else verdict + 1)
    return out_arr
