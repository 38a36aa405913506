# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels over scaled integer rates."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    OP_TOP = 0
    OP_NEG = 1
    OP_AND = 2
    OP_L = 3
    OP_M = 4


def run_program(const int[:] ops, const long long[:] arg0, const long long[:] arg1,
                const int[:] lab, const long long[:] rate,
                const long long[:, :] indptr, const long long[:] indices,
                const long long[:] data, Py_ssize_t n, bint want_d, bint clamp,
                long long scale):
    """Evaluate a topologically sorted formula program on every state.

    Returns ``(truth, dval)``: ``truth[k, s]`` is 1 iff state ``s`` satisfies
    node ``k``; ``dval[k, s]`` is the quantitative value times ``scale``
    (all zeros when ``want_d`` is false).
    """
    cdef Py_ssize_t nodes = ops.shape[0]
    truth_arr = np.zeros((nodes, n), dtype=np.uint8)
    dval_arr = np.zeros((nodes, n), dtype=np.int64)
    cdef unsigned char[:, :] truth = truth_arr
    cdef long long[:, :] dval = dval_arr
    cdef Py_ssize_t k, s, j, c, c2
    cdef int op, a
    cdef long long r, total, v, lo, hi
    for k in range(nodes):
        op = ops[k]
        if op == OP_TOP:
            for s in range(n):
                truth[k, s] = 1
        elif op == OP_NEG:
            c = arg0[k]
            for s in range(n):
                truth[k, s] = 1 - truth[c, s]
                if want_d:
                    v = scale - dval[c, s]
                    if clamp:
                        v = 0 if v < 0 else (scale if v > scale else v)
                    dval[k, s] = v
        elif op == OP_AND:
            c = arg0[k]
            c2 = arg1[k]
            for s in range(n):
                truth[k, s] = truth[c, s] & truth[c2, s]
                if want_d:
                    v = dval[c, s]
                    if dval[c2, s] > v:
                        v = dval[c2, s]
                    if clamp:
                        v = 0 if v < 0 else (scale if v > scale else v)
                    dval[k, s] = v
        else:
            c = arg0[k]
            a = lab[k]
            r = rate[k]
            for s in range(n):
                total = 0
                lo = indptr[a, s]
                hi = indptr[a, s + 1]
                for j in range(lo, hi):
                    if truth[c, indices[j]]:
                        total += data[j]
                if op == OP_L:
                    truth[k, s] = total >= r
                    v = r - total
                else:
                    truth[k, s] = total <= r
                    v = total - r
                if want_d:
                    if v < 0:
                        v = 0
                    if clamp and v > scale:
                        v = scale
                    dval[k, s] = v
    return truth_arr, dval_arr


def block_sums(const long long[:] indptr, const long long[:] indices,
               const long long[:] data, const unsigned char[:] member):
    """Scaled total rate from every state into the states flagged in ``member``."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out_arr = np.zeros(n, dtype=np.int64)
    cdef long long[:] out = out_arr
    cdef Py_ssize_t s, j
    cdef long long total
    for s in range(n):
        total = 0
        for j in range(indptr[s], indptr[s + 1]):
            if member[indices[j]]:
                total += data[j]
        out[s] = total
    return out_arr
