"""Pure-Python twin of the compiled kernels in ``_core``.

Arithmetic is on unbounded Python integers, so this path never overflows.
"""
import numpy as np

OP_TOP, OP_NEG, OP_AND, OP_L, OP_M = range(5)


def run_program(ops, arg0, arg1, lab, rate, indptr, indices, data, n, want_d, clamp, scale):
    ops = list(ops)
    arg0 = list(arg0)
    arg1 = list(arg1)
    lab = list(lab)
    rate = [int(r) for r in rate]
    indptr = [list(map(int, row)) for row in indptr]
    indices = list(map(int, indices))
    data = [int(x) for x in data]
    truth = []
    dval = []
    zeros = [0] * n
    for k, op in enumerate(ops):
        if op == OP_TOP:
            t = [1] * n
            d = zeros
        elif op == OP_NEG:
            t = [1 - x for x in truth[arg0[k]]]
            if want_d:
                d = [scale - x for x in dval[arg0[k]]]
                if clamp:
                    d = [min(max(x, 0), scale) for x in d]
            else:
                d = zeros
        elif op == OP_AND:
            tl, tr = truth[arg0[k]], truth[arg1[k]]
            t = [x & y for x, y in zip(tl, tr)]
            if want_d:
                d = [max(x, y) for x, y in zip(dval[arg0[k]], dval[arg1[k]])]
                if clamp:
                    d = [min(max(x, 0), scale) for x in d]
            else:
                d = zeros
        else:
            inner = truth[arg0[k]]
            ptr = indptr[lab[k]]
            r = rate[k]
            t = [0] * n
            d = [0] * n
            for s in range(n):
                total = 0
                for j in range(ptr[s], ptr[s + 1]):
                    if inner[indices[j]]:
                        total += data[j]
                if op == OP_L:
                    t[s] = 1 if total >= r else 0
                    v = r - total
                else:
                    t[s] = 1 if total <= r else 0
                    v = total - r
                if want_d:
                    v = max(v, 0)
                    if clamp:
                        v = min(v, scale)
                    d[s] = v
        truth.append(t)
        dval.append(d)
    return (np.array(truth, dtype=np.uint8).reshape(len(ops), n),
            np.array(dval, dtype=object).reshape(len(ops), n))


def block_sums(indptr, indices, data, member):
    n = len(indptr) - 1
    out = [0] * n
    for s in range(n):
        total = 0
        for j in range(int(indptr[s]), int(indptr[s + 1])):
            if member[int(indices[j])]:
                total += int(data[j])
        out[s] = total
    return np.array(out, dtype=object)
