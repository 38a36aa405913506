"""Batch evaluation of formula DAGs on a kernel.

Formulas are flattened into a topologically ordered program and all rates and
indices are scaled to integers over a common denominator, so truth values and
quantitative values are computed exactly.  The compiled core is used when it
imports and the scaled values fit comfortably in 64 bits; otherwise (or when
``CML_PURE_PYTHON=1`` is set) the pure-Python twin runs instead.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _engine_py
from .formula import And, Formula, L, Neg, Top, subformulas
from .kernel import Kernel, UnknownLabelError, UnknownStateError

try:
    if os.environ.get("CML_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python requested")
    from . import _core
except ImportError:
    _core = None

BACKEND = "compiled" if _core is not None else "python"
_LIMIT = 1 << 60

OP_TOP, OP_NEG, OP_AND, OP_L, OP_M = range(5)

__all__ = ["BACKEND", "Program", "Evaluation", "compile_program", "evaluate", "scaled_csr"]


class Program:
    """A list of formulas flattened into shared, topologically sorted nodes."""

    def __init__(self, formulas: Iterable[Formula]) -> None:
        self.roots = list(formulas)
        self.slot: dict[Formula, int] = {}
        ops, a0, a1, labs, rates = [], [], [], [], []
        for root in self.roots:
            for f in subformulas(root):
                if f in self.slot:
                    continue
                self.slot[f] = len(ops)
                if isinstance(f, Top):
                    ops.append(OP_TOP); a0.append(0); a1.append(0); labs.append(None); rates.append(Fraction(0))
                elif isinstance(f, Neg):
                    ops.append(OP_NEG); a0.append(self.slot[f.sub]); a1.append(0); labs.append(None); rates.append(Fraction(0))
                elif isinstance(f, And):
                    ops.append(OP_AND); a0.append(self.slot[f.left]); a1.append(self.slot[f.right])
                    labs.append(None); rates.append(Fraction(0))
                else:
                    ops.append(OP_L if isinstance(f, L) else OP_M)
                    a0.append(self.slot[f.sub]); a1.append(0); labs.append(f.label); rates.append(f.rate)
        self.ops = ops
        self.arg0 = a0
        self.arg1 = a1
        self.labels = labs
        self.rates = rates
        self.denominator = math.lcm(1, *(r.denominator for r in rates))
        self.max_rate = max(rates, default=Fraction(0))

    def __len__(self) -> int:
        return len(self.ops)


def compile_program(formulas: Iterable[Formula]) -> Program:
    return Program(formulas)


def scaled_csr(k: Kernel, scale: int, label: str):
    """CSR arrays of the ``label`` rates of ``k`` multiplied by ``scale``."""
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for m in k.states:
        for n, r in sorted(k.successors(label, m).items(), key=lambda t: k.index[t[0]]):
            indices.append(k.index[n])
            v = r * scale
            if v.denominator != 1:
                raise ValueError("scale does not clear the rate denominators")
            data.append(int(v))
        indptr.append(len(indices))
    return indptr, indices, data


def _kernel_denominator(k: Kernel) -> int:
    return math.lcm(1, *(r.denominator for a in k.labels for row in k.rates[a].values()
                        for r in row.values()))


class Evaluation:
    """Truth values and quantitative values of a program on every state."""

    def __init__(self, kernel: Kernel, program: Program, truth, dval, scale: int, backend: str) -> None:
        self.kernel = kernel
        self.program = program
        self.truth_table = truth
        self.dval = dval
        self.scale = scale
        self.backend = backend

    def _row(self, phi: Formula) -> int:
        try:
            return self.program.slot[phi]
        except KeyError:
            raise KeyError(f"formula not in program: {phi}") from None

    def holds(self, phi: Formula, state: str) -> bool:
        return bool(self.truth_table[self._row(phi), self.kernel.index[state]])

    def truth(self, phi: Formula) -> list[bool]:
        return [bool(x) for x in self.truth_table[self._row(phi)]]

    def denotation(self, phi: Formula) -> frozenset[str]:
        row = self.truth_table[self._row(phi)]
        return frozenset(s for s, x in zip(self.kernel.states, row) if x)

    def d(self, phi: Formula, state: str) -> Fraction:
        return Fraction(int(self.dval[self._row(phi), self.kernel.index[state]]), self.scale)

    def d_all(self, phi: Formula) -> list[Fraction]:
        return [Fraction(int(v), self.scale) for v in self.dval[self._row(phi)]]


def evaluate(k: Kernel, formulas: Sequence[Formula] | Program, want_d: bool = False,
             clamp: bool = False, backend: str | None = None) -> Evaluation:
    """Evaluate every formula (and every subformula) at every state of ``k``."""
    prog = formulas if isinstance(formulas, Program) else Program(formulas)
    label_ix = {a: i for i, a in enumerate(k.labels)}
    for a in prog.labels:
        if a is not None and a not in label_ix:
            raise UnknownLabelError(a)
    scale = math.lcm(_kernel_denominator(k), prog.denominator)
    n = len(k.states)
    nl = max(len(k.labels), 1)
    indptr = [[0] * (n + 1) for _ in range(nl)]
    indices: list[int] = []
    data: list[int] = []
    row_total = 0
    for i, a in enumerate(k.labels):
        p, ix, dt = scaled_csr(k, scale, a)
        off = len(indices)
        indptr[i] = [x + off for x in p]
        indices.extend(ix)
        data.extend(dt)
        for s in range(n):
            row_total = max(row_total, sum(dt[p[s]:p[s + 1]]))
    lab = [label_ix[a] if a is not None else 0 for a in prog.labels]
    rate = [int(r * scale) for r in prog.rates]
    bound = row_total + max(rate, default=0) + (len(prog) + 2) * scale
    use = backend or ("compiled" if _core is not None and bound < _LIMIT else "python")
    if use == "compiled":
        if _core is None:
            raise RuntimeError("compiled core is not available")
        if bound >= _LIMIT:
            raise OverflowError("scaled values exceed the compiled core's range")
        truth, dval = _core.run_program(
            np.asarray(prog.ops, dtype=np.intc), np.asarray(prog.arg0, dtype=np.int64),
            np.asarray(prog.arg1, dtype=np.int64), np.asarray(lab, dtype=np.intc),
            np.asarray(rate, dtype=np.int64), np.asarray(indptr, dtype=np.int64).reshape(nl, n + 1),
            np.asarray(indices, dtype=np.int64), np.asarray(data, dtype=np.int64),
            n, want_d, clamp, scale)
    else:
        truth, dval = _engine_py.run_program(prog.ops, prog.arg0, prog.arg1, lab, rate, indptr,
                                             indices, data, n, want_d, clamp, scale)
    return Evaluation(k, prog, truth, dval, scale, use)


def block_sums(k: Kernel, label: str, member: Sequence[bool], scale: int, backend: str | None = None):
    """Scaled total ``label``-rate from each state into the flagged states."""
    indptr, indices, data = scaled_csr(k, scale, label)
    bound = max((sum(data[indptr[s]:indptr[s + 1]]) for s in range(len(k.states))), default=0)
    use = backend or ("compiled" if _core is not None and bound < _LIMIT else "python")
    if use == "compiled":
        return [int(x) for x in _core.block_sums(
            np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64),
            np.asarray(data, dtype=np.int64), np.asarray(member, dtype=np.uint8))]
    return [int(x) for x in _engine_py.block_sums(indptr, indices, data, list(member))]
