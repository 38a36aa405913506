"""Continuous Markovian logic over finite rate kernels.

The satisfaction check lives at :func:`cml.kernel.sat`; ``cml.sat`` is the
satisfiability module.
"""
from .formula import (BOT, TOP, And, ClosureSpec, Formula, L, M, Neg, Top, conj, disj,
                      enumerate_family, exact, implies, measures, modal_grid, parse, to_text)
from .kernel import Kernel, Process, denotation, disjoint_union, load_model, save_model, theta

__version__ = "0.1.0"
