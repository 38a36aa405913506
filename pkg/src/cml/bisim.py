"""Rate bisimilarity by partition refinement, with distinguishing formulas."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import engine
from .formula import TOP, And, Formula, L, Neg
from .kernel import Kernel, Process, UnknownStateError, disjoint_union

__all__ = ["Refinement", "refine", "bisim_classes", "bisimilar", "distinguishing_formula",
           "simplest_between"]


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Rational with the least denominator in the open interval ``(a, b)``.

    Among those, the least numerator.  Requires ``0 <= a < b``.
    """
    a, b = Fraction(a), Fraction(b)
    if not 0 <= a < b:
        raise ValueError(f"need 0 <= a < b, got ({a}, {b})")
    fl = math.floor(a)
    if fl + 1 < b:
        return Fraction(fl + 1)
    x, y = a - fl, b - fl
    if x == 0:
        return fl + Fraction(1, math.floor(1 / y) + 1)
    return fl + 1 / simplest_between(1 / y, 1 / x)


@dataclass
class Split:
    """One refinement step: ``block`` split by ``label``-rates into ``target``."""

    block: frozenset[str]
    label: str
    target: frozenset[str]
    target_char: Formula
    values: dict[str, Fraction]
    parts: list[frozenset[str]]


@dataclass
class Refinement:
    kernel: Kernel
    blocks: list[frozenset[str]]
    chars: list[Formula]
    splits: list[Split]

    def block_of(self, state: str) -> int:
        for i, b in enumerate(self.blocks):
            if state in b:
                return i
        raise UnknownStateError(state)


def _denominator(k: Kernel) -> int:
    return math.lcm(1, *(r.denominator for a in k.labels for row in k.rates[a].values()
                        for r in row.values()))


def refine(k: Kernel) -> Refinement:
    """Split blocks until every block agrees on the rate into every block.

    Each block carries a formula of the logic whose denotation is exactly
    that block; splits use thresholds strictly between the observed rates.
    """
    scale = _denominator(k)
    blocks: list[frozenset[str]] = [frozenset(k.states)] if k.states else []
    chars: list[Formula] = [TOP] if k.states else []
    splits: list[Split] = []
    index = k.index
    while True:
        found = None
        for ci, target in enumerate(blocks):
            member = [s in target for s in k.states]
            for a in k.labels:
                sums = engine.block_sums(k, a, member, scale)
                for bi, block in enumerate(blocks):
                    vals = {sums[index[s]] for s in block}
                    if len(vals) > 1:
                        found = (bi, ci, a, sums)
                        break
                if found:
                    break
            if found:
                break
        if found is None:
            return Refinement(k, blocks, chars, splits)
        bi, ci, a, sums = found
        block, base = blocks[bi], chars[bi]
        target, tchar = blocks[ci], chars[ci]
        values = {s: Fraction(sums[index[s]], scale) for s in block}
        levels = sorted(set(values.values()))
        cuts = [simplest_between(lo, hi) for lo, hi in zip(levels, levels[1:])]
        parts, pchars = [], []
        for i, v in enumerate(levels):
            f = base
            if i > 0:
                f = And(f, L(a, cuts[i - 1], tchar))
            if i < len(cuts):
                f = And(f, Neg(L(a, cuts[i], tchar)))
            parts.append(frozenset(s for s in block if values[s] == v))
            pchars.append(f)
        splits.append(Split(block, a, target, tchar, values, parts))
        blocks[bi:bi + 1] = parts
        chars[bi:bi + 1] = pchars


def bisim_classes(k: Kernel) -> list[frozenset[str]]:
    """The bisimilarity classes, ordered by their first state."""
    blocks = refine(k).blocks
    return sorted(blocks, key=lambda b: min(k.index[s] for s in b))


def _union(p1: Process, p2: Process) -> tuple[Kernel, str, str]:
    return disjoint_union(p1.kernel, p2.kernel), f"0:{p1.state}", f"1:{p2.state}"


def bisimilar(p1: Process, p2: Process) -> bool:
    u, x, y = _union(p1, p2)
    ref = refine(u)
    return ref.block_of(x) == ref.block_of(y)


def distinguishing_formula(p1: Process, p2: Process) -> Formula | None:
    """A formula true at exactly one of the two processes, or None if bisimilar.

    It has the shape ``L[a,r] chi`` where ``chi`` characterises the splitter
    block that first separated the two states, and ``r`` is the simplest
    rational strictly between their rates into that block.
    """
    u, x, y = _union(p1, p2)
    ref = refine(u)
    if ref.block_of(x) == ref.block_of(y):
        return None
    for sp in ref.splits:
        if x in sp.block and y in sp.block:
            vx, vy = sp.values[x], sp.values[y]
            if vx != vy:
                lo, hi = min(vx, vy), max(vx, vy)
                return L(sp.label, simplest_between(lo, hi), sp.target_char)
    raise AssertionError("separated states must be split at some step")
