"""Exact linear programming over the rationals.

A two-phase primal simplex on a fraction-free integer tableau.  Every row is
kept as a vector of Python integers whose basic entry is positive; pivots
cross-multiply and then divide the row by the gcd of its entries, so no
rational arithmetic happens inside the loop.  Bland's rule guarantees
termination.

Strict inequalities are handled by :func:`solve_strict`, which maximises a
shared slack ``t`` (capped at 1) and reports feasibility iff ``t* > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

__all__ = ["Constraint", "LPResult", "solve", "solve_strict", "StrictResult"]

SENSES = ("<=", ">=", "==", "<", ">")


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, Fraction | int]
    sense: str
    rhs: Fraction | int

    def __post_init__(self) -> None:
        if self.sense not in SENSES:
            raise ValueError(f"unknown sense {self.sense!r}")


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None = None
    x: list[Fraction] | None = None


def _normalize(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = math.gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def _integer_row(coeffs: Sequence[Fraction], rhs: Fraction) -> list[int]:
    den = math.lcm(1, *(c.denominator for c in coeffs), rhs.denominator)
    return [int(c * den) for c in coeffs] + [int(rhs * den)]


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int], ncols: int) -> None:
        self.rows = rows
        self.basis = basis
        self.ncols = ncols
        self.obj: list[int] = [0] * (ncols + 1)
        self.om = 1

    def set_objective(self, c: Sequence[Fraction]) -> None:
        """Install ``max c.x`` and price out the current basis."""
        den = math.lcm(1, *(Fraction(v).denominator for v in c))
        obj = [-int(Fraction(c[j]) * den) if j < len(c) else 0 for j in range(self.ncols)] + [0]
        om = den
        for row, b in zip(self.rows, self.basis):
            f = obj[b]
            if f:
                p = row[b]
                obj = [o * p - r * f for o, r in zip(obj, row)]
                om *= p
                g = math.gcd(om, *obj)
                if g > 1:
                    obj = [o // g for o in obj]
                    om //= g
        self.obj = obj
        self.om = om

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p < 0:
            prow = [-v for v in prow]
            p = -p
        self.rows[r] = prow = _normalize(prow)
        p = prow[c]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                self.rows[i] = _normalize([v * p - w * f for v, w in zip(row, prow)])
        f = self.obj[c]
        if f:
            obj = [v * p - w * f for v, w in zip(self.obj, prow)]
            om = self.om * p
            g = math.gcd(om, *obj)
            if g > 1:
                obj = [v // g for v in obj]
                om //= g
            self.obj, self.om = obj, om
        self.basis[r] = c

    def optimize(self, allowed: int) -> str:
        """Primal simplex on columns ``< allowed``; returns status."""
        while True:
            enter = -1
            for j in range(allowed):
                if self.obj[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            best = -1
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    if best < 0:
                        best = i
                        continue
                    brow = self.rows[best]
                    lhs = row[-1] * brow[enter]
                    rhs = brow[-1] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                        best = i
            if best < 0:
                return "unbounded"
            self.pivot(best, enter)

    def value(self) -> Fraction:
        return Fraction(self.obj[-1], self.om)

    def solution(self, n: int) -> list[Fraction]:
        x = [Fraction(0)] * n
        for row, b in zip(self.rows, self.basis):
            if b < n:
                x[b] = Fraction(row[-1], row[b])
        return x


def solve(nvars: int, constraints: Sequence[Constraint],
          objective: Mapping[int, Fraction | int] | None = None) -> LPResult:
    """Maximise ``objective`` subject to ``constraints`` and ``x >= 0``.

    Only non-strict senses are accepted here.  With no objective the result
    is any feasible vertex (value 0).
    """
    dense: list[tuple[list[Fraction], str, Fraction]] = []
    for con in constraints:
        if con.sense in ("<", ">"):
            raise ValueError("strict constraints need solve_strict")
        coeffs = [Fraction(0)] * nvars
        for j, v in con.coeffs.items():
            if not 0 <= j < nvars:
                raise IndexError(f"variable {j} out of range")
            coeffs[j] += Fraction(v)
        rhs = Fraction(con.rhs)
        sense = con.sense
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        dense.append((coeffs, sense, rhs))

    nslack = sum(1 for _, s, _ in dense if s != "==")
    nart = sum(1 for _, s, _ in dense if s != "<=")
    ncols = nvars + nslack + nart
    rows: list[list[int]] = []
    basis: list[int] = []
    si = nvars
    ai = nvars + nslack
    arts = []
    for coeffs, sense, rhs in dense:
        base = _integer_row(coeffs, rhs)
        body, b = base[:-1], base[-1]
        extra = [0] * (nslack + nart)
        if sense == "<=":
            extra[si - nvars] = 1
            basis.append(si)
            si += 1
        else:
            if sense == ">=":
                extra[si - nvars] = -1
                si += 1
            extra[ai - nvars] = 1
            basis.append(ai)
            arts.append(ai)
            ai += 1
        rows.append(_normalize(body + extra + [b]))

    tab = _Tableau(rows, basis, ncols)
    if arts:
        phase1 = [Fraction(0)] * ncols
        for a in arts:
            phase1[a] = Fraction(-1)
        tab.set_objective(phase1)
        tab.optimize(ncols)
        if tab.value() < 0:
            return LPResult("infeasible")
        # drive zero-valued artificials out of the basis
        first_art = nvars + nslack
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= first_art:
                row = tab.rows[i]
                col = next((j for j in range(first_art) if row[j] != 0), -1)
                if col < 0:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, col)
            i += 1
        tab.rows = [row[:first_art] + [row[-1]] for row in tab.rows]
        tab.ncols = first_art
    c = [Fraction(0)] * tab.ncols
    for j, v in (objective or {}).items():
        c[j] += Fraction(v)
    tab.set_objective(c)
    status = tab.optimize(tab.ncols)
    if status == "unbounded":
        return LPResult("unbounded")
    return LPResult("optimal", tab.value(), tab.solution(nvars))


@dataclass
class StrictResult:
    feasible: bool
    slack: Fraction
    x: list[Fraction] | None


def solve_strict(nvars: int, constraints: Sequence[Constraint]) -> StrictResult:
    """Decide a system that may contain strict inequalities.

    Strict rows ``sum < r`` become ``sum + t <= r`` (and ``sum > r`` becomes
    ``sum - t >= r``) for one shared slack ``0 <= t <= 1``, which is maximised.
    The system is feasible iff the optimum ``t*`` is positive; the returned
    point is a vertex of the system with ``t`` fixed at ``t*/2``.
    """
    if not any(c.sense in ("<", ">") for c in constraints):
        res = solve(nvars, constraints)
        if res.status == "infeasible":
            return StrictResult(False, Fraction(0), None)
        return StrictResult(True, Fraction(1), res.x)
    t = nvars

    def lift(tval):
        out = []
        for c in constraints:
            coeffs = dict(c.coeffs)
            if c.sense in ("<", ">"):
                if tval is None:
                    coeffs[t] = 1 if c.sense == "<" else -1
                    out.append(Constraint(coeffs, "<=" if c.sense == "<" else ">=", c.rhs))
                else:
                    shift = tval if c.sense == "<" else -tval
                    out.append(Constraint(coeffs, "<=" if c.sense == "<" else ">=",
                                          Fraction(c.rhs) - shift))
            else:
                out.append(c)
        return out

    rows = lift(None) + [Constraint({t: 1}, "<=", 1)]
    res = solve(nvars + 1, rows, {t: 1})
    if res.status != "optimal" or res.value <= 0:
        return StrictResult(False, Fraction(0), None)
    tstar = res.value
    half = solve(nvars, lift(tstar / 2))
    assert half.status == "optimal", "half-slack system must be feasible"
    return StrictResult(True, tstar, half.x)
