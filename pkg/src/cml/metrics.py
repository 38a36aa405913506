"""Quantitative satisfaction and the distances built on it."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import engine
from .formula import Formula, format_rational, measures, to_text, uses_m
from .kernel import Kernel, Process
from .sat import ClosureError, FiniteModel, synthesize_model

__all__ = [
    "trunc_diff", "dsat", "dsat_all", "DistanceReport", "pdist", "fdist", "sd_hat",
    "check_strong_robustness", "check_weak_robustness", "WeakRobustness", "weak_robustness",
]


def trunc_diff(r: Fraction, s: Fraction) -> Fraction:
    """``r - s`` when positive, else 0."""
    return max(Fraction(r) - Fraction(s), Fraction(0))


def dsat(p: Process, phi: Formula, clamp: bool = False) -> Fraction:
    """Degree to which ``p`` fails ``phi``; 0 means no shortfall.

    With ``clamp`` every clause is clipped into ``[0, 1]``.
    """
    ev = engine.evaluate(p.kernel, [phi], want_d=True, clamp=clamp)
    return ev.d(phi, p.state)


def dsat_all(k: Kernel, formulas: Sequence[Formula], clamp: bool = False) -> engine.Evaluation:
    return engine.evaluate(k, formulas, want_d=True, clamp=clamp)


@dataclass
class DistanceReport:
    value: Fraction
    witness: object
    family: dict = field(default_factory=dict)
    exact: bool = False

    def to_json(self) -> dict:
        w = self.witness
        if isinstance(w, Formula):
            w = to_text(w)
        elif isinstance(w, Process):
            w = w.state
        return {"value": format_rational(self.value), "witness": w,
                "family": self.family, "exact": self.exact}


def _values(processes: Sequence[Process], formulas: Sequence[Formula], clamp: bool):
    """``out[i][j]`` is the value of formula ``j`` at process ``i``."""
    by_kernel: dict[int, engine.Evaluation] = {}
    prog = engine.compile_program(formulas)
    out = []
    for p in processes:
        ev = by_kernel.get(id(p.kernel))
        if ev is None:
            ev = by_kernel[id(p.kernel)] = engine.evaluate(p.kernel, prog, want_d=True, clamp=clamp)
        out.append([ev.d(f, p.state) for f in formulas])
    return out


def pdist(p1: Process, p2: Process, family: Sequence[Formula], clamp: bool = False,
          descriptor: dict | None = None) -> DistanceReport:
    """Largest difference of quantitative satisfaction over ``family``.

    A lower bound of the supremum over all formulas, hence ``exact=False``.
    """
    family = list(family)
    if not family:
        raise ValueError("pdist needs a non-empty family")
    v1, v2 = _values([p1, p2], family, clamp)
    best, witness = Fraction(-1), None
    for f, x, y in zip(family, v1, v2):
        gap = abs(x - y)
        if gap > best:
            best, witness = gap, f
    return DistanceReport(best, witness, dict(descriptor or {"size": len(family)}), False)


def fdist(phi1: Formula, phi2: Formula, witnesses: Sequence[Process], clamp: bool = False,
          exact: bool = False) -> DistanceReport:
    """Largest difference between two formulas over a finite set of processes."""
    witnesses = list(witnesses)
    if not witnesses:
        raise ValueError("fdist needs a non-empty witness set")
    vals = _values(witnesses, [phi1, phi2], clamp)
    best, witness = Fraction(-1), None
    for p, (x, y) in zip(witnesses, vals):
        gap = abs(x - y)
        if gap > best:
            best, witness = gap, p
    return DistanceReport(best, witness, {"witnesses": len(witnesses)}, exact)


def _check_in_closure(fm: FiniteModel, *formulas: Formula) -> None:
    spec = fm.spec
    for f in formulas:
        if not spec.contains(f):
            raise ClosureError(f"{f} is outside the closure of the model")
        if uses_m(f) and not fm.synthesis.with_m:
            raise ClosureError(f"{f} uses M but the closure is L-only")


def sd_hat(psi: Formula, phi1: Formula, phi2: Formula, clamp: bool = False,
           model: FiniteModel | None = None) -> tuple[DistanceReport, int]:
    """Distance of two closure formulas over the states of the model of ``psi``.

    Returns the report (``exact=True``: the maximum ranges over the whole
    finite model) and the model parameter ``p``.
    """
    fm = model if model is not None else synthesize_model(psi)
    _check_in_closure(fm, phi1, phi2)
    states = [fm.process(a) for a in fm.atoms]
    rep = fdist(phi1, phi2, states, clamp=clamp, exact=True)
    rep.family = {"psi": to_text(psi), "atoms": len(states), "parameter": fm.parameter}
    return rep, fm.parameter


def _member(p: Process, witnesses: Sequence[Process]) -> bool:
    return any(w.state == p.state and (w.kernel is p.kernel or w.kernel == p.kernel) for w in witnesses)


def check_strong_robustness(p: Process, phi: Formula, psi: Formula,
                            witnesses: Sequence[Process], clamp: bool = False) -> bool:
    """``d(p, psi) <= d(p, phi) + fdist(phi, psi, witnesses)`` for ``p`` among the witnesses."""
    if not _member(p, witnesses):
        raise ValueError("the process must belong to the witness set")
    bound = fdist(phi, psi, witnesses, clamp).value
    return dsat(p, psi, clamp) <= dsat(p, phi, clamp) + bound


@dataclass
class WeakRobustness:
    holds: bool
    lhs: Fraction
    rhs_d: Fraction
    sd: Fraction
    parameter: int

    @property
    def slack(self) -> Fraction:
        return self.rhs_d + self.sd + Fraction(2, self.parameter) - self.lhs

    def to_json(self) -> dict:
        f = format_rational
        return {"holds": self.holds, "d_phi1": f(self.lhs), "d_phi2": f(self.rhs_d),
                "sdhat": f(self.sd), "parameter": self.parameter, "slack": f(self.slack)}


def weak_robustness(p: Process, psi: Formula, phi1: Formula, phi2: Formula,
                    clamp: bool = False, model: FiniteModel | None = None) -> WeakRobustness:
    """Evaluate ``d(p,phi1) <= d(p,phi2) + sd_hat(phi1,phi2) + 2/par`` with all terms."""
    rep, par = sd_hat(psi, phi1, phi2, clamp, model)
    lhs = dsat(p, phi1, clamp)
    rhs = dsat(p, phi2, clamp)
    return WeakRobustness(lhs <= rhs + rep.value + Fraction(2, par), lhs, rhs, rep.value, par)


def check_weak_robustness(p: Process, psi: Formula, phi1: Formula, phi2: Formula,
                          clamp: bool = False, model: FiniteModel | None = None) -> bool:
    return weak_robustness(p, psi, phi1, phi2, clamp, model).holds
