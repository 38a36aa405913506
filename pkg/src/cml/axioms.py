"""Axiom schemas, randomized soundness campaigns and PML countermodels."""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Sequence

from . import engine
from .formula import (BOT, TOP, And, Formula, L, M, Neg, disj, format_rational, iff,
                      implies, parse, to_text)
from .kernel import Kernel, Process, denotation, kernel_from_json, kernel_to_json, theta

__all__ = [
    "SCHEMAS", "SOUND", "UNSOUND", "SideConditionError", "Instance", "instantiate",
    "random_kernel", "random_formula", "soundness_campaign", "finitary_rule_check",
    "load_countermodel", "COUNTERMODELS",
]


class SideConditionError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    schema: str
    formula: Formula
    premise: Formula | None = None  # conditional schemas: conclusion needs a valid premise


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise SideConditionError(msg)


def _nonneg(*rs: Fraction) -> None:
    _need(all(r >= 0 for r in rs), "indices must be non-negative")


# each builder takes (label, r, s, phi, psi)
def _a1(a, r, s, phi, psi):
    return Instance("A1", L(a, 0, phi))


def _a2(a, r, s, phi, psi):
    _nonneg(r, s)
    return Instance("A2", implies(L(a, r + s, phi), L(a, r, phi)))


def _a3(a, r, s, phi, psi):
    _nonneg(r, s)
    return Instance("A3", implies(And(L(a, r, And(phi, psi)), L(a, s, And(phi, Neg(psi)))),
                                  L(a, r + s, phi)))


def _a4(a, r, s, phi, psi, name="A4"):
    _nonneg(r, s)
    return Instance(name, implies(And(Neg(L(a, r, And(phi, psi))), Neg(L(a, s, And(phi, Neg(psi))))),
                                  Neg(L(a, r + s, phi))))


def _r1(a, r, s, phi, psi, name="R1"):
    _nonneg(r)
    return Instance(name, implies(L(a, r, phi), L(a, r, psi)), premise=implies(phi, psi))


def _c1(a, r, s, phi, psi):
    return Instance("C1", L(a, 0, phi))


def _c2(a, r, s, phi, psi):
    _nonneg(r, s)
    _need(s > 0, "C2 requires s > 0")
    return Instance("C2", implies(L(a, r + s, phi), Neg(M(a, r, phi))))


def _c3(a, r, s, phi, psi):
    _nonneg(r)
    return Instance("C3", implies(Neg(L(a, r, phi)), M(a, r, phi)))


def _c5(a, r, s, phi, psi):
    _nonneg(r, s)
    return Instance("C5", implies(And(Neg(M(a, r, And(phi, psi))), Neg(M(a, s, And(phi, Neg(psi))))),
                                  Neg(M(a, r + s, phi))))


def _lm1(a, r, s, phi, psi):
    _nonneg(r, s)
    _need(s > 0, "LM1 requires s > 0")
    return Instance("LM1", implies(M(a, r, phi), Neg(L(a, r + s, phi))))


def _lm2(a, r, s, phi, psi):
    _nonneg(r)
    return Instance("LM2", implies(Neg(M(a, r, phi)), L(a, r, phi)))


def _lm3(a, r, s, phi, psi):
    _nonneg(r, s)
    return Instance("LM3", implies(L(a, r + s, phi), L(a, r, phi)))


def _lm4(a, r, s, phi, psi):
    _nonneg(r, s)
    return Instance("LM4", implies(M(a, r, phi), M(a, r + s, phi)))


def _lm5(a, r, s, phi, psi):
    inst = _a3(a, r, s, phi, psi)
    return Instance("LM5", inst.formula)


def _lm6(a, r, s, phi, psi):
    _nonneg(r, s)
    return Instance("LM6", implies(And(M(a, r, And(phi, psi)), M(a, s, And(phi, Neg(psi)))),
                                   M(a, r + s, phi)))


def _lm7(a, r, s, phi, psi):
    _nonneg(r)
    return Instance("LM7", implies(M(a, r, psi), M(a, r, phi)), premise=implies(phi, psi))


def _b2(a, r, s, phi, psi):
    _nonneg(r)
    return Instance("B2", L(a, r, TOP))


def _b3(a, r, s, phi, psi):
    _need(0 <= r <= 1, "B3 requires 0 <= r <= 1")
    return Instance("B3", iff(L(a, r, phi), M(a, 1 - r, Neg(phi))))


def _b4(a, r, s, phi, psi):
    _nonneg(r, s)
    _need(r + s > 1, "B4 requires r + s > 1")
    return Instance("B4", implies(L(a, r, phi), Neg(L(a, s, Neg(phi)))))


SCHEMAS: dict[str, Callable[..., Instance]] = {
    "A1": _a1, "A2": _a2, "A3": _a3, "A4": _a4, "R1": _r1,
    "C1": _c1, "C2": _c2, "C3": _c3, "C4": lambda *args: _a4(*args, name="C4"), "C5": _c5,
    "T1": lambda *args: _r1(*args, name="T1"),
    "LM1": _lm1, "LM2": _lm2, "LM3": _lm3, "LM4": _lm4, "LM5": _lm5, "LM6": _lm6, "LM7": _lm7,
    "B2": _b2, "B3": _b3, "B4": _b4,
}
SOUND = ["A1", "A2", "A3", "A4", "R1", "C1", "C2", "C3", "C4", "C5", "T1",
         "LM1", "LM2", "LM3", "LM4", "LM5", "LM6", "LM7"]
UNSOUND = ["B2", "B3", "B4"]
CONDITIONAL = {"R1", "T1", "LM7"}


def instantiate(schema: str, label: str = "a", r: Fraction | int = 0, s: Fraction | int = 0,
                phi: Formula = TOP, psi: Formula = TOP) -> Instance:
    """Instantiate a schema; raises :class:`SideConditionError` on bad parameters."""
    try:
        build = SCHEMAS[schema]
    except KeyError:
        raise KeyError(f"unknown schema {schema!r}") from None
    return build(label, Fraction(r), Fraction(s), phi, psi)


# ---------------------------------------------------------------------------
# random material

LABELS = ("a", "b")


def random_kernel(rng: random.Random, max_states: int = 5, max_den: int = 12,
                  labels: Sequence[str] = LABELS, density: float = 0.5,
                  max_rate: int = 2) -> Kernel:
    """Kernel with 1..max_states states and rates p/q, q <= max_den, below max_rate."""
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    rates: dict[str, dict[str, dict[str, Fraction]]] = {}
    for a in labels:
        rows = {}
        for m in states:
            row = {}
            for t in states:
                if rng.random() < density:
                    q = rng.randint(1, max_den)
                    row[t] = Fraction(rng.randint(1, max_rate * q), q)
            if row:
                rows[m] = row
        rates[a] = rows
    return Kernel(states, labels, rates)


def random_index(rng: random.Random, max_den: int = 4, top: int = 3) -> Fraction:
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(0, top * q), q)


def random_formula(rng: random.Random, depth: int = 2, labels: Sequence[str] = LABELS,
                   pool: list[Formula] | None = None, with_m: bool = True, size: int = 3) -> Formula:
    """Random formula of modal depth at most ``depth``, reusing ``pool`` entries."""
    if pool and rng.random() < 0.3:
        return rng.choice(pool)
    roll = rng.random()
    if size <= 0 or roll < 0.15:
        return TOP if rng.random() < 0.8 else BOT
    if roll < 0.35:
        return Neg(random_formula(rng, depth, labels, pool, with_m, size - 1))
    if roll < 0.55 or depth == 0:
        return And(random_formula(rng, depth, labels, pool, with_m, size - 1),
                   random_formula(rng, depth, labels, pool, with_m, size - 1))
    op = M if with_m and rng.random() < 0.4 else L
    f = op(rng.choice(labels), random_index(rng),
           random_formula(rng, depth - 1, labels, pool, with_m, size - 1))
    if pool is not None:
        pool.append(f)
    return f


def _observed(k: Kernel, a: str, chi: Formula, memo: dict) -> list[Fraction]:
    den = denotation(k, chi, memo)
    return [theta(k, a, m, den) for m in k.states]


def _params(rng: random.Random, k: Kernel, schema: str, a: str, phi: Formula, psi: Formula,
            memo: dict) -> tuple[Fraction, Fraction]:
    """Pick indices, half the time on rates the model actually produces."""
    if rng.random() < 0.5:
        if schema in ("A3", "A4", "C4", "C5", "LM5", "LM6"):
            r = rng.choice(_observed(k, a, And(phi, psi), memo))
            s = rng.choice(_observed(k, a, And(phi, Neg(psi)), memo))
        else:
            r = rng.choice(_observed(k, a, phi, memo))
            s = random_index(rng)
    else:
        r, s = random_index(rng), random_index(rng)
    if schema in ("C2", "LM1", "B4") and s == 0:
        s = Fraction(1, rng.randint(1, 12))
    if schema == "B3":
        r = min(r, Fraction(1))
    if schema == "B4" and r + s <= 1:
        s = 1 - r + Fraction(1, rng.randint(1, 12))
    if schema == "B2" and r == 0:
        r = Fraction(1, 2)
    return r, s


def _weaken(rng: random.Random, phi: Formula, pool: list[Formula]) -> Formula:
    """A formula implied by ``phi`` (so the rule premise is valid everywhere)."""
    other = rng.choice(pool) if pool else TOP
    pick = rng.random()
    if pick < 0.4:
        return disj(phi, other)
    if pick < 0.6 and isinstance(phi, And):
        return phi.left
    if pick < 0.8:
        return TOP
    return phi


# ---------------------------------------------------------------------------
# campaign

@dataclass
class SchemaReport:
    schema: str
    samples: int = 0
    violations: int = 0
    skipped: int = 0
    witnesses: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"schema": self.schema, "samples": self.samples, "violations": self.violations,
                "skippedPremise": self.skipped, "witnesses": self.witnesses}


@dataclass
class CampaignReport:
    seed: int
    samples: int
    schemas: dict[str, SchemaReport]
    seconds: float = 0.0

    @property
    def sound_ok(self) -> bool:
        return all(r.violations == 0 for s, r in self.schemas.items() if s in SOUND)

    @property
    def unsound_witnessed(self) -> bool:
        return all(r.violations > 0 for s, r in self.schemas.items() if s in UNSOUND)

    def to_json(self) -> dict:
        return {"schemaVersion": 1, "seed": self.seed, "samplesPerSchema": self.samples,
                "seconds": round(self.seconds, 3),
                "schemas": {s: r.to_json() for s, r in self.schemas.items()}}


def soundness_campaign(schemas: Sequence[str] = tuple(SOUND), samples: int = 10_000, seed: int = 0,
                       per_model: int = 40, max_witnesses: int = 3) -> CampaignReport:
    """Check ``samples`` random (model, instance) pairs per schema.

    Instances of a model are evaluated in one batch.  Conditional schemas
    count only samples whose premise holds at every state of the model.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    for s in schemas:
        if s not in SCHEMAS:
            raise KeyError(f"unknown schema {s!r}")
    rng = random.Random(seed)
    reports = {s: SchemaReport(s) for s in schemas}
    start = time.perf_counter()
    pending = {s: samples for s in schemas}
    while any(pending.values()):
        k = random_kernel(rng)
        pool: list[Formula] = []
        memo: dict = {}
        batch: list[Instance] = []
        for _ in range(per_model):
            live = [s for s, left in pending.items() if left > 0]
            if not live:
                break
            schema = rng.choice(live)
            a = rng.choice(LABELS)
            phi = random_formula(rng, pool=pool)
            if schema in CONDITIONAL and rng.random() < 0.8:
                psi = _weaken(rng, phi, pool)
            else:
                psi = random_formula(rng, pool=pool)
            r, s = _params(rng, k, schema, a, phi, psi, memo)
            inst = instantiate(schema, a, r, s, phi, psi)
            batch.append(inst)
            pending[schema] -= 1
        prog = engine.compile_program([i.formula for i in batch] +
                                      [i.premise for i in batch if i.premise is not None])
        ev = engine.evaluate(k, prog)
        for inst in batch:
            rep = reports[inst.schema]
            if inst.premise is not None and not all(ev.truth(inst.premise)):
                rep.skipped += 1
                pending[inst.schema] += 1
                continue
            rep.samples += 1
            truth = ev.truth(inst.formula)
            if not all(truth):
                rep.violations += 1
                if len(rep.witnesses) < max_witnesses:
                    state = k.states[truth.index(False)]
                    rep.witnesses.append({"model": kernel_to_json(k), "state": state,
                                          "formula": to_text(inst.formula)})
    return CampaignReport(seed, samples, reports, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# infinitary rules on finite models

FINITARY = ("R2", "R3", "T2", "T3", "T4")


def finitary_rule_check(rule: str, k: Kernel, formulas: Sequence[Formula] = (TOP,),
                        grid_depth: int = 8) -> bool:
    """Finite surrogate of an infinitary rule on ``k``.

    R2/T2: if ``L[a,r] phi`` holds for the grid points ``r = v - 1/j`` below
    ``v`` then ``L[a,v] phi`` holds too, at the exact rate ``v``.  T3: the
    same from above for ``M``.  R3/T4: every rate is finite, so some index
    ``r`` has ``L[a,r] phi`` false.
    """
    if rule not in FINITARY:
        raise KeyError(f"unknown rule {rule!r}")
    memo: dict = {}
    for phi in formulas:
        den = denotation(k, phi, memo)
        for a in k.labels:
            for m in k.states:
                v = theta(k, a, m, den)
                if rule in ("R2", "T2"):
                    below = [v - Fraction(1, j) for j in range(1, grid_depth + 1) if v - Fraction(1, j) >= 0]
                    if all(m in denotation(k, L(a, r, phi), memo) for r in below) and \
                            m not in denotation(k, L(a, v, phi), memo):
                        return False
                elif rule == "T3":
                    above = [v + Fraction(1, j) for j in range(1, grid_depth + 1)]
                    if all(m in denotation(k, M(a, r, phi), memo) for r in above) and \
                            m not in denotation(k, M(a, v, phi), memo):
                        return False
                else:
                    if m in denotation(k, L(a, v + 1, phi), memo):
                        return False
    return True


# ---------------------------------------------------------------------------
# stored countermodels for the PML axioms

COUNTERMODELS = ("B2", "B3", "B4")


@dataclass(frozen=True)
class Countermodel:
    schema: str
    kernel: Kernel
    state: str
    formula: Formula
    params: dict


def load_countermodel(schema: str) -> Countermodel:
    if schema not in COUNTERMODELS:
        raise KeyError(f"no stored countermodel for {schema!r}")
    data = json.loads(resources.files("cml").joinpath("data", f"{schema.lower()}.json").read_text())
    model = json.loads(resources.files("cml").joinpath("data", data["modelFile"]).read_text())
    return Countermodel(data["schema"], kernel_from_json(model), data["state"],
                        parse(data["formula"]), data.get("params", {}))


def countermodel_paths(schema: str) -> tuple[str, str, str]:
    """``(model file, state, formula text)`` of a stored countermodel."""
    data = json.loads(resources.files("cml").joinpath("data", f"{schema.lower()}.json").read_text())
    return (str(resources.files("cml").joinpath("data", data["modelFile"])), data["state"],
            data["formula"])
