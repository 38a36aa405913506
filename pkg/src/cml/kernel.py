"""Finite labelled rate kernels, processes and exact satisfaction."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .formula import (And, Formula, L, M, Neg, Top, as_rational, format_rational,
                      subformulas)

__all__ = [
    "Kernel", "Process", "ModelError", "UnknownStateError", "UnknownLabelError",
    "theta", "sat", "denotation", "disjoint_union",
    "load_model", "save_model", "kernel_from_json", "kernel_to_json",
]


class ModelError(ValueError):
    """Malformed kernel description."""


class UnknownStateError(KeyError):
    def __str__(self) -> str:
        return f"unknown state {self.args[0]!r}"


class UnknownLabelError(KeyError):
    def __str__(self) -> str:
        return f"unknown label {self.args[0]!r}"


class Kernel:
    """Finite state space with a sparse labelled rate function.

    ``rates[a][m][n]`` is the rate of an ``a``-transition from ``m`` to ``n``;
    absent entries are zero and zero entries are never stored.
    """

    __slots__ = ("states", "labels", "rates", "index", "_hash")

    def __init__(self, states: Iterable[str], labels: Iterable[str],
                 rates: Mapping[str, Mapping[str, Mapping[str, object]]] | None = None) -> None:
        states = tuple(states)
        if len(set(states)) != len(states):
            raise ModelError("duplicate state ids")
        for s in states:
            if not isinstance(s, str) or not s:
                raise ModelError(f"state ids must be non-empty strings, got {s!r}")
        labels = tuple(sorted(set(labels)))
        for a in labels:
            if not isinstance(a, str) or not a:
                raise ModelError(f"labels must be non-empty strings, got {a!r}")
        self.states = states
        self.labels = labels
        self.index = {s: i for i, s in enumerate(states)}
        table: dict[str, dict[str, dict[str, Fraction]]] = {a: {} for a in labels}
        for a, rows in (rates or {}).items():
            if a not in table:
                raise ModelError(f"rate table uses undeclared label {a!r}")
            for m, row in rows.items():
                if m not in self.index:
                    raise ModelError(f"rate table uses undeclared state {m!r}")
                for n, value in row.items():
                    if n not in self.index:
                        raise ModelError(f"rate table uses undeclared state {n!r}")
                    try:
                        r = as_rational(value)
                    except (TypeError, ValueError) as exc:
                        raise ModelError(f"malformed rate {value!r} for {a}:{m}->{n}") from exc
                    if r < 0:
                        raise ModelError(f"negative rate {format_rational(r)} for {a}:{m}->{n}")
                    if r:
                        table[a].setdefault(m, {})[n] = r
        self.rates = table
        self._hash = None

    def rate(self, a: str, m: str, n: str) -> Fraction:
        return self.rates[a].get(m, {}).get(n, Fraction(0))

    def successors(self, a: str, m: str) -> Mapping[str, Fraction]:
        return self.rates[a].get(m, {})

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Kernel) and self.states == other.states
                and self.labels == other.labels and self.rates == other.rates)

    def __hash__(self) -> int:
        if self._hash is None:
            items = tuple((a, m, n, r) for a in self.labels
                          for m, row in sorted(self.rates[a].items())
                          for n, r in sorted(row.items()))
            self._hash = hash((self.states, self.labels, items))
        return self._hash

    def __repr__(self) -> str:
        return f"Kernel(states={list(self.states)}, labels={list(self.labels)})"

    def process(self, state: str) -> "Process":
        return Process(self, state)


@dataclass(frozen=True)
class Process:
    kernel: Kernel
    state: str

    def __post_init__(self) -> None:
        if self.state not in self.kernel.index:
            raise UnknownStateError(self.state)


def _check_label(k: Kernel, a: str) -> None:
    if a not in k.rates:
        raise UnknownLabelError(a)


def theta(k: Kernel, a: str, m: str, targets: Iterable[str]) -> Fraction:
    """Total ``a``-rate from ``m`` into the set ``targets``."""
    _check_label(k, a)
    if m not in k.index:
        raise UnknownStateError(m)
    targets = set(targets)
    for n in targets:
        if n not in k.index:
            raise UnknownStateError(n)
    row = k.successors(a, m)
    return sum((r for n, r in row.items() if n in targets), Fraction(0))


def denotation(k: Kernel, phi: Formula, memo: dict | None = None) -> frozenset[str]:
    """Set of states satisfying ``phi``, computed bottom-up over subformulas."""
    memo = {} if memo is None else memo
    everything = frozenset(k.states)
    for f in subformulas(phi):
        if f in memo:
            continue
        if isinstance(f, Top):
            memo[f] = everything
        elif isinstance(f, Neg):
            memo[f] = everything - memo[f.sub]
        elif isinstance(f, And):
            memo[f] = memo[f.left] & memo[f.right]
        else:
            _check_label(k, f.label)
            inner = memo[f.sub]
            table = k.rates[f.label]
            out = []
            for m in k.states:
                total = sum((r for n, r in table.get(m, {}).items() if n in inner), Fraction(0))
                if (total >= f.rate) if isinstance(f, L) else (total <= f.rate):
                    out.append(m)
            memo[f] = frozenset(out)
    return memo[phi]


def sat(p: Process, phi: Formula) -> bool:
    return p.state in denotation(p.kernel, phi)


def disjoint_union(k1: Kernel, k2: Kernel) -> Kernel:
    """Union with state ids prefixed by ``0:`` and ``1:``; no cross rates."""
    states = [f"0:{s}" for s in k1.states] + [f"1:{s}" for s in k2.states]
    labels = set(k1.labels) | set(k2.labels)
    rates: dict[str, dict[str, dict[str, Fraction]]] = {a: {} for a in labels}
    for tag, k in (("0", k1), ("1", k2)):
        for a, rows in k.rates.items():
            for m, row in rows.items():
                rates[a][f"{tag}:{m}"] = {f"{tag}:{n}": r for n, r in row.items()}
    return Kernel(states, labels, rates)


# ---------------------------------------------------------------------------
# JSON

_KEYS = {"states", "labels", "rates"}


def kernel_from_json(data: object) -> Kernel:
    if not isinstance(data, dict):
        raise ModelError("model must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise ModelError(f"unknown keys {sorted(unknown)}")
    missing = {"states", "labels"} - set(data)
    if missing:
        raise ModelError(f"missing keys {sorted(missing)}")
    states, labels, rates = data["states"], data["labels"], data.get("rates", {})
    if not isinstance(states, list) or not isinstance(labels, list):
        raise ModelError("states and labels must be lists")
    if not isinstance(rates, dict):
        raise ModelError("rates must be an object")
    for a, rows in rates.items():
        if not isinstance(rows, dict) or not all(isinstance(r, dict) for r in rows.values()):
            raise ModelError(f"rates for label {a!r} must be nested objects")
        for row in rows.values():
            for v in row.values():
                if isinstance(v, (bool, float)) or not isinstance(v, (int, str)):
                    raise ModelError(f"malformed rational {v!r}")
    return Kernel(states, labels, rates)


def kernel_to_json(k: Kernel) -> dict:
    rates = {}
    for a in k.labels:
        rows = {m: {n: format_rational(r) for n, r in sorted(row.items(), key=lambda t: k.index[t[0]])}
                for m, row in sorted(k.rates[a].items(), key=lambda t: k.index[t[0]])}
        if rows:
            rates[a] = rows
    return {"states": list(k.states), "labels": list(k.labels), "rates": rates}


def load_model(path: str | os.PathLike) -> Kernel:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON ({exc})") from exc
    return kernel_from_json(data)


def save_model(k: Kernel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(kernel_to_json(k), fh, indent=2)
        fh.write("\n")
