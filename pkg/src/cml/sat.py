"""Satisfiability and finite-model synthesis.

The closure of a formula is represented by *types*.  A type of depth ``d``
records, for every label and every grid set ``chi`` of depth-``(d-1)``
types, which interval of the index grid the rate into ``chi`` falls in.
Types are built layer by layer: a candidate extension of a type is kept
only when an exact LP finds rates into the lower types that realise every
interval it prescribes.  Constraints for different labels never interact,
so the search runs per label over *label histories* and types are their
products.

The types of full depth become the states of a finite kernel; each state
sends its witness rates to one representative of every lower type.  The
Truth Lemma is then checked directly by model checking the kernel.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import engine
from .formula import (TOP, And, CapExceeded, ClosureSpec, Formula, L, M, Neg, Top,
                      conj, disj, enumerate_family, format_rational, grid_rates, measures,
                      subformulas, uses_m)
from .kernel import Kernel, Process
from .lp import Constraint, solve_strict

__all__ = [
    "Caps", "ClosureError", "Unsatisfiable", "TruthLemmaViolation",
    "Synthesis", "FiniteModel", "Atom", "synthesize", "enumerate_atoms", "rate_feasible",
    "satisfiable", "synthesize_model", "consistent", "cell_of", "cell_text",
    "synthesize_focused", "decide", "Entry",
]


@dataclass(frozen=True)
class Caps:
    grid_atoms: int = 64
    atoms: int = 4096


class ClosureError(ValueError):
    """A formula falls outside the closure a synthesis was built for."""


class Unsatisfiable(ValueError):
    pass


class TruthLemmaViolation(AssertionError):
    pass


# ---------------------------------------------------------------------------
# cells: which grid interval a rate lies in
#
# Without M the cells of a grid g_0 < ... < g_K are [g_i, g_{i+1}) and
# [g_K, inf), coded i.  With M they are the points {g_i} (code 2i), the open
# gaps (g_i, g_{i+1}) (code 2i+1) and (g_K, inf) (code 2K+1).

def n_cells(grid: Sequence[Fraction], with_m: bool) -> int:
    return 2 * len(grid) if with_m else len(grid)


def cell_of(value: Fraction, grid: Sequence[Fraction], with_m: bool) -> int:
    i = max(j for j, g in enumerate(grid) if g <= value)
    if not with_m:
        return i
    return 2 * i if grid[i] == value else 2 * i + 1


def cell_bounds(code: int, grid: Sequence[Fraction], with_m: bool):
    """``[(sense, value), ...]`` describing the cell as linear constraints."""
    K = len(grid) - 1
    if not with_m:
        out = [(">=", grid[code])] if code > 0 else []
        if code < K:
            out.append(("<", grid[code + 1]))
        return out
    i, odd = divmod(code, 2)
    if not odd:
        return [("==", grid[i])]
    out = [(">", grid[i])]
    if i < K:
        out.append(("<", grid[i + 1]))
    return out


def cell_holds(code: int, op: str, j: int, with_m: bool) -> bool:
    """Truth of ``L[a,g_j]`` (op ``"L"``) or ``M[a,g_j]`` in a cell."""
    if not with_m:
        if op != "L":
            raise ClosureError("M modality outside an L-only closure")
        return j <= code
    return 2 * j <= code if op == "L" else code <= 2 * j


def cell_text(code: int, grid: Sequence[Fraction], with_m: bool) -> str:
    K = len(grid) - 1
    f = format_rational
    if not with_m:
        return f"[{f(grid[code])}, {f(grid[code + 1])})" if code < K else f"[{f(grid[code])}, inf)"
    i, odd = divmod(code, 2)
    if not odd:
        return f"{{{f(grid[i])}}}"
    return f"({f(grid[i])}, {f(grid[i + 1])})" if i < K else f"({f(grid[i])}, inf)"


# ---------------------------------------------------------------------------
# synthesis

def _modal_depths(phi: Formula) -> dict[Formula, int]:
    depth: dict[Formula, int] = {}
    for f in subformulas(phi):
        if isinstance(f, Top):
            depth[f] = 0
        elif isinstance(f, Neg):
            depth[f] = depth[f.sub]
        elif isinstance(f, And):
            depth[f] = max(depth[f.left], depth[f.right])
        else:
            depth[f] = depth[f.sub] + 1
    return depth


@dataclass
class History:
    """Cells of one label along layers 1..d, with a realising rate vector."""

    parent: int
    cells: tuple[int, ...]
    witness: dict[int, Fraction]  # depth-(d-1) type id -> rate


@dataclass(frozen=True)
class Entry:
    """A layer coordinate: the rate of ``label`` into the lower types ``chi``."""

    label: str
    chi: frozenset[int]
    grid: tuple[Fraction, ...]
    formula: Formula | None = None


@dataclass
class Atom:
    """A type of full depth, i.e. a state of the synthesized model."""

    id: str
    index: int
    type: tuple[int, ...]
    synthesis: "Synthesis" = field(repr=False)

    def valuation(self) -> dict[Formula, bool]:
        return self.synthesis.valuation(self.index)


class Synthesis:
    """Layered types of a closure together with their LP witnesses.

    With ``focus`` unset the layers range over the whole closure grid.  With
    a focus formula they only carry the coordinates its own modal
    subformulas need, which keeps deep formulas tractable.
    """

    def __init__(self, spec: ClosureSpec, with_m: bool = False, caps: Caps = Caps(),
                 focus: Formula | None = None) -> None:
        self.spec = spec
        self.with_m = with_m
        self.caps = caps
        self.focus = focus
        self.grid = tuple(grid_rates(spec))
        self.labels = sorted(spec.actions)
        self.ops = ("L", "M") if with_m else ("L",)
        self.lp_calls = 0
        root = tuple(0 for _ in self.labels)
        # types[d] lists tuples holding one history index per label
        self.types: list[list[tuple[int, ...]]] = [[root]]
        self.type_ix: list[dict[tuple[int, ...], int]] = [{root: 0}]
        self.parent: list[list[int]] = [[-1]]
        self.children: list[list[list[int]]] = []
        self.hist: list[dict[str, list[History]]] = [{a: [History(-1, (), {})] for a in self.labels}]
        self.entries: list[list[Entry]] = [[]]
        self.by_label: list[dict[str, list[int]]] = [{a: [] for a in self.labels}]
        self.entry_ix: list[dict[tuple[str, frozenset[int]], list[int]]] = [{}]
        self._chars: dict[tuple[int, int], Formula] = {}
        self._sets: dict[tuple[Formula, int], frozenset[int]] = {}
        self._model: FiniteModel | None = None
        if focus is not None:
            self._focus_depth = {f: d for f, d in _modal_depths(focus).items()}
        for d in range(1, spec.depth + 1):
            self._build_layer(d)

    # -- structure -----------------------------------------------------------

    def ancestor(self, d: int, t: int, e: int) -> int:
        while d > e:
            t = self.parent[d][t]
            d -= 1
        return t

    def _descendants(self, e: int, s: frozenset[int], d: int) -> frozenset[int]:
        while e < d:
            s = frozenset(c for r in s for c in self.children[e][r])
            e += 1
        return s

    def _grid_entries(self, d: int) -> list[Entry]:
        if d == 1:
            chis = [frozenset([0])]
        else:
            lower = len(self.types[d - 1])
            fibers = self.children[d - 2]
            count = (1 << lower) - (1 << len(self.types[d - 2]))
            grid_count = count * len(self.labels) * len(self.grid) * len(self.ops)
            if grid_count > self.caps.grid_atoms:
                raise CapExceeded(f"grid layer {d}", grid_count, self.caps.grid_atoms)
            chis = []
            for mask in range(1, 1 << lower):
                s = frozenset(i for i in range(lower) if (mask >> i) & 1)
                proj = {self.parent[d - 1][i] for i in s}
                # unions of whole fibers are already expressible one layer down
                if sum(len(fibers[r]) for r in proj) != len(s):
                    chis.append(s)
        return [Entry(a, chi, self.grid) for chi in chis for a in self.labels]

    def _focus_entries(self, d: int) -> list[Entry]:
        grids: dict[tuple[str, frozenset[int]], set[Fraction]] = {}
        reps: dict[tuple[str, frozenset[int]], Formula] = {}
        for f, depth in self._focus_depth.items():
            if depth != d or not isinstance(f, (L, M)):
                continue
            s = self.types_satisfying(f.sub, d - 1)
            if not s:
                continue
            key = (f.label, s)
            grids.setdefault(key, {Fraction(0)}).add(f.rate)
            reps.setdefault(key, f.sub)
        return [Entry(a, s, tuple(sorted(grids[(a, s)])), reps[(a, s)])
                for (a, s) in sorted(grids, key=lambda k: (k[0], sorted(k[1])))]

    def _build_layer(self, d: int) -> None:
        entries = self._focus_entries(d) if self.focus is not None else self._grid_entries(d)
        grid_count = sum(len(e.grid) for e in entries) * len(self.ops)
        if grid_count > self.caps.grid_atoms:
            raise CapExceeded(f"grid layer {d}", grid_count, self.caps.grid_atoms)
        self.entries.append(entries)
        by_label: dict[str, list[int]] = {a: [] for a in self.labels}
        index: dict[tuple[str, frozenset[int]], list[int]] = {}
        for i, e in enumerate(entries):
            by_label[e.label].append(i)
            index.setdefault((e.label, e.chi), []).append(i)
        self.by_label.append(by_label)
        self.entry_ix.append(index)
        layer: dict[str, list[History]] = {}
        for a in self.labels:
            out: list[History] = []
            for hi, h in enumerate(self.hist[d - 1][a]):
                self._extend(d, a, hi, h, out)
            layer[a] = out
        self.hist.append(layer)
        total = math.prod(len(layer[a]) for a in self.labels) if self.labels else 1
        if total > self.caps.atoms:
            raise CapExceeded(f"types of depth {d}", total, self.caps.atoms)
        types = list(itertools.product(*(range(len(layer[a])) for a in self.labels)))
        self.types.append(types)
        self.type_ix.append({t: i for i, t in enumerate(types)})
        self.parent.append([self.type_ix[d - 1][tuple(layer[a][hi].parent for a, hi in zip(self.labels, t))]
                            for t in types])
        kids: list[list[int]] = [[] for _ in self.types[d - 1]]
        for i, p in enumerate(self.parent[d]):
            kids[p].append(i)
        self.children.append(kids)

    def _sum_coeffs(self, d: int, e: int, chi: frozenset[int]) -> dict[int, int]:
        """Variables (depth-(d-1) types) whose depth-(e-1) ancestor lies in chi."""
        return {s: 1 for s in range(len(self.types[d - 1]))
                if self.ancestor(d - 1, s, e - 1) in chi}

    def _history_constraints(self, d: int, a: str, hi: int) -> list[Constraint]:
        """Constraints of a label-a history of depth d-1, over depth-(d-1) types."""
        cons: list[Constraint] = []
        e = d - 1
        while e >= 1:
            h = self.hist[e][a][hi]
            for ei, code in zip(self.by_label[e][a], h.cells):
                entry = self.entries[e][ei]
                coeffs = self._sum_coeffs(d, e, entry.chi)
                for sense, v in cell_bounds(code, entry.grid, self.with_m):
                    cons.append(Constraint(coeffs, sense, v))
            hi = h.parent
            e -= 1
        return cons

    def _lift(self, d: int, witness: dict[int, Fraction]) -> dict[int, Fraction]:
        """Push a rate vector over depth-(d-2) types onto first children."""
        if d == 1:
            return {}
        kids = self.children[d - 2]
        return {kids[r][0]: v for r, v in witness.items() if v}

    def _extend(self, d: int, a: str, hi: int, h: History, out: list[History]) -> None:
        nvars = len(self.types[d - 1])
        entries = [self.entries[d][i] for i in self.by_label[d][a]]
        base = self._history_constraints(d, a, hi) if d > 1 else []
        start = self._lift(d, h.witness)
        coeff_rows = [self._sum_coeffs(d, d, e.chi) for e in entries]

        def rec(i: int, cons: list[Constraint], cells: tuple[int, ...], w: dict[int, Fraction]):
            if i == len(entries):
                out.append(History(hi, cells, dict(w)))
                return
            coeffs, grid = coeff_rows[i], entries[i].grid
            # the current witness already fixes one cell; only the others need an LP
            mine = cell_of(sum((w.get(s, Fraction(0)) for s in coeffs), Fraction(0)),
                           grid, self.with_m)
            for code in range(n_cells(grid, self.with_m)):
                extra = [Constraint(coeffs, sense, v)
                         for sense, v in cell_bounds(code, grid, self.with_m)]
                if code == mine:
                    rec(i + 1, cons + extra, cells + (code,), w)
                    continue
                self.lp_calls += 1
                res = solve_strict(nvars, cons + extra)
                if res.feasible:
                    w2 = {s: v for s, v in enumerate(res.x) if v}
                    rec(i + 1, cons + extra, cells + (code,), w2)

        rec(0, base, (), start)

    # -- characteristic formulas ----------------------------------------------

    def chi_formula(self, d: int, chi: frozenset[int]) -> Formula:
        """Formula for a set of depth-``d`` types (a layer ``d+1`` grid set)."""
        if d == 0:
            return TOP
        return disj(*[self.char(d, s) for s in sorted(chi)])

    def entry_formula(self, d: int, entry: Entry) -> Formula:
        return entry.formula if entry.formula is not None else self.chi_formula(d - 1, entry.chi)

    def cell_literals(self, d: int, entry: Entry, code: int) -> list[Formula]:
        f = self.entry_formula(d, entry)
        a = entry.label
        out = []
        for sense, v in cell_bounds(code, entry.grid, self.with_m):
            if sense == ">=":
                out.append(L(a, v, f))
            elif sense == "<":
                out.append(Neg(L(a, v, f)))
            elif sense == "==":
                out += [L(a, v, f), M(a, v, f)]
            else:
                out.append(Neg(M(a, v, f)))
        return out

    def char(self, d: int, t: int) -> Formula:
        """A formula holding exactly at the states whose depth-``d`` type is ``t``."""
        key = (d, t)
        hit = self._chars.get(key)
        if hit is not None:
            return hit
        if d == 0:
            f = TOP
        else:
            lits = []
            for a, hi in zip(self.labels, self.types[d][t]):
                for ei, code in zip(self.by_label[d][a], self.hist[d][a][hi].cells):
                    lits += self.cell_literals(d, self.entries[d][ei], code)
            f = conj(lits)
            if d > 1:
                f = And(self.char(d - 1, self.parent[d][t]), f)
        self._chars[key] = f
        return f

    def grid_atoms(self) -> list[tuple[int, str, Entry, int, Formula]]:
        """``(layer, op, entry, grid index, formula)`` for every grid atom."""
        out = []
        for d in range(1, self.spec.depth + 1):
            for entry in self.entries[d]:
                f = self.entry_formula(d, entry)
                for j, r in enumerate(entry.grid):
                    for op in self.ops:
                        out.append((d, op, entry, j, (L if op == "L" else M)(entry.label, r, f)))
        return out

    # -- evaluation on types ----------------------------------------------------

    def _canonical(self, d: int, s: frozenset[int]) -> tuple[int, frozenset[int]]:
        while d > 0 and s:
            proj = frozenset(self.parent[d][i] for i in s)
            if sum(len(self.children[d - 1][r]) for r in proj) != len(s):
                break
            s, d = proj, d - 1
        return d, s

    def _locate(self, label: str, rate: Fraction, d: int, inner: frozenset[int]):
        """Find the layer and entry recording the ``label``-rate into ``inner``."""
        e, chi = self._canonical(d, inner)
        for layer in range(e + 1, len(self.entries)):
            lifted = self._descendants(e, chi, layer - 1)
            for ei in self.entry_ix[layer].get((label, lifted), ()):
                entry = self.entries[layer][ei]
                if rate in entry.grid:
                    return layer, ei, entry.grid.index(rate)
        return None

    def types_satisfying(self, phi: Formula, d: int | None = None) -> frozenset[int]:
        """Ids of depth-``d`` types at which ``phi`` holds (default: full depth)."""
        d = len(self.types) - 1 if d is None else d
        key = (phi, d)
        hit = self._sets.get(key)
        if hit is not None:
            return hit
        everything = frozenset(range(len(self.types[d])))
        if isinstance(phi, Top):
            out = everything
        elif isinstance(phi, Neg):
            out = everything - self.types_satisfying(phi.sub, d)
        elif isinstance(phi, And):
            out = self.types_satisfying(phi.left, d) & self.types_satisfying(phi.right, d)
        else:
            op = "L" if isinstance(phi, L) else "M"
            if op == "M" and not self.with_m:
                raise ClosureError(f"M modality outside an L-only closure: {phi}")
            if phi.label not in self.spec.actions:
                raise ClosureError(f"label {phi.label!r} outside the closure")
            if d == 0:
                raise ClosureError(f"modal depth exceeds the closure: {phi}")
            inner = self.types_satisfying(phi.sub, d - 1)
            if not inner:
                holds = phi.rate == 0 if op == "L" else True
                out = everything if holds else frozenset()
            else:
                found = self._locate(phi.label, phi.rate, d - 1, inner)
                if found is None or found[0] > d:
                    raise ClosureError(f"{phi} is outside the closure")
                layer, ei, j = found
                pos = self.by_label[layer][phi.label].index(ei)
                ai = self.labels.index(phi.label)
                keep = []
                for t in range(len(self.types[d])):
                    anc = self.ancestor(d, t, layer)
                    code = self.hist[layer][phi.label][self.types[layer][anc][ai]].cells[pos]
                    if cell_holds(code, op, j, self.with_m):
                        keep.append(t)
                out = frozenset(keep)
        self._sets[key] = out
        return out

    def valuation(self, t: int) -> dict[Formula, bool]:
        d = self.spec.depth
        return {f: t in self.types_satisfying(f, d) for *_, f in self.grid_atoms()}

    # -- model ------------------------------------------------------------------

    def model(self) -> "FiniteModel":
        if self._model is None:
            self._model = self._make_model()
        return self._model

    def _make_model(self) -> "FiniteModel":
        d = self.spec.depth
        top = self.types[d]
        names = [f"t{i}" for i in range(len(top))]
        rates: dict[str, dict[str, dict[str, Fraction]]] = {a: {} for a in self.labels}
        witness_dens = [self.spec.granularity]
        if d > 0:
            # representative of each depth-(d-1) type: its first extension
            rep = {}
            for i in range(len(top)):
                rep.setdefault(self.parent[d][i], i)
            for i, t in enumerate(top):
                for a, hi in zip(self.labels, t):
                    row = {names[rep[s]]: v for s, v in self.hist[d][a][hi].witness.items() if v}
                    witness_dens += [v.denominator for v in row.values()]
                    if row:
                        rates[a][names[i]] = row
        k = Kernel(names, self.labels, rates)
        p = math.lcm(*witness_dens)
        atoms = [Atom(names[i], i, t, self) for i, t in enumerate(top)]
        return FiniteModel(k, p, atoms, self)

    def check_truth_lemma(self, extra: Iterable[Formula] = (), family_cap: int = 0) -> int:
        """Model-check every grid atom (plus ``extra``) at every state.

        Compares against the valuation read off the types; raises
        :class:`TruthLemmaViolation` on the first mismatch.  Returns the
        number of (formula, state) pairs checked.
        """
        fm = self.model()
        d = self.spec.depth
        formulas = [f for *_, f in self.grid_atoms()] + list(extra)
        if family_cap and self.focus is None:
            formulas += list(enumerate_family(d, self.spec, cap=family_cap, with_m=self.with_m))
        chars = [self.char(d, i) for i in range(len(self.types[d]))] if d else []
        ev = engine.evaluate(fm.kernel, formulas + chars)
        checked = 0
        for f in formulas:
            expected = self.types_satisfying(f, d)
            for i, g in enumerate(ev.truth(f)):
                if g != (i in expected):
                    raise TruthLemmaViolation(
                        f"state {fm.kernel.states[i]}: model says {g} for {f}")
                checked += 1
        for i, f in enumerate(chars):
            if ev.denotation(f) != {fm.kernel.states[i]}:
                raise TruthLemmaViolation(f"characteristic formula of t{i} is not sharp")
        return checked


@dataclass
class FiniteModel:
    kernel: Kernel
    parameter: int
    atoms: list[Atom]
    synthesis: Synthesis = field(repr=False)

    @property
    def spec(self) -> ClosureSpec:
        return self.synthesis.spec

    def process(self, atom: Atom | int | str) -> Process:
        if isinstance(atom, Atom):
            return Process(self.kernel, atom.id)
        if isinstance(atom, int):
            return Process(self.kernel, self.atoms[atom].id)
        return Process(self.kernel, atom)

    def witness_rates(self) -> dict[str, dict[str, dict[str, Fraction]]]:
        return {a: {m: dict(row) for m, row in rows.items()} for a, rows in self.kernel.rates.items()}

    def atom_table(self) -> dict[str, list[dict]]:
        """Per atom, the grid interval of every layer cell, for reports."""
        syn = self.synthesis
        d = syn.spec.depth
        out = {}
        for atom in self.atoms:
            rows = []
            for layer in range(1, d + 1):
                anc = syn.ancestor(d, atom.index, layer)
                for a, hi in zip(syn.labels, syn.types[layer][anc]):
                    for ei, code in zip(syn.by_label[layer][a], syn.hist[layer][a][hi].cells):
                        entry = syn.entries[layer][ei]
                        rows.append({"layer": layer, "label": a,
                                     "chi": [f"d{layer - 1}.{s}" for s in sorted(entry.chi)],
                                     "cell": cell_text(code, entry.grid, syn.with_m)})
            out[atom.id] = rows
        return out


_CACHE: dict[tuple, Synthesis] = {}


def _cached(key, build) -> Synthesis:
    syn = _CACHE.get(key)
    if syn is None:
        syn = build()
        if len(_CACHE) > 256:
            _CACHE.clear()
        _CACHE[key] = syn
    return syn


def synthesize(spec: ClosureSpec, with_m: bool = False, caps: Caps = Caps()) -> Synthesis:
    """Build (or fetch from cache) the layered types of a whole closure."""
    return _cached((spec, with_m, caps), lambda: Synthesis(spec, with_m, caps))


def synthesize_focused(phi: Formula, caps: Caps = Caps()) -> Synthesis:
    """Types carrying only the coordinates needed to evaluate ``phi``."""
    spec, with_m = measures(phi), uses_m(phi)
    return _cached(("focus", phi, caps), lambda: Synthesis(spec, with_m, caps, focus=phi))


def enumerate_atoms(spec: ClosureSpec, with_m: bool = False, caps: Caps = Caps()) -> list[Atom]:
    return synthesize(spec, with_m, caps).model().atoms


def rate_feasible(atom: Atom) -> dict[str, dict[str, Fraction]] | None:
    """Witness rates (label -> target atom -> rate) realising ``atom``."""
    fm = atom.synthesis.model()
    return {a: dict(fm.kernel.successors(a, atom.id)) for a in fm.kernel.labels}


def decide(phi: Formula, caps: Caps = Caps()) -> tuple[Synthesis, frozenset[int]]:
    """Types of the closure of ``phi`` satisfying it.

    Only the coordinates ``phi`` itself needs are searched; the verdict is
    the same as over the whole closure, which is usually far larger.
    """
    syn = synthesize_focused(phi, caps)
    return syn, syn.types_satisfying(phi)


def satisfiable(phi: Formula, caps: Caps = Caps()) -> Process | None:
    """A state of a synthesized finite model satisfying ``phi``, or None."""
    syn, hits = decide(phi, caps)
    if not hits:
        return None
    fm = syn.model()
    p = _reachable(fm.process(min(hits)))
    ev = engine.evaluate(p.kernel, [phi])
    if not ev.holds(phi, p.state):
        raise TruthLemmaViolation(f"witness {p.state} does not satisfy {phi}")
    return p


def _reachable(p: Process) -> Process:
    """Restrict ``p`` to the states it can reach; satisfaction is unchanged."""
    k = p.kernel
    seen, stack = {p.state}, [p.state]
    while stack:
        m = stack.pop()
        for a in k.labels:
            for n in k.successors(a, m):
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
    states = [s for s in k.states if s in seen]
    rates = {a: {m: dict(row) for m, row in k.rates[a].items() if m in seen} for a in k.labels}
    return Process(Kernel(states, k.labels, rates), p.state)


def synthesize_model(psi: Formula, caps: Caps = Caps(), verify: bool = True,
                     family_cap: int = 0) -> FiniteModel:
    """The finite model over the closure of ``psi``, Truth-Lemma checked."""
    syn = synthesize(measures(psi), uses_m(psi), caps)
    if not syn.types_satisfying(psi):
        raise Unsatisfiable(f"unsatisfiable: {psi}")
    if verify:
        syn.check_truth_lemma(extra=list(subformulas(psi)), family_cap=family_cap)
    return syn.model()


def consistent(gamma: Iterable[Formula], caps: Caps = Caps()) -> bool:
    return satisfiable(conj(list(gamma)), caps) is not None
