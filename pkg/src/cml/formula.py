"""Formula syntax for continuous Markovian logic.

Formulas are immutable trees built from ``Top``, ``Neg``, ``And`` and the two
rate modalities ``L`` ("rate at least r") and ``M`` ("rate at most r").
Derived connectives (falsum, disjunction, implication and the exact-rate
operator ``E``) are expanded into these five node types at construction time.

Nodes cache their hash so that large shared formula DAGs can be used as
dictionary keys without repeated deep traversals.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Sequence, Union

__all__ = [
    "Formula", "Top", "Neg", "And", "L", "M", "TOP", "BOT",
    "bot", "neg", "conj", "disj", "implies", "iff", "exact",
    "ParseError", "CapExceeded", "parse", "to_text",
    "ClosureSpec", "measures", "grid_rates", "uses_m",
    "GridAtom", "modal_grid", "Family", "enumerate_family",
    "subformulas", "size", "as_rational", "format_rational",
]

RationalLike = Union[Fraction, int, str]


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to an exact ``Fraction``; floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact rational {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.fullmatch(value.strip())
        if not m:
            raise ValueError(f"malformed rational {value!r}")
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise ValueError(f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise TypeError(f"cannot interpret {value!r} as a rational")


_RATIONAL_RE = re.compile(r"(-?\d+)(?:/(\d+))?")


def format_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


class Formula:
    """Base class of formula nodes."""

    __slots__ = ("_hash",)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {to_text(self)}>"

    def __hash__(self) -> int:
        return self._hash

    def __invert__(self) -> "Formula":
        return Neg(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return disj(self, other)

    @property
    def children(self) -> tuple["Formula", ...]:
        return ()


class Top(Formula):
    __slots__ = ()

    def __init__(self) -> None:
        self._hash = hash(("T",))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Top)

    __hash__ = Formula.__hash__

    def __reduce__(self):
        return (Top, ())


class Neg(Formula):
    __slots__ = ("sub",)

    def __init__(self, sub: Formula) -> None:
        if not isinstance(sub, Formula):
            raise TypeError(f"expected a Formula, got {sub!r}")
        self.sub = sub
        self._hash = hash(("~", sub._hash))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (isinstance(other, Neg) and self._hash == other._hash
                and self.sub == other.sub)

    @property
    def children(self) -> tuple[Formula, ...]:
        return (self.sub,)

    __hash__ = Formula.__hash__

    def __reduce__(self):
        return (Neg, (self.sub,))


class And(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula) -> None:
        if not isinstance(left, Formula) or not isinstance(right, Formula):
            raise TypeError("And expects two formulas")
        self.left = left
        self.right = right
        self._hash = hash(("&", left._hash, right._hash))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (isinstance(other, And) and self._hash == other._hash
                and self.left == other.left and self.right == other.right)

    @property
    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    __hash__ = Formula.__hash__

    def __reduce__(self):
        return (And, (self.left, self.right))


class _Modal(Formula):
    __slots__ = ("label", "rate", "sub")
    symbol = "?"

    def __init__(self, label: str, rate: RationalLike, sub: Formula) -> None:
        if not isinstance(label, str) or not _LABEL_RE.fullmatch(label):
            raise ValueError(f"invalid label {label!r}")
        rate = as_rational(rate)
        if rate < 0:
            raise ValueError(f"negative modal index {rate}")
        if not isinstance(sub, Formula):
            raise TypeError(f"expected a Formula, got {sub!r}")
        self.label = label
        self.rate = rate
        self.sub = sub
        self._hash = hash((self.symbol, label, rate, sub._hash))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (type(other) is type(self) and self._hash == other._hash
                and self.label == other.label and self.rate == other.rate
                and self.sub == other.sub)

    @property
    def children(self) -> tuple[Formula, ...]:
        return (self.sub,)

    __hash__ = Formula.__hash__

    def __reduce__(self):
        return (type(self), (self.label, self.rate, self.sub))


class L(_Modal):
    """``L[a,r] phi``: the a-rate into the states satisfying phi is at least r."""

    __slots__ = ()
    symbol = "L"


class M(_Modal):
    """``M[a,r] phi``: the a-rate into the states satisfying phi is at most r."""

    __slots__ = ()
    symbol = "M"


_LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

TOP: Formula = Top()
BOT: Formula = Neg(TOP)


def bot() -> Formula:
    return BOT


def neg(phi: Formula) -> Formula:
    return Neg(phi)


def conj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``T``."""
    items = list(formulas)
    if not items:
        return TOP
    return reduce(And, items)


def disj(*formulas: Formula) -> Formula:
    items = list(formulas[0]) if len(formulas) == 1 and not isinstance(formulas[0], Formula) else list(formulas)
    if not items:
        return BOT
    return Neg(conj(Neg(f) for f in items))


def implies(a: Formula, b: Formula) -> Formula:
    return Neg(And(a, Neg(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def exact(label: str, rate: RationalLike, sub: Formula) -> Formula:
    """Exact-rate operator, expanded as ``L[a,r] phi & M[a,r] phi``."""
    return And(L(label, rate, sub), M(label, rate, sub))


# ---------------------------------------------------------------------------
# traversal helpers

def subformulas(phi: Formula) -> Iterator[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: set[Formula] = set()
    stack: list[tuple[Formula, bool]] = [(phi, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            if node not in seen:
                seen.add(node)
                yield node
            continue
        if node in seen:
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            if child not in seen:
                stack.append((child, False))


def size(phi: Formula) -> int:
    """Number of nodes in the tree (shared subtrees counted with multiplicity)."""
    memo: dict[int, int] = {}

    def go(f: Formula) -> int:
        key = id(f)
        if key not in memo:
            memo[key] = 1 + sum(go(c) for c in f.children)
        return memo[key]

    return go(phi)


def uses_m(phi: Formula) -> bool:
    return any(isinstance(f, M) for f in subformulas(phi))


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    """Syntax error carrying a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<modal>[LME])\[
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[~&|(),\]/-])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = self._lex(text)
        self.i = 0

    def _where(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None) -> ParseError:
        if pos is None:
            pos = self.tokens[self.i].pos if self.i < len(self.tokens) else len(self.text)
        return ParseError(message, *self._where(pos))

    def _lex(self, text: str) -> list[_Token]:
        out: list[_Token] = []
        pos = 0
        while pos < len(text):
            if text[pos] == "\\":
                raise ParseError(f"unknown escape {text[pos:pos + 2]!r}", *self._where(pos))
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", *self._where(pos))
            kind = m.lastgroup
            if kind != "ws":
                if kind == "modal":
                    out.append(_Token("modal", m.group("modal"), pos))
                elif kind == "punct":
                    out.append(_Token(m.group(), m.group(), pos))
                else:
                    out.append(_Token(kind, m.group(), pos))
            pos = m.end()
        return out

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind: str) -> _Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            found = "end of input" if tok is None else repr(tok.text)
            raise self.error(f"expected {kind!r}, found {found}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if not self.tokens:
            raise self.error("empty formula", 0)
        phi = self.implication()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")
        return phi

    # precedence, loosest first: ->  |  &  unary
    def implication(self) -> Formula:
        left = self.disjunction()
        tok = self.peek()
        if tok is not None and tok.kind == "arrow":
            self.i += 1
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while (tok := self.peek()) is not None and tok.kind == "|":
            self.i += 1
            left = disj(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while (tok := self.peek()) is not None and tok.kind == "&":
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if tok.kind == "~":
            self.i += 1
            return Neg(self.unary())
        if tok.kind == "modal":
            self.i += 1
            label = self.take("ident").text
            self.take(",")
            rate = self.rational()
            self.take("]")
            sub = self.unary()
            if tok.text == "L":
                return L(label, rate, sub)
            if tok.text == "M":
                return M(label, rate, sub)
            return exact(label, rate, sub)
        if tok.kind == "(":
            self.i += 1
            inner = self.implication()
            self.take(")")
            return inner
        if tok.kind == "ident" and tok.text == "T":
            self.i += 1
            return TOP
        if tok.kind == "ident" and tok.text == "F":
            self.i += 1
            return BOT
        raise self.error(f"unexpected {tok.text!r}")

    def rational(self) -> Fraction:
        tok = self.peek()
        if tok is not None and tok.kind == "-":
            raise self.error("negative modal index")
        num = int(self.take("num").text)
        tok = self.peek()
        if tok is not None and tok.kind == "/":
            self.i += 1
            den_tok = self.take("num")
            den = int(den_tok.text)
            if den == 0:
                raise self.error("denominator must be positive", den_tok.pos)
            return Fraction(num, den)
        return Fraction(num)


def parse(text: str) -> Formula:
    """Parse the concrete syntax, e.g. ``"L[a,1/2] (T & ~M[b,1] T)"``.

    Raises :class:`ParseError` with the line and column of the offending token.
    """
    return _Parser(text).parse()


def to_text(phi: Formula) -> str:
    """Canonical text; ``parse(to_text(phi)) == phi`` for every formula."""
    memo: dict[int, str] = {}

    def go(f: Formula) -> str:
        key = id(f)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Top):
            s = "T"
        elif isinstance(f, Neg):
            s = "~" + go(f.sub)
        elif isinstance(f, And):
            s = f"({go(f.left)} & {go(f.right)})"
        elif isinstance(f, _Modal):
            s = f"{f.symbol}[{f.label},{format_rational(f.rate)}] {go(f.sub)}"
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[key] = s
        return s

    return go(phi)


# ---------------------------------------------------------------------------
# structural measures

@dataclass(frozen=True)
class ClosureSpec:
    """Granularity, index bound, modal depth and action set of a closure."""

    granularity: int = 1
    max_index: Fraction = Fraction(0)
    depth: int = 0
    actions: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.granularity < 1:
            raise ValueError("granularity must be positive")
        if self.depth < 0:
            raise ValueError("modal depth must be non-negative")
        object.__setattr__(self, "max_index", as_rational(self.max_index))
        object.__setattr__(self, "actions", frozenset(self.actions))
        if (self.max_index * self.granularity).denominator != 1:
            raise ValueError(f"max index {self.max_index} is not on the 1/{self.granularity} grid")

    @property
    def rates(self) -> list[Fraction]:
        return grid_rates(self)

    def contains(self, phi: Formula) -> bool:
        """Whether ``phi`` lies in the closure described by this spec."""
        for f in subformulas(phi):
            if isinstance(f, _Modal):
                if f.label not in self.actions or f.rate > self.max_index:
                    return False
                if (f.rate * self.granularity).denominator != 1:
                    return False
        return measures(phi).depth <= self.depth


def grid_rates(spec: ClosureSpec) -> list[Fraction]:
    """The indices ``0, 1/n, 2/n, ..., max``."""
    steps = int(spec.max_index * spec.granularity)
    return [Fraction(k, spec.granularity) for k in range(steps + 1)]


def measures(phi: Formula) -> ClosureSpec:
    """Granularity, upper bound, modal depth and actions of ``phi``.

    M-indices take part exactly like L-indices.  A formula without modalities
    gets granularity 1 and upper bound 0.
    """
    depth: dict[Formula, int] = {}
    dens: set[int] = set()
    top = Fraction(0)
    acts: set[str] = set()
    for f in subformulas(phi):
        if isinstance(f, Top):
            depth[f] = 0
        elif isinstance(f, Neg):
            depth[f] = depth[f.sub]
        elif isinstance(f, And):
            depth[f] = max(depth[f.left], depth[f.right])
        else:
            depth[f] = depth[f.sub] + 1
            dens.add(f.rate.denominator)
            top = max(top, f.rate)
            acts.add(f.label)
    n = reduce(math.lcm, dens, 1)
    return ClosureSpec(n, top, depth[phi], frozenset(acts))


# ---------------------------------------------------------------------------
# the modal grid of a closure

class CapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, what: str, size: int | str, cap: int) -> None:
        super().__init__(f"{what} has size {size}, exceeding the cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class GridAtom:
    """A modal atom ``X[a,r] chi`` of the closure grid at a given depth."""

    op: str
    label: str
    rate: Fraction
    chi: Formula
    depth: int

    @property
    def formula(self) -> Formula:
        return (L if self.op == "L" else M)(self.label, self.rate, self.chi)


def _row_formula(atoms: Sequence[Formula], row: int) -> Formula:
    return conj(a if (row >> i) & 1 else Neg(a) for i, a in enumerate(atoms))


def modal_grid(spec: ClosureSpec, with_m: bool = False, cap: int = 64) -> list[list[GridAtom]]:
    """Layered modal atoms of the closure, propositionally deduplicated.

    Layer 0 holds only ``T`` (returned as an empty atom list); layer ``d``
    holds ``X[a,r] chi`` for every action, every grid index and every
    Boolean function ``chi`` of the atoms of depth below ``d`` that really
    depends on a depth ``d-1`` atom.  Functions are identified by truth
    table, so each equivalence class appears once, represented in
    disjunctive normal form.
    """
    ops = ("L", "M") if with_m else ("L",)
    rates = grid_rates(spec)
    labels = sorted(spec.actions)
    layers: list[list[GridAtom]] = [[]]
    lower: list[Formula] = []
    for d in range(1, spec.depth + 1):
        prev_count = len(lower)
        new_count = len(layers[-1]) if d > 1 else 0
        if d == 1:
            chis: list[Formula] = [TOP]
        else:
            nrows = 1 << len(lower)
            if nrows > cap.bit_length() + 1:
                # more than 2**(nrows-1) functions depend on the newest layer
                raise CapExceeded(f"grid layer {d}", f"2^{nrows - 1}+", cap)
            nfuncs = 1 << nrows
            # functions independent of the newest layer already live lower
            per = len(labels) * len(rates) * len(ops)
            indep = 1 << (1 << (prev_count - new_count))
            count = (nfuncs - indep) * per
            if count > cap:
                raise CapExceeded(f"grid layer {d}", count, cap)
            chis = []
            newest_mask = ((1 << new_count) - 1) << (prev_count - new_count)
            for table in range(nfuncs):
                rows = [r for r in range(nrows) if (table >> r) & 1]
                depends = any(((table >> (r ^ bit)) & 1) != ((table >> r) & 1)
                              for r in range(nrows)
                              for bit in (1 << i for i in range(prev_count) if (newest_mask >> i) & 1))
                if not depends:
                    continue
                chis.append(disj(*[_row_formula(lower, r) for r in rows]))
        layer = [GridAtom(op, a, r, chi, d)
                 for chi in chis for a in labels for r in rates for op in ops]
        if len(layer) > cap:
            raise CapExceeded(f"grid layer {d}", len(layer), cap)
        layers.append(layer)
        lower = lower + [g.formula for g in layer]
    return layers


# ---------------------------------------------------------------------------
# formula families

@dataclass(frozen=True)
class Family:
    formulas: tuple[Formula, ...]
    truncated: bool
    descriptor: dict

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)


def enumerate_family(depth: int, spec: ClosureSpec, cap: int = 10_000,
                     with_m: bool = False) -> Family:
    """Deterministic finite family of formulas of modal depth at most ``depth``.

    Depth 0 is ``[T, ~T]``.  Each further depth adds ``X[a,r] chi`` and its
    negation for every ``chi`` already present, every action of ``spec`` and
    every index on its grid.  Order: by depth, then grid index, then canonical
    text.  At most ``cap`` formulas are returned; ``truncated`` reports a cut.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    ops = ("L", "M") if with_m else ("L",)
    rates = grid_rates(spec)
    labels = sorted(spec.actions)
    out: list[Formula] = [TOP, BOT]
    seen = set(out)
    frontier = list(out)
    truncated = False
    for _ in range(depth):
        layer: list[tuple[int, str, Formula]] = []
        for chi in frontier:
            for ri, r in enumerate(rates):
                for a in labels:
                    for op in ops:
                        atom = (L if op == "L" else M)(a, r, chi)
                        for f in (atom, Neg(atom)):
                            if f not in seen:
                                seen.add(f)
                                layer.append((ri, to_text(f), f))
        layer.sort(key=lambda t: (t[0], t[1]))
        frontier = [f for _, _, f in layer]
        out.extend(frontier)
        if len(out) > cap:
            break
    truncated = len(out) > cap
    out = out[:cap]
    descriptor = {
        "depth": depth,
        "granularity": spec.granularity,
        "maxIndex": format_rational(spec.max_index),
        "actions": labels,
        "withM": with_m,
        "cap": cap,
    }
    return Family(tuple(out), truncated, descriptor)

