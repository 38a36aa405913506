from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cml import engine
from cml.bisim import (bisim_classes, bisimilar, distinguishing_formula, refine,
                       simplest_between)
from cml.formula import ClosureSpec, L, TOP, enumerate_family
from cml.kernel import Kernel, Process, UnknownStateError, sat

from conftest import kernels
from oracles import largest_bisimulation, simplest_between_brute

GRID = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2)]


def test_symmetric_loops_merge():
    k = Kernel(["x", "y"], ["a"], {"a": {"x": {"x": 1}, "y": {"y": 1}}})
    assert bisim_classes(k) == [frozenset({"x", "y"})]


def test_k1_classes(k1):
    assert bisim_classes(k1) == [frozenset({"s0"}), frozenset({"s1"})]


def test_single_state():
    assert bisim_classes(Kernel(["x"], ["a"])) == [frozenset({"x"})]


def test_bisimilar_examples(k1):
    assert bisimilar(Process(k1, "s0"), Process(k1, "s0"))
    assert not bisimilar(Process(k1, "s0"), Process(k1, "s1"))
    c1 = Kernel(["r", "t"], ["a"], {"a": {"r": {"t": Fraction(1, 2)}}})
    c2 = Kernel(["r", "t"], ["a"], {"a": {"r": {"t": Fraction(1, 3)}}})
    assert not bisimilar(Process(c1, "r"), Process(c2, "r"))


def test_distinguishing_k1(k1):
    phi = distinguishing_formula(Process(k1, "s0"), Process(k1, "s1"))
    assert phi == L("a", 1, TOP)
    assert distinguishing_formula(Process(k1, "s0"), Process(k1, "s0")) is None


def test_unknown_state(k1):
    with pytest.raises(UnknownStateError):
        refine(k1).block_of("nope")


@given(kernels(labels=("a", "b"), rates=GRID))
def test_matches_brute_force(k):
    assert bisim_classes(k) == largest_bisimulation(k)


@given(kernels(rates=GRID))
def test_characteristic_formulas(k):
    ref = refine(k)
    ev = engine.evaluate(k, ref.chars)
    for block, chi in zip(ref.blocks, ref.chars):
        assert ev.denotation(chi) == block
    assert len(ref.splits) <= max(len(k.states) - 1, 0)


@given(kernels(max_states=3, rates=GRID), kernels(max_states=3, rates=GRID), st.data())
def test_distinguishing_formula_separates(k, k2, data):
    p1 = Process(k, data.draw(st.sampled_from(k.states)))
    p2 = Process(k2, data.draw(st.sampled_from(k2.states)))
    phi = distinguishing_formula(p1, p2)
    assert (phi is None) == bisimilar(p1, p2)
    if phi is not None:
        assert sat(p1, phi) != sat(p2, phi)


@given(kernels(labels=("a",), max_states=3, rates=GRID), st.data())
def test_bisimilar_states_agree_on_family(k, data):
    m, n = data.draw(st.sampled_from(k.states)), data.draw(st.sampled_from(k.states))
    if not bisimilar(Process(k, m), Process(k, n)):
        return
    fam = enumerate_family(3, ClosureSpec(2, 2, 3, frozenset({"a"})), cap=3000)
    ev = engine.evaluate(k, list(fam))
    for phi in fam:
        assert ev.holds(phi, m) == ev.holds(phi, n)


@given(st.fractions(min_value=0, max_value=4), st.fractions(min_value=0, max_value=4))
def test_simplest_between(a, b):
    if a == b:
        return
    a, b = min(a, b), max(a, b)
    if (b - a) < Fraction(1, 400):
        b = a + Fraction(1, 400)
    r = simplest_between(a, b)
    assert a < r < b
    assert r == simplest_between_brute(a, b)


def test_simplest_between_examples():
    assert simplest_between(Fraction(0), Fraction(3, 2)) == 1
    assert simplest_between(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)
    with pytest.raises(ValueError):
        simplest_between(Fraction(1), Fraction(1))
