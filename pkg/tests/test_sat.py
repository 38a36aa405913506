import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cml import sat
from cml.formula import (BOT, TOP, CapExceeded, ClosureSpec, L, M, Neg, measures, parse,
                         subformulas)
from cml.kernel import denotation
from cml.kernel import sat as holds

from conftest import formulas

SMALL = [Fraction(0), Fraction(1, 2), Fraction(1)]


def test_exact_rate_sat():
    w = sat.satisfiable(parse("E[a,1] T"))
    assert w is not None and holds(w, parse("E[a,1] T"))


@pytest.mark.parametrize("text", ["L[a,2] T & M[a,1] T", "L[a,1] L[b,1] T & M[a,0] T",
                                  "L[a,1] T & M[a,0] T", "L[a,1/2] F", "~L[a,0] T"])
def test_unsat(text):
    assert sat.satisfiable(parse(text)) is None


@pytest.mark.parametrize("r", [Fraction(1, 7), Fraction(1), Fraction(5, 2)])
def test_no_rate_into_empty_set(r):
    assert sat.satisfiable(L("a", r, BOT)) is None


def test_enumerate_atoms_l_only():
    atoms = sat.enumerate_atoms(ClosureSpec(1, 1, 1, frozenset({"a"})))
    assert len(atoms) == 2
    vals = [a.valuation() for a in atoms]
    assert all(v[L("a", 0, TOP)] for v in vals)
    assert {v[L("a", 1, TOP)] for v in vals} == {True, False}


def test_enumerate_atoms_prunes_c3():
    atoms = sat.enumerate_atoms(ClosureSpec(1, 1, 1, frozenset({"a"})), with_m=True)
    for a in atoms:
        v = a.valuation()
        assert v[L("a", 1, TOP)] or v[M("a", 1, TOP)]
        assert not (v[L("a", 1, TOP)] and v[M("a", 0, TOP)])


def test_md0_single_atom():
    atoms = sat.enumerate_atoms(ClosureSpec(1, 0, 0, frozenset()))
    assert len(atoms) == 1
    assert sat.rate_feasible(atoms[0]) == {}


def test_rate_feasible_realises_cells():
    for atom in sat.enumerate_atoms(ClosureSpec(1, 1, 1, frozenset({"a"}))):
        total = sum(sat.rate_feasible(atom)["a"].values(), Fraction(0))
        assert (total >= 1) == atom.valuation()[L("a", 1, TOP)]


def test_consistent_examples():
    assert sat.consistent([parse("L[a,1] T"), parse("~L[a,2] T")])
    assert not sat.consistent([parse("L[a,1] T"), parse("M[a,0] T")])
    assert sat.consistent([])


def test_synthesize_top():
    fm = sat.synthesize_model(TOP)
    assert len(fm.atoms) == 1 and fm.parameter == 1
    assert fm.kernel.rates == {}


def test_synthesize_half():
    psi = parse("L[a,1/2] T")
    fm = sat.synthesize_model(psi)
    hits = [a for a in fm.atoms if holds(fm.process(a), psi)]
    assert hits
    assert fm.parameter % 2 == 0


def test_unsatisfiable_model_raises():
    with pytest.raises(sat.Unsatisfiable):
        sat.synthesize_model(parse("L[a,1] T & M[a,0] T"))


def test_caps_are_errors():
    with pytest.raises(CapExceeded):
        sat.synthesize_model(parse("L[a,1/4] L[b,1] T & M[a,2] T"), caps=sat.Caps(8, 64))


@pytest.mark.parametrize("text", ["L[a,1] T", "E[a,1/2] T & L[b,1] T", "L[a,1/2] ~L[a,1] T",
                                  "~M[a,1/2] T & M[b,0] T", "L[a,1] ~L[a,1] T"])
def test_truth_lemma_small(text):
    psi = parse(text)
    fm = sat.synthesize_model(psi)
    n = fm.synthesis.check_truth_lemma(extra=list(subformulas(psi)), family_cap=500)
    assert n > 0
    assert fm.parameter % measures(psi).granularity == 0


@given(formulas(labels=("a",), rates=SMALL, max_leaves=4))
@settings(max_examples=40)
def test_witness_satisfies(phi):
    w = sat.satisfiable(phi)
    if w is not None:
        assert holds(w, phi)
        assert w.state in denotation(w.kernel, phi)


@given(formulas(labels=("a", "b"), rates=SMALL, max_leaves=3))
@settings(max_examples=30)
def test_negation_complement(phi):
    # phi or ~phi is satisfiable, and T-valid formulas have unsatisfiable negations
    assert sat.satisfiable(phi) is not None or sat.satisfiable(Neg(phi)) is not None


def test_parameter_lcm_of_witnesses():
    fm = sat.synthesize_model(parse("L[a,1/3] T & M[a,2/3] T"))
    dens = [r.denominator for rows in fm.witness_rates().values()
            for row in rows.values() for r in row.values()]
    assert fm.parameter == math.lcm(3, *dens)
