from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cml import engine
from cml.formula import TOP, And, L, M, Neg, Top, parse
from cml.kernel import Kernel, UnknownLabelError, denotation, theta

from conftest import formulas, kernels

ODD_RATES = [Fraction(0), Fraction(1, 3), Fraction(3, 4), Fraction(5, 2), Fraction(7)]
ODD_INDICES = [Fraction(0), Fraction(1, 6), Fraction(2, 3), Fraction(1), Fraction(9, 4), Fraction(5)]

BACKENDS = ["python"] + (["compiled"] if engine._core is not None else [])


def d_oracle(k, phi, m, clamp=False):
    """Direct recursion on Fractions, one state at a time."""
    def cl(x):
        return min(max(x, Fraction(0)), Fraction(1)) if clamp else x
    if isinstance(phi, Top):
        return Fraction(0)
    if isinstance(phi, Neg):
        return cl(1 - d_oracle(k, phi.sub, m, clamp))
    if isinstance(phi, And):
        return cl(max(d_oracle(k, phi.left, m, clamp), d_oracle(k, phi.right, m, clamp)))
    v = theta(k, phi.label, m, denotation(k, phi.sub))
    gap = phi.rate - v if isinstance(phi, L) else v - phi.rate
    return cl(max(gap, Fraction(0)))


def test_compiled_core_is_built():
    assert engine._core is not None, "the compiled core did not import"


@pytest.mark.parametrize("backend", BACKENDS)
def test_dsat_examples(k1, backend):
    cases = {"L[a,2] T": Fraction(1, 2), "~L[a,1] T": Fraction(1), "M[a,1] T": Fraction(1, 2),
             "L[a,2] T & M[a,1] T": Fraction(1, 2)}
    phis = [parse(t) for t in cases]
    ev = engine.evaluate(k1, phis, want_d=True, backend=backend)
    for phi, want in zip(phis, cases.values()):
        assert ev.d(phi, "s0") == want


def test_literal_d_leaves_unit_interval():
    k = Kernel(["x"], ["a"])
    phi = L("a", 5, TOP)
    ev = engine.evaluate(k, [Neg(phi)], want_d=True)
    assert ev.d(phi, "x") == 5
    assert ev.d(Neg(phi), "x") == -4
    ev = engine.evaluate(k, [Neg(phi)], want_d=True, clamp=True)
    assert ev.d(phi, "x") == 1 and ev.d(Neg(phi), "x") == 0


@pytest.mark.parametrize("backend", BACKENDS)
@given(k=kernels(rates=ODD_RATES), phis=st.lists(formulas(rates=ODD_INDICES), min_size=1, max_size=4),
       clamp=st.booleans())
def test_backend_matches_oracle(backend, k, phis, clamp):
    ev = engine.evaluate(k, phis, want_d=True, clamp=clamp, backend=backend)
    assert ev.backend == backend
    for phi in phis:
        assert ev.denotation(phi) == denotation(k, phi)
        for m in k.states:
            assert ev.d(phi, m) == d_oracle(k, phi, m, clamp)


@given(kernels(), st.lists(formulas(), min_size=1, max_size=4))
def test_backends_agree(k, phis):
    if len(BACKENDS) < 2:
        pytest.skip("compiled core unavailable")
    a = engine.evaluate(k, phis, want_d=True, backend="python")
    b = engine.evaluate(k, phis, want_d=True, backend="compiled")
    for phi in phis:
        assert a.truth(phi) == b.truth(phi)
        assert a.d_all(phi) == b.d_all(phi)


def test_large_denominators_fall_back_to_python():
    big = Fraction(1, 2**40)
    k = Kernel(["x", "y"], ["a"], {"a": {"x": {"y": big}}})
    phi = L("a", Fraction(1, 2**39 + 1), TOP)
    ev = engine.evaluate(k, [phi], want_d=True)
    assert ev.backend == "python"
    assert ev.d(phi, "x") == Fraction(1, 2**39 + 1) - big


def test_unknown_label(k1):
    with pytest.raises(UnknownLabelError):
        engine.evaluate(k1, [parse("L[b,1] T")])


def test_program_shares_subformulas():
    chi = parse("L[a,1] T")
    prog = engine.compile_program([And(chi, chi), Neg(chi)])
    assert len(prog) == 4  # T, chi, the conjunction, the negation


@pytest.mark.parametrize("backend", BACKENDS)
@given(k=kernels(), data=st.data())
def test_block_sums(backend, k, data):
    a = data.draw(st.sampled_from(k.labels))
    member = data.draw(st.lists(st.booleans(), min_size=len(k.states), max_size=len(k.states)))
    target = {s for s, b in zip(k.states, member) if b}
    sums = engine.block_sums(k, a, member, 2, backend=backend)
    assert [Fraction(int(v), 2) for v in sums] == [theta(k, a, m, target) for m in k.states]


def test_pure_python_switch():
    import os
    import subprocess
    import sys
    code = ("from cml import engine, parse; from cml.kernel import Kernel; "
            "k = Kernel(['x'], ['a'], {'a': {'x': {'x': 1}}}); "
            "ev = engine.evaluate(k, [parse('L[a,1] T')]); "
            "print(engine.BACKEND, ev.backend, ev.holds(parse('L[a,1] T'), 'x'))")
    env = dict(os.environ, CML_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "python", "True"]
