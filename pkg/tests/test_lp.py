import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cml.lp import Constraint, solve, solve_strict

BOX = 6


def _solve_square(rows, rhs):
    """Gaussian elimination on Fractions; None when singular."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _holds(row, x, sense, rhs):
    v = sum(c * xi for c, xi in zip(row, x))
    return {"<=": v <= rhs, ">=": v >= rhs, "==": v == rhs, "<": v < rhs, ">": v > rhs}[sense]


def vertex_oracle(nvars, cons, objective):
    """Best objective over the vertices of the system inside the box ``0 <= x <= BOX``."""
    dense = [([Fraction(c.coeffs.get(j, 0)) for j in range(nvars)], c.sense, Fraction(c.rhs)) for c in cons]
    for j in range(nvars):
        e = [Fraction(int(i == j)) for i in range(nvars)]
        dense.append((e, ">=", Fraction(0)))
        dense.append((e, "<=", Fraction(BOX)))
    best = None
    for pick in itertools.combinations(range(len(dense)), nvars):
        x = _solve_square([dense[i][0] for i in pick], [dense[i][2] for i in pick])
        if x is None or not all(_holds(r, x, s, b) for r, s, b in dense):
            continue
        v = sum(Fraction(objective.get(j, 0)) * x[j] for j in range(nvars))
        best = v if best is None else max(best, v)
    return best


coef = st.integers(-3, 3)


@st.composite
def systems(draw, senses=("<=", ">=", "==")):
    n = draw(st.integers(1, 3))
    cons = []
    for _ in range(draw(st.integers(1, 4))):
        coeffs = {j: draw(coef) for j in range(n)}
        cons.append(Constraint(coeffs, draw(st.sampled_from(senses)), draw(st.integers(-4, 8))))
    obj = {j: draw(coef) for j in range(n)}
    return n, cons, obj


def test_textbook_optimum():
    cons = [Constraint({0: 1, 1: 2}, "<=", 4), Constraint({0: 3, 1: 1}, "<=", 6)]
    res = solve(2, cons, {0: 1, 1: 1})
    assert res.status == "optimal"
    assert res.value == Fraction(14, 5)
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]


def test_infeasible_and_unbounded():
    assert solve(1, [Constraint({0: 1}, ">=", 2), Constraint({0: 1}, "<=", 1)]).status == "infeasible"
    assert solve(1, [Constraint({0: 1}, ">=", 2)], {0: 1}).status == "unbounded"


def test_strict_witness():
    res = solve_strict(1, [Constraint({0: 1}, ">", 1), Constraint({0: 1}, "<", 2)])
    assert res.feasible and 1 < res.x[0] < 2
    assert not solve_strict(1, [Constraint({0: 1}, ">", 1), Constraint({0: 1}, "<=", 1)]).feasible


def test_bad_sense():
    with pytest.raises(ValueError):
        Constraint({0: 1}, "=<", 1)


@given(systems())
def test_matches_vertex_enumeration(system):
    n, cons, obj = system
    boxed = cons + [Constraint({j: 1}, "<=", BOX) for j in range(n)]
    res = solve(n, boxed, obj)
    want = vertex_oracle(n, cons, obj)
    if want is None:
        assert res.status == "infeasible"
    else:
        assert res.status == "optimal" and res.value == want
        assert all(_holds([Fraction(c.coeffs.get(j, 0)) for j in range(n)], res.x, c.sense, c.rhs)
                   for c in boxed)
        assert all(v >= 0 for v in res.x)


@given(systems(senses=("<=", ">=", "==", "<", ">")))
def test_strict_matches_oracle(system):
    n, cons, _ = system
    boxed = cons + [Constraint({j: 1}, "<=", BOX) for j in range(n)]
    res = solve_strict(n, boxed)
    # oracle: maximise a shared slack t in [0, 1] by vertex enumeration over (x, t)
    lifted = []
    for c in boxed:
        coeffs = dict(c.coeffs)
        if c.sense in ("<", ">"):
            coeffs[n] = 1 if c.sense == "<" else -1
            lifted.append(Constraint(coeffs, "<=" if c.sense == "<" else ">=", c.rhs))
        else:
            lifted.append(c)
    lifted.append(Constraint({n: 1}, "<=", 1))
    best = vertex_oracle(n + 1, lifted, {n: 1})
    has_strict = any(c.sense in ("<", ">") for c in boxed)
    feasible = best is not None and (best > 0 or not has_strict)
    assert res.feasible == feasible
    if feasible:
        assert all(_holds([Fraction(c.coeffs.get(j, 0)) for j in range(n)], res.x, c.sense, c.rhs)
                   for c in boxed)
        if has_strict:
            assert res.slack == best
