import json
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cml.formula import TOP, And, L, M, Neg
from cml.kernel import Kernel

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

RATES = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


@pytest.fixture
def k1():
    return Kernel(["s0", "s1"], ["a"], {"a": {"s0": {"s1": Fraction(3, 2)}}})


@pytest.fixture
def k1_path(tmp_path, k1):
    path = tmp_path / "K1.json"
    path.write_text(json.dumps({"states": ["s0", "s1"], "labels": ["a"],
                                "rates": {"a": {"s0": {"s1": "3/2"}}}}))
    return str(path)


def formulas(labels=("a", "b"), rates=RATES, with_m=True, negation=True, max_leaves=6):
    ops = [L] + ([M] if with_m else [])

    def extend(children):
        branches = [st.builds(lambda o, a, r, f: o(a, r, f), st.sampled_from(ops),
                              st.sampled_from(labels), st.sampled_from(rates), children),
                    st.builds(And, children, children)]
        if negation:
            branches.append(st.builds(Neg, children))
        return st.one_of(*branches)

    return st.recursive(st.just(TOP), extend, max_leaves=max_leaves)


@st.composite
def kernels(draw, labels=("a", "b"), max_states=4, rates=RATES):
    n = draw(st.integers(1, max_states))
    states = [f"s{i}" for i in range(n)]
    table = {}
    for a in labels:
        for m in states:
            for t in states:
                r = draw(st.sampled_from(rates))
                if r:
                    table.setdefault(a, {}).setdefault(m, {})[t] = r
    return Kernel(states, labels, table)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
