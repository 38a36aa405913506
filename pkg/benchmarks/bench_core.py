"""Compiled core vs pure-Python twin on batch formula evaluation.

    python3 benchmarks/bench_core.py [--states N] [--repeat R]
"""
import argparse
import random
import time
from fractions import Fraction

from cml import engine
from cml.formula import ClosureSpec, enumerate_family
from cml.kernel import Kernel


def random_kernel(rng, n, labels=("a", "b"), density=0.2):
    states = [f"s{i}" for i in range(n)]
    table = {}
    for a in labels:
        for m in states:
            for t in states:
                if rng.random() < density:
                    den = rng.randint(1, 12)
                    table.setdefault(a, {}).setdefault(m, {})[t] = Fraction(rng.randint(1, 2 * den), den)
    return Kernel(states, labels, table)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--states", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if engine._core is None:
        raise SystemExit("compiled core not built; run `pip install -e . --no-build-isolation`")
    rng = random.Random(args.seed)
    k = random_kernel(rng, args.states)
    fam = list(enumerate_family(2, ClosureSpec(2, 2, 2, frozenset({"a", "b"})), cap=2000, with_m=True))
    prog = engine.compile_program(fam)
    print(f"kernel: {args.states} states, formulas: {len(fam)} ({len(prog)} slots)")

    results = {}
    for backend in ("compiled", "python"):
        for want_d in (False, True):
            t = best_of(lambda: engine.evaluate(k, prog, want_d=want_d, backend=backend), args.repeat)
            results[backend, want_d] = t
            print(f"  {backend:9s} truth{'+d' if want_d else '  '}  {t * 1e3:9.1f} ms")
    a = engine.evaluate(k, prog, want_d=True, backend="compiled")
    b = engine.evaluate(k, prog, want_d=True, backend="python")
    assert all(a.d_all(f) == b.d_all(f) for f in fam[:200]), "backends disagree"
    for want_d in (False, True):
        print(f"speedup ({'truth+d' if want_d else 'truth'}): "
              f"{results['python', want_d] / results['compiled', want_d]:.1f}x")


if __name__ == "__main__":
    main()
