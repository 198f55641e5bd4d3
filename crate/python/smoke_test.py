"""Smoke test for the Python bindings.

Build first, then run from the repository root:

    cargo build -p distgap-py --release --offline
    cp target/release/libdistgap_py.so python/distgap.so
    python3 python/smoke_test.py
"""

import math
import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import distgap  # noqa: E402


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    c4 = distgap.Graph.cycle(4)
    assert c4.n == 4
    assert close(c4.gap(), 1.0)
    h, subset = c4.cheeger()
    assert h == Fraction(1, 2), h
    assert c4.classify() == "K_{2,2}"
    assert c4.distance_matrix()[0] == [0, 1, 2, 1]

    p5 = distgap.Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    h, subset = p5.cheeger()
    assert h == Fraction(3, 5) and subset == [0, 4], (h, subset)
    assert p5.classify() == "n=5 exceptional equality (Path)"
    assert distgap.cheeger_lower_bound(5) == Fraction(3, 5)

    for n in range(2, 9):
        assert close(distgap.Graph.complete(n).gap(), n / (n - 1))

    k4 = distgap.Graph.from_graph6("C~")
    assert k4.graph6() == "C~" and k4.classify() == "none"

    spec = distgap.cayley_spectrum("Z3xZ3", "(1,0),(2,0),(0,1),(0,2)")
    assert len(spec) == 9 and spec[1] > 0.718

    c1 = distgap.c1()
    a, b, top = distgap.ab_optimum()
    assert close(c1, top, 1e-10) and 0.718 < 1 - 1 / c1 < 0.719
    assert close(math.hypot(a, b), 1.0)

    metric = [[0, 1, 1.5], [1, 0, 1], [1.5, 1, 0]]
    eig = distgap.metric_spectrum(metric)
    assert close(eig[0], 0.0) and eig[1] >= distgap.GAP_FLOOR
    assert distgap.semidefinite_form(metric, [1, 0, -1]) >= -1e-9

    try:
        distgap.Graph(4, [(0, 1), (2, 3)]).gap()
    except ValueError:
        pass
    else:
        raise AssertionError("disconnected graph accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
