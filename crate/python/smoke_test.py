"""Smoke test for the hyperwit_py extension module.

Build and run from the repository root:

    cargo build --release -p hyperwit-python --features extension-module
    cp target/release/libhyperwit_py.so python/hyperwit_py.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import hyperwit_py as hw


def main() -> None:
    g3 = hw.Hypergraph.family("single-max", 3)
    assert g3.edges == [[1, 2, 3]] and g3.k_max == 3
    assert hw.Hypergraph.parse(str(g3)) == g3

    state = hw.build_state(g3)
    assert state.signs()[-1] == -1 and sum(s < 0 for s in state.signs()) == 1
    again = hw.SignState.from_hex(3, state.to_hex())
    assert again.hypergraph() == (g3, 1)

    report = hw.entanglement(hw.Hypergraph.family("all-n-1", 4))
    golden = (3 + math.sqrt(5)) / 8
    assert abs(report["alpha"] - golden) < 1e-9
    assert abs(hw.closed_form_alpha("all-n-1", 4) - golden) < 1e-12
    assert abs(hw.closed_form_e("single-max", 5) - 1 / 16) < 1e-12

    fig = hw.Hypergraph(5, [[1, 2], [3, 4], [3, 4, 5], [2, 3, 4, 5]])
    cert = hw.reduce(fig, [1, 2, 3])
    assert cert["bound"]["num"] == 1 and cert["bound"]["den"] == 4
    assert cert["validated"]

    w = hw.Witness(g3)
    assert w.robustness_fraction == (2, 7)
    assert w.expectation(1, 4) < 0 < w.expectation(3, 10)
    s = hw.Witness(g3, kind="stabilizer")
    assert s.beta is not None and s.robustness_fraction == (1, 6)
    assert len(w.settings("greedy")) <= len(w.settings())

    g2 = hw.Hypergraph.family("single-max", 2)
    assert hw.stabilizer_product_settings(g2, [1, 2]) == ["YY"]

    try:
        hw.Hypergraph(2, [[1, 3]])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range vertex accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
