"""Builds the extension module and exercises it from Python.

Run from the repository root: python3 python/smoke_test.py
"""

import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "coupled-fpi-py"], cwd=ROOT, check=True
    )
    lib = ROOT / "target" / "release" / "libcoupled_fpi.so"
    dest = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, dest / "coupled_fpi.so")
    sys.path.insert(0, str(dest))


def main():
    build()
    import coupled_fpi as cf

    assert cf.distance(0.0, 1.0) == 1.0
    assert cf.distance([0.0, 0.0], [3.0, 4.0]) == 5.0
    assert cf.distance([0.0, 0.0], [3.0, 4.0], metric="chebyshev") == 4.0
    assert cf.hausdorff([0.0, 1.0], [0.0, 3.0]) == 2.0
    assert cf.dist_to_set(0.5, [0.0, 1.0, 2.0]) == 0.5
    assert cf.select_near([0.2], [-0.2, 0.2], 0.2, 1e-9) == 0.2

    order, full = cf.Graph.order(), cf.Graph.full()
    assert order.has_edge(0.0, 1.0) and not order.has_edge(1.0, 0.0)
    g = cf.Graph.edge_list([0.0, 1.0, 2.0], [(0, 1)])
    assert not g.is_weakly_connected()
    assert g.is_path([0.0, 1.0])

    sol = cf.solve_coupled(lambda x, y: (x + y) / 5, 0.0, 1.0, k=2 / 3, tol=1e-12)
    assert sol.converged and abs(sol.x) < 1e-10 and sol.is_diagonal
    steps = sol.steps()
    assert steps[1][1] == 0.2 and steps[1][2] == 0.2
    assert sol.diagonal_decay(order).passed

    multi = cf.solve_coupled_multi(
        lambda x, y: [-(x + y) / 5, (x + y) / 5],
        0.0, 1.0, -0.2, -0.2, k=2 / 3, tol=1e-12, graph=full,
    )
    assert multi.converged and multi.steps()[1][1] == -0.2

    plane = cf.solve_coupled(
        lambda x, y: [(x[0] - y[1]) / 4 + 1, (x[1] - y[0]) / 4],
        [-10.0, -10.0], [10.0, 10.0], k=0.5, tol=1e-12, metric="chebyshev",
    )
    assert plane.converged and abs(plane.x[0] - 1.5) < 1e-9

    cert = cf.check_contraction(lambda x, y: x, k=0.5, count=1000, seed=7)
    assert not cert.passed and cert.witness is not None
    cert = cf.check_mixed_monotone(lambda x, y: y, count=1000, seed=7)
    assert cert.outcome == "failed", cert
    cert = cf.check_mixed_monotone(lambda x, y: (x + y) / 5, graph=full, count=1000)
    assert cert.passed
    k = cf.estimate_k(lambda x, y: (x + y) / 5, count=20000, seed=1)
    assert 0.38 <= k <= 0.40, k

    closure = cf.check_limit_closure([0.2 * 0.4**n for n in range(30)], 0.0, descending=True)
    assert closure.passed
    assert abs(cf.step_bound(0.5, 2.0, 1) - 0.5) < 1e-15
    assert abs(cf.tail_bound(0.5, 2.0, 0) - 2.0) < 1e-15

    try:
        cf.solve_coupled(lambda x, y: x, 0.0, 1.0, k=1.5)
    except ValueError as e:
        assert "k must lie in (0,1)" in str(e)
    else:
        raise AssertionError("k = 1.5 accepted")

    try:
        cf.solve_coupled(lambda x, y: 1 / 0, 0.0, 1.0, k=0.5)
    except ValueError as e:
        assert "ZeroDivisionError" in str(e)
    else:
        raise AssertionError("callback error swallowed")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
