"""Compiled vs numpy SMO backend: same algorithm, interchangeable results."""

import os
import subprocess
import sys

import numpy as np
import pytest

from lithosvm import _smo_py
from lithosvm.kernels import gram_matrix, linear_kernel, rbf_kernel
from lithosvm.solver import dual_objective

compiled = pytest.importorskip("lithosvm._smo")


def problems():
    rng = np.random.default_rng(77)
    for trial in range(12):
        n = int(rng.integers(4, 40))
        f = int(rng.integers(1, 5))
        X = rng.normal(size=(n, f))
        d = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        if len(np.unique(d)) < 2:
            d[0] = -d[0]
        spec = rbf_kernel(float(rng.uniform(0.4, 1.5))) if trial % 2 else linear_kernel()
        C = [1.0, 10.0][trial % 2]
        yield gram_matrix(spec, X), d, C


def test_backends_agree_to_tolerance():
    for G, d, C in problems():
        res_c = compiled.smo_solve(G, d, C, 1e-9, 2000, 1e-12)
        res_p = _smo_py.smo_solve(G, d, C, 1e-9, 2000, 1e-12)
        assert res_c[2] == res_p[2] == _smo_py.STATUS_CONVERGED
        w_c = dual_objective(res_c[0], d, G)
        w_p = dual_objective(res_p[0], d, G)
        assert abs(w_c - w_p) <= 1e-8 * max(1.0, abs(w_c))
        assert res_c[5] <= 1e-9 and res_p[5] <= 1e-9


def test_each_backend_is_deterministic():
    for G, d, C in problems():
        for solve in (compiled.smo_solve, _smo_py.smo_solve):
            a1 = solve(G, d, C, 1e-6, 500, 1e-9)
            a2 = solve(G, d, C, 1e-6, 500, 1e-9)
            assert np.array_equal(a1[0], a2[0])
            assert a1[1:] == a2[1:]
        break  # one problem suffices for the bitwise repeatability check


def test_status_codes_match():
    assert compiled.STATUS_CONVERGED == _smo_py.STATUS_CONVERGED
    assert compiled.STATUS_BUDGET_EXCEEDED == _smo_py.STATUS_BUDGET_EXCEEDED
    assert compiled.STATUS_STALLED == _smo_py.STATUS_STALLED


def _active_backend_in_subprocess(value: str | None) -> str:
    env = dict(os.environ)
    env.pop("LITHOSVM_BACKEND", None)
    if value is not None:
        env["LITHOSVM_BACKEND"] = value
    return subprocess.run(
        [sys.executable, "-c", "from lithosvm.solver import active_backend; print(active_backend())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    ).stdout.strip()


def test_backend_env_selection():
    assert _active_backend_in_subprocess("python") == "python"
    assert _active_backend_in_subprocess("compiled") == "compiled"
    assert _active_backend_in_subprocess("auto") == "compiled"
    assert _active_backend_in_subprocess(None) == "compiled"


def test_backend_env_rejects_unknown():
    env = dict(os.environ, LITHOSVM_BACKEND="fortran")
    proc = subprocess.run(
        [sys.executable, "-c", "import lithosvm.solver"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode != 0
    assert "LITHOSVM_BACKEND" in proc.stderr
