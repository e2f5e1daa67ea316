import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rfvlc import _kernels_py, kernels

compiled = pytest.importorskip("rfvlc._kernels")


def test_backend_selected():
    assert kernels.BACKEND == "cython"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=0, max_size=300), st.floats(0, 100))
def test_compiled_matches_fallback(service, a):
    r = np.array(service, dtype=float)
    q1, q2 = compiled.lindley(a, r), _kernels_py.lindley(a, r)
    np.testing.assert_array_equal(q1, q2)
    np.testing.assert_array_equal(compiled.fcfs_delays(a, q1), _kernels_py.fcfs_delays(a, q2))


def test_compiled_matches_fallback_long():
    rng = np.random.default_rng(0)
    r = rng.exponential(1.0, 200000)
    q = compiled.lindley(0.97, r)
    np.testing.assert_array_equal(q, _kernels_py.lindley(0.97, r))
    np.testing.assert_array_equal(compiled.fcfs_delays(0.97, q), _kernels_py.fcfs_delays(0.97, q))


def test_pure_python_env_switch():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "from rfvlc import kernels; print(kernels.BACKEND)"],
                         env={"RFVLC_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
