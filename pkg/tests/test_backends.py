import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracheat import _kernels
from fracheat._kernels import _pykernels

try:
    from fracheat._kernels import _ckernels
except ImportError:  # pragma: no cover - exercised only without a compiler
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_backend_label():
    assert _kernels.BACKEND in ("cython", "python")


@needs_c
@given(st.integers(0, 2**31 - 1), st.sampled_from([1.0, 2.0, 1.5, math.inf]))
def test_weighted_power_sum_backends_agree(seed, q):
    rng = np.random.default_rng(seed)
    stack = rng.random((7, 33))
    w = rng.random(7)
    np.testing.assert_allclose(_ckernels.weighted_power_sum(stack, w, q), _pykernels.weighted_power_sum(stack, w, q), rtol=1e-13)


@needs_c
@given(st.integers(0, 2**31 - 1))
def test_duhamel_trapezoid_backends_agree(seed):
    rng = np.random.default_rng(seed)
    decay = rng.random(20)
    src = rng.normal(size=(9, 20)) + 1j * rng.normal(size=(9, 20))
    np.testing.assert_allclose(_ckernels.duhamel_trapezoid(decay, src, 0.1), _pykernels.duhamel_trapezoid(decay, src, 0.1), rtol=1e-13, atol=1e-15)


@needs_c
def test_smooth_transition_backends_agree():
    r = np.linspace(-1, 4, 1001).reshape(7, 143)
    np.testing.assert_allclose(_ckernels.smooth_transition(r, 1.0, 1.5), _pykernels.smooth_transition(r, 1.0, 1.5), rtol=1e-14, atol=1e-300)


def test_duhamel_trapezoid_matches_explicit_sum():
    rng = np.random.default_rng(3)
    E = rng.random(5)
    src = rng.normal(size=(6, 5)) + 0j
    h = 0.2
    out = _kernels.duhamel_trapezoid(E, src, h)
    for i in range(6):
        expected = np.zeros(5, dtype=complex)
        for j in range(i + 1):
            w = 0.5 if j in (0, i) else 1.0
            expected += w * E ** (i - j) * src[j]
        expected *= h if i > 0 else 0.0
        np.testing.assert_allclose(out[i], expected, atol=1e-14)


def test_smooth_transition_shape():
    r = np.array([0.0, 1.0, 1.25, 1.5, 2.0])
    out = _kernels.smooth_transition(r, 1.0, 1.5)
    assert out[0] == 1 and out[1] == 1 and out[3] == 0 and out[4] == 0
    assert out[2] == pytest.approx(0.5)
    x = np.linspace(1.0, 1.5, 201)
    assert np.all(np.diff(_kernels.smooth_transition(x, 1.0, 1.5)) <= 0)


def test_pure_python_switch():
    import subprocess
    import sys

    code = "import fracheat; print(fracheat.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"FRACHEAT_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
