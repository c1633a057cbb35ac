import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpoptics import _kernels, _pykernels
from gpoptics.sphere import great_circle, random_geodesic_path

from conftest import _ckernels


def test_compiled_backend_selected_when_built():
    if _ckernels is None:
        pytest.skip("extension not built")
    forced = os.environ.get("GPOPTICS_PURE_PYTHON", "").strip() in ("1", "true", "yes")
    assert _kernels.BACKEND == ("python" if forced else "cython")


def test_octant(kernels):
    omega, bad = kernels.fan_solid_angle(np.eye(3)[[2, 0, 1]])
    assert bad == -1
    assert omega == pytest.approx(np.pi / 2, abs=1e-15)


def test_great_circle_with_antipodal_vertex(kernels):
    # 256 samples put a vertex exactly opposite the fan root
    v = great_circle(256).vertices
    omega, bad = kernels.fan_solid_angle(v)
    assert bad == -1
    assert omega == pytest.approx(2 * np.pi, abs=1e-12)
    assert kernels.fan_solid_angle(v[::-1])[0] == pytest.approx(-2 * np.pi, abs=1e-12)


def test_degenerate_triangle_reported(kernels):
    # triangle whose last vertex is the antipode of the root
    v = np.array([[0, 0, 1.0], [1, 0, 0], [0, 0, -1.0]])
    _, bad = kernels.fan_solid_angle(v)
    assert bad == 1


def test_transport_identity_on_repeated_vertex(kernels):
    e = np.array([1, 1j, 0]) / np.sqrt(2)
    out = kernels.transport(e, np.array([[0, 0, 1.0]] * 4), True)
    np.testing.assert_array_equal(out, e)


def test_phase_steps_wrap(kernels):
    d = kernels.phase_steps(np.array([0.0, 3.0, -3.0, 1.0]))
    np.testing.assert_allclose(d, [3.0, 2 * np.pi - 6.0, 4.0 - 2 * np.pi, -1.0], atol=1e-14)
    assert np.all(d > -np.pi) and np.all(d <= np.pi)


def test_apply_family_row_range(kernels, rng):
    f = rng.normal(size=(5, 16, 2)) + 1j * rng.normal(size=(5, 16, 2))
    m = rng.normal(size=(16, 2, 2)) + 1j * rng.normal(size=(16, 2, 2))
    out = np.zeros_like(f)
    kernels.apply_family(f, m, out, 1, 3)
    expected = np.einsum("jab,rjb->rja", m, f)
    np.testing.assert_allclose(out[1:3], expected[1:3], rtol=1e-14, atol=1e-14)
    assert np.all(out[0] == 0) and np.all(out[3:] == 0)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 40))
def test_backends_agree_on_random_paths(seed, n):
    if _ckernels is None:
        pytest.skip("extension not built")
    rng = np.random.default_rng(seed)
    p = random_geodesic_path(rng, n)
    a = _pykernels.fan_solid_angle(p.vertices)
    b = _ckernels.fan_solid_angle(p.vertices)
    assert a[1] == b[1] == -1
    assert a[0] == pytest.approx(b[0], abs=1e-12)
    e = np.array([1, 1j, 0]) / np.sqrt(2)
    np.testing.assert_allclose(_pykernels.transport(e, p.vertices, True), _ckernels.transport(e, p.vertices, True), atol=1e-12)
    theta = rng.uniform(-10, 10, n)
    np.testing.assert_allclose(_pykernels.phase_steps(theta), _ckernels.phase_steps(theta), atol=1e-12)


@pytest.mark.parametrize("value,expected", [("1", "python"), ("0", None)])
def test_pure_python_switch(value, expected):
    env = dict(os.environ, GPOPTICS_PURE_PYTHON=value)
    out = subprocess.run(
        [sys.executable, "-c", "import gpoptics; print(gpoptics.KERNEL_BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    assert out == (expected or ("cython" if _ckernels is not None else "python"))


@pytest.mark.parametrize("raw,n", [("3", 3), ("1", 1)])
def test_thread_count_env(monkeypatch, raw, n):
    monkeypatch.setenv("GPOPTICS_THREADS", raw)
    assert _kernels.thread_count() == n


def test_thread_count_auto_and_invalid(monkeypatch):
    monkeypatch.setenv("GPOPTICS_THREADS", "0")
    assert _kernels.thread_count() == (os.cpu_count() or 1)
    for bad in ("-1", "x"):
        monkeypatch.setenv("GPOPTICS_THREADS", bad)
        with pytest.raises(ValueError):
            _kernels.thread_count()
