"""The compiled and pure-Python kernels must agree."""
import math

import numpy as np
import pytest

from steerengine import _backend, collision, lhs

pytestmark = pytest.mark.skipif("compiled" not in _backend.BACKENDS, reason="extension not built")

PY = _backend.get("python")


def compiled():
    return _backend.get("compiled")


def test_uniforms_bitwise_equal():
    cells = np.arange(5, 1005, dtype=np.int64)
    a = PY.cell_uniforms(123, cells, 7)
    b = compiled().cell_uniforms(123, cells, 7)
    np.testing.assert_array_equal(a, b)
    assert ((a >= 0) & (a < 1)).all()
    assert abs(a.mean() - 0.5) < 0.02


def test_uniforms_are_counter_based():
    full = PY.cell_uniforms(9, np.arange(100, dtype=np.int64), 3)
    part = PY.cell_uniforms(9, np.arange(40, 60, dtype=np.int64), 3)
    np.testing.assert_array_equal(full[40:60], part)


def test_sample_cells_equal():
    cum = np.array([0.3, 1.0])
    exc = np.array([[0.9, 0.8, 0.1], [0.0, 0.0, 0.0]])
    n_anc = np.array([3, 0], dtype=np.int64)
    a = PY.sample_cells(5, 17, 2000, cum, exc, n_anc, 1.0, 0.5)
    b = compiled().sample_cells(5, 17, 2000, cum, exc, n_anc, 1.0, 0.5)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_gibbs_correction_and_work_batch_equal():
    rng = np.random.default_rng(0)
    w, r = lhs._sample_raw(rng, 500, 5)
    a = PY.gibbs_correct_batch(w, r, -0.4)
    b = compiled().gibbs_correct_batch(w, r, -0.4)
    np.testing.assert_allclose(a[0], b[0], atol=1e-13)
    np.testing.assert_allclose(a[1], b[1], atol=1e-13)
    va = PY.alice_work_batch(a[0], a[1], -0.4, 1.2)
    vb = compiled().alice_work_batch(a[0], a[1], -0.4, 1.2)
    np.testing.assert_allclose(va, vb, atol=1e-13)


@pytest.mark.parametrize("bloch", [(0, 0, 1), (0.6, 0.0, -0.8), (0.1, 0.2, 0.3)])
def test_work_chain_equal(bloch):
    pa, fa = PY.work_chain(np.array(bloch, float), math.pi / 300, 300)
    pb, fb = compiled().work_chain(np.array(bloch, float), math.pi / 300, 300)
    np.testing.assert_allclose(pa, pb, atol=1e-12)
    np.testing.assert_allclose(fa, fb, atol=1e-12)


def test_work_chain_matches_matrix_route():
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    cfg = collision.WorkCollisionConfig(2.0, 50)
    ref = collision.run_work_extraction(rho, cfg, method="matrix")
    for name in _backend.BACKENDS:
        probs, final = _backend.get(name).work_chain(np.array([0.4, 0.2, 0.4]), cfg.delta_phi, cfg.steps)
        np.testing.assert_allclose(probs, collision.excitation_probabilities(ref.records), atol=1e-12)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.get("gpu")
