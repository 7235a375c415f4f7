import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steerengine import qcore

unit = st.floats(-1.0, 1.0, allow_nan=False)


def bloch_vectors():
    return st.tuples(unit, unit, unit).filter(lambda r: 1e-9 < sum(v * v for v in r) <= 1.0)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_basis_convention():
    assert qcore.basis_index("1") == 0
    assert qcore.basis_index("0") == 1
    assert qcore.basis_index("10") == 1
    assert qcore.basis_index("01") == 2
    np.testing.assert_allclose(qcore.ket("1"), [1, 0])
    # excited state has z = +1 and unit energy
    assert qcore.density_to_bloch(qcore.projector(qcore.ket("1"))).z == 1.0
    assert qcore.expectation(qcore.H_S, qcore.projector(qcore.ket("1"))) == 1.0


def test_pauli_algebra():
    x, y, z = qcore.SIGMA_X, qcore.SIGMA_Y, qcore.SIGMA_Z
    np.testing.assert_allclose(x @ y, 1j * z)
    np.testing.assert_allclose(qcore.SIGMA_PLUS @ qcore.ket("0"), qcore.ket("1"))
    np.testing.assert_allclose(qcore.SWAP @ qcore.ket("10"), qcore.ket("01"))


@given(bloch_vectors())
def test_bloch_round_trip(r):
    rho = qcore.bloch_to_density(r)
    qcore.check_density(rho)
    np.testing.assert_allclose(qcore.density_to_bloch(rho), r, atol=1e-14)
    assert qcore.purity(rho) == pytest.approx(0.5 * (1 + sum(v * v for v in r)))


def test_bloch_outside_ball_rejected():
    with pytest.raises(ValueError):
        qcore.bloch_to_density((1.0, 0.1, 0.0))


def test_check_density_rejects_bad_input():
    with pytest.raises(ValueError):
        qcore.check_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        qcore.check_density(np.array([[0.5, 0.1], [0.2, 0.5]]))


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_density(rng, 2) for _ in range(3))
    abc = qcore.tensor(qcore.tensor(a, b), c)
    np.testing.assert_allclose(qcore.partial_trace(abc, [0]), a, atol=1e-12)
    np.testing.assert_allclose(qcore.partial_trace(abc, [1]), b, atol=1e-12)
    np.testing.assert_allclose(qcore.partial_trace(abc, [0, 2]), qcore.tensor(a, c), atol=1e-12)


def test_partial_trace_of_bell_state():
    psi = (qcore.ket("11") + qcore.ket("00")) / math.sqrt(2)
    np.testing.assert_allclose(qcore.partial_trace(qcore.projector(psi), [1]), np.eye(2) / 2, atol=1e-15)


def test_permute_subsystems_matches_swap():
    rng = np.random.default_rng(1)
    a, b = random_density(rng, 2), random_density(rng, 2)
    ab = qcore.tensor(a, b)
    np.testing.assert_allclose(qcore.permute_subsystems(ab, [1, 0]), qcore.tensor(b, a), atol=1e-15)
    np.testing.assert_allclose(qcore.SWAP @ ab @ qcore.SWAP, qcore.tensor(b, a), atol=1e-15)


def test_tensor_dimension_cap():
    with pytest.raises(ValueError):
        qcore.tensor(np.eye(16), np.eye(2))


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_trace_distance_metric(seed):
    rng = np.random.default_rng(seed)
    for dim in (2, 4):
        a, b, c = (random_density(rng, dim) for _ in range(3))
        dab = qcore.trace_distance(a, b)
        assert 0.0 <= dab <= 1.0 + 1e-12
        assert dab == pytest.approx(qcore.trace_distance(b, a), abs=1e-12)
        assert dab <= qcore.trace_distance(a, c) + qcore.trace_distance(c, b) + 1e-12
        assert qcore.trace_distance(a, a) < 1e-12


def test_trace_distance_closed_form_matches_eigvalsh():
    rng = np.random.default_rng(3)
    for _ in range(100):
        d = random_density(rng, 2) - random_density(rng, 2)
        ref = 0.5 * np.abs(np.linalg.eigvalsh(d)).sum()
        assert qcore.trace_distance(d, np.zeros((2, 2))) == pytest.approx(ref, abs=1e-14)


def test_steering_reproduces_marginal():
    rng = np.random.default_rng(4)
    rho = random_density(rng, 4)
    marginal = qcore.partial_trace(rho, [0])
    for basis in (qcore.z_basis(), qcore.x_basis()):
        out = qcore.steer(rho, basis)
        assert sum(o.probability for o in out) == pytest.approx(1.0)
        mix = sum(o.probability * o.state for o in out)
        np.testing.assert_allclose(mix, marginal, atol=1e-12)


def test_steer_rejects_incomplete_measurement():
    with pytest.raises(ValueError):
        qcore.steer(np.eye(4) / 4, [qcore.projector(qcore.ket("1"))])


def test_expectation_rejects_non_hermitian():
    with pytest.raises(ValueError):
        qcore.expectation(qcore.SIGMA_PLUS, np.eye(2) / 2)
