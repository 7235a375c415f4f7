import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steerengine import engine, qcore

etas = st.floats(-0.999, 0.999, allow_nan=False)


def test_gibbs_state_matches_boltzmann():
    beta = 1.7
    z = 1.0 + math.exp(-beta)
    ref = np.diag([math.exp(-beta) / z, 1.0 / z])
    np.testing.assert_allclose(engine.gibbs_state(engine.eta_from_beta(beta)), ref, atol=1e-15)


@given(st.floats(0.0, 12.0))
def test_beta_round_trip(beta):
    eta = engine.eta_from_beta(beta)
    if eta > -1.0:
        assert engine.beta_from_eta(eta) == pytest.approx(beta, rel=1e-9, abs=1e-12)


def test_positive_eta_has_no_temperature():
    with pytest.raises(ValueError):
        engine.beta_from_eta(0.2)
    assert engine.temperature_from_eta(0.0) == math.inf


def test_ratio_defaults_and_override():
    p = engine.EngineParams(-0.5)
    assert p.ratio == pytest.approx(1 / math.sqrt(0.75))
    assert not p.ratio_overridden
    assert engine.EngineParams(-0.5, c=2.0).ratio_overridden


@given(etas)
def test_work_unitaries_are_real_reflections(eta):
    us = engine.work_unitaries(eta)
    s = math.sqrt(1 - eta * eta)
    for u in us:
        qcore.check_unitary(u)
    assert np.linalg.det(us.u_x_plus).real == pytest.approx(-1.0)
    ground = qcore.projector(qcore.ket("0"))
    for sign, u in ((1, us.u_x_plus), (-1, us.u_x_minus)):
        out = qcore.apply_unitary(u, qcore.bloch_to_density((sign * s, 0.0, eta)))
        np.testing.assert_allclose(out, ground, atol=1e-12)


@given(etas, st.sampled_from(engine.BUTTONS))
def test_rotation_angles_match_gate_energetics(eta, button):
    # the y-rotation stands in for each gate in the work-storage device
    u = engine.work_unitaries(eta).for_button(button)
    phi = engine.button_rotation_angle(button, eta)
    rot = np.eye(2) if phi is None else engine.y_rotation(phi)
    for r in ((0, 0, 1), (0, 0, -1), (1, 0, 0), (-1, 0, 0), (0.3, 0.0, -0.6)):
        rho = qcore.bloch_to_density(r)
        assert engine.extracted_work(u, rho) == pytest.approx(engine.extracted_work(rot, rho), abs=1e-12)


def test_work_observables_match_matrices():
    rng = np.random.default_rng(5)
    for _ in range(500):
        eta = rng.uniform(-0.99, 0.99)
        r = rng.normal(size=3)
        r *= rng.random() ** (1 / 3) / np.linalg.norm(r)
        rho = qcore.bloch_to_density(r)
        obs = engine.work_observables(r, eta)
        us = engine.work_unitaries(eta)
        for b in engine.BUTTONS:
            assert obs.for_button(b) == pytest.approx(engine.extracted_work(us.for_button(b), rho), abs=1e-12)


def test_known_values():
    assert engine.classical_bound(0.0) == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-15)
    assert engine.classical_bound(-0.5) == pytest.approx(0.1451567, abs=1e-7)
    assert engine.quantum_work(0.0, 1.0) == 0.5
    assert engine.violation_boundary_q(0.0) == pytest.approx(math.sqrt(2) - 1, abs=1e-12)


@given(etas)
def test_quantum_work_at_full_entanglement_is_optimal(eta):
    assert engine.quantum_work(eta, 1.0) == pytest.approx(engine.optimal_work(eta), abs=1e-12)


@given(etas, st.floats(0.0, 1.0))
def test_quantum_work_mixes_components(eta, q):
    w_z, w_x = engine.component_works(eta, q)
    c = engine.default_ratio(eta)
    assert engine.mix_colors(w_z, w_x, c) == pytest.approx(engine.quantum_work(eta, q), abs=1e-12)


@given(st.floats(-0.999, 0.0))
def test_gap_sign_matches_threshold(eta):
    eta_star = engine.violation_threshold_eta()
    if abs(eta - eta_star) > 1e-9:
        gap = engine.optimal_work(eta) - engine.classical_bound(eta)
        assert (gap > 0) == (eta > eta_star)


def test_threshold_and_temperature():
    eta_star = engine.violation_threshold_eta()
    assert eta_star == pytest.approx(-math.sqrt(2 * (math.sqrt(2) - 1)), abs=1e-9)
    assert engine.temperature_from_eta(eta_star) == pytest.approx(0.33, abs=0.01)


@given(st.floats(-0.9, 0.0))
def test_boundary_reaches_bound(eta):
    q = engine.violation_boundary_q(eta)
    assert q is not None and 0.0 <= q <= 1.0
    assert engine.quantum_work(eta, q) == pytest.approx(engine.classical_bound(eta), abs=1e-12)


def test_no_boundary_below_threshold():
    assert engine.violation_boundary_q(-0.95) is None


def test_eta_out_of_range():
    for bad in (-1.0, 1.0, 2.0):
        with pytest.raises(ValueError):
            engine.classical_bound(bad)
