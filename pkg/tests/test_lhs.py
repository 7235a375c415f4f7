import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steerengine import engine, lhs

H = 1.0 / math.sqrt(2.0)


def test_single_gibbs_member():
    ens = lhs.HiddenStateEnsemble([1.0], [[0.0, 0.0, -0.5]], -0.5)
    w = lhs.alice_optimal_work(ens)
    assert w == pytest.approx(lhs.brute_force_work(ens), abs=1e-12)
    assert w <= engine.classical_bound(-0.5)


def test_energy_eigenstates_red_cells_give_optimum():
    ens = lhs.energy_eigenstate_ensemble(-0.3)
    w_z, _ = lhs.color_works(ens)
    assert w_z == pytest.approx(0.5 * (1 - 0.3))


@pytest.mark.parametrize("eta", [0.0, -0.2, -0.5, -H])
def test_saturating_ensemble_attains_bound(eta):
    ens = lhs.saturating_ensemble(eta)
    assert lhs.alice_optimal_work(ens) == pytest.approx(engine.classical_bound(eta), abs=1e-12)


def test_saturating_ensemble_needs_small_eta():
    with pytest.raises(lhs.EnsembleError):
        lhs.saturating_ensemble(-0.8)


def test_tie_rule():
    assert lhs.red_button(0.0) == "z0"
    assert lhs.blue_button(0.0) == "x-"
    assert lhs.red_button(1e-300) == "z1"


@settings(max_examples=200, deadline=None)
@given(st.floats(-0.95, 0.0), st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_random_ensembles_respect_bound(eta, n, seed):
    ens = lhs.random_ensemble(eta, n, np.random.default_rng(seed))
    w = lhs.alice_optimal_work(ens)
    assert w == pytest.approx(lhs.brute_force_work(ens), abs=1e-12)
    assert w <= engine.classical_bound(eta) + 1e-9


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.95, 0.0), st.floats(0.1, 5.0), st.integers(0, 2**32 - 1))
def test_closed_form_matches_brute_force_any_ratio(eta, c, seed):
    ens = lhs.random_ensemble(eta, 5, np.random.default_rng(seed))
    assert lhs.alice_optimal_work(ens, c) == pytest.approx(lhs.brute_force_work(ens, c), abs=1e-12)


def test_sign_rule_is_optimal_per_state():
    rng = np.random.default_rng(9)
    for _ in range(200):
        eta = rng.uniform(-0.95, 0.0)
        r = rng.normal(size=3)
        r /= np.linalg.norm(r)
        obs = engine.work_observables(r, eta)
        assert obs.for_button(lhs.red_button(r[2])) == max(obs.z1, obs.z0)
        assert obs.for_button(lhs.blue_button(r[0])) == pytest.approx(max(obs.x_plus, obs.x_minus))


@pytest.mark.parametrize(
    "weights,states,eta",
    [
        ([0.5, 0.4], [[0, 0, 1], [0, 0, -1]], 0.0),
        ([1.2, -0.2], [[0, 0, 1], [0, 0, -1]], 0.4),
        ([1.0], [[0.0, 0.0, 1.2]], 0.0),
        ([0.5, 0.5], [[0, 0, 1], [0, 0, 1]], 0.0),
        ([1.0], [[0, 0, 0]], 1.0),
    ],
)
def test_invalid_ensembles_rejected(weights, states, eta):
    with pytest.raises(lhs.EnsembleError):
        lhs.HiddenStateEnsemble(weights, states, eta)


def test_json_round_trip(tmp_path):
    ens = lhs.random_ensemble(-0.4, 4, np.random.default_rng(2))
    path = tmp_path / "ens.json"
    path.write_text(ens.to_json())
    back = lhs.HiddenStateEnsemble.load(path)
    np.testing.assert_array_equal(back.weights, ens.weights)
    np.testing.assert_array_equal(back.states, ens.states)
    assert back.eta == ens.eta


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"eta": 0.0,\n "members": [}')
    with pytest.raises(lhs.EnsembleError, match="line 2"):
        lhs.HiddenStateEnsemble.load(path)
    path.write_text(json.dumps({"eta": 0.0, "members": [{"p": 1.0}]}))
    with pytest.raises(lhs.EnsembleError):
        lhs.HiddenStateEnsemble.load(path)


def test_search_is_deterministic_and_sound():
    a = lhs.search_max_classical_work(-0.3, 5000, seed=7, workers=2)
    b = lhs.search_max_classical_work(-0.3, 5000, seed=7, workers=2)
    assert a.value == b.value
    np.testing.assert_array_equal(a.best.weights, b.best.weights)
    assert a.value <= a.bound + 1e-9
    assert a.margin == pytest.approx(0.0, abs=1e-9)


def test_search_hides_bound_for_custom_ratio():
    res = lhs.search_max_classical_work(0.0, 100, c=2.0)
    assert res.bound is None and res.margin is None


def test_hill_climb_never_worsens():
    rng = np.random.default_rng(11)
    ens = lhs.random_ensemble(-0.2, 6, rng)
    c = engine.default_ratio(-0.2)
    best, val = lhs.hill_climb(ens, c, 300, rng)
    assert val >= lhs.alice_optimal_work(ens, c)
    assert val == pytest.approx(lhs.alice_optimal_work(best, c))
    assert val <= engine.classical_bound(-0.2) + 1e-9
