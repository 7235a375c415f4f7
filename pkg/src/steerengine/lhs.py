"""Local-hidden-state ensembles and the optimal classical demon.

An ensemble is a list of weighted Bloch vectors whose mean is the Gibbs
point ``(0, 0, eta)``.  A classical demon who knows the hidden state of every
copy announces, per cell color, the button with the larger work:

* red cells: ``z1`` if ``z > 0`` else ``z0``
* blue cells: ``x+`` if ``x > 0`` else ``x-``

Ties (``z == 0`` or ``x == 0``) go to ``z0`` / ``x-``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend, engine
from .engine import default_ratio, work_observables

WEIGHT_TOL = 1e-10
NORM_TOL = 1e-12
MEAN_TOL = 1e-9


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True)
class HiddenStateEnsemble:
    weights: np.ndarray
    states: np.ndarray
    eta: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        r = np.asarray(self.states, dtype=np.float64).reshape(-1, 3)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", r)
        object.__setattr__(self, "eta", float(self.eta))
        self.validate()

    def validate(self) -> None:
        w, r = self.weights, self.states
        if len(w) == 0 or len(w) != len(r):
            raise EnsembleError(f"{len(w)} weights for {len(r)} states")
        if not -1.0 < self.eta < 1.0:
            raise EnsembleError(f"eta must lie in (-1, 1), got {self.eta}")
        if (w < 0).any():
            raise EnsembleError("negative weight")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise EnsembleError(f"weights sum to {w.sum()!r}")
        norms = np.sqrt((r**2).sum(axis=1))
        if (norms > 1.0 + NORM_TOL).any():
            raise EnsembleError(f"state {int(norms.argmax())} lies outside the Bloch ball")
        mean = w @ r
        if np.abs(mean - [0.0, 0.0, self.eta]).max() > MEAN_TOL:
            raise EnsembleError(f"ensemble mean {mean.tolist()} is not the Gibbs point (0, 0, {self.eta})")

    def __len__(self) -> int:
        return len(self.weights)

    def members(self):
        for p, r in zip(self.weights, self.states):
            yield float(p), tuple(float(v) for v in r)

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "members": [{"p": p, "x": r[0], "y": r[1], "z": r[2]} for p, r in self.members()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HiddenStateEnsemble":
        try:
            members = doc["members"]
            weights = [float(m["p"]) for m in members]
            states = [[float(m["x"]), float(m.get("y", 0.0)), float(m["z"])] for m in members]
            eta = float(doc["eta"])
        except (KeyError, TypeError, ValueError) as exc:
            raise EnsembleError(f"malformed ensemble document: {exc!r}") from exc
        return cls(np.array(weights), np.array(states), eta)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def load(cls, path) -> "HiddenStateEnsemble":
        text = Path(path).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EnsembleError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(doc)


def red_button(z: float) -> str:
    return "z1" if z > 0 else "z0"


def blue_button(x: float) -> str:
    return "x+" if x > 0 else "x-"


def color_works(ens: HiddenStateEnsemble) -> tuple[float, float]:
    """Closed-form red and blue averages (W_z, W_x) under the optimal sign rule."""
    eta = ens.eta
    s = math.sqrt(1.0 - eta * eta)
    w_z = 0.5 * (eta + float(ens.weights @ np.abs(ens.states[:, 2])))
    w_x = 0.5 * (eta + eta * eta + float(ens.weights @ np.abs(ens.states[:, 0])) * s)
    return w_z, w_x


def alice_optimal_work(ens: HiddenStateEnsemble, c: float | None = None) -> float:
    c = default_ratio(ens.eta) if c is None else float(c)
    w_z, w_x = color_works(ens)
    return engine.mix_colors(w_z, w_x, c)


def brute_force_work(ens: HiddenStateEnsemble, c: float | None = None) -> float:
    """Same quantity as :func:`alice_optimal_work`, summed state by state from the work observables."""
    c = default_ratio(ens.eta) if c is None else float(c)
    red = blue = 0.0
    for p, r in ens.members():
        obs = work_observables(r, ens.eta)
        red += p * obs.for_button(red_button(r[2]))
        blue += p * obs.for_button(blue_button(r[0]))
    return engine.mix_colors(red, blue, c)


def energy_eigenstate_ensemble(eta: float) -> HiddenStateEnsemble:
    eta = float(eta)
    return HiddenStateEnsemble(
        np.array([(1 + eta) / 2, (1 - eta) / 2]),
        np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]),
        eta,
    )


def tilted_ensemble(eta: float) -> HiddenStateEnsemble:
    """Equal mixture of the two tilted pure states (+-sqrt(1 - eta^2), 0, eta)."""
    eta = float(eta)
    s = math.sqrt(1.0 - eta * eta)
    return HiddenStateEnsemble(np.array([0.5, 0.5]), np.array([[s, 0.0, eta], [-s, 0.0, eta]]), eta)


def saturating_ensemble(eta: float) -> HiddenStateEnsemble:
    """Four pure states at (x, z) = (+-1/sqrt2, +-1/sqrt2) that attain the classical bound."""
    eta = float(eta)
    h = 1.0 / math.sqrt(2.0)
    if abs(eta) > h + 1e-15:
        raise EnsembleError(f"saturating construction needs |eta| <= 1/sqrt(2), got {eta}")
    up = (1.0 + eta * math.sqrt(2.0)) / 4.0
    down = 0.5 - up
    return HiddenStateEnsemble(
        np.array([up, up, down, down]),
        np.array([[h, 0.0, h], [-h, 0.0, h], [h, 0.0, -h], [-h, 0.0, -h]]),
        eta,
    )


def _sample_raw(rng: np.random.Generator, batch: int, n: int):
    """Uniform simplex weights and Bloch-ball states; about half the states are pure."""
    weights = rng.dirichlet(np.ones(n), size=batch)
    direction = rng.normal(size=(batch, n, 3))
    direction /= np.linalg.norm(direction, axis=2, keepdims=True)
    radius = rng.random((batch, n)) ** (1.0 / 3.0)
    radius = np.where(rng.random((batch, n)) < 0.5, 1.0, radius)
    return weights, direction * radius[..., None]


def random_ensembles(eta: float, n: int, batch: int, rng: np.random.Generator, backend=None):
    """Arrays (weights, states) of ``batch`` Gibbs-consistent ensembles with n or n + 1 members."""
    if n < 2:
        raise ValueError("ensembles need at least two members")
    k = _backend.get(backend)
    weights, states = _sample_raw(rng, batch, n)
    return k.gibbs_correct_batch(weights, states, float(eta))


def random_ensemble(eta: float, n: int, rng: np.random.Generator, retries: int = 8) -> HiddenStateEnsemble:
    for _ in range(retries):
        w, r = random_ensembles(eta, n, 1, rng)
        keep = w[0] > 0
        try:
            return HiddenStateEnsemble(w[0][keep], r[0][keep], eta)
        except EnsembleError:
            continue
    raise EnsembleError(f"could not build a Gibbs-consistent ensemble after {retries} attempts")


def _null_directions(states: np.ndarray) -> np.ndarray:
    """Weight perturbations that keep the normalisation and the mean Bloch vector."""
    a = np.vstack([np.ones(len(states)), states.T])
    _, sv, vt = np.linalg.svd(a)
    rank = int((sv > 1e-10).sum())
    return vt[rank:]


def hill_climb(ens: HiddenStateEnsemble, c: float, steps: int, rng: np.random.Generator) -> tuple[HiddenStateEnsemble, float]:
    """Coordinate ascent on the weights inside the Gibbs-consistent polytope."""
    best = ens
    best_val = alice_optimal_work(ens, c)
    dirs = _null_directions(ens.states)
    if len(dirs) == 0:
        return best, best_val
    w = ens.weights.copy()
    for _ in range(steps):
        d = dirs[rng.integers(len(dirs))] * rng.choice([-1.0, 1.0])
        neg = d < 0
        if not neg.any():
            continue
        t_max = float(np.min(w[neg] / -d[neg]))
        trial = np.clip(w + rng.random() * t_max * d, 0.0, None)
        trial /= trial.sum()
        try:
            cand = HiddenStateEnsemble(trial, ens.states, ens.eta)
        except EnsembleError:
            continue
        val = alice_optimal_work(cand, c)
        if val > best_val:
            best, best_val, w = cand, val, trial
    return best, best_val


def _worker(eta, c, budget, seed_seq, backend, batch=4096):
    rng = np.random.default_rng(seed_seq)
    k = _backend.get(backend)
    best_val = -math.inf
    best = None
    done = 0
    while done < budget:
        m = min(batch, budget - done)
        n = int(rng.integers(2, 9))
        w, r = random_ensembles(eta, n, m, rng, backend)
        vals = k.alice_work_batch(w, r, eta, c)
        i = int(vals.argmax())
        if vals[i] > best_val:
            best_val = float(vals[i])
            keep = w[i] > 0
            best = (w[i][keep].copy(), r[i][keep].copy())
        done += m
    return best_val, best


@dataclass(frozen=True)
class SearchResult:
    best: HiddenStateEnsemble
    value: float
    bound: float | None
    sampled: int

    @property
    def margin(self) -> float | None:
        return None if self.bound is None else self.bound - self.value


def search_max_classical_work(
    eta: float,
    budget: int,
    seed: int = 0,
    c: float | None = None,
    workers: int = 1,
    refine_steps: int | None = None,
    backend: str | None = None,
) -> SearchResult:
    """Maximise the classical demon's work over random and constructed ensembles.

    The budget is split over ``workers`` streams spawned from ``seed``; the
    result only depends on (seed, workers).  The bound is reported only for
    the default ratio.
    """
    eta = float(eta)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    default_c = c is None
    c = default_ratio(eta) if c is None else float(c)

    candidates = [energy_eigenstate_ensemble(eta)]
    if abs(eta) <= 1.0 / math.sqrt(2.0):
        candidates.append(saturating_ensemble(eta))
    best = max(candidates, key=lambda e: alice_optimal_work(e, c))
    best_val = alice_optimal_work(best, c)

    seqs = np.random.SeedSequence(seed).spawn(workers)
    shares = [budget // workers + (1 if i < budget % workers else 0) for i in range(workers)]
    jobs = [(eta, c, share, seq, backend) for share, seq in zip(shares, seqs) if share > 0]
    if workers == 1:
        results = [_worker(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _worker(*job), jobs))
    # ordered reduction; ties keep the earliest candidate
    for val, arrays in results:
        if arrays is not None and val > best_val:
            try:
                cand = HiddenStateEnsemble(arrays[0], arrays[1], eta)
            except EnsembleError:
                continue
            best, best_val = cand, alice_optimal_work(cand, c)

    steps = min(budget, 1000) if refine_steps is None else refine_steps
    if steps > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(workers + 1)[-1])
        best, best_val = hill_climb(best, c, steps, rng)

    bound = engine.classical_bound(eta) if default_c else None
    return SearchResult(best, best_val, bound, budget)
