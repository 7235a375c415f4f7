"""Monte Carlo harness for the red/blue cell protocol.

Bob places thermal qubits in red cells (buttons ``z1``/``z0``) and blue
cells (buttons ``x+``/``x-``), tells Alice the color and presses whatever
button she announces.  Alice's side is a :class:`Strategy`; Bob's side only
ever sees the button, while the conditional state of his qubit goes straight
into the work accounting.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _backend, collision, engine, qcore
from .engine import EngineParams
from .lhs import HiddenStateEnsemble, blue_button, red_button

RED = "red"
BLUE = "blue"
COLORS = (RED, BLUE)
COLOR_BUTTONS = {RED: ("z1", "z0"), BLUE: ("x+", "x-")}
MODES = ("analytic", "sampled")
DEFAULT_COLLISION_STEPS = 256
_BLOCK = 1 << 16


# strategies -------------------------------------------------------------

@dataclass(frozen=True)
class Quantum:
    """Alice holds the environment of the q-mixed state and measures sigma_z (red) or sigma_x (blue)."""
    q: float = 1.0

    label = "quantum"


@dataclass(frozen=True, eq=False)
class JointState:
    """Like :class:`Quantum` but for an arbitrary (Bob, Alice) two-qubit state."""
    rho: np.ndarray

    label = "joint"


@dataclass(frozen=True)
class ClassicalLHS:
    """Alice knows the hidden state of every copy and announces the better button."""
    ensemble: HiddenStateEnsemble

    label = "classical"


@dataclass(frozen=True)
class FixedDecomposition:
    """Separable states built from the energy (D1) or tilted (D2) decomposition."""
    which: str = "D1"

    label = "fixed"

    def __post_init__(self):
        if self.which not in ("D1", "D2"):
            raise ValueError(f"decomposition must be D1 or D2, got {self.which!r}")


Strategy = Quantum | JointState | ClassicalLHS | FixedDecomposition


class Announcement(NamedTuple):
    probability: float
    button: str
    state: np.ndarray


def prepare_joint_state(eta: float, q: float) -> np.ndarray:
    """q |Psi><Psi| + (1 - q) rho_cl on (S, E)."""
    eta = float(eta)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    pure = collision.subenv_state(eta)
    classical = 0.5 * (1 + eta) * qcore.projector(qcore.ket("11")) + 0.5 * (1 - eta) * qcore.projector(qcore.ket("00"))
    return q * pure + (1.0 - q) * classical


def decomposition_state(eta: float, which: str) -> np.ndarray:
    if which == "D1":
        return prepare_joint_state(eta, 0.0)
    s = math.sqrt(1.0 - eta * eta)
    plus = qcore.bloch_to_density((s, 0.0, eta))
    minus = qcore.bloch_to_density((-s, 0.0, eta))
    return 0.5 * qcore.tensor(plus, qcore.projector(qcore.ket("1"))) + 0.5 * qcore.tensor(
        minus, qcore.projector(qcore.ket("0"))
    )


def _measured(joint: np.ndarray, basis: Sequence[np.ndarray], buttons: Sequence[str]) -> list[Announcement]:
    return [
        Announcement(o.probability, b, o.state)
        for o, b in zip(qcore.steer(joint, basis), buttons)
        if o.state is not None
    ]


def _sign_rule(color: str, state: np.ndarray) -> str:
    r = qcore.density_to_bloch(state)
    return red_button(r.z) if color == RED else blue_button(r.x)


def announcements(strategy: Strategy, color: str, eta: float) -> list[Announcement]:
    """Every (probability, button, Bob's conditional state) Alice can produce for a cell."""
    if color not in COLORS:
        raise ValueError(f"unknown cell color {color!r}")
    if isinstance(strategy, (Quantum, JointState)):
        joint = prepare_joint_state(eta, strategy.q) if isinstance(strategy, Quantum) else qcore.check_density(strategy.rho)
        basis = qcore.z_basis() if color == RED else qcore.x_basis()
        return _measured(joint, basis, COLOR_BUTTONS[color])
    if isinstance(strategy, ClassicalLHS):
        ens = strategy.ensemble
        return [
            Announcement(p, red_button(r[2]) if color == RED else blue_button(r[0]), qcore.bloch_to_density(r))
            for p, r in ens.members()
            if p > 0
        ]
    if isinstance(strategy, FixedDecomposition):
        # Alice reads the hidden label off sigma_z and then announces the better button
        outcomes = qcore.steer(decomposition_state(eta, strategy.which), qcore.z_basis())
        return [
            Announcement(o.probability, _sign_rule(color, o.state), o.state)
            for o in outcomes
            if o.state is not None
        ]
    raise TypeError(f"unsupported strategy {strategy!r}")


def alice_announce(color: str, strategy: Strategy, eta: float, rng: np.random.Generator) -> tuple[str, np.ndarray]:
    menu = announcements(strategy, color, eta)
    u = rng.random()
    acc = 0.0
    for a in menu:
        acc += a.probability
        if u < acc:
            return a.button, a.state
    return menu[-1].button, menu[-1].state


# configuration and results ---------------------------------------------

def allocate_cells(total: int, c: float) -> tuple[int, int]:
    """Largest-remainder split of ``total`` cells into (red, blue) with blue/red close to c."""
    if total < 1:
        raise ValueError("need at least one cell")
    red_quota = total / (1.0 + c)
    blue_quota = total - red_quota
    n_red, n_blue = math.floor(red_quota), math.floor(blue_quota)
    if n_red + n_blue < total:
        if red_quota - n_red >= blue_quota - n_blue:
            n_red += 1
        else:
            n_blue += 1
    if n_red == 0:
        n_red, n_blue = 1, total - 1
    return n_red, n_blue


@dataclass(frozen=True)
class GameConfig:
    params: EngineParams
    n_red: int
    n_blue: int
    mode: str = "analytic"
    seed: int = 0
    strategy: Strategy = field(default_factory=Quantum)
    collision_steps: int = DEFAULT_COLLISION_STEPS

    def __post_init__(self):
        if self.n_red < 1 or self.n_blue < 0:
            raise ValueError("need n_red >= 1 and n_blue >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.collision_steps < 1:
            raise ValueError("collision_steps must be at least 1")

    @classmethod
    def from_cells(cls, params: EngineParams, cells: int, **kw) -> "GameConfig":
        n_red, n_blue = allocate_cells(cells, params.ratio)
        return cls(params, n_red, n_blue, **kw)

    @property
    def cells(self) -> int:
        return self.n_red + self.n_blue


class WorkRecord(NamedTuple):
    cell_color: str
    button: str
    work: float
    sampled: bool


@dataclass
class GameSummary:
    eta: float
    q: float | None
    c: float
    n_red: int
    n_blue: int
    mode: str
    seed: int
    mean_work: float
    std_error: float
    bound: float
    violation: bool | None
    strategy: str
    red_mean: float
    blue_mean: float
    expected_mean: float
    exact_ratio_mean: float
    c_overridden: bool
    records: list[WorkRecord] | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "eta", "q", "c", "n_red", "n_blue", "mode", "seed", "mean_work", "std_error", "bound",
            "violation", "strategy", "red_mean", "blue_mean", "expected_mean", "exact_ratio_mean",
            "c_overridden",
        )}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @property
    def rounding_deviation(self) -> float:
        """Exact offset of the realized-count mean from the exact-ratio mean."""
        return self.expected_mean - self.exact_ratio_mean


def cell_work(button: str, state: np.ndarray, eta: float) -> float:
    """Mean work Bob's ideal cell extracts from ``state`` when ``button`` is pressed."""
    return engine.extracted_work(engine.work_unitaries(eta).for_button(button), state)


def _device_runs(menu: list[Announcement], eta: float, steps: int):
    """Collision work-storage records for each announcement (None for the idle button)."""
    runs = []
    for a in menu:
        phi = engine.button_rotation_angle(a.button, eta)
        if phi is None:
            runs.append(None)
        else:
            runs.append(collision.run_work_extraction(a.state, collision.WorkCollisionConfig(phi, steps)))
    return runs


def _sample_color(menu, runs, seed, first_cell, n, kernels):
    probs = np.array([a.probability for a in menu])
    cum = np.cumsum(probs) / probs.sum()
    n_anc = np.array([0 if r is None else len(r.records) for r in runs], dtype=np.int64)
    exc = np.zeros((len(menu), max(1, int(n_anc.max()))))
    for k, r in enumerate(runs):
        if r is not None:
            exc[k, : n_anc[k]] = collision.excitation_probabilities(r.records)
    outcomes = []
    works = []
    for start in range(0, n, _BLOCK):
        m = min(_BLOCK, n - start)
        o, w = kernels.sample_cells(seed, first_cell + start, m, cum, exc, n_anc, 1.0, collision.ANCILLA_EXCITATION)
        outcomes.append(o)
        works.append(w)
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(outcomes), np.concatenate(works)


def run_game(cfg: GameConfig, keep_records: bool = False, backend: str | None = None) -> GameSummary:
    eta = cfg.params.eta
    c = cfg.params.ratio
    bound = engine.classical_bound(eta)
    n_total = cfg.cells
    menus = {color: announcements(cfg.strategy, color, eta) for color in COLORS}
    counts = {RED: cfg.n_red, BLUE: cfg.n_blue}
    records: list[WorkRecord] | None = [] if keep_records else None

    if cfg.mode == "analytic":
        means = {}
        for color in COLORS:
            per = [cell_work(a.button, a.state, eta) for a in menus[color]]
            means[color] = float(sum(a.probability * w for a, w in zip(menus[color], per)))
            if records is not None:
                # one record per distinct announcement, carrying its mean work
                records.extend(WorkRecord(color, a.button, w, False) for a, w in zip(menus[color], per))
        mean = (cfg.n_red * means[RED] + cfg.n_blue * means[BLUE]) / n_total
        expected = mean
        std_error = 0.0
        exact = engine.mix_colors(means[RED], means[BLUE], c)
        score = min(mean, exact)
    else:
        kernels = _backend.get(backend)
        means = {}
        sums = {}
        variances = {}
        expected_color = {}
        first = {RED: 0, BLUE: cfg.n_red}
        for color in COLORS:
            menu = menus[color]
            runs = _device_runs(menu, eta, cfg.collision_steps)
            expected_color[color] = float(sum(
                a.probability * (0.0 if r is None else r.total_mean_work) for a, r in zip(menu, runs)
            ))
            n = counts[color]
            outcomes, works = _sample_color(menu, runs, cfg.seed, first[color], n, kernels)
            sums[color] = float(works.sum())
            means[color] = sums[color] / n if n else 0.0
            variances[color] = float(works.var(ddof=1)) if n > 1 else 0.0
            if records is not None:
                records.extend(
                    WorkRecord(color, menu[k].button, float(w), True) for k, w in zip(outcomes, works)
                )
        mean = (sums[RED] + sums[BLUE]) / n_total
        std_error = math.sqrt(cfg.n_red * variances[RED] + cfg.n_blue * variances[BLUE]) / n_total
        expected = (cfg.n_red * expected_color[RED] + cfg.n_blue * expected_color[BLUE]) / n_total
        exact = engine.mix_colors(expected_color[RED], expected_color[BLUE], c)
        score = mean - 3.0 * std_error

    overridden = cfg.params.ratio_overridden
    violation = None if overridden else bool(score > bound)
    return GameSummary(
        eta=eta,
        q=cfg.strategy.q if isinstance(cfg.strategy, Quantum) else None,
        c=c,
        n_red=cfg.n_red,
        n_blue=cfg.n_blue,
        mode=cfg.mode,
        seed=cfg.seed,
        mean_work=float(mean),
        std_error=float(std_error),
        bound=bound,
        violation=violation,
        strategy=cfg.strategy.label,
        red_mean=float(means[RED]),
        blue_mean=float(means[BLUE]),
        expected_mean=float(expected),
        exact_ratio_mean=float(exact),
        c_overridden=overridden,
        records=records,
    )


# violation region ---------------------------------------------------------

class RegionRow(NamedTuple):
    eta: float
    q: float
    w_qu: float
    bound: float
    violation: bool


def sweep_region(eta_grid: Sequence[float], q_grid: Sequence[float]) -> list[RegionRow]:
    if len(eta_grid) == 0 or len(q_grid) == 0:
        raise ValueError("grids must be non-empty")
    rows = []
    for eta in eta_grid:
        bound = engine.classical_bound(eta)
        for q in q_grid:
            w = engine.quantum_work(eta, q)
            rows.append(RegionRow(float(eta), float(q), w, bound, w > bound))
    return rows


def region_boundary(eta_grid: Sequence[float]) -> list[tuple[float, float]]:
    out = []
    for eta in eta_grid:
        q_star = engine.violation_boundary_q(eta)
        if q_star is not None:
            out.append((float(eta), q_star))
    return out
