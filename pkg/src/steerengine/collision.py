"""Exact collision models.

Work storage
    The system qubit meets a stream of ancillas, each prepared in the
    sigma_y eigenstate ``|+y> = (|1> + i|0>)/sqrt(2)`` (Bloch vector
    ``(0, 1, 0)``), through ``exp(-i dphi (s+ s- + s- s+))``.  In the limit of
    many weak collisions the system undergoes ``exp(-i phi sigma_y / 2)``.
    The coupling conserves the excitation number, so with the ancilla
    Hamiltonian ``scale * sigma_z`` at ``scale = 1/2`` the ancillas gain
    exactly the energy the system loses, collision by collision.

Thermalization
    Bob's qubit S and Alice's control qubit C meet fresh two-qubit
    subenvironments E E' prepared in ``sqrt((1+eta)/2)|11> + sqrt((1-eta)/2)|00>``.
    Subsystem order in the 16-dimensional space is (S, E, E', C).  Two
    couplings are available:

    ``"joint"`` (default)
        ``exp(-i theta SWAP_SE SWAP_E'C)``: the pair (S, C) is partially
        swapped with the pair (E, E').  The subenvironment state, copied onto
        (S, C), is an exact fixed point.
    ``"product"``
        ``exp(-i theta SWAP_SE) exp(-i theta SWAP_E'C)``, two independent
        partial swaps.  Bob's marginal still thermalizes but (S, C) does not
        settle on the entangled state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _backend, qcore
from .qcore import H_S, SWAP

ANCILLA_STATE = np.array([1.0, 1.0j]) / math.sqrt(2.0)
ANCILLA_EXCITATION = 0.5


@dataclass(frozen=True)
class WorkCollisionConfig:
    phi: float
    steps: int
    ancilla_hamiltonian_scale: float = 0.5

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")

    @property
    def delta_phi(self) -> float:
        return self.phi / self.steps

    @property
    def level_spacing(self) -> float:
        return 2.0 * self.ancilla_hamiltonian_scale


@dataclass(frozen=True)
class AncillaRecord:
    mean_energy_gain: float
    excitation_probability: float
    sampled_outcome: int | None = None


class WorkRun(NamedTuple):
    final_state: np.ndarray
    records: tuple[AncillaRecord, ...]
    total_mean_work: float


def work_collision_unitary(delta_phi: float) -> np.ndarray:
    """exp(-i dphi (s+ (x) s- + s- (x) s+)) on (system, ancilla)."""
    c, s = math.cos(delta_phi), math.sin(delta_phi)
    u = np.eye(4, dtype=complex)
    i10, i01 = qcore.basis_index("10"), qcore.basis_index("01")
    u[i10, i10] = u[i01, i01] = c
    u[i10, i01] = u[i01, i10] = -1j * s
    return u


def ancilla_density() -> np.ndarray:
    return qcore.projector(ANCILLA_STATE)


def _records(probs: np.ndarray, spacing: float) -> tuple[AncillaRecord, ...]:
    gains = spacing * (probs - ANCILLA_EXCITATION)
    return tuple(AncillaRecord(float(g), float(p)) for g, p in zip(gains, probs))


def run_work_extraction(rho_s: np.ndarray, cfg: WorkCollisionConfig, method: str = "kernel") -> WorkRun:
    """Drive the system through ``cfg.steps`` collisions.

    ``method="kernel"`` uses the selected kernel backend; ``"matrix"`` builds
    every joint state explicitly with :mod:`qcore` and serves as the
    reference route.
    """
    rho_s = qcore.check_density(rho_s)
    if rho_s.shape != (2, 2):
        raise ValueError("work extraction acts on a single qubit")
    spacing = cfg.level_spacing
    if method == "kernel":
        probs, final = _backend.kernels.work_chain(qcore.density_to_bloch(rho_s), cfg.delta_phi, cfg.steps)
        final_state = qcore.bloch_to_density(final)
    elif method == "matrix":
        u = work_collision_unitary(cfg.delta_phi)
        rho_a = ancilla_density()
        probs = np.empty(cfg.steps)
        state = rho_s
        for k in range(cfg.steps):
            joint = qcore.apply_unitary(u, qcore.tensor(state, rho_a))
            probs[k] = qcore.partial_trace(joint, [1])[0, 0].real
            state = qcore.partial_trace(joint, [0])
        final_state = state
    else:
        raise ValueError(f"unknown method {method!r}")
    records = _records(np.asarray(probs), spacing)
    total = float(spacing * (np.sum(probs) - ANCILLA_EXCITATION * len(probs)))
    return WorkRun(final_state, records, total)


def excitation_probabilities(records) -> np.ndarray:
    return np.array([r.excitation_probability for r in records])


def sample_work(records, rng: np.random.Generator, size: int | None = None, spacing: float = 1.0):
    """Measure every ancilla in its energy basis and add up the energy gains.

    Each ancilla is found excited with its own probability; its gain is
    ``spacing * (bit - 1/2)`` relative to the mean energy of ``|+y>``.
    """
    probs = excitation_probabilities(records)
    n = 1 if size is None else int(size)
    counts = np.zeros(n, dtype=np.int64)
    for p in probs:
        counts += rng.random(n) < p
    works = spacing * (counts - ANCILLA_EXCITATION * len(probs))
    return float(works[0]) if size is None else works


def sample_records(records, rng: np.random.Generator) -> tuple[AncillaRecord, ...]:
    """Copy of ``records`` with one sampled outcome bit attached to each ancilla."""
    return tuple(
        AncillaRecord(r.mean_energy_gain, r.excitation_probability, int(rng.random() < r.excitation_probability))
        for r in records
    )


# thermalization ---------------------------------------------------------

SCHEMES = ("joint", "product")


@dataclass(frozen=True)
class ThermalizationConfig:
    eta: float
    coupling: float
    steps: int = 1
    scheme: str = "joint"

    def __post_init__(self):
        if not -1.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (-1, 1), got {self.eta}")
        if not 0.0 <= self.coupling <= math.pi / 2:
            raise ValueError(f"coupling angle must lie in [0, pi/2], got {self.coupling}")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


def subenv_vector(eta: float) -> np.ndarray:
    return math.sqrt((1 + eta) / 2) * qcore.ket("11") + math.sqrt((1 - eta) / 2) * qcore.ket("00")


def subenv_state(eta: float) -> np.ndarray:
    if not -1.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (-1, 1), got {eta}")
    return qcore.projector(subenv_vector(eta))


def swap_coupling(theta: float) -> np.ndarray:
    """exp(-i theta SWAP) = cos(theta) 1 - i sin(theta) SWAP."""
    return math.cos(theta) * np.eye(4) - 1j * math.sin(theta) * SWAP


def collision_unitary(theta: float, scheme: str = "joint") -> np.ndarray:
    """16x16 collision unitary in (S, E, E', C) order."""
    if scheme == "product":
        q = swap_coupling(theta)
        return np.kron(q, q)
    if scheme == "joint":
        double_swap = np.kron(SWAP, SWAP)
        return math.cos(theta) * np.eye(16) - 1j * math.sin(theta) * double_swap
    raise ValueError(f"scheme must be one of {SCHEMES}")


# (S, C, E, E') -> (S, E, E', C)
_TO_CHAIN = [0, 2, 3, 1]


def thermalization_step(rho_sc: np.ndarray, cfg: ThermalizationConfig) -> np.ndarray:
    rho_sc = np.asarray(rho_sc, dtype=complex)
    if rho_sc.shape != (4, 4):
        raise ValueError("thermalization acts on the (S, C) pair")
    joint = qcore.permute_subsystems(np.kron(rho_sc, subenv_state(cfg.eta)), _TO_CHAIN)
    joint = qcore.apply_unitary(collision_unitary(cfg.coupling, cfg.scheme), joint)
    return qcore.partial_trace(joint, [0, 3])


def thermalization_channel(cfg: ThermalizationConfig) -> np.ndarray:
    """Superoperator S with vec(step(rho)) = S vec(rho), row-major vec."""
    sup = np.empty((16, 16), dtype=complex)
    for k in range(16):
        e = np.zeros(16, dtype=complex)
        e[k] = 1.0
        sup[:, k] = thermalization_step(e.reshape(4, 4), cfg).reshape(16)
    return sup


@dataclass(frozen=True)
class ThermalizationRun:
    final_state: np.ndarray
    distances: np.ndarray
    bloch_s: np.ndarray = field(repr=False)
    converged_step: int | None

    @property
    def converged(self) -> bool:
        return self.converged_step is not None


def run_thermalization(rho0: np.ndarray, cfg: ThermalizationConfig, tol: float | None = None) -> ThermalizationRun:
    """Iterate the one-collision map ``cfg.steps`` times (stop early once below ``tol``).

    ``distances[k]`` is the trace distance to the entangled target after
    collision ``k + 1``; ``bloch_s[k]`` the Bloch vector of Bob's marginal.
    """
    rho = qcore.check_density(rho0)
    target = subenv_state(cfg.eta)
    sup = thermalization_channel(cfg)
    distances = []
    blochs = []
    hit = None
    for k in range(cfg.steps):
        rho = (sup @ rho.reshape(16)).reshape(4, 4)
        # remove round-off drift in hermiticity and trace
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.trace(rho).real
        distances.append(qcore.trace_distance(rho, target))
        blochs.append(tuple(qcore.density_to_bloch(qcore.partial_trace(rho, [0]))))
        if tol is not None and distances[-1] < tol:
            hit = k + 1
            break
    return ThermalizationRun(rho, np.array(distances), np.array(blochs), hit)


def energy_change(rho_before: np.ndarray, rho_after: np.ndarray) -> float:
    return qcore.expectation(H_S, rho_after) - qcore.expectation(H_S, rho_before)
