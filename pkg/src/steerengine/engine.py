"""Closed-form physics of the single-qubit engine.

Units: k_B = hbar = 1 and the gap of ``H_S = |1><1|`` is 1, so every work
value is in units of the gap.  The Gibbs polarization ``eta = <sigma_z>`` is
the primary parameter; the physical thermal range is ``(-1, 0]`` but all
formulas are evaluated on the open interval ``(-1, 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from . import qcore
from .qcore import BlochVector


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not -1.0 < eta < 1.0:
        raise ValueError(f"eta must lie in the open interval (-1, 1), got {eta}")
    return eta


def _check_q(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return q


def default_ratio(eta: float) -> float:
    """Blue-to-red cell ratio c = 1/sqrt(1 - eta^2) at which the bound holds."""
    eta = _check_eta(eta)
    return 1.0 / math.sqrt(1.0 - eta * eta)


@dataclass(frozen=True)
class EngineParams:
    eta: float
    q: float = 1.0
    c: float | None = None

    def __post_init__(self):
        _check_eta(self.eta)
        _check_q(self.q)
        if self.c is not None and not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"cell ratio c must be finite and positive, got {self.c}")

    @property
    def ratio(self) -> float:
        return default_ratio(self.eta) if self.c is None else float(self.c)

    @property
    def ratio_overridden(self) -> bool:
        return self.c is not None and not math.isclose(self.c, default_ratio(self.eta), rel_tol=0, abs_tol=1e-12)

    @property
    def physical(self) -> bool:
        return self.eta <= 0.0


def gibbs_state(eta: float) -> np.ndarray:
    eta = _check_eta(eta)
    return qcore.bloch_to_density((0.0, 0.0, eta))


def eta_from_beta(beta: float) -> float:
    beta = float(beta)
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    # (e^-b - 1)/(e^-b + 1) == -tanh(b/2), stable for large b
    return -math.tanh(0.5 * beta)


def beta_from_eta(eta: float) -> float:
    eta = _check_eta(eta)
    if eta > 0:
        raise ValueError(f"eta = {eta} > 0 corresponds to no real temperature")
    return 2.0 * math.atanh(-eta)


def temperature_from_eta(eta: float) -> float:
    beta = beta_from_eta(eta)
    return math.inf if beta == 0 else 1.0 / beta


BUTTONS = ("z1", "z0", "x+", "x-")


class WorkUnitarySet(NamedTuple):
    u_z1: np.ndarray
    u_z0: np.ndarray
    u_x_plus: np.ndarray
    u_x_minus: np.ndarray

    def for_button(self, button: str) -> np.ndarray:
        return {"z1": self.u_z1, "z0": self.u_z0, "x+": self.u_x_plus, "x-": self.u_x_minus}[button]


def work_unitaries(eta: float) -> WorkUnitarySet:
    """Bob's four gates.

    The blue-cell gates are the real reflections that send the tilted states
    ``(+-sqrt(1-eta^2), 0, eta)`` to the ground state.
    """
    eta = _check_eta(eta)
    a = math.sqrt((1.0 - eta) / 2.0)
    b = math.sqrt((1.0 + eta) / 2.0)
    u_plus = np.array([[-a, b], [b, a]], dtype=complex)
    u_minus = np.array([[a, b], [-b, a]], dtype=complex)
    return WorkUnitarySet(qcore.SIGMA_X.copy(), qcore.I2.copy(), u_plus, u_minus)


def button_rotation_angle(button: str, eta: float) -> float | None:
    """Angle phi of the y-rotation exp(-i phi sigma_y / 2) with the same energy action as ``button``.

    ``z0`` is the idle button and returns ``None``.
    """
    eta = _check_eta(eta)
    tilt = math.pi - math.acos(eta)
    return {"z1": math.pi, "z0": None, "x+": tilt, "x-": -tilt}[button]


def y_rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def energy(rho: np.ndarray) -> float:
    return qcore.expectation(qcore.H_S, rho)


def extracted_work(u: np.ndarray, rho: np.ndarray) -> float:
    """Energy drop Tr{H rho} - Tr{H U rho U^dag} of the work medium."""
    return energy(rho) - energy(qcore.apply_unitary(u, rho))


class WorkObservables(NamedTuple):
    z1: float
    z0: float
    x_plus: float
    x_minus: float

    def for_button(self, button: str) -> float:
        return {"z1": self.z1, "z0": self.z0, "x+": self.x_plus, "x-": self.x_minus}[button]


def work_observables(r, eta: float) -> WorkObservables:
    x, _, z = (float(c) for c in r)
    eta = _check_eta(eta)
    s = math.sqrt(1.0 - eta * eta)
    return WorkObservables(
        z,
        0.0,
        0.5 * (z * (1.0 + eta) + x * s),
        0.5 * (z * (1.0 + eta) - x * s),
    )


def classical_bound(eta: float) -> float:
    """Largest average work any local-hidden-state demon can deliver at the default ratio."""
    eta = _check_eta(eta)
    s = math.sqrt(1.0 - eta * eta)
    return (eta * (s + eta + 1.0) + math.sqrt(2.0 - 2.0 * eta * eta)) / (2.0 * (s + 1.0))


def optimal_work(eta: float) -> float:
    return 0.5 * (1.0 + _check_eta(eta))


def quantum_work(eta: float, q: float) -> float:
    eta, q = _check_eta(eta), _check_q(q)
    s = math.sqrt(1.0 - eta * eta)
    return (eta + 1.0) * (s + eta - eta * q + q) / (2.0 * (s + 1.0))


def component_works(eta: float, q: float) -> tuple[float, float]:
    """Red- and blue-cell averages (W_z, W_x) for the q-mixed demon."""
    eta, q = _check_eta(eta), _check_q(q)
    return 0.5 * (1.0 + eta), 0.5 * (q + eta + eta * eta - q * eta * eta)


def mix_colors(w_red: float, w_blue: float, c: float) -> float:
    return (w_red + c * w_blue) / (1.0 + c)


def _violation_gap(eta: float) -> float:
    return quantum_work(eta, 1.0) - classical_bound(eta)


def violation_threshold_eta(xtol: float = 1e-13) -> float:
    """Polarization below which even the entangled demon cannot beat the bound."""
    lo, hi = -0.999, 0.0
    assert _violation_gap(lo) < 0 < _violation_gap(hi), "threshold bracket lost"
    return float(bisect(_violation_gap, lo, hi, xtol=xtol, maxiter=200))


def violation_boundary_q(eta: float) -> float | None:
    """Smallest q in [0, 1] at which the q-mixed demon reaches the bound, or None."""
    eta = _check_eta(eta)
    s = math.sqrt(1.0 - eta * eta)
    # quantum_work is linear in q: W(q) = (1+eta)(s + eta + q (1 - eta)) / (2 (s + 1))
    q_star = (2.0 * (s + 1.0) * classical_bound(eta) / (1.0 + eta) - s - eta) / (1.0 - eta)
    if q_star > 1.0:
        # tolerate round-off right at the threshold
        if q_star - 1.0 <= 1e-12:
            return 1.0
        return None
    return max(q_star, 0.0)
