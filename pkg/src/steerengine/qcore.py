"""Dense linear algebra for one to four qubits.

Sign and ordering convention
----------------------------
The excited state ``|1>`` is the *first* basis vector of every qubit and the
ground state ``|0>`` the second.  With this ordering the textbook Pauli
matrices apply unchanged and

    sigma_z = |1><1| - |0><0|,

so the excited state has Bloch component ``z = +1`` and the qubit
Hamiltonian ``H_S = |1><1|`` has ``Tr{H_S rho} = (1 + z) / 2``.  This is the
opposite of the usual "|0> is spin up" habit; use :func:`ket` and
:func:`basis_index` instead of hand-written indices.

Multi-qubit operators are Kronecker products with the first factor on the
left, i.e. ``tensor(a, b)`` acts as ``a`` on subsystem 0 and ``b`` on
subsystem 1.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

ATOL = 1e-12
PSD_FLOOR = -1e-10
MAX_DIM = 16

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# raising operator |1><0|
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.conj().T
H_S = np.array([[1, 0], [0, 0]], dtype=complex)
SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(self.norm - 1.0) <= tol


def basis_index(bits: str) -> int:
    """Row index of the computational basis state labelled by ``bits``."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"invalid basis label {bits!r}")
    idx = 0
    for b in bits:
        idx = 2 * idx + (1 - int(b))
    return idx


def ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[basis_index(bits)] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def _num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim or n < 1:
        raise ValueError(f"dimension {dim} is not a qubit register")
    return n


def is_hermitian(m: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.allclose(m, m.conj().T, rtol=0.0, atol=atol))


def check_density(rho: np.ndarray, atol: float = ATOL) -> np.ndarray:
    """Validate and return ``rho`` as a complex density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    _num_qubits(rho.shape[0])
    if rho.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {rho.shape[0]} exceeds {MAX_DIM}")
    if not is_hermitian(rho, atol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix has trace {tr!r}")
    if np.linalg.eigvalsh(rho).min() < PSD_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def check_unitary(u: np.ndarray, atol: float = ATOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"gate must be square, got shape {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0.0, atol=atol):
        raise ValueError("gate is not unitary")
    return u


def bloch_to_density(r: Sequence[float]) -> np.ndarray:
    x, y, z = (float(c) for c in r)
    if x * x + y * y + z * z > (1.0 + ATOL) ** 2:
        raise ValueError(f"Bloch vector {(x, y, z)} lies outside the unit ball")
    return 0.5 * (I2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> BlochVector:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a single-qubit state, got shape {rho.shape}")
    # closed form of Tr{sigma_k rho}
    return BlochVector(
        float(2.0 * rho[0, 1].real),
        float(-2.0 * rho[0, 1].imag),
        float((rho[0, 0] - rho[1, 1]).real),
    )


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, ``a`` on the left (subsystem 0)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise ValueError(f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}")
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced state on the qubits listed in ``keep`` (kept in ascending order)."""
    rho = np.asarray(rho, dtype=complex)
    n = _num_qubits(rho.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"invalid subsystem set {keep} for {n} qubits")
    traced = [k for k in range(n) if k not in keep]
    t = rho.reshape([2] * (2 * n))
    # letters: row indices a.., column indices A..; traced pairs share a letter
    rows = [chr(97 + k) for k in range(n)]
    cols = [chr(65 + k) for k in range(n)]
    for k in traced:
        cols[k] = rows[k]
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 2 ** len(keep)
    return reduced.reshape(d, d)


def permute_subsystems(op: np.ndarray, order: Sequence[int]) -> np.ndarray:
    """Reorder qubits so that new subsystem ``i`` is old subsystem ``order[i]``."""
    op = np.asarray(op, dtype=complex)
    n = _num_qubits(op.shape[0])
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of {n} subsystems")
    t = op.reshape([2] * (2 * n)).transpose(order + [n + k for k in order])
    return t.reshape(op.shape)


def apply_unitary(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if u.shape != rho.shape:
        raise ValueError(f"gate shape {u.shape} does not match state shape {rho.shape}")
    return u @ rho @ u.conj().T


def expectation(obs: np.ndarray, rho: np.ndarray) -> float:
    obs = np.asarray(obs, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if obs.shape != rho.shape:
        raise ValueError(f"observable shape {obs.shape} does not match state shape {rho.shape}")
    if not is_hermitian(obs):
        raise ValueError("observable is not Hermitian")
    val = np.trace(obs @ rho)
    if abs(val.imag) > ATOL:
        raise ValueError(f"expectation value has imaginary part {val.imag!r}")
    return float(val.real)


class SteeringOutcome(NamedTuple):
    probability: float
    state: np.ndarray


def steer(rho_ab: np.ndarray, projectors: Sequence[np.ndarray]) -> list[SteeringOutcome]:
    """Measure the second qubit of ``rho_ab`` and return Bob's conditional states.

    Outcomes with zero probability are returned with a ``None`` state.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape != (4, 4):
        raise ValueError("steer expects a two-qubit state")
    projs = [np.asarray(p, dtype=complex) for p in projectors]
    total = sum(projs, np.zeros((2, 2), dtype=complex))
    if not np.allclose(total, I2, atol=ATOL):
        raise ValueError("projectors do not sum to the identity")
    for p in projs:
        if not np.allclose(p @ p, p, atol=ATOL) or not is_hermitian(p):
            raise ValueError("measurement operator is not an orthogonal projector")
    out = []
    for p in projs:
        unnorm = partial_trace(tensor(I2, p) @ rho_ab, [0])
        prob = float(np.trace(unnorm).real)
        out.append(SteeringOutcome(prob, unnorm / prob if prob > ATOL else None))
    return out


def z_basis() -> list[np.ndarray]:
    """Projectors for outcomes 1 and 0 of sigma_z, in that order."""
    return [projector(ket("1")), projector(ket("0"))]


def x_basis() -> list[np.ndarray]:
    """Projectors for outcomes +1 and -1 of sigma_x, in that order."""
    plus = (ket("1") + ket("0")) / np.sqrt(2)
    minus = (ket("1") - ket("0")) / np.sqrt(2)
    return [projector(plus), projector(minus)]


def _eigvalsh_2x2(m: np.ndarray) -> np.ndarray:
    a = m[0, 0].real
    d = m[1, 1].real
    half_gap = np.sqrt(0.25 * (a - d) ** 2 + abs(m[0, 1]) ** 2)
    mid = 0.5 * (a + d)
    return np.array([mid - half_gap, mid + half_gap])


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex)
    if diff.shape == (2, 2):
        ev = _eigvalsh_2x2(diff)
    else:
        ev = np.linalg.eigvalsh(diff)
    return float(0.5 * np.abs(ev).sum())


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)
