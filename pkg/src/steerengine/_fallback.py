"""Pure numpy implementations of the hot kernels.

Every function here has a twin of the same name and signature in
``_kernels.pyx``; :mod:`steerengine._backend` picks one at import time.
"""
from __future__ import annotations

import math

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U64_MASK = (1 << 64) - 1
_CHUNK = 4096


def _mix64(z):
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _cell_keys(seed: int, cells: np.ndarray) -> np.ndarray:
    seed_arr = np.array([int(seed) & _U64_MASK], dtype=np.uint64)
    with np.errstate(over="ignore"):
        seed_key = _mix64(seed_arr + GOLDEN)
        return _mix64(seed_key + (cells.astype(np.uint64) + np.uint64(1)) * GOLDEN)


def _uniforms(keys: np.ndarray, first_draw: int, ndraws: int) -> np.ndarray:
    # draw d of a cell hashes the counter d + 1
    j = np.arange(first_draw + 1, first_draw + ndraws + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = _mix64(keys[:, None] + j[None, :] * GOLDEN)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def cell_uniforms(seed: int, cells, ndraws: int) -> np.ndarray:
    """Counter-based uniforms in [0, 1): row i holds draws 0..ndraws-1 of cell ``cells[i]``."""
    cells = np.asarray(cells, dtype=np.int64)
    return _uniforms(_cell_keys(seed, cells), 0, ndraws)


def sample_cells(seed, first_cell, n_cells, cum_probs, exc_probs, n_anc, spacing, baseline):
    """Sample Alice's outcome and the ancilla work meter for a block of cells.

    Draw 0 of each cell picks the outcome; draws 1..n_anc[k] decide the
    ancilla excitations of the work storage for outcome k.
    """
    cum_probs = np.asarray(cum_probs, dtype=np.float64)
    exc_probs = np.asarray(exc_probs, dtype=np.float64)
    n_anc = np.asarray(n_anc, dtype=np.int64)
    cells = np.arange(first_cell, first_cell + n_cells, dtype=np.int64)
    keys = _cell_keys(seed, cells)
    u0 = _uniforms(keys, 0, 1)[:, 0]
    outcomes = np.searchsorted(cum_probs, u0, side="right")
    outcomes = np.minimum(outcomes, len(cum_probs) - 1).astype(np.int64)
    counts = np.zeros(n_cells, dtype=np.int64)
    for k in range(len(cum_probs)):
        kk = int(n_anc[k])
        if kk == 0:
            continue
        idx = np.flatnonzero(outcomes == k)
        for start in range(0, len(idx), _CHUNK):
            sel = idx[start:start + _CHUNK]
            u = _uniforms(keys[sel], 1, kk)
            counts[sel] = (u < exc_probs[k, :kk][None, :]).sum(axis=1)
    works = spacing * (counts - baseline * n_anc[outcomes])
    return outcomes, works.astype(np.float64)


def alice_work_batch(weights, states, eta, c):
    """Optimal classical-demon work for a batch of Gibbs-consistent ensembles."""
    weights = np.asarray(weights, dtype=np.float64)
    states = np.asarray(states, dtype=np.float64)
    s = math.sqrt(1.0 - eta * eta)
    sum_z = np.einsum("bn,bn->b", weights, np.abs(states[..., 2]))
    sum_x = np.einsum("bn,bn->b", weights, np.abs(states[..., 0]))
    w_z = 0.5 * (eta + sum_z)
    w_x = 0.5 * (eta + eta * eta + sum_x * s)
    return (w_z + c * w_x) / (1.0 + c)


def gibbs_correct_batch(weights, states, eta):
    """Force sum_i p_i r_i = (0, 0, eta) for each ensemble in the batch.

    First try translating every member by the mean defect; if a member would
    leave the Bloch ball, mix in one pure compensating state instead.  The
    output always has one extra member (weight 0 when unused).
    """
    weights = np.asarray(weights, dtype=np.float64)
    states = np.asarray(states, dtype=np.float64)
    b, n = weights.shape
    target = np.array([0.0, 0.0, eta])
    mean = np.einsum("bn,bnk->bk", weights, states)
    defect = target[None, :] - mean
    shifted = states + defect[:, None, :]
    fits = np.sqrt((shifted**2).sum(axis=2)).max(axis=1) <= 1.0

    out_w = np.zeros((b, n + 1))
    out_s = np.zeros((b, n + 1, 3))
    out_w[:, :n] = weights
    out_s[:, :n] = np.where(fits[:, None, None], shifted, states)
    out_s[:, n] = target

    bad = ~fits
    if bad.any():
        d = defect[bad]
        dd = (d**2).sum(axis=1)
        td = d @ target
        tt = target @ target
        k = (-td + np.sqrt(td * td + dd * (1.0 - tt))) / dd
        comp = target[None, :] + k[:, None] * d
        norm = np.sqrt((comp**2).sum(axis=1))
        comp /= np.maximum(norm, 1.0)[:, None]
        w = 1.0 / (1.0 + k)
        out_w[bad, :n] *= (1.0 - w)[:, None]
        out_w[bad, n] = w
        out_s[bad, n] = comp
    return out_w, out_s


def _collision_affine(delta_phi):
    """Exact single-collision maps as affine functions of the system Bloch vector.

    Returns (M, b, alpha, beta) with r' = M r + b and ancilla excitation
    probability alpha . r + beta.
    """
    c, s = math.cos(delta_phi), math.sin(delta_phi)
    u = np.eye(4, dtype=complex)
    u[1, 1] = u[2, 2] = c
    u[1, 2] = u[2, 1] = -1j * s
    anc = np.array([1.0, 1j]) / math.sqrt(2.0)
    rho_a = np.outer(anc, anc.conj())
    pauli = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]

    def run(r):
        rho_s = 0.5 * (np.eye(2) + sum(ri * p for ri, p in zip(r, pauli)))
        big = u @ np.kron(rho_s, rho_a) @ u.conj().T
        t = big.reshape(2, 2, 2, 2)
        out_s = np.einsum("iaja->ij", t)
        out_a = np.einsum("aiaj->ij", t)
        bloch = np.array([np.trace(p @ out_s).real for p in pauli])
        return bloch, out_a[0, 0].real

    b, beta = run((0.0, 0.0, 0.0))
    m = np.zeros((3, 3))
    alpha = np.zeros(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        col, p = run(e)
        m[:, k] = col - b
        alpha[k] = p - beta
    return m, b, alpha, beta


def work_chain(bloch, delta_phi, steps):
    """Run ``steps`` exact collisions; return (ancilla excitation probs, final Bloch)."""
    m, b, alpha, beta = _collision_affine(delta_phi)
    m = m.tolist()
    b = b.tolist()
    alpha = alpha.tolist()
    x, y, z = (float(v) for v in bloch)
    probs = np.empty(int(steps))
    for k in range(int(steps)):
        probs[k] = alpha[0] * x + alpha[1] * y + alpha[2] * z + beta
        x, y, z = (
            m[0][0] * x + m[0][1] * y + m[0][2] * z + b[0],
            m[1][0] * x + m[1][1] * y + m[1][2] * z + b[1],
            m[2][0] * x + m[2][1] * y + m[2][2] * z + b[2],
        )
    return probs, np.array([x, y, z])
