# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same names and signatures as ``_fallback``."""
import numpy as np

cimport cython
from libc.math cimport cos, sin, sqrt, fabs
from libc.stdint cimport uint64_t, int64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


cdef inline uint64_t cell_key(uint64_t seed, int64_t cell) nogil:
    return mix64(mix64(seed + GOLDEN) + (<uint64_t>cell + 1) * GOLDEN)


cdef inline double draw(uint64_t key, int64_t d) nogil:
    return <double>(mix64(key + (<uint64_t>d + 1) * GOLDEN) >> 11) * INV53


def cell_uniforms(seed, cells, Py_ssize_t ndraws):
    cdef int64_t[:] c = np.ascontiguousarray(cells, dtype=np.int64)
    cdef Py_ssize_t n = c.shape[0], i, j
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t key
    out = np.empty((n, ndraws), dtype=np.float64)
    cdef double[:, :] o = out
    with nogil:
        for i in range(n):
            key = cell_key(s, c[i])
            for j in range(ndraws):
                o[i, j] = draw(key, j)
    return out


def sample_cells(seed, int64_t first_cell, Py_ssize_t n_cells, cum_probs, exc_probs, n_anc,
                 double spacing, double baseline):
    cdef double[:] cum = np.ascontiguousarray(cum_probs, dtype=np.float64)
    cdef double[:, :] exc = np.ascontiguousarray(exc_probs, dtype=np.float64)
    cdef int64_t[:] na = np.ascontiguousarray(n_anc, dtype=np.int64)
    cdef Py_ssize_t n_out = cum.shape[0], i, k, a
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t key
    cdef double u
    cdef int64_t count
    outcomes = np.empty(n_cells, dtype=np.int64)
    works = np.empty(n_cells, dtype=np.float64)
    cdef int64_t[:] oc = outcomes
    cdef double[:] wk = works
    with nogil:
        for i in range(n_cells):
            key = cell_key(s, first_cell + i)
            u = draw(key, 0)
            k = 0
            while k < n_out - 1 and u >= cum[k]:
                k += 1
            count = 0
            for a in range(na[k]):
                if draw(key, a + 1) < exc[k, a]:
                    count += 1
            oc[i] = k
            wk[i] = spacing * (count - baseline * na[k])
    return outcomes, works


def alice_work_batch(weights, states, double eta, double c):
    cdef double[:, :] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:, :, :] r = np.ascontiguousarray(states, dtype=np.float64)
    cdef Py_ssize_t b = w.shape[0], n = w.shape[1], i, j
    cdef double s = sqrt(1.0 - eta * eta)
    cdef double sz, sx
    out = np.empty(b, dtype=np.float64)
    cdef double[:] o = out
    with nogil:
        for i in range(b):
            sz = 0.0
            sx = 0.0
            for j in range(n):
                sz += w[i, j] * fabs(r[i, j, 2])
                sx += w[i, j] * fabs(r[i, j, 0])
            o[i] = (0.5 * (eta + sz) + c * 0.5 * (eta + eta * eta + sx * s)) / (1.0 + c)
    return out


def gibbs_correct_batch(weights, states, double eta):
    cdef double[:, :] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef double[:, :, :] r = np.ascontiguousarray(states, dtype=np.float64)
    cdef Py_ssize_t b = w.shape[0], n = w.shape[1], i, j, k
    out_w = np.zeros((b, n + 1), dtype=np.float64)
    out_s = np.zeros((b, n + 1, 3), dtype=np.float64)
    cdef double[:, :] ow = out_w
    cdef double[:, :, :] os = out_s
    cdef double t[3]
    cdef double m[3]
    cdef double d[3]
    cdef double comp[3]
    cdef double nrm, worst, dd, td, tt, kk, wc
    t[0] = 0.0
    t[1] = 0.0
    t[2] = eta
    tt = eta * eta
    with nogil:
        for i in range(b):
            for k in range(3):
                m[k] = 0.0
                for j in range(n):
                    m[k] += w[i, j] * r[i, j, k]
                d[k] = t[k] - m[k]
            worst = 0.0
            for j in range(n):
                nrm = 0.0
                for k in range(3):
                    nrm += (r[i, j, k] + d[k]) * (r[i, j, k] + d[k])
                nrm = sqrt(nrm)
                if nrm > worst:
                    worst = nrm
            for k in range(3):
                os[i, n, k] = t[k]
            if worst <= 1.0:
                for j in range(n):
                    ow[i, j] = w[i, j]
                    for k in range(3):
                        os[i, j, k] = r[i, j, k] + d[k]
                continue
            dd = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
            td = d[2] * eta
            kk = (-td + sqrt(td * td + dd * (1.0 - tt))) / dd
            nrm = 0.0
            for k in range(3):
                comp[k] = t[k] + kk * d[k]
                nrm += comp[k] * comp[k]
            nrm = sqrt(nrm)
            if nrm < 1.0:
                nrm = 1.0
            wc = 1.0 / (1.0 + kk)
            for j in range(n):
                ow[i, j] = w[i, j] * (1.0 - wc)
                for k in range(3):
                    os[i, j, k] = r[i, j, k]
            ow[i, n] = wc
            for k in range(3):
                os[i, n, k] = comp[k] / nrm
    return out_w, out_s


def work_chain(bloch, double delta_phi, Py_ssize_t steps):
    """Exact collisions with an ancilla in |+y>, done with explicit 4x4 complex algebra."""
    cdef double c = cos(delta_phi), s = sin(delta_phi)
    cdef double complex u[4][4]
    cdef double complex ra[2][2]
    cdef double complex rs[2][2]
    cdef double complex big[4][4]
    cdef double complex tmp[4][4]
    cdef double complex acc
    cdef Py_ssize_t i, j, k, step
    cdef double x = float(bloch[0]), y = float(bloch[1]), z = float(bloch[2])
    probs = np.empty(steps, dtype=np.float64)
    cdef double[:] p = probs
    for i in range(4):
        for j in range(4):
            u[i][j] = 0.0
    u[0][0] = 1.0
    u[3][3] = 1.0
    u[1][1] = c
    u[2][2] = c
    u[1][2] = -1j * s
    u[2][1] = -1j * s
    # |+y> = (|1> + i|0>)/sqrt(2) in the excited-first ordering
    ra[0][0] = 0.5
    ra[0][1] = -0.5j
    ra[1][0] = 0.5j
    ra[1][1] = 0.5
    for step in range(steps):
        rs[0][0] = 0.5 * (1.0 + z)
        rs[1][1] = 0.5 * (1.0 - z)
        rs[0][1] = 0.5 * (x - 1j * y)
        rs[1][0] = 0.5 * (x + 1j * y)
        for i in range(4):
            for j in range(4):
                big[i][j] = rs[i >> 1][j >> 1] * ra[i & 1][j & 1]
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for k in range(4):
                    acc = acc + u[i][k] * big[k][j]
                tmp[i][j] = acc
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for k in range(4):
                    acc = acc + tmp[i][k] * u[j][k].conjugate()
                big[i][j] = acc
        # ancilla excitation: <1|rho_A|1> = big[0][0] + big[2][2]
        p[step] = big[0][0].real + big[2][2].real
        # reduced system state: trace over the ancilla (second factor)
        rs[0][0] = big[0][0] + big[1][1]
        rs[1][1] = big[2][2] + big[3][3]
        rs[0][1] = big[0][2] + big[1][3]
        x = 2.0 * rs[0][1].real
        y = -2.0 * rs[0][1].imag
        z = (rs[0][0] - rs[1][1]).real
    return probs, np.array([x, y, z])
