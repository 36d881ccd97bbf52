# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled collision-flux kernels.

Same contracts and index conventions as the NumPy backend
(wavekin._kernels.collision_np); pairwise weights are formed in registers
instead of precomputed tables.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

name = "compiled"


cdef void _prefix_sums(const double[::1] u, const double[::1] k,
                       double[::1] C0, double[::1] C1, double[::1] C2) noexcept nogil:
    # C*[m+1] = sum_{l<=m} u_l k_l^r, C*[0] = 0
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t l
    cdef double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, ul, kl
    C0[0] = 0.0; C1[0] = 0.0; C2[0] = 0.0
    for l in range(n):
        ul = u[l]; kl = k[l]
        acc0 += ul
        acc1 += ul * kl
        acc2 += ul * kl * kl
        C0[l + 1] = acc0
        C1[l + 1] = acc1
        C2[l + 1] = acc2


cdef double _flux_half_one(const double[::1] u, const double[::1] k, double dk, Py_ssize_t i,
                           double[::1] C0, double[::1] C1, double[::1] C2) noexcept nogil:
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t M = n - 1
    cdef Py_ssize_t j, a, hi, lo, m
    cdef double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, dia = 0.0
    cdef double kj, uj, s0, s1, s2, f

    lo = i if i > 0 else 0
    for j in range(n):
        uj = u[j]
        if uj == 0.0:
            continue
        hi = i + j
        if hi > M:
            hi = M
        if hi < lo:
            continue
        kj = k[j]
        s0 = C0[hi + 1] - C0[lo]
        s1 = C1[hi + 1] - C1[lo]
        s2 = C2[hi + 1] - C2[lo]
        t1 += uj * (kj * kj * s0 - 2.0 * kj * s1 + s2)

    if i >= 0:
        for j in range(i + 1):
            uj = u[j]
            kj = k[j]
            a = i - j
            # signed prefix difference C(j) - C(a-1); reversed ranges subtract
            s0 = C0[j + 1] - C0[a]
            s1 = C1[j + 1] - C1[a]
            s2 = C2[j + 1] - C2[a]
            t2 += uj * (kj * kj * s0 + 2.0 * kj * s1 + s2)
            t4 += 4.0 * uj * kj * C1[j + 1]
        t3 = 4.0 * C1[i + 1] * (C1[M + 1] - C1[i])
        m = (i - 1) >> 1 if i >= 1 else -1
        if m >= 0:
            for j in range(m + 1):
                f = u[j] * u[j] * k[j] * k[j]
                dia += 4.0 * f
            if i % 2 == 1:
                dia -= 2.0 * u[m] * u[m] * k[m] * k[m]

    return 2.0 * dk * dk * (t1 - t2 - t3 - t4 + dia)


def flux_half(const double[::1] u, const double[::1] k, double dk, Py_ssize_t i):
    """Half-flux at cell edge i+1/2 by direct summation, i in [-1, M]."""
    cdef Py_ssize_t n = u.shape[0]
    if i < -1 or i > n - 1:
        raise IndexError(f"edge index {i} outside [-1, {n - 1}]")
    C0 = np.empty(n + 1)
    C1 = np.empty(n + 1)
    C2 = np.empty(n + 1)
    cdef double[::1] c0 = C0, c1 = C1, c2 = C2
    _prefix_sums(u, k, c0, c1, c2)
    return _flux_half_one(u, k, dk, i, c0, c1, c2)


def flux_half_all(const double[::1] u, const double[::1] k, double dk):
    """Half-fluxes at every edge, out[i+1] = flux at edge i+1/2 for i = -1..M."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    C0 = np.empty(n + 1)
    C1 = np.empty(n + 1)
    C2 = np.empty(n + 1)
    out = np.empty(n + 1)
    cdef double[::1] c0 = C0, c1 = C1, c2 = C2, o = out
    _prefix_sums(u, k, c0, c1, c2)
    with nogil:
        for i in range(-1, n):
            o[i + 1] = _flux_half_one(u, k, dk, i, c0, c1, c2)
    return out


def flux_divergence(const double[::1] u, const double[::1] k, double dk):
    """Per-cell flux difference via the closed telescoped form, O(M^2)."""
    cdef Py_ssize_t n = u.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, m
    cdef double m0 = 0.0, m1 = 0.0, m2 = 0.0
    cdef double p0 = 0.0, p1 = 0.0, p2 = 0.0, p1m1
    cdef double corr, conv, phi, ui, um1, ki, km1, w, uj, kj, udm, kdm

    with nogil:
        for j in range(n):
            uj = u[j]; kj = k[j]
            m0 += uj
            m1 += uj * kj
            m2 += uj * kj * kj

        for i in range(n):
            ui = u[i]; ki = k[i]
            corr = 0.0
            for j in range(n - i):
                corr += u[j] * u[i + j]
            conv = 0.0
            for j in range(i):
                conv += u[j] * u[i - 1 - j]
            w = (i * dk) * (i * dk)

            p1m1 = p1  # prefix over j <= i-1 of u_j k_j
            p0 += ui
            p1 += ui * ki
            p2 += ui * ki * ki

            phi = w * (corr + conv)
            phi -= ui * (ki * ki * p0 + 2.0 * ki * p1 + p2)
            phi -= 4.0 * ui * ki * m1
            phi -= 4.0 * ui * ui * ki * ki
            if i >= 1:
                um1 = u[i - 1]; km1 = k[i - 1]
                phi -= um1 * (m2 - 2.0 * km1 * m1 + km1 * km1 * m0)
                phi += 4.0 * um1 * km1 * p1m1
                m = (i - 1) >> 1
                udm = u[m]; kdm = k[m]
                phi += 2.0 * udm * udm * kdm * kdm
            o[i] = 2.0 * dk * dk * phi
    return out


def jacobian(const double[::1] u, const double[::1] k, double dk, tables=None):
    """Dense Jacobian of flux_divergence(u)/dk with respect to u.

    ``tables`` is accepted for interface parity and ignored; weights are
    cheaper to form on the fly than to load from memory here.
    """
    cdef Py_ssize_t n = u.shape[0]
    J = np.zeros((n, n))
    cdef double[:, ::1] jm = J
    cdef Py_ssize_t i, p, m, s, d
    cdef double m0 = 0.0, m1 = 0.0, m2 = 0.0
    cdef double p0 = 0.0, p1 = 0.0, p2 = 0.0, p1m1
    cdef double ui, ki, um1, km1, w, row, uj, kj, kp, t

    with nogil:
        for i in range(n):
            uj = u[i]; kj = k[i]
            m0 += uj
            m1 += uj * kj
            m2 += uj * kj * kj

        for i in range(n):
            ui = u[i]; ki = k[i]
            w = (i * dk) * (i * dk)
            p1m1 = p1
            p0 += ui
            p1 += ui * ki
            p2 += ui * ki * ki

            # correlation/convolution gathers: w * (u_{i+p} + u_{p-i} + 2 u_{i-1-p})
            for p in range(n):
                t = 0.0
                s = i + p
                if s <= n - 1:
                    t += u[s]
                d = p - i
                if d >= 0:
                    t += u[d]
                d = i - 1 - p
                if d >= 0:
                    t += 2.0 * u[d]
                jm[i, p] = w * t

            if i >= 1:
                um1 = u[i - 1]; km1 = k[i - 1]
                for p in range(n):
                    kp = k[p]
                    jm[i, p] -= um1 * (kp - km1) * (kp - km1)
                for p in range(i):
                    jm[i, p] += 4.0 * um1 * km1 * k[p]
                jm[i, i - 1] -= m2 - 2.0 * km1 * m1 + km1 * km1 * m0
                jm[i, i - 1] += 4.0 * km1 * p1m1

            for p in range(i + 1):
                kp = k[p]
                jm[i, p] -= ui * (ki + kp) * (ki + kp)
            for p in range(n):
                jm[i, p] -= 4.0 * ui * ki * k[p]

            jm[i, i] -= ki * ki * p0 + 2.0 * ki * p1 + p2
            jm[i, i] -= 4.0 * ki * m1
            jm[i, i] -= 8.0 * ui * ki * ki
            if i >= 1:
                m = (i - 1) >> 1
                jm[i, m] += 4.0 * u[m] * k[m] * k[m]

        for i in range(n):
            for p in range(n):
                jm[i, p] *= 2.0 * dk
    return J
