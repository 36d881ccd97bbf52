"""NumPy implementation of the collision-flux kernels.

Conventions shared with the compiled backend:

* the state is extended by zero outside 0..M (domain truncation);
* the inner range of the (k_j + k_l)^2 term is a prefix-sum difference
  C(j) - C(i-j-1), signed when the bounds cross -- this is what makes the
  half-flux telescope exactly to the closed-form per-cell difference;
* the left ghost flux at i = -1 keeps only the first term with its lower
  bound clamped to 0.
"""

from __future__ import annotations

import numpy as np

name = "numpy"


def _prefix(u: np.ndarray, k: np.ndarray, r: int) -> np.ndarray:
    """Padded prefix sums: out[m+1] = sum_{l<=m} u_l k_l^r, out[0] = 0."""
    out = np.empty(len(u) + 1)
    out[0] = 0.0
    np.cumsum(u * k**r, out=out[1:])
    return out


def flux_half(u: np.ndarray, k: np.ndarray, dk: float, i: int) -> float:
    """Half-flux at cell edge i+1/2 by direct summation, i in [-1, M]."""
    n = len(u)
    M = n - 1
    if not -1 <= i <= M:
        raise IndexError(f"edge index {i} outside [-1, {M}]")
    C0 = _prefix(u, k, 0)
    C1 = _prefix(u, k, 1)
    C2 = _prefix(u, k, 2)

    lo = max(i, 0)
    # term 1: sum_j u_j * sum_{l=i..min(i+j,M)} u_l (k_j - k_l)^2
    hi = np.minimum(i + np.arange(n), M)
    s0 = np.where(hi >= lo, C0[hi + 1] - C0[lo], 0.0)
    s1 = np.where(hi >= lo, C1[hi + 1] - C1[lo], 0.0)
    s2 = np.where(hi >= lo, C2[hi + 1] - C2[lo], 0.0)
    t1 = float(np.dot(u, k * k * s0 - 2.0 * k * s1 + s2))

    t2 = t3 = t4 = dia = 0.0
    if i >= 0:
        j = np.arange(i + 1)
        a = i - j
        # signed prefix difference: sum_{l=a..j} = C(j) - C(a-1), reversed ranges subtract
        d0 = C0[j + 1] - C0[a]
        d1 = C1[j + 1] - C1[a]
        d2 = C2[j + 1] - C2[a]
        uj = u[: i + 1]
        kj = k[: i + 1]
        t2 = float(np.dot(uj, kj * kj * d0 + 2.0 * kj * d1 + d2))
        t3 = 4.0 * C1[i + 1] * (C1[M + 1] - C1[i])
        t4 = 4.0 * float(np.dot(uj * kj, C1[j + 1]))
        m = (i - 1) // 2
        if m >= 0:
            f = u[: m + 1] ** 2 * k[: m + 1] ** 2
            dia = 4.0 * float(f.sum())
            if i % 2 == 1:
                dia -= 2.0 * f[m]

    return 2.0 * dk * dk * (t1 - t2 - t3 - t4 + dia)


def flux_half_all(u: np.ndarray, k: np.ndarray, dk: float) -> np.ndarray:
    """Half-fluxes at every edge, out[i+1] = flux at edge i+1/2 for i = -1..M."""
    n = len(u)
    out = np.empty(n + 1)
    for i in range(-1, n):
        out[i + 1] = flux_half(u, k, dk, i)
    return out


def flux_divergence(u: np.ndarray, k: np.ndarray, dk: float) -> np.ndarray:
    """Per-cell flux difference via the closed telescoped form, O(M^2)."""
    n = len(u)
    i = np.arange(n)

    corr = np.correlate(u, u, "full")[n - 1 :]  # corr[i] = sum_j u_j u_{i+j}
    conv = np.convolve(u, u)
    Y = np.empty(n)
    Y[0] = 0.0
    Y[1:] = conv[: n - 1]  # Y[i] = sum_{j<i} u_j u_{i-1-j}

    m0 = u.sum()
    uk = u * k
    m1 = uk.sum()
    m2 = (uk * k).sum()
    P0 = np.cumsum(u)
    P1 = np.cumsum(uk)
    P2 = np.cumsum(uk * k)

    um1 = np.empty(n)
    um1[0] = 0.0
    um1[1:] = u[:-1]
    km1 = np.empty(n)
    km1[0] = 0.0
    km1[1:] = k[:-1]
    P1m1 = np.empty(n)
    P1m1[0] = 0.0
    P1m1[1:] = P1[:-1]

    md = (i - 1) // 2
    mc = np.clip(md, 0, n - 1)
    udm = np.where(md >= 0, u[mc], 0.0)
    kdm = np.where(md >= 0, k[mc], 0.0)

    phi = (
        (i * dk) ** 2 * (corr + Y)
        - um1 * (m2 - 2.0 * km1 * m1 + km1 * km1 * m0)
        - u * (k * k * P0 + 2.0 * k * P1 + P2)
        - 4.0 * (uk * m1 - um1 * km1 * P1m1)
        - 4.0 * u * uk * k
        + 2.0 * udm * udm * kdm * kdm
    )
    return 2.0 * dk * dk * phi


def jacobian(u: np.ndarray, k: np.ndarray, dk: float, tables=None) -> np.ndarray:
    """Dense Jacobian of flux_divergence(u)/dk with respect to u.

    ``tables`` may carry precomputed pairwise weights (diff2, sum2, prod)
    from a CollisionKernel; without them the weights are formed on the fly.
    """
    n = len(u)
    i = np.arange(n)
    ii = i[:, None]
    pp = i[None, :]

    uk = u * k
    m0 = u.sum()
    m1 = uk.sum()
    m2 = (uk * k).sum()
    P0 = np.cumsum(u)
    P1 = np.cumsum(uk)
    P2 = np.cumsum(uk * k)

    row_w = (i * dk) ** 2  # (k_j - k_{i+j})^2 and (k_j + k_{i-1-j})^2 collapse to (i dk)^2

    # correlation and convolution gathers
    s = ii + pp
    J = np.where(s <= n - 1, u[np.clip(s, 0, n - 1)], 0.0)
    dmn = pp - ii
    J += np.where(dmn >= 0, u[np.clip(dmn, 0, n - 1)], 0.0)
    dmn2 = ii - 1 - pp
    J += 2.0 * np.where(dmn2 >= 0, u[np.clip(dmn2, 0, n - 1)], 0.0)
    J *= row_w[:, None]

    if tables is not None:
        diff2, sum2, prod = tables
    else:
        diff2 = (k[:, None] - k[None, :]) ** 2
        sum2 = (k[:, None] + k[None, :]) ** 2
        prod = k[:, None] * k[None, :]

    # rows i >= 1 pick up the u_{i-1} weight families with row index shifted by one
    # (prod[i-1, p] = k_{i-1} k_p, diff2[i-1, p] = (k_p - k_{i-1})^2)
    J[1:] -= u[:-1, None] * diff2[:-1]
    J[1:] += 4.0 * u[:-1, None] * np.where(pp <= ii[1:] - 1, prod[:-1], 0.0)

    J -= np.where(pp <= ii, u[:, None] * sum2, 0.0)
    J -= 4.0 * u[:, None] * prod  # -4 u_i k_i k_p, all columns

    idx = np.arange(1, n)
    R = m2 - 2.0 * k * m1 + k * k * m0
    J[idx, idx - 1] -= R[idx - 1]
    J[idx, idx - 1] += 4.0 * k[idx - 1] * P1[idx - 1]
    J[i, i] -= k * k * P0 + 2.0 * k * P1 + P2
    J[i, i] -= 4.0 * k * m1
    J[i, i] -= 8.0 * uk * k
    md = (i - 1) // 2
    ok = md >= 0
    J[i[ok], md[ok]] += 4.0 * (uk * k)[md[ok]]

    J *= 2.0 * dk
    return J
