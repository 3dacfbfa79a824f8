"""Compiled variance recursions, batched over rows of parameter draws."""

import numpy as np
from numba import njit

LOG_H_BOUND = 50.0


@njit(cache=True)
def garch_filter(eps, omega, alpha, gamma, beta, h0, h):
    """ARCH/GARCH/GJR recursion; the first max(p, o, q) variances are back-cast."""
    n, T = h.shape
    q = alpha.shape[1]
    o = gamma.shape[1]
    p = beta.shape[1]
    m = max(p, max(o, q))
    for i in range(n):
        for t in range(T):
            if t < m:
                h[i, t] = h0
                continue
            v = omega[i]
            for j in range(q):
                e = eps[t - 1 - j]
                v += alpha[i, j] * e * e
            for j in range(o):
                e = eps[t - 1 - j]
                if e > 0.0:
                    v += gamma[i, j] * e * e
            for j in range(p):
                v += beta[i, j] * h[i, t - 1 - j]
            h[i, t] = v
    return h


@njit(cache=True)
def egarch_filter(eps, omega, alpha, gamma, psi, beta, eabs, h0, h, clamped):
    """EGARCH / GJR-EGARCH recursion in log space.

    Pre-sample log-variances equal log(h0) and pre-sample news terms are zero.
    Log-variances are clamped to +/-LOG_H_BOUND; clamps are counted per row.
    """
    n, T = h.shape
    q = alpha.shape[1]
    o = gamma.shape[1]
    p = beta.shape[1]
    lh0 = np.log(h0)
    z = np.empty(T)
    lh = np.empty(T)
    for i in range(n):
        clamped[i] = 0
        for t in range(T):
            v = omega[i]
            for j in range(q):
                s = t - 1 - j
                if s >= 0:
                    v += alpha[i, j] * z[s] + psi[i, j] * (abs(z[s]) - eabs[i])
            for j in range(o):
                s = t - 1 - j
                if s >= 0 and z[s] > 0.0:
                    v += gamma[i, j] * z[s]
            for j in range(p):
                s = t - 1 - j
                if s >= 0:
                    v += beta[i, j] * lh[s]
                else:
                    v += beta[i, j] * lh0
            if v > LOG_H_BOUND:
                v = LOG_H_BOUND
                clamped[i] += 1
            elif v < -LOG_H_BOUND:
                v = -LOG_H_BOUND
                clamped[i] += 1
            lh[t] = v
            h[i, t] = np.exp(v)
            z[t] = eps[t] / np.sqrt(h[i, t])
    return h


@njit(cache=True)
def figarch_weights_batch(phi, beta, d, K):
    n = phi.shape[0]
    lam = np.empty((n, K))
    for i in range(n):
        delta = d[i]
        lam[i, 0] = phi[i] - beta[i] + d[i]
        for k in range(2, K + 1):
            # delta_k - phi * delta_{k-1} == delta_{k-1} * ((k-1-d)/k - phi)
            lam[i, k - 1] = beta[i] * lam[i, k - 2] + delta * ((k - 1 - d[i]) / k - phi[i])
            delta = delta * (k - 1 - d[i]) / k
    return lam


@njit(cache=True)
def figarch_filter_direct(eps, omega, lam, h0, h):
    n, T = h.shape
    K = lam.shape[1]
    for i in range(n):
        for t in range(T):
            v = omega[i]
            for k in range(1, K + 1):
                s = t - k
                if s >= 0:
                    v += lam[i, k - 1] * eps[s] * eps[s]
                else:
                    v += lam[i, k - 1] * h0
            h[i, t] = v
    return h


@njit(cache=True)
def garch_gaussian_terms(eps, omega, alpha, gamma, beta, h0, start):
    """Fused GARCH-type recursion and ``sum(log h_t + eps_t^2 / h_t)`` over ``t >= start``.

    Rows whose variance goes non-positive or non-finite get NaN.
    """
    n = omega.shape[0]
    T = eps.shape[0]
    q = alpha.shape[1]
    o = gamma.shape[1]
    p = beta.shape[1]
    m = max(p, max(o, q))
    e2 = eps * eps
    pos = np.zeros(T)
    for t in range(T):
        if eps[t] > 0.0:
            pos[t] = e2[t]
    h = np.empty(T)
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        ok = True
        for t in range(T):
            if t < m:
                v = h0
            else:
                v = omega[i]
                for j in range(q):
                    v += alpha[i, j] * e2[t - 1 - j]
                for j in range(o):
                    v += gamma[i, j] * pos[t - 1 - j]
                for j in range(p):
                    v += beta[i, j] * h[t - 1 - j]
            if not (v > 0.0 and v < np.inf):
                ok = False
                break
            h[t] = v
            if t >= start:
                acc += np.log(v) + e2[t] / v
        out[i] = acc if ok else np.nan
    return out


@njit(cache=True)
def gaussian_terms(h, eps, start):
    """Per-row sums of log h_t + eps_t^2 / h_t over t >= start."""
    n, T = h.shape
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for t in range(start, T):
            acc += np.log(h[i, t]) + eps[t] * eps[t] / h[i, t]
        out[i] = acc
    return out


@njit(cache=True)
def garch_simulate(z, omega, alpha, gamma, beta, h_init):
    """``z`` carries max(p, o, q) extra leading draws for the pre-sample shocks."""
    q = alpha.shape[0]
    o = gamma.shape[0]
    p = beta.shape[0]
    m = max(p, max(o, q))
    T = z.shape[0] - m
    h = np.empty(T + m)
    eps = np.empty(T + m)
    for t in range(m):
        h[t] = h_init
        eps[t] = np.sqrt(h_init) * z[t]
    for t in range(m, T + m):
        v = omega
        for j in range(q):
            e = eps[t - 1 - j]
            v += alpha[j] * e * e
        for j in range(o):
            e = eps[t - 1 - j]
            if e > 0.0:
                v += gamma[j] * e * e
        for j in range(p):
            v += beta[j] * h[t - 1 - j]
        h[t] = v
        eps[t] = np.sqrt(v) * z[t]
    return eps[m:], h[m:]


@njit(cache=True)
def egarch_simulate(z, omega, alpha, gamma, psi, beta, eabs, lh_init):
    T = z.shape[0]
    q = alpha.shape[0]
    o = gamma.shape[0]
    p = beta.shape[0]
    lh = np.empty(T)
    h = np.empty(T)
    eps = np.empty(T)
    for t in range(T):
        v = omega
        for j in range(q):
            s = t - 1 - j
            if s >= 0:
                v += alpha[j] * z[s] + psi[j] * (abs(z[s]) - eabs)
        for j in range(o):
            s = t - 1 - j
            if s >= 0 and z[s] > 0.0:
                v += gamma[j] * z[s]
        for j in range(p):
            s = t - 1 - j
            v += beta[j] * (lh[s] if s >= 0 else lh_init)
        v = min(max(v, -LOG_H_BOUND), LOG_H_BOUND)
        lh[t] = v
        h[t] = np.exp(v)
        eps[t] = np.sqrt(h[t]) * z[t]
    return eps, h


@njit(cache=True)
def figarch_simulate(z, omega, lam, e2_init):
    T = z.shape[0]
    K = lam.shape[0]
    h = np.empty(T)
    eps = np.empty(T)
    for t in range(T):
        v = omega
        for k in range(1, K + 1):
            s = t - k
            if s >= 0:
                v += lam[k - 1] * eps[s] * eps[s]
            else:
                v += lam[k - 1] * e2_init
        h[t] = v
        eps[t] = np.sqrt(v) * z[t]
    return eps, h
