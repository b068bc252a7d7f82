"""Independent reference implementations used only by the tests."""

import cmath
import math

import mpmath
import numpy as np


def lobachevsky_fourier(theta, n_terms=10_000_000, chunk=1_000_000):
    """1/2 sum sin(2 n t) / n^2, truncated; returns (value, tail bound).

    By Abel summation the tail past N is at most 1 / (2 N^2 |sin t|).
    """
    acc = []
    for start in range(1, n_terms + 1, chunk):
        n = np.arange(start, min(start + chunk, n_terms + 1), dtype=float)
        acc.append(np.sum(np.sin(2.0 * n * theta) / (n * n)))
    s = math.fsum(acc)
    tail = 1.0 / (2.0 * n_terms**2 * abs(math.sin(theta)))
    return 0.5 * s, tail


def lobachevsky_mp(theta):
    return float(mpmath.clsin(2, 2 * mpmath.mpf(theta)) / 2)


def dilog_mp(w):
    return complex(mpmath.polylog(2, mpmath.mpc(w)))


def qint(r, n):
    s = cmath.exp(2j * math.pi / r)
    return s**n - s ** (-n)


def qfact(r, n):
    p = 1 + 0j
    for m in range(1, n + 1):
        p *= qint(r, m)
    return p


def jones_E_direct(r, twice_j):
    """Plain complex summation of {2j+1+k}! / {2j-k}! over k, divided by {1}."""
    km = min(twice_j, r - twice_j - 2)
    tot = 0j
    for k in range(km + 1):
        tot += qfact(r, twice_j + 1 + k) / qfact(r, twice_j - k)
    return tot / qint(r, 1)


def jones_B_direct(r, twice):
    km = min(min(d, r - d - 2) for d in twice)
    tot = 0j
    for k in range(km + 1):
        t = (-1) ** k * (qfact(r, k) / qfact(r, 2 * k + 1)) ** 2
        for d in twice:
            t *= qfact(r, d + 1 + k) / qfact(r, d - k)
        tot += t
    return tot / qint(r, 1)


def qdilog_product(r, n):
    s2 = cmath.exp(4j * math.pi / r)
    p = 1 + 0j
    for m in range(1, n + 1):
        p *= 1 - s2**m
    return p


def jones_mp_log_abs(r, twice, dps=40):
    """log|V| by plain summation in mpmath (E for one weight, B for three)."""
    with mpmath.workdps(dps):
        s = mpmath.exp(2j * mpmath.pi / r)

        def qi(n):
            return s**n - s ** (-n)

        km = min(min(d, r - d - 2) for d in twice)
        tot = mpmath.mpc(0)
        # running products, updated per k
        num = [mpmath.mpc(1)] * len(twice)  # {d+1+k}! / {d-k}!
        for i, d in enumerate(twice):
            p = mpmath.mpc(1)
            for m in range(1, d + 2):
                p *= qi(m)
            for m in range(1, d + 1):
                p /= qi(m)
            num[i] = p
        ratio = 1 / qi(1)  # {k}! / {2k+1}! at k = 0
        for k in range(km + 1):
            t = mpmath.mpc(1)
            for p in num:
                t *= p
            if len(twice) == 3:
                t *= (-1) ** k * ratio**2
            tot += t
            for i, d in enumerate(twice):
                num[i] *= qi(d + 2 + k) * qi(d - k)
            ratio *= qi(k + 1) / (qi(2 * k + 2) * qi(2 * k + 3))
        return float(mpmath.log(abs(tot / qi(1))))
