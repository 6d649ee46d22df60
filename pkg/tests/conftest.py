"""Shared test fixtures and independently coded reference oracles.

The oracles here enumerate collision quadruples literally, one term at a
time, with none of the windowing or prefix-sum algebra of the production
kernels; they are deliberately slow and structurally different so that
agreement is meaningful.
"""

import numpy as np
import pytest
from numba import njit


@njit(cache=True)
def literal_collision(b, f, tb, tf, alpha_b):
    """Quadruple-loop collision sums, straight from the kinetic equations.

    Boson row i: Bose-Bose channel (all four indices bosonic, weight
    alpha_b) plus the mixed channel where i scatters against a fermion.
    Fermion row i: the mixed channel only (no s-wave fermion-fermion
    channel). Per-level rates divide by the level degeneracy.
    """
    M = b.shape[0]
    dB = np.zeros(M)
    dF = np.zeros(M)
    for i in range(tb + 1):
        acc = 0.0
        for j in range(tb + 1):
            for k in range(tb + 1):
                l = i + j - k
                if l < 0 or l > tb:
                    continue
                m = min(min(i, j), min(k, l))
                gm = 0.5 * (m + 1) * (m + 2)
                acc += alpha_b * gm * (
                    b[k] * b[l] * (1 + b[i]) * (1 + b[j])
                    - b[i] * b[j] * (1 + b[k]) * (1 + b[l])
                )
        for j in range(tf + 1):
            for k in range(tb + 1):
                l = i + j - k
                if l < 0 or l > tf:
                    continue
                m = min(min(i, j), min(k, l))
                gm = 0.5 * (m + 1) * (m + 2)
                acc += gm * (
                    b[k] * f[l] * (1 - f[j]) * (1 + b[i])
                    - b[i] * f[j] * (1 - f[l]) * (1 + b[k])
                )
        dB[i] = acc / (0.5 * (i + 1) * (i + 2))
    for i in range(tf + 1):
        acc = 0.0
        for j in range(tb + 1):
            for k in range(tf + 1):
                l = i + j - k
                if l < 0 or l > tb:
                    continue
                m = min(min(i, j), min(k, l))
                gm = 0.5 * (m + 1) * (m + 2)
                acc += gm * (
                    f[k] * b[l] * (1 - f[i]) * (1 + b[j])
                    - f[i] * b[j] * (1 - f[k]) * (1 + b[l])
                )
        dF[i] = acc / (0.5 * (i + 1) * (i + 2))
    return dB, dF


def literal_evaporation(b, f, tb, tf, alpha_b):
    """Brute-force evaporation terms via the zero-padding identity.

    States above the cutoff are unoccupied; running the literal closed
    sums on the zero-padded doubled grid therefore enumerates exactly the
    qualifying gain/loss quadruples (escaped partners contribute bare
    statistics factors). Subtracting the trapped-window sums isolates the
    evaporation terms; the above-cutoff rows of the padded sums are the
    flux of escaping particles, i.e. the loss rates.
    """
    M = b.shape[0]
    P = 2 * M
    bp = np.zeros(P)
    fp = np.zeros(P)
    bp[: tb + 1] = b[: tb + 1]
    fp[: tf + 1] = f[: tf + 1]
    dBp, dFp = literal_collision(bp, fp, P - 1, P - 1, alpha_b)
    dBc, dFc = literal_collision(b, f, tb, tf, alpha_b)
    dB = np.zeros(M)
    dF = np.zeros(M)
    dB[: tb + 1] = dBp[: tb + 1] - dBc[: tb + 1]
    dF[: tf + 1] = dFp[: tf + 1] - dFc[: tf + 1]
    e = np.arange(P, dtype=float)
    g = (e + 1) * (e + 2) / 2
    # growth rate of the population parked above the cutoff = escape flux
    lost_n_b = float(np.dot(g[tb + 1 :], dBp[tb + 1 :]))
    lost_e_b = float(np.dot((g * e)[tb + 1 :], dBp[tb + 1 :]))
    lost_n_f = float(np.dot(g[tf + 1 :], dFp[tf + 1 :]))
    lost_e_f = float(np.dot((g * e)[tf + 1 :], dFp[tf + 1 :]))
    return dB, dF, lost_n_b, lost_n_f, lost_e_b, lost_e_f


def random_occupations(rng, M, b_scale=1.0, condensed=False):
    """Positive boson occupations and Pauli-bounded fermion occupations."""
    b = b_scale * rng.exponential(1.0, M) * np.exp(-np.arange(M) / (M / 3))
    f = rng.uniform(0.0, 1.0, M) * np.exp(-np.arange(M) / (M / 3))
    if condensed:
        b[0] += 50.0 * b_scale
    return b, f


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
