"""Closed two-temperature relaxation model of the mixture.

Maxwell-Boltzmann closure: both gases keep equilibrium shapes at their own
temperatures; cross-collisions drive the temperatures together through the
rational coupling function P(r), r = T_f/T_b. Time is in tau0 units, particle
numbers are constants of the model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rk

# slope of P at r = 1, from d/dr of the numerator over (1+r)^5 at the zero
_P_SLOPE_1 = -0.5


@dataclass(frozen=True)
class TwoTempState:
    T_bar_f: float
    T_bar_b: float
    N_f: float
    N_b: float

    def __post_init__(self):
        if self.T_bar_f <= 0 or self.T_bar_b <= 0:
            raise ValueError("temperatures must be positive")
        if self.N_f < 0 or self.N_b < 0:
            raise ValueError("particle numbers must be nonnegative")


def pfun(r: float) -> float:
    """Heat-flow coupling (1 + 3r + 2r^2 - 2r^3 - 3r^4 - r^5)/(1+r)^5.

    Positive for r < 1 (fermions colder, heat flows in), zero at r = 1,
    negative for r > 1. Evaluated in the rational form; the first-order
    Taylor form takes over within 1e-6 of the zero to dodge cancellation.
    """
    if r <= 0:
        raise ValueError("temperature ratio must be positive")
    if abs(r - 1.0) < 1e-6:
        return _P_SLOPE_1 * (r - 1.0)
    num = 1.0 + 3.0 * r + 2.0 * r**2 - 2.0 * r**3 - 3.0 * r**4 - r**5
    return num / (1.0 + r) ** 5


def collision_rate(N: float, T_bar: float) -> float:
    """Energy-averaged collision rate per particle, N/(2 T_bar), in 1/tau0."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if T_bar <= 0:
        raise ValueError("T_bar must be positive")
    return N / (2.0 * T_bar)


def integrate_two_temperature(
    state0: TwoTempState,
    t_end: float,
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> np.ndarray:
    """Trajectory of dT_f/dtau = (N_b/3) P(T_f/T_b), dT_b/dtau = -(N_f/3) P.

    Returns an array with columns (tau, T_bar_f, T_bar_b) sampled at the
    accepted steps, including both endpoints. N_f T_f + N_b T_b is conserved
    by construction (the RHS is proportional to (N_b, -N_f)).
    """
    N_f, N_b = state0.N_f, state0.N_b

    def rhs(t, y):
        p = pfun(y[0] / y[1])
        return np.array([N_b / 3.0 * p, -N_f / 3.0 * p])

    y0 = np.array([state0.T_bar_f, state0.T_bar_b])
    res = _rk.integrate(
        rhs,
        0.0,
        y0,
        t_end,
        rtol=rtol,
        atol=atol,
        guard=lambda y: bool(np.all(y > 0)),
        record_steps=True,
    )
    rows = [(0.0, state0.T_bar_f, state0.T_bar_b)]
    rows += [(t, y[0], y[1]) for t, y in res.samples]
    if rows[-1][0] < res.t_end:
        rows.append((res.t_end, res.y_end[0], res.y_end[1]))
    return np.array(rows)
