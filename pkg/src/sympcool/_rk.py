"""Embedded Dormand-Prince 5(4) stepper shared by the kinetic engines.

Hand-rolled rather than scipy's solve_ivp because the engines need two things
the library loop does not give cheaply: a per-step acceptance guard (reject
and halve when a physical bound is violated, without clipping), and exact
stops at externally computed event times (cutoff crossings) with the step
size carried across the stop. Runge-Kutta steps are affine, so linear
invariants of the RHS (particle number, energy) are conserved to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# classic DP5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_ERR = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


class StepUnderflow(RuntimeError):
    """Step control collapsed below the minimum step; carries diagnostics."""

    def __init__(self, t, dt, reason):
        super().__init__(
            f"step size underflow at t = {t:.9g} (dt = {dt:.3e}): {reason}"
        )
        self.t = t
        self.dt = dt
        self.reason = reason


@dataclass
class IntegrationResult:
    t_end: float
    y_end: np.ndarray
    dt_last: float
    n_steps: int = 0
    n_rejected: int = 0
    n_guard_rejects: int = 0
    samples: list = field(default_factory=list)  # (t, y copy) at eval times


def _initial_dt(y, f0, rtol, atol, span):
    """Elementwise first-step guess: the fastest component in units of its
    own tolerance scale sets the clock. atol may be a scalar or an array
    (extensive rows such as running loss tallies want a far looser absolute
    floor than O(1) occupation numbers, or they throttle the start)."""
    scale = np.maximum(atol + rtol * np.abs(y), 1e-300)
    r = float(np.max(np.abs(f0) / scale))
    dt = min(1e-4, 0.01 / r) if r > 0 else 1e-4
    return min(dt, span)


def integrate(
    rhs,
    t0: float,
    y0: np.ndarray,
    t1: float,
    rtol: float = 1e-8,
    atol: float = 1e-12,
    guard=None,
    dt0: float | None = None,
    min_step: float = 1e-15,
    eval_times=(),
    record_steps: bool = False,
) -> IntegrationResult:
    """Advance y' = rhs(t, y) from t0 to t1.

    guard(y) -> bool is checked on every candidate state; a False verdict
    rejects the step and halves dt (physical-bound rejection, separate from
    the error test). eval_times inside (t0, t1] are hit exactly by clamping.
    atol may be a per-component array.
    """
    y = np.array(y0, dtype=float)
    t = t0
    res = IntegrationResult(t_end=t0, y_end=y, dt_last=0.0)
    if t1 <= t0:
        res.y_end = y
        return res

    evals = [te for te in sorted(eval_times) if t0 < te <= t1]
    k1 = rhs(t, y)
    if dt0 is None:
        # modest first guess; the controller fixes it within a few steps
        dt = _initial_dt(y, k1, rtol, atol, t1 - t0)
    else:
        dt = min(dt0, t1 - t0)

    ks = [k1] + [np.empty_like(y) for _ in range(6)]
    next_eval = 0
    while t < t1:
        if next_eval < len(evals) and evals[next_eval] - t < min_step:
            # eval time coincides with the current time to machine precision
            t = evals[next_eval]
            res.samples.append((t, y.copy()))
            next_eval += 1
            continue
        if t1 - t < min_step:
            break
        clamp = t1 if next_eval >= len(evals) else evals[next_eval]
        clamped = dt >= clamp - t
        dt_try = clamp - t if clamped else dt
        if dt_try < min_step:
            raise StepUnderflow(t, dt_try, "requested step below min_step")
        for i in range(1, 7):
            yi = y.copy()
            for j, a in enumerate(_A[i]):
                if a != 0.0:
                    yi += (dt_try * a) * ks[j]
            ks[i] = rhs(t + _C[i] * dt_try, yi)
        y_new = yi  # stage 7 abscissa equals the 5th-order solution (FSAL)

        err_vec = np.zeros_like(y)
        for e, k in zip(_ERR, ks):
            if e != 0.0:
                err_vec += e * k
        err_vec *= dt_try
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))

        if err > 1.0:
            res.n_rejected += 1
            dt = dt_try * max(0.2, 0.9 * err ** (-0.2))
            if dt < min_step:
                raise StepUnderflow(t, dt, f"error control (err = {err:.2e})")
            continue
        if guard is not None and not guard(y_new):
            res.n_guard_rejects += 1
            dt = 0.5 * dt_try
            if dt < min_step:
                raise StepUnderflow(t, dt, "physical bound violated at minimum step")
            continue

        t = clamp if clamped else t + dt_try
        y = y_new
        ks[0] = ks[6]  # FSAL
        res.n_steps += 1
        hit_eval = clamped and next_eval < len(evals) and clamp == evals[next_eval]
        if record_steps or hit_eval:
            res.samples.append((t, y.copy()))
        if hit_eval:
            next_eval += 1
        # PI-free smooth controller, clamped growth
        dt = dt_try * min(5.0, max(0.2, 0.9 * (err + 1e-16) ** (-0.2)))

    res.t_end = t
    res.y_end = y
    res.dt_last = dt
    return res


# ---------------------------------------------------------------------------
# Stabilized second-order Chebyshev stepper.
#
# The collision operator's linearization is negative-semidefinite (the
# H-theorem direction), so its spectrum hugs the negative real axis; once a
# condensate builds up, the stimulated rates push the spectral radius to
# 10^5..10^8 per tau0 while the solution itself crawls along a slow
# manifold. A damped Chebyshev recursion buys a stability interval growing
# like 0.65 s^2 for s internal stages, which turns those runs from hours
# into minutes. Classic Runge-Kutta-Chebyshev construction: internal
# stages follow the three-term recursion of shifted Chebyshev polynomials
# T_j(w0 + w1 z), damping eps = 2/13.

_RKC_EPS = 2.0 / 13.0


def _rkc_coeffs(s: int):
    w0 = 1.0 + _RKC_EPS / (s * s)
    # T_j, T_j', T_j'' at w0 by the Chebyshev recursions
    T = np.empty(s + 1)
    Tp = np.empty(s + 1)
    Tpp = np.empty(s + 1)
    T[0], Tp[0], Tpp[0] = 1.0, 0.0, 0.0
    T[1], Tp[1], Tpp[1] = w0, 1.0, 0.0
    for j in range(2, s + 1):
        T[j] = 2.0 * w0 * T[j - 1] - T[j - 2]
        Tp[j] = 2.0 * T[j - 1] + 2.0 * w0 * Tp[j - 1] - Tp[j - 2]
        Tpp[j] = 4.0 * Tp[j - 1] + 2.0 * w0 * Tpp[j - 1] - Tpp[j - 2]
    w1 = Tp[s] / Tpp[s]
    b = np.empty(s + 1)
    for j in range(2, s + 1):
        b[j] = Tpp[j] / (Tp[j] * Tp[j])
    b[0] = b[1] = b[2]
    a = 1.0 - b * T
    c = np.empty(s + 1)
    c[0] = 0.0
    c[1] = b[1] * w1
    for j in range(2, s + 1):
        c[j] = w1 * Tpp[j] / Tp[j]
    beta = (1.0 + w0) / w1  # real-axis stability span
    return w0, w1, a, b, c, beta


def _rkc_stage_count(h: float, rho: float, s_max: int = 512) -> tuple[int, float]:
    """Smallest stage count whose damped stability span covers h*rho;
    returns (s, allowed h) where the h is only reduced if s_max binds."""
    s = max(2, int(math.sqrt(max(h * rho, 0.0) / 0.65)) + 1)
    while True:
        beta = _rkc_coeffs(s)[5]
        if beta >= h * rho or s >= s_max:
            break
        s += max(1, s // 10)
    if s >= s_max:
        beta = _rkc_coeffs(s_max)[5]
        if beta < h * rho:
            return s_max, beta / rho
        return s_max, h
    return s, h


def _spectral_radius(rhs, t, y, f0, v, n_calls, max_iter=50):
    """Nonlinear power iteration on the RHS Jacobian at (t, y).

    v is the previous eigenvector estimate (carried across calls); returns
    (rho, v). The 1.2 factor pads against growth between re-estimates.
    """
    ynrm = float(np.linalg.norm(y))
    vnrm = float(np.linalg.norm(v))
    if vnrm == 0.0:
        v = f0.copy()
        vnrm = float(np.linalg.norm(v))
        if vnrm == 0.0:
            return 0.0, v
    delta = max(1e-9 * ynrm, 1e-12)
    rho = 0.0
    for _ in range(max_iter):
        uv = y + v * (delta / vnrm)
        fv = rhs(t, uv)
        n_calls[0] += 1
        dfv = fv - f0
        dnrm = float(np.linalg.norm(dfv))
        rho_new = dnrm / delta
        if rho_new == 0.0:
            return 0.0, v
        done = abs(rho_new - rho) <= 0.01 * rho_new
        rho = rho_new
        v = dfv
        vnrm = dnrm
        if done:
            break
    return 1.2 * rho, v


def integrate_rkc(
    rhs,
    t0: float,
    y0: np.ndarray,
    t1: float,
    rtol: float = 1e-6,
    atol: float = 1e-12,
    guard=None,
    dt0: float | None = None,
    min_step: float = 1e-15,
    eval_times=(),
    record_steps: bool = False,
    rho_keep=None,
) -> IntegrationResult:
    """Advance y' = rhs(t, y) with the stabilized stepper.

    Same contract as integrate(); rho_keep, if given, is a dict carrying
    the spectral-radius estimate and eigenvector across segment calls.
    """
    y = np.array(y0, dtype=float)
    t = t0
    res = IntegrationResult(t_end=t0, y_end=y, dt_last=0.0)
    if t1 <= t0:
        return res

    keep = rho_keep if rho_keep is not None else {}
    evals = [te for te in sorted(eval_times) if t0 < te <= t1]
    n_calls = [0]
    f0 = rhs(t, y)
    v = keep.get("v")
    if v is None:
        v = np.zeros_like(y)
    rho, v = _spectral_radius(rhs, t, y, f0, v, n_calls)
    steps_since_rho = 0

    if dt0 is None:
        dt = _initial_dt(y, f0, rtol, atol, t1 - t0)
    else:
        dt = min(dt0, t1 - t0)

    next_eval = 0
    Yjm2 = np.empty_like(y)
    Yjm1 = np.empty_like(y)
    while t < t1:
        if next_eval < len(evals) and evals[next_eval] - t < min_step:
            t = evals[next_eval]
            res.samples.append((t, y.copy()))
            next_eval += 1
            continue
        if t1 - t < min_step:
            break
        if steps_since_rho >= 25:
            rho, v = _spectral_radius(rhs, t, y, f0, v, n_calls)
            steps_since_rho = 0
        clamp = t1 if next_eval >= len(evals) else evals[next_eval]
        clamped = dt >= clamp - t
        dt_try = clamp - t if clamped else dt
        if dt_try < min_step:
            raise StepUnderflow(t, dt_try, "requested step below min_step")
        s, dt_ok = _rkc_stage_count(dt_try, rho)
        if dt_ok < dt_try:  # stage cap binds
            dt_try = dt_ok
            clamped = False
        w0, w1, a, b, c, _beta = _rkc_coeffs(s)

        # stage recursion, three rolling vectors
        np.copyto(Yjm2, y)
        mu1t = b[1] * w1
        Yjm1[:] = y + (dt_try * mu1t) * f0
        Fjm1 = rhs(t + c[1] * dt_try, Yjm1)
        n_calls[0] += 1
        for j in range(2, s + 1):
            mu = 2.0 * b[j] * w0 / b[j - 1]
            nu = -b[j] / b[j - 2]
            mut = 2.0 * b[j] * w1 / b[j - 1]
            gt = -a[j - 1] * mut
            Yj = (
                (1.0 - mu - nu) * y
                + mu * Yjm1
                + nu * Yjm2
                + (dt_try * mut) * Fjm1
                + (dt_try * gt) * f0
            )
            Yjm2, Yjm1 = Yjm1, Yj
            if j < s:
                Fjm1 = rhs(t + c[j] * dt_try, Yjm1)
                n_calls[0] += 1
        y_new = Yjm1

        f_new = rhs(t + dt_try, y_new)
        n_calls[0] += 1
        est = 0.8 * (y - y_new) + (0.4 * dt_try) * (f0 + f_new)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((est / scale) ** 2)))

        if err > 1.0:
            res.n_rejected += 1
            dt = dt_try * max(0.1, 0.8 * err ** (-1.0 / 3.0))
            if dt < min_step:
                raise StepUnderflow(t, dt, f"error control (err = {err:.2e})")
            rho, v = _spectral_radius(rhs, t, y, f0, v, n_calls)
            steps_since_rho = 0
            Yjm2 = np.empty_like(y)
            Yjm1 = np.empty_like(y)
            continue
        if guard is not None and not guard(y_new):
            res.n_guard_rejects += 1
            dt = 0.5 * dt_try
            if dt < min_step:
                raise StepUnderflow(t, dt, "physical bound violated at minimum step")
            Yjm2 = np.empty_like(y)
            Yjm1 = np.empty_like(y)
            continue

        t = clamp if clamped else t + dt_try
        y = y_new
        f0 = f_new
        res.n_steps += 1
        steps_since_rho += 1
        hit_eval = clamped and next_eval < len(evals) and clamp == evals[next_eval]
        if record_steps or hit_eval:
            res.samples.append((t, y.copy()))
        if hit_eval:
            next_eval += 1
        dt = dt_try * min(10.0, max(0.1, 0.8 * (err + 1e-16) ** (-1.0 / 3.0)))
        Yjm2 = np.empty_like(y)
        Yjm1 = np.empty_like(y)

    keep["v"] = v
    res.t_end = t
    res.y_end = y
    res.dt_last = dt
    return res
