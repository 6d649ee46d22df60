import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sympcool._rk import (
    StepUnderflow,
    _rkc_coeffs,
    _rkc_stage_count,
    integrate,
    integrate_rkc,
)

STEPPERS = {
    "dp5": integrate,
    "rkc": integrate_rkc,
}

# order 5 vs order 2: the global error at a given per-step tolerance differs
# by orders of magnitude, so endpoint checks carry per-stepper expectations
ENDPOINT_RTOL = {"dp5": 1e-6, "rkc": 2e-4}


def decay(t, y):
    return -y


@pytest.mark.parametrize("name", STEPPERS)
def test_exponential_decay_endpoint(name):
    step = STEPPERS[name]
    res = step(decay, 0.0, np.array([1.0, 2.0]), 3.0, rtol=1e-8, atol=1e-12)
    assert res.t_end == 3.0
    assert np.allclose(res.y_end, [math.exp(-3), 2 * math.exp(-3)], rtol=ENDPOINT_RTOL[name])


@pytest.mark.parametrize("name", STEPPERS)
def test_accuracy_scales_with_rtol(name):
    # nonlinear scalar problem with a known solution: y' = -y^2, y(0)=1
    step = STEPPERS[name]
    exact = 1.0 / (1.0 + 4.0)
    errs = []
    for rtol in (1e-4, 1e-6, 1e-8):
        res = step(lambda t, y: -y * y, 0.0, np.array([1.0]), 4.0, rtol=rtol, atol=1e-14)
        errs.append(abs(res.y_end[0] - exact))
    assert errs[0] > errs[2]
    assert errs[2] < 1e-6


@pytest.mark.parametrize("name", STEPPERS)
def test_linear_invariant_preserved_to_roundoff(name):
    # 1^T A = 0 makes sum(y) a conserved quantity of y' = A y; affine steps
    # keep it exactly no matter how sloppy the tolerance is
    rng = np.random.default_rng(7)
    A = rng.uniform(0.1, 1.0, (6, 6))  # Markov-style generator: stable flow
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, -A.sum(axis=0))
    y0 = rng.uniform(0.5, 2.0, 6)
    res = STEPPERS[name](lambda t, y: A @ y, 0.0, y0, 2.0, rtol=1e-3, atol=1e-6)
    assert res.y_end.sum() == pytest.approx(y0.sum(), rel=5e-14)


def test_rkc_handles_stiffness_cheaply():
    # lambda = -1e6 over unit time: forward-Euler-style stability would need
    # ~5e5 evaluations; the stabilized stepper should use a tiny fraction
    lam = np.array([-1.0e6, -1.0])
    y0 = np.array([1.0, 1.0])
    res = integrate_rkc(lambda t, y: lam * y, 0.0, y0, 1.0, rtol=1e-5, atol=1e-10)
    assert abs(res.y_end[1] - math.exp(-1.0)) < 1e-4
    assert abs(res.y_end[0]) < 1e-8  # fast component fully damped
    assert res.n_steps < 5_000


def test_rkc_stability_polynomial_bounded():
    # R_s(z) = a_s + b_s T_s(w0 + w1 z) must stay inside the unit band over
    # the advertised span [-beta, 0]
    for s in (3, 7, 20, 50):
        w0, w1, a, b, c, beta = _rkc_coeffs(s)
        z = np.linspace(-beta, 0.0, 4001)
        arg = w0 + w1 * z
        coeffs = np.zeros(s + 1)
        coeffs[s] = 1.0
        Ts = np.polynomial.chebyshev.chebval(arg, coeffs)
        R = a[s] + b[s] * Ts
        assert np.max(np.abs(R)) <= 1.0 + 1e-10
        # consistency at z = 0
        assert R[-1] == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    h=st.floats(min_value=1e-8, max_value=10.0),
    rho=st.floats(min_value=0.0, max_value=1e9),
)
def test_stage_count_covers_span(h, rho):
    s, h_ok = _rkc_stage_count(h, rho)
    assert 2 <= s <= 512
    assert h_ok <= h
    beta = _rkc_coeffs(s)[5]
    assert beta >= h_ok * rho * (1.0 - 1e-12)


@pytest.mark.parametrize("name", STEPPERS)
def test_eval_times_hit_exactly(name):
    res = STEPPERS[name](
        decay, 0.0, np.array([1.0]), 1.0, rtol=1e-8, eval_times=(0.25, 0.5, 0.75)
    )
    ts = [t for t, _ in res.samples]
    assert ts == [0.25, 0.5, 0.75]
    for t, y in res.samples:
        assert y[0] == pytest.approx(math.exp(-t), rel=ENDPOINT_RTOL[name])


@pytest.mark.parametrize("name", STEPPERS)
def test_record_steps_monotone(name):
    res = STEPPERS[name](
        decay, 0.0, np.array([1.0]), 1.0, rtol=1e-6, record_steps=True
    )
    ts = np.array([t for t, _ in res.samples])
    assert len(ts) == res.n_steps
    assert np.all(np.diff(ts) > 0)
    assert ts[-1] == 1.0


@pytest.mark.parametrize("name", STEPPERS)
def test_guard_rejection_shrinks_into_bound(name):
    # y stays positive analytically; a positivity guard must never brick a
    # healthy problem
    res = STEPPERS[name](
        decay, 0.0, np.array([1.0]), 5.0, rtol=1e-6,
        guard=lambda y: bool(np.all(y > 0.0)),
    )
    assert res.y_end[0] == pytest.approx(math.exp(-5.0), rel=5e-4)


@pytest.mark.parametrize("name", STEPPERS)
def test_impossible_guard_raises_underflow(name):
    with pytest.raises(StepUnderflow) as exc:
        STEPPERS[name](
            decay, 0.0, np.array([1.0]), 1.0, rtol=1e-6, guard=lambda y: False
        )
    assert exc.value.dt < 1e-14
    assert "bound" in exc.value.reason


@pytest.mark.parametrize("name", STEPPERS)
def test_vector_atol_for_extensive_rows(name):
    # second component is a passive running integral with a large rate; a
    # scalar 1e-12 atol would strangle the start, a per-component one must not
    K = 1.0e10

    def rhs(t, y):
        return np.array([-y[0], K * y[0]])

    res = STEPPERS[name](
        rhs, 0.0, np.array([1.0, 0.0]), 2.0,
        rtol=1e-8, atol=np.array([1e-12, 1e-2 * K]),
    )
    assert res.y_end[0] == pytest.approx(math.exp(-2.0), rel=ENDPOINT_RTOL[name])
    assert res.y_end[1] == pytest.approx(K * (1.0 - math.exp(-2.0)), rel=ENDPOINT_RTOL[name])


@pytest.mark.parametrize("name", STEPPERS)
def test_degenerate_interval(name):
    y0 = np.array([4.0])
    res = STEPPERS[name](decay, 1.0, y0, 1.0)
    assert res.t_end == 1.0
    assert res.y_end[0] == 4.0


def test_rkc_reuses_spectral_state_across_segments():
    lam = np.array([-2.0e4, -1.0])
    y = np.array([1.0, 1.0])
    keep = {}
    t = 0.0
    for t_next in (0.3, 0.6, 1.0):
        res = integrate_rkc(
            lambda t, y: lam * y, t, y, t_next, rtol=1e-6, rho_keep=keep
        )
        y, t = res.y_end, res.t_end
    assert "v" in keep and np.linalg.norm(keep["v"]) > 0
    assert y[1] == pytest.approx(math.exp(-1.0), rel=1e-4)
