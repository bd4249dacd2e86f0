"""Closed-form oracles and structural properties of the norm family.

Reference values below are hand-derived for simple paths on [0, 1]:

* f(t) = t, alpha = 0.3:
    - sup-type norm:      1 + 1/(1 - a)              = 17/7
    - Hoelder (mu = 0.7): 1 + 1                      = 2
    - driver functional:  1 / (Gamma(0.7) Gamma(1.3))
    - (1 - a)-type norm:  1 + 1/a                    = 13/3
    - integral norm:      1/(1 - a)                  = 10/7
    - increment func.:    1/(1 - a)                  = 10/7
* f(t) = t^2, alpha = 0.3: sup-type norm = 1 + 2/(1-a) - 1/(2-a).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as Gamma

from sddelab import (
    FbmConfig,
    SamplePath,
    compute_norm_report,
    delta_r,
    estimate_holder_exponent,
    generate_fbm,
    lambda_alpha,
    make_grid,
    norm_1ma_infty_T,
    norm_alpha_1,
    norm_alpha_infty,
    norm_alpha_lambda,
    norm_holder,
    weyl_derivative,
)

ALPHA = 0.3


def ramp(n=4096, T=1.0, r=0.0):
    return SamplePath.from_function(make_grid(T, n, r), lambda t: t)


def test_sup_norm_of_ramp_matches_closed_form():
    value = norm_alpha_infty(ramp(), ALPHA)
    assert value == pytest.approx(1.0 + 1.0 / 0.7, rel=1e-12)


def test_sup_norm_of_square_matches_closed_form():
    f = SamplePath.from_function(make_grid(1.0, 4096), lambda t: t * t)
    truth = 1.0 + 2.0 / 0.7 - 1.0 / 1.7
    assert norm_alpha_infty(f, ALPHA) == pytest.approx(truth, rel=1e-5)


def test_sup_norm_error_decays_at_first_order():
    truth = 1.0 + 2.0 / 0.7 - 1.0 / 1.7
    errs = []
    for n in (256, 512, 1024):
        f = SamplePath.from_function(make_grid(1.0, n), lambda t: t * t)
        errs.append(abs(norm_alpha_infty(f, ALPHA) - truth))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.0)


def test_holder_norm_of_ramp():
    assert norm_holder(ramp(), 0.7) == pytest.approx(2.0, rel=1e-12)
    # exponent 1 recovers sup + Lipschitz seminorm
    assert norm_holder(ramp(), 1.0) == pytest.approx(2.0, rel=1e-12)


def test_constant_path_norms():
    grid = make_grid(1.0, 512)
    c = SamplePath.from_function(grid, lambda t: -2.0)
    assert norm_alpha_infty(c, ALPHA) == pytest.approx(2.0)
    assert norm_holder(c, 0.7) == pytest.approx(2.0)
    assert norm_1ma_infty_T(c, ALPHA) == 0.0
    assert lambda_alpha(c, ALPHA) == 0.0
    assert delta_r(c, ALPHA, 1.0) == 0.0
    assert norm_alpha_1(c, ALPHA) == pytest.approx(2.0 / 0.7, rel=1e-3)


def test_driver_functional_of_ramp_matches_closed_form():
    truth = 1.0 / (Gamma(0.7) * Gamma(1.3))
    assert lambda_alpha(ramp(), ALPHA) == pytest.approx(truth, rel=1e-12)


def test_one_minus_alpha_norm_of_ramp():
    assert norm_1ma_infty_T(ramp(), ALPHA) == pytest.approx(1.0 + 1.0 / ALPHA, rel=1e-12)


def test_integral_norm_of_ramp():
    # the two terms telescope: 1/(2-a) + 1/((1-a)(2-a)) = 1/(1-a)
    assert norm_alpha_1(ramp(), ALPHA) == pytest.approx(1.0 / 0.7, rel=1e-5)


def test_increment_functional_of_ramp():
    assert delta_r(ramp(), ALPHA, 1.0) == pytest.approx(1.0 / 0.7, rel=1e-12)


def test_increment_functional_rejects_bad_exponents():
    f = ramp(64)
    with pytest.raises(ValueError):
        delta_r(f, ALPHA, delta=1.5)
    with pytest.raises(ValueError):
        delta_r(f, 0.45, delta=0.8)  # needs alpha < delta / (1 + delta)


def test_weyl_derivative_of_ramp_is_signed_closed_form():
    g = ramp(1024)
    for s, t in [(0.0, 1.0), (0.25, 0.75), (0.5, 1.0)]:
        truth = -((t - s) ** ALPHA) / Gamma(1.0 + ALPHA)
        assert weyl_derivative(g, ALPHA, s, t) == pytest.approx(truth, rel=1e-10)


def test_weighted_norm_with_zero_weight_equals_sup_norm():
    f = ramp(512)
    assert norm_alpha_lambda(f, ALPHA, 0.0) == pytest.approx(
        norm_alpha_infty(f, ALPHA), rel=1e-14
    )


def test_weighted_norm_of_ramp_matches_continuum_maximum():
    # independent oracle: maximize the closed-form profile e^{-lam t}(t + t^0.7/0.7)
    lam = 3.0
    ts = np.linspace(1e-9, 1.0, 2_000_001)
    truth = np.max(np.exp(-lam * ts) * (ts + ts ** 0.7 / 0.7))
    assert norm_alpha_lambda(ramp(), ALPHA, lam) == pytest.approx(truth, rel=1e-4)


@pytest.mark.parametrize("lam", [0.5, 1.0, 5.0, 25.0])
def test_weighted_norm_two_sided_equivalence(lam, rough_driver):
    f = rough_driver
    T = f.grid.horizon
    plain = norm_alpha_infty(f, ALPHA)
    weighted = norm_alpha_lambda(f, ALPHA, lam)
    assert weighted <= plain * (1.0 + 1e-12)
    assert weighted >= math.exp(-lam * T) * plain * (1.0 - 1e-12)


def test_weighted_norm_decreases_in_the_weight(rough_driver):
    lams = [0.0, 1.0, 2.0, 8.0, 32.0]
    vals = [norm_alpha_lambda(rough_driver, ALPHA, lam) for lam in lams]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_history_start_enters_the_sup_norm():
    # with history, the time integral reaches back to -r and the sup covers it
    f_hist = SamplePath.from_function(make_grid(1.0, 64, 0.25), lambda t: t)
    f_main = SamplePath.from_function(make_grid(1.0, 64), lambda t: t)
    assert norm_alpha_infty(f_hist, ALPHA) > norm_alpha_infty(f_main, ALPHA)
    # restricting the window to r = 0 recovers the main-grid value
    assert norm_alpha_infty(f_hist, ALPHA, r=0.0) == pytest.approx(
        norm_alpha_infty(f_main, ALPHA), rel=1e-12
    )


@settings(max_examples=20, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    c=st.floats(min_value=-8.0, max_value=8.0, allow_nan=False),
)
def test_norms_are_absolutely_homogeneous(seed, c):
    grid = make_grid(1.0, 128)
    g = generate_fbm(grid, FbmConfig(hurst=0.75, seed=seed))
    scaled = g * c
    for functional in (
        lambda p: norm_alpha_infty(p, ALPHA),
        lambda p: norm_holder(p, 0.7),
        lambda p: norm_alpha_lambda(p, ALPHA, 2.0),
        lambda p: lambda_alpha(p, ALPHA),
        lambda p: norm_1ma_infty_T(p, ALPHA),
        lambda p: norm_alpha_1(p, ALPHA),
        lambda p: delta_r(p, ALPHA, 1.0),
    ):
        assert functional(scaled) == pytest.approx(
            abs(c) * functional(g), rel=1e-10, abs=1e-12
        )


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_norms_satisfy_the_triangle_inequality(seed):
    grid = make_grid(1.0, 128)
    f = generate_fbm(grid, FbmConfig(hurst=0.75, seed=seed))
    g = generate_fbm(grid, FbmConfig(hurst=0.6, seed=seed + 1))
    both = f + g
    for functional in (
        lambda p: norm_alpha_infty(p, ALPHA),
        lambda p: norm_holder(p, 0.7),
        lambda p: norm_alpha_lambda(p, ALPHA, 2.0),
        lambda p: lambda_alpha(p, ALPHA),
        lambda p: norm_1ma_infty_T(p, ALPHA),
        lambda p: norm_alpha_1(p, ALPHA),
        lambda p: delta_r(p, ALPHA, 1.0),
    ):
        lhs = functional(both)
        rhs = functional(f) + functional(g)
        assert lhs <= rhs * (1.0 + 1e-10) + 1e-12


@settings(max_examples=15, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    data=st.data(),
)
def test_driver_functional_dominates_sampled_derivatives(seed, data):
    grid = make_grid(1.0, 256)
    g = generate_fbm(grid, FbmConfig(hurst=0.75, seed=seed))
    bound = lambda_alpha(g, ALPHA)
    times = grid.times()
    i = data.draw(st.integers(min_value=0, max_value=254))
    j = data.draw(st.integers(min_value=i + 1, max_value=255))
    sample = abs(weyl_derivative(g, ALPHA, times[i], times[j])) / Gamma(1.0 - ALPHA)
    assert sample <= bound * (1.0 + 1e-10)


def test_estimated_roughness_tracks_the_driver(rough_driver):
    est = estimate_holder_exponent(rough_driver)
    assert 0.6 <= est <= 0.9
    smooth = estimate_holder_exponent(ramp(512))
    assert smooth > 0.95


def test_norm_report_collects_every_functional(rough_driver):
    rep = compute_norm_report(rough_driver, ALPHA, lam=2.0)
    assert rep.alpha == ALPHA
    assert rep.lam == 2.0
    assert rep.r == 0.0
    assert rep.norm_alpha_infty == pytest.approx(
        norm_alpha_infty(rough_driver, ALPHA), rel=1e-14
    )
    assert rep.lambda_alpha == pytest.approx(
        lambda_alpha(rough_driver, ALPHA), rel=1e-14
    )
    assert rep.norm_alpha_lambda <= rep.norm_alpha_infty
    assert rep.norm_holder >= rep.norm_alpha_infty * 0.0  # finite, nonnegative
    assert np.isfinite(
        [rep.norm_holder, rep.delta_r, rep.norm_1ma, rep.norm_alpha_1]
    ).all()


def test_norm_report_takes_driver_functionals_from_the_driver(rough_driver):
    f = ramp(512)
    rep = compute_norm_report(f, ALPHA, driver=rough_driver)
    assert rep.lambda_alpha == pytest.approx(lambda_alpha(rough_driver, ALPHA))
    assert rep.norm_1ma == pytest.approx(norm_1ma_infty_T(rough_driver, ALPHA))
