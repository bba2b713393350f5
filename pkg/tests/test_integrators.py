import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from resonlab.freqlat import FrequencyModel, K_INF
from resonlab import integrators as ig
from resonlab.spectral import SpectralState

DEFAULT = FrequencyModel()
SCALE0 = FrequencyModel(potential_scale=0.0)


def small_states(n=32, mag=0.3):
    return arrays(np.complex128, (n,),
                  elements=st.complex_numbers(max_magnitude=mag,
                                              allow_nan=False,
                                              allow_infinity=False)).map(SpectralState)


def three_mode_state(N=100):
    return SpectralState.from_coefficients({2: 0.1, 5: -0.1, 7: 0.15}, N)


# -- nonlinear flow ------------------------------------------------------------

def test_nonlinear_flow_h0_identity():
    s = three_mode_state()
    out = ig.nonlinear_flow(s, 0.0)
    assert np.allclose(out.coeffs, s.coeffs, atol=1e-15, rtol=0)


def test_nonlinear_flow_constant_field_closed_form():
    c = 0.4 + 0.3j
    s = SpectralState.from_coefficients({0: c}, 32)
    out = ig.nonlinear_flow(s, 0.7)
    expected = c * np.exp(-1j * 0.7 * abs(c) ** 2)
    assert out.coefficient(0) == pytest.approx(expected, abs=1e-14)
    assert np.allclose(out.actions(), s.actions(), atol=1e-15)


@given(small_states(), st.floats(min_value=-2, max_value=2))
@settings(max_examples=40)
def test_nonlinear_flow_preserves_pointwise_modulus(state, h):
    before = np.abs(state.to_physical())
    after = np.abs(ig.nonlinear_flow(state, h).to_physical())
    assert np.allclose(before, after, rtol=1e-12, atol=1e-13)


@given(small_states(), st.floats(min_value=1e-3, max_value=1.0))
@settings(max_examples=40)
def test_nonlinear_flow_reversibility(state, h):
    back = ig.nonlinear_flow(ig.nonlinear_flow(state, h), -h)
    scale = max(1.0, float(np.abs(state.coeffs).max()))
    assert np.allclose(back.coeffs, state.coeffs, atol=1e-12 * scale, rtol=0)


# -- linear phase maps ----------------------------------------------------------

def test_midpoint_rational_multiplier_closed_form():
    # h*omega = 2 gives (1-i)/(1+i) = -i = e^{-2i atan(1)}
    m = FrequencyModel(kind="explicit", index_bound=2,
                       overrides=((0, 0.0), (1, 20.0), (-1, 0.0), (-2, 0.0)))
    mult = ig.linear_multipliers(ig.PHASE_MIDPOINT_RATIONAL, 0.1, m, 4)
    k1 = 1  # fft slot of mode 1 for N=4
    assert mult[k1] == pytest.approx(-1j, abs=1e-14)
    assert mult[k1] == pytest.approx(np.exp(-2j * math.atan(1.0)), abs=1e-14)


def test_truncated_multiplier_above_cut_is_identity():
    mult = ig.linear_multipliers(ig.PHASE_TRUNCATED_EXACT, 0.13, DEFAULT, 100,
                                 K=math.pi / 3)
    ks = np.fft.fftfreq(100, d=0.01).astype(int)
    ws = np.array([ig.freqlat.frequency(DEFAULT, int(k)) for k in ks])
    above = np.abs(0.13 * ws) > math.pi / 3
    assert np.all(mult[above] == 1.0 + 0.0j)
    below = ~above
    assert np.allclose(mult[below], np.exp(-1j * 0.13 * ws[below]), atol=1e-15)


@pytest.mark.parametrize("kind", [ig.PHASE_EXACT, ig.PHASE_MIDPOINT_RATIONAL,
                                  ig.PHASE_TRUNCATED_EXACT])
def test_linear_maps_unimodular_and_action_preserving(kind):
    mult = ig.linear_multipliers(kind, 0.13, DEFAULT, 100, K=1.0)
    assert np.allclose(np.abs(mult), 1.0, atol=1e-15)
    state = three_mode_state()
    out = ig.linear_phase(state, 0.13, kind, DEFAULT, K=1.0)
    assert np.allclose(out.actions(), state.actions(), rtol=0, atol=1e-16)


# -- composed steps --------------------------------------------------------------

def test_midsplit_linear_limit_phase_accumulation():
    # a single tiny mode evolves by the pure stability-function phase
    N, h, n = 32, 0.13, 200
    m = DEFAULT
    amp = 1e-8
    s = SpectralState.from_coefficients({3: amp}, N)
    cfg = ig.SchemeConfig(scheme=ig.MID_SPLIT, h=h, freq=m, K=K_INF)
    for _ in range(n):
        s = ig.step(s, cfg)
    w3 = ig.freqlat.frequency(m, 3)
    expected = amp * np.exp(-2j * n * math.atan(h * w3 / 2))
    assert s.coefficient(3) == pytest.approx(expected, rel=1e-6)


def test_midpoint_linear_mode_equals_stability_function():
    # with the nonlinearity disabled the midpoint rule IS the rational map
    s = three_mode_state(64)
    cfg = ig.SchemeConfig(scheme=ig.MIDPOINT, h=0.2, freq=DEFAULT)
    out = ig.step_midpoint(s, cfg, nonlinear=False)
    ref = ig.linear_phase(s, 0.2, ig.PHASE_MIDPOINT_RATIONAL, DEFAULT)
    assert np.allclose(out.coeffs, ref.coeffs, atol=1e-13, rtol=0)


@given(small_states(mag=0.1), st.floats(min_value=1e-3, max_value=0.3))
@settings(max_examples=25, deadline=None)
def test_midpoint_conserves_l2_to_solver_tolerance(state, h):
    cfg = ig.SchemeConfig(scheme=ig.MIDPOINT, h=h, freq=FrequencyModel(index_bound=16))
    out = ig.step_midpoint(state, cfg)
    drift = abs(out.l2_norm() ** 2 - state.l2_norm() ** 2)
    assert drift < 10 * cfg.fixed_point_tol * max(1.0, state.l2_norm() ** 2)


def test_midpoint_divergence_error_carries_context():
    # strongly nonlinear regime: contraction constant h*|u|^2 >> 1
    s = SpectralState.from_coefficients({0: 3.0}, 32)
    cfg = ig.SchemeConfig(scheme=ig.MIDPOINT, h=1.0, freq=FrequencyModel(index_bound=16),
                          fixed_point_max_iters=25)
    with pytest.raises(ig.MidpointDivergenceError) as exc:
        ig.step_midpoint(s, cfg, _step_index=7)
    assert exc.value.step_index == 7
    assert 1 <= exc.value.iterations <= 25


def test_truncated_equals_exact_when_cut_inactive():
    s = three_mode_state()
    m = DEFAULT
    ks = s.modes()
    hmax = float(np.abs(0.1 * ig.freqlat.frequency_array(m, ks)).max())
    cfg_t = ig.SchemeConfig(scheme=ig.TRUNCATED_SPLIT, h=0.1, freq=m, K=hmax)
    cfg_e = ig.SchemeConfig(scheme=ig.EXACT_SPLIT, h=0.1, freq=m)
    a, b = ig.step(s, cfg_t), ig.step(s, cfg_e)
    assert np.array_equal(a.coeffs, b.coeffs)


def test_exact_split_vs_truncated_inf_series_match():
    s = three_mode_state()
    cfg_e = ig.SchemeConfig(scheme=ig.EXACT_SPLIT, h=0.13, freq=DEFAULT)
    cfg_t = ig.SchemeConfig(scheme=ig.TRUNCATED_SPLIT, h=0.13, freq=DEFAULT, K=1e12)
    sa = ig.run(s, cfg_e, 200, record_every=20)
    sb = ig.run(s, cfg_t, 200, record_every=20)
    assert np.allclose(sa.actions, sb.actions, atol=1e-14, rtol=0)


# -- run loop ---------------------------------------------------------------------

def test_run_zero_steps_single_record():
    s = three_mode_state()
    cfg = ig.SchemeConfig(scheme=ig.MID_SPLIT, h=0.13, freq=DEFAULT)
    series = ig.run(s, cfg, 0)
    assert series.n_records == 1
    assert series.times[0] == 0.0
    assert series.actions[0][2] == pytest.approx(0.01)


def test_run_records_final_partial_interval():
    s = three_mode_state()
    cfg = ig.SchemeConfig(scheme=ig.MID_SPLIT, h=0.5, freq=DEFAULT)
    series = ig.run(s, cfg, 25, record_every=10)
    assert list(series.times) == [0.0, 5.0, 10.0, 12.5]


@pytest.mark.parametrize("scheme", [ig.EXACT_SPLIT, ig.MID_SPLIT,
                                    ig.TRUNCATED_SPLIT])
def test_splitting_l2_conservation_along_run(scheme):
    s = three_mode_state()
    cfg = ig.SchemeConfig(scheme=scheme, h=0.13, freq=DEFAULT, K=math.pi / 3)
    series = ig.run(s, cfg, 500, record_every=100)
    rel = np.abs(series.l2 - series.l2[0]) / series.l2[0]
    assert rel.max() < 1e-12


def test_run_propagates_divergence_with_partial_series():
    s = SpectralState.from_coefficients({0: 3.0}, 32)
    cfg = ig.SchemeConfig(scheme=ig.MIDPOINT, h=1.0, freq=FrequencyModel(index_bound=16),
                          fixed_point_max_iters=20)
    with pytest.raises(ig.MidpointDivergenceError) as exc:
        ig.run(s, cfg, 10, record_every=1)
    assert exc.value.partial_series is not None
    assert exc.value.partial_series.n_records >= 1


def test_series_csv_layout():
    s = three_mode_state(32)
    cfg = ig.SchemeConfig(scheme=ig.MID_SPLIT, h=0.1, freq=DEFAULT)
    series = ig.run(s, cfg, 2, record_every=1, sobolev_s=2.0)
    lines = series.to_csv().splitlines()
    assert lines[0].split(",")[:3] == ["t", "A_0", "A_1"]
    assert lines[0].split(",")[-2:] == ["l2_norm", "sobolev_2.0"]
    assert len(lines) == 4
    assert len(lines[1].split(",")) == 1 + 16 + 2


def test_scheme_config_validation():
    with pytest.raises(Exception):
        ig.SchemeConfig(scheme="strang", h=0.1, freq=DEFAULT)
    with pytest.raises(Exception):
        ig.SchemeConfig(scheme=ig.TRUNCATED_SPLIT, h=0.1, freq=DEFAULT)  # K=inf
    with pytest.raises(Exception):
        ig.SchemeConfig(scheme=ig.MID_SPLIT, h=-0.1, freq=DEFAULT)


@pytest.mark.parametrize("scheme", [ig.EXACT_SPLIT, ig.MID_SPLIT,
                                    ig.TRUNCATED_SPLIT, ig.MIDPOINT])
def test_run_fast_path_matches_single_steps_bitwise(scheme):
    s = three_mode_state(64)
    cfg = ig.SchemeConfig(scheme=scheme, h=0.11, freq=DEFAULT,
                          K=math.pi / 3 if scheme == ig.TRUNCATED_SPLIT else ig.K_INF)
    holder = {}
    ig.run(s, cfg, 30, record_every=30,
           on_record=lambda i, t, st: holder.__setitem__(i, st))
    stepwise = s.copy()
    for i in range(30):
        stepwise = ig.step(stepwise, cfg, _step_index=i)
    assert np.array_equal(holder[30].coeffs, stepwise.coeffs)
