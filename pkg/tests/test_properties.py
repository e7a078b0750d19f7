"""Cross-module invariants, several as hypothesis property tests."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frft_stoch.dfrft import CovariancePair, apply, build_dfrft, transform_statistics
from frft_stoch.estimators import DeltaSurface, Verdict, estimate_autocorr, estimate_mean, \
    estimate_pseudo_autocorr, stationarity_verdict
from frft_stoch.frfs import FrfsConfig, coeff_correlations, frfs_basis
from frft_stoch.frft_kernel import SampledSignal, TimeGrid, frft_points, frft_quadrature, kernel_value
from frft_stoch.processes import StationaryModel, generate
from frft_stoch.theory import numeric_output_autocorr, numeric_output_pseudo_autocorr, predicted_autocorr

ORDERS = st.floats(0.15, 1.85) | st.floats(2.15, 3.85)
GRID = TimeGrid.symmetric(10.0, 0.02)


def bump(shift, freq):
    return lambda t: np.exp(-(t - shift) ** 2) * np.exp(1j * freq * t)


# -- continuous kernel ---------------------------------------------------------

@pytest.mark.parametrize("a", [1 / 3, 0.5, 2 / 3])
def test_kernel_is_nascent_delta(a):
    # sum_s K(s, u1) conj K(s, u2) ds integrated against g(u2) reproduces g(u1)
    s = TimeGrid.symmetric(40.0, 0.01)
    u2 = TimeGrid.symmetric(8.0, 0.01)
    g = np.exp(-u2.points ** 2) * np.cos(u2.points)
    u1 = np.array([-0.7, 0.0, 0.4])
    k1 = kernel_value(a, s.points[:, None], u1[None, :])
    k2 = kernel_value(a, s.points[:, None], u2.points[None, :])
    inner = (k1 * s.trapezoid_weights()[:, None]).T @ k2.conj()
    approx = inner @ (g * u2.trapezoid_weights())
    assert np.max(np.abs(approx - np.exp(-u1 ** 2) * np.cos(u1))) < 1e-3


@given(ORDERS, st.floats(-2, 2), st.floats(-2, 2), st.complex_numbers(max_magnitude=3),
       st.complex_numbers(max_magnitude=3))
def test_linearity(a, s1, s2, c1, c2):
    u = np.linspace(-2, 2, 9)
    z1 = bump(s1, 0.5)(GRID.points)
    z2 = bump(s2, -1.0)(GRID.points)
    lhs = frft_points(c1 * z1 + c2 * z2, GRID, a, u, check=False)
    rhs = c1 * frft_points(z1, GRID, a, u, check=False) + c2 * frft_points(z2, GRID, a, u, check=False)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * (1 + abs(c1) + abs(c2)) * 10


@given(ORDERS, st.floats(-2, 2), st.floats(-1.5, 1.5))
def test_parseval(a, shift, freq):
    sig = SampledSignal.from_function(GRID, bump(shift, freq))
    out = frft_quadrature(sig, a, GRID, check=False)
    assert abs(out.norm() - sig.norm()) < 1e-3


@given(st.floats(0.15, 0.85), st.floats(0.15, 0.85), st.floats(-1, 1))
def test_angle_additivity(a, b, shift):
    sig = SampledSignal.from_function(GRID, bump(shift, 0.3))
    two = frft_quadrature(frft_quadrature(sig, a, GRID, check=False), b, GRID, check=False)
    one = frft_quadrature(sig, a + b, GRID, check=False)
    assert np.max(np.abs(two.values - one.values)) < 1e-3


# -- DFRFT ------------------------------------------------------------------------

@given(st.integers(2, 32), st.floats(-4, 4))
def test_dfrft_periodicity(n, a):
    assert np.max(np.abs(build_dfrft(n, a + 4).matrix - build_dfrft(n, a).matrix)) < 1e-9


@given(st.integers(2, 24), st.floats(-4, 4))
def test_dfrft_preserves_properness_exactly(n, a):
    rng = np.random.default_rng(n)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    stats = CovariancePair(np.zeros(n, complex), x @ x.conj().T, np.zeros((n, n), complex))
    assert not np.any(transform_statistics(stats, build_dfrft(n, a)).pseudo)


def test_dfrft_monte_carlo_covariance_converges():
    n = 12
    f = build_dfrft(n, 0.7)
    idx = np.arange(n)
    c = 0.8 ** np.abs(idx[:, None] - idx[None, :])
    target = transform_statistics(CovariancePair(np.zeros(n, complex), c + 0j, np.zeros((n, n), complex)), f).cov
    grid = TimeGrid(0.0, 1.0, n)
    model = StationaryModel.colored(lambda tau: 0.8 ** np.abs(tau))
    errors = []
    for m in (500, 8000):
        z = apply(f, generate(model, grid, m, seed=1).realizations)
        errors.append(np.max(np.abs(z.T @ z.conj() / m - target)))
    # O(1/sqrt(M)): 16x more samples should shrink the error well below half
    assert errors[1] < 0.5 * errors[0]
    assert errors[1] < 6 / math.sqrt(8000)


# -- FRFS ---------------------------------------------------------------------------

def test_frfs_gram_at_pi_over_3():
    grid = TimeGrid.symmetric(4.0, 1 / 128)
    cfg = FrfsConfig(2 / 3, 8.0, -8, 8)
    basis = np.stack([frfs_basis(cfg, n, grid.points) for n in cfg.indices])
    gram = (basis * grid.trapezoid_weights()) @ basis.conj().T
    assert np.max(np.abs(gram - np.eye(17))) < 1e-3


@given(st.floats(0.1, 1.9), st.floats(0.1, 5.0))
def test_white_surface_gives_uncorrelated_coefficients(a, weight):
    m = coeff_correlations(DeltaSurface(weight), FrfsConfig(a, 8.0, -4, 4))
    assert np.array_equal(m, np.diag(np.diag(m)))


# -- processes and estimators ------------------------------------------------------------

@given(st.integers(0, 2 ** 64 - 1))
def test_seed_determinism(seed):
    model = StationaryModel.white_improper(0.3)
    grid = TimeGrid(0.0, 1.0, 5)
    assert np.array_equal(generate(model, grid, 3, seed).realizations, generate(model, grid, 3, seed).realizations)


@pytest.mark.parametrize("model", [StationaryModel.white_proper(), StationaryModel.colored("exp"),
                                   StationaryModel.colored("gauss", acf_scale=2.0)])
def test_proper_models(model):
    m = 20000
    ens = generate(model, TimeGrid(0.0, 0.5, 16), m, seed=8)
    acf = estimate_autocorr(ens)
    assert np.array_equal(acf.values, acf.values.conj().T)
    assert np.max(np.abs(estimate_pseudo_autocorr(ens).values)) < 5 / math.sqrt(m) * acf.values[0, 0].real
    mean = estimate_mean(ens)
    assert np.max(np.abs(mean.values) / mean.stderr) < 4.5


def test_verdict_false_alarm_rate():
    # correct verdicts must survive most seeds at both ensemble sizes
    grid = TimeGrid(0.0, 1.0, 16)
    f = build_dfrft(16, 0.5)
    model = StationaryModel.white_proper()
    for m in (500, 4000):
        hits = 0
        for seed in range(10):
            z = apply(f, generate(model, grid, m, seed).realizations)
            rep = stationarity_verdict(estimate_mean(z), estimate_autocorr(z), estimate_pseudo_autocorr(z), True)
            hits += rep.verdict is Verdict.STATIONARY
        assert hits >= 9


def test_estimator_unbiased_over_seeds():
    a = 0.5
    u = np.array([-0.5, 0.0, 0.5])
    grid = TimeGrid.symmetric(12.0, 0.08)
    model = StationaryModel.colored("gauss")
    target = numeric_output_autocorr(model.acf_fn(), a, u, u, half_width=12.0, step=grid.step)
    surfaces = [estimate_autocorr(frft_points(generate(model, grid, 500, seed).realizations, grid, a, u))
                for seed in range(10)]
    avg = np.mean([s.values for s in surfaces], axis=0)
    se = np.sqrt(np.mean([s.stderr ** 2 for s in surfaces], axis=0) / 10)
    assert np.max(np.abs(avg - target) / se) < 4.5


# -- theory ----------------------------------------------------------------------------

@pytest.mark.parametrize("fam", ["exp", "gauss"])
def test_closed_form_vs_oracle_pi_over_3(fam):
    # tiny corner values need a long window: the oracle's absolute error decays like 1/L
    r = StationaryModel.colored(fam).acf_fn()
    u = np.linspace(-1, 1, 5)
    closed = predicted_autocorr(r, 2 / 3, u[:, None], u[None, :])
    oracle = numeric_output_autocorr(r, 2 / 3, u, u, half_width=384.0)
    assert np.max(np.abs(closed - oracle) / np.abs(oracle)) < 0.02


@given(st.floats(0.1, 0.9), st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2))
def test_modulus_depends_on_difference(a, u1, u2, shift):
    r = StationaryModel.colored("exp").acf_fn()
    assert abs(predicted_autocorr(r, a, u1, u2)) == pytest.approx(
        abs(predicted_autocorr(r, a, u1 + shift, u2 + shift)), abs=1e-12)


def test_zero_pseudo_input_gives_zero_output():
    zero = lambda tau: np.zeros_like(np.asarray(tau, dtype=float))
    u = np.linspace(-1, 1, 3)
    assert np.max(np.abs(numeric_output_pseudo_autocorr(zero, 0.5, u, u, half_width=12.0))) == 0.0
