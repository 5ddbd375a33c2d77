import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from dsym import (
    LOG_SYM,
    R_SYM,
    DensityModel,
    GridSpec,
    StieltjesParams,
    SymmetryParams,
    extend_seed,
    make_lognormal,
    make_pakes_ds,
    make_poly_ds,
    make_psi_alpha,
    make_psi_lognormal,
    make_stieltjes,
    moment,
    pakes_evaluator_agreement,
    pakes_log_unnorm,
    pakes_log_unnorm_alt,
    poly_ds_boundary_limits,
    poly_ds_norm_const,
    psi_from_callable,
    stieltjes_cross_residual,
    symmetry_residual,
)

# independently computed at 30 significant digits
C_ORACLE = {
    1.1: 0.7863254395720799914821,
    1.5: 1.710875271557221925279,
    1.75: 2.065718314083851924273,
    2.0: 2.355003666048624746121,
    2.5: 2.819778667522187209597,
}
POLY_PDF_1 = 0.42462778908444917   # theta=1, k=2, y=1
POLY_PDF_4 = 0.10615694727111229   # theta=1, k=2, y=4
POLY_PDF_2_THETA2 = 0.2922480722659021742988  # theta=2, k=1.5, y=2


def test_lognormal_matches_reference_implementation():
    mu, sigma = 0.3, 0.7
    d = make_lognormal(mu, sigma)
    ref = scipy.stats.lognorm(s=sigma, scale=math.exp(mu))
    y = np.geomspace(1e-3, 1e3, 301)
    assert np.allclose(d.log_pdf(y), ref.logpdf(y), rtol=1e-12, atol=0.0)
    assert np.allclose(d.pdf(y), ref.pdf(y), rtol=1e-12, atol=0.0)


def test_lognormal_meta_and_validation():
    d = make_lognormal(0.5, 0.8)
    assert d.meta["delta"] == pytest.approx(math.exp(0.5), rel=1e-15)
    assert d.meta["theta"] == pytest.approx(math.exp(0.5 - 0.64), rel=1e-15)
    assert d.meta["k"] == pytest.approx(math.exp(0.64), rel=1e-15)
    assert d.meta["delta"] / d.meta["theta"] == pytest.approx(d.meta["k"], rel=1e-14)
    for mu, sigma in [(0.0, 0.0), (0.0, -1.0), (math.nan, 1.0), (0.0, math.inf)]:
        with pytest.raises(ValueError):
            make_lognormal(mu, sigma)


@pytest.mark.parametrize("mu,sigma,eps", [
    (0.0, 1.0, 1.5), (0.0, 1.0, -1.01), (0.0, 1.0, math.nan),
    (0.0, 0.0, 0.5), (math.inf, 1.0, 0.5),
])
def test_stieltjes_params_validation(mu, sigma, eps):
    with pytest.raises(ValueError):
        StieltjesParams(mu, sigma, eps)


def test_stieltjes_eps_zero_is_the_base_lognormal():
    p = StieltjesParams(0.2, 0.9, 0.0)
    d = make_stieltjes(p)
    base = make_lognormal(0.2, 0.9)
    y = np.geomspace(1e-3, 1e3, 301)
    assert np.allclose(d.log_pdf(y), base.log_pdf(y), rtol=1e-14, atol=0.0)


def test_stieltjes_cross_identities_hold():
    p = StieltjesParams(0.0, 1.0, 0.5)
    grid = GridSpec(-4.0, 4.0, 801)
    rep_log, rep_r = stieltjes_cross_residual(p, grid)
    assert rep_log.relation == "LOG_SYM_CROSS"
    assert rep_r.relation == "R_SYM_CROSS"
    assert rep_log.residual < 1e-12
    assert rep_r.residual < 1e-12
    assert rep_log.passed and rep_r.passed


def test_stieltjes_has_neither_symmetry_itself():
    p = StieltjesParams(0.0, 1.0, 0.5)
    d = make_stieltjes(p)
    grid = GridSpec(-4.0, 4.0, 801)
    assert symmetry_residual(d, LOG_SYM, p.delta, grid).residual > 0.01
    assert symmetry_residual(d, R_SYM, p.theta, grid).residual > 0.01


def test_pakes_rejects_mismatched_k():
    psi = extend_seed(make_psi_alpha(0.5, 2.0))
    with pytest.raises(ValueError, match="k="):
        make_pakes_ds(psi, SymmetryParams(1.0, 1.5))


def test_pakes_rejects_reflection_violation():
    psi = psi_from_callable(lambda u: np.asarray(u, dtype=float), k=2.0)
    with pytest.raises(ValueError, match="reflection"):
        make_pakes_ds(psi, SymmetryParams(1.0, 2.0))


def test_pakes_flat_seed_reproduces_piecewise_power_density():
    params = SymmetryParams(1.0, 2.0)
    d = make_pakes_ds(extend_seed(make_psi_alpha(0.5, 2.0)), params)
    ref = make_poly_ds(params)
    y = np.geomspace(2e-3, 5e2, 801)
    diff = np.abs(np.expm1(d.log_pdf(y) - ref.log_pdf(y)))
    assert float(diff.max()) < 1e-12
    assert d.i_max >= 3
    assert d.params == params
    assert d.meta["evaluator_agreement"] <= 1e-12
    assert isinstance(d, DensityModel)


def test_pakes_lognormal_generator_reproduces_lognormal():
    theta, k = 1.3, 1.7
    L = math.log(k)
    d = make_pakes_ds(make_psi_lognormal(k), SymmetryParams(theta, k))
    ref = make_lognormal(math.log(theta) + L, math.sqrt(L))
    y = np.geomspace(theta * 1e-2, theta * 1e2, 801)
    diff = np.abs(np.expm1(d.log_pdf(y) - ref.log_pdf(y)))
    assert float(diff.max()) < 1e-12


@pytest.mark.parametrize("theta,k", [(1.0, 2.0), (0.7, 1.5)])
def test_pakes_evaluator_ratio_and_agreement(theta, k):
    params = SymmetryParams(theta, k)
    psi = extend_seed(make_psi_alpha(0.25, k))
    la = float(pakes_log_unnorm(psi, params, theta)[0])
    lb = float(pakes_log_unnorm_alt(psi, params, theta)[0])
    # the two piecewise formulas differ by the constant factor theta k^4
    assert math.exp(lb - la) == pytest.approx(theta * k ** 4, rel=1e-10)
    L = math.log(k)
    grid = GridSpec(math.log(theta) - 3.0 * L - 1.0, math.log(theta) + 3.0 * L + 1.0, 257)
    assert pakes_evaluator_agreement(psi, params, grid) <= 1e-12


def test_pakes_density_normalizes_and_is_doubly_symmetric():
    params = SymmetryParams(0.8, 1.6)
    d = make_pakes_ds(extend_seed(make_psi_alpha(0.75, 1.6)), params)
    assert moment(d, 0).value == pytest.approx(1.0, rel=1e-9)
    grid = GridSpec(math.log(params.theta) - 4.0, math.log(params.theta) + 4.0, 801)
    assert symmetry_residual(d, LOG_SYM, params.delta, grid).residual < 1e-9
    assert symmetry_residual(d, R_SYM, params.theta, grid).residual < 1e-9


@pytest.mark.parametrize("k,expected", sorted(C_ORACLE.items()))
def test_poly_norm_const_against_series_oracle(k, expected):
    assert poly_ds_norm_const(k) == pytest.approx(expected, rel=1e-14)


def test_poly_norm_const_validation():
    for k in (1.0, 0.5, -2.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            poly_ds_norm_const(k)


def test_poly_pdf_frozen_values():
    d = make_poly_ds(SymmetryParams(1.0, 2.0))
    assert d.pdf(1.0) == pytest.approx(POLY_PDF_1, rel=1e-12)
    assert d.pdf(4.0) == pytest.approx(POLY_PDF_4, rel=1e-12)
    assert abs(d.pdf(1.0) - 0.4246276) < 1e-6
    assert abs(poly_ds_norm_const(2.0) - 2.3550037) < 1e-6
    d2 = make_poly_ds(SymmetryParams(2.0, 1.5))
    assert d2.pdf(2.0) == pytest.approx(POLY_PDF_2_THETA2, rel=1e-13)


def test_poly_meta_and_norm_cross_check():
    params = SymmetryParams(1.0, 2.0)
    d = make_poly_ds(params)
    assert d.meta["series_quadrature_defect"] < 1e-12
    assert d.norm.constant == pytest.approx(poly_ds_norm_const(2.0), rel=1e-15)
    assert d.series_const == pytest.approx(C_ORACLE[2.0], rel=1e-14)
    assert moment(d, 0).value == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("theta,k", [(1.0, 2.0), (0.7, 1.5), (2.0, 1.25)])
def test_poly_boundary_limits_coincide_exactly(theta, k):
    params = SymmetryParams(theta, k)
    d = make_poly_ds(params)
    for i in range(-6, 7):
        below, above = poly_ds_boundary_limits(params, i)
        assert below == above
        y = theta * k ** (2.0 * i)
        assert d.pdf(y) == pytest.approx(below, rel=1e-10)
    assert poly_ds_boundary_limits(params, 0)[0] == pytest.approx(
        1.0 / (theta * poly_ds_norm_const(k)), rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(log_k=st.floats(0.05, 1.2), log_theta=st.floats(-1.5, 1.5),
       i=st.integers(-8, 8))
def test_poly_boundary_limits_property(log_k, log_theta, i):
    params = SymmetryParams(math.exp(log_theta), math.exp(log_k))
    below, above = poly_ds_boundary_limits(params, i)
    assert below == above
    assert below > 0.0


def test_poly_second_moment_closed_form():
    theta, k = 1.0, 2.0
    d = make_poly_ds(SymmetryParams(theta, k))
    assert moment(d, 2).value == pytest.approx(theta ** 2 * k ** 4, rel=1e-8)
