import math
import warnings

import numpy as np
import pytest

from tunneltime import distributions as dist
from tunneltime import spectral as sp
from tunneltime.scattering import PhysicalParams
from tunneltime.wavepacket import GaussianSpectrum, WavePacket

SPEC = GaussianSpectrum()
KB = math.sqrt(2.0)

# independent mpmath references (tanh-sinh quadrature over k, 30 digits)
TF_MEAN_L0 = 25.062974714286780
K_STAR = {2.0: 1.0096335432022965, 10.0: 1.0547814627867785, 12.0: 1.0675339627937278}
FRACTION_L0 = 5.9417243951587665e-17


def P(L):
    return PhysicalParams(L=L)


def test_tf_mean_thin_barrier():
    assert sp.tf_mean_spectral(SPEC, P(0.0)) == pytest.approx(TF_MEAN_L0, rel=1e-10)
    # -x0/v0 = 25 plus the free Wigner term and the 1/k average over the packet
    assert sp.tf_mean_spectral(SPEC, P(0.0)) == pytest.approx(25.0, rel=3e-3)


def test_tf_mean_matches_time_domain():
    p = P(5.0)
    s = WavePacket(SPEC, p).sample("current_at_exit", (0.0, 120.0), 1200)
    d = dist.tf_from_current(s)
    assert sp.tf_mean_spectral(SPEC, p) == pytest.approx(d.mean(), rel=1e-2)


def test_tf_mean_shape():
    # decreasing through the Hartman range, increasing once above-barrier flux dominates
    low = [sp.tf_mean_spectral(SPEC, P(L)) for L in (8, 10, 12, 14)]
    high = [sp.tf_mean_spectral(SPEC, P(L)) for L in (25, 30, 35, 40)]
    assert np.all(np.diff(low) < 0) and np.all(np.diff(high) > 0)


def test_qs_saturation():
    vals = [sp.qs_regional_mean_spectral(SPEC, P(L)) for L in (8.0, 10.0, 14.0)]
    for v in vals:
        assert v == pytest.approx(26.0, rel=0.02)
    assert (max(vals) - min(vals)) / vals[0] < 5e-3


def test_remainder_is_tiny_for_opaque_barriers():
    p = P(10.0)
    R = sp.remainder(SPEC, p)
    assert abs(R) < 1e-6 * sp.qs_regional_mean_spectral(SPEC, p)
    assert sp.remainder(SPEC, P(0.0)) == 0


def test_exact_phase_integral_differs_from_remainder_form():
    # the closed-form phase integral and the remainder form disagree by ~2%
    p = P(10.0)
    exact = sp.qs_regional_mean_exact(SPEC, p)
    approx = sp.qs_regional_mean_spectral(SPEC, p)
    assert exact == pytest.approx(25.4387, abs=1e-3)
    assert 0.015 < (approx - exact) / exact < 0.025


def test_qs_local_close_to_tf_for_thin_barrier():
    assert sp.qs_local_mean_spectral(SPEC, P(0.0)) == pytest.approx(sp.tf_mean_spectral(SPEC, P(0.0)), rel=5e-3)


def test_broad_band_warns():
    with pytest.warns(sp.RegimeWarning):
        sp.tf_mean_spectral(GaussianSpectrum(sigma_k=0.3, x0=-10.0), P(1.0))


def test_k_star_values():
    assert sp.k_star(SPEC, P(0.0)) == pytest.approx(1.0, abs=1e-9)
    for L, ref in K_STAR.items():
        assert sp.k_star(SPEC, P(L)) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("L", [2.0, 5.0, 8.0, 10.0])
def test_k_star_shift_formula(L):
    direct = sp.k_star(SPEC, P(L)) - SPEC.k0
    shift = sp.k_star_shift(SPEC, P(L)) - SPEC.k0
    assert shift == pytest.approx(direct, rel=0.1)


@pytest.mark.xfail(strict=True, reason="the leading-order shift misses the curvature of ln T; 12.6% off at L=12")
def test_k_star_shift_formula_at_12():
    direct = sp.k_star(SPEC, P(12.0)) - SPEC.k0
    assert sp.k_star_shift(SPEC, P(12.0)) - SPEC.k0 == pytest.approx(direct, rel=0.1)


def test_k_star_monotone():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp.RegimeWarning)
        ks = [sp.k_star(SPEC, P(L)) for L in np.linspace(2, 14, 13)]
    assert np.all(np.diff(ks) > 0)


def test_sigma_eff():
    w0 = sp.sigma_eff(SPEC, P(0.0))
    assert w0.formula == pytest.approx(0.05, rel=1e-12) and w0.curvature == pytest.approx(0.05, rel=1e-6)
    assert sp.sigma_eff(SPEC, P(50.0), at=SPEC.k0).formula == pytest.approx(0.0707, rel=1e-3)
    w10 = sp.sigma_eff(SPEC, P(10.0))
    assert w10.curvature == pytest.approx(w10.formula, rel=0.03)
    with pytest.raises(sp.SaddleBreakdownError):
        sp.sigma_eff(SPEC, P(100.5), at=SPEC.k0)
    with pytest.raises(sp.SaddleBreakdownError):
        sp.sigma_eff(SPEC, P(5.0), at=1.5)


def test_crossover_lengths():
    L_star, L_c = sp.crossover_lengths(SPEC, P(0.0))
    assert L_star == pytest.approx((KB - 1) ** 2 / 0.01, rel=1e-12)
    assert L_star == pytest.approx(17.157, abs=1e-3)
    assert L_c == pytest.approx(100.0, rel=1e-12)
    narrow = GaussianSpectrum(sigma_k=0.025)
    assert sp.crossover_lengths(narrow, P(0.0))[0] == pytest.approx(4 * L_star, rel=1e-12)
    with pytest.raises(sp.NoTunnelingError):
        sp.crossover_lengths(GaussianSpectrum(k0=1.5), P(0.0))


def test_classify():
    assert sp.classify(SPEC, P(0.5)) is sp.Regime.PRE_OPAQUE
    assert sp.classify(SPEC, P(10.0)) is sp.Regime.HARTMAN
    assert sp.classify(SPEC, P(20.0)) is sp.Regime.ABOVE_BARRIER


def test_above_barrier_fraction():
    assert sp.above_barrier_fraction(SPEC, P(0.0)) == pytest.approx(FRACTION_L0, rel=1e-6)
    Ls = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    fr = [sp.above_barrier_fraction(SPEC, P(L)) for L in Ls]
    assert np.all(np.diff(fr) > 0) and fr[-1] > 0.99


@pytest.mark.xfail(strict=True, reason="the fraction at L* is ~2e-4; the 50% crossing sits near L=22")
def test_above_barrier_fraction_half_at_L_star():
    L_star, _ = sp.crossover_lengths(SPEC, P(0.0))
    assert sp.above_barrier_fraction(SPEC, P(L_star)) == pytest.approx(0.5, rel=0.2)


def test_tf_mean_opaque():
    p = P(10.0)
    assert sp.tf_mean_opaque(SPEC, p) == pytest.approx(sp.tf_mean_spectral(SPEC, p), rel=0.02)
    with pytest.warns(sp.RegimeWarning):
        sp.tf_mean_opaque(SPEC, P(0.0))


def test_spread_estimates():
    s0 = sp.tf_spread_estimate(SPEC, P(0.0))
    assert s0.sqrt_form == pytest.approx(5.0) and s0.linear_form == pytest.approx(5.0) and s0.valid
    s50 = sp.tf_spread_estimate(SPEC, P(50.0))
    assert s50.sqrt_form == pytest.approx(2.828, rel=1e-3) and not s50.valid
    vals = [sp.tf_spread_estimate(SPEC, P(L)).sqrt_form for L in np.linspace(0, 90, 10)]
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(sp.SaddleBreakdownError):
        sp.tf_spread_estimate(SPEC, P(100.5))
    assert sp.qs_spread_estimate(SPEC, P(10.0)) == pytest.approx(5.0)


def test_regime_report_csv(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("error", sp.RegimeWarning)
        reports = [sp.regime_report(SPEC, P(L)) for L in (2.0, 10.0, 30.0)]
    assert reports[1].k_star == pytest.approx(K_STAR[10.0], abs=1e-8)
    assert reports[2].regime is sp.Regime.ABOVE_BARRIER
    path = tmp_path / "regime.csv"
    sp.write_regime_csv(path, reports, SPEC, P(0.0))
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ") and "k0=" in lines[0]
    assert lines[1] == "L,k_star,sigma_eff,L_star,L_c,above_barrier_fraction,regime"
    assert len(lines) == 5 and lines[3].endswith(",hartman")
