import math

import numpy as np
import pytest

from tunneltime import distributions as dist
from tunneltime import rabi

RP = rabi.RabiParams()


def test_params():
    assert RP.period == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        rabi.RabiParams(0.0)


def test_population_examples():
    assert rabi.excited_population(0.0, RP) == 0
    assert rabi.excited_population(RP.period / 2, RP) == pytest.approx(1.0)
    assert rabi.excited_population(RP.period / 4, RP) == pytest.approx(0.5)


@pytest.mark.parametrize("omega0", [1.0, 2.5])
def test_analytic_toa(omega0):
    rp = rabi.RabiParams(omega0)
    d = rabi.analytic_toa(rp)
    assert d.mean() == pytest.approx(rp.period / 4, rel=1e-6)
    assert d.density[0] == 0
    assert d.integral() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("omega0", [1.0, 2.5])
def test_analytic_qs(omega0):
    rp = rabi.RabiParams(omega0)
    d = rabi.analytic_qs(rp)
    assert d.mean() == pytest.approx(rp.period / 2, rel=1e-9)
    i = int(np.argmax(d.density))
    assert d.t[i] == pytest.approx(rp.period / 2, abs=2 * (d.t[1] - d.t[0]))
    assert d.density[i] == pytest.approx(omega0 / math.pi, rel=1e-6)
    assert d.integral() == pytest.approx(1.0, abs=1e-9)


def test_numeric_pipeline_matches_closed_forms():
    n = 8192
    toa, _ = dist.split_toa_tod(rabi.population_signal(RP, (0, RP.period / 2), n))
    qs = dist.qs_from_signal(rabi.population_signal(RP, (0, RP.period), n))
    assert np.max(np.abs(toa.density - rabi.analytic_toa(RP, n).density)) < 1e-6
    assert np.max(np.abs(qs.density - rabi.analytic_qs(RP, n).density)) < 1e-6
    assert toa.mean() == pytest.approx(RP.period / 4, rel=1e-3)
    assert qs.mean() == pytest.approx(RP.period / 2, rel=1e-3)
    tf = dist.tf_from_signal(rabi.population_signal(RP, (0, RP.period / 2), n))
    np.testing.assert_allclose(tf.density * tf.Z, 0.5 * np.sin(tf.t), atol=1e-6)
