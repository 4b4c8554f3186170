import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcnn.analytic import (
    GridSpec,
    Scenario,
    StatQCFunction,
    acceptance_out,
    build_ps_grid,
    decision_limit,
    p_accept_closed,
    p_reject_closed,
    stat_reject,
    write_ps_grid_csv,
)

mpmath.mp.dps = 40


def oracle_reject(n, k, mu, sigma, l):
    """Rejection probability from normal CDFs in extended precision."""
    l, mu, sigma = mpmath.mpf(l), mpmath.mpf(mu), mpmath.mpf(sigma)
    inside = mpmath.ncdf(l) - mpmath.ncdf(-l)
    shifted = mpmath.ncdf((l - mu) / sigma) - mpmath.ncdf((-l - mu) / sigma)
    return float(1 - inside ** (n - k) * shifted**k)


def oracle_limit(p, n):
    root = (1 - mpmath.mpf(p)) ** (mpmath.mpf(1) / n)
    return float(mpmath.sqrt(2) * mpmath.erfinv(root))


def test_stat_function_scalar_and_batch():
    f = StatQCFunction(2.0)
    assert stat_reject([0.0, 2.5], f) is True
    assert stat_reject([0.0, 2.0], f) is False  # boundary is not a rejection
    np.testing.assert_array_equal(f(np.array([[0, 0], [0, -3.0]])), [False, True])
    assert stat_reject([12.0], StatQCFunction(2.0, m=10.0, s=1.5)) is False


def test_stat_function_validation():
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            StatQCFunction(bad)
    with pytest.raises(ValueError):
        StatQCFunction(2.0, s=0.0)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(3, 0, mu=1.0)
    with pytest.raises(ValueError):
        Scenario(2, 3)
    with pytest.raises(ValueError):
        Scenario(2, 1, sigma=0.0)


@pytest.mark.parametrize("n,k,mu,sigma,l", [
    (1, 1, 0.0, 2.0, 1.5), (2, 2, 2.67, 1.0, 1.88809), (3, 3, 0.0, 3.33, 2.958895),
    (4, 1, -1.3, 1.0, 3.3), (4, 4, 6.0, 7.0, 3.218706), (3, 2, 0.1, 1.0, 2.0),
])
def test_closed_form_against_oracle(n, k, mu, sigma, l):
    assert p_reject_closed(Scenario(n, k, mu, sigma), l) == pytest.approx(
        oracle_reject(n, k, mu, sigma, l), abs=1e-15, rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 4), st.data(), st.floats(-6, 6), st.floats(1.0, 7.0), st.floats(0.5, 4.0),
)
def test_closed_form_property(n, data, mu, sigma, l):
    k = data.draw(st.integers(1, n))
    assert p_reject_closed(Scenario(n, k, mu, sigma), l) == pytest.approx(
        oracle_reject(n, k, mu, sigma, l), abs=2e-15, rel=1e-12)


def test_in_control_equals_false_rejection():
    for n in range(1, 5):
        l = decision_limit(0.01, n)
        assert p_reject_closed(Scenario(n, 0), l) == pytest.approx(0.01, abs=1e-15)


def test_acceptance_symmetric_in_mu_and_guarded():
    assert acceptance_out(2.0, 1.3, 1.7) == acceptance_out(2.0, -1.3, 1.7)
    with pytest.raises(ValueError):
        acceptance_out(2.0, 0.0, 0.0)


def test_complement_keeps_tiny_acceptance():
    p = p_accept_closed(Scenario(4, 4, 20.0, 1.0), 2.0)
    assert 0.0 <= p < 1e-50


@pytest.mark.parametrize("p,n", [(0.127240, 1), (0.114545, 2), (0.009234, 3), (0.002574, 2),
                                 (1e-9, 4), (0.5, 4), (0.999, 1)])
def test_decision_limit_against_oracle(p, n):
    assert decision_limit(p, n) == pytest.approx(oracle_limit(p, n), rel=1e-14)


def test_decision_limit_domain():
    for bad in (0.0, 1.0, -0.1, 1.2):
        with pytest.raises(ValueError):
            decision_limit(bad, 2)
    with pytest.raises(ValueError):
        decision_limit(0.01, 0)


def test_decision_limit_round_trip():
    for n in range(1, 5):
        for p in (0.2, 0.05, 0.01, 0.003):
            assert p_reject_closed(Scenario(n, 0), decision_limit(p, n)) == pytest.approx(p, rel=1e-13)


def test_default_grid_counts():
    grid = GridSpec()
    assert len(grid.sigmas) == 60 and len(grid.mus) == 60
    assert grid.sigmas[0] == 1.1 and grid.sigmas[-1] == 7.0
    assert len(grid.scenarios(3)) == 360
    assert len(grid.scenarios(2)) == 240


def test_grid_parse():
    g = GridSpec.parse("sigma=1.5:3.0:0.5;mu=none")
    assert g.sigmas == (1.5, 2.0, 2.5, 3.0) and g.mus == ()
    for bad in ("tau=1:2:1", "sigma=1:2", "sigma=2:1:0.5", "mu=0:1:0"):
        with pytest.raises(ValueError):
            GridSpec.parse(bad)


def test_ps_grid_csv(tmp_path):
    grid = GridSpec.parse("sigma=2:3:1;mu=1:2:1")
    table = build_ps_grid(2, 2.5, grid)
    path = tmp_path / "ps.csv"
    write_ps_grid_csv(path, 2, 6, 2.5, table)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,k,a,mu,sigma,l,p_s"
    assert len(lines) == 1 + 2 * 4
    n, k, a, mu, sigma, l, p = lines[1].split(",")
    assert float(p) == pytest.approx(p_reject_closed(Scenario(2, 1, 0.0, 2.0), 2.5), abs=5e-7)


def test_limit_monotone_in_n_and_p():
    assert decision_limit(0.01, 1) < decision_limit(0.01, 2) < decision_limit(0.01, 4)
    assert decision_limit(0.05, 3) < decision_limit(0.01, 3)
    assert math.isfinite(decision_limit(1e-15, 4))
