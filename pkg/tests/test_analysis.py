"""Statistics: per-round conversion, intervals, crossings, scaling fits."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from spinhex.analysis import (
    CurvePoint,
    aggregate_curve,
    binomial_interval,
    fit_and_project,
    fit_scaling,
    per_round_rate,
    read_csv,
    threshold_estimate,
    write_csv,
)


def test_per_round_rate_examples():
    assert per_round_rate(0.0, 10) == 0.0
    assert per_round_rate(0.5, 7) == pytest.approx(0.5)
    # One round is the identity.
    assert per_round_rate(0.0123, 1) == pytest.approx(0.0123)
    # Small rates scale roughly linearly with 1/R.
    assert per_round_rate(0.01, 10) == pytest.approx(0.001, rel=0.02)


@given(
    st.floats(min_value=1e-9, max_value=0.49),
    st.integers(min_value=1, max_value=1000),
)
def test_per_round_rate_inverts_composition(p_round, rounds):
    # Compose R rounds, invert, recover the rate.  Saturated shots
    # (p_shot ~ 1/2) lose the round information to float cancellation, so
    # only well-conditioned cases are checked.
    survival = (1.0 - 2.0 * p_round) ** rounds
    assume(survival > 1e-6)
    p_shot = 0.5 * (1.0 - survival)
    assert per_round_rate(p_shot, rounds) == pytest.approx(p_round, rel=1e-6)


def test_per_round_rate_validation():
    with pytest.raises(ValueError):
        per_round_rate(0.6, 3)
    with pytest.raises(ValueError):
        per_round_rate(0.1, 0)


def test_binomial_interval_against_grid_scan():
    k, n, factor = 10, 1000, 1000.0
    lo, hi = binomial_interval(k, n, factor)

    def loglik(p):
        return k * math.log(p) + (n - k) * math.log(1 - p)

    floor = loglik(k / n) - math.log(factor)
    grid = np.linspace(1e-6, 0.1, 200001)
    inside = np.array([loglik(p) >= floor for p in grid])
    assert abs(grid[inside][0] - lo) < 1e-5
    assert abs(grid[inside][-1] - hi) < 1e-5
    assert lo < k / n < hi


def test_binomial_interval_edge_counts():
    lo, hi = binomial_interval(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.1
    lo, hi = binomial_interval(100, 100)
    assert hi == 1.0 and 0.9 < lo < 1.0


@given(st.integers(min_value=0, max_value=50), st.integers(min_value=1, max_value=5000))
def test_binomial_interval_brackets_mle(k, n):
    if k > n:
        return
    lo, hi = binomial_interval(k, n)
    assert lo <= k / n <= hi


def synthetic_curve(p0=0.0018, d_values=(3, 5, 7), p_values=None, shots=10**6):
    """p_L = (p / p0)^((d+1)/2): all pairs cross exactly at p0."""
    if p_values is None:
        p_values = [0.0012, 0.0016, 0.002, 0.0023, 0.0026]
    points = []
    for d in d_values:
        for p in p_values:
            pl = (p / p0) ** ((d + 1) / 2) * 0.01
            points.append(
                CurvePoint(
                    p=p, d=d, shots=shots, failures=int(pl * shots),
                    p_L_round=pl, ci_low=pl * 0.97, ci_high=pl * 1.03,
                )
            )
    return points


def test_threshold_estimate_recovers_synthetic_crossing():
    est = threshold_estimate(synthetic_curve(p0=0.0018))
    assert est.value == pytest.approx(0.0018, rel=0.01)
    assert len(est.crossings) == 2
    for c in est.crossings:
        assert c == pytest.approx(0.0018, rel=0.01)
    assert est.uncertainty < 0.0004


def test_threshold_estimate_order_invariant():
    pts = synthetic_curve()
    rng = np.random.default_rng(0)
    shuffled = list(pts)
    rng.shuffle(shuffled)
    assert threshold_estimate(shuffled).value == pytest.approx(
        threshold_estimate(pts).value
    )


def test_threshold_estimate_requires_crossing():
    # Curves that never intersect in the sampled window must raise, not
    # extrapolate.
    pts = []
    for d in (3, 5):
        for p in (0.001, 0.002, 0.003):
            pl = 0.01 * p / 0.002 * (2.0 if d == 5 else 1.0)
            pts.append(
                CurvePoint(p=p, d=d, shots=1000, failures=10,
                           p_L_round=pl, ci_low=pl, ci_high=pl)
            )
    with pytest.raises(ValueError, match="crossing"):
        threshold_estimate(pts)


def test_threshold_estimate_input_validation():
    pts = synthetic_curve(d_values=(3,))
    with pytest.raises(ValueError, match="two distances"):
        threshold_estimate(pts)
    pts = synthetic_curve(p_values=[0.0012, 0.0026])
    with pytest.raises(ValueError, match="3 points"):
        threshold_estimate(pts)


def test_fit_scaling_exact_line():
    # p_L = 10^(-d/5): slope is -ln(10)/5.
    pts = [(d, 10.0 ** (-d / 5)) for d in (3, 5, 7, 9, 11)]
    fit = fit_scaling(pts)
    assert fit.slope == pytest.approx(-math.log(10) / 5)
    assert max(abs(r) for r in fit.residuals) < 1e-12
    proj = fit_and_project(pts, targets=(1e-6,))
    assert proj[1e-6] == 31  # need d >= 30, smallest odd distance is 31


def test_fit_and_project_published_low_rate_rows():
    # Slope -3 ln(10) / 4 per unit d reproduces the d = 7 / 11 / 15 ladder
    # for the 1e-6 / 1e-9 / 1e-12 targets.
    slope = -3 * math.log(10) / 4
    intercept = -math.log(10) * 6 + (-slope * 7)
    pts = [(d, math.exp(intercept + slope * d)) for d in (3, 5, 7, 9, 11)]
    proj = fit_and_project(pts)
    assert proj == {1e-6: 7, 1e-9: 11, 1e-12: 15}


def test_fit_scaling_refuses_increasing():
    with pytest.raises(ValueError, match="does not decrease"):
        fit_scaling([(3, 1e-3), (5, 2e-3), (7, 4e-3)])


def test_curve_point_validation():
    with pytest.raises(ValueError):
        CurvePoint(p=0.001, d=3, shots=10, failures=11,
                   p_L_round=0.1, ci_low=0.0, ci_high=1.0)
    with pytest.raises(ValueError):
        CurvePoint(p=0.001, d=3, shots=10, failures=1,
                   p_L_round=0.5, ci_low=0.6, ci_high=0.7)


def test_csv_roundtrip(tmp_path):
    rows = [
        {
            "variant": "xzzx", "basis": "h", "nx": 2, "ny": 3, "d": 5,
            "p": 0.002, "eta": 100.0, "rounds": 15, "shots": 20000,
            "failures": 137, "pl_round": 0.1 + 0.2, "ci_low": 0.29,
            "ci_high": 0.31,
        }
    ]
    path = tmp_path / "rows.csv"
    write_csv(str(path), rows, header_comment="demo")
    back = read_csv(str(path))
    assert back == rows  # floats round-trip bit-exactly via repr


def test_aggregate_curve_pools_counts():
    rows = [
        {"d": 3, "p": 0.002, "rounds": 9, "shots": 1000, "failures": 30},
        {"d": 3, "p": 0.002, "rounds": 9, "shots": 3000, "failures": 60},
        {"d": 5, "p": 0.002, "rounds": 15, "shots": 1000, "failures": 10},
    ]
    pts = aggregate_curve(rows)
    assert len(pts) == 2
    three = next(pt for pt in pts if pt.d == 3)
    assert three.shots == 4000 and three.failures == 90
    assert three.p_L_round == pytest.approx(per_round_rate(90 / 4000, 9))
