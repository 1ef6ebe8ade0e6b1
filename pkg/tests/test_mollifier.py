import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyprg.mollifier import (
    MollifierSpec,
    approximators,
    halfline,
    mollifier_value,
    mollifier_values,
    norm_cdf,
    sandwich_check,
    translation_identity_check,
)


def test_halfline_at_threshold():
    assert halfline(0.0, 1.0, 0.0) == 0.5


def test_halfline_reference_value():
    # Phi(1) to 12 decimal places
    assert halfline(0.0, 1.0, -1.0) == pytest.approx(0.841344746068543, abs=1e-12)


def test_halfline_monotone():
    ts = np.linspace(-3, 3, 25)
    vals = [halfline(0.2, 0.7, t) for t in ts]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_halfline_rejects_bad_lambda():
    with pytest.raises(ValueError):
        halfline(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        halfline(0.0, -1.0, 1.0)


def test_norm_cdf_accuracy_against_quadrature():
    # trapezoid integration of the density as an independent reference
    xs = np.linspace(-10, 3.0, 2_000_001)
    dens = np.exp(-(xs**2) / 2) / math.sqrt(2 * math.pi)
    ref = np.trapezoid(dens, xs)
    assert norm_cdf(3.0) == pytest.approx(ref, abs=1e-10)
    assert norm_cdf(0.0) == 0.5
    assert norm_cdf(-3.0) == pytest.approx(1 - ref, abs=1e-10)


def test_mollifier_product_examples():
    spec = MollifierSpec(np.zeros(2), 0.5)
    assert mollifier_value(spec, np.zeros(2)) == pytest.approx(0.25, abs=1e-15)
    one = MollifierSpec(np.array([0.3]), 0.5)
    assert mollifier_value(one, np.array([0.1])) == halfline(0.3, 0.5, 0.1)


def test_mollifier_strictly_inside_unit_interval_moderate_range():
    rng = np.random.default_rng(2)
    spec = MollifierSpec(rng.normal(size=3), 0.8)
    for _ in range(100):
        v = rng.normal(size=3) * 3
        val = mollifier_value(spec, v)
        assert 0.0 < val < 1.0


def test_mollifier_monotone_decreasing_coordinatewise():
    spec = MollifierSpec(np.array([0.0, 1.0]), 0.6)
    v = np.array([0.2, -0.3])
    base = mollifier_value(spec, v)
    for i in range(2):
        up = v.copy()
        up[i] += 0.5
        assert mollifier_value(spec, up) < base


def test_mollifier_monte_carlo_cross_check():
    # product form vs direct Gaussian smoothing of the orthant indicator;
    # the tolerance is 3 binomial standard errors at the product value
    rng = np.random.default_rng(31337)
    for m in (2, 3):
        b = rng.normal(size=m)
        lam = float(rng.uniform(0.3, 1.2))
        v = b + lam * rng.normal(size=m)  # keep the probability moderate
        spec = MollifierSpec(b, lam)
        n_samples = 200_000
        g = rng.standard_normal((n_samples, m))
        hits = ((v[None, :] + lam * g) <= b[None, :]).all(axis=1)
        mc = hits.mean()
        p = mollifier_value(spec, v)
        se = math.sqrt(p * (1 - p) / n_samples)
        assert abs(mc - p) <= 3 * se


@settings(max_examples=200, deadline=None)
@given(
    b=st.lists(st.floats(-5, 5), min_size=1, max_size=4),
    data=st.data(),
)
def test_translation_identity_random(b, data):
    m = len(b)
    v = data.draw(st.lists(st.floats(-5, 5), min_size=m, max_size=m))
    d = data.draw(st.lists(st.floats(-5, 5), min_size=m, max_size=m))
    lam = data.draw(st.floats(0.05, 3.0))
    spec = MollifierSpec(np.array(b), lam)
    assert translation_identity_check(spec, np.array(v), np.array(d))


def test_translation_identity_extreme_values():
    lam = 0.4
    spec = MollifierSpec(np.array([0.0, 1.0]), lam)
    v = np.array([50 * lam, -50 * lam])
    d = np.array([0.0, 0.0])
    assert translation_identity_check(spec, v, d)
    assert np.isfinite(mollifier_value(spec, v))


def test_approximators_example_and_identities():
    pair = approximators(np.zeros(2), 0.1, 2, 0.25)
    assert pair.beta == pytest.approx(0.1 * math.sqrt(2 * math.log(8)), abs=1e-15)
    assert pair.big_lambda > pair.beta
    assert np.allclose(pair.b_in + 2 * pair.beta, pair.b_out)
    # beta scales linearly in lambda
    pair2 = approximators(np.zeros(2), 0.2, 2, 0.25)
    assert pair2.beta == pytest.approx(2 * pair.beta, rel=1e-12)


def test_sandwich_deep_and_far_points():
    b = np.zeros(2)
    lam = 0.1
    delta = 0.1
    pair = approximators(b, lam, 2, delta)
    spec_in = MollifierSpec(pair.b_in, lam)
    deep = b - 10 * pair.big_lambda
    far = b.copy()
    far[0] = b[0] + 10 * pair.big_lambda
    assert mollifier_value(spec_in, deep) >= 1 - delta
    assert mollifier_value(spec_in, far) <= delta


def test_sandwich_check_report():
    b = np.zeros(2)
    lam = 0.2
    delta = 0.1
    pair = approximators(b, lam, 2, delta)
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(500, 2)) * 2
    report = sandwich_check(b, pair, lam, delta, pts)
    assert report.ok, report.violations[:3]
    assert report.checked_inner > 0 and report.checked_outer > 0


def test_sandwich_two_properties_item_one():
    # inner - delta <= indicator <= outer + delta, everywhere
    b = np.array([0.5, -0.25])
    lam = 0.3
    delta = 0.1
    pair = approximators(b, lam, 2, delta)
    rng = np.random.default_rng(8)
    V = rng.normal(size=(2000, 2)) * 3
    ind = (V <= b[None, :]).all(axis=1).astype(float)
    vin = mollifier_values(MollifierSpec(pair.b_in, lam), V)
    vout = mollifier_values(MollifierSpec(pair.b_out, lam), V)
    assert (vin - delta <= ind + 1e-12).all()
    assert (ind <= vout + delta + 1e-12).all()


def test_mollifier_values_matches_scalar():
    spec = MollifierSpec(np.array([0.1, -0.7, 2.0]), 0.6)
    rng = np.random.default_rng(12)
    V = rng.normal(size=(50, 3))
    vec = mollifier_values(spec, V)
    for i in range(50):
        assert vec[i] == pytest.approx(mollifier_value(spec, V[i]), abs=1e-15)
