import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from plienard.errors import InconsistentChannels, PeriodicityError
from plienard.periodic import (ExponentField, Grid, PeriodicSample, cumint, decompose, integrate,
                               norms, phi, phi_inv, sobolev_margin)

TWO_PI = 2 * np.pi


@pytest.mark.parametrize("N", [16, 17, 64, 255])
def test_mean_of_sine_is_zero(N):
    m, tilde = decompose(Grid(1.0, N).sample(lambda t: np.sin(TWO_PI * t)))
    assert abs(m) <= 1e-12


def test_decompose_constant_and_cosine():
    g = Grid(1.0, 64)
    m, tilde = decompose(g.constant(5.0))
    assert m == 5.0 and np.all(tilde.values == 0)
    m, _ = decompose(g.sample(lambda t: 1 + np.cos(TWO_PI * t)))
    assert m == pytest.approx(1.0, abs=1e-14)


def test_integrate_linear_is_exact():
    for N in (16, 33, 100):
        g = Grid(1.0, N)
        # t itself is not periodic; the trapezoid rule acts on the raw node values
        assert g.dt * (g.t.sum() - 0.5 * (g.t[0] + g.t[-1])) == pytest.approx(0.5, abs=1e-15)


def test_cumint_cosine_converges_second_order():
    errs = []
    for N in (64, 128, 256):
        g = Grid(TWO_PI, N)
        c = cumint(g.sample(np.cos))
        errs.append(np.max(np.abs(c.values - np.sin(g.t))))
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_cumint_starts_at_zero_and_exact_on_piecewise_linear():
    g = Grid(1.0, 32)
    v = g.sample(lambda t: np.abs(t - 0.5))  # nodes hit the kink
    c = cumint(v)
    assert c.values[0] == 0.0
    exact = np.where(g.t <= 0.5, 0.5 * g.t - 0.5 * g.t ** 2, 0.125 + 0.5 * (g.t - 0.5) ** 2)
    np.testing.assert_allclose(c.values, exact, atol=1e-15)
    assert np.all(cumint(g.constant(0.0)).values == 0)


def test_norms_examples():
    g = Grid(1.0, 256)
    n = norms(g.constant(2.0))
    assert (n.sup, n.L1, n.Lr) == pytest.approx((2, 2, 2), abs=1e-14)
    assert norms(g.sample(lambda t: np.sin(TWO_PI * t))).L1 == pytest.approx(2 / np.pi, abs=1e-3)
    z = norms(g.constant(0.0), p_minus=2.5)
    assert (z.sup, z.L1, z.Lr, z.W1p) == (0, 0, 0, 0)


def test_sobolev_margin_examples():
    g = Grid(1.0, 256)
    s = g.sample(lambda t: np.sin(TWO_PI * t), lambda t: TWO_PI * np.cos(TWO_PI * t))
    assert sobolev_margin(s) == pytest.approx(3.0, abs=1e-3)
    assert sobolev_margin(g.constant(1.7)) == pytest.approx(0.0, abs=1e-14)
    # t(1 - t) has a derivative jump at the period boundary, so only the values are stored
    tri = g.sample(lambda t: t * (1 - t))
    d = np.gradient(np.append(tri.values[-2], tri.values), g.dt)[1:]
    d[0] = d[-1] = 0.0
    assert sobolev_margin(PeriodicSample(g, tri.values, d), rtol=0.5) >= 0


def test_sobolev_margin_rejects_inconsistent_channels():
    g = Grid(1.0, 64)
    bad = g.sample(lambda t: np.sin(TWO_PI * t), lambda t: 0 * t + 3)
    with pytest.raises(InconsistentChannels):
        sobolev_margin(bad)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=6, max_size=6), st.floats(-5, 5))
def test_sobolev_margin_random_smooth(coef, c0):
    g = Grid(1.0, 256)
    k = np.arange(1, 4)

    def v(t):
        t = np.asarray(t)[..., None]
        return c0 + (coef[:3] * np.cos(TWO_PI * k * t) + coef[3:] * np.sin(TWO_PI * k * t)).sum(-1)

    def dv(t):
        t = np.asarray(t)[..., None]
        return (TWO_PI * k * (-np.array(coef[:3]) * np.sin(TWO_PI * k * t)
                              + np.array(coef[3:]) * np.cos(TWO_PI * k * t))).sum(-1)
    s = g.sample(v, dv)
    assert sobolev_margin(s) >= -1e-8
    m, tilde = decompose(s)
    assert abs(integrate(tilde)) <= 1e-12 * g.T * max(np.max(np.abs(s.values)), 1e-300) + 1e-15


def test_phi_examples():
    g = Grid(1.0, 16)
    p3 = ExponentField.constant(g, 3.0)
    assert phi(p3, 0, 2.0) == 4.0 and phi_inv(p3, 0, 4.0) == pytest.approx(2.0, rel=1e-15)
    p2 = ExponentField.constant(g, 2.0)
    xs = np.linspace(-5, 5, 11)
    np.testing.assert_array_equal(phi(p2, slice(0, 11), xs), xs)
    p15 = ExponentField.constant(g, 1.5)
    assert phi(p15, 3, -4.0) == pytest.approx(-2.0, rel=1e-15)
    assert phi_inv(p15, 3, -2.0) == pytest.approx(-4.0, rel=1e-15)
    assert phi(p15, 0, 0.0) == 0.0 and phi_inv(p15, 0, 0.0) == 0.0


def test_phi_round_trip_random(rng):
    from plienard import kernels
    p = rng.uniform(1.2, 5.0, 10_000)
    x = rng.uniform(-1e3, 1e3, 10_000)
    back = kernels.phi_inv(p, kernels.phi(p, x))
    assert np.all(np.abs(back - x) <= 1e-10 * np.maximum(1, np.abs(x)))



@settings(max_examples=200, deadline=None)
@given(st.floats(1.2, 5.0),
       st.lists(st.one_of(st.just(0.0), st.floats(1e-6, 1e3), st.floats(-1e3, -1e-6)),
                min_size=2, max_size=40, unique=True))
def test_phi_monotone_and_odd(p, xs):
    g = Grid(1.0, 16)
    pf = ExponentField.constant(g, p)
    xs = np.sort(np.asarray(xs))
    y = phi(pf, 0, xs)
    assert np.all(np.diff(y) > 0)
    np.testing.assert_array_equal(phi(pf, 0, -xs), -y)
    yi = phi_inv(pf, 0, xs)
    assert np.all(np.diff(yi) >= 0)  # |y|^{1/(p-1)} may underflow for tiny y
    assert np.all(np.diff(np.sign(yi)) >= 0)


def test_exponent_field_invariants():
    g = Grid(1.0, 32)
    with pytest.raises(ValueError):
        ExponentField.constant(g, 1.0)
    with pytest.raises(PeriodicityError):
        ExponentField.from_function(g, lambda t: 2 + t)
    pf = ExponentField.from_function(g, lambda t: 3 + np.sin(TWO_PI * t))
    assert pf.p_minus == pytest.approx(2.0, abs=1e-12) and pf.p_plus == pytest.approx(4.0, abs=1e-12)
    with pytest.warns(RuntimeWarning):
        ExponentField.from_function(Grid(1.0, 16), lambda t: 3 + 1.5 * np.sin(TWO_PI * t))


def test_sample_closure_enforced():
    g = Grid(1.0, 16)
    with pytest.raises(PeriodicityError):
        g.sample(lambda t: t)
    with pytest.raises(ValueError):
        Grid(1.0, 8)
    assert math.isclose(Grid(2.0, 20).dt, 0.1)
