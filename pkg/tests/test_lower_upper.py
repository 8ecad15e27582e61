import numpy as np
import pytest

from plienard.bounds import compute_bracket_bounds
from plienard.errors import DomainError, NotFound, PreconditionFailed, TailCheckFailed
from plienard.lower_upper import (BracketPair, build_upper, extend_f0, find_constant_lower, gamma,
                                  lienard_rhs, modified_rhs, solve_bracketed, verify_lower, verify_upper)
from plienard.oracle import FdSystem, NewtonOptions, newton_solve
from plienard.periodic import ExponentField, Grid

TWO_PI = 2 * np.pi


def inv(x):
    return 1.0 / np.asarray(x)


def zero(x):
    return 0.0 * np.asarray(x)


def ident(x):
    return np.asarray(x, dtype=float)


def _pair(g, a, b):
    return BracketPair(g.constant(a), g.constant(b))


def test_gamma_examples_and_idempotence(rng):
    g = Grid(1.0, 32)
    pair = _pair(g, 1.0, 2.0)
    assert gamma(pair, 3, 3.0) == 2.0 and gamma(pair, 3, 1.5) == 1.5 and gamma(pair, 3, 0.2) == 1.0
    beta = g.sample(lambda t: 2 + 0.5 * np.sin(TWO_PI * t))
    pair = BracketPair(g.constant(0.5), beta)
    idx = rng.integers(0, 33, 1000)
    x = rng.uniform(-10, 10, 1000)
    once = gamma(pair, idx, x)
    np.testing.assert_array_equal(gamma(pair, idx, once), once)
    assert once.min() >= 0.5 and once.max() <= beta.values.max()


def test_pair_invariants():
    g = Grid(1.0, 32)
    with pytest.raises(ValueError):
        _pair(g, 2.0, 1.0)
    with pytest.raises(ValueError):
        _pair(g, -1.0, 1.0)


def test_modified_rhs_agrees_inside_and_grows_linearly(rng):
    g = Grid(1.0, 64)
    alpha = g.constant(0.8)
    beta = g.sample(lambda t: 2 + 0.1 * np.cos(TWO_PI * t))
    pair = BracketPair(alpha, beta)
    h = g.sample(lambda t: 1 + 0.1 * np.cos(TWO_PI * t))
    orig, star = lienard_rhs(ident, inv, h), modified_rhs(ident, inv, h, pair)
    t = rng.uniform(0, 1, 1000)
    lo, hi = 0.8, np.interp(t, g.t, beta.values)
    x = lo + rng.uniform(0, 1, 1000) * (hi - lo)
    y = rng.uniform(-5, 5, 1000)
    np.testing.assert_array_equal(star(t, x, y), orig(t, x, y))
    bb = compute_bracket_bounds(alpha, beta, ident, inv, h, 2.0, 3.0)
    t = rng.uniform(0, 1, 10_000)
    x = rng.uniform(-2 * bb.M1, 2 * bb.M1, 10_000)
    y = rng.uniform(-bb.M2, bb.M2, 10_000)
    assert np.all(np.abs(star(t, x, y)) <= bb.c3 * (1 + np.abs(y)))


def test_verify_examples():
    pf = ExponentField.constant(Grid(1.0, 64), 2.0)
    g = pf.grid
    h = g.constant(1.0, with_derivative=False)
    low = verify_lower(pf, zero, inv, h, g.constant(1.0))
    assert low.passes and low.margin == 0.0
    bad = verify_lower(pf, zero, inv, h, g.constant(2.0))
    assert not bad.passes and bad.extreme == pytest.approx(-0.5)
    with pytest.raises(DomainError):
        verify_upper(pf, zero, inv, h, g.constant(-1.0))


def test_solve_bracketed_equilibrium():
    pf = ExponentField.from_function(Grid(1.0, 64), lambda t: 3 + np.sin(TWO_PI * t))
    g = pf.grid
    h = g.constant(1.0, with_derivative=False)
    sol = solve_bracketed(pf, zero, inv, h, _pair(g, 0.5, 2.0))
    assert np.max(np.abs(sol.u.values - 1)) <= 1e-12 and sol.residual <= 1e-12


def test_solve_bracketed_linear_with_oracle():
    pf = ExponentField.constant(Grid(1.0, 512), 2.0)
    g = pf.grid
    h = g.sample(lambda t: 1 + 0.1 * np.cos(TWO_PI * t))
    sol = solve_bracketed(pf, zero, inv, h, _pair(g, 0.5, 2.0))
    assert 0.5 <= sol.u.values.min() and sol.u.values.max() <= 2.0
    assert sol.residual <= 1e-8
    ref = newton_solve(FdSystem.from_field(pf), lienard_rhs(zero, inv, h), sol.u, NewtonOptions(tol=1e-9))
    assert np.max(np.abs(ref.u.values - sol.u.values)) <= 1e-5


def test_solve_bracketed_rejects_bad_upper():
    pf = ExponentField.constant(Grid(1.0, 64), 2.0)
    g = pf.grid
    h = g.constant(1.0, with_derivative=False)
    with pytest.raises(PreconditionFailed):
        solve_bracketed(pf, zero, inv, h, _pair(g, 0.5, 0.9))


def test_find_constant_lower():
    # the largest qualifying log-grid point is returned
    assert find_constant_lower(inv, 1.0, (1e-3, 10.0, 5)) == pytest.approx(1.0, rel=1e-12)
    a = find_constant_lower(inv, 1.0, (1e-3, 10.0, 2001))
    assert inv(a) >= 1.0 and a <= 1.0 and a > 0.99
    b = find_constant_lower(lambda x: 2 / np.asarray(x), 1.0, (1e-3, 10.0, 2001))
    assert b <= 2.0 and b > 1.98
    with pytest.raises(NotFound):
        find_constant_lower(inv, 1000.0, (0.1, 10.0, 201))


def test_extend_f0():
    f0 = extend_f0(lambda x: np.cos(np.asarray(x)) + 2)
    np.testing.assert_allclose(f0(np.array([-3.0, -0.1, 0.0, 1.0])), [3, 3, 3, np.cos(1) + 2])


def test_build_upper_linear_closed_form():
    pf = ExponentField.constant(Grid(1.0, 256), 2.0)
    g = pf.grid
    h = g.sample(lambda t: 1 + 0.1 * np.cos(TWO_PI * t))
    up = build_upper(pf, zero, inv, h, 1.01)
    exact = -0.1 * np.cos(TWO_PI * g.t) / (4 * np.pi ** 2)
    assert np.max(np.abs(up.v_delta.values - exact)) <= 1e-6
    assert np.max(np.abs(up.v_delta.values)) == pytest.approx(0.002533, abs=1e-6)
    assert up.c_delta == pytest.approx(1.01 + up.K)
    assert np.all(up.beta.values >= 1.01 - 1e-10)
    assert np.all(inv(up.beta.values) < 1.0)
    assert up.report.passes and up.report.extreme < 0


def test_build_upper_constant_forcing():
    pf = ExponentField.from_function(Grid(1.0, 64), lambda t: 2.5 + 0.5 * np.sin(TWO_PI * t))
    g = pf.grid
    up = build_upper(pf, ident, inv, g.constant(1.0, with_derivative=False), 1.5)
    assert np.max(np.abs(up.v_delta.values)) <= 1e-12
    np.testing.assert_allclose(up.beta.values, up.c_delta, atol=1e-12)


def test_build_upper_standard_fixture_strict():
    pf = ExponentField.from_function(Grid(1.0, 256), lambda t: 3 + np.sin(TWO_PI * t))
    g = pf.grid
    h = g.sample(lambda t: 1 + 0.1 * np.cos(TWO_PI * t))
    up = build_upper(pf, ident, inv, h, 1.1)
    assert up.report.extreme < 0


def test_tail_check_failure():
    pf = ExponentField.constant(Grid(1.0, 64), 2.0)
    h = pf.grid.constant(1.0, with_derivative=False)
    with pytest.raises(TailCheckFailed):
        build_upper(pf, zero, inv, h, 0.5)
