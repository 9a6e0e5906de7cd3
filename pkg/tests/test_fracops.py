import math

import numpy as np
import pytest
import scipy.special as sps
from scipy.integrate import quad

from fraccons.fracops import (
    FractionalSpec,
    Kind,
    SingularTerm,
    TimeGrid,
    TimeSeries,
    caputo_left_derivative,
    caputo_right_derivative,
    diff1,
    diff2,
    f_modified_integral,
    gl_left_derivative,
    j_integral,
    left_frac_integral,
    left_integral_endpoint_pole,
    right_frac_integral,
    rl_left_derivative,
    rl_right_derivative,
    time_derivative,
)

G = math.gamma


def series(grid, fn, singular=()):
    return TimeSeries.from_function(grid, fn, singular=singular)


def power_series(grid, coeff, power):
    """TimeSeries for coeff * t^power with the term declared explicitly."""
    with np.errstate(divide="ignore"):
        vals = coeff * grid.nodes() ** power
    return TimeSeries(grid, vals, (SingularTerm(coeff, power),))


class TestContainers:
    def test_grid_basics(self):
        grid = TimeGrid(2.0, 8)
        assert grid.h == pytest.approx(0.25)
        nodes = grid.nodes()
        assert nodes[0] == 0.0 and nodes[-1] == 2.0 and len(nodes) == 9

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(0.0, 8)
        with pytest.raises(ValueError):
            TimeGrid(1.0, 0)

    def test_singular_term_power_bound(self):
        with pytest.raises(ValueError):
            SingularTerm(1.0, -1.0)
        term = SingularTerm(2.0, -0.5)
        grid = TimeGrid(1.0, 4)
        sampled = term.sample(grid)
        assert sampled[1] == pytest.approx(2.0 * 0.25 ** -0.5)

    def test_timeseries_length_check(self):
        grid = TimeGrid(1.0, 4)
        with pytest.raises(ValueError):
            TimeSeries(grid, np.zeros(4))

    def test_timeseries_interior_must_be_finite(self):
        grid = TimeGrid(1.0, 4)
        vals = np.zeros(5)
        vals[2] = np.nan
        with pytest.raises(ValueError):
            TimeSeries(grid, vals)

    def test_regular_part_subtracts_declared_terms(self):
        grid = TimeGrid(1.0, 8)
        f = power_series(grid, 2.0, -0.5)
        reg = f.regular_part()
        assert np.max(np.abs(reg)) < 1e-14

    def test_spec_order(self):
        assert FractionalSpec(Kind.RIEMANN_LIOUVILLE, 0.5, 1.0).n == 1
        assert FractionalSpec(Kind.CAPUTO, 1.5, 1.0).n == 2
        with pytest.raises(ValueError):
            FractionalSpec(Kind.RIEMANN_LIOUVILLE, 1.0, 1.0)
        with pytest.raises(ValueError):
            FractionalSpec(Kind.RIEMANN_LIOUVILLE, 2.5, 1.0)


class TestLeftIntegral:
    def test_exact_on_linear(self):
        # I^mu t = Gamma(2)/Gamma(2+mu) t^{1+mu}; product integration is
        # exact for piecewise-linear input.
        grid = TimeGrid(1.0, 32)
        out = left_frac_integral(series(grid, lambda t: t), 0.5)
        t = grid.nodes()
        ref = G(2.0) / G(2.5) * t ** 1.5
        assert np.max(np.abs(out.regular_part() - ref)) < 1e-13

    def test_smooth_input_against_quadrature(self):
        grid = TimeGrid(1.0, 256)
        mu = 0.3
        out = left_frac_integral(series(grid, np.sin), mu).regular_part()
        for j in (64, 128, 256):
            t = grid.nodes()[j]
            ref = quad(np.sin, 0.0, t, weight="alg", wvar=(0.0, mu - 1.0))[0] / G(mu)
            assert out[j] == pytest.approx(ref, abs=1e-5)

    def test_declared_power_term_uses_exact_rule(self):
        # I^{0.5} t^{-0.5} = Gamma(0.5) / Gamma(1) = sqrt(pi), a constant.
        grid = TimeGrid(1.0, 16)
        out = left_frac_integral(power_series(grid, 1.0, -0.5), 0.5)
        assert np.max(np.abs(out.total_values() - math.sqrt(math.pi))) < 1e-12

    def test_mu_validation(self):
        grid = TimeGrid(1.0, 8)
        with pytest.raises(ValueError):
            left_frac_integral(series(grid, lambda t: t), 0.0)


class TestRightIntegral:
    def test_constant_closed_form(self):
        # (I_T^mu 1)(t) = (T-t)^mu / Gamma(1+mu)
        grid = TimeGrid(2.0, 64)
        mu = 0.5
        out = right_frac_integral(series(grid, lambda t: np.ones_like(t)), mu)
        t = grid.nodes()
        ref = (2.0 - t) ** mu / G(1.0 + mu)
        assert np.max(np.abs(out.regular_part() - ref)) < 1e-13

    def test_smooth_input_against_quadrature(self):
        grid = TimeGrid(1.0, 256)
        mu = 0.7
        out = right_frac_integral(series(grid, np.cos), mu).regular_part()
        for j in (0, 64, 128):
            t = grid.nodes()[j]
            ref = quad(np.cos, t, 1.0, weight="alg", wvar=(mu - 1.0, 0.0))[0] / G(mu)
            assert out[j] == pytest.approx(ref, abs=1e-5)


class TestDerivatives:
    def test_caputo_power_rule_exact_on_linear(self):
        # Caputo D^{0.5} t = I^{0.5} 1 = t^{0.5}/Gamma(1.5), exact here
        # because differentiation of a linear function is exact and the
        # integral rule is exact on constants.
        grid = TimeGrid(1.0, 64)
        out = caputo_left_derivative(series(grid, lambda t: t), 0.5).regular_part()
        ref = grid.nodes() ** 0.5 / G(1.5)
        assert np.max(np.abs(out - ref)) < 1e-12

    def test_rl_power_rule(self):
        # D^{0.5} t = t^{0.5} / Gamma(1.5); differencing t^{1.5} loses
        # accuracy near t = 0, so check away from the origin.
        grid = TimeGrid(1.0, 256)
        out = rl_left_derivative(series(grid, lambda t: t), 0.5).regular_part()
        ref = grid.nodes() ** 0.5 / G(1.5)
        assert np.max(np.abs(out[64:] - ref[64:])) < 1e-4
        assert out[-1] == pytest.approx(1.0 / G(1.5), abs=1e-5)

    def test_caputo_constant_annihilated(self):
        grid = TimeGrid(1.0, 64)
        out = caputo_left_derivative(series(grid, lambda t: np.full_like(t, 3.0)), 0.5)
        assert np.max(np.abs(out.regular_part()[1:])) < 1e-12

    def test_rl_vs_caputo_offset(self):
        # For f = t + 1: RL D^a f - Caputo D^a f = t^{-a} / Gamma(1-a)
        grid = TimeGrid(1.0, 128)
        a = 0.4
        f = series(grid, lambda t: t + 1.0)
        rl = rl_left_derivative(f, a)
        cap = caputo_left_derivative(f, a)
        t = grid.nodes()[64:]
        diff = rl.total_values()[64:] - cap.total_values()[64:]
        ref = t ** -a / G(1.0 - a)
        assert np.max(np.abs(diff - ref)) < 1e-3

    def test_rl_second_order_power_rule(self):
        # D^{1.5} t^2 = 2 t^{0.5} / Gamma(1.5)
        grid = TimeGrid(1.0, 512)
        out = rl_left_derivative(series(grid, lambda t: t ** 2), 1.5).regular_part()
        ref = 2.0 * grid.nodes() ** 0.5 / G(1.5)
        assert np.max(np.abs(out[128:] - ref[128:])) < 1e-3

    def test_gl_matches_rl_on_smooth_vanishing_data(self):
        grid = TimeGrid(1.0, 512)
        f = series(grid, lambda t: t ** 2)
        gl = gl_left_derivative(f, 0.5).regular_part()
        rl = rl_left_derivative(f, 0.5).regular_part()
        assert np.max(np.abs(gl[128:] - rl[128:])) < 5e-3

    def test_right_derivatives_on_end_power(self):
        # Right RL derivative of (T-t): D_T^a (T-t) = (T-t)^{1-a}/Gamma(2-a)
        grid = TimeGrid(1.0, 256)
        a = 0.5
        out = rl_right_derivative(series(grid, lambda t: 1.0 - t), a).regular_part()
        ref = (1.0 - grid.nodes()) ** (1.0 - a) / G(2.0 - a)
        assert np.max(np.abs(out[:192] - ref[:192])) < 1e-4

    def test_caputo_right_constant_annihilated(self):
        grid = TimeGrid(1.0, 64)
        out = caputo_right_derivative(series(grid, lambda t: np.full_like(t, 2.0)), 0.5)
        assert np.max(np.abs(out.regular_part()[:-1])) < 1e-12


class TestFiniteDifferences:
    def test_diff1_second_order(self):
        h = 1e-3
        t = np.arange(0.0, 1.0 + h / 2, h)
        d = diff1(np.sin(t), h)
        assert np.max(np.abs(d - np.cos(t))) < 5e-6

    def test_diff2_second_order(self):
        h = 1e-3
        t = np.arange(0.0, 1.0 + h / 2, h)
        d = diff2(np.sin(t), h)
        assert np.max(np.abs(d + np.sin(t))) < 5e-4

    def test_time_derivative_of_declared_power(self):
        # d/dt of 2 t^{0.5} = t^{-0.5}, propagated analytically.
        grid = TimeGrid(1.0, 32)
        out = time_derivative(power_series(grid, 2.0, 0.5))
        assert len(out.singular) == 1
        term = out.singular[0]
        assert term.coeff == pytest.approx(1.0)
        assert term.power == pytest.approx(-0.5)

    def test_time_derivative_rejects_nonintegrable_result(self):
        grid = TimeGrid(1.0, 32)
        with pytest.raises(ValueError):
            time_derivative(power_series(grid, 1.0, -0.5))


class TestJIntegral:
    def test_constant_pair_closed_form(self):
        # J(1,1)(t) = (T^{b+1} - t^{b+1} - (T-t)^{b+1}) / Gamma(b+2), b = 1-a
        grid = TimeGrid(2.0, 128)
        a = 0.5
        one = series(grid, lambda t: np.ones_like(t))
        out = j_integral(one, one, a).regular_part()
        t = grid.nodes()
        ref = (2.0 ** 1.5 - t ** 1.5 - (2.0 - t) ** 1.5) / G(2.5)
        assert np.max(np.abs(out - ref)) < 1e-13

    def test_bilinear_in_first_argument(self):
        grid = TimeGrid(1.0, 64)
        a = 0.5
        f1 = series(grid, lambda t: t)
        f2 = series(grid, np.sin)
        g = series(grid, np.cos)
        combo = TimeSeries(grid, 2.0 * f1.regular_part() - 3.0 * f2.regular_part())
        lhs = j_integral(combo, g, a).regular_part()
        rhs = 2.0 * j_integral(f1, g, a).regular_part() \
            - 3.0 * j_integral(f2, g, a).regular_part()
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_vanishes_at_both_endpoints(self):
        grid = TimeGrid(1.0, 64)
        out = j_integral(series(grid, np.sin), series(grid, np.cos), 0.7)
        vals = out.regular_part()
        assert abs(vals[0]) < 1e-14
        assert abs(vals[-1]) < 1e-14

    def test_differentiation_identity_converges(self):
        # D_t J(f,g) = f * I_T^{1-a} g - g * I^{1-a} f, checked for (f,g)=(t,1).
        a = 0.5
        errs = []
        for n in (64, 128):
            grid = TimeGrid(2.0, n)
            f = series(grid, lambda t: t)
            g = series(grid, lambda t: np.ones_like(t))
            jval = j_integral(f, g, a).regular_part()
            lhs = diff1(jval, grid.h)
            rhs = f.regular_part() * right_frac_integral(g, 1.0 - a).regular_part() \
                - g.regular_part() * left_frac_integral(f, 1.0 - a).regular_part()
            k = max(2, n // 10)
            errs.append(np.max(np.abs(lhs - rhs)[k:-k]))
        order = math.log2(errs[0] / errs[1])
        assert order > 1.5

    def test_singular_first_argument_against_quadrature(self):
        # J(t^{-0.5}, cos) at alpha = 0.5 compared with nested scipy quadrature.
        a = 0.5
        beta = 1.0 - a
        grid = TimeGrid(1.0, 128)
        f = power_series(grid, 1.0, -0.5)
        g = series(grid, np.cos)
        out = j_integral(f, g, a).regular_part()

        def inner(tau, t):
            return quad(lambda m: np.cos(m) * (m - tau) ** (beta - 1.0), t, 1.0)[0]

        for j in (32, 64, 96):
            t = grid.nodes()[j]
            ref = quad(lambda tau: inner(tau, t), 0.0, t,
                       weight="alg", wvar=(-0.5, 0.0))[0] / G(beta)
            assert out[j] == pytest.approx(ref, abs=5e-4)


class TestEndpointWeightedIntegrals:
    def test_f_modified_integral_against_quadrature(self):
        # Order 2-a left integral whose kernel carries the extra factor
        # 2F1(1,1;2-a;(t-tau)/(T-tau)), compared with scipy quadrature.
        a, T = 1.5, 1.0
        mu = 2.0 - a
        grid = TimeGrid(T, 256)
        out = f_modified_integral(series(grid, np.cos), a).regular_part()

        def ref(t):
            def integrand(tau):
                z = (t - tau) / (T - tau)
                return np.cos(tau) * float(sps.hyp2f1(1.0, 1.0, mu, z))
            return quad(integrand, 0.0, t, weight="alg",
                        wvar=(0.0, mu - 1.0))[0] / G(mu)

        for j in (64, 128, 192):
            t = grid.nodes()[j]
            assert out[j] == pytest.approx(ref(t), abs=5e-4)

    def test_left_integral_endpoint_pole_against_quadrature(self):
        # (I^mu (f/(T-.)))(t) on smooth f, compared with scipy quadrature.
        mu, T = 0.5, 1.0
        grid = TimeGrid(T, 256)
        out = left_integral_endpoint_pole(series(grid, np.exp), mu).regular_part()
        for j in (64, 128, 192):
            t = grid.nodes()[j]
            ref = quad(lambda tau: np.exp(tau) / (T - tau), 0.0, t,
                       weight="alg", wvar=(0.0, mu - 1.0))[0] / G(mu)
            assert out[j] == pytest.approx(ref, abs=1e-5)

    def test_left_integral_endpoint_pole_excludes_final_node(self):
        grid = TimeGrid(1.0, 64)
        out = left_integral_endpoint_pole(series(grid, np.exp), 0.5)
        assert out.regular_part()[-1] == 0.0
