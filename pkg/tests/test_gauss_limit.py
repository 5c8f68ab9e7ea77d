"""Limit-constant and projected-inequality tests.

Deterministic oracles carry this module: the fiber-integral closed form
against adaptive radial quadrature, Gamma-moment engines against both
samplers, the beta-function special case of the radial rewrite, and the
transform-consistency check that equates all three sides of the sphere
inequality with the model-measure inequality through the Cayley map.
"""

import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logsob import exactpoly as xp
from logsob.gauss_limit import (
    AsymptoticsTable,
    CrLimitTable,
    RadialIntegralParams,
    asymptotics_check,
    cr_limit_table,
    heisenberg_constant,
    heisenberg_logsob_check,
    integrate_model_measure,
    lemma_closed_form,
    limit_constants,
    mu_poly_integral,
    projected_inequality_check,
    radial_integral_I,
    weighted_poly_integral,
    _log_radial_integral,
)
from logsob.geometry import heisenberg_variables
from logsob.inequalities import (
    BandLimitedFunction,
    dirichlet_form_spectral_exact,
    gross_check,
    sphere_variables,
    horizontal_gradient_sq_batch,
)
from logsob.quadrature import (
    QuadratureSpec,
    entropy_integrand,
    integrate_heisenberg_mu,
    integrate_sphere,
    integrate_weighted_rn,
)
from logsob.spectra import CaseId, KTypeLabel

MC = lambda size, seed=0: QuadratureSpec("monte-carlo", size, seed)
AR = lambda: QuadratureSpec("adaptive-radial", 64, 0)

CPX1 = CaseId("complex", 1)


def rn_vars(k):
    return tuple(f"u{i}" for i in range(1, k + 1))


def one_plus(k, i, c):
    vs = rn_vars(k)
    e = [0] * k
    e[i] = 1
    return xp.add(xp.constant(vs, 1), xp.poly(vs, {tuple(e): Fraction(c)}))


class TestLemmaClosedForm:
    def test_arctan_value(self):
        assert lemma_closed_form(1, 1.0, 1.0, 0.0) == pytest.approx(math.pi, rel=1e-13)

    def test_matches_radial_quadrature_on_grid(self):
        # shift |x|^2 into the scale: the integrand over y is the plain
        # weight at parameter n + |x|^2 times (1 + |x|^2/n)^(-N)
        one = lambda pts: np.ones(len(pts))
        for m in (1, 2, 3):
            for N in (2.0, 3.5, 6.0):
                for c in (0.0, 1.0, 4.0):
                    n = 3.0
                    expected = (1 + c / n) ** (-N) * integrate_weighted_rn(
                        m, n + c, -N, one, AR()
                    ).value
                    got = lemma_closed_form(m, N, n, c)
                    assert got == pytest.approx(expected, abs=1e-8 * (1 + abs(got)))

    def test_decay_exponent_slope(self):
        m, N, n = 2, 3.0, 1.0
        c1, c2 = 1e6, 1e8
        slope = (
            math.log(lemma_closed_form(m, N, n, c2))
            - math.log(lemma_closed_form(m, N, n, c1))
        ) / (0.5 * math.log(c2) - 0.5 * math.log(c1))
        assert slope == pytest.approx(2 * (-N + m / 2), abs=1e-5)

    def test_domain_errors(self):
        with pytest.raises(ValueError, match="2N > m"):
            lemma_closed_form(2, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError, match="m"):
            lemma_closed_form(0, 1.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            lemma_closed_form(1, 1.0, -2.0, 0.0)
        with pytest.raises(ValueError):
            lemma_closed_form(1, 1.0, 1.0, -0.5)

    @given(st.floats(0.0, 50.0), st.floats(0.1, 20.0))
    @settings(max_examples=40, deadline=None)
    def test_positive_and_decreasing_in_x(self, c, extra):
        v1 = lemma_closed_form(2, 3.0, 5.0, c)
        v2 = lemma_closed_form(2, 3.0, 5.0, c + extra + 1e-6)
        assert v1 > 0
        assert v2 < v1


class TestLimitConstants:
    def test_definitional_identities_in_log_space(self):
        for n, k in [(4, 1), (6, 2), (10, 3), (100, 5), (10**6, 3)]:
            lc = limit_constants(n, k)
            r1, r2 = lc.identity_residuals()
            # residual floor scales with the log magnitudes lgamma rounds at
            assert abs(r1) <= 1e-14 * (1 + abs(lc.log_cn) + abs(lc.log_d))
            assert r2 == 0.0

    def test_all_positive(self):
        for n, k in [(4, 1), (7, 2), (12, 4)]:
            lc = limit_constants(n, k)
            assert min(lc.cn, lc.d, lc.d_prime, lc.d_tilde, lc.d_tilde_prime) > 0

    def test_d_prime_at_k2_is_inverse_two_pi(self):
        # Gamma((n+2)/2)/Gamma(n/2) = n/2 cancels the n^(-1) exactly
        for n in (5, 10, 1000, 10**6):
            assert limit_constants(n, 2).d_prime == pytest.approx(
                1 / (2 * math.pi), rel=1e-8
            )

    def test_cn_normalizes_full_weight(self):
        one = lambda pts: np.ones(len(pts))
        for n in (4, 5, 6):
            mass = integrate_weighted_rn(n, float(n), float(-n), one, MC(50000, n))
            assert limit_constants(n, 1).cn * mass.value == pytest.approx(1.0, rel=5e-3)

    def test_d_prime_normalizes_projected_weight(self):
        one = lambda pts: np.ones(len(pts))
        for n, k in [(6, 1), (8, 1), (7, 2), (8, 2)]:
            mass = integrate_weighted_rn(k, float(n), -(n + k) / 2, one, MC(50000, n + k))
            got = limit_constants(n, k).d_prime * mass.value
            assert got == pytest.approx(1.0, rel=5e-3)

    def test_domain_errors(self):
        for n, k in [(5, 0), (5, 5), (4, 6), (2, 1), (3, 1)]:
            with pytest.raises(ValueError):
                limit_constants(n, k)


class TestAsymptotics:
    # first column coefficient k(k-2)/(4n), second ((k/2-2)(k/2-3)-3)/n
    SIGNS = {1: (-1, 1), 2: (0, -1), 3: (1, -1)}

    def test_gaussian_deviations_small_at_large_n(self):
        for k in (1, 2, 3):
            n, d1, d2 = asymptotics_check(k, [10**6]).rows[0]
            assert abs(d1) <= 1e-4
            assert abs(d2) <= 1e-4

    def test_sign_pattern_stable_along_scan(self):
        for k in (1, 2, 3):
            table = asymptotics_check(k, [50, 200, 1000, 5000])
            s1, s2 = self.SIGNS[k]
            for _, d1, d2 in table.rows:
                if s1 == 0:
                    assert abs(d1) < 1e-8
                else:
                    assert math.copysign(1, d1) == s1
                assert math.copysign(1, d2) == s2

    def test_magnitudes_decrease(self):
        for k in (1, 3):
            rows = asymptotics_check(k, [50, 200, 1000, 5000]).rows
            for (_, a1, a2), (_, b1, b2) in zip(rows, rows[1:]):
                assert abs(b1) < abs(a1)
                assert abs(b2) < abs(a2)

    def test_envelope_reported(self):
        table = asymptotics_check(1, [100, 1000, 10000])
        n, d1, d2 = table.rows[-1]
        assert table.envelope == (abs(d1) * n, abs(d2) * n)
        assert 0 < table.envelope[0] < 10
        assert 0 < table.envelope[1] < 10

    def test_exponential_companion(self):
        n = 10**6
        assert abs(math.exp(-n * math.log1p(1.0 / n)) - math.exp(-1.0)) <= 1e-6

    def test_requires_increasing_n(self):
        with pytest.raises(ValueError, match="increasing"):
            asymptotics_check(1, [100, 100])

    def test_csv_round_trip(self):
        table = asymptotics_check(2, [100, 1000])
        rows = list(csv.reader(io.StringIO(table.to_csv())))
        assert rows[0] == ["n", "d_prime_deviation", "d_tilde_prime_deviation"]
        assert len(rows) == 3
        assert int(rows[1][0]) == 100
        float(rows[1][1]), float(rows[1][2])


class TestWeightedPolyIntegral:
    def test_constant_matches_lemma(self):
        one = xp.constant(rn_vars(2), 1)
        assert weighted_poly_integral(2, 5.0, -4.0, one) == pytest.approx(
            lemma_closed_form(2, 4.0, 5.0, 0.0), rel=1e-12
        )

    def test_quadratic_matches_radial_quadrature(self):
        vs = rn_vars(3)
        p = xp.add(xp.monomial(vs, (2, 0, 0)), xp.monomial(vs, (0, 0, 4), 3))
        exact = weighted_poly_integral(3, 4.0, -6.0, p)
        quad = integrate_weighted_rn(
            3, 4.0, -6.0, lambda pts: pts[:, 0] ** 2 + 3 * pts[:, 2] ** 4, AR()
        )
        assert exact == pytest.approx(quad.value, rel=1e-9)

    def test_odd_monomials_vanish(self):
        vs = rn_vars(2)
        p = xp.monomial(vs, (1, 2))
        assert weighted_poly_integral(2, 4.0, -6.0, p) == 0.0

    def test_integrability_enforced(self):
        vs = rn_vars(2)
        with pytest.raises(ValueError, match="integrable"):
            weighted_poly_integral(2, 4.0, -3.0, xp.monomial(vs, (2, 2)))

    def test_input_validation(self):
        vs = rn_vars(2)
        with pytest.raises(ValueError, match="variables"):
            weighted_poly_integral(3, 4.0, -6.0, xp.constant(vs, 1))
        with pytest.raises(ValueError, match="exponent"):
            weighted_poly_integral(2, 4.0, 1.0, xp.constant(vs, 1))
        with pytest.raises(ValueError, match="real"):
            weighted_poly_integral(2, 4.0, -6.0, xp.constant(vs, (0, 1)))


class TestProjectedInequality:
    def test_constant_margin_exactly_zero(self):
        rep = projected_inequality_check(1, 50, xp.constant(rn_vars(1), 1), MC(2000, 7))
        assert rep.margin == 0.0
        assert rep.std_error == 0.0

    def test_linear_perturbation_holds(self):
        rep = projected_inequality_check(1, 50, one_plus(1, 0, "1/5"), MC(200000, 11))
        assert rep.margin > 0
        assert rep.holds(3)
        assert rep.metadata["check"] == "projected-logsob"
        assert rep.metadata["n"] == 50

    def test_callable_with_gradient_matches_poly_path(self):
        poly = one_plus(2, 1, "1/4")
        spec = MC(20000, 3)
        a = projected_inequality_check(2, 40, poly, spec)
        f = lambda pts: 1 + 0.25 * pts[:, 1]
        grad = lambda pts: np.column_stack(
            [np.zeros(len(pts)), np.full(len(pts), 0.25)]
        )
        b = projected_inequality_check(2, 40, f, spec, grad=grad)
        assert b.margin == pytest.approx(a.margin, rel=1e-10)
        c = projected_inequality_check(2, 40, f, spec)  # central differences
        assert c.margin == pytest.approx(a.margin, abs=1e-7)

    def test_margin_converges_to_gauss_limit(self):
        f = one_plus(1, 0, "1/5")
        g = gross_check(1, f, QuadratureSpec("gauss-hermite", 4096, 1))
        diffs = []
        for n in (20, 100, 500):
            rep = projected_inequality_check(1, n, f, MC(400000, 9))
            diffs.append(abs(rep.margin - g.margin))
        assert diffs[0] > diffs[1] > diffs[2]
        assert diffs[2] <= 0.05 * g.rhs

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError, match="Monte Carlo"):
            projected_inequality_check(
                1, 50, xp.constant(rn_vars(1), 1), AR()
            )
        with pytest.raises(ValueError, match="variables"):
            projected_inequality_check(2, 50, xp.constant(rn_vars(1), 1), MC(100))
        with pytest.raises(ValueError, match="zero"):
            projected_inequality_check(1, 50, xp.constant(rn_vars(1), 0), MC(100))


class TestHeisenbergConstant:
    def test_n1_closed_form(self):
        assert heisenberg_constant(1) == pytest.approx(math.pi**-2, rel=1e-12)

    def test_normalizes_model_measure(self):
        one = lambda pts: np.ones(len(pts))
        for n in (1, 2):
            mass = integrate_heisenberg_mu(n, one, MC(50000, n))
            assert heisenberg_constant(n) * mass.value == pytest.approx(1.0, rel=5e-3)

    def test_log_monotone_decreasing(self):
        vals = [math.log(heisenberg_constant(n)) for n in range(1, 40)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            heisenberg_constant(0)


class TestMuPolyIntegral:
    def test_mass_identity_exact(self):
        for n in (1, 2, 3, 8):
            one = xp.constant(heisenberg_variables(n), 1)
            mass = mu_poly_integral(n, -(n + 1), one)
            assert heisenberg_constant(n) * mass == pytest.approx(1.0, rel=1e-12)

    def test_z_moment_against_sampler(self):
        vs = heisenberg_variables(2)
        exact = mu_poly_integral(2, -3, xp.monomial(vs, (2, 0, 0, 0, 0)))
        res = integrate_heisenberg_mu(2, lambda p: p[:, 0] ** 2, MC(100000, 1))
        assert abs(exact - res.value) <= 4 * res.std_error

    def test_t_moment_against_radial_quadrature(self):
        vs = heisenberg_variables(2)
        exact = mu_poly_integral(2, -3, xp.monomial(vs, (0, 0, 0, 0, 2)))
        res = integrate_model_measure(2, -3, lambda p: p[:, 4] ** 2, AR())
        assert exact == pytest.approx(res.value, rel=1e-10)

    def test_odd_monomials_vanish(self):
        vs = heisenberg_variables(1)
        assert mu_poly_integral(1, -3, xp.monomial(vs, (1, 1, 0))) == 0.0
        assert mu_poly_integral(1, -3, xp.monomial(vs, (0, 2, 1))) == 0.0

    def test_integrability_envelope(self):
        vs = heisenberg_variables(1)
        # t^2 against the probability weight: the z-margin fails first
        with pytest.raises(ValueError, match="integrable"):
            mu_poly_integral(1, -2, xp.monomial(vs, (0, 0, 2)))
        # the gradient weight at n = 1 cannot even hold a constant
        with pytest.raises(ValueError, match="integrable"):
            mu_poly_integral(1, -1, xp.constant(vs, 1))

    def test_input_validation(self):
        vs = heisenberg_variables(1)
        with pytest.raises(ValueError, match="variables"):
            mu_poly_integral(2, -3, xp.constant(vs, 1))
        with pytest.raises(ValueError, match="exponent"):
            mu_poly_integral(1, 2.0, xp.constant(vs, 1))
        with pytest.raises(ValueError, match="real"):
            mu_poly_integral(1, -3, xp.constant(vs, (1, 2)))


class TestIntegrateModelMeasure:
    def test_matches_probability_sampler(self):
        f = lambda p: p[:, 0] ** 2 + p[:, 1] ** 2
        a = integrate_model_measure(1, -2, f, MC(100000, 5))
        b = integrate_heisenberg_mu(1, f, MC(100000, 6))
        sigma = math.hypot(a.std_error, b.std_error)
        assert abs(a.value - b.value) <= 4 * sigma

    def test_radial_kind_is_exact_on_moments(self):
        vs = heisenberg_variables(1)
        zz = xp.add(xp.monomial(vs, (2, 0, 0)), xp.monomial(vs, (0, 2, 0)))
        exact = mu_poly_integral(1, -3, zz)
        res = integrate_model_measure(
            1, -3, lambda p: p[:, 0] ** 2 + p[:, 1] ** 2, AR()
        )
        assert exact == pytest.approx(res.value, rel=1e-10)

    def test_proposal_for_decaying_integrand(self):
        # integrand * weight(-1) = weight(-2), whose mass we know exactly
        def f(p):
            a = 1 + (p[:, 0] ** 2 + p[:, 1] ** 2) / 2
            return 1.0 / (a * a + p[:, 2] ** 2 / 4)

        exact = mu_poly_integral(1, -2, xp.constant(heisenberg_variables(1), 1))
        res = integrate_model_measure(1, -1, f, MC(20000, 2), proposal_exponent=-2)
        assert res.value == pytest.approx(exact, rel=1e-10)

    def test_non_integrable_default_raises(self):
        with pytest.raises(ValueError, match="proposal_exponent"):
            integrate_model_measure(1, -1, lambda p: np.ones(len(p)), MC(100))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            integrate_model_measure(0, -2, lambda p: np.ones(len(p)), MC(100))
        with pytest.raises(ValueError, match="exponent"):
            integrate_model_measure(1, 1.0, lambda p: np.ones(len(p)), MC(100))
        with pytest.raises(ValueError, match="kind"):
            integrate_model_measure(
                1, -2, lambda p: np.ones(len(p)), QuadratureSpec("gauss-hermite", 64, 0)
            )


class TestRadialIntegral:
    def test_beta_function_at_t_zero(self):
        p = RadialIntegralParams(N=3.0, m=2, n=4.0, u_norm_sq=1.0, t=0.0)
        direct, rewritten = radial_integral_I(p)
        area = 2 * math.pi**2 / math.gamma(2)
        closed = (
            (2 * 4.0) ** 2
            * p.A ** (2 - 6)
            * area
            * math.gamma(2) * math.gamma(4) / (2 * math.gamma(6))
        )
        assert direct == pytest.approx(closed, rel=1e-10)
        assert rewritten == pytest.approx(closed, rel=1e-10)

    def test_dual_paths_agree_on_grid(self):
        for N in (2.0, 3.5, 8.0):
            for m in (1, 2, 3):
                for usq in (0.0, 2.0):
                    for t in (0.0, 1.5, 8.0):
                        p = RadialIntegralParams(N=N, m=m, n=3.0, u_norm_sq=usq, t=t)
                        direct, rewritten = radial_integral_I(p)
                        assert direct == pytest.approx(rewritten, rel=1e-6)

    def test_log_path_agrees(self):
        for m, N, usq, t in [(1, 2.0, 0.0, 1.0), (5, 7.0, 1.0, 2.0), (20, 30.0, 2.0, 5.0)]:
            direct, _ = radial_integral_I(
                RadialIntegralParams(N=N, m=m, n=6.0, u_norm_sq=usq, t=t)
            )
            assert math.exp(_log_radial_integral(m, N, 6.0, usq, t)) == pytest.approx(
                direct, rel=1e-9
            )

    def test_beta_is_one_iff_t_zero(self):
        assert RadialIntegralParams(N=3.0, m=2, n=4.0, u_norm_sq=0.5, t=0.0).beta == 1.0
        assert RadialIntegralParams(N=3.0, m=2, n=4.0, u_norm_sq=0.5, t=2.0).beta < 1.0

    @given(
        st.floats(0.0, 30.0),
        st.floats(-20.0, 20.0),
        st.floats(0.5, 50.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_derived_quantities_in_range(self, usq, t, n):
        p = RadialIntegralParams(N=4.0, m=2, n=n, u_norm_sq=usq, t=t)
        assert p.A >= 1
        assert p.D >= 0
        assert 0 < p.beta <= 1

    def test_divergent_configuration_raises(self):
        with pytest.raises(ValueError, match="2N > m"):
            radial_integral_I(RadialIntegralParams(N=1.0, m=2, n=4.0, u_norm_sq=0.0, t=0.0))

    def test_param_validation(self):
        with pytest.raises(ValueError):
            RadialIntegralParams(N=3.0, m=0, n=4.0, u_norm_sq=0.0, t=0.0)
        with pytest.raises(ValueError):
            RadialIntegralParams(N=3.0, m=2, n=-1.0, u_norm_sq=0.0, t=0.0)
        with pytest.raises(ValueError):
            RadialIntegralParams(N=3.0, m=2, n=4.0, u_norm_sq=-0.1, t=0.0)


class TestHeisenbergLogSob:
    def test_constant_margin_zero(self):
        one = xp.constant(heisenberg_variables(1), 1)
        rep = heisenberg_logsob_check(1, one, MC(5000, 3))
        assert abs(rep.margin) < 1e-12
        assert rep.std_error < 1e-12

    def test_linear_perturbation_holds(self):
        f = xp.add(
            xp.constant(heisenberg_variables(2), 1),
            xp.monomial(heisenberg_variables(2), (1, 0, 0, 0, 0), Fraction(1, 10)),
        )
        rep = heisenberg_logsob_check(2, f, MC(200000, 5))
        assert rep.margin > 0
        assert rep.holds(3)
        assert rep.metadata["check"] == "heisenberg-logsob"

    def test_degree_cap_relative_to_n(self):
        vs = heisenberg_variables(1)
        # f^2 = x1^4 overruns the n = 1 envelope before any sampling
        with pytest.raises(ValueError, match="integrable"):
            heisenberg_logsob_check(1, xp.monomial(vs, (2, 0, 0)), MC(100))

    def test_input_validation(self):
        vs = heisenberg_variables(1)
        with pytest.raises(TypeError):
            heisenberg_logsob_check(1, lambda p: np.ones(len(p)), MC(100))
        with pytest.raises(ValueError, match="variables"):
            heisenberg_logsob_check(2, xp.constant(vs, 1), MC(100))
        with pytest.raises(ValueError, match="real"):
            heisenberg_logsob_check(1, xp.constant(vs, (1, 1)), MC(100))


def cayley_pullback_pts(pts):
    # coordinate change onto the complex sphere; the sign on the last
    # coordinate reorients the map so its image gradient law matches the
    # field twist used everywhere else (all weights here are even in t)
    x = pts[:, 0] / math.sqrt(2.0)
    y = pts[:, 1] / math.sqrt(2.0)
    t = -pts[:, 2] / 2.0
    z0 = 1j * t + x * x + y * y
    w = 2 * (x + 1j * y) / (z0 + 1)
    w0 = (z0 - 1) / (z0 + 1)
    return np.column_stack([w.real, w.imag, w0.real, w0.imag]), z0


@pytest.fixture(scope="module")
def sphere_test_function():
    vs = sphere_variables(CPX1)
    z1 = xp.poly(
        vs,
        {(1, 0, 0, 0): (Fraction(1), Fraction(0)), (0, 1, 0, 0): (Fraction(0), Fraction(1))},
    )
    return BandLimitedFunction.from_components(
        CPX1,
        [
            (KTypeLabel("complex", 0, 0), xp.constant(vs, 1)),
            (KTypeLabel("complex", 1, 0), xp.scale(z1, Fraction(1, 10))),
            (KTypeLabel("complex", 0, 1), xp.scale(xp.conjugate(z1), Fraction(1, 10))),
        ],
    )


class TestCayleyEquivalence:
    """The sphere inequality and the model-measure inequality are the same
    statement through the coordinate change; each side must match."""

    def u_vals(self, F, pts):
        return np.real(F.values(cayley_pullback_pts(pts)[0]))

    def gradsq_u(self, F, pts):
        h = 1e-5
        def diff(col):
            e = np.zeros(3)
            e[col] = h
            return (self.u_vals(F, pts + e) - self.u_vals(F, pts - e)) / (2 * h)
        ux, uy, ut = diff(0), diff(1), diff(2)
        xf = ux + 2 * pts[:, 1] * ut
        yf = uy - 2 * pts[:, 0] * ut
        return xf * xf + yf * yf

    def test_pointwise_conformal_gradient_law(self, sphere_test_function):
        F = sphere_test_function
        rng = np.random.default_rng(1)
        pts = rng.standard_normal((8, 3))
        unscaled = np.column_stack(
            [pts[:, 0] / math.sqrt(2), pts[:, 1] / math.sqrt(2), pts[:, 2] / 2]
        )
        sp, z0 = cayley_pullback_pts(pts)
        sphere_gsq = np.real(horizontal_gradient_sq_batch(CPX1, F.gradient(sp), sp))
        lam = 4 / np.abs(1 + z0) ** 2
        # scaled coordinates halve the energy: |grad u|^2 = lam/2 |grad F|^2
        assert np.allclose(self.gradsq_u(F, pts), 0.5 * lam * sphere_gsq, rtol=1e-5)

    def test_image_on_unit_sphere(self):
        rng = np.random.default_rng(0)
        sp, _ = cayley_pullback_pts(rng.standard_normal((200, 3)) * 3)
        assert np.max(np.abs(np.sum(sp * sp, axis=1) - 1)) < 1e-12

    def test_entropy_and_norm_sides_match(self, sphere_test_function):
        F = sphere_test_function
        c = heisenberg_constant(1)
        ent = integrate_heisenberg_mu(
            1,
            lambda p: 0.5 * entropy_integrand(np.abs(self.u_vals(F, p))),
            MC(200000, 17),
        )
        pr = QuadratureSpec("sphere-product-rule", 14641, 0)
        sphere_ent = integrate_sphere(
            3, lambda p: 0.5 * entropy_integrand(np.abs(np.real(F.values(p)))), pr
        )
        assert abs(c * ent.value - sphere_ent.value) <= 5 * c * ent.std_error + 1e-6

        nrm = integrate_heisenberg_mu(1, lambda p: self.u_vals(F, p) ** 2, MC(200000, 17))
        assert abs(c * nrm.value - float(F.norm_sq)) <= 5 * c * nrm.std_error

    def test_gradient_sides_match(self, sphere_test_function):
        F = sphere_test_function
        c = heisenberg_constant(1)
        res = integrate_model_measure(
            1, -1, lambda p: self.gradsq_u(F, p), MC(200000, 23), proposal_exponent=-2
        )
        lhs = (c / 4) * res.value
        rhs = float(CPX1.sharp_constant * dirichlet_form_spectral_exact(CPX1, F))
        assert abs(lhs - rhs) <= 5 * (c / 4) * res.std_error + 1e-8


@pytest.fixture(scope="module")
def table_k2():
    return cr_limit_table(2, [100, 10000], norm_spec=MC(50000, 2), norm_max_n=150)


class TestCrLimitTable:
    def test_all_three_ratios_near_one_at_large_n(self, table_k2):
        for row in table_k2.rows:
            if row[0] == 10000:
                for ratio in row[3:6]:
                    assert abs(ratio - 1) <= 0.01

    def test_ratios_tighten_with_n(self, table_k2):
        by_n = {}
        for row in table_k2.rows:
            by_n.setdefault(row[0], []).append(max(abs(r - 1) for r in row[3:6]))
        assert max(by_n[10000]) < max(by_n[100])

    def test_k1_grid(self):
        table = cr_limit_table(1, [10000], u_sq_values=(0.0, 2.0), t_values=(0.0, 3.0))
        for row in table.rows:
            for ratio in row[3:6]:
                assert abs(ratio - 1) <= 0.01

    def test_measured_normalization(self, table_k2):
        small = [r for r in table_k2.rows if r[0] == 100]
        large = [r for r in table_k2.rows if r[0] == 10000]
        assert all(r[6] == pytest.approx(1.0, abs=1e-9) for r in small)
        assert all(r[6] is None for r in large)

    def test_csv_emission(self, table_k2):
        rows = list(csv.reader(io.StringIO(table_k2.to_csv())))
        assert rows[0] == [
            "n", "u_norm_sq", "t", "nu_ratio", "rho_ratio", "rho_tilde_ratio", "norm_check",
        ]
        assert len(rows) == len(table_k2.rows) + 1
        assert rows[-1][6] == ""  # skipped mass check stays blank

    def test_requires_n_above_k(self):
        with pytest.raises(ValueError, match="n > k"):
            cr_limit_table(2, [2])
