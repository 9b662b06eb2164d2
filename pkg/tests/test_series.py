import math
import random
from fractions import Fraction

import pytest

from snakelaws import series
from snakelaws.series import ParityError, PoleError, QuadExt, SQRT2


class TestGammaRatioHalf:
    def test_examples(self):
        assert series.gamma_ratio_half(4, 2) == 1
        assert series.gamma_ratio_half(7, 3) == Fraction(15, 4)
        assert series.gamma_ratio_half(2, 2) == 1

    def test_parity_error(self):
        with pytest.raises(ParityError):
            series.gamma_ratio_half(4, 3)

    def test_matches_float_gamma(self):
        for p in range(1, 15):
            for q in range(p % 2 or 2, 15, 2):
                exact = series.gamma_ratio_half(p, q)
                approx = math.gamma(p / 2) / math.gamma(q / 2)
                assert math.isclose(float(exact), approx, rel_tol=1e-12)


class TestQuadExt:
    def test_field_laws_randomized(self):
        rng = random.Random(0)

        def rand():
            return QuadExt(Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                           Fraction(rng.randint(-9, 9), rng.randint(1, 9)))

        for _ in range(50):
            a, b, c = rand(), rand(), rand()
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_conjugate_norm(self):
        a, b = Fraction(3, 7), Fraction(-2, 5)
        x = QuadExt(a, b)
        conj = QuadExt(a, -b)
        assert x * conj == QuadExt(a * a - 2 * b * b, 0)

    def test_inverse(self):
        x = QuadExt(Fraction(1, 3), Fraction(5, 2))
        one = QuadExt(1, 0)
        assert x * (one / x) == one

    def test_sqrt2_squares_to_two(self):
        assert SQRT2 * SQRT2 == QuadExt(2, 0)


class TestSeriesF:
    def test_coef_examples(self):
        assert series.coef_F(1) == 1
        assert series.coef_F(2) == Fraction(-1, 6)

    def test_solver_matches_closed_form(self):
        f = series.series_solve_F(40)
        for n in range(1, 41):
            assert f.coeffs[n] == series.coef_F(n)

    def test_squared_functional_equation(self):
        f = series.series_solve_F(40)
        lam_sq = series.TruncatedSeries([0, 0, Fraction(1)], 40)
        three = series.TruncatedSeries([Fraction(3)], 40)
        residual = f * f * (three + f) - lam_sq.scale(Fraction(3))
        assert residual.is_zero()

    def test_weighted_moments(self):
        assert series.weighted_moment_sigma(1) == Fraction(1, 2)
        assert series.weighted_moment_sigma(2) == Fraction(1, 6)
        assert series.weighted_moment_sigma(3) == Fraction(5, 24)

    def test_moment_linkage(self):
        for n in range(1, 41):
            linked = Fraction((-1) ** (n - 1) * math.factorial(n), 2)
            assert linked * series.coef_F(n) == series.weighted_moment_sigma(n)


class TestSeriesFplus:
    def test_coef_examples(self):
        assert series.coef_Fplus(1) == QuadExt(0, Fraction(4, 9))
        assert series.coef_Fplus(2) == QuadExt(Fraction(-2, 9), 0)

    def test_solver_matches_closed_form(self):
        fp = series.series_solve_Fplus(40)
        for n in range(1, 41):
            assert fp.coeffs[n] == series.coef_Fplus(n)

    def test_cubic_residual_vanishes(self):
        assert series.fplus_cubic_residual(40).is_zero()

    def test_weighted_sigma_plus_moment_identity(self):
        for n in range(1, 41):
            lhs = (QuadExt(0, Fraction(2, 3)) ** n
                   * QuadExt(Fraction(2, n + 2)
                             * series.gamma_ratio_half(3 * n - 2, n), 0))
            rhs = (QuadExt((-1) ** (n + 1) * math.factorial(n), 0)
                   * series.coef_Fplus(n))
            assert lhs == rhs


class TestRationalCurve:
    def test_identity(self):
        assert series.q_r_identity_check()

    def test_mutation_control(self):
        bad_q = dict(series._Q_POLY)
        bad_q[1] = Fraction(1, 47)
        assert not series.q_r_identity_check(q_poly=bad_q)

    def test_roots(self):
        root = QuadExt(0, 36)
        zero = QuadExt(0, 0)
        assert series.q_eval(root) == zero
        assert series.q_eval(-root) == zero
        assert series.q_eval(zero) == zero
        assert series.r_eval(-root) == QuadExt(Fraction(1, 3), 0)

    def test_branch_derivatives(self):
        d = series.branch_derivatives()
        assert d["minus"] == QuadExt(-24, 0)
        assert d["plus"] == QuadExt(-24, 0)
        assert d["zero"] == QuadExt(48, 0)


class TestHypergeometric:
    def test_examples(self):
        assert series.hypergeom_2f1_half(0, 5, 3) == 1
        assert series.hypergeom_2f1_half(1, 2, 1) == 2
        assert series.coef_rational_product(0, 4, 7) == 1
        assert series.coef_rational_product(1, 1, 2) == 4

    def test_pole_error(self):
        with pytest.raises(PoleError):
            series.hypergeom_2f1_half(3, 2, 0)

    def test_convolution_equals_hypergeometric(self):
        for m in range(0, 31):
            for k in range(1, 31):
                for l in range(1, 31):
                    lhs = series.coef_rational_product(m, k, l)
                    rhs = (2 ** m * math.comb(m + k - 1, m)
                           * series.hypergeom_2f1_half(m, l, k))
                    assert lhs == rhs, (m, k, l)

    def test_bailey(self):
        for n in range(2, 41):
            assert series.bailey_check(n), n


class TestConditionalMoments:
    def test_values(self):
        direct = 2 ** 0.75 / 3 * math.gamma(1.75) / math.gamma(1.5)
        assert math.isclose(series.conditional_moment(1, "sigma"), direct,
                            rel_tol=1e-14)
        assert math.isclose(series.conditional_moment(1, "sigma_plus"),
                            2 ** 2.25 / 3 * (2 / 3)
                            * math.gamma(1.75) / math.gamma(1.5),
                            rel_tol=1e-14)

    def test_ratio_identity(self):
        for n in (1, 2, 3):
            ratio = (series.conditional_moment(n, "sigma_plus")
                     / series.conditional_moment(n, "sigma"))
            assert math.isclose(ratio, 2 ** (1.5 * n) * 2 / (n + 2),
                                rel_tol=1e-12)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            series.conditional_moment(0, "sigma")
        with pytest.raises(ValueError):
            series.conditional_moment(1, "nope")


def test_dump_format():
    rows = series.dump_coefficients(3)
    assert rows[0] == (1, "1", "0 + 4/9*sqrt2")
    assert len(rows) == 3
    assert all(len(r) == 3 for r in rows)
