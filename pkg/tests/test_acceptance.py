"""End-to-end acceptance gates.

Each test covers one acceptance criterion and prints exactly one
[PASS]/[FAIL] line (run with -s to see them as they complete).
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats as st

from snakelaws import discretesnake as ds
from snakelaws import exactlaws as ex
from snakelaws import levycsbp as lc
from snakelaws import samplers as sp
from snakelaws import series
from snakelaws.exactlaws import RatePoint
from snakelaws.levycsbp import PathConfig
from snakelaws.samplers import RngStream

GRID = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]


def _verdict(num, label, ok, detail, t0, budget=None):
    elapsed = time.perf_counter() - t0
    if budget is not None:
        ok = ok and elapsed <= budget
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] criterion {num}: {label} ({detail}, {elapsed:.1f}s)")
    assert ok, f"criterion {num}: {detail}"


def _se_gate(values, theory):
    se = values.std(ddof=1) / math.sqrt(len(values))
    return abs(values.mean() - theory) <= 4.0 * se


def test_criterion_1_duration_series():
    t0 = time.perf_counter()
    f = series.series_solve_F(40)
    ok = all(f.coeffs[n] == series.coef_F(n) for n in range(1, 41))
    ok = ok and series.coef_F(1) == 1
    ok = ok and series.weighted_moment_sigma(1) == Fraction(1, 2)
    _verdict(1, "duration-weighted moment series, orders 1..40",
             ok, "recursive vs closed-form coefficients", t0, budget=1.0)


def test_criterion_2_positive_part_series():
    t0 = time.perf_counter()
    fp = series.series_solve_Fplus(40)
    ok = all(fp.coeffs[n] == series.coef_Fplus(n) for n in range(1, 41))
    ok = ok and series.coef_Fplus(1) == series.QuadExt(0, Fraction(4, 9))
    ok = ok and series.fplus_cubic_residual(40).is_zero()
    ok = ok and series.q_r_identity_check()
    ok = ok and all(series.bailey_check(n) for n in range(2, 41))
    ok = ok and all(
        series.coef_rational_product(m, k, l)
        == 2 ** m * math.comb(m + k - 1, m)
        * series.hypergeom_2f1_half(m, l, k)
        for m in range(0, 31) for k in range(1, 31) for l in range(1, 31))
    _verdict(2, "one-sided occupation series and product identities",
             ok, "orders 1..40, convolution sweep to 30", t0, budget=5.0)


def test_criterion_3_closed_form_consistency():
    t0 = time.perf_counter()
    ok = True
    for lam in GRID:
        for mu in GRID:
            a = ex.lt_sigma_laplace(lam, mu)
            b = ex.solve_triple(RatePoint(lam, mu, mu)).value
            ok = ok and abs(a - b) <= 1e-10 * a
    for lam in GRID:
        for m1 in GRID:
            for m2 in GRID:
                lv = ex.solve_triple(RatePoint(lam, m1, m2))
                ok = ok and lv.residual <= 1e-12 * max(1.0,
                                                       math.sqrt(6) * lam)
    for lam in GRID:
        ok = ok and abs(ex.solve_triple(RatePoint(lam, 0, 0)).value
                        - ex.local_time_laplace(lam)) <= 1e-12
    for m1 in GRID:
        for m2 in GRID:
            ok = ok and abs(ex.solve_triple(RatePoint(0, m1, m2)).value
                            - ex.pair_laplace(m1, m2)) <= 1e-12
    _verdict(3, "root solver vs closed forms on 6x6(x6) grid",
             ok, "1e-10 rel, residuals 1e-12, limits 1e-12", t0, budget=10.0)


def test_criterion_4_quadrature_duals():
    t0 = time.perf_counter()
    ok = True
    for lam in (0.5, 1.0, 2.0):
        ref = ex.local_time_laplace(lam)
        ok = ok and abs(ex.local_time_laplace_quadrature(lam)
                        - ref) <= 1e-6 * ref
    for m in ((1.0, 1.0), (4.0, 1.0), (0.5, 2.0)):
        ok = ok and abs(ex.pair_laplace_quadrature(*m)
                        - ex.pair_laplace(*m)) <= 1e-5
    for v in (0.5, 1.0, 2.0):
        for m in ((0.0, 0.0), (0.5, 0.5), (1.0, 4.0)):
            ok = ok and abs(ex.verify_h_integral(v, *m)) <= 1e-6
    _verdict(4, "density-to-Laplace and kernel-integral duals",
             ok, "1e-6/1e-5 tolerances", t0, budget=30.0)


def test_criterion_5_sampler_laplace_gates():
    t0 = time.perf_counter()
    n = 1_000_000
    t = sp.sample_stable_two_thirds(RngStream(101), n)
    ok = all(_se_gate(np.exp(-lam * t), math.exp(-lam ** (2 / 3)))
             for lam in (0.5, 1.0, 2.0))
    u = sp.sample_U(RngStream(102), n)
    for beta in (0.5, 1.0, 2.0):
        r = math.sqrt(2 * beta)
        ok = ok and _se_gate(np.exp(-beta * u), (1 + r) * math.exp(-r))
    x = sp.sample_sbm_total_lt(1.0, RngStream(103), n)
    ok = ok and all(
        _se_gate(np.exp(-lam * x),
                 math.exp(-sp.SBM_CONST * lam ** (2 / 3)))
        for lam in (0.5, 1.0, 2.0))
    _verdict(5, "stable, exit-kernel and superposition Laplace gates",
             ok, "N=1e6 within 4 SE", t0)


def test_criterion_6_conditional_moment_gates():
    t0 = time.perf_counter()
    n = 1_000_000
    ok = True
    x = sp.sample_lt_given_sigma(1.0, RngStream(104), n)
    for k in (1, 2):
        ok = ok and _se_gate(x ** k, series.conditional_moment(k, "sigma"))
    y = sp.sample_lt_given_sigma_plus(1.0, RngStream(105), n)
    for k in (1, 2):
        ok = ok and _se_gate(y ** k,
                             series.conditional_moment(k, "sigma_plus"))
    _verdict(6, "conditional moments n=1,2 for both conditionings",
             ok, "N=1e6 within 4 SE", t0)


@pytest.mark.slow
def test_criterion_7_discrete_snake_limit():
    t0 = time.perf_counter()
    n, trees = 5000, 20_000
    counts = ds.batch_snake_stats(n, trees, RngStream(106))
    z = counts[:, 0] * float(n) ** -0.75
    limit = ds.LIMIT_CONST * series.conditional_moment(1, "sigma")
    ok = abs(z.mean() - limit) <= 0.05 * limit
    cont = ds.LIMIT_CONST * sp.sample_lt_given_sigma(1.0, RngStream(107),
                                                     trees)
    ks_z = st.ks_2samp(z, cont).statistic
    ok = ok and ks_z <= 0.03
    pf = counts[:, 1] / (counts[:, 1] + counts[:, 2])
    ks_u = st.kstest(pf, "uniform").statistic
    ok = ok and ks_u <= 0.03
    _verdict(7, "snake zero-set and sign statistics at n=5000",
             ok, f"mean {z.mean():.4f} vs {limit:.4f}, "
                 f"KS {ks_z:.3f}/{ks_u:.3f}", t0)


@pytest.mark.slow
def test_criterion_8_levy_hitting_time():
    t0 = time.perf_counter()
    cfg = PathConfig(dt=1e-4, t_max=100.0)
    t0s = lc.simulate_hitting_times(cfg, RngStream(108), 100_000)
    ok = True
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        diff = abs(float(np.mean(np.exp(-lam * t0s)))
                   - lc.hitting_laplace(lam))
        worst = max(worst, diff)
        ok = ok and diff <= 0.02
    ref = lc.T0_STABLE_SCALE * sp.sample_stable_two_thirds(RngStream(109),
                                                           100_000)
    ks = st.ks_2samp(t0s[t0s < cfg.t_max],
                     ref[ref < cfg.t_max]).statistic
    ok = ok and ks <= 0.02
    _verdict(8, "branching-path hitting time vs stable law",
             ok, f"max Laplace gap {worst:.4f}, KS {ks:.4f}", t0)
