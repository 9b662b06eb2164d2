import numpy as np
import pytest
from scipy import stats as st

from snakelaws import levycsbp as lc
from snakelaws import samplers as sp
from snakelaws.levycsbp import HittingSample, PathConfig
from snakelaws.samplers import RngStream


class TestConfigTypes:
    def test_path_config_validation(self):
        with pytest.raises(ValueError):
            PathConfig(dt=0)
        with pytest.raises(ValueError):
            PathConfig(dt=2.0, t_max=1.0)
        with pytest.raises(ValueError):
            PathConfig(y0=0)

    def test_hitting_sample_validation(self):
        with pytest.raises(ValueError):
            HittingSample(-1.0, False)


class TestHittingTime:
    def test_laplace_coarse(self):
        # coarse dt keeps this seconds-scale; discretization bias at
        # dt=1e-3 stays well inside the 2% band (see the acceptance
        # suite for the fine-step run)
        cfg = PathConfig(dt=1e-3, t_max=50.0)
        t0s = lc.simulate_hitting_times(cfg, RngStream(31), 20_000)
        for lam in (0.5, 1.0, 2.0):
            est = float(np.mean(np.exp(-lam * t0s)))
            assert abs(est - lc.hitting_laplace(lam)) <= 0.02, lam

    def test_matches_stable_law(self):
        cfg = PathConfig(dt=1e-3, t_max=50.0)
        t0s = lc.simulate_hitting_times(cfg, RngStream(32), 20_000)
        ref = lc.T0_STABLE_SCALE * sp.sample_stable_two_thirds(
            RngStream(33), 20_000)
        ks = st.ks_2samp(t0s[t0s < cfg.t_max],
                         ref[ref < cfg.t_max]).statistic
        assert ks <= 0.02

    def test_small_start_hits_fast(self):
        cfg = PathConfig(dt=1e-4, t_max=10.0, y0=0.01)
        t0s = lc.simulate_hitting_times(cfg, RngStream(34), 2000)
        assert float(np.mean(np.exp(-t0s))) > 0.95

    def test_censoring(self):
        cfg = PathConfig(dt=1e-3, t_max=0.01)
        t0s = lc.simulate_hitting_times(cfg, RngStream(35), 500)
        assert (t0s <= cfg.t_max).all()
        assert (t0s == cfg.t_max).any()
        s = lc.simulate_hitting_time(cfg, RngStream(36))
        assert s.censored == (s.t0 >= cfg.t_max)

    def test_reproducible(self):
        cfg = PathConfig(dt=1e-3, t_max=5.0)
        a = lc.simulate_hitting_times(cfg, RngStream(37), 100)
        b = lc.simulate_hitting_times(cfg, RngStream(37), 100)
        assert np.array_equal(a, b)


class TestLampertiConsistency:
    def test_per_path_identity(self):
        cfg = PathConfig(dt=1e-3, t_max=50.0)
        rep = lc.csbp_integral_consistency(cfg, RngStream(38), n_paths=200)
        assert rep.passed, (rep.estimate, rep.tolerance)
        assert "censored" in rep.uncertainty

    def test_tail_bound_reporting(self):
        cfg = PathConfig(dt=1e-3, t_max=50.0)
        frac = lc.censored_tail_bound(cfg, 50_000, RngStream(39))
        assert 0.0 <= frac < 0.1
