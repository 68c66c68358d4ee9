import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from usfspec import presets
from usfspec.bounds import crb_closed_form, crb_fim
from usfspec.errors import ValidationError
from usfspec.estimator import OrderTooLarge
from usfspec.experiments import (
    SweepConfig,
    SweepResult,
    associate,
    classify_regions,
    closed_form_reference,
    forward_slopes,
    run_sweep,
    wrap_error,
)

SMALL_GRID = (6.0, 14.0, 22.0)


def small_sweep(trials=40, workers=1, seed=2025, params=None, base=None, keep=False):
    params = params or presets.fig2_params()
    base = base or presets.fig2_config(seed=seed)
    return run_sweep(SweepConfig(params, base, SMALL_GRID, trials, workers=workers, keep_estimates=keep))


class TestDeterminism:
    def test_repeat_identical(self):
        a, b = small_sweep(), small_sweep()
        np.testing.assert_array_equal(a.mse, b.mse)

    def test_worker_count_does_not_matter(self):
        a, b = small_sweep(workers=1, keep=True), small_sweep(workers=3, keep=True)
        assert a.mse.tobytes() == b.mse.tobytes()
        assert a.stderr.tobytes() == b.stderr.tobytes()
        np.testing.assert_array_equal(a.estimates, b.estimates)

    def test_seed_changes_result(self):
        assert not np.array_equal(small_sweep(seed=1).mse, small_sweep(seed=2).mse)


class TestCrbAttachment:
    def test_closed_form_columns_exact(self):
        res = small_sweep(trials=5)
        p, base = res.config.params, res.config.base
        for g, psnr in enumerate(SMALL_GRID):
            sigma = p.amplitudes[0] * 10 ** (-psnr / 20)
            for k, (a, w, _) in enumerate(p.components):
                ref = crb_closed_form(a, w, sigma, base.count).as_matrix()[:, 0]
                np.testing.assert_array_equal(res.crb_closed[g, :, k], ref)
            ref = crb_fim(p, base.replace(noise_sigma=sigma))[1].as_matrix()
            np.testing.assert_array_equal(res.crb_fim[g], ref)

    def test_crb_falls_10db_per_decade(self):
        res = small_sweep(trials=2)
        db = 10 * np.log10(res.column("crb_closed"))
        np.testing.assert_allclose(np.diff(db), -8.0, atol=1e-9)

    def test_sigma_mapping(self):
        cfg = SweepConfig(presets.fig1_params(), presets.fig1_config(), (0.0, 20.0), 1)
        assert cfg.sigma_at(0.0) == 1.0
        assert cfg.sigma_at(20.0) == pytest.approx(0.1)

    def test_closed_form_reference_shape(self):
        ref = closed_form_reference(presets.fig2_params(), 0.1, 1.0, 100)
        assert ref.shape == (3, 2)


class TestStatistics:
    @pytest.mark.slow
    def test_trial_doubling_consistent(self):
        # independent seeds; the grid points share trial noise, so the six
        # comparisons are strongly correlated rather than six separate draws
        a = small_sweep(trials=500, seed=10)
        b = small_sweep(trials=1000, seed=110)
        diff = np.abs(a.mse[:, 1] - b.mse[:, 1])
        tol = 3 * np.hypot(a.stderr[:, 1], b.stderr[:, 1])
        assert np.all(diff <= tol)

    def test_csv_layout(self):
        res = small_sweep(trials=3)
        header, rows = res.csv_header(), res.csv_rows()
        assert len(rows) == len(SMALL_GRID)
        assert all(len(r) == len(header) for r in rows)
        assert header[0] == "psnr_db" and header[-1] == "failures"

    def test_fold_count_reported(self):
        assert small_sweep(trials=2).fold_count == presets.FIG2_REPORTED_FOLDS


class TestValidation:
    def test_bad_grids(self):
        p, c = presets.fig1_params(), presets.fig1_config()
        with pytest.raises(ValidationError):
            SweepConfig(p, c, (), 10)
        with pytest.raises(ValidationError):
            SweepConfig(p, c, (2.0, 1.0), 10)
        with pytest.raises(ValidationError):
            SweepConfig(p, c, (1.0,), 0)

    def test_order_too_large(self):
        p = presets.fig1_params()
        with pytest.raises(OrderTooLarge):
            run_sweep(SweepConfig(p, presets.fig1_config().replace(count=8), (10.0,), 1, order=2))


class TestHelpers:
    @given(st.floats(-50, 50))
    def test_wrap_error_range(self, x):
        y = float(wrap_error(x))
        assert -math.pi < y <= math.pi + 1e-12
        assert abs(math.remainder(x - y, 2 * math.pi)) < 1e-9

    def test_associate_greedy(self):
        m = associate(np.array([1.02, 0.61]), np.array([0.63, 1.0]))
        assert m.tolist() == [1, 0]
        m = associate(np.array([0.99]), np.array([0.63, 1.0]))
        assert m.tolist() == [-1, 0]


def synthetic_result(mse_db, crb_db):
    """A one-component SweepResult with prescribed omegaT curves on the 0..30 dB grid."""
    grid = np.arange(0.0, 31.0, 2.0)
    cfg = SweepConfig(presets.fig1_params(), presets.fig1_config(), grid, 1)
    G = grid.size
    mse = np.ones((G, 3, 1))
    crb = np.ones((G, 3, 1))
    mse[:, 1, 0] = 10 ** (np.asarray(mse_db) / 10)
    crb[:, 1, 0] = 10 ** (np.asarray(crb_db) / 10)
    return SweepResult(cfg, grid, mse, mse * 0, crb, crb, 0, np.zeros(G), np.zeros(G, dtype=int))


class TestRegions:
    grid = np.arange(0.0, 31.0, 2.0)

    def test_three_regions(self):
        crb = -30 - self.grid
        mse = np.where(self.grid < 6, -10.0, crb + 1)
        mse = np.where(self.grid >= 16, crb[8] + 1, mse)
        regions = classify_regions(synthetic_result(mse, crb))
        assert regions == (6.0, 16.0)

    def test_never_saturates(self):
        crb = -30 - self.grid
        regions = classify_regions(synthetic_result(crb + 1, crb))
        assert regions.low == 0.0 and regions.high is None

    def test_never_tracks(self):
        crb = -30 - self.grid
        regions = classify_regions(synthetic_result(np.full(16, -5.0), crb))
        assert regions == (None, None)

    def test_slopes(self):
        crb = -30 - self.grid
        np.testing.assert_allclose(forward_slopes(synthetic_result(crb, crb)), -1.0)

    def test_needs_five_points(self):
        cfg = SweepConfig(presets.fig1_params(), presets.fig1_config(), (1.0, 2.0), 1)
        res = SweepResult(cfg, np.array([1.0, 2.0]), *(np.ones((2, 3, 1)),) * 4, 0, np.zeros(2), np.zeros(2, dtype=int))
        with pytest.raises(ValidationError):
            classify_regions(res)
