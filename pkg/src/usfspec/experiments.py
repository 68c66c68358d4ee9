"""Monte Carlo PSNR sweeps of the matrix-pencil estimator against the CRBs."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .bounds import PARAM_NAMES, crb_closed_form, crb_fim
from .errors import RankDeficient, SingularFim, ValidationError
from .estimator import OrderTooLarge, estimate
from .rng import substream_seed
from .signal import SamplingConfig, SoSParams, acquire, residue


@dataclass(frozen=True)
class SweepConfig:
    """``base.noise_sigma`` is ignored; each grid point sets ``sigma = a_1 10^(-PSNR/20)``."""

    params: SoSParams
    base: SamplingConfig
    psnr_grid_db: tuple[float, ...]
    trials: int = 1000
    order: Optional[int] = None
    pencil: Optional[int] = None
    workers: int = 1
    keep_estimates: bool = False

    def __post_init__(self):
        grid = tuple(float(x) for x in self.psnr_grid_db)
        if not grid:
            raise ValidationError("psnr_grid_db is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("psnr_grid_db must be strictly increasing")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        object.__setattr__(self, "psnr_grid_db", grid)
        object.__setattr__(self, "trials", int(self.trials))
        if self.order is None:
            object.__setattr__(self, "order", self.params.K)

    @property
    def K(self) -> int:
        return self.order

    def sigma_at(self, psnr_db: float) -> float:
        return float(self.params.amplitudes[0] * 10 ** (-psnr_db / 20))

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "base": self.base.to_dict(),
            "psnr_grid_db": list(self.psnr_grid_db),
            "trials": self.trials,
            "order": self.order,
            "pencil": self.pencil,
        }


@dataclass
class SweepResult:
    """Arrays are indexed ``[grid point, parameter (a, omegaT, phi), component]``."""

    config: SweepConfig
    psnr_db: np.ndarray
    mse: np.ndarray
    stderr: np.ndarray
    crb_closed: np.ndarray
    crb_fim: np.ndarray
    fold_count: int
    mean_folds: np.ndarray
    failures: np.ndarray
    estimates: Optional[np.ndarray] = field(default=None, repr=False)

    def column(self, table: str, param: str = "omegaT", component: int = 0) -> np.ndarray:
        return getattr(self, table)[:, PARAM_NAMES.index(param), component]

    def csv_header(self) -> list[str]:
        K = self.mse.shape[2]
        cols = ["psnr_db"]
        for table in ("mse", "crb_closed", "crb_fim"):
            cols += [f"{table}_{p}_{k + 1}" for k in range(K) for p in PARAM_NAMES]
        return cols + ["mean_M", "failures"]

    def csv_rows(self) -> list[list]:
        rows = []
        for g in range(self.psnr_db.size):
            row = [self.psnr_db[g]]
            for table in (self.mse, self.crb_closed, self.crb_fim):
                row += list(table[g].T.ravel())
            rows.append(row + [self.mean_folds[g], int(self.failures[g])])
        return rows

    def to_dict(self) -> dict:
        d = {
            "config": self.config.to_dict(),
            "psnr_db": self.psnr_db.tolist(),
            "parameters": list(PARAM_NAMES),
            "mse": self.mse.tolist(),
            "stderr": self.stderr.tolist(),
            "crb_closed": self.crb_closed.tolist(),
            "crb_fim": self.crb_fim.tolist(),
            "fold_count": self.fold_count,
            "mean_folds": self.mean_folds.tolist(),
            "failures": self.failures.tolist(),
        }
        return d


def wrap_error(x):
    """Wrap an angle difference to ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def associate(estimated: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Greedy nearest-frequency matching; returns estimate index per true component."""
    dist = np.abs(estimated[:, None] - truth[None, :])
    match = np.full(truth.size, -1)
    used = np.zeros(estimated.size, dtype=bool)
    for flat in np.argsort(dist, axis=None, kind="stable"):
        i, k = np.unravel_index(flat, dist.shape)
        if used[i] or match[k] >= 0:
            continue
        used[i] = True
        match[k] = i
    return match


def _trial_errors(params, config, K, pencil, seeds):
    """Squared errors ``(3, K)`` per seed, ``None`` for failed trials."""
    a = params.amplitudes
    w = params.frequencies * config.step
    phi = params.phases
    out = []
    for seed in seeds:
        trace = acquire(params, config.replace(seed=seed))
        try:
            est = estimate(trace, K, pencil)
        except (RankDeficient, np.linalg.LinAlgError):
            out.append((None, None))
            continue
        m = associate(est.omegaT, w)
        if np.any(m < 0):  # fewer estimates than true components
            out.append((None, None))
            continue
        err = np.vstack([
            (est.amplitude[m] - a) ** 2,
            (est.omegaT[m] - w) ** 2,
            wrap_error(est.phase[m] - phi) ** 2,
        ])
        out.append((err, est.omegaT[m]))
    return out


def _chunks(seq, n):
    size = math.ceil(len(seq) / n)
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _mean_and_stderr(samples: list[float]) -> tuple[float, float]:
    # fsum is correctly rounded, so the result does not depend on trial order
    n = len(samples)
    if n == 0:
        return math.nan, math.nan
    mean = math.fsum(samples) / n
    if n == 1:
        return mean, math.nan
    var = math.fsum((s - mean) ** 2 for s in samples) / (n - 1)
    return mean, math.sqrt(var / n)


def closed_form_reference(params: SoSParams, sigma: float, step: float, N: int) -> np.ndarray:
    """``(3, K)`` asymptotic bounds, one single-tone closed form per component."""
    cols = [crb_closed_form(a, w * step, sigma, N).as_matrix()[:, 0] for a, w, _ in params.components]
    return np.column_stack(cols)


def fim_reference(params: SoSParams, config: SamplingConfig) -> np.ndarray:
    try:
        return crb_fim(params, config)[1].as_matrix()
    except SingularFim:
        return np.full((3, params.K), np.nan)


def run_sweep(config: SweepConfig) -> SweepResult:
    params, base, K = config.params, config.base, config.K
    n_diff = base.count - 1
    pencil = config.pencil
    if n_diff < 4 * K + 1:
        raise OrderTooLarge(f"{n_diff} differenced samples cannot support K={K}")
    if pencil is not None and not 2 * K <= pencil <= n_diff - 2 * K:
        raise OrderTooLarge(f"pencil parameter {pencil} outside [{2 * K}, {n_diff - 2 * K}]")

    G = len(config.psnr_grid_db)
    Kt = params.K
    mse = np.full((G, 3, Kt), np.nan)
    se = np.full((G, 3, Kt), np.nan)
    crb_c = np.zeros((G, 3, params.K))
    crb_f = np.zeros((G, 3, params.K))
    failures = np.zeros(G, dtype=int)
    M = residue(params, base).fold_count
    estimates = np.full((G, config.trials, Kt), np.nan) if config.keep_estimates else None

    seeds = [substream_seed(base.seed, t) for t in range(config.trials)]
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for g, psnr in enumerate(config.psnr_grid_db):
            sigma = config.sigma_at(psnr)
            cfg = base.replace(noise_sigma=sigma)
            if pool is None:
                results = _trial_errors(params, cfg, K, pencil, seeds)
            else:
                futures = [pool.submit(_trial_errors, params, cfg, K, pencil, c)
                           for c in _chunks(seeds, config.workers)]
                results = [r for f in futures for r in f.result()]
            ok = [err for err, _ in results if err is not None]
            failures[g] = len(results) - len(ok)
            for j in range(3):
                for k in range(Kt):
                    mse[g, j, k], se[g, j, k] = _mean_and_stderr([float(e[j, k]) for e in ok])
            if estimates is not None:
                for t, (_, w) in enumerate(results):
                    if w is not None:
                        estimates[g, t] = w
            crb_c[g] = closed_form_reference(params, sigma, base.step, base.count)
            crb_f[g] = fim_reference(params, cfg)
    finally:
        if pool is not None:
            pool.shutdown()

    return SweepResult(
        config,
        np.array(config.psnr_grid_db),
        mse,
        se,
        crb_c,
        crb_f,
        M,
        np.full(G, float(M)),
        failures,
        estimates,
    )


class Regions(NamedTuple):
    """Region boundaries in dB; ``None`` when the boundary is not observed."""

    low: Optional[float]
    high: Optional[float]


def classify_regions(result: SweepResult, param: str = "omegaT", component: int = 0,
                     within_db: float = 6.0, flat_slope: float = -0.3) -> Regions:
    """Locate the CRB-tracking onset and the saturation onset of an MSE curve.

    ``low`` is the first grid point whose MSE is within ``within_db`` of the
    closed-form bound. ``high`` is the first point at or after ``low`` whose
    forward slope ``d(MSE dB)/d(PSNR dB)`` exceeds ``flat_slope``.
    """
    psnr = result.psnr_db
    if psnr.size < 5:
        raise ValidationError("region classification needs at least 5 grid points")
    mse_db = 10 * np.log10(result.column("mse", param, component))
    crb_db = 10 * np.log10(result.column("crb_closed", param, component))
    close = np.flatnonzero(np.abs(mse_db - crb_db) <= within_db)
    if close.size == 0:
        return Regions(None, None)
    i0 = int(close[0])
    slopes = np.diff(mse_db) / np.diff(psnr)
    flat = [i for i in range(i0, slopes.size) if slopes[i] > flat_slope]
    return Regions(float(psnr[i0]), float(psnr[flat[0]]) if flat else None)


def forward_slopes(result: SweepResult, param: str = "omegaT", component: int = 0) -> np.ndarray:
    mse_db = 10 * np.log10(result.column("mse", param, component))
    return np.diff(mse_db) / np.diff(result.psnr_db)
