"""Experiment presets for the single- and two-tone CRB tests.

Only frequencies, amplitudes, the threshold margin ``epsilon`` and ``N`` are
fixed by the reference experiments; phases are not. The presets use one rule
for both: phases are chosen so that every over-range sample occurs at the
start of the record, with the first one at ``n = 2`` (``n = 1`` would hide
the entry spike outside the differenced record). The threshold is
``lambda = ||a||_1 - epsilon``; for a single tone this is ``|a_1| - epsilon``.

Single tone (wT = 1.05, epsilon = 9.83e-6): with wT = 1.05 the samples nearest
a crest drift by ``3*wT - pi ~ 8.4e-3`` rad every three samples, while
``|sin| > 1 - epsilon`` holds only within ``+-sqrt(2*epsilon) ~ 4.4e-3`` rad of
a crest. At most two samples in a record of 100 can be over range, so the
fold count is at most 4 for every phase. The preset attains that maximum:
a crest at ``n = 2`` and a trough at ``n = 5``, placed symmetrically in the
window.
"""

import math

import numpy as np

from .signal import SamplingConfig, SoSParams, wrap_phase

FIG1_OMEGA_T = 1.05
FIG1_AMPLITUDE = 1.0
FIG1_EPSILON = 9.83e-6
FIG1_REPORTED_FOLDS = 6

FIG2_OMEGA_T = (0.63, 1.00)
FIG2_AMPLITUDES = (1.0, 1.0)
FIG2_EPSILON = 2.51e-4
FIG2_REPORTED_FOLDS = 2

N_SAMPLES = 100
FIRST_FOLD_SAMPLE = 2


def threshold_from_epsilon(amplitudes, epsilon):
    return float(np.sum(amplitudes)) - epsilon


def aligned_peak_phases(omega_t, n0=FIRST_FOLD_SAMPLE):
    """Phases that put a crest of every component at sample ``n0``."""
    return tuple(wrap_phase(math.pi / 2 - w * n0) for w in omega_t)


def fig1_phase(n0=FIRST_FOLD_SAMPLE):
    # crest at n0, trough three samples later, both offset by half the drift
    drift = 3 * FIG1_OMEGA_T - math.pi
    return wrap_phase(math.pi / 2 - n0 * FIG1_OMEGA_T - drift / 2)


def fig1_params() -> SoSParams:
    return SoSParams.from_arrays([FIG1_AMPLITUDE], [FIG1_OMEGA_T], [fig1_phase()])


def fig1_config(noise_sigma=0.0, seed=0, step=1.0) -> SamplingConfig:
    lam = threshold_from_epsilon([FIG1_AMPLITUDE], FIG1_EPSILON)
    return SamplingConfig(lam, step, N_SAMPLES, noise_sigma, seed)


def fig2_params() -> SoSParams:
    return SoSParams.from_arrays(FIG2_AMPLITUDES, FIG2_OMEGA_T, aligned_peak_phases(FIG2_OMEGA_T))


def fig2_config(noise_sigma=0.0, seed=0, step=1.0) -> SamplingConfig:
    lam = threshold_from_epsilon(FIG2_AMPLITUDES, FIG2_EPSILON)
    return SamplingConfig(lam, step, N_SAMPLES, noise_sigma, seed)


PSNR_GRID_DB = tuple(float(x) for x in range(0, 31, 2))
