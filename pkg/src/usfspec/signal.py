"""Sum-of-sinusoids synthesis, modulo folding and noisy folded acquisition.

Sample index convention: samples are indexed ``n = 1..N``. Arrays are
0-based, so ``samples[i]`` holds sample ``n = i + 1``. Likewise entry ``i``
of a first difference holds ``x[n+1] - x[n]`` for ``n = i + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DegenerateFrequency, SnapError, ValidationError
from .rng import check_seed, make_rng

#: Residue samples must lie within ``SNAP_RTOL * lambda`` of a multiple of 2*lambda.
SNAP_RTOL = 1e-6


class Sinusoid(NamedTuple):
    amplitude: float
    frequency: float  # rad / s
    phase: float  # rad


@dataclass(frozen=True)
class SoSParams:
    """Ground-truth parameters of ``g(t) = sum_k a_k sin(w_k t + phi_k)``."""

    components: tuple[Sinusoid, ...]

    def __post_init__(self):
        comps = tuple(Sinusoid(*map(float, c)) for c in self.components)
        if not comps:
            raise ValidationError("at least one sinusoidal component is required")
        for c in comps:
            if not all(math.isfinite(v) for v in c):
                raise ValidationError(f"non-finite component {c}")
            if c.amplitude <= 0:
                raise ValidationError(f"amplitudes must be positive, got {c.amplitude}")
            if c.frequency == 0:
                raise DegenerateFrequency("frequency 0 gives a constant, not a sinusoid")
            if c.frequency < 0:
                raise ValidationError(f"frequencies must be positive, got {c.frequency}")
        freqs = [c.frequency for c in comps]
        if len(set(freqs)) != len(freqs):
            raise ValidationError(f"frequencies must be pairwise distinct, got {freqs}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_arrays(cls, amplitudes, frequencies, phases) -> "SoSParams":
        a, w, p = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (amplitudes, frequencies, phases))
        if not a.shape == w.shape == p.shape:
            raise ValidationError("amplitude, frequency and phase arrays differ in length")
        return cls(tuple(Sinusoid(*t) for t in zip(a, w, p)))

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c.amplitude for c in self.components])

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([c.frequency for c in self.components])

    @property
    def phases(self) -> np.ndarray:
        return np.array([c.phase for c in self.components])

    @property
    def l1_amplitude(self) -> float:
        return float(np.sum(self.amplitudes))

    @property
    def max_frequency(self) -> float:
        return float(np.max(self.frequencies))

    def to_dict(self) -> dict:
        return {"components": [c._asdict() for c in self.components]}

    @classmethod
    def from_dict(cls, d) -> "SoSParams":
        return cls(tuple(Sinusoid(c["amplitude"], c["frequency"], c["phase"]) for c in d["components"]))


@dataclass(frozen=True)
class SamplingConfig:
    """Acquisition settings.

    ``threshold`` may be ``math.inf`` to switch folding off.
    """

    threshold: float
    step: float
    count: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.threshold > 0):
            raise ValidationError(f"threshold must be > 0, got {self.threshold}")
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValidationError(f"step must be finite and > 0, got {self.step}")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 2:
            raise ValidationError(f"count must be an integer >= 2, got {self.count}")
        if not (self.noise_sigma >= 0 and math.isfinite(self.noise_sigma)):
            raise ValidationError(f"noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        try:
            seed = check_seed(self.seed)
        except (TypeError, ValueError) as exc:
            raise ValidationError(str(exc)) from None
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "noise_sigma", float(self.noise_sigma))

    def replace(self, **changes) -> "SamplingConfig":
        d = self.to_dict()
        d.update(changes)
        return SamplingConfig(**d)

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "step": self.step,
            "count": self.count,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class FoldedTrace:
    samples: np.ndarray
    config: SamplingConfig
    truth: Optional[SoSParams] = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size != self.config.count:
            raise ValidationError(f"expected {self.config.count} samples, got shape {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __eq__(self, other):
        if not isinstance(other, FoldedTrace):
            return NotImplemented
        return (
            self.config == other.config
            and self.truth == other.truth
            and np.array_equal(self.samples, other.samples)
        )


@dataclass(frozen=True)
class ResidueSpec:
    """Spikes of the differenced residue: ``(n_m, c_m)`` with ``n_m`` in 1..N-1."""

    spikes: tuple[tuple[int, float], ...] = field(default_factory=tuple)

    @property
    def fold_count(self) -> int:
        return len(self.spikes)

    M = fold_count

    @property
    def indices(self) -> np.ndarray:
        return np.array([n for n, _ in self.spikes], dtype=int)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.spikes], dtype=float)


def sample_times(config: SamplingConfig) -> np.ndarray:
    return np.arange(1, config.count + 1) * config.step


def synthesize(params: SoSParams, config: SamplingConfig) -> np.ndarray:
    """Unfolded noiseless samples ``g(nT)``, ``n = 1..N``."""
    if not isinstance(params, SoSParams):
        params = SoSParams(params)
    t = sample_times(config)
    g = np.zeros(config.count)
    for a, w, phi in params.components:
        g += a * np.sin(w * t + phi)
    return g


def fold(value, lam):
    """Centered modulo map into ``[-lam, lam)``.

    Computed as ``x - 2*lam*floor((x + lam) / (2*lam))``, which equals
    ``2*lam*(frac((x + lam) / (2*lam)) - 1/2)`` but returns in-range
    inputs unchanged bit for bit. ``lam = inf`` is the identity.
    """
    if not (lam > 0):
        raise ValidationError(f"folding threshold must be > 0, got {lam}")
    x = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValidationError("fold input must be finite")
    if math.isinf(lam):
        out = x.copy()
    else:
        width = 2.0 * lam
        out = x - width * np.floor((x + lam) / width)
        # floor() of a rounded quotient can land one period off at the edges
        out = np.where(out >= lam, out - width, out)
        out = np.where(out < -lam, out + width, out)
    if np.ndim(value) == 0:
        return float(out)
    return out


def residue_values(x, lam) -> np.ndarray:
    """Residue ``x - fold(x)`` of a sampled sequence."""
    x = np.asarray(x, dtype=float)
    return x - fold(x, lam)


def acquire(params: SoSParams, config: SamplingConfig) -> FoldedTrace:
    """Noisy folded samples ``fold(g(nT)) + w[n]`` with ``w ~ N(0, sigma^2)`` i.i.d."""
    y = fold(synthesize(params, config), config.threshold)
    if config.noise_sigma > 0:
        y = y + config.noise_sigma * make_rng(config.seed).standard_normal(config.count)
    return FoldedTrace(y, config, params)


def snap_spikes(diff_residue, lam, rtol=SNAP_RTOL) -> ResidueSpec:
    """Snap a differenced residue sequence onto ``2*lam*Z`` and collect its spikes."""
    d = np.asarray(diff_residue, dtype=float)
    if math.isinf(lam):
        return ResidueSpec()
    k = np.rint(d / (2.0 * lam))
    err = np.abs(d - 2.0 * lam * k)
    bad = np.flatnonzero(err >= rtol * lam)
    if bad.size:
        i = int(bad[0])
        raise SnapError(
            f"residue difference {d[i]!r} at n={i + 1} is {err[i]:.3g} away from a multiple of 2*lambda"
        )
    nz = np.flatnonzero(k)
    return ResidueSpec(tuple((int(i) + 1, float(2.0 * lam * k[i])) for i in nz))


def residue(params: SoSParams, config: SamplingConfig) -> ResidueSpec:
    """Fold instants and coefficients of ``Delta(g - fold(g))`` on the sample grid."""
    g = synthesize(params, config)
    return snap_spikes(np.diff(residue_values(g, config.threshold)), config.threshold)


def finite_difference(x, order: int = 1) -> np.ndarray:
    """``order``-fold forward difference; output is ``order`` samples shorter."""
    x = np.asarray(x, dtype=float)
    if isinstance(order, bool) or int(order) != order or order < 1:
        raise ValidationError(f"difference order must be a positive integer, got {order}")
    if order >= x.size:
        raise ValidationError(f"difference order {order} needs more than {order} samples, got {x.size}")
    return np.diff(x, n=int(order))


def max_step(params: SoSParams, kappa: float, order: int = 1) -> float:
    """Largest sampling step for which ``|Delta^L g|`` stays below ``kappa``.

    Returns ``(2/W) * arcsin((kappa/||a||_1)**(1/L) / 2)`` with ``W`` the
    largest frequency, or ``inf`` when the arcsin argument reaches 1.
    """
    if not kappa > 0:
        raise ValidationError(f"kappa must be > 0, got {kappa}")
    arg = 0.5 * (kappa / params.l1_amplitude) ** (1.0 / order)
    if arg >= 1.0:
        return math.inf
    return 2.0 / params.max_frequency * math.asin(arg)


def diff_norm_bound(params: SoSParams, step: float, order: int = 1) -> float:
    """Upper bound ``2^L |sin(W T/2)|^L ||a||_1`` on ``max |Delta^L g|``.

    Valid while ``W T <= pi``, i.e. while ``sin`` is increasing on ``[0, W T/2]``.
    """
    if not step > 0:
        raise ValidationError(f"step must be > 0, got {step}")
    return (2.0 * abs(math.sin(params.max_frequency * step / 2.0))) ** order * params.l1_amplitude


def wrap_phase(x):
    """Wrap to ``[-pi, pi)``."""
    out = np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return float(out) if np.ndim(x) == 0 else out


def describe_folds(params: SoSParams, config: SamplingConfig) -> dict:
    """Summary used in provenance records and CLI output."""
    res = residue(params, config)
    return {"fold_count": res.fold_count, "fold_instants": res.indices.tolist()}
