"""Matrix-pencil estimation directly on differenced folded samples.

Differencing removes everything but a sparse spike train from the residue,
so ``Delta y_w`` is treated as a sum of ``K`` sinusoids (``2K`` complex
exponentials) in noise. Frequencies come from the shifted-pencil
eigenvalues of a Hankel matrix; amplitudes and phases from a linear
least-squares fit, then mapped back through

    a sin(w(n+1) + phi) - a sin(w n + phi) = 2 a sin(w/2) sin(w n + phi + w/2 + pi/2).

No spike rejection is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel

from .errors import DegenerateFrequency, OrderTooLarge, RankDeficient
from .signal import FoldedTrace, wrap_phase

#: Pencil eigenvalues with modulus outside this range are treated as noise.
MODULUS_RANGE = (0.5, 2.0)


@dataclass(frozen=True)
class EstimateResult:
    """Per-component estimates sorted by ascending frequency."""

    omegaT: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    diff_amplitude: np.ndarray
    diff_phase: np.ndarray
    order: int
    pencil: int
    singular_values: np.ndarray
    eigenvalues: np.ndarray

    @property
    def found(self) -> int:
        return len(self.omegaT)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "found": self.found,
            "pencil": self.pencil,
            "components": [
                {
                    "omegaT": float(w),
                    "amplitude": float(a),
                    "phase": float(p),
                    "diff_amplitude": float(da),
                    "diff_phase": float(dp),
                }
                for w, a, p, da, dp in zip(
                    self.omegaT, self.amplitude, self.phase, self.diff_amplitude, self.diff_phase
                )
            ],
            "singular_values": [float(s) for s in self.singular_values],
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
        }


def back_out_difference_model(diff_amplitude: float, diff_phase: float, omega_t: float) -> tuple[float, float]:
    """Amplitude and phase of ``g`` from those of its first difference."""
    s = math.sin(omega_t / 2)
    if s < 1e-9:
        raise DegenerateFrequency(f"sin(wT/2) = {s:.3g} too small to invert the difference at wT={omega_t!r}")
    return diff_amplitude / (2 * s), wrap_phase(diff_phase - omega_t / 2 - math.pi / 2)


def default_pencil(length: int) -> int:
    return length // 3


def pencil_poles(x: np.ndarray, n_poles: int, pencil: int) -> tuple[np.ndarray, np.ndarray]:
    """Signal poles of ``x`` from a rank-``n_poles`` truncated Hankel pencil.

    Returns ``(eigenvalues, singular_values)``.
    """
    Y = hankel(x[: x.size - pencil], x[x.size - pencil - 1 :])
    _, s, Vt = np.linalg.svd(Y, full_matrices=False)
    V = Vt[:n_poles].T
    # V1^+ V2 with V1, V2 the signal subspace minus its last/first row
    A = np.linalg.lstsq(V[:-1], V[1:], rcond=None)[0]
    return np.linalg.eigvals(A), s


def fit_sinusoids(x: np.ndarray, omega_t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares ``x[n] ~ sum_k b_k sin(w_k n + psi_k)``, ``n = 1..len(x)``."""
    n = np.arange(1, x.size + 1)[:, None]
    arg = n * omega_t[None, :]
    basis = np.hstack([np.sin(arg), np.cos(arg)])
    coef = np.linalg.lstsq(basis, x, rcond=None)[0]
    K = omega_t.size
    c_sin, c_cos = coef[:K], coef[K:]
    return np.hypot(c_sin, c_cos), np.arctan2(c_cos, c_sin)


def estimate(trace: FoldedTrace | np.ndarray, K: int, pencil: int | None = None,
             modulus_range=MODULUS_RANGE) -> EstimateResult:
    """Estimate ``K`` sinusoids from a folded trace.

    Raises :class:`RankDeficient` (carrying the partial result) when fewer
    than ``K`` poles survive the upper-half-plane and modulus filters.
    """
    samples = trace.samples if isinstance(trace, FoldedTrace) else np.asarray(trace, dtype=float)
    y = np.diff(samples)
    L = y.size
    n_poles = 2 * K
    if K < 1 or L < 2 * n_poles + 1:
        raise OrderTooLarge(f"{L} differenced samples cannot support K={K} (need >= {2 * n_poles + 1})")
    P = default_pencil(L) if pencil is None else int(pencil)
    if not n_poles <= P <= L - n_poles:
        raise OrderTooLarge(f"pencil parameter {P} outside [{n_poles}, {L - n_poles}]")

    z, sv = pencil_poles(y, n_poles, P)
    lo, hi = modulus_range
    mod = np.abs(z)
    ang = np.angle(z)
    keep = (ang > 0) & (ang < np.pi) & (mod >= lo) & (mod <= hi)
    z = z[keep]
    order = np.argsort(np.angle(z))
    z = z[order]
    w = np.angle(z)

    if w.size:
        da, dp = fit_sinusoids(y, w)
        a = np.empty_like(w)
        p = np.empty_like(w)
        for i in range(w.size):
            a[i], p[i] = back_out_difference_model(da[i], dp[i], w[i])
        dp = wrap_phase(dp)
    else:
        da = dp = a = p = np.empty(0)
    result = EstimateResult(w, a, p, da, dp, K, P, sv, z)
    if w.size < K:
        raise RankDeficient(f"recovered {w.size} of {K} components", result)
    return result
