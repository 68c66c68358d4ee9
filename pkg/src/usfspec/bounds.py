"""Cramer-Rao bounds for sinusoid parameters from differenced folded samples.

Differencing the folded samples turns the residue into a sparse spike train
``eps[n] = sum_m c_m delta[n - n_m]``. Modelled as Bernoulli impulsive noise
with ``p = q = M/(2N)`` on top of ``x[n] = w[n+1] - w[n] ~ N(0, 2 sigma^2)``,
the spikes vanish from the likelihood once ``M = o(N)``, so the Fisher
information is that of the differenced signal ``g[n+1] - g[n]`` in white
Gaussian noise of variance ``2 sigma^2``. For a single tone this scales the
classical bounds by ``gamma = 1 / (1 - cos(wT))``.

Bound vectors are ordered ``(a_k, w_k T, phi_k)`` per component, components in
the order given. Frequency bounds are reported for the normalized frequency
``wT`` (rad/sample).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateFrequency, SingularFim, ValidationError
from .signal import ResidueSpec, SamplingConfig, SoSParams, sample_times

MODES = ("closed_form_asymptotic", "fim_finite_n", "conventional_gaussian")
PARAM_NAMES = ("a", "omegaT", "phi")

#: Largest condition number (after Jacobi scaling) accepted when inverting a FIM.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class CrbReport:
    mode: str
    a: tuple[float, ...]
    omegaT: tuple[float, ...]
    phi: tuple[float, ...]
    gamma: tuple[float, ...]
    psnr: float
    N: int

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in PARAM_NAMES:
            vals = tuple(float(v) for v in getattr(self, name))
            if not all(math.isfinite(v) and v > 0 for v in vals):
                raise ValueError(f"bounds must be positive and finite, got {name}={vals}")
            object.__setattr__(self, name, vals)
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))

    @property
    def K(self) -> int:
        return len(self.a)

    def bound(self, name: str) -> np.ndarray:
        return np.array(getattr(self, name))

    def as_matrix(self) -> np.ndarray:
        """``(3, K)`` array, rows ordered a, omegaT, phi."""
        return np.array([self.a, self.omegaT, self.phi])

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "gamma": list(self.gamma),
            "psnr": self.psnr,
            "N": self.N,
            "bounds": {name: list(getattr(self, name)) for name in PARAM_NAMES},
        }

    @classmethod
    def from_dict(cls, d) -> "CrbReport":
        b = d["bounds"]
        return cls(d["mode"], tuple(b["a"]), tuple(b["omegaT"]), tuple(b["phi"]), tuple(d["gamma"]), d["psnr"], d["N"])

    def csv_header(self) -> list[str]:
        cols = ["mode", "N", "psnr"]
        for name in PARAM_NAMES + ("gamma",):
            cols += [f"{name}_{k + 1}" for k in range(self.K)]
        return cols

    def csv_row(self) -> list:
        row = [self.mode, self.N, self.psnr]
        for name in PARAM_NAMES + ("gamma",):
            row += list(getattr(self, name))
        return row


@dataclass(frozen=True)
class NoiseModelReport:
    p: float
    q: float
    e2: Optional[float] = None


@dataclass(frozen=True)
class FimMatrices:
    jacobian: np.ndarray
    gram: np.ndarray
    fim: np.ndarray


def gamma(omega_t: float) -> float:
    """Scale factor ``1 / (1 - cos(wT))``."""
    d = 1.0 - math.cos(omega_t)
    if abs(d) < 1e-12:
        raise DegenerateFrequency(f"1 - cos(wT) vanishes at wT={omega_t!r}")
    return 1.0 / d


def _check_sigma(sigma):
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValidationError(f"noise sigma must be finite and > 0, got {sigma}")


def crb_conventional_asymptotic(a1: float, omega_t: float, sigma: float, N: int) -> CrbReport:
    """Large-N single-tone bounds for unfolded samples in N(0, sigma^2) noise."""
    _check_sigma(sigma)
    s2 = sigma**2
    g = gamma(omega_t)
    return CrbReport(
        "conventional_gaussian",
        (2 * s2 / N,),
        (24 * s2 / (a1**2 * N**3),),
        (8 * s2 / (a1**2 * N),),
        (g,),
        a1**2 / s2,
        N,
    )


def crb_closed_form(a1: float, omega_t: float, sigma: float, N: int) -> CrbReport:
    """Asymptotic single-tone bounds from folded samples.

    ``2 gamma / (N PSNR) * [a1^2, 12/N^2, 4]`` with ``PSNR = a1^2 / sigma^2``.
    """
    if N < 4:
        raise ValidationError(f"closed form needs N >= 4, got {N}")
    _check_sigma(sigma)
    g = gamma(omega_t)
    psnr = a1**2 / sigma**2
    scale = 2 * g / (N * psnr)
    return CrbReport(
        "closed_form_asymptotic",
        (scale * a1**2,),
        (scale * 12 / N**2,),
        (scale * 4,),
        (g,),
        psnr,
        N,
    )


def signal_jacobian(params: SoSParams, config: SamplingConfig) -> np.ndarray:
    """``N x 3K`` derivatives of ``g(nT)`` w.r.t. ``(a_k, w_k, phi_k)``; ``w_k`` in rad/s."""
    t = sample_times(config)
    cols = []
    for a, w, phi in params.components:
        arg = w * t + phi
        c = np.cos(arg)
        cols += [np.sin(arg), a * t * c, a * c]
    return np.column_stack(cols)


def difference_jacobian(params: SoSParams, config: SamplingConfig) -> np.ndarray:
    """``(N-1) x 3K`` Jacobian ``Z`` of ``g((n+1)T) - g(nT)``, ``n = 1..N-1``."""
    J = signal_jacobian(params, config)
    return J[1:] - J[:-1]


def invert_fim(fim: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric PSD information matrix with a conditioning guard.

    The matrix is Jacobi-scaled to unit diagonal first, so the guard measures
    genuine collinearity rather than differing parameter units.
    """
    fim = 0.5 * (fim + fim.T)
    d = np.sqrt(np.diag(fim))
    if not np.all(d > 0):
        raise SingularFim("FIM has a non-positive diagonal entry")
    S = fim / np.outer(d, d)
    w, V = np.linalg.eigh(S)
    if w[0] <= 0 or w[-1] / w[0] > MAX_CONDITION:
        cond = math.inf if w[0] <= 0 else w[-1] / w[0]
        raise SingularFim(f"FIM condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    return (V / w) @ V.T / np.outer(d, d)


def _report_from_cov(mode, params, cov, sigma, N, step):
    diag = np.diag(cov).reshape(params.K, 3)
    gam = tuple(gamma(w * step) for w in params.frequencies)
    return CrbReport(
        mode,
        tuple(diag[:, 0]),
        tuple(diag[:, 1] * step**2),
        tuple(diag[:, 2]),
        gam,
        params.amplitudes[0] ** 2 / sigma**2,
        N,
    )


def crb_fim(params: SoSParams, config: SamplingConfig) -> tuple[FimMatrices, CrbReport]:
    """Finite-N bounds from the differenced model, any number of components.

    ``FIM = Z^T Z / (2 sigma^2)``; the bounds are the diagonal of its inverse.
    """
    sigma = config.noise_sigma
    _check_sigma(sigma)
    if config.count - 1 < 3 * params.K:
        raise ValidationError(f"need N-1 >= 3K differenced samples, got N={config.count}, K={params.K}")
    Z = difference_jacobian(params, config)
    R = Z.T @ Z
    fim = R / (2 * sigma**2)
    cov = invert_fim(fim)
    report = _report_from_cov("fim_finite_n", params, cov, sigma, config.count, config.step)
    return FimMatrices(Z, R, fim), report


def crb_conventional(params: SoSParams, sigma: float, step: float, N: int) -> CrbReport:
    """Finite-N Gaussian bounds for unfolded samples ``g(nT) + w[n]``."""
    _check_sigma(sigma)
    config = SamplingConfig(np.inf, step, N, sigma)
    J = signal_jacobian(params, config)
    cov = invert_fim(J.T @ J / sigma**2)
    return _report_from_cov("conventional_gaussian", params, cov, sigma, N, step)


def r_matrix_asymptotic(a1: float, omega_t: float, step: float, N: int) -> tuple[np.ndarray, float]:
    """Leading-order entries of ``R = Z^T Z`` for one tone, and the bound on ``|R_12|``.

    ``R_12`` is only bounded at order ``N``; the returned matrix holds 0 there
    (and at ``R_13``, which is ``o(N)``).
    """
    g = gamma(omega_t)
    T = step
    R = np.zeros((3, 3))
    R[0, 0] = N / g
    R[1, 1] = a1**2 * T**2 * N**3 / (3 * g)
    R[1, 2] = R[2, 1] = a1**2 * T * N**2 / (2 * g)
    R[2, 2] = a1**2 * N / g
    r12_bound = (2 + abs(1 / math.tan(omega_t))) * a1 * T * N / 2
    return R, r12_bound


def crb_leading_order(a1: float, omega_t: float, sigma: float, N: int, step: float = 1.0) -> np.ndarray:
    """Bounds ``(a, wT, phi)`` from inverting the leading-order ``R`` analytically.

    With ``R_12 = R_13 = 0`` the inverse diagonal is ``1/R_11`` and
    ``R_33 / D``, ``R_22 / D`` for ``D = R_22 R_33 - R_23^2``, i.e. the
    cofactor/determinant form with ``det R = R_11 D``.
    """
    R, _ = r_matrix_asymptotic(a1, omega_t, step, N)
    D = R[1, 1] * R[2, 2] - R[1, 2] ** 2
    s2 = 2 * sigma**2
    return np.array([s2 / R[0, 0], s2 * R[2, 2] / D * step**2, s2 * R[1, 1] / D])


def trig_power_sum(N: int, omega: float, phi: float, L: int) -> tuple[float, float]:
    """``sum_{n=1}^N n^L cos(n w + phi)`` and the matching sine sum.

    For ``L <= 2`` the sums are derivatives of the geometric series
    ``f(w) = e^{j(w+phi)} (1 - e^{jNw}) / (1 - e^{jw})``:
    ``sum n^L e^{j(nw+phi)} = (-j)^L f^(L)(w)``. Close to ``w = 0 mod 2 pi``
    (``|1 - e^{jw}| < 1e-2``) and for ``L > 2`` the sum is evaluated directly.
    """
    if L < 0 or int(L) != L:
        raise ValidationError(f"L must be a non-negative integer, got {L}")
    E = complex(math.cos(omega), math.sin(omega))
    v = 1 - E
    if L > 2 or abs(v) < 1e-2:
        n = np.arange(1, N + 1, dtype=float)
        arg = n * omega + phi
        w = n**L
        return float(np.sum(w * np.cos(arg))), float(np.sum(w * np.sin(arg)))
    EN1 = complex(math.cos((N + 1) * omega), math.sin((N + 1) * omega))
    u = E - EN1
    if L == 0:
        deriv = u / v
    else:
        du = 1j * E - 1j * (N + 1) * EN1
        dv = -1j * E
        num = du * v - u * dv
        if L == 1:
            deriv = num / v**2
        else:
            d2u = -E + (N + 1) ** 2 * EN1
            d2v = E
            deriv = (d2u * v - u * d2v) / v**2 - 2 * dv * num / v**3
    s = (-1j) ** L * complex(math.cos(phi), math.sin(phi)) * deriv
    return s.real, s.imag


def bernoulli_residue_stats(residue: ResidueSpec, N: int) -> NoiseModelReport:
    """Spike probabilities ``p = q = M / (2N)``."""
    M = residue.fold_count
    if M > N:
        raise ValidationError(f"fold count {M} exceeds N={N}")
    p = M / (2 * N)
    return NoiseModelReport(p, p)


def pdf_approx_error(p: float, lam: float, sigma: float) -> float:
    """Squared L2 distance between the spike-plus-Gaussian density and N(0, 2 sigma^2).

    ``p^2 / (2 sqrt(2 pi) sigma) * (6 + 2 exp(-4 lam^2/(2 sigma^2)) - 8 exp(-lam^2/(2 sigma^2)))``
    """
    _check_sigma(sigma)
    if not lam > 0:
        raise ValidationError(f"threshold must be > 0, got {lam}")
    r = lam**2 / (2 * sigma**2)
    return p**2 / (2 * math.sqrt(2 * math.pi) * sigma) * (6 + 2 * math.exp(-4 * r) - 8 * math.exp(-r))


def noise_model(residue: ResidueSpec, N: int, lam: float, sigma: float) -> NoiseModelReport:
    stats = bernoulli_residue_stats(residue, N)
    return NoiseModelReport(stats.p, stats.q, pdf_approx_error(stats.p, lam, sigma))
