"""Independent numerical cross-checks of the bounds module.

Each check compares a closed form or analytic derivative against a route
that shares no code with it: direct summation, adaptive quadrature, central
finite differences, or large-N sequences of the exact Gram matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .bounds import (
    crb_closed_form,
    crb_fim,
    crb_leading_order,
    difference_jacobian,
    gamma,
    pdf_approx_error,
    trig_power_sum,
)
from .signal import SamplingConfig, SoSParams, synthesize


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""


def brute_trig_sum(N, omega, phi, L):
    n = np.arange(1, N + 1, dtype=float)
    arg = n * omega + phi
    return math.fsum(n**L * np.cos(arg)), math.fsum(n**L * np.sin(arg)), math.fsum(n**L)


def check_trig_sums(draws=400, seed=7, tol=1e-9, fault=0.0) -> Check:
    """Closed-form power sums vs direct summation.

    Errors are relative to ``sum n^L``, the scale both routes round at.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        N = int(rng.integers(1, 501))
        L = int(rng.integers(0, 3))
        omega = rng.uniform(-2 * np.pi, 2 * np.pi)
        phi = rng.uniform(-np.pi, np.pi)
        c, s = trig_power_sum(N, omega, phi, L)
        bc, bs, mass = brute_trig_sum(N, omega, phi, L)
        err = math.hypot(c * (1 + fault) - bc, s - bs) / mass
        worst = max(worst, err)
    return Check("trig_power_sum vs brute force", worst < tol, worst, tol, f"{draws} draws, N<=500, L<=2")


def e2_quadrature(p, lam, sigma):
    """``int (p_V - p_X)^2`` with ``x ~ N(0, 2 sigma^2)`` and spikes at ``+-2 lam``."""
    s = math.sqrt(2) * sigma
    q = p

    def integrand(v):
        pv = q * norm.pdf(v + 2 * lam, scale=s) + (1 - p - q) * norm.pdf(v, scale=s) + p * norm.pdf(v - 2 * lam, scale=s)
        return (pv - norm.pdf(v, scale=s)) ** 2

    lo, hi = -2 * lam - 40 * s, 2 * lam + 40 * s
    val, _ = integrate.quad(integrand, lo, hi, points=[-2 * lam, 0.0, 2 * lam], epsabs=1e-14, epsrel=1e-12, limit=500)
    return val


E2_CASES = [
    (0.03, 1.0, 0.1),
    (0.01, 2.0, 0.5),
    (0.05, 1.0, 1.0),
    (0.2, 0.5, 0.3),
    (0.03, 1.0, 2.0),
]


def check_e2(tol=1e-8, fault=0.0) -> Check:
    worst = 0.0
    for p, lam, sigma in E2_CASES:
        worst = max(worst, abs(pdf_approx_error(p, lam, sigma) * (1 + fault) - e2_quadrature(p, lam, sigma)))
    return Check("E2 formula vs quadrature", worst < tol, worst, tol, f"{len(E2_CASES)} (p, lambda, sigma) cases")


def fd_jacobian(params: SoSParams, config: SamplingConfig, h=1e-6) -> np.ndarray:
    """Central differences of ``Delta g`` w.r.t. ``(a_k, w_k, phi_k)``."""
    base = np.array([list(c) for c in params.components])
    cols = []
    for k in range(params.K):
        for j in range(3):
            up, dn = base.copy(), base.copy()
            up[k, j] += h
            dn[k, j] -= h
            gu = np.diff(synthesize(SoSParams.from_arrays(*up.T), config))
            gd = np.diff(synthesize(SoSParams.from_arrays(*dn.T), config))
            cols.append((gu - gd) / (2 * h))
    return np.column_stack(cols)


JACOBIAN_CASES = [
    (SoSParams.from_arrays([1.0], [1.05], [0.3]), SamplingConfig(1.0, 1.0, 100)),
    (SoSParams.from_arrays([1.0, 1.0], [0.63, 1.0], [0.31, -0.43]), SamplingConfig(2.0, 1.0, 100)),
    (SoSParams.from_arrays([0.7, 1.3, 0.4], [20.0, 35.0, 61.0], [1.0, -2.0, 0.1]), SamplingConfig(1.0, 0.01, 80)),
]


def check_jacobian(tol=1e-6, fault=0.0) -> Check:
    worst = 0.0
    for params, config in JACOBIAN_CASES:
        Z = difference_jacobian(params, config) * (1 + fault)
        worst = max(worst, float(np.max(np.abs(Z - fd_jacobian(params, config)))))
    return Check("Jacobian Z vs finite differences", worst < tol, worst, tol, "step 1e-6")


def rn_deviations(a1, omega_t, phi, step, N):
    """Relative deviations of ``R_11``, ``R_22`` and ``det R`` from their leading terms."""
    params = SoSParams.from_arrays([a1], [omega_t / step], [phi])
    Z = difference_jacobian(params, SamplingConfig(np.inf, step, N))
    R = Z.T @ Z
    g = gamma(omega_t)
    return np.array([
        abs(R[0, 0] / N * g - 1),
        abs(R[1, 1] / (a1**2 * step**2 * N**3) * 3 * g - 1),
        abs(np.linalg.det(R) / (a1**4 * step**2 * N**5) * 12 * g**3 - 1),
    ])


def check_rn_convergence(Ns=(100, 1000, 10000), tol=1e-2, fault=0.0) -> Check:
    """Leading-order Gram entries: deviations shrink with N and end below ``tol``."""
    worst, ok = 0.0, True
    for omega_t, phi in [(1.05, 0.3), (0.63, -1.2), (np.pi / 2, 0.0)]:
        devs = np.array([rn_deviations(1.0, omega_t, phi, 1.0, N) for N in Ns]) + fault
        ok &= bool(np.all(np.diff(devs, axis=0) < 0))
        worst = max(worst, float(devs[-1].max()))
    return Check("R-matrix leading-order convergence", ok and worst < tol, worst, tol, f"N in {list(Ns)}")


def check_closed_form(draws=100, seed=11, tol=1e-12, fault=0.0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        a1 = rng.uniform(0.1, 10)
        wT = rng.uniform(0.05, np.pi)
        sigma = rng.uniform(0.01, 3)
        N = int(rng.integers(4, 100000))
        ref = crb_closed_form(a1, wT, sigma, N).as_matrix()[:, 0]
        lead = crb_leading_order(a1, wT, sigma, N) * (1 + fault)
        worst = max(worst, float(np.max(np.abs(lead / ref - 1))))
    return Check("closed form vs leading-order R inversion", worst < tol, worst, tol, f"{draws} random points")


def check_fim_limit(N=2000, tol=0.02, fault=0.0) -> Check:
    worst = 0.0
    for wT in (0.63, 1.0, 1.05, np.pi / 2):
        params = SoSParams.from_arrays([1.0], [wT], [0.0])
        _, rep = crb_fim(params, SamplingConfig(np.inf, 1.0, N, 0.1))
        ref = crb_closed_form(1.0, wT, 0.1, N).as_matrix()[:, 0]
        worst = max(worst, float(np.max(np.abs(rep.as_matrix()[:, 0] * (1 + fault) / ref - 1))))
    return Check("finite-N FIM vs closed form at N=2000", worst < tol, worst, tol)


CHECKS = (check_trig_sums, check_e2, check_jacobian, check_rn_convergence, check_closed_form, check_fim_limit)


def run_checks(inject_fault: bool = False) -> list[Check]:
    """All oracle checks; ``inject_fault`` perturbs each implementation by 1e-2 relative."""
    fault = 1e-2 if inject_fault else 0.0
    return [check(fault=fault) for check in CHECKS]
