"""Continuum root density rho, offset function tau, and their integral equations.

rho solves the continuous Bethe equation
    2 pi rho(x) = 1 + int d1Theta(x, y) rho(y) dy,
tau solves the continuous offset equation
    2 pi tau(x) = (Theta(x, -pi) + Theta(x, pi))/2 - int d2Theta(x, y) tau(y) dy.
Both have explicit series in the variable alpha = k^{-1}(x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import kernel
from .kernel import ModelParams


@dataclass
class DensityEval:
    x: float
    value: float
    truncation_terms: int
    tail_bound: float


def _sech_terms(lam: float, tol: float) -> int:
    # sum_j sech(pi(2 pi j + a)/(2 lam)) for |a| <= pi: the j-th term with
    # |j| >= 1 is below 2 exp(-pi^2(2|j|-1)/(2 lam)), consecutive ratio e^{-pi^2/lam}
    ratio = math.exp(-math.pi ** 2 / lam)
    J = 0
    while True:
        J += 1
        first = 2.0 * math.exp(-math.pi ** 2 * (2 * J + 1) / (2.0 * lam))
        bound = 2.0 * first / (1.0 - ratio)
        if bound < tol or first == 0.0:
            return J, bound


def sech_sum(lam: float, alpha, tol: float = 1e-17):
    """sum_j sech(pi(2 pi j + alpha)/(2 lam)), the periodized sech profile."""
    alpha = np.asarray(alpha, dtype=float)
    J, bound = _sech_terms(lam, tol)
    total = np.zeros_like(alpha)
    for j in range(-J, J + 1):
        total = total + 1.0 / np.cosh(math.pi * (2.0 * math.pi * j + alpha) / (2.0 * lam))
    return total, J, bound


def rho_values(params: ModelParams, x, tol: float = 1e-16):
    """Vectorized rho(x); returns (values, terms, tail bound)."""
    x = np.asarray(x, dtype=float)
    if params.is_infinite:
        return np.full(x.shape, 1.0 / (4.0 * math.pi)), 0, 0.0
    lam = params.lambda_
    alpha = kernel.k_inverse(lam, x)
    s, J, bound = sech_sum(lam, alpha, tol)
    kp = kernel.xi(lam, alpha)
    pref = 1.0 / (4.0 * lam * kp)
    return pref * s, J, float(np.max(pref)) * bound if np.size(pref) else bound


def rho(params: ModelParams, x: float, tol: float = 1e-14) -> DensityEval:
    """Continuum root density at x."""
    if not tol > 0:
        raise ValueError("tol must be > 0")
    v, J, bound = rho_values(params, x, tol)
    return DensityEval(float(x), float(v), J, float(bound))


def _tau_terms(lam: float, tol: float) -> tuple[int, float]:
    # remainder term m is below (2/pi) e^{-2 lam m}/m
    r = math.exp(-2.0 * lam)
    m = 0
    while True:
        m += 1
        bound = (2.0 / math.pi) * r ** (m + 1) / ((m + 1) * (1.0 - r))
        if bound < tol:
            return m, bound


def tau_of_alpha(lam: float, alpha, tol: float = 1e-17):
    """T(alpha)/(2 pi) = tau(k(alpha)) via the tanh split, for alpha in [-pi, pi].

    At alpha = +-pi the continuous extension from inside is used, so
    tau(+-pi) = -+1/2.
    """
    alpha = np.asarray(alpha, dtype=float)
    if math.isinf(lam):
        return -alpha / (2.0 * math.pi), 0, 0.0
    M, bound = _tau_terms(lam, tol)
    m = np.arange(1, M + 1, dtype=float)
    coef = (-1.0) ** m / (m * (np.exp(2.0 * lam * m) + 1.0))
    rem = np.sin(np.multiply.outer(alpha, m)) @ coef
    return -alpha / (2.0 * math.pi) - (2.0 / math.pi) * rem, M, bound


def tau_values(params: ModelParams, x, tol: float = 1e-16):
    x = np.asarray(x, dtype=float)
    if params.is_infinite:
        return -x / (2.0 * math.pi), 0, 0.0
    alpha = kernel.k_inverse(params.lambda_, x)
    return tau_of_alpha(params.lambda_, alpha, tol)


def tau(params: ModelParams, x: float, tol: float = 1e-14) -> DensityEval:
    """Continuum offset function at x."""
    if not tol > 0:
        raise ValueError("tol must be > 0")
    v, M, bound = tau_values(params, x, tol)
    return DensityEval(float(x), float(v), M, float(bound))


def tau_paired_partial_sum(lam: float, alpha: float, pairs: int, cesaro: bool = True) -> float:
    """Raw series sum_m ((-1)^m/(pi m)) tanh(lam m) sin(m alpha), summed in pairs.

    Only used as an independent check of :func:`tau_of_alpha`.  The paired
    partial sums oscillate around the limit with amplitude O(1/pairs); with
    ``cesaro`` the last half of them are averaged, which cuts this to
    O(1/pairs^2).
    """
    m = np.arange(1, 2 * pairs + 1, dtype=float)
    terms = (-1.0) ** m / (math.pi * m) * np.tanh(lam * m) * np.sin(m * alpha)
    partial = np.cumsum(terms.reshape(-1, 2).sum(axis=1))
    if not cesaro:
        return float(partial[-1])
    return float(np.mean(partial[pairs // 2:]))


def _trapezoid_nodes(n: int):
    y = -math.pi + 2.0 * math.pi * np.arange(n) / n
    return y, np.full(n, 2.0 * math.pi / n)


@lru_cache(maxsize=16)
def _gauss_nodes(n: int):
    t, w = np.polynomial.legendre.leggauss(n)
    return math.pi * t, math.pi * w


def _check_grid(grid_size: int) -> None:
    if grid_size < 64 or grid_size & (grid_size - 1):
        raise ValueError("grid_size must be a power of two >= 64")


def residual_cBE(params: ModelParams, x, grid_size: int = 1024):
    """|2 pi rho(x) - 1 - int d1Theta(x, y) rho(y) dy| by periodic trapezoid."""
    _check_grid(grid_size)
    y, w = _trapezoid_nodes(grid_size)
    x = np.asarray(x, dtype=float)
    ry = rho_values(params, y)[0]
    rx = rho_values(params, x)[0]
    d1 = kernel.d1_theta(params.Delta, np.asarray(x)[..., None], y)
    integral = d1 @ (w * ry)
    out = np.abs(2.0 * math.pi * rx - 1.0 - integral)
    return out if out.ndim else float(out)


def residual_cOE(params: ModelParams, x, grid_size: int = 1024):
    """|2 pi tau(x) - (Theta(x,-pi)+Theta(x,pi))/2 + int d2Theta(x, y) tau(y) dy|.

    tau jumps across the seam y = +-pi, so the integrand is not periodic;
    Gauss-Legendre nodes on [-pi, pi] are used instead of the trapezoid rule.
    """
    _check_grid(grid_size)
    y, w = _gauss_nodes(grid_size)
    x = np.asarray(x, dtype=float)
    ty = tau_values(params, y)[0]
    tx = tau_values(params, x)[0]
    D = params.Delta
    src = 0.5 * (kernel.theta(D, x, -math.pi) + kernel.theta(D, x, math.pi))
    d2 = kernel.d2_theta(D, np.asarray(x)[..., None], y)
    integral = d2 @ (w * ty)
    out = np.abs(2.0 * math.pi * tx - src + integral)
    return out if out.ndim else float(out)


def sup_residuals(params: ModelParams, grid_size: int = 2048, n_eval: int = 257):
    """Sup of both residuals over an evaluation grid that includes +-pi."""
    x = np.linspace(-math.pi, math.pi, n_eval)
    return float(np.max(residual_cBE(params, x, grid_size))), float(np.max(residual_cOE(params, x, grid_size)))


# Fourier coefficients  f^(m) = (1/2pi) int f(a) e^{-ima} da

def R_of_alpha(lam: float, alpha):
    """R(alpha) = 2 pi rho(k(alpha)) k'(alpha) = (pi/(2 lam)) sum sech(...)."""
    return (math.pi / (2.0 * lam)) * sech_sum(lam, alpha)[0]


def T_of_alpha(lam: float, alpha):
    return 2.0 * math.pi * tau_of_alpha(lam, alpha)[0]


def Psi_of_alpha(Delta: float, lam: float, alpha):
    x = kernel.k_map(lam, alpha)
    return 0.5 * (kernel.theta(Delta, x, -math.pi) + kernel.theta(Delta, x, math.pi))


def P_of_alpha(lam: float, alpha):
    """P(alpha) = (1/2) log((cosh 2lam - cos a)/(1 - cos a))."""
    alpha = np.asarray(alpha, dtype=float)
    return 0.5 * np.log(_smooth_P_arg(lam, alpha)) - 0.5 * np.log(2.0 * np.sin(alpha / 2.0) ** 2)


def _smooth_P_arg(lam, alpha):
    # cosh(2 lam) - cos(a) = 2 sinh^2(lam) + 2 sin^2(a/2)
    return 2.0 * math.sinh(lam) ** 2 + 2.0 * np.sin(alpha / 2.0) ** 2


FOURIER_NAMES = ("Xi", "R", "T", "Psi", "P")


def fourier_closed_form(name: str, params: ModelParams, m: int, mu: float | None = None):
    lam = params.lambda_
    am = abs(m)
    if name == "Xi":
        mu = lam if mu is None else mu
        return math.exp(-mu * am)
    if name == "R":
        return 0.5 / math.cosh(lam * m)
    if name in ("T", "Psi"):
        if m == 0:
            return 0j
        sgn = -1.0 if m % 2 else 1.0
        fac = math.tanh(lam * am) if name == "T" else -math.expm1(-2.0 * lam * am)
        return sgn * fac / (1j * m)
    if name == "P":
        if m == 0:
            return lam
        return -math.expm1(-2.0 * lam * am) / (2.0 * am)
    raise ValueError(f"unknown Fourier name {name!r}")


def _periodic_coeff(values: np.ndarray, m: int) -> complex:
    n = values.size
    a = -math.pi + 2.0 * math.pi * np.arange(n) / n
    return complex(np.mean(values * np.exp(-1j * m * a)))


def fourier_numeric(name: str, params: ModelParams, m: int, grid: int = 4096, mu: float | None = None):
    """Quadrature Fourier coefficient (1/2pi) int f(a) e^{-ima} da."""
    lam = params.lambda_
    if name in ("Xi", "R"):
        a = -math.pi + 2.0 * math.pi * np.arange(grid) / grid
        if name == "Xi":
            vals = kernel.xi(lam if mu is None else mu, a)
        else:
            vals = R_of_alpha(lam, a)
        c = _periodic_coeff(vals, m)
        return c.real
    if name in ("T", "Psi"):
        # odd and discontinuous at the seam: Gauss-Legendre on [0, pi]
        t, w = _gauss_nodes(grid // 2)
        a = 0.5 * (t + math.pi)
        w = 0.5 * w
        f = T_of_alpha(lam, a) if name == "T" else Psi_of_alpha(params.Delta, lam, a)
        # for odd f: (1/2pi) int f e^{-ima} = -(i/pi) int_0^pi f sin(ma)
        return complex(0.0, -float(np.sum(w * f * np.sin(m * a))) / math.pi)
    if name == "P":
        # smooth part by trapezoid, -1/2 log(1 - cos a) analytically
        a = -math.pi + 2.0 * math.pi * np.arange(grid) / grid
        smooth = _periodic_coeff(0.5 * np.log(_smooth_P_arg(lam, a)), m).real
        sing = 0.5 * math.log(2.0) if m == 0 else 1.0 / (2.0 * abs(m))
        return smooth + sing
    raise ValueError(f"unknown Fourier name {name!r}")


def fourier_check(name: str, params: ModelParams, m: int, grid: int = 4096, mu: float | None = None):
    """(numeric, closed_form) for one of Xi, R, T, Psi, P at index m."""
    if name not in FOURIER_NAMES:
        raise ValueError(f"unknown Fourier name {name!r}")
    if abs(m) > 64:
        raise ValueError("|m| must be <= 64")
    return fourier_numeric(name, params, m, grid, mu), fourier_closed_form(name, params, m, mu)


def fourier_max_error(params: ModelParams, m_max: int = 16) -> float:
    err = 0.0
    for name in FOURIER_NAMES:
        for m in range(-m_max, m_max + 1):
            num, cf = fourier_check(name, params, m)
            err = max(err, abs(num - cf))
    return err


def identity_hgg_check(lam: float, terms: int = 200):
    """Both sides of lam + 2 sum (-1)^m tanh(m lam)/m = sum 4/((2m+1) sinh(pi^2(2m+1)/(2 lam))).

    Returns (lhs, rhs, lhs_tail, rhs_tail).  The lhs is summed in pairs
    (m = 2j-1, 2j) with the tanh split applied to each pair.
    """
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    m = np.arange(1, 2 * terms + 1, dtype=float)
    # tanh(m lam) = 1 - 2/(e^{2 m lam}+1); the "1" part sums to -2 ln 2
    with np.errstate(over="ignore"):
        rem = (-1.0) ** m / (m * (np.exp(2.0 * lam * m) + 1.0))
    lhs = lam - 2.0 * math.log(2.0) - 4.0 * float(np.sum(rem.reshape(-1, 2).sum(axis=1)[::-1]))
    lhs_tail = 4.0 * math.exp(-2.0 * lam * (2 * terms + 1))
    k = np.arange(terms, dtype=float)
    a = math.pi ** 2 / (2.0 * lam)
    with np.errstate(over="ignore"):
        rhs_terms = 4.0 / ((2 * k + 1) * np.sinh(a * (2 * k + 1)))
    rhs = float(np.sum(rhs_terms[::-1]))
    rhs_tail = 8.0 * math.exp(-a * (2 * terms + 1)) / (1.0 - math.exp(-2.0 * a))
    return lhs, rhs, lhs_tail, rhs_tail


def parseval_PR(params: ModelParams, m_max: int = 400):
    """(1/2pi) int P R by adaptive quadrature, and sum_m P^(m) R^(-m)."""
    lam = params.lambda_

    def f(a):
        return float(P_of_alpha(lam, a) * R_of_alpha(lam, a))

    # integrand even; log singularity at 0
    val, _ = integrate.quad(f, 0.0, math.pi, points=None, limit=400, epsabs=1e-14, epsrel=1e-13)
    lhs = val / math.pi
    m = np.arange(1, m_max + 1, dtype=float)
    series = lam * 0.5 + 2.0 * float(np.sum((-np.expm1(-2.0 * lam * m) / (2.0 * m)) * 0.5 / np.cosh(lam * m)))
    return lhs, series


def continuum_report(q: float, grid: int = 2048) -> dict:
    params = kernel.params_from_q(q)
    cbe, coe = sup_residuals(params, grid)
    return {
        "q": q,
        "grid": grid,
        "sup_residual_cBE": cbe,
        "sup_residual_cOE": coe,
        "fourier_max_error": fourier_max_error(params),
    }
