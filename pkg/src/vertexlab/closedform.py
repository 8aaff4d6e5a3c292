"""Closed-form constants: free energy and diagonal inverse correlation length.

The inverse correlation length has two exponentially convergent series, one
fast for large lambda (``tanh_split``) and one fast for small lambda
(``sinh_series``).  Below ``lambda = 0.05`` the sinh series is evaluated
with mpmath at 40 significant digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp

from .kernel import ModelParams

EXTENDED_PRECISION_LAMBDA = 0.05
_MP_DPS = 40


@dataclass
class SeriesValue:
    value: float
    terms_used: int
    tail_bound: float
    method: str


def free_energy(params: ModelParams, tol: float = 1e-15) -> SeriesValue:
    """lambda/2 + sum_k e^{-k lambda} tanh(k lambda)/k.

    The tail after K terms is bounded by e^{-(K+1)lambda}/((K+1)(1-e^{-lambda})).
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    lam = params.lambda_
    if math.isinf(lam):
        return SeriesValue(math.inf, 0, 0.0, "direct")
    ratio = math.exp(-lam)
    total = 0.0
    k = 0
    while True:
        k += 1
        total += math.exp(-k * lam) * math.tanh(k * lam) / k
        bound = math.exp(-(k + 1) * lam) / ((k + 1) * (1.0 - ratio))
        if bound < tol:
            break
    return SeriesValue(lam / 2.0 + total, k, bound, "direct")


def _tanh_split(lam: float, tol: float) -> SeriesValue:
    # lam + 2 sum (-1)^k tanh(k lam)/k, with tanh = 1 - 2/(e^{2k lam}+1):
    # the "1" part gives 2 sum (-1)^k/k = -2 ln 2.
    total = 0.0
    k = 0
    while True:
        k += 1
        total += (-1) ** k / (k * (math.exp(2.0 * k * lam) + 1.0))
        # alternating, decreasing terms: next term bounds the tail
        bound = 4.0 * math.exp(-2.0 * (k + 1) * lam) / (k + 1)
        if bound < tol:
            break
    value = lam - 2.0 * math.log(2.0) - 4.0 * total
    return SeriesValue(value, k, bound, "tanh_split")


def _sinh_series(lam: float, tol: float) -> SeriesValue:
    a = math.pi ** 2 / (2.0 * lam)
    total = 0.0
    k = -1
    while True:
        k += 1
        m = 2 * k + 1
        total += 4.0 / (m * math.sinh(a * m))
        # remaining terms are below a geometric series with ratio e^{-2a}
        nxt = 8.0 * math.exp(-a * (m + 2)) / (m + 2)
        bound = nxt / (1.0 - math.exp(-2.0 * a))
        if bound < tol * max(total, 1e-300) or bound < 1e-300:
            break
    return SeriesValue(total, k + 1, bound, "sinh_series")


def _sinh_series_mp(lam_mp, tol: float) -> SeriesValue:
    with mp.workdps(_MP_DPS):
        a = mp.pi ** 2 / (2 * lam_mp)
        total = mp.mpf(0)
        k = -1
        while True:
            k += 1
            m = 2 * k + 1
            total += 4 / (m * mp.sinh(a * m))
            nxt = 8 * mp.exp(-a * (m + 2)) / (m + 2)
            bound = nxt / (1 - mp.exp(-2 * a))
            if bound < tol * total:
                break
        return SeriesValue(+total, k + 1, float(bound), "sinh_series")


def lambda_mp(q):
    """arccosh(sqrt(q)/2) at extended precision; q may be a string or mpf."""
    with mp.workdps(_MP_DPS):
        return mp.acosh(mp.sqrt(mp.mpf(q)) / 2)


def inverse_corr_length(params: ModelParams, tol: float = 1e-13, series: str = "auto") -> SeriesValue:
    """Inverse correlation length lambda + 2 sum (-1)^k tanh(k lambda)/k.

    ``series`` is ``auto`` (tanh split for lambda >= pi/2, else sinh series),
    ``tanh`` or ``sinh``.  For lambda below 0.05 the sinh series switches to
    mpmath and the returned value is an ``mpmath.mpf``, since the result is
    far below the double-precision relative accuracy of lambda itself.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    lam = params.lambda_
    if math.isinf(lam):
        return SeriesValue(math.inf, 0, 0.0, "direct")
    if series == "auto":
        series = "tanh" if lam >= math.pi / 2 else "sinh"
    if series == "tanh":
        return _tanh_split(lam, tol)
    if series == "sinh":
        if lam < EXTENDED_PRECISION_LAMBDA:
            return _sinh_series_mp(lambda_mp(repr(params.q)), tol)
        return _sinh_series(lam, tol)
    raise ValueError(f"unknown series {series!r}")


def inverse_corr_length_q(q, tol: float = 1e-13) -> SeriesValue:
    """Same as :func:`inverse_corr_length` but keyed on q (string or number).

    Keeps full precision for q very close to 4, where the double value of
    lambda has lost most of its digits.
    """
    lam_hp = lambda_mp(q if isinstance(q, (str, mp.mpf)) else repr(float(q)))
    lam = float(lam_hp)
    if lam < EXTENDED_PRECISION_LAMBDA:
        return _sinh_series_mp(lam_hp, tol)
    if lam >= math.pi / 2:
        return _tanh_split(lam, tol)
    return _sinh_series(lam, tol)


def xi(params: ModelParams) -> float:
    """Correlation length, the reciprocal of :func:`inverse_corr_length`."""
    v = inverse_corr_length(params, 1e-13).value
    return 1.0 / v


def asymptotic_inverse_corr_length(q):
    """Leading q -> 4 behaviour 8 exp(-pi^2/sqrt(q-4))."""
    with mp.workdps(_MP_DPS):
        return 8 * mp.exp(-mp.pi ** 2 / mp.sqrt(mp.mpf(q) - 4))
