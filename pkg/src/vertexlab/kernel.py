"""Parameterizations and the analytic building blocks shared by every module.

The scattering phase ``theta``, its partial derivatives, the Poisson-type
kernel ``xi`` and the circle map ``k_map`` all live here.  Every function is
pure and accepts either scalars or numpy arrays for the angle arguments.

``Delta = -inf`` (see :data:`DELTA_MINUS_INFINITY`) is a legal value wherever
a ``Delta`` is accepted; the functions then switch to their exact limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DELTA_MINUS_INFINITY = -math.inf


def _acosh(x: float) -> float:
    # ln(x + sqrt(x^2 - 1)) with (x-1)(x+1) to keep precision near x = 1,
    # followed by one Newton step on cosh(t) = x.
    if x < 1.0:
        raise ValueError(f"arccosh argument must be >= 1, got {x!r}")
    if x == 1.0:
        return 0.0
    t = math.log(x + math.sqrt((x - 1.0) * (x + 1.0)))
    s = math.sinh(t)
    if s > 0.0:
        t -= (math.cosh(t) - x) / s
    return t


@dataclass(frozen=True)
class ModelParams:
    """Coupled parameters of the critical random-cluster / six-vertex pair.

    ``c = sqrt(2 + sqrt(q))``, ``Delta = (2 - c^2)/2 = -sqrt(q)/2`` and
    ``cosh(lambda) = sqrt(q)/2``.  The degenerate ``Delta = -inf`` point is
    available through :meth:`minus_infinity`.
    """

    q: float
    p_c: float
    c: float
    Delta: float
    lambda_: float

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.Delta)

    @classmethod
    def minus_infinity(cls) -> "ModelParams":
        return cls(q=math.inf, p_c=1.0, c=math.inf, Delta=DELTA_MINUS_INFINITY, lambda_=math.inf)

    def to_json(self) -> dict[str, str]:
        return {
            "q": _dec17(self.q),
            "p_c": _dec17(self.p_c),
            "c": _dec17(self.c),
            "Delta": _dec17(self.Delta),
            "lambda": _dec17(self.lambda_),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelParams":
        return cls(
            q=float(data["q"]),
            p_c=float(data["p_c"]),
            c=float(data["c"]),
            Delta=float(data["Delta"]),
            lambda_=float(data["lambda"]),
        )


def _dec17(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def params_from_q(q: float) -> ModelParams:
    """Parameters at the self-dual point for cluster weight ``q > 4``."""
    if not q > 4.0:
        raise ValueError(f"q must be > 4, got {q!r}")
    if math.isinf(q):
        return ModelParams.minus_infinity()
    sq = math.sqrt(q)
    lam = _acosh(sq / 2.0)
    c = math.sqrt(2.0 + sq)
    return ModelParams(q=q, p_c=sq / (1.0 + sq), c=c, Delta=-sq / 2.0, lambda_=lam)


def params_from_c(c: float) -> ModelParams:
    """Parameters from the six-vertex weight ``c > 2`` (``q = (c^2 - 2)^2``)."""
    if not c > 2.0:
        raise ValueError(f"c must be > 2, got {c!r}")
    if math.isinf(c):
        return ModelParams.minus_infinity()
    c2m2 = (c - math.sqrt(2.0)) * (c + math.sqrt(2.0))
    sq = c2m2
    q = sq * sq
    return ModelParams(
        q=q,
        p_c=sq / (1.0 + sq),
        c=c,
        Delta=(2.0 - c * c) / 2.0,
        lambda_=_acosh(c2m2 / 2.0),
    )


def params_from_delta(Delta: float) -> ModelParams:
    if math.isinf(Delta) and Delta < 0:
        return ModelParams.minus_infinity()
    if not Delta < -1.0:
        raise ValueError(f"Delta must be < -1, got {Delta!r}")
    return params_from_c(math.sqrt(2.0 - 2.0 * Delta))


def lambda_from_delta(Delta: float) -> float:
    if math.isinf(Delta):
        return math.inf
    return _acosh(-Delta)


def _check_delta(Delta: float) -> None:
    if not Delta < -1.0:
        raise ValueError(f"Delta must be < -1, got {Delta!r}")


def _mobius_arg(Delta, x, y):
    # A = e^{-ix} + e^{iy} - 2 Delta has Re A >= 2|Delta| - 2 > 0
    re = np.cos(x) + np.cos(y) - 2.0 * Delta
    im = np.sin(y) - np.sin(x)
    return re, im


def theta(Delta: float, x, y):
    """Scattering phase Theta(x, y), the continuous branch with Theta(0, 0) = 0.

    ``exp(-i Theta) = e^{i(x-y)} A / conj(A)`` with
    ``A = e^{-ix} + e^{iy} - 2 Delta``; because ``Re A > 0`` the principal
    argument is the continuous branch.
    """
    _check_delta(Delta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if math.isinf(Delta):
        out = y - x
    else:
        re, im = _mobius_arg(Delta, x, y)
        out = (y - x) - 2.0 * np.arctan2(im, re)
    return out if out.ndim else float(out)


def d1_theta(Delta: float, x, y):
    """Partial derivative of :func:`theta` in its first argument."""
    _check_delta(Delta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if math.isinf(Delta):
        out = -np.ones(np.broadcast(x, y).shape)
    else:
        re, im = _mobius_arg(Delta, x, y)
        # 2 Re(e^{-ix} / A)
        out = -1.0 + 2.0 * (np.cos(x) * re - np.sin(x) * im) / (re * re + im * im)
    return out if out.ndim else float(out)


def d2_theta(Delta: float, x, y):
    """Partial derivative of :func:`theta` in its second argument."""
    _check_delta(Delta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if math.isinf(Delta):
        out = np.ones(np.broadcast(x, y).shape)
    else:
        re, im = _mobius_arg(Delta, x, y)
        # 1 - 2 Re(e^{iy} / A)
        out = 1.0 - 2.0 * (np.cos(y) * re + np.sin(y) * im) / (re * re + im * im)
    return out if out.ndim else float(out)


def xi(mu: float, alpha):
    """Poisson kernel sinh(mu) / (cosh(mu) - cos(alpha)), mu > 0."""
    if not mu > 0:
        raise ValueError(f"mu must be > 0, got {mu!r}")
    alpha = np.asarray(alpha, dtype=float)
    if math.isinf(mu):
        out = np.ones_like(alpha)
    else:
        # cosh(mu) - cos(a) = 2 sinh^2(mu/2) + 2 sin^2(a/2), free of cancellation
        den = 2.0 * math.sinh(mu / 2.0) ** 2 + 2.0 * np.sin(alpha / 2.0) ** 2
        out = math.sinh(mu) / den
    return out if out.ndim else float(out)


def k_map(lam: float, alpha):
    """Circle map k with e^{ik(a)} = (e^lam - e^{-ia}) / (e^{lam - ia} - 1).

    Uses the closed form k(a) = 2 arctan(coth(lam/2) tan(a/2)), which is odd,
    increasing and pins k(+-pi) = +-pi.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam!r}")
    alpha = np.asarray(alpha, dtype=float)
    if math.isinf(lam):
        out = alpha.copy()
    else:
        out = _half_angle_map(1.0 / math.tanh(lam / 2.0), alpha)
    return out if out.ndim else float(out)


def k_inverse(lam: float, x):
    """Inverse of :func:`k_map`."""
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam!r}")
    x = np.asarray(x, dtype=float)
    if math.isinf(lam):
        out = x.copy()
    else:
        out = _half_angle_map(math.tanh(lam / 2.0), x)
    return out if out.ndim else float(out)


def _half_angle_map(a: float, t: np.ndarray) -> np.ndarray:
    # 2 atan(a tan(t/2)) written with atan2 so that t = +-pi maps to +-pi
    h = t / 2.0
    return 2.0 * np.arctan2(a * np.sin(h), np.cos(h))


def k_prime(lam: float, alpha):
    """Derivative of :func:`k_map`, equal to ``xi(lam, alpha)``."""
    return xi(lam, alpha)
