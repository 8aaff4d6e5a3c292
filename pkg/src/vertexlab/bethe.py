"""Symmetric solutions of the Bethe equations and the quantities built on them.

For even N, r >= 0 and n = N/2 - r the equations read
    N p_j = 2 pi I_j - sum_k Theta(p_j, p_k),   I_j = j - (n+1)/2.
Solutions are sought with p_{n+1-j} = -p_j, so only the first n//2 roots are
unknowns; for odd n the middle root is exactly 0.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import continuum, kernel
from .kernel import ModelParams

DEFAULT_TOL_PER_N = 1e-12


class BetheSolveError(RuntimeError):
    def __init__(self, msg: str, residual: float):
        super().__init__(f"{msg} (last residual {residual:.3e})")
        self.residual = residual


@dataclass
class BetheRoots:
    N: int
    r: int
    Delta: float
    p: np.ndarray
    residual: float
    iterations: int
    method: str = ""
    history: list = field(default_factory=list, repr=False)

    @property
    def n(self) -> int:
        return self.N // 2 - self.r

    @property
    def I(self) -> np.ndarray:
        return index_choice(self.n)

    def to_json(self) -> dict:
        c = math.inf if math.isinf(self.Delta) else math.sqrt(2.0 - 2.0 * self.Delta)
        return {
            "N": self.N,
            "r": self.r,
            "Delta": self.Delta,
            "c": c,
            "p": [float(x) for x in self.p],
            "residual": self.residual,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BetheRoots":
        p = np.array([float(x) for x in data["p"]])
        return cls(int(data["N"]), int(data["r"]), float(data["Delta"]), p, float(data["residual"]), 0, "loaded")


def index_choice(n: int) -> np.ndarray:
    return np.arange(1, n + 1) - (n + 1) / 2.0


def _check_sizes(N: int, r: int) -> int:
    if N < 2 or N % 2:
        raise ValueError(f"N must be even and >= 2, got {N}")
    if r < 0 or N < 2 * r + 2:
        raise ValueError(f"need 0 <= r and N >= 2r + 2, got N={N}, r={r}")
    return N // 2 - r


def _full(u: np.ndarray, n: int) -> np.ndarray:
    mid = [0.0] if n % 2 else []
    return np.concatenate([u, mid, -u[::-1]])


def bethe_residual(N: int, Delta: float, p: np.ndarray) -> np.ndarray:
    """N p_j - 2 pi I_j + sum_k Theta(p_j, p_k) for every j."""
    I = index_choice(p.size)
    th = kernel.theta(Delta, p[:, None], p[None, :])
    return N * p - 2.0 * math.pi * I + np.asarray(th).sum(axis=1)


def _reduced_jacobian(N: int, Delta: float, p: np.ndarray, h: int) -> np.ndarray:
    """d/du_l of the first h residuals, u_l = p_l = -p_{n+1-l}."""
    P = p[:h, None]
    d1 = np.asarray(kernel.d1_theta(Delta, p[:, None], p[None, :]))
    d2 = np.asarray(kernel.d2_theta(Delta, P, p[None, :]))
    d2m = np.asarray(kernel.d2_theta(Delta, P, -p[None, :h]))
    np.fill_diagonal(d1, 0.0)
    J = d2[:, :h] - d2m
    diag = N + d1[:h].sum(axis=1) - np.diag(d2m)
    # the p_j -> p_j entry of d2 is replaced by the diagonal above
    J[np.arange(h), np.arange(h)] = diag
    return J


def seed(N: int, r: int) -> np.ndarray:
    """Exact Delta = -inf solution p_j = 2 pi I_j / (N - n)."""
    n = _check_sizes(N, r)
    return 2.0 * math.pi * index_choice(n) / (N - n)


def _solve_at(N: int, n: int, Delta: float, u0: np.ndarray, tol: float, max_steps: int, omega: float = 1.0):
    h = n // 2
    u = u0.copy()
    history = []
    if h == 0:
        p = _full(u, n)
        res = float(np.max(np.abs(bethe_residual(N, Delta, p))))
        return u, res, 0, history
    I = index_choice(n)[:h]
    p = _full(u, n)
    F = bethe_residual(N, Delta, p)[:h]
    res = float(np.max(np.abs(F)))
    for it in range(1, max_steps + 1):
        if res <= tol:
            u, p, res = _polish(N, n, Delta, u, p, F, res)
            return u, res, it - 1, history
        if res < 1e-3 * N:
            J = _reduced_jacobian(N, Delta, p, h)
            step = np.linalg.solve(J, F)
            cand = u - step
            kind = "newton"
        else:
            th = np.asarray(kernel.theta(Delta, p[:h, None], p[None, :])).sum(axis=1)
            T = (2.0 * math.pi * I - th) / N
            cand = (1.0 - omega) * u + omega * T
            kind = "fixed-point"
        p_c = _full(cand, n)
        F_c = bethe_residual(N, Delta, p_c)[:h]
        res_c = float(np.max(np.abs(F_c)))
        history.append((kind, res_c))
        if not np.all(np.isfinite(F_c)) or (kind == "fixed-point" and res_c > res):
            omega *= 0.5
            if omega < 1e-4:
                raise BetheSolveError("damped iteration stalled", res)
            continue
        if kind == "newton" and res_c > res and res_c > 10 * tol:
            # Newton left its basin; fall back to damped fixed point
            raise BetheSolveError("Newton step increased the residual", res)
        u, p, F, res = cand, p_c, F_c, res_c
    if res <= tol:
        return u, res, max_steps, history
    raise BetheSolveError("step budget exhausted", res)


def _polish(N, n, Delta, u, p, F, res, steps: int = 3):
    # a few extra Newton steps, kept only while they reduce the residual
    h = n // 2
    for _ in range(steps):
        cand = u - np.linalg.solve(_reduced_jacobian(N, Delta, p, h), F)
        p_c = _full(cand, n)
        F_c = bethe_residual(N, Delta, p_c)[:h]
        res_c = float(np.max(np.abs(F_c)))
        if not res_c < res:
            break
        u, p, F, res = cand, p_c, F_c, res_c
    return u, p, res


def solve(N: int, r: int, Delta: float, tol: float | None = None, max_steps: int = 500) -> BetheRoots:
    """Symmetric Bethe roots continued from the Delta = -inf solution.

    Damped fixed-point iteration of the map T, then Newton with the analytic
    Jacobian once the residual is below 1e-3 N.  If that fails, the target is
    approached by geometric continuation in Delta from -50.
    """
    n = _check_sizes(N, r)
    if tol is None:
        tol = DEFAULT_TOL_PER_N * N
    p0 = seed(N, r)
    if math.isinf(Delta):
        if Delta > 0:
            raise ValueError("Delta must be < -1 or -inf")
        res = float(np.max(np.abs(bethe_residual(N, Delta, p0)))) if n else 0.0
        return BetheRoots(N, r, Delta, p0, res, 0, "exact")
    if not Delta < -1.0:
        raise ValueError(f"Delta must be < -1, got {Delta!r}")
    u0 = p0[: n // 2]
    try:
        u, res, its, hist = _solve_at(N, n, Delta, u0, tol, max_steps)
        method = "direct"
    except BetheSolveError:
        u, res, its, hist = _continuation(N, n, Delta, u0, tol, max_steps)
        method = "continuation"
    p = _full(u, n)
    res = float(np.max(np.abs(bethe_residual(N, Delta, p))))
    roots = BetheRoots(N, r, Delta, p, res, its, method, hist)
    _check_roots(roots)
    return roots


def _continuation(N, n, Delta, u0, tol, max_steps):
    start = -50.0
    if Delta <= start:
        raise BetheSolveError("no convergence at strongly negative Delta", math.nan)
    # geometric ladder in (-Delta - 1)
    ladder = np.geomspace(-start - 1.0, -Delta - 1.0, 40)
    u = u0
    total = 0
    hist: list = []
    res = math.nan
    for a in ladder:
        D = -1.0 - a
        u, res, its, h = _solve_at(N, n, D, u, tol, max_steps)
        total += its
        hist.extend(h)
    return u, res, total, hist


def _check_roots(roots: BetheRoots) -> None:
    p = roots.p
    if p.size and (np.any(np.diff(p) <= 0) or p[0] <= -math.pi or p[-1] >= math.pi):
        raise BetheSolveError("roots left the ordered set", roots.residual)


# -- counting function and densities --------------------------------------

def counting_function(roots: BetheRoots, x):
    """f_p(x) = (x + (1/N) sum_k Theta(x, p_k)) / (2 pi)."""
    x = np.asarray(x, dtype=float)
    th = np.asarray(kernel.theta(roots.Delta, x[..., None], roots.p)).sum(axis=-1)
    out = (x + th / roots.N) / (2.0 * math.pi)
    return out if out.ndim else float(out)


@dataclass
class StepDensity:
    roots: BetheRoots
    breakpoints: np.ndarray  # p_1 .. p_n
    values: np.ndarray  # value on [p_j, p_{j+1}) for j = 1..n-1, then the wrap value

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.searchsorted(self.breakpoints, x, side="right") - 1
        # j = -1 (before p_1) and j = n-1 (after p_n) both lie on the wrap interval
        idx = np.where((j < 0) | (j >= self.breakpoints.size - 1), self.values.size - 1, j)
        out = self.values[idx]
        return out if out.ndim else float(out)


def step_density(roots: BetheRoots) -> StepDensity:
    """Piecewise-constant rho_p: increments 1 between roots, 2r+1 across the wrap."""
    p = roots.p
    N, n = roots.N, roots.n
    if n == 0:
        raise ValueError("no roots")
    bulk = 1.0 / (N * np.diff(p))
    wrap = (2 * roots.r + 1) / (N * (p[0] + 2.0 * math.pi - p[-1]))
    return StepDensity(roots, p.copy(), np.concatenate([bulk, [wrap]]))


def norm_distance(roots: BetheRoots, params: ModelParams, grid: int = 2048) -> float:
    """sup |k'(k^{-1}(x)) (rho_p(x) - rho(x))| over interval midpoints and a uniform grid."""
    sd = step_density(roots)
    p = roots.p
    mids = 0.5 * (p[1:] + p[:-1])
    x = np.concatenate([mids, np.linspace(-math.pi, math.pi, grid + 1)])
    rho = continuum.rho_values(params, x)[0]
    if params.is_infinite:
        weight = np.ones_like(x)
    else:
        weight = kernel.xi(params.lambda_, kernel.k_inverse(params.lambda_, x))
    return float(np.max(np.abs(weight * (sd(x) - rho))))


def jacobian_dominance(roots: BetheRoots):
    """Diagonal dominance of A B, A the reduced Jacobian over N, B = diag(N (p_{j+1}-p_j)).

    Returns (min_i (A~_ii - sum_{j != i} |A~_ij|), ok, diagonal of A~).
    """
    N, n = roots.N, roots.n
    h = n // 2
    if h == 0:
        return math.inf, True, np.zeros(0)
    p = roots.p
    if math.isinf(roots.Delta):
        # d1 = -1, d2 = +1 identically
        A = np.zeros((h, h))
        np.fill_diagonal(A, 1.0 - (n - 1) / N - 1.0 / N)
    else:
        A = _reduced_jacobian(N, roots.Delta, p, h) / N
    B = N * (p[1 : h + 1] - p[:h])
    At = A * B[None, :]
    off = np.abs(At).sum(axis=1) - np.abs(np.diag(At))
    excess = np.diag(At) - off
    m = float(np.min(excess))
    return m, m > 0, np.diag(At).copy()


# -- eigenvalues -----------------------------------------------------------

def _log_LM(c2: float, p: np.ndarray):
    z = np.exp(1j * p)
    L = 1.0 + c2 * z / (1.0 - z)
    M = 1.0 - c2 / (1.0 - z)
    return np.log(L.astype(complex)), np.log(M.astype(complex))


def log_eigenvalue(roots: BetheRoots, params: ModelParams | None = None) -> float:
    """log Lambda(p) computed in complex log space."""
    N, n = roots.N, roots.n
    if math.isinf(roots.Delta):
        raise ValueError("Lambda diverges at Delta = -inf; use limit_eigenvalue")
    if params is None:
        params = kernel.params_from_delta(roots.Delta)
    if roots.residual > 1e-10 * N:
        raise ValueError(f"root residual {roots.residual:.3e} too large for the eigenvalue")
    c2 = params.c ** 2
    p = roots.p
    zero = np.abs(p) <= 1e-9
    if np.any(zero & (p != 0.0)):
        raise ValueError("root within 1e-9 of the pole z = 1")
    if n == 0:
        return math.log(2.0)
    if np.any(zero):
        ell = int(np.flatnonzero(zero)[0])
        rest = np.delete(p, ell)
        pref = 2.0 + c2 * (N - 1) + c2 * float(np.sum(kernel.d1_theta(roots.Delta, 0.0, rest))) if rest.size else 2.0 + c2 * (N - 1)
        if not pref > 0:
            raise ValueError("non-positive zero-momentum prefactor")
        if rest.size == 0:
            return math.log(pref)
        _, lM = _log_LM(c2, rest)
        s = complex(np.sum(lM))
        _check_real(s)
        return math.log(pref) + s.real
    lL, lM = _log_LM(c2, p)
    sL, sM = complex(np.sum(lL)), complex(np.sum(lM))
    # Lambda = e^{sM} (1 + e^{sL - sM})
    ratio = 1.0 + cmath.exp(sL - sM)
    total = sM + cmath.log(ratio)
    _check_real(total)
    return total.real


def _check_real(logval: complex) -> None:
    # imaginary part of Lambda relative to |Lambda|
    if abs(math.sin(logval.imag)) > 1e-9 or math.cos(logval.imag) < 0:
        raise ValueError(f"eigenvalue not real positive (phase {logval.imag:.3e})")


def eigenvalue(roots: BetheRoots, params: ModelParams | None = None) -> float:
    """Lambda(p); may overflow to inf for very large N, see :func:`log_eigenvalue`."""
    return math.exp(log_eigenvalue(roots, params))


def limit_eigenvalue(N: int, r: int) -> float:
    """Limit of Lambda(p_Delta)/(-2 Delta)^n as Delta -> -inf, from the zeta product."""
    n = _check_sizes(N, r)
    zeta = cmath.exp(2j * math.pi / (N - n))
    I = index_choice(n)
    if n % 2 == 0:
        prod = 1.0 + 0j
        for a in I:
            prod *= 1.0 - zeta ** a
        return (2.0 / prod).real
    prod = 1.0 + 0j
    for a in I:
        if a != 0:
            prod *= 1.0 / (1.0 - zeta ** a)
    return ((N - n) * prod).real


def scaled_eigenvalue(roots: BetheRoots, params: ModelParams | None = None) -> float:
    """Lambda(p)/(-2 Delta)^n, evaluated in log space."""
    return math.exp(log_eigenvalue(roots, params) - roots.n * math.log(-2.0 * roots.Delta))


def eigenvector(roots: BetheRoots, params: ModelParams | None = None):
    """Bethe-ansatz amplitudes psi(x) over the n-subsets of {1..N}, unit norm.

    Returns (states, psi) where states are bitmasks in colex order matching
    :func:`vertexlab.xfermat.block_states`.
    """
    from .xfermat import block_states

    N, n = roots.N, roots.n
    if n > 9:
        raise ValueError("eigenvector limited to n <= 9")
    D = roots.Delta
    if math.isinf(D):
        raise ValueError("eigenvector needs finite Delta")
    p = roots.p
    states = block_states(N, n)
    if n == 0:
        return states, np.ones(1)
    bits = ((states[:, None] >> np.arange(N)) & 1).astype(bool)
    X = (np.nonzero(bits)[1].reshape(states.size, n) + 1).astype(float)
    e = np.exp(1j * p)
    psi = np.zeros(states.size, dtype=complex)
    amax = 0.0
    for sigma in permutations(range(n)):
        sgn = _perm_sign(sigma)
        A = complex(sgn)
        for k in range(n):
            for l in range(k + 1, n):
                a, b = p[sigma[k]], p[sigma[l]]
                A *= e[sigma[k]] * (np.exp(-1j * a) + np.exp(1j * b) - 2.0 * D)
        amax = max(amax, abs(A))
        psi += A * np.exp(1j * (X @ p[list(sigma)]))
    nrm = float(np.linalg.norm(psi))
    if not nrm > 1e-12 * amax:
        raise ValueError("Bethe vector vanishes for this root set")
    psi /= nrm
    # remove the global phase using the largest entry
    k = int(np.argmax(np.abs(psi)))
    psi *= abs(psi[k]) / psi[k]
    return states, psi


def _perm_sign(sigma) -> int:
    sgn = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            sgn = -sgn
    return sgn


# -- asymptotic quantities -------------------------------------------------

def _check_mult4(N: int) -> None:
    if N % 4:
        raise ValueError(f"N must be a multiple of 4, got {N}")


def ratio_log(N: int, r: int, params: ModelParams) -> float:
    """log Lambda_r(N) - log Lambda_0(N)."""
    _check_mult4(N)
    l0 = log_eigenvalue(solve(N, 0, params.Delta), params)
    lr = log_eigenvalue(solve(N, r, params.Delta), params)
    return lr - l0


def free_energy_estimate(N: int, params: ModelParams) -> float:
    _check_mult4(N)
    return log_eigenvalue(solve(N, 0, params.Delta), params) / N


@dataclass
class OffsetFunction:
    base: BetheRoots
    shifted: BetheRoots
    eps: np.ndarray

    def __call__(self, x):
        """eps_j on [pt_j, pt_{j+1}); eps_1 on [-pi, pt_1) and eps_n on [pt_n, pi]."""
        x = np.asarray(x, dtype=float)
        pt = self.shifted.p
        j = np.searchsorted(pt, x, side="right") - 1
        j = np.clip(j, 0, pt.size - 1)
        out = self.eps[j]
        return out if out.ndim else float(out)


def offset_displacement(base: BetheRoots, shifted: BetheRoots) -> np.ndarray:
    """eps_j = N (pt_j - p_{j + r/2}) for even r, N (pt_j - mean of p_{j+(r-1)/2}, p_{j+(r+1)/2}) for odd r."""
    N, r, n = shifted.N, shifted.r, shifted.n
    if base.r != 0 or base.N != N:
        raise ValueError("base must be the r = 0 solution at the same N")
    j = np.arange(n)  # 0-based j-1
    p, pt = base.p, shifted.p
    if r % 2 == 0:
        ref = p[j + r // 2]
    else:
        ref = 0.5 * (p[j + (r - 1) // 2] + p[j + (r + 1) // 2])
    eps = N * (pt - ref)
    if r % 2 == 1:
        eps[(n - 1) // 2] = 0.0 if abs(eps[(n - 1) // 2]) < 1e-9 else eps[(n - 1) // 2]
    return eps


def offset_function(N: int, r: int, params: ModelParams) -> OffsetFunction:
    base = solve(N, 0, params.Delta)
    shifted = solve(N, r, params.Delta)
    return OffsetFunction(base, shifted, offset_displacement(base, shifted))


def offset_check(N: int, r: int, params: ModelParams, grid: int = 4097) -> float:
    """sup over a grid of |rho(x) f(x) - r tau(x)|."""
    _check_mult4(N)
    if r < 1:
        raise ValueError("r must be >= 1")
    f = offset_function(N, r, params)
    x = np.linspace(-math.pi, math.pi, grid)
    rho = continuum.rho_values(params, x)[0]
    tau = continuum.tau_values(params, x)[0]
    return float(np.max(np.abs(rho * f(x) - r * tau)))


def empirical_moment(roots: BetheRoots, g) -> float:
    return float(np.sum(g(roots.p)) / roots.N)
