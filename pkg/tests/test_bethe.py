import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from vertexlab import bethe, closedform, continuum, kernel, xfermat
from vertexlab.kernel import ModelParams, params_from_q

P10 = params_from_q(10.0)
P5 = params_from_q(5.0)


def test_index_choice():
    assert list(bethe.index_choice(4)) == [-1.5, -0.5, 0.5, 1.5]
    assert list(bethe.index_choice(3)) == [-1.0, 0.0, 1.0]


def test_seed_solves_minus_infinity():
    roots = bethe.solve(12, 1, kernel.DELTA_MINUS_INFINITY)
    assert roots.residual <= 1e-12 and roots.method == "exact"
    assert np.allclose(roots.p, 2 * math.pi * bethe.index_choice(5) / 7)


@pytest.mark.parametrize("N,r", [(8, 0), (12, 1), (16, 2), (64, 0), (64, 3)])
def test_solution_is_symmetric_ordered(N, r):
    roots = bethe.solve(N, r, P10.Delta)
    p = roots.p
    assert roots.residual <= 1e-12 * N
    assert np.all(np.diff(p) > 0) and -math.pi < p[0] and p[-1] < math.pi
    assert np.allclose(p, -p[::-1], atol=1e-15)
    if roots.n % 2:
        assert p[roots.n // 2] == 0.0
    F = bethe.bethe_residual(N, P10.Delta, p)
    assert np.max(np.abs(F)) == pytest.approx(roots.residual)


def test_invalid_sizes():
    with pytest.raises(ValueError):
        bethe.solve(7, 0, P10.Delta)
    with pytest.raises(ValueError):
        bethe.solve(8, 5, P10.Delta)
    with pytest.raises(ValueError):
        bethe.solve(8, 0, -0.5)


def test_continuation_reaches_close_to_critical():
    roots = bethe.solve(32, 1, params_from_q(4.2).Delta)
    assert roots.residual <= 1e-12 * 32


@pytest.mark.parametrize("params", [P5, P10], ids=["q5", "q10"])
@pytest.mark.parametrize("N,r", [(8, 0), (8, 1), (8, 2), (12, 0), (12, 1), (12, 2)])
def test_eigenvalue_matches_perron_frobenius(params, N, r):
    lb = bethe.eigenvalue(bethe.solve(N, r, params.Delta), params)
    pf = xfermat.pf_eigenvalue(xfermat.build_block(N, N // 2 - r, params.c)).value
    assert lb / pf == pytest.approx(1.0, abs=1e-10)


def test_odd_n_eigenvalue():
    lb = bethe.eigenvalue(bethe.solve(10, 2, P10.Delta), P10)
    pf = xfermat.pf_eigenvalue(xfermat.build_block(10, 3, P10.c)).value
    assert lb / pf == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("N,r", [(8, 0), (8, 1), (6, 1)])
def test_eigenvector(N, r):
    roots = bethe.solve(N, r, P10.Delta)
    lam = bethe.eigenvalue(roots, P10)
    states, psi = bethe.eigenvector(roots, P10)
    blk = xfermat.build_block(N, roots.n, P10.c)
    assert np.array_equal(states, blk.states)
    assert np.linalg.norm(blk.matrix @ psi - lam * psi) <= 1e-9 * np.linalg.norm(psi)


def test_roots_json_round_trip():
    roots = bethe.solve(16, 1, P10.Delta)
    back = bethe.BetheRoots.from_json(json.loads(json.dumps(roots.to_json())))
    assert np.array_equal(back.p, roots.p)
    assert back.N == 16 and back.r == 1 and back.Delta == roots.Delta


@pytest.mark.parametrize("N,r", [(8, 1), (8, 2), (12, 1), (12, 2)])
def test_limit_eigenvalue(N, r):
    bound = xfermat.limit_bound(N, N // 2 - r)
    assert bethe.limit_eigenvalue(N, r) == pytest.approx(bound, rel=1e-12)
    scaled = bethe.scaled_eigenvalue(bethe.solve(N, r, -1e6))
    assert scaled / bound == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("Delta", [P10.Delta, -20.0, kernel.DELTA_MINUS_INFINITY])
def test_jacobian_dominance(Delta):
    m, ok, diag = bethe.jacobian_dominance(bethe.solve(32, 0, Delta))
    assert ok and m > 0 and np.all(diag > 0)


def test_counting_function_at_roots():
    roots = bethe.solve(32, 1, P10.Delta)
    f = bethe.counting_function(roots, roots.p)
    assert np.allclose(f * roots.N, roots.I, atol=1e-10)


def test_step_density_integrates_to_half_and_norm():
    roots = bethe.solve(64, 0, P10.Delta)
    sd = bethe.step_density(roots)
    x = np.linspace(-math.pi, math.pi, 200_001)
    assert trapezoid(sd(x), x) == pytest.approx(0.5, abs=2e-3)
    d = bethe.norm_distance(roots, P10)
    assert 0 < d < 1.0 / 64


def test_moment_matches_density():
    roots = bethe.solve(256, 0, P10.Delta)
    g = np.cos
    emp = bethe.empirical_moment(roots, g)
    x = np.linspace(-math.pi, math.pi, 4001)
    cont = trapezoid(g(x) * continuum.rho_values(P10, x)[0], x)
    assert emp == pytest.approx(cont, abs=5e-3)


def test_free_energy_trend():
    f = closedform.free_energy(P10).value
    gaps = [abs(bethe.free_energy_estimate(N, P10) - f) for N in (32, 64, 128)]
    assert gaps[0] > gaps[1] > gaps[2]
    with pytest.raises(ValueError):
        bethe.free_energy_estimate(30, P10)


def test_offset_displacement_odd_r_center():
    f = bethe.offset_function(32, 1, P10)
    assert f.eps.size == 15
    assert f.eps[7] == 0.0
    assert np.allclose(f.eps, -f.eps[::-1], atol=1e-9)
    assert isinstance(f(0.1), float)


def test_offset_error_decreases():
    errs = [bethe.offset_check(N, 1, P10) for N in (32, 64, 128)]
    assert errs[0] > errs[1] > errs[2]
    with pytest.raises(ValueError):
        bethe.offset_check(32, 0, P10)
