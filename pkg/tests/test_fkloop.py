import math
from fractions import Fraction

import pytest

from vertexlab import fkloop
from vertexlab.kernel import params_from_q


def test_torus_geometry():
    t = fkloop.DiamondTorus.build(2, 2)
    assert t.n_edges == 4
    assert t.primal_diagonal(0, 0) == "SWNE"
    assert t.primal_diagonal(1, 0) == "NWSE"


def test_all_closed_and_all_open():
    t = fkloop.DiamondTorus.build(2, 2)
    closed = fkloop.configuration(t, 0)
    assert (closed.k, closed.s, closed.ell) == (2, 0, 2)
    opened = fkloop.configuration(t, (1 << t.n_edges) - 1)
    assert (opened.k, opened.s, opened.ell) == (1, 1, 2)


def test_single_open_edge():
    t = fkloop.DiamondTorus.build(2, 4)
    cfg = fkloop.configuration(t, 1)
    assert (cfg.k, cfg.ell) == (3, 3)


@pytest.mark.parametrize("N,M,count", [(2, 2, 16), (2, 4, 256)])
def test_euler_relation_everywhere(N, M, count):
    cfgs = list(fkloop.all_configurations(N, M))
    assert len(cfgs) == count
    assert all(c.euler_ok for c in cfgs)
    assert all(c.ell0 % 2 == 0 for c in cfgs)


def test_duality_of_loops():
    t = fkloop.DiamondTorus.build(2, 4)
    full = (1 << t.n_edges) - 1
    for omega in range(1 << t.n_edges):
        primal = fkloop.loops_of(t, omega).edge_sets()
        dual = fkloop.loops_of(t, full ^ omega, dual=True).edge_sets()
        assert primal == dual


@pytest.mark.parametrize("q", [4.5, 5.0, 10.0])
def test_weight_forms_agree(q):
    p = params_from_q(q)
    for cfg in fkloop.all_configurations(2, 4):
        direct, loop = fkloop.rc_weight(cfg, p)
        assert direct == pytest.approx(loop, rel=1e-12)


def test_orientation_resummation():
    lam = params_from_q(10.0).lambda_
    sq = math.sqrt(10.0)
    for cfg in fkloop.all_configurations(2, 2):
        want = 2.0 ** cfg.ell0 * sq ** (cfg.ell - cfg.ell0)
        assert fkloop.orientation_sum(cfg.loops, lam) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("N,M,images", [(2, 2, 18), (2, 4, 114)])
def test_six_vertex_images(N, M, images):
    rep = fkloop.six_vertex_check(N, M, params_from_q(10.0))
    assert rep["images"] == images
    assert rep["max_rel_err"] <= 1e-12


@pytest.mark.parametrize("N,M", [(2, 2), (2, 4), (4, 2)])
@pytest.mark.parametrize("q", [5.0, 10.0])
def test_correspondence(N, M, q):
    rep = fkloop.correspondence_check(N, M, params_from_q(q))
    assert rep["rel_err_i"] <= 1e-12
    assert rep["ok_ii"] and rep["ok_iii_r1"] and rep["ok_iii_r2"]
    assert rep["ok"]


def test_coupling_grid_critical():
    q = 3
    rep = fkloop.potts_coupling_check(fkloop.make_graph("grid2x2"), q, beta=math.log(1 + math.sqrt(q)))
    assert len(rep["free"]) == 6
    assert rep["max_abs_err_free"] <= 1e-13
    assert rep["max_abs_err_wired"] <= 1e-13


def test_coupling_exact_single_edge():
    rep = fkloop.potts_coupling_check(fkloop.make_graph("edge"), 2, p=Fraction(1, 2))
    row = rep["free"][0]
    assert row["mu"] == Fraction(2, 3)
    assert row["abs_err"] == 0
    assert row["naive_form"] == Fraction(5, 6)


def test_coupling_bigger_grid_and_errors():
    rep = fkloop.potts_coupling_check(fkloop.make_graph("grid3x3"), 2, beta=0.7)
    assert rep["max_abs_err_free"] <= 1e-13 and rep["max_abs_err_wired"] <= 1e-13
    with pytest.raises(ValueError):
        fkloop.make_graph("triangle")
    with pytest.raises(ValueError):
        fkloop.potts_coupling_check(fkloop.make_graph("edge"), 2.5, beta=1.0)
    with pytest.raises(ValueError):
        fkloop.potts_coupling_check(fkloop.make_graph("edge"), 2)


def test_budget():
    with pytest.raises(ValueError):
        list(fkloop.all_configurations(4, 6))
