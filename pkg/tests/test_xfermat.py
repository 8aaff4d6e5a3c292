import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab import xfermat
from vertexlab.kernel import params_from_q

C10 = params_from_q(10.0).c


@given(st.integers(1, 14).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N))).flatmap(
    lambda t: st.tuples(st.just(t[0]), st.just(t[1]), st.integers(0, math.comb(t[0], t[1]) - 1))))
@settings(max_examples=100, deadline=None)
def test_colex_round_trip(args):
    N, n, rank = args
    pos = xfermat.colex_unrank(rank, N, n)
    assert len(pos) == n and all(1 <= p <= N for p in pos)
    assert xfermat.colex_rank(pos) == rank


def test_block_states_are_colex():
    states = xfermat.block_states(6, 3)
    ranks = [xfermat.colex_rank(xfermat.positions(int(m), 6)) for m in states]
    assert ranks == list(range(math.comb(6, 3)))
    assert xfermat.mask_of(xfermat.positions(0b101100, 6)) == 0b101100
    with pytest.raises(ValueError):
        xfermat.block_states(4, 5)


def test_interlaced():
    assert xfermat.interlaced((1, 3), (2, 4))
    assert xfermat.interlaced((2, 4), (1, 3))
    assert xfermat.interlaced((1, 3), (1, 3))
    assert not xfermat.interlaced((1, 2), (3, 4))
    assert not xfermat.interlaced((1,), (1, 2))


def _brute_block(N, n, c):
    states = [xfermat.positions(int(m), N) for m in xfermat.block_states(N, n)]
    dim = len(states)
    V = np.zeros((dim, dim))
    for i, x in enumerate(states):
        for j, y in enumerate(states):
            if x == y:
                V[i, j] = 2.0
            elif xfermat.interlaced(x, y):
                V[i, j] = c ** len(set(x) ^ set(y))
    return V


@pytest.mark.parametrize("N,n", [(4, 2), (6, 2), (6, 3), (8, 3)])
def test_build_block_matches_definition(N, n):
    blk = xfermat.build_block(N, n, C10)
    assert np.allclose(blk.dense(), _brute_block(N, n, C10), rtol=1e-14)
    assert np.allclose(blk.dense(), blk.dense().T)


@pytest.mark.parametrize("N,n", [(8, 4), (10, 3)])
def test_sweep_matches_csr(N, n):
    blk = xfermat.build_block(N, n, C10)
    op = xfermat.block_operator(N, n, C10)
    v = np.random.default_rng(0).random(blk.dim)
    assert np.allclose(op.matvec(v), blk.matrix @ v, rtol=1e-13)


@pytest.mark.parametrize("N,n,nnz", [(8, 4, 2144), (12, 6, 146654)])
def test_nnz_count(N, n, nnz):
    assert 2 * xfermat._estimate_chain_count(N, n) - math.comb(N, n) == nnz
    assert xfermat.build_block(N, n, C10).nnz == nnz


def test_pf_matches_dense():
    blk = xfermat.build_block(10, 4, C10)
    pf = xfermat.pf_eigenvalue(blk)
    ev = np.linalg.eigvalsh(blk.dense())
    assert pf.value == pytest.approx(ev[-1], rel=1e-12)
    assert np.all(pf.vector >= 0)


def test_arrow_flip_symmetry():
    a = xfermat.pf_eigenvalue(xfermat.build_block(10, 3, C10)).value
    b = xfermat.pf_eigenvalue(xfermat.build_block(10, 7, C10)).value
    assert a == pytest.approx(b, rel=1e-12)


def test_trace_by_r_sums_to_full():
    by_r = xfermat.trace_by_r(4, 3, 3.0)
    assert sum(by_r.values()) == pytest.approx(xfermat.trace_power(4, 3, 3.0, "full"))
    assert by_r[0] == pytest.approx(xfermat.trace_power(4, 3, 3.0, "balanced"))
    with pytest.raises(ValueError):
        xfermat.trace_power(4, 0, 3.0)


@pytest.mark.parametrize("N,r", [(8, 1), (8, 2), (12, 1), (12, 2), (10, 0)])
def test_v_infinity_bound(N, r):
    _, lm, bound = xfermat.v_infinity_block(N, N // 2 - r)
    assert lm == pytest.approx(bound, abs=1e-10)


def test_block_for_switches_to_matrix_free():
    blk = xfermat.block_for(12, 6, C10, nnz_budget=1000)
    assert blk.matrix is None and blk.nnz == -1
    ref = xfermat.pf_eigenvalue(xfermat.build_block(12, 6, C10)).value
    assert xfermat.pf_eigenvalue(blk).value == pytest.approx(ref, rel=1e-12)


def test_dump_matrix(tmp_path):
    blk = xfermat.build_block(4, 2, 3.0)
    path = tmp_path / "m.txt"
    xfermat.dump_matrix(blk, path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"{blk.dim} {blk.nnz}"
    assert len(lines) == blk.nnz + 1
