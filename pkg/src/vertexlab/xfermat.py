"""Six-vertex transfer matrix blocks V^[n] with a = b = 1.

States of a row of N vertical edges are bitmasks (bit j set = up arrow at
position j+1).  Within a block the states are ordered by colex rank, which
for fixed popcount is the numeric order of the masks.

V[x, y] = 2 if x = y, c^{|x xor y|} if x, y are interlaced, 0 otherwise.
Two routes are offered for products with V: an explicit CSR matrix
(:func:`build_block`) and a matrix-free sweep (:meth:`TransferBlock.matvec`)
that writes V as the periodic product of local vertex weights.  The sweep is
what makes N = 20 blocks tractable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sp

# explicit matrices above this many stored entries are refused
DEFAULT_NNZ_BUDGET = 30_000_000
# matrix-free products work on length-2^N vectors
MAX_SWEEP_N = 24


# -- ArrowState helpers ----------------------------------------------------

def positions(mask: int, N: int) -> tuple[int, ...]:
    """Sorted 1-based up-arrow positions of a mask."""
    return tuple(j + 1 for j in range(N) if mask >> j & 1)


def mask_of(pos) -> int:
    m = 0
    for p in pos:
        m |= 1 << (p - 1)
    return m


def colex_rank(pos) -> int:
    """Colex rank of an n-subset given by sorted 1-based positions."""
    return sum(math.comb(p - 1, i + 1) for i, p in enumerate(sorted(pos)))


def colex_unrank(rank: int, N: int, n: int) -> tuple[int, ...]:
    out = []
    for i in range(n, 0, -1):
        p = i - 1
        while math.comb(p + 1, i) <= rank:
            p += 1
        rank -= math.comb(p, i)
        out.append(p + 1)
    return tuple(sorted(out))


def block_states(N: int, n: int) -> np.ndarray:
    """All masks of popcount n in increasing numeric (= colex) order."""
    if not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= N, got N={N}, n={n}")
    masks = np.fromiter(
        (sum(1 << j for j in c) for c in combinations(range(N), n)),
        dtype=np.int64,
        count=math.comb(N, n),
    )
    masks.sort()
    return masks


def interlaced(x, y) -> bool:
    """True iff x, y (sorted position tuples) have equal size and alternate.

    Either x1 <= y1 <= x2 <= ... <= xn <= yn or y1 <= x1 <= ... <= yn <= xn.
    """
    x = tuple(sorted(x))
    y = tuple(sorted(y))
    if len(x) != len(y):
        return False

    def chain(a, b):
        seq = [v for pair in zip(a, b) for v in pair]
        return all(s <= t for s, t in zip(seq, seq[1:]))

    return chain(x, y) or chain(y, x)


# -- blocks ----------------------------------------------------------------

@dataclass
class TransferBlock:
    """Block V^[n] of the transfer matrix for given (N, n, c).

    ``matrix`` (CSR) and ``exponents`` are filled by :func:`build_block`;
    a block from :func:`block_operator` only supports :meth:`matvec`.
    """

    N: int
    n: int
    c: float
    states: np.ndarray
    matrix: sp.csr_matrix | None = None
    exponents: sp.csr_matrix | None = None
    _sweep_cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return int(self.states.size)

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz) if self.matrix is not None else -1

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix @ v
        return sweep_matvec(self.N, self.c, self.states, v)

    def dense(self) -> np.ndarray:
        if self.matrix is None:
            raise ValueError("block has no explicit matrix")
        return self.matrix.toarray()


def sweep_matvec(N: int, c: float, states: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(V v) restricted to ``states`` without forming V.

    V[x, y] = sum over the wrap arrow h0 of prod_j w_j, where site j carries
    the local weight [x_j + h_j = y_j + h_{j+1}] * c^{[x_j != y_j]} and
    h_N = h0 (h = 1 for a right-pointing horizontal arrow).
    """
    if N > MAX_SWEEP_N:
        raise ValueError(f"N={N} exceeds the sweep budget {MAX_SWEEP_N}")
    size = 1 << N
    out = np.zeros(size)
    for h0 in (0, 1):
        G = np.zeros((2, size))
        G[h0, states] = v
        for j in range(N):
            # axis 1 of the view is bit j
            g = G.reshape(2, size >> (j + 1), 2, 1 << j)
            new1_set = c * g[0, :, 0, :]   # y_j = 0 -> x_j = 1, h 0 -> 1
            new0_clr = c * g[1, :, 1, :]   # y_j = 1 -> x_j = 0, h 1 -> 0
            g[0, :, 0, :] += new0_clr
            g[1, :, 1, :] += new1_set
        out += G[h0]
    return out[states]


def _chain_partners(N: int, n: int, pos: np.ndarray):
    """All (row, y-mask) with x1 <= y1 <= x2 <= ... <= xn <= yn, y != x."""
    dim = pos.shape[0]
    rows = np.arange(dim, dtype=np.int64)
    ymask = np.zeros(dim, dtype=np.int64)
    last = np.full(dim, -1, dtype=np.int64)
    for i in range(n):
        xi = pos[rows, i]
        lo = np.maximum(xi, last + 1)
        hi = pos[rows, i + 1] if i + 1 < n else np.full(rows.size, N - 1, dtype=np.int64)
        cnt = hi - lo + 1
        rep = np.repeat(np.arange(rows.size), cnt)
        start = np.repeat(np.cumsum(cnt) - cnt, cnt)
        off = np.arange(rep.size, dtype=np.int64) - start
        rows, ymask, lo = rows[rep], ymask[rep], lo[rep]
        last = lo + off
        ymask = ymask | (np.int64(1) << last)
    return rows, ymask


def build_block(N: int, n: int, c: float, nnz_budget: int = DEFAULT_NNZ_BUDGET) -> TransferBlock:
    """Explicit CSR block V^[n] for rows of length N.

    Partners are generated combinatorially: for each state the interlaced
    states of the first chain are produced interval by interval, and the
    second chain is the transpose.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    states = block_states(N, n)
    dim = states.size
    if n == 0 or n == N:
        one = sp.csr_matrix(np.array([[2.0]]))
        ex = sp.csr_matrix(np.array([[-1.0]]))
        return TransferBlock(N, n, c, states, one, ex)
    bits = ((states[:, None] >> np.arange(N)) & 1).astype(bool)
    pos = np.nonzero(bits)[1].reshape(dim, n).astype(np.int64)
    est = _estimate_chain_count(N, n)
    if 2 * est - dim > nnz_budget:
        raise MemoryError(
            f"block (N={N}, n={n}) needs about {2 * est - dim} stored entries, budget {nnz_budget}"
        )
    rows, ymask = _chain_partners(N, n, pos)
    keep = ymask != states[rows]
    rows, ymask = rows[keep], ymask[keep]
    cols = np.searchsorted(states, ymask)
    expo = np.bitwise_count(states[rows] ^ ymask).astype(np.int64)
    r = np.concatenate([rows, cols, np.arange(dim)])
    k = np.concatenate([cols, rows, np.arange(dim)])
    e = np.concatenate([expo, expo, np.full(dim, -1)])
    data = np.where(e < 0, 2.0, float(c) ** np.maximum(e, 0))
    mat = sp.csr_matrix((data, (r, k)), shape=(dim, dim))
    exps = sp.csr_matrix((e.astype(float), (r, k)), shape=(dim, dim))
    mat.sort_indices()
    exps.sort_indices()
    return TransferBlock(N, n, c, states, mat, exps)


def _estimate_chain_count(N: int, n: int) -> int:
    """Number of pairs (x, y) in the first chain, x = y included.

    These are the pairs with a valid horizontal path h_0 = h_N = 0 under
    h_{j+1} = h_j + x_j - y_j; counted by a DP over (h, popcount of x).
    """
    ways = {(0, 0): 1}
    for _ in range(N):
        new: dict = {}
        for (h, a), w in ways.items():
            for xj in (0, 1):
                for yj in (0, 1):
                    h2 = h + xj - yj
                    if h2 in (0, 1) and a + xj <= n:
                        key = (h2, a + xj)
                        new[key] = new.get(key, 0) + w
        ways = new
    return ways.get((0, n), 0)


def block_operator(N: int, n: int, c: float) -> TransferBlock:
    """Matrix-free block: only :meth:`TransferBlock.matvec` is available."""
    return TransferBlock(N, n, c, block_states(N, n))


def block_for(N: int, n: int, c: float, nnz_budget: int = DEFAULT_NNZ_BUDGET) -> TransferBlock:
    """Explicit block when it fits the budget, matrix-free otherwise."""
    if 2 * _estimate_chain_count(N, n) - math.comb(N, n) <= nnz_budget:
        return build_block(N, n, c, nnz_budget)
    return block_operator(N, n, c)


# -- eigenvalues -----------------------------------------------------------

@dataclass
class PFResult:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int


def power_iteration(matvec, dim: int, max_iter: int = 200_000, shift: float = 0.0) -> PFResult:
    """Dominant eigenpair of a symmetric nonnegative operator.

    Starts from the uniform vector.  Stops once the eigenvalue changed by
    less than 1e-15 (relative) on two consecutive steps and the residual
    ||Bv - lam v|| is below 1e-12 lam, or as soon as the residual alone is
    below 1e-14 lam.
    """
    v = np.full(dim, 1.0 / math.sqrt(dim))
    lam_old = None
    small = 0
    for it in range(1, max_iter + 1):
        w = matvec(v) + shift * v
        lam = float(v @ w)
        res = float(np.linalg.norm(w - lam * v))
        if lam_old is not None and abs(lam - lam_old) <= 1e-15 * abs(lam):
            small += 1
        else:
            small = 0
        if res <= 1e-14 * lam or (small >= 2 and res <= 1e-12 * lam):
            return PFResult(lam - shift, v, res, it)
        lam_old = lam
        v = w / np.linalg.norm(w)
    raise RuntimeError(f"power iteration did not converge in {max_iter} steps (residual {res:.3e})")


def pf_eigenvalue(block: TransferBlock, max_iter: int = 200_000) -> PFResult:
    """Perron-Frobenius eigenvalue and unit nonnegative eigenvector of a block."""
    if block.dim == 0:
        raise ValueError("empty block")
    if block.dim == 1:
        val = float(block.matvec(np.ones(1))[0])
        return PFResult(val, np.ones(1), 0.0, 0)
    res = power_iteration(block.matvec, block.dim, max_iter)
    vec = np.abs(res.vector)
    return PFResult(res.value, vec, res.residual, res.iterations)


def trace_power(N: int, M: int, c: float, which: str = "full") -> float:
    """Tr[(V^[N/2])^M] (balanced) or the sum over all blocks (full)."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if which == "balanced":
        blocks = [N // 2]
    elif which == "full":
        blocks = range(N + 1)
    else:
        raise ValueError(f"unknown trace kind {which!r}")
    total = 0.0
    for n in blocks:
        total += _block_trace(build_block(N, n, c), M)
    return total


def trace_by_r(N: int, M: int, c: float) -> dict:
    """{r: Tr[(V^[N/2 - r])^M]} over every block, r possibly negative."""
    return {N // 2 - n: _block_trace(build_block(N, n, c), M) for n in range(N, -1, -1)}


def _block_trace(block: TransferBlock, M: int) -> float:
    A = block.dense()
    if block.dim <= 512:
        # nonnegative entries: the matrix power has no cancellation
        return float(np.trace(np.linalg.matrix_power(A, M)))
    if block.dim > 4096:
        raise MemoryError("dense trace limited to dimension 4096")
    ev = np.linalg.eigvalsh(A)
    return float(np.sum(ev ** M))


# -- the Delta -> -inf limit -----------------------------------------------

def limit_bound(N: int, n: int) -> float:
    """2^r prod_{j<r} [1 + cos(pi(2j+1)/(n+2r))] with r = N/2 - n."""
    r = N // 2 - n
    out = 2.0 ** r
    for j in range(r):
        out *= 1.0 + math.cos(math.pi * (2 * j + 1) / (n + 2 * r))
    return out


def v_infinity_block(N: int, n: int):
    """(matrix, lambda_max, bound) for the limit of V^[n]/(-2 Delta)^n.

    The limit keeps the interlaced pairs that differ in all 2n positions.
    lambda_max comes from power iteration on matrix + I (the limit can have
    period 2).
    """
    blk = build_block(N, n, 2.0)
    ex = blk.exponents.tocoo()
    keep = ex.data == 2 * n
    dim = blk.dim
    mat = sp.csr_matrix((np.ones(int(keep.sum())), (ex.row[keep], ex.col[keep])), shape=(dim, dim))
    if n == 0:
        mat = sp.csr_matrix(np.ones((1, 1)))
    res = power_iteration(lambda v: mat @ v, dim, shift=1.0) if dim > 1 else PFResult(float(mat[0, 0]), np.ones(1), 0.0, 0)
    bound = limit_bound(N, n)
    if res.value > bound + 1e-10:
        raise AssertionError(f"lambda_max {res.value} exceeds bound {bound}")
    return mat, res.value, bound


def dump_matrix(block: TransferBlock, path) -> None:
    """Coordinate text file: 'dim nnz' then 'row col exponent' (-1 = diagonal 2)."""
    ex = block.exponents.tocoo()
    order = np.lexsort((ex.col, ex.row))
    with open(path, "w") as fh:
        fh.write(f"{block.dim} {ex.nnz}\n")
        for i in order:
            fh.write(f"{ex.row[i]} {ex.col[i]} {int(ex.data[i])}\n")
