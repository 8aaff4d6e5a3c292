"""Random-cluster configurations on the diagonal torus and their loop representation.

Geometry.  The medial torus has vertices (x, y), x mod N, y mod M.  Its
faces are labelled by their lower-left corner (i, j); faces with i + j even
are the vertices of the primal (diagonal) torus, the others are dual
vertices.  Every medial vertex (x, y) is crossed by one primal edge:

* x + y even: the primal edge joins face (x-1, y-1) to face (x, y), i.e. it
  runs along the SW-NE diagonal, and the dual edge along NW-SE;
* x + y odd: the primal edge joins (x-1, y) to (x, y-1) (NW-SE) and the dual
  edge runs SW-NE.

Medial edge h(x, y) goes from (x, y) to (x+1, y), v(x, y) from (x, y) to
(x, y+1).  At (x, y) the half-edges are E = h(x, y), W = h(x-1, y),
N = v(x, y), S = v(x, y-1).  Loops never cross an open edge (primal edge in
omega, or dual edge in omega*), so at each vertex they pair the two
half-edges lying on the same side of that edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import icelab, xfermat
from .kernel import ModelParams

MAX_RC_EDGES = 20

_DIR = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}
_OPP = {"E": "W", "W": "E", "N": "S", "S": "N"}
# half-edges on each side of a diagonal through the vertex
_SIDES = {
    "SWNE": ({"N", "W"}, {"E", "S"}),
    "NWSE": ({"N", "E"}, {"W", "S"}),
}


# -- the torus --------------------------------------------------------------

@dataclass
class DiamondTorus:
    """Primal and dual graphs of the diagonal torus with N columns, M rows of medial vertices."""

    N: int
    M: int
    primal_vertices: list = field(default_factory=list)
    dual_vertices: list = field(default_factory=list)
    # per medial vertex e = y*N + x: (u, v, displacement) in primal / dual indices
    primal_edges: list = field(default_factory=list)
    dual_edges: list = field(default_factory=list)

    @classmethod
    def build(cls, N: int, M: int) -> "DiamondTorus":
        if N < 2 or M < 2 or N % 2 or M % 2:
            raise ValueError(f"N, M must be even and >= 2, got {N}, {M}")
        t = cls(N, M)
        pidx, didx = {}, {}
        for j in range(M):
            for i in range(N):
                if (i + j) % 2 == 0:
                    pidx[(i, j)] = len(t.primal_vertices)
                    t.primal_vertices.append((i, j))
                else:
                    didx[(i, j)] = len(t.dual_vertices)
                    t.dual_vertices.append((i, j))
        for y in range(M):
            for x in range(N):
                sw, ne = ((x - 1) % N, (y - 1) % M), (x, y)
                nw, se = ((x - 1) % N, y), (x, (y - 1) % M)
                if (x + y) % 2 == 0:
                    t.primal_edges.append((pidx[sw], pidx[ne], (1, 1)))
                    t.dual_edges.append((didx[nw], didx[se], (1, -1)))
                else:
                    t.primal_edges.append((pidx[nw], pidx[se], (1, -1)))
                    t.dual_edges.append((didx[sw], didx[ne], (1, 1)))
        return t

    @property
    def n_edges(self) -> int:
        return self.N * self.M

    def primal_diagonal(self, x: int, y: int) -> str:
        return "SWNE" if (x + y) % 2 == 0 else "NWSE"


def _other(diag: str) -> str:
    return "NWSE" if diag == "SWNE" else "SWNE"


# -- loops ------------------------------------------------------------------

@dataclass
class Loop:
    edges: list  # traversal order: (medial edge id, +1 if traversed along its direction)
    length: int
    homology: tuple
    winding: float  # total turning angle along the traversal direction

    @property
    def retractable(self) -> bool:
        return self.homology == (0, 0)


@dataclass
class LoopDecomposition:
    loops: list

    @property
    def count(self) -> int:
        return len(self.loops)

    @property
    def non_retractable(self) -> int:
        return sum(not lp.retractable for lp in self.loops)

    @property
    def vertical_windings(self) -> int:
        return sum(abs(lp.homology[1]) for lp in self.loops)

    def edge_sets(self) -> set:
        return {frozenset(e for e, _ in lp.edges) for lp in self.loops}


def _edge_id(N: int, kind: str, x: int, y: int) -> int:
    return 2 * (y * N + x) + (0 if kind == "h" else 1)


def _half_edge(N: int, M: int, x: int, y: int, half: str):
    """(edge id, sign, neighbour) for leaving (x, y) through ``half``."""
    if half == "E":
        return _edge_id(N, "h", x, y), 1, ((x + 1) % N, y)
    if half == "W":
        return _edge_id(N, "h", (x - 1) % N, y), -1, ((x - 1) % N, y)
    if half == "N":
        return _edge_id(N, "v", x, y), 1, (x, (y + 1) % M)
    return _edge_id(N, "v", x, (y - 1) % M), -1, (x, (y - 1) % M)


def _pairings(torus: DiamondTorus, omega: int, dual: bool = False):
    """Per medial vertex, the half-edge pairing as a dict half -> half."""
    N, M = torus.N, torus.M
    out = []
    for y in range(M):
        for x in range(N):
            e = y * N + x
            open_ = bool(omega >> e & 1)
            pd = torus.primal_diagonal(x, y)
            if dual:
                # omega here is a dual configuration; dual edge runs across pd
                diag = _other(pd) if open_ else pd
            else:
                diag = pd if open_ else _other(pd)
            a, b = _SIDES[diag]
            pair = {}
            for side in (a, b):
                h1, h2 = sorted(side)
                pair[h1], pair[h2] = h2, h1
            out.append(pair)
    return out


def loops_of(torus: DiamondTorus, omega: int, dual: bool = False) -> LoopDecomposition:
    """Trace the loops separating omega from its dual.

    With ``dual=True`` the bitstring is read as a dual configuration omega*
    and the loops are built from the dual edges' point of view.
    """
    N, M = torus.N, torus.M
    pairing = _pairings(torus, omega, dual)
    seen = np.zeros(2 * N * M, dtype=bool)
    loops = []
    for start in range(2 * N * M):
        if seen[start]:
            continue
        cell = start // 2
        x0, y0 = cell % N, cell // N
        half0 = "E" if start % 2 == 0 else "N"
        x, y, half = x0, y0, half0
        dx = dy = 0
        turn = 0
        edges = []
        while True:
            eid, sgn, (nx, ny) = _half_edge(N, M, x, y, half)
            if seen[eid]:
                raise AssertionError("medial edge visited twice")
            seen[eid] = True
            edges.append((eid, sgn))
            ddx, ddy = _DIR[half]
            dx, dy = dx + ddx, dy + ddy
            arrive = _OPP[half]
            out = pairing[ny * N + nx][arrive]
            ox, oy = _DIR[out]
            turn += 1 if ddx * oy - ddy * ox > 0 else -1
            x, y, half = nx, ny, out
            if (x, y, half) == (x0, y0, half0):
                break
        if dx % N or dy % M:
            raise AssertionError("loop did not close on the torus")
        loops.append(Loop(edges, len(edges), (dx // N, dy // M), turn * math.pi / 2))
    return LoopDecomposition(loops)


# -- clusters ---------------------------------------------------------------

def clusters(torus: DiamondTorus, omega: int, dual: bool = False):
    """(number of clusters, net indicator) for omega on the primal (or dual) torus.

    Each cluster is explored by BFS with universal-cover coordinates; the
    mismatch around every closing edge is a period vector (a N, b M), and a
    cluster is a net when these vectors span a rank-2 lattice.
    """
    verts = torus.dual_vertices if dual else torus.primal_vertices
    edges = torus.dual_edges if dual else torus.primal_edges
    N, M = torus.N, torus.M
    adj = [[] for _ in verts]
    for e, (u, v, d) in enumerate(edges):
        if omega >> e & 1:
            adj[u].append((v, d))
            adj[v].append((u, (-d[0], -d[1])))
    pos: dict = {}
    k = 0
    net = 0
    for root in range(len(verts)):
        if root in pos:
            continue
        k += 1
        pos[root] = verts[root]
        stack = [root]
        periods = []
        while stack:
            u = stack.pop()
            pu = pos[u]
            for v, d in adj[u]:
                target = (pu[0] + d[0], pu[1] + d[1])
                if v not in pos:
                    pos[v] = target
                    stack.append(v)
                else:
                    a, b = target[0] - pos[v][0], target[1] - pos[v][1]
                    if a or b:
                        periods.append((a // N, b // M))
        if periods and np.linalg.matrix_rank(np.array(periods, dtype=float)) == 2:
            net = 1
    return k, net


# -- configurations ----------------------------------------------------------

@dataclass
class RCTorusConfig:
    torus: DiamondTorus
    omega: int
    o: int
    c: int
    k: int
    s: int
    loops: LoopDecomposition

    @property
    def ell(self) -> int:
        return self.loops.count

    @property
    def ell0(self) -> int:
        return self.loops.non_retractable

    @property
    def U(self) -> int:
        return self.loops.vertical_windings // 2

    @property
    def euler_ok(self) -> bool:
        NM = self.torus.n_edges
        return 2 * self.k == self.ell - self.o + 2 * self.s + NM // 2


def configuration(torus: DiamondTorus, omega: int) -> RCTorusConfig:
    NM = torus.n_edges
    o = bin(omega).count("1")
    k, s = clusters(torus, omega)
    cfg = RCTorusConfig(torus, omega, o, NM - o, k, s, loops_of(torus, omega))
    if not cfg.euler_ok:
        raise AssertionError(f"Euler relation fails for omega={omega:b}")
    return cfg


def all_configurations(N: int, M: int):
    torus = DiamondTorus.build(N, M)
    if torus.n_edges > MAX_RC_EDGES:
        raise ValueError(f"{torus.n_edges} edges exceeds the enumeration budget {MAX_RC_EDGES}")
    for omega in range(1 << torus.n_edges):
        yield configuration(torus, omega)


def rc_weight(cfg: RCTorusConfig, params: ModelParams):
    """(p^o (1-p)^c q^k, C sqrt(q)^(ell + 2 s)) at p = p_c."""
    q = params.q
    sq = math.sqrt(q)
    NM = cfg.torus.n_edges
    direct = params.p_c ** cfg.o * (1.0 - params.p_c) ** cfg.c * q ** cfg.k
    loop = loop_constant(q, NM) * sq ** (cfg.ell + 2 * cfg.s)
    return direct, loop


def loop_constant(q: float, NM: int) -> float:
    """C = q^{NM/4} (1 + sqrt q)^{-NM}."""
    return q ** (NM / 4.0) * (1.0 + math.sqrt(q)) ** (-NM)


# -- oriented loops and the six-vertex image ---------------------------------

def oriented_weight(loops: LoopDecomposition, orient, lam: float) -> float:
    """prod over loops of e^{lam W / 2pi}, W the winding in the chosen direction."""
    w = 0.0
    for lp, s in zip(loops.loops, orient):
        w += s * lp.winding
    return math.exp(lam * w / (2.0 * math.pi))


def orientation_sum(loops: LoopDecomposition, lam: float) -> float:
    """Sum over all 2^ell orientations of the oriented-loop weight."""
    return sum(oriented_weight(loops, o, lam) for o in product((1, -1), repeat=loops.count))


def six_vertex_of(torus: DiamondTorus, loops: LoopDecomposition, orient):
    """Arrow bits (h[y][x] = 1 right, v[y][x] = 1 up) of the oriented loops."""
    N, M = torus.N, torus.M
    h = np.zeros((M, N), dtype=np.int8)
    v = np.zeros((M, N), dtype=np.int8)
    for lp, s in zip(loops.loops, orient):
        for eid, sgn in lp.edges:
            cell, kind = divmod(eid, 2)
            y, x = divmod(cell, N)
            bit = 1 if sgn * s > 0 else 0
            (h if kind == 0 else v)[y, x] = bit
    return h, v


def six_vertex_exponent(h: np.ndarray, v: np.ndarray) -> int:
    """Number of type 5/6 vertices; raises on an ice-rule violation."""
    M, N = h.shape
    e = 0
    for y in range(M):
        for x in range(N):
            t = icelab.vertex_type(int(h[y, (x - 1) % N]), int(h[y, x]), int(v[(y - 1) % M, x]), int(v[y, x]))
            if t == 0:
                raise AssertionError("oriented loops produced an ice-rule violation")
            e += t >= 5
    return e


def six_vertex_check(N: int, M: int, params: ModelParams) -> dict:
    """Group oriented loop weights by their six-vertex image.

    Returns the max relative difference between the grouped sums and
    c^{n5+n6}, and the number of distinct images.
    """
    torus = DiamondTorus.build(N, M)
    groups: dict = {}
    for cfg in all_configurations(N, M):
        for orient in product((1, -1), repeat=cfg.ell):
            h, v = six_vertex_of(torus, cfg.loops, orient)
            key = (h.tobytes(), v.tobytes())
            w = oriented_weight(cfg.loops, orient, params.lambda_)
            if key in groups:
                groups[key][0] += w
            else:
                groups[key] = [w, six_vertex_exponent(h, v)]
    err = max(abs(w / params.c ** e - 1.0) for w, e in groups.values())
    return {"images": len(groups), "max_rel_err": err}


# -- random-cluster / six-vertex correspondence -------------------------------

def six_vertex_side(N: int, M: int, c: float):
    """(Z, {r: Z^(r)}) from the brute-force oracle when in budget, else traces."""
    if 2 * N * M <= icelab.MAX_EDGES:
        en = icelab.enumerate_torus(N, M, c)
        return en.Z, en.Z_by_r
    by_r = xfermat.trace_by_r(N, M, c)
    return sum(by_r.values()), by_r


def correspondence_check(N: int, M: int, params: ModelParams) -> dict:
    """Items (i)-(iii) linking the random-cluster and six-vertex partition functions."""
    q = params.q
    sq = math.sqrt(q)
    NM = N * M
    C = loop_constant(q, NM)
    lhs_i = 0.0
    lhs_ii = 0.0
    lhs_iii = {1: 0.0, 2: 0.0}
    euler_ok = True
    weight_err = 0.0
    resum_err = 0.0
    ell0_even = True
    for cfg in all_configurations(N, M):
        direct, loop = rc_weight(cfg, params)
        weight_err = max(weight_err, abs(direct / loop - 1.0))
        euler_ok &= cfg.euler_ok
        ell0_even &= cfg.ell0 % 2 == 0
        term = direct * (2.0 / sq) ** cfg.ell0 * q ** (-cfg.s)
        lhs_i += term
        if cfg.U == 1:
            lhs_ii += term
        for r in lhs_iii:
            if cfg.U >= r:
                lhs_iii[r] += term
        if cfg.ell <= 10:
            want = 2.0 ** cfg.ell0 * sq ** (cfg.ell - cfg.ell0)
            resum_err = max(resum_err, abs(orientation_sum(cfg.loops, params.lambda_) / want - 1.0))
    Z, by_r = six_vertex_side(N, M, params.c)
    rhs_i = C * Z
    rhs_ii = 4.0 * C * by_r.get(1, 0.0)
    rhs_iii = {r: C * by_r.get(r, 0.0) for r in lhs_iii}
    rel_i = abs(lhs_i / rhs_i - 1.0)
    ok_ii = lhs_ii <= rhs_ii * (1 + 1e-12)
    ok_iii = {r: lhs_iii[r] >= rhs_iii[r] * (1 - 1e-12) for r in lhs_iii}
    return {
        "N": N,
        "M": M,
        "q": q,
        "lhs_i": lhs_i,
        "rhs_i": rhs_i,
        "rel_err_i": rel_i,
        "lhs_ii": lhs_ii,
        "rhs_ii": rhs_ii,
        "ok_ii": ok_ii,
        "lhs_iii_r1": lhs_iii[1],
        "rhs_iii_r1": rhs_iii[1],
        "ok_iii_r1": ok_iii[1],
        "lhs_iii_r2": lhs_iii[2],
        "rhs_iii_r2": rhs_iii[2],
        "ok_iii_r2": ok_iii[2],
        "weight_forms_max_rel_err": weight_err,
        "orientation_resum_max_rel_err": resum_err,
        "per_config_euler_ok": euler_ok,
        "ell0_always_even": ell0_even,
        "ok": bool(rel_i <= 1e-12 and ok_ii and all(ok_iii.values()) and euler_ok),
    }


# -- Edwards-Sokal coupling -------------------------------------------------------

@dataclass
class Graph:
    name: str
    n_vertices: int
    edges: list
    boundary: tuple = (0,)


def make_graph(name: str) -> Graph:
    """'edge', 'grid2x2' (a 4-cycle) or 'gridRxC' (R x C grid, outer vertices as boundary)."""
    if name == "edge":
        return Graph(name, 2, [(0, 1)])
    if name == "grid2x2":
        return Graph(name, 4, [(0, 1), (1, 3), (3, 2), (2, 0)])
    if name.startswith("grid") and "x" in name:
        R, C = (int(t) for t in name[4:].split("x"))
        idx = lambda i, j: i * C + j  # noqa: E731
        edges = [(idx(i, j), idx(i, j + 1)) for i in range(R) for j in range(C - 1)]
        edges += [(idx(i, j), idx(i + 1, j)) for i in range(R - 1) for j in range(C)]
        outer = tuple(idx(i, j) for i in range(R) for j in range(C) if i in (0, R - 1) or j in (0, C - 1))
        bnd = outer if R >= 3 and C >= 3 else (0,)
        return Graph(name, R * C, edges, bnd)
    raise ValueError(f"unknown graph {name!r}")


def _components(n: int, edges, wired=()):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    for a in wired[1:]:
        parent[find(a)] = find(wired[0])
    return find


def potts_coupling_check(G: Graph, q: int, beta=None, p=None) -> dict:
    """Exact enumeration of Potts and random-cluster models on G.

    Checks mu0[s_x = s_y] = 1/q + (1 - 1/q) phi0[x <-> y] for every pair, and
    with the boundary set wired and spins fixed to 0 there,
    mu^0[s_x = 0] = 1/q + (1 - 1/q) phi1[x <-> boundary].  ``p`` may be a
    Fraction, in which case all arithmetic is exact.
    """
    if int(q) != q or q < 1:
        raise ValueError("q must be a positive integer")
    q = int(q)
    if len(G.edges) > 16:
        raise ValueError("at most 16 edges")
    if p is None:
        if beta is None:
            raise ValueError("need beta or p")
        p = -math.expm1(-beta)
    one = Fraction(1) if isinstance(p, Fraction) else 1.0
    ew = one / (one - p) if p != 1 else None  # e^beta
    n = G.n_vertices
    pairs = list(combinations(range(n), 2))
    E = len(G.edges)

    # Potts, free and boundary-fixed
    Zf = 0 * one
    same = {pr: 0 * one for pr in pairs}
    Zb = 0 * one
    hit = [0 * one] * n
    for sigma in product(range(q), repeat=n):
        w = one
        for a, b in G.edges:
            if sigma[a] == sigma[b]:
                w = w * ew
        Zf += w
        for pr in pairs:
            if sigma[pr[0]] == sigma[pr[1]]:
                same[pr] += w
        if all(sigma[b] == 0 for b in G.boundary):
            Zb += w
            hit = [hit[x] + (w if sigma[x] == 0 else 0) for x in range(n)]

    # random cluster, free and wired
    Rf = 0 * one
    conn = {pr: 0 * one for pr in pairs}
    Rw = 0 * one
    to_b = [0 * one] * n
    for mask in range(1 << E):
        open_e = [G.edges[i] for i in range(E) if mask >> i & 1]
        o = len(open_e)
        base = p ** o * (one - p) ** (E - o)
        find = _components(n, open_e)
        k = len({find(v) for v in range(n)})
        w = base * q ** k
        Rf += w
        for pr in pairs:
            if find(pr[0]) == find(pr[1]):
                conn[pr] += w
        findw = _components(n, open_e, G.boundary)
        kw = len({findw(v) for v in range(n)})
        ww = base * q ** kw
        Rw += ww
        broot = findw(G.boundary[0])
        to_b = [to_b[x] + (ww if findw(x) == broot else 0) for x in range(n)]

    free_rows = []
    max_err = 0 * one
    for pr in pairs:
        mu = same[pr] / Zf
        phi = conn[pr] / Rf
        coupled = one / q + (one - one / q) * phi
        printed = one / q + phi
        err = abs(mu - coupled)
        max_err = max(max_err, err)
        free_rows.append({"x": pr[0], "y": pr[1], "mu": mu, "phi": phi, "coupling_form": coupled,
                          "naive_form": printed, "abs_err": err})
    wired_rows = []
    max_err_w = 0 * one
    for x in range(n):
        mu = hit[x] / Zb
        phi = to_b[x] / Rw
        coupled = one / q + (one - one / q) * phi
        err = abs(mu - coupled)
        max_err_w = max(max_err_w, err)
        wired_rows.append({"x": x, "mu": mu, "phi": phi, "coupling_form": coupled,
                           "naive_form": one / q + phi, "abs_err": err})
    return {
        "graph": G.name,
        "q": q,
        "p": p,
        "boundary": list(G.boundary),
        "free": free_rows,
        "wired": wired_rows,
        "max_abs_err_free": max_err,
        "max_abs_err_wired": max_err_w,
    }
