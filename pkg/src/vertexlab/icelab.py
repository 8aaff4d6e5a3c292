"""Brute-force six-vertex partition functions on tiny tori.

Edges of the N x M torus: vertical edge v[i][j] sits above vertex (i, j)
(row i, column j) and horizontal edge h[i][j] sits left of vertex (i, j).
Bits are 1 for up / right arrows.  Enumeration runs row by row and drops a
partial assignment as soon as a completed vertex breaks the ice rule.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

# vertex types indexed by (left, right, below, above) arrow bits
_TYPE = {
    (1, 1, 1, 1): 1,
    (0, 0, 0, 0): 2,
    (1, 1, 0, 0): 3,
    (0, 0, 1, 1): 4,
    (1, 0, 0, 1): 5,  # horizontals point in, verticals point out
    (0, 1, 1, 0): 6,  # horizontals point out, verticals point in
}

MAX_EDGES = 24


def in_count(left: int, right: int, below: int, above: int) -> int:
    return left + (1 - right) + below + (1 - above)


def vertex_type(left: int, right: int, below: int, above: int) -> int:
    """Type 1..6 of an ice vertex, 0 for the ten non-ice patterns."""
    return _TYPE.get((left, right, below, above), 0)


@dataclass
class Enumeration:
    N: int
    M: int
    c: float
    Z: float
    Z_by_r: dict
    histogram: dict  # (r, exponent of c) -> number of configurations

    def exponent_histogram(self) -> dict:
        out: Counter = Counter()
        for (_, e), k in self.histogram.items():
            out[e] += k
        return dict(sorted(out.items()))


def _row_transitions(N: int):
    """For each (below, above) row pair: Counter of c-exponents over valid horizontals."""
    table = {}
    for below in range(1 << N):
        for above in range(1 << N):
            hist: Counter = Counter()
            for hor in range(1 << N):
                e = 0
                for j in range(N):
                    left = hor >> j & 1
                    right = hor >> ((j + 1) % N) & 1
                    t = vertex_type(left, right, below >> j & 1, above >> j & 1)
                    if t == 0:
                        break
                    e += t >= 5
                else:
                    hist[e] += 1
            if hist:
                table[(below, above)] = hist
    return table


def enumerate_torus(N: int, M: int, c: float) -> Enumeration:
    """Z = sum over ice configurations of c^(n5+n6), split by row up-arrow count."""
    if 2 * N * M > MAX_EDGES:
        raise ValueError(f"2NM = {2 * N * M} edges exceeds the enumeration budget {MAX_EDGES}")
    if N < 1 or M < 1:
        raise ValueError("N, M must be positive")
    table = _row_transitions(N)
    succ: dict = {}
    for (b, a), hist in table.items():
        succ.setdefault(b, []).append((a, hist))
    hist_all: Counter = Counter()
    for start in range(1 << N):
        # rows of vertical edges v[M-1] (= start), v[0], ..., v[M-1]
        frontier = Counter({(start, 0): 1})
        for _ in range(M):
            nxt: Counter = Counter()
            for (below, e0), k in frontier.items():
                for above, hist in succ.get(below, ()):
                    for e, m in hist.items():
                        nxt[(above, e0 + e)] += k * m
            frontier = nxt
        n = bin(start).count("1")
        r = N // 2 - n
        for (end, e), k in frontier.items():
            if end == start:
                hist_all[(r, e)] += k
    Z_by_r: dict = {}
    for (r, e), k in sorted(hist_all.items()):
        Z_by_r[r] = Z_by_r.get(r, 0.0) + k * float(c) ** e
    Z = sum(k * float(c) ** e for (_, e), k in sorted(hist_all.items()))
    return Enumeration(N, M, c, Z, dict(sorted(Z_by_r.items())), dict(sorted(hist_all.items())))


enumerate = enumerate_torus  # noqa: A001
