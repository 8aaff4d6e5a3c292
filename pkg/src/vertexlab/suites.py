"""Verification batteries behind ``vertexlab verify``.

Each suite returns a list of :class:`Check`.  Thresholds come from
:data:`DEFAULT_TOLS` and can be overridden per key.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bethe, closedform, continuum, fkloop, icelab, kernel, xfermat

DEFAULT_TOLS = {
    "kernel": 1e-12,
    "fd": 1e-8,
    "cBE": 1e-8,
    "cOE": 1e-8,
    "fourier": 1e-8,
    "parseval": 1e-9,
    "bethe": 1e-10,
    "eigvec": 1e-9,
    "free-energy": 1e-2,
    "ratio": 2e-2,
    "linearity": 5e-2,
    "norm-ratio": 4.0,
    "trace": 1e-12,
    "vinf": 1e-10,
    "limit": 1e-4,
    "corr": 1e-12,
    "coupling": 1e-13,
    "series": 1e-12,
    "asym": 5e-2,
}

SUITES = ("kernel", "continuum", "bethe", "xfer", "correspondence", "coupling", "closedform")


@dataclass
class Check:
    name: str
    value: float
    target: float | None
    tol: float | None
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "target": self.target, "tol": self.tol, "pass": bool(self.passed)}


def close(name, value, target, tol, rel=False) -> Check:
    err = abs(value - target)
    if rel:
        err /= abs(target)
    return Check(name, float(value), float(target), tol, bool(err <= tol))


def below(name, value, tol) -> Check:
    return Check(name, float(value), None, tol, bool(value <= tol))


def truth(name, ok: bool, value=None) -> Check:
    return Check(name, float(ok) if value is None else value, 1.0, None, bool(ok))


def decreasing(seq) -> bool:
    return all(b < a for a, b in zip(seq, seq[1:]))


def suite_kernel(t: dict) -> list:
    out = []
    rng = np.random.default_rng(7)
    for q in (5.0, 10.0):
        p = kernel.params_from_q(q)
        out.append(close(f"cosh(lambda)=sqrt(q)/2 q={q}", math.cosh(p.lambda_), math.sqrt(q) / 2, t["kernel"], rel=True))
        back = kernel.params_from_c(p.c)
        out.append(close(f"q->c->q q={q}", back.q, q, t["kernel"], rel=True))
        x, y = rng.uniform(-math.pi, math.pi, (2, 50))
        D = p.Delta
        anti = np.max(np.abs(kernel.theta(D, x, y) + kernel.theta(D, y, x)))
        out.append(below(f"theta antisymmetric q={q}", anti, t["kernel"]))
        per = np.max(np.abs(kernel.theta(D, x + 2 * math.pi, y) - kernel.theta(D, x, y) + 2 * math.pi))
        out.append(below(f"theta(x+2pi,y)-theta(x,y)=-2pi q={q}", per, t["kernel"]))
        h = 1e-5
        fd1 = (kernel.theta(D, x + h, y) - kernel.theta(D, x - h, y)) / (2 * h)
        fd2 = (kernel.theta(D, x, y + h) - kernel.theta(D, x, y - h)) / (2 * h)
        err = max(np.max(np.abs(fd1 - kernel.d1_theta(D, x, y))), np.max(np.abs(fd2 - kernel.d2_theta(D, x, y))))
        out.append(below(f"theta derivatives vs finite differences q={q}", err, t["fd"]))
        a = rng.uniform(-math.pi, math.pi, 50)
        rt = np.max(np.abs(kernel.k_inverse(p.lambda_, kernel.k_map(p.lambda_, a)) - a))
        out.append(below(f"k_inverse(k(a))=a q={q}", rt, t["kernel"]))
        out.append(close(f"k(pi)=pi q={q}", kernel.k_map(p.lambda_, math.pi), math.pi, t["kernel"]))
    out.append(close("theta(0.3,-0.2) at Delta=-1e9", kernel.theta(-1e9, 0.3, -0.2), -0.5, 1e-6))
    return out


def suite_continuum(t: dict, grid: int = 2048) -> list:
    out = []
    for q in (5.0, 10.0, 25.0):
        p = kernel.params_from_q(q)
        cbe, coe = continuum.sup_residuals(p, grid)
        out.append(below(f"sup cBE residual q={q} grid={grid}", cbe, t["cBE"]))
        out.append(below(f"sup cOE residual q={q} grid={grid}", coe, t["cOE"]))
        out.append(below(f"Fourier identities |m|<=16 q={q}", continuum.fourier_max_error(p), t["fourier"]))
        lhs, rhs = continuum.parseval_PR(p)
        out.append(close(f"Parseval P*R q={q}", lhs, rhs, t["parseval"]))
    return out


def suite_bethe(t: dict, full: bool = True) -> list:
    out = []
    sizes = (8, 12, 16) if full else (8, 12)
    for q in (5.0, 10.0):
        p = kernel.params_from_q(q)
        for N in sizes:
            for r in (0, 1, 2):
                lb = bethe.eigenvalue(bethe.solve(N, r, p.Delta), p)
                pf = xfermat.pf_eigenvalue(xfermat.block_for(N, N // 2 - r, p.c)).value
                out.append(close(f"Bethe vs PF N={N} r={r} q={q}", lb / pf, 1.0, t["bethe"]))
    p = kernel.params_from_q(10.0)
    out.append(below("eigenvector residual N=8 n=4 q=10", eigenvector_residual(8, 0, p), t["eigvec"]))
    f = closedform.free_energy(p).value
    gaps = [abs(bethe.free_energy_estimate(N, p) - f) for N in (64, 128, 256)]
    out.append(truth("free-energy gap decreasing N=64..256", decreasing(gaps)))
    out.append(below("free-energy gap N=256", gaps[-1], t["free-energy"]))
    R = closedform.inverse_corr_length(p).value
    rel = [abs(bethe.ratio_log(N, 1, p) + R) / R for N in (64, 128, 256, 512)]
    out.append(truth("ratio error decreasing N=64..512", decreasing(rel)))
    out.append(below("ratio relative error N=512", rel[-1], t["ratio"]))
    r1 = bethe.ratio_log(512, 1, p)
    r2 = bethe.ratio_log(512, 2, p)
    out.append(below("linearity in r N=512", abs(r2 - 2 * r1) / abs(2 * r1), t["linearity"]))
    for r in (0, 1):
        vals = [N * bethe.norm_distance(bethe.solve(N, r, p.Delta), p) for N in (32, 64, 128, 256)]
        out.append(below(f"N*norm max/min r={r}", max(vals) / min(vals), t["norm-ratio"]))
    for r in (1, 2):
        errs = [bethe.offset_check(N, r, p) for N in (64, 128, 256, 512)]
        out.append(truth(f"offset error decreasing r={r}", decreasing(errs), errs[-1]))
    return out


def eigenvector_residual(N: int, r: int, p) -> float:
    roots = bethe.solve(N, r, p.Delta)
    lam = bethe.eigenvalue(roots, p)
    _, psi = bethe.eigenvector(roots, p)
    V = xfermat.build_block(N, N // 2 - r, p.c).matrix
    return float(np.linalg.norm(V @ psi - lam * psi) / np.linalg.norm(psi))


def suite_xfer(t: dict) -> list:
    out = []
    for N, M in ((2, 2), (2, 4), (4, 2)):
        for c in (2.2, 3.0, 5.0):
            tr = xfermat.trace_power(N, M, c, "full")
            z = icelab.enumerate_torus(N, M, c).Z
            out.append(close(f"full trace vs enumeration N={N} M={M} c={c}", tr / z, 1.0, t["trace"]))
    for N, r in ((8, 1), (8, 2), (12, 1), (12, 2)):
        _, lm, bound = xfermat.v_infinity_block(N, N // 2 - r)
        out.append(close(f"V_inf lambda_max = bound N={N} r={r}", lm, bound, t["vinf"]))
        scaled = bethe.scaled_eigenvalue(bethe.solve(N, r, -1e6))
        out.append(close(f"Bethe limit eigenvalue N={N} r={r}", scaled / bound, 1.0, t["limit"]))
    c = kernel.params_from_q(10.0).c
    for n in (2, 3):
        a = xfermat.pf_eigenvalue(xfermat.build_block(10, n, c)).value
        b = xfermat.pf_eigenvalue(xfermat.build_block(10, 10 - n, c)).value
        out.append(close(f"arrow-flip symmetry N=10 n={n}", a / b, 1.0, 1e-12))
    return out


def suite_correspondence(t: dict) -> list:
    out = []
    for N, M in ((2, 2), (2, 4)):
        for q in (5.0, 10.0):
            rep = fkloop.correspondence_check(N, M, kernel.params_from_q(q))
            out.append(below(f"correspondence (i) N={N} M={M} q={q}", rep["rel_err_i"], t["corr"]))
            out.append(truth(f"correspondence (ii) N={N} M={M} q={q}", rep["ok_ii"]))
            out.append(truth(f"correspondence (iii) r=1 N={N} M={M} q={q}", rep["ok_iii_r1"]))
            out.append(truth(f"correspondence (iii) r=2 N={N} M={M} q={q}", rep["ok_iii_r2"]))
            out.append(truth(f"Euler relation all configs N={N} M={M}", rep["per_config_euler_ok"]))
    return out


def suite_coupling(t: dict) -> list:
    q = 3
    beta = math.log(1 + math.sqrt(q))
    rep = fkloop.potts_coupling_check(fkloop.make_graph("grid2x2"), q, beta=beta)
    out = [below("coupling free identity grid2x2 q=3 beta_c", rep["max_abs_err_free"], t["coupling"])]
    out.append(below("coupling wired identity grid2x2 q=3 beta_c", rep["max_abs_err_wired"], t["coupling"]))
    return out


def suite_closedform(t: dict) -> list:
    out = []
    for q in (4.5, 5.0, 10.0, 25.0):
        p = kernel.params_from_q(q)
        a = closedform.inverse_corr_length(p, 1e-16, "tanh").value
        b = closedform.inverse_corr_length(p, 1e-16, "sinh").value
        out.append(close(f"tanh vs sinh series q={q}", a, b, t["series"]))
    ratios = []
    for q in ("4.1", "4.01", "4.001"):
        v = closedform.inverse_corr_length_q(q).value
        ratios.append(float(v / closedform.asymptotic_inverse_corr_length(q)))
    out.append(truth("asymptotic ratio monotone toward 1", decreasing([abs(1 - x) for x in ratios])))
    out.append(close("asymptotic ratio q=4.001", ratios[-1], 1.0, t["asym"]))
    ladder = [closedform.inverse_corr_length(kernel.params_from_q(q)).value for q in (4.5, 5, 6, 8, 10, 20)]
    out.append(truth("inverse correlation length increasing in q", all(b > a for a, b in zip(ladder, ladder[1:]))))
    out.append(truth("positivity at q=4+1e-8", closedform.inverse_corr_length_q("4.00000001").value > 0))
    return out


def run(suite: str, tols: dict | None = None) -> list:
    t = dict(DEFAULT_TOLS)
    if tols:
        t.update(tols)
    table = {
        "kernel": suite_kernel,
        "continuum": suite_continuum,
        "bethe": suite_bethe,
        "xfer": suite_xfer,
        "correspondence": suite_correspondence,
        "coupling": suite_coupling,
        "closedform": suite_closedform,
    }
    if suite == "all":
        out = []
        for name in SUITES:
            out.extend(table[name](t))
        return out
    if suite not in table:
        raise KeyError(suite)
    return table[suite](t)
