"""Acceptance criteria 1-13, one PASS/FAIL line each.

Run directly (``python3 tests/test_acceptance.py``) for the summary alone, or
through pytest, where each criterion is its own test and the line is printed
to the terminal regardless of capture.
"""
from __future__ import annotations

import math
import sys

import numpy as np
import pytest

from vertexlab import bethe, closedform, continuum, fkloop, icelab, kernel, xfermat
from vertexlab.suites import eigenvector_residual

Q10 = kernel.params_from_q(10.0)


def decreasing(seq) -> bool:
    return all(b < a for a, b in zip(seq, seq[1:]))


def crit_01():
    worst = 0.0
    for q in (5.0, 10.0):
        p = kernel.params_from_q(q)
        for N in (8, 12, 16):
            for r in (0, 1, 2):
                lb = bethe.eigenvalue(bethe.solve(N, r, p.Delta), p)
                pf = xfermat.pf_eigenvalue(xfermat.block_for(N, N // 2 - r, p.c)).value
                worst = max(worst, abs(lb / pf - 1.0))
    return worst <= 1e-10, f"max |Lambda_bethe/Lambda_PF - 1| = {worst:.2e} (tol 1e-10)"


def crit_02():
    res = eigenvector_residual(8, 0, Q10)
    return res <= 1e-9, f"|V psi - Lambda psi|/|psi| = {res:.2e} (tol 1e-9)"


def crit_03():
    worst = 0.0
    for N, M in ((2, 2), (2, 4), (4, 2)):
        for c in (2.2, 3.0, 5.0):
            tr = xfermat.trace_power(N, M, c, "full")
            z = icelab.enumerate_torus(N, M, c).Z
            worst = max(worst, abs(tr / z - 1.0))
    return worst <= 1e-12, f"max relative trace/enumeration gap = {worst:.2e} (tol 1e-12)"


def crit_04():
    worst, ineq = 0.0, True
    for N, M in ((2, 2), (2, 4)):
        for q in (5.0, 10.0):
            rep = fkloop.correspondence_check(N, M, kernel.params_from_q(q))
            worst = max(worst, rep["rel_err_i"])
            ineq &= rep["ok_ii"] and rep["ok_iii_r1"] and rep["ok_iii_r2"]
    return worst <= 1e-12 and ineq, f"identity rel err = {worst:.2e} (tol 1e-12), inequalities hold: {ineq}"


def crit_05():
    counts, ok = [], True
    for N, M in ((2, 2), (2, 4)):
        cfgs = list(fkloop.all_configurations(N, M))
        counts.append(len(cfgs))
        ok &= all(2 * c.k == c.ell - c.o + 2 * c.s + N * M // 2 for c in cfgs)
    ok &= counts == [16, 256]
    return ok, f"configurations checked {counts}, all satisfy 2k = l - o + 2s + NM/2: {ok}"


def crit_06():
    f = closedform.free_energy(Q10).value
    gaps = [abs(bethe.free_energy_estimate(N, Q10) - f) for N in (64, 128, 256)]
    ok = decreasing(gaps) and gaps[-1] <= 1e-2
    return ok, "gaps N=64,128,256: " + ", ".join(f"{g:.2e}" for g in gaps) + " (tol 1e-2 at 256)"


def crit_07():
    R = closedform.inverse_corr_length(Q10).value
    logs = {N: bethe.ratio_log(N, 1, Q10) for N in (64, 128, 256, 512)}
    rel = [abs(logs[N] + R) / R for N in (64, 128, 256, 512)]
    r2 = bethe.ratio_log(512, 2, Q10)
    lin = abs(r2 - 2 * logs[512]) / abs(2 * logs[512])
    ok = decreasing(rel) and rel[-1] <= 0.02 and lin <= 0.05
    return ok, ("rel err N=64..512: " + ", ".join(f"{x:.3g}" for x in rel)
                + f" (tol 2%); linearity at 512: {lin:.3g} (tol 5%)")


def crit_08():
    worst = 0.0
    for q in (4.5, 5.0, 10.0, 25.0):
        p = kernel.params_from_q(q)
        a = closedform.inverse_corr_length(p, 1e-16, "tanh").value
        b = closedform.inverse_corr_length(p, 1e-16, "sinh").value
        worst = max(worst, abs(a - b))
    ratios = [float(closedform.inverse_corr_length_q(q).value / closedform.asymptotic_inverse_corr_length(q))
              for q in ("4.1", "4.01", "4.001")]
    mono = decreasing([abs(1 - x) for x in ratios])
    ok = worst <= 1e-12 and mono and abs(ratios[-1] - 1) <= 0.05
    return ok, (f"series gap {worst:.2e} (tol 1e-12); asymptotic ratios "
                + ", ".join(f"{x:.5f}" for x in ratios) + " (within 5% at 4.001, monotone)")


def crit_09():
    cbe = coe = four = 0.0
    for q in (5.0, 10.0, 25.0):
        p = kernel.params_from_q(q)
        a, b = continuum.sup_residuals(p, 2048)
        cbe, coe = max(cbe, a), max(coe, b)
        four = max(four, continuum.fourier_max_error(p, 16))
    ok = cbe <= 1e-8 and coe <= 1e-8 and four <= 1e-8
    return ok, f"sup cBE {cbe:.2e}, sup cOE {coe:.2e}, Fourier {four:.2e} (tol 1e-8)"


def crit_10():
    parts, ok = [], True
    for r in (0, 1):
        vals = [N * bethe.norm_distance(bethe.solve(N, r, Q10.Delta), Q10) for N in (32, 64, 128, 256)]
        ratio = max(vals) / min(vals)
        ok &= ratio <= 4
        parts.append(f"r={r}: max/min of N*norm = {ratio:.3f}")
    return ok, "; ".join(parts) + " (tol 4)"


def crit_11():
    parts, ok = [], True
    for r in (1, 2):
        errs = [bethe.offset_check(N, r, Q10) for N in (64, 128, 256, 512)]
        ok &= decreasing(errs)
        parts.append(f"r={r}: " + ", ".join(f"{e:.3f}" for e in errs))
    return ok, "sup errors N=64..512 " + "; ".join(parts) + " (decreasing)"


def crit_12():
    worst_b = worst_l = 0.0
    for N, r in ((8, 1), (8, 2), (12, 1), (12, 2)):
        _, lm, bound = xfermat.v_infinity_block(N, N // 2 - r)
        worst_b = max(worst_b, abs(lm - bound))
        scaled = bethe.scaled_eigenvalue(bethe.solve(N, r, -1e6))
        worst_l = max(worst_l, abs(scaled / bethe.limit_eigenvalue(N, r) - 1.0))
    ok = worst_b <= 1e-10 and worst_l <= 1e-4
    return ok, f"|lambda_max - bound| = {worst_b:.2e} (tol 1e-10); limit eigenvalue rel err {worst_l:.2e} (tol 1e-4)"


def crit_13():
    rep = fkloop.potts_coupling_check(fkloop.make_graph("grid2x2"), 3, beta=math.log(1 + math.sqrt(3)))
    err = rep["max_abs_err_free"]
    n_pairs = len(rep["free"])
    return err <= 1e-13 and n_pairs == 6, f"max abs err over {n_pairs} pairs = {err:.2e} (tol 1e-13)"


CRITERIA = [
    (1, "Bethe vs exact diagonalization", crit_01),
    (2, "eigenvector residual", crit_02),
    (3, "trace vs enumeration", crit_03),
    (4, "random-cluster / six-vertex identity", crit_04),
    (5, "Euler relation", crit_05),
    (6, "free energy convergence", crit_06),
    (7, "correlation length convergence", crit_07),
    (8, "series identity and asymptotics", crit_08),
    (9, "continuum residuals", crit_09),
    (10, "root density regularity", crit_10),
    (11, "offset convergence", crit_11),
    (12, "Delta -> -inf bound and limit", crit_12),
    (13, "Edwards-Sokal coupling", crit_13),
]


def line(num, title, ok, detail) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {title}: {detail}"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        failures += not ok
        print(line(num, title, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
