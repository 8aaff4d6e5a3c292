"""Command-line front end: ``vertexlab <command> [options]``.

Every command prints a JSON run report (or CSV for ``convergence``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import _json, bethe, closedform, continuum, fkloop, icelab, kernel, suites, xfermat


def _workers() -> int:
    raw = os.environ.get("VERTEXLAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _params(args) -> kernel.ModelParams:
    if getattr(args, "q", None) is not None:
        return kernel.params_from_q(args.q)
    if getattr(args, "c", None) is not None:
        return kernel.params_from_c(args.c)
    if getattr(args, "Delta", None) is not None:
        return kernel.params_from_delta(args.Delta)
    raise ValueError("one of --q, --c, --Delta is required")


def _add_model(p, delta=False):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--q", type=float, help="cluster weight, q > 4")
    g.add_argument("--c", type=float, help="six-vertex weight c > 2")
    if delta:
        g.add_argument("--Delta", type=float, help="anisotropy Delta < -1")


def _report(command, params, results, checks=(), started=0.0) -> dict:
    return {
        "command": command,
        "params": params.to_json() if isinstance(params, kernel.ModelParams) else params,
        "results": results,
        "checks": [c.as_dict() for c in checks],
        "elapsed_ms": (time.perf_counter() - started) * 1e3,
    }


def _emit(report: dict, out) -> None:
    text = _json.dumps(report) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _series(sv) -> dict:
    return {"value": sv.value, "terms_used": sv.terms_used, "tail_bound": sv.tail_bound, "method": sv.method}


# -- commands -------------------------------------------------------------------

def cmd_params(args, t0):
    return _report("params", _params(args), {}, started=t0)


def cmd_corrlen(args, t0):
    if args.q_exact is not None:
        sv = closedform.inverse_corr_length_q(args.q_exact, args.tol)
        res = _series(sv)
        res["asymptotic"] = closedform.asymptotic_inverse_corr_length(args.q_exact)
        return _report("corrlen", {"q": args.q_exact}, res, started=t0)
    p = _params(args)
    sv = closedform.inverse_corr_length(p, args.tol, args.series)
    res = _series(sv)
    res["xi"] = 1.0 / float(sv.value)
    return _report("corrlen", p, res, started=t0)


def cmd_free_energy(args, t0):
    p = _params(args)
    return _report("free-energy", p, _series(closedform.free_energy(p, args.tol)), started=t0)


def cmd_bethe_solve(args, t0):
    p = _params(args)
    roots = bethe.solve(args.N, args.r, p.Delta, tol=args.tol)
    res = {"roots": roots.to_json(), "log_eigenvalue": bethe.log_eigenvalue(roots, p)}
    if args.roots_out:
        with open(args.roots_out, "w") as fh:
            fh.write(_json.dumps(roots.to_json()) + "\n")
    return _report("bethe-solve", p, res, started=t0)


def cmd_bethe_eig(args, t0):
    with open(args.roots) as fh:
        roots = bethe.BetheRoots.from_json(json.load(fh))
    p = kernel.params_from_delta(roots.Delta)
    res = {"N": roots.N, "r": roots.r, "log_eigenvalue": bethe.log_eigenvalue(roots, p)}
    res["eigenvalue"] = math.exp(res["log_eigenvalue"]) if res["log_eigenvalue"] < 700 else None
    return _report("bethe-eig", p, res, started=t0)


def cmd_xfer_eig(args, t0):
    p = _params(args)
    n = args.n if args.n is not None else args.N // 2 - args.r
    blk = xfermat.block_for(args.N, n, p.c)
    pf = xfermat.pf_eigenvalue(blk)
    if args.dump_matrix:
        if blk.matrix is None:
            raise ValueError("block is matrix-free at this size; nothing to dump")
        xfermat.dump_matrix(blk, args.dump_matrix)
    res = {"N": args.N, "n": n, "dim": blk.dim, "nnz": blk.nnz, "eigenvalue": pf.value,
           "residual": pf.residual, "iterations": pf.iterations}
    return _report("xfer-eig", p, res, started=t0)


def cmd_enumerate(args, t0):
    p = _params(args)
    en = icelab.enumerate_torus(args.N, args.M, p.c)
    res = {"N": args.N, "M": args.M, "Z": en.Z, "Z_by_r": {str(k): v for k, v in en.Z_by_r.items()},
           "exponent_histogram": {str(k): v for k, v in en.exponent_histogram().items()}}
    return _report("enumerate", p, res, started=t0)


def cmd_rc_correspond(args, t0):
    p = _params(args)
    rep = fkloop.correspondence_check(args.N, args.M, p)
    checks = [
        suites.below("relative error of identity (i)", rep["rel_err_i"], args.tol),
        suites.truth("inequality (ii)", rep["ok_ii"]),
        suites.truth("inequality (iii) r=1", rep["ok_iii_r1"]),
        suites.truth("inequality (iii) r=2", rep["ok_iii_r2"]),
        suites.truth("Euler relation", rep["per_config_euler_ok"]),
    ]
    return _report("rc-correspond", p, rep, checks, started=t0)


def cmd_coupling_check(args, t0):
    G = fkloop.make_graph(args.graph)
    q = int(args.q)
    beta = math.log(1 + math.sqrt(q)) if args.beta == "crit" else float(args.beta)
    rep = fkloop.potts_coupling_check(G, q, beta=beta)
    rep["beta"] = beta
    checks = [suites.below("free coupling identity", rep["max_abs_err_free"], args.tol),
              suites.below("wired coupling identity", rep["max_abs_err_wired"], args.tol)]
    return _report("coupling-check", {"q": q, "beta": beta, "graph": G.name}, rep, checks, started=t0)


def cmd_continuum_report(args, t0):
    p = _params(args)
    rep = continuum.continuum_report(p.q, args.grid)
    lhs, rhs = continuum.parseval_PR(p)
    rep["parseval_lhs"], rep["parseval_rhs"] = lhs, rhs
    rep["free_energy"] = closedform.free_energy(p).value
    return _report("continuum-report", p, rep, started=t0)


def _convergence_row(kind, N, r, p, f, R):
    if kind == "free-energy":
        return bethe.free_energy_estimate(N, p), f
    if kind == "ratio":
        return bethe.ratio_log(N, r, p), -r * R
    if kind == "offset":
        return bethe.offset_check(N, r, p), 0.0
    if kind == "norm":
        return bethe.norm_distance(bethe.solve(N, r, p.Delta), p), 0.0
    raise ValueError(kind)


def cmd_convergence(args, t0):
    p = _params(args)
    f = closedform.free_energy(p).value
    R = float(closedform.inverse_corr_length(p).value)
    Ns = [int(x) for x in args.Ns.split(",")]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("--Ns must be ascending")

    def job(N):
        try:
            return _convergence_row(args.kind, N, args.r, p, f, R)
        except (bethe.BetheSolveError, ValueError) as exc:
            print(f"N={N}: {exc}", file=sys.stderr)
            return None

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rows = list(pool.map(job, Ns))
    failed = any(r is None for r in rows)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "value", "target", "abs_error"])
        target = {"free-energy": f, "ratio": -args.r * R}.get(args.kind, 0.0)
        for N, row in zip(Ns, rows):
            if row is None:
                w.writerow([N, "", format(target, ".17g"), ""])
            else:
                v, tg = row
                w.writerow([N, format(v, ".17g"), format(tg, ".17g"), format(abs(v - tg), ".17g")])
        return buf.getvalue(), failed
    data = [{"N": N, "value": None if row is None else row[0], "target": None if row is None else row[1],
             "abs_error": None if row is None else abs(row[0] - row[1])} for N, row in zip(Ns, rows)]
    return _report("convergence", p, {"kind": args.kind, "r": args.r, "rows": data}, started=t0), failed


def cmd_verify(args, t0):
    tols = {k: getattr(args, "tol_" + k.replace("-", "_")) for k in suites.DEFAULT_TOLS}
    tols = {k: v for k, v in tols.items() if v is not None}
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        parts = list(pool.map(lambda s: suites.run(s, tols), names))
    checks = [c for part in parts for c in part]
    res = {"suite": args.suite, "passed": sum(c.passed for c in checks), "total": len(checks)}
    return _report("verify", {"tolerances": {**suites.DEFAULT_TOLS, **tols}}, res, checks, started=t0)


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vertexlab", description="Six-vertex / random-cluster numerics on the torus.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, model=True, delta=False):
        p = sub.add_parser(name, help=help_)
        if model:
            _add_model(p, delta)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.set_defaults(func=fn)
        return p

    add("params", cmd_params, "derived parameters c, Delta, lambda", delta=True)
    p = add("corrlen", cmd_corrlen, "inverse correlation length")
    p.add_argument("--q-exact", help="q as a decimal string, evaluated in extended precision")
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--series", choices=("auto", "tanh", "sinh"), default="auto")
    p = add("free-energy", cmd_free_energy, "six-vertex free energy per site")
    p.add_argument("--tol", type=float, default=1e-15)
    p = add("bethe-solve", cmd_bethe_solve, "solve the symmetric Bethe equations", delta=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--roots-out", help="also save the roots as JSON")
    p = add("bethe-eig", cmd_bethe_eig, "eigenvalue from saved roots", model=False)
    p.add_argument("--roots", required=True)
    p = add("xfer-eig", cmd_xfer_eig, "Perron-Frobenius eigenvalue of a transfer-matrix block")
    p.add_argument("--N", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int)
    g.add_argument("--r", type=int, default=0)
    p.add_argument("--dump-matrix", help="write the block in coordinate form")
    p = add("enumerate", cmd_enumerate, "brute-force torus partition function")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p = add("rc-correspond", cmd_rc_correspond, "random-cluster vs six-vertex identities")
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-12)
    p = add("coupling-check", cmd_coupling_check, "Potts / random-cluster coupling", model=False)
    p.add_argument("--graph", default="grid2x2")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--beta", default="crit", help="'crit' or a number")
    p.add_argument("--tol", type=float, default=1e-13)
    p = add("continuum-report", cmd_continuum_report, "continuum residuals and Fourier checks")
    p.add_argument("--grid", type=int, default=2048)
    p = add("convergence", cmd_convergence, "finite-N convergence table")
    p.add_argument("--kind", choices=("free-energy", "ratio", "offset", "norm"), required=True)
    p.add_argument("--Ns", default="64,128,256")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p = add("verify", cmd_verify, "run a verification suite", model=False)
    p.add_argument("--suite", choices=("all",) + suites.SUITES, default="all")
    for key, val in suites.DEFAULT_TOLS.items():
        p.add_argument(f"--tol-{key}", type=float, default=None, help=f"default {val:g}")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        out = args.func(args, t0)
    except bethe.BetheSolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    failed = False
    if isinstance(out, tuple):
        out, failed = out
    if isinstance(out, str):
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out)
        return 1 if failed else 0
    _emit(out, args.out)
    if failed or not all(c["pass"] for c in out["checks"]):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
