"""Command-line interface: ``heunlim <command> [options]``.

Commands
--------
solve          time-and-band limiting spectra, direct and through M
verify         run invariant suites (all, orthopoly, heun, algebra, limiting)
kernel         discrete kernel, all three routes
spectrum       V1 and M spectra with the clustering diagnostic
heun-action    tridiagonal action of M on Jacobi polynomials, degree raising
algebra-check  closure fits for the Jacobi, Hahn, Racah and cubic algebras

Output is JSON ``{config, results, residuals, timings, version}`` or CSV
rows ``series,index,value``. Exit status: 0 ok, 2 bad input, 3 tolerance
failure, 4 solver non-convergence.
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

import numpy as np

from . import __version__, algebra, heun, limiting, operators, orthopoly, suites
from .linalg import ConvergenceError

EXIT_OK, EXIT_INPUT, EXIT_TOL, EXIT_CONVERGENCE = 0, 2, 3, 4


class InputError(ValueError):
    pass


# -- serialization -------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _jsonable(obj):
    """Convert numpy containers to lists; floats are kept exact for ``_dump``."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _dump(obj, indent=0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return json.dumps(str(obj))
        return _fmt(obj)
    return json.dumps(obj)


def _flatten(obj, prefix=""):
    """Yield ``(series, index, value)`` for every leaf; arrays keep their index."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(not isinstance(v, dict) for v in obj):
        arr = obj
        if all(isinstance(v, list) for v in arr):
            for i, row in enumerate(arr):
                for j, v in enumerate(row):
                    yield prefix, f"{i}:{j}", v
        else:
            for i, v in enumerate(arr):
                yield prefix, str(i), v
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, "", obj


def _csv_value(v):
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return _fmt(v)
    return str(v)


def render(doc: dict, fmt: str) -> str:
    doc = _jsonable(doc)
    if fmt == "json":
        return _dump(doc) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["series", "index", "value"])
    for series, idx, v in _flatten(doc):
        writer.writerow([series, idx, _csv_value(v)])
    return buf.getvalue()


# -- argument handling ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(_dump({"error": {"type": "usage", "message": message}}) + "\n")
        sys.exit(EXIT_INPUT)


def _tol_pair(text):
    key, sep, val = text.partition("=")
    if not sep or key not in suites.DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(
            f"expected NAME=VALUE with NAME in {sorted(suites.DEFAULT_TOLERANCES)}"
        )
    return key, float(val)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=16, help="grid size N (default 16)")
    common.add_argument("--alpha", type=float, default=0.3)
    common.add_argument("--beta", type=float, default=0.7)
    common.add_argument("--j1", type=int, default=None, help="time cut J1 (default N)")
    common.add_argument("--j2", type=int, default=None, help="band cut J2 (default N)")
    common.add_argument("--tau", type=float, nargs=5, metavar=("T0", "T1", "T2", "T3", "T4"))
    common.add_argument("--k", type=int, default=14, help="monomial degree cutoff K")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default="-", help="output path ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed (HEUNLIM_SEED overrides)")
    common.add_argument(
        "--tol",
        type=_tol_pair,
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="override a tolerance; names: " + ", ".join(sorted(suites.DEFAULT_TOLERANCES)),
    )
    common.add_argument("--timings", action="store_true", help="record wall-clock timings")

    parser = _Parser(prog="heunlim", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="limiting spectra, direct and via M")
    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("--suite", choices=("all", *suites.SUITES), default="all")
    sub.add_parser("kernel", parents=[common], help="discrete kernel, three routes")
    sub.add_parser("spectrum", parents=[common], help="V1 and M spectra")
    sub.add_parser("heun-action", parents=[common], help="tridiagonal action table")
    sub.add_parser("algebra-check", parents=[common], help="algebra closure fits")
    return parser


def _config(args) -> dict:
    cfg = {
        "command": args.command,
        "n": args.n,
        "alpha": args.alpha,
        "beta": args.beta,
        "j1": args.n if args.j1 is None else args.j1,
        "j2": args.n if args.j2 is None else args.j2,
        "tau": list(args.tau) if args.tau else None,
        "k": args.k,
        "format": args.format,
        "seed": args.seed,
        "tolerances": dict(suites.DEFAULT_TOLERANCES, **dict(args.tol)),
    }
    if args.command == "verify":
        cfg["suite"] = args.suite
    return cfg


def _tau(cfg, default=(0.25, 0.6, -0.35, 0.8, -0.4)):
    return heun.HeunTau(*(cfg["tau"] or default))


def _hahn(cfg):
    try:
        return orthopoly.HahnParams(cfg["alpha"], cfg["beta"], cfg["n"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _limiting_config(cfg):
    try:
        return limiting.LimitingConfig(_hahn(cfg), cfg["j1"], cfg["j2"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# -- commands --------------------------------------------------------------------


def _cmd_solve(cfg):
    tol = cfg["tolerances"]
    c = _limiting_config(cfg)
    r = limiting.solve(c, commute_tol=tol["commute"])
    results = {
        "v1_eigs_direct": r.v1_eigs_direct,
        "v1_eigs_via_m": r.v1_eigs_via_m,
        "m_eigs": r.m_eigs,
        "condition_diagnostics": r.condition_diagnostics,
        "compared_vectors": r.compared_vectors,
        "fallback_clusters": r.fallback_clusters,
    }
    residuals = {
        "eigenvalue_gap": r.eigenvalue_gap,
        "eigenvector_agreement": r.eigenvector_agreement,
    }
    ok = r.eigenvalue_gap <= tol["eigs"] and r.eigenvector_agreement <= tol["angle"]
    if r.commuting is not None:
        s = r.commuting
        results["tau"] = list(s.tau.as_tuple())
        residuals["commutator_residuals"] = list(s.commutator_residuals)
        residuals["m_norm"] = s.m_norm
        ok = ok and max(s.commutator_residuals) <= tol["commute"] * s.m_norm
    return results, residuals, ok


def _cmd_kernel(cfg):
    c = _limiting_config(cfg)
    k = limiting.kernel_matrix(c, orthopoly.hahn_basis(c.hahn), tol=np.inf)
    results = {"k": k.k, "routes": k.routes, "direct": k.direct, "route": k.route}
    residuals = {"route_gap": k.route_gap, "direct_gap": k.direct_gap}
    tol = cfg["tolerances"]["kernel"]
    return results, residuals, max(k.route_gap, k.direct_gap) <= tol


def _cmd_spectrum(cfg):
    c = _limiting_config(cfg)
    r = limiting.solve(c, commute_tol=cfg["tolerances"]["commute"])
    results = {
        "v1_spectrum": r.v1_eigs_direct,
        "m_spectrum": r.m_eigs,
        "clustering": r.condition_diagnostics,
    }
    return results, {"eigenvalue_gap": r.eigenvalue_gap}, r.eigenvalue_gap <= cfg["tolerances"]["eigs"]


def _cmd_heun_action(cfg):
    try:
        p = orthopoly.JacobiParams(cfg["alpha"], cfg["beta"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    K = cfg["k"]
    if K < 4:
        raise InputError("need --k >= 4")
    t = _tau(cfg)
    mj, rec = heun.jacobi_heun_operator(p, t, K)
    act = heun.tridiagonal_action(
        mj, t, rec, orthopoly.jacobi_eigenvalues(p, K + 1), tol=np.inf
    )
    mono = heun.algebraic_heun(operators.monomial_x(K), operators.monomial_hypergeom(p, K), t)
    hp = _hahn(cfg)
    grid = heun.heun_hahn(t, hp, rtol=np.inf)
    excess_poly = heun.degree_excess_polynomial(mono)
    excess_grid = heun.degree_excess_grid(grid)
    rel_leak = act.leakage / np.linalg.norm(mj.block())
    results = {
        "table": {
            "n": list(range(act.eta.size)),
            "xi": act.xi[1:],
            "eta": act.eta,
            "zeta_u": act.zeta_u,
        },
        "bare_eta_offset": act.bare_eta_offset,
        "degree_excess_polynomial": excess_poly,
        "degree_excess_grid": excess_grid,
    }
    residuals = {"leakage": rel_leak, "deviation": act.deviation}
    tol = cfg["tolerances"]
    ok = (
        rel_leak <= tol["tridiag"]
        and max(excess_poly.max(), excess_grid.max()) <= tol["degree"]
    )
    return results, residuals, ok


def _report(r: algebra.ClosureReport):
    return {"coefficients": r.coefficients, "residual": r.residual, "window": r.window, "rank": r.rank}


def _cmd_algebra(cfg):
    try:
        p = orthopoly.JacobiParams(cfg["alpha"], cfg["beta"])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    hp = _hahn(cfg)
    t = _tau(cfg)
    tol = cfg["tolerances"]
    K = max(cfg["k"], 16)
    ja = algebra.jacobi_algebra_check(p, K)
    ha = algebra.hahn_algebra_check(hp)
    f, s, e1, e2 = algebra.cubic_closure_hahn(t, hp)
    emb = algebra.racah_embedding_jacobi(heun.HeunTau(0.0, t.tau1, t.tau2, t.tau3, 0.0), p, K)
    results = {
        "jacobi_algebra": [_report(r) for r in ja],
        "jacobi_printed": algebra.JACOBI_PRINTED(p),
        "hahn_algebra": [_report(r) for r in ha],
        "cubic": [_report(f), _report(s)],
        "e1": e1,
        "e2": e2,
        "racah_embedding": [_report(r) for r in emb],
    }
    closure = max(r.residual for r in (*ja, *ha, f, s))
    embedding = max(r.residual for r in emb)
    residuals = {"closure": closure, "embedding": embedding}
    return results, residuals, closure <= tol["closure"] and embedding <= tol["embedding"]


def _cmd_verify(cfg):
    out = suites.run_suite(cfg["suite"], cfg["seed"], cfg["tolerances"])
    results = {name: [c.as_dict() for c in checks] for name, checks in out.items()}
    residuals = {f"{name}: {c.name}": c.value for name, checks in out.items() for c in checks}
    ok = all(c.passed for checks in out.values() for c in checks)
    return results, residuals, ok


COMMANDS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "kernel": _cmd_kernel,
    "spectrum": _cmd_spectrum,
    "heun-action": _cmd_heun_action,
    "algebra-check": _cmd_algebra,
}


def _emit(text, path):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        env_seed = os.environ.get("HEUNLIM_SEED")
        if env_seed is not None:
            try:
                args.seed = int(env_seed)
            except ValueError:
                parser.error(f"HEUNLIM_SEED must be an integer, got {env_seed!r}")
    except SystemExit as exc:
        # usage errors, --help and --version all leave argparse this way
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    cfg = _config(args)
    start = time.perf_counter()
    try:
        results, residuals, ok = COMMANDS[args.command](cfg)
    except InputError as exc:
        _emit(render({"error": {"type": "input", "message": str(exc)}, "config": cfg}, "json"), "-")
        return EXIT_INPUT
    except ArithmeticError as exc:
        _emit(render({"error": {"type": "tolerance", "message": str(exc)}, "config": cfg}, "json"), "-")
        return EXIT_TOL
    except ValueError as exc:
        _emit(render({"error": {"type": "input", "message": str(exc)}, "config": cfg}, "json"), "-")
        return EXIT_INPUT
    except ConvergenceError as exc:
        err = {"type": "convergence", "message": str(exc), "index": exc.index}
        _emit(render({"error": err, "config": cfg}, "json"), "-")
        return EXIT_CONVERGENCE
    elapsed = time.perf_counter() - start
    doc = {
        "config": cfg,
        "results": results,
        "residuals": residuals,
        "timings": {"total_s": elapsed} if args.timings else None,
        "version": __version__,
        "passed": bool(ok),
    }
    _emit(render(doc, args.format), args.output)
    return EXIT_OK if ok else EXIT_TOL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
