"""Command line interface.

Exit codes: 0 certified (existence or nonexistence), 2 not certified, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import PlienardError
from .pipeline import (ProblemConfig, check_hypotheses, corollary_sweep, export, load_config,
                       report_text, run_problem, verify_csv)

EXIT_OK, EXIT_ERROR, EXIT_NOT_CERTIFIED = 0, 1, 2
ORACLE_AGREEMENT = 1e-5


def _config(args) -> ProblemConfig:
    cfg = load_config(args.config)
    kw = {}
    if args.nodes is not None:
        kw["N"] = args.nodes
    if args.tol is not None:
        kw["solve_tol"] = args.tol
    return cfg.with_overrides(**kw) if kw else cfg


def _status_code(status: str) -> int:
    return EXIT_OK if status in ("exists", "nonexistence") else EXIT_NOT_CERTIFIED


def cmd_solve(args) -> int:
    cfg = _config(args)
    cert = run_problem(cfg)
    paths = export(cert, args.out)
    print(f"status: {cert.status}")
    if cert.residual is not None:
        print(f"residual: {cert.residual:.3e}")
    if cert.reason:
        print(f"reason: {cert.reason}")
    for kind, path in sorted(paths.items()):
        print(f"{kind}: {path}")
    return _status_code(cert.status)


def cmd_bounds(args) -> int:
    cfg = _config(args)
    hyp = check_hypotheses(cfg)
    lines = ["BOUNDS",
             f"  mean h = {hyp.hbar:.17g}",
             f"  max h = {hyp.hmax:.17g}",
             f"  htilde L1 = {hyp.htilde_L1:.17g}",
             f"  K = {hyp.K:.17g}",
             f"  alpha = {'none' if hyp.alpha is None else format(hyp.alpha, '.17g')} ({hyp.alpha_msg})",
             f"  delta = {'none' if hyp.delta is None else format(hyp.delta, '.17g')}",
             f"  tail check: {'pass' if hyp.tail_ok else 'fail'} ({hyp.tail_msg})",
             f"  hypotheses pass: {str(hyp.passes).lower()}"]
    text = "\n".join(lines) + "\n"
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bounds.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if hyp.passes else EXIT_NOT_CERTIFIED


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if not cfg.sweep_hbar:
        raise PlienardError("sweep needs sweep_hbar in the configuration")
    rows = corollary_sweep(cfg, max_workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hbar", "status", "residual", "min_u", "max_u"])
        for v, cert in rows:
            u = cert.solution
            w.writerow([f"{v:.16e}", cert.status,
                        "" if cert.residual is None else f"{cert.residual:.16e}",
                        "" if u is None else f"{u.values.min():.16e}",
                        "" if u is None else f"{u.values.max():.16e}"])
            (out / f"row_{rows.index((v, cert)):03d}_report.txt").write_text(report_text(cert), encoding="utf-8")
            print(f"hbar = {v:g}: {cert.status}")
    return max((_status_code(c.status) for _, c in rows), default=EXIT_OK)


def cmd_verify(args) -> int:
    cfg = _config(args)
    path = Path(args.csv) if args.csv else Path(args.out) / "solution.csv"
    res = verify_csv(cfg, path)
    print(f"residual: {res.residual:.3e}")
    print(f"min u: {res.min_u:.17g}")
    for m in res.messages:
        print(f"failed: {m}")
    print("verified" if res.ok else "not verified")
    return EXIT_OK if res.ok else EXIT_NOT_CERTIFIED


def cmd_oracle_check(args) -> int:
    from .lower_upper import lienard_rhs
    from .oracle import FdSystem, NewtonOptions, newton_solve
    cfg = _config(args)
    cert = run_problem(cfg)
    if cert.status != "exists":
        print(f"status: {cert.status}; nothing to compare")
        return _status_code(cert.status)
    pf = cfg.exponent_field()
    ell = lienard_rhs(cfg.f, cfg.g, cfg.h)
    res = newton_solve(FdSystem.from_field(pf), ell, cert.solution, NewtonOptions(tol=args.oracle_tol))
    diff = float(np.max(np.abs(res.u.values - cert.solution.values)))
    print(f"oracle residual: {res.residual:.3e} after {res.iterations} iterations")
    print(f"sup difference: {diff:.3e}")
    return EXIT_OK if diff <= ORACLE_AGREEMENT else EXIT_NOT_CERTIFIED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plienard",
                                 description="Periodic solutions of singular p(t)-Laplacian Liénard equations.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log effective configuration")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", default=".", metavar="DIR")
        p.add_argument("--nodes", type=int, metavar="N", help="override N")
        p.add_argument("--tol", type=float, metavar="X", help="override solve_tol")
        return p

    common(sub.add_parser("solve", help="certify existence or nonexistence")).set_defaults(fn=cmd_solve)
    common(sub.add_parser("bounds", help="hypothesis checks and a priori constants")).set_defaults(fn=cmd_bounds)
    sw = common(sub.add_parser("sweep", help="mean-forcing sweep of the configured profile"))
    sw.add_argument("--workers", type=int, default=None)
    sw.set_defaults(fn=cmd_sweep)
    ve = common(sub.add_parser("verify", help="recheck a solution CSV against the configuration"))
    ve.add_argument("--csv", metavar="PATH", help="default: DIR/solution.csv")
    ve.set_defaults(fn=cmd_verify)
    oc = common(sub.add_parser("oracle-check", help="compare against the finite-difference oracle"))
    oc.add_argument("--oracle-tol", type=float, default=1e-9)
    oc.set_defaults(fn=cmd_oracle_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (PlienardError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
