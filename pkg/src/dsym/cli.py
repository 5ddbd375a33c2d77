"""Command line interface.

Subcommands:
  density   tabulate y, pdf on a log grid (CSV)
  compare   tabulate a family next to its matched lognormal (CSV)
  verify    run the family's identity battery, report JSON, exit 0/1
  moments   tabulate E(Y^s) with error estimates (CSV)
  sample    draw variates (CSV; --exact uses the closed-form poly sampler)

Families: lognormal (--mu --sigma), stieltjes (--mu --sigma --eps),
askeyberg (--gamma --k), pakes-alpha (--alpha --theta --k),
poly (--theta --k). Exit codes: 0 success, 1 verification failure,
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from typing import Sequence

import numpy as np

from .core import (
    LOG_SYM,
    R_SYM,
    DensityModel,
    GridSpec,
    SymmetryParams,
    best_symmetry_center,
    default_grid,
    ds_chain_residual,
    symmetry_residual,
)
from .densities import (
    StieltjesParams,
    make_lognormal,
    make_pakes_ds,
    make_poly_ds,
    make_stieltjes,
    poly_ds_boundary_limits,
    stieltjes_cross_residual,
)
from .moments import (
    log_identities_report,
    moment,
    moment_ratio_periodicity,
    moment_recursion_residual,
    quadratic_fit_residual,
)
from .psi import extend_seed, make_psi_alpha, psi_reflection_residual, unimodality_check
from .sampling import sample, sample_poly_exact
from .theta import (
    askey_berg_lognormal_gap,
    gridpoint_equality_check,
    make_askey_berg,
    theta_shift_identity_residual,
)

__all__ = ["main"]

_FAMILIES = ("lognormal", "stieltjes", "askeyberg", "pakes-alpha", "poly")
_GRID_POINTS = 801


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _build_density(args) -> tuple[DensityModel, dict, SymmetryParams | None]:
    """Construct the requested family; returns (model, params-for-report, centers)."""
    fam = args.family
    if fam == "lognormal":
        d = make_lognormal(args.mu, args.sigma)
        sp = SymmetryParams(d.meta["theta"], d.meta["k"])
        return d, {"mu": args.mu, "sigma": args.sigma}, sp
    if fam == "stieltjes":
        p = StieltjesParams(args.mu, args.sigma, args.eps)
        return make_stieltjes(p), {"mu": p.mu, "sigma": p.sigma, "eps": p.eps}, \
            SymmetryParams(p.theta, p.k)
    if fam == "askeyberg":
        d = make_askey_berg(args.gamma, args.k)
        sp = SymmetryParams(d.theta, args.k) if d.theta is not None else None
        return d, {"gamma": args.gamma, "k": args.k}, sp
    if fam == "pakes-alpha":
        sp = SymmetryParams(args.theta, args.k)
        psi = extend_seed(make_psi_alpha(args.alpha, args.k))
        return make_pakes_ds(psi, sp), \
            {"alpha": args.alpha, "theta": args.theta, "k": args.k}, sp
    sp = SymmetryParams(args.theta, args.k)
    return make_poly_ds(sp), {"theta": args.theta, "k": args.k}, sp


def _matched_lognormal(args, sp: SymmetryParams | None) -> DensityModel:
    """Lognormal sharing the family's mode and center ratio."""
    if args.family == "lognormal":
        return make_lognormal(args.mu, args.sigma)
    if args.family == "stieltjes":
        return make_lognormal(args.mu, args.sigma)
    if args.family == "askeyberg":
        L = math.log(args.k)
        return make_lognormal(args.gamma * L, math.sqrt(L))
    L = sp.log_k
    return make_lognormal(math.log(sp.theta) + L, math.sqrt(L))


def _mode_log(args, sp: SymmetryParams | None) -> float:
    if args.family == "askeyberg":
        return (args.gamma - 1.0) * math.log(args.k)
    return math.log(sp.theta)


def _compare_grid(args, sp: SymmetryParams | None) -> np.ndarray:
    """Log grid with the mode exactly at the middle point (odd length)."""
    if args.points % 2 == 0 or args.points < 3:
        raise ValueError("--points must be odd and at least 3")
    if args.family == "askeyberg":
        L = math.log(args.k)
    else:
        L = sp.log_k
    half = args.half_width if args.half_width is not None \
        else 2.0 * L + max(2.0 * math.sqrt(L), 1.0)
    if half <= 0.0:
        raise ValueError("--half-width must be positive")
    m = (args.points - 1) // 2
    return _mode_log(args, sp) + (np.arange(args.points) - m) * (half / m)


# ---------------------------------------------------------------------------
# verify batteries


def _check(name: str, residual: float, tolerance: float, direction: str = "<=") -> dict:
    passed = residual <= tolerance if direction == "<=" else residual > tolerance
    return {"name": name, "residual": float(residual), "tolerance": float(tolerance),
            "direction": direction, "passed": bool(passed)}


def _symmetry_checks(d: DensityModel, sp: SymmetryParams, grid: GridSpec,
                     scale: float) -> list[dict]:
    out = [
        _check("log_sym", symmetry_residual(d, LOG_SYM, sp.delta, grid).residual,
               scale * 1e-10),
        _check("r_sym", symmetry_residual(d, R_SYM, sp.theta, grid).residual,
               scale * 1e-10),
    ]
    for level in ("EQ5", "EQ6", "EQ7"):
        out.append(_check(f"chain_{level.lower()}",
                          ds_chain_residual(d, sp, level, grid).residual,
                          scale * 1e-10))
    return out


def _moment_checks(d: DensityModel, sp: SymmetryParams, scale: float,
                   reference: DensityModel | None = None) -> list[dict]:
    s_values = (-2.0, -1.0, 0.0, 1.0, 2.0)
    out = [_check("moment_recursion",
                  moment_recursion_residual(d, sp, s_values).max_defect,
                  scale * 1e-8)]
    if reference is not None:
        out.append(_check("ratio_periodicity",
                          moment_ratio_periodicity(d, reference, (-2.0, -1.0, 0.0)).max_defect,
                          scale * 1e-7))
    return out


def _log_identity_checks(d: DensityModel, sp: SymmetryParams, scale: float) -> list[dict]:
    lt = math.log(sp.theta)
    win = GridSpec(lt - 6.0 * sp.log_k, lt + 6.0 * sp.log_k, _GRID_POINTS)
    rep = log_identities_report(d, sp, win)
    return [
        _check("log_shift", rep.shift_residual, scale * 1e-10),
        _check("log_reflection", rep.reflection_residual, scale * 1e-10),
        _check("log_tilted", rep.tilted_residual, scale * 1e-10),
    ]


def _battery_lognormal(args, d, sp, scale) -> list[dict]:
    grid = default_grid(sp, _GRID_POINTS)
    checks = _symmetry_checks(d, sp, grid, scale)
    checks += _moment_checks(d, sp, scale)
    checks += _log_identity_checks(d, sp, scale)
    lt = math.log(sp.theta)
    win = GridSpec(lt - 6.0 * sp.log_k, lt + 6.0 * sp.log_k, _GRID_POINTS)
    checks.append(_check("quadratic_fit", quadratic_fit_residual(d, win), scale * 1e-10))
    return checks


def _battery_poly(args, d, sp, scale) -> list[dict]:
    grid = default_grid(sp, _GRID_POINTS)
    checks = _symmetry_checks(d, sp, grid, scale)
    checks.append(_check("norm_series", d.meta["series_quadrature_defect"], scale * 1e-12))

    cont = 0.0
    for i in range(-6, 7):
        below, above = poly_ds_boundary_limits(sp, i)
        cont = max(cont, abs(below - above) / max(below, above))
    checks.append(_check("boundary_continuity", cont, 0.0))

    m2 = moment(d, 2.0)
    target = sp.theta ** 2 * sp.k ** 4
    checks.append(_check("second_moment", abs(m2.value / target - 1.0), scale * 1e-8))

    flat = extend_seed(make_psi_alpha(0.5, sp.k))
    twin = make_pakes_ds(flat, sp)
    yv = grid.y()
    ref = d.pdf(yv)
    match = float(np.max(np.abs(twin.pdf(yv) - ref)) / np.max(ref))
    checks.append(_check("pakes_match", match, scale * 1e-10))

    checks += _moment_checks(d, sp, scale, _matched_lognormal(args, sp))
    checks += _log_identity_checks(d, sp, scale)
    return checks


def _battery_stieltjes(args, d, sp, scale) -> list[dict]:
    p = StieltjesParams(args.mu, args.sigma, args.eps)
    grid = default_grid(sp, _GRID_POINTS)
    cross_log, cross_r = stieltjes_cross_residual(p, grid)
    checks = [
        _check("cross_log_sym", cross_log.residual, scale * 1e-12),
        _check("cross_r_sym", cross_r.residual, scale * 1e-12),
    ]
    span = sp.log_k + 1.0
    for name, relation, center in (("log_sym_floor", LOG_SYM, sp.delta),
                                   ("r_sym_floor", R_SYM, sp.theta)):
        found = best_symmetry_center(
            d, relation, (center * math.exp(-span), center * math.exp(span)), grid)
        checks.append(_check(name, found.residual, scale * 5e-3, ">"))
    checks += _moment_checks(d, sp, scale, _matched_lognormal(args, sp))
    return checks


def _battery_askeyberg(args, d, sp, scale) -> list[dict]:
    gamma, k = args.gamma, args.k
    L = math.log(k)
    lt = (gamma - 1.0) * L
    grid = GridSpec(lt - 6.0 * L - 5.0, lt + 6.0 * L + 5.0, _GRID_POINTS)
    # identity defects are computed through log L_k values of size ~w^2/L,
    # so the shift grid stays moderate to keep rounding below the tolerance
    shift_grid = GridSpec(-2.0 * L - 1.0, 2.0 * L + 1.0, 401)
    checks = [
        _check("theta_shift_half",
               theta_shift_identity_residual(0.5, k, shift_grid).residual, scale * 1e-13),
        _check("theta_shift_one",
               theta_shift_identity_residual(1.0, k, shift_grid).residual, scale * 1e-13),
    ]
    gap_tol = 5e-4 if k <= 2.5 else 1.0
    checks.append(_check("lognormal_gap",
                         askey_berg_lognormal_gap(gamma, k, grid), scale * gap_tol))
    if sp is not None:
        checks.append(_check("log_sym",
                             symmetry_residual(d, LOG_SYM, sp.delta, grid).residual,
                             scale * 1e-10))
        checks.append(_check("r_sym",
                             symmetry_residual(d, R_SYM, sp.theta, grid).residual,
                             scale * 1e-10))
        checks.append(_check("gridpoint_equality",
                             float(np.max(gridpoint_equality_check(gamma, k))),
                             scale * 1e-9))
        checks += _moment_checks(d, sp, scale)
    return checks


def _battery_pakes(args, d, sp, scale) -> list[dict]:
    grid = default_grid(sp, _GRID_POINTS)
    checks = [
        _check("psi_reflection", psi_reflection_residual(d.psi), scale * 1e-10),
        _check("evaluator_agreement", d.meta["evaluator_agreement"], scale * 1e-12),
    ]
    checks += _symmetry_checks(d, sp, grid, scale)
    checks += _moment_checks(d, sp, scale, _matched_lognormal(args, sp))
    expected = 0.0 < args.alpha < 1.0
    agrees = unimodality_check(d.psi).unimodal == expected
    checks.append(_check("psi_unimodal", 0.0 if agrees else 1.0, 0.5))
    return checks


_BATTERIES = {
    "lognormal": _battery_lognormal,
    "stieltjes": _battery_stieltjes,
    "askeyberg": _battery_askeyberg,
    "pakes-alpha": _battery_pakes,
    "poly": _battery_poly,
}


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_density(args) -> int:
    d, _, sp = _build_density(args)
    w = _compare_grid(args, sp)
    y = np.exp(w)
    _emit(args.out, _csv(("y", "pdf"), zip(y, d.pdf(y))))
    return 0


def _cmd_compare(args) -> int:
    d, _, sp = _build_density(args)
    ref = _matched_lognormal(args, sp)
    w = _compare_grid(args, sp)
    y = np.exp(w)
    _emit(args.out, _csv(("y", "pdf", "lognormal_pdf"),
                         zip(y, d.pdf(y), ref.pdf(y))))
    return 0


def _cmd_verify(args) -> int:
    if args.tol <= 0.0 or not math.isfinite(args.tol):
        raise ValueError("--tol must be positive and finite")
    d, params, sp = _build_density(args)
    checks = _BATTERIES[args.family](args, d, sp, args.tol)
    report = {
        "family": args.family,
        "params": params,
        "tol_scale": args.tol,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    _emit(args.out, json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 0 if report["passed"] else 1


def _cmd_moments(args) -> int:
    d, _, _ = _build_density(args)
    rows = []
    for s in args.s:
        est = moment(d, s)
        rows.append((est.s, est.value, est.rel_error))
    _emit(args.out, _csv(("s", "value", "rel_error"), rows))
    return 0


def _cmd_sample(args) -> int:
    d, _, _ = _build_density(args)
    if args.exact:
        if args.family != "poly":
            raise ValueError("--exact is only available for the poly family")
        batch = sample_poly_exact(d, args.n, args.seed)
    else:
        batch = sample(d, args.n, args.seed)
    _emit(args.out, "value\n" + "\n".join(_fmt(v) for v in batch.values) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--family", required=True, choices=_FAMILIES)
    shared.add_argument("--mu", type=float, default=0.0, help="lognormal/stieltjes location")
    shared.add_argument("--sigma", type=float, default=1.0, help="lognormal/stieltjes scale")
    shared.add_argument("--eps", type=float, default=0.5, help="stieltjes amplitude")
    shared.add_argument("--gamma", type=float, default=0.5, help="askeyberg exponent")
    shared.add_argument("--alpha", type=float, default=0.25, help="pakes-alpha exponent")
    shared.add_argument("--theta", type=float, default=1.0, help="mode (pakes-alpha/poly)")
    shared.add_argument("--k", type=float, default=2.0, help="center ratio delta/theta")
    shared.add_argument("--out", help="write output atomically to this path")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--points", type=int, default=401,
                      help="odd grid size; the mode is the middle point")
    grid.add_argument("--half-width", type=float, default=None,
                      help="grid half-width in log(y); default 2*log(k) + max(2*sqrt(log k), 1)")

    p = argparse.ArgumentParser(
        prog="dsym", description="Doubly symmetric densities: tables, checks, samples.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[shared, grid],
                       help="tabulate y,pdf as CSV")
    d.set_defaults(handler=_cmd_density)

    c = sub.add_parser("compare", parents=[shared, grid],
                       help="tabulate the family against its matched lognormal")
    c.set_defaults(handler=_cmd_compare)

    v = sub.add_parser("verify", parents=[shared],
                       help="run the identity battery and emit a JSON report")
    v.add_argument("--tol", type=float, default=1.0,
                   help="multiply every check tolerance by this factor")
    v.set_defaults(handler=_cmd_verify)

    m = sub.add_parser("moments", parents=[shared], help="tabulate E(Y^s) as CSV")
    m.add_argument("--s", type=float, nargs="+", default=[-2.0, -1.0, 0.0, 1.0, 2.0])
    m.set_defaults(handler=_cmd_moments)

    s = sub.add_parser("sample", parents=[shared], help="draw variates as CSV")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exact", action="store_true",
                   help="closed-form inverse CDF (poly only)")
    s.set_defaults(handler=_cmd_sample)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"dsym: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
