"""Moment functionals and the identities they inherit from double symmetry.

Every density with both symmetries satisfies the two-step moment recursion
E(Y^(s+2)) = delta^(2s+4) theta^(-2s-2) E(Y^s), so the moment ratio of two
densities sharing (theta, delta) is periodic in s with period 2. The log
density also satisfies three linear identities in w = log(y) whose residuals
are measured here, and a power transform Y^gamma keeps log-symmetry while
generically destroying R-symmetry, which the probe quantifies.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._integrate import moment_quad
from .core import (
    LOG_SYM,
    R_SYM,
    CenterSearch,
    DensityModel,
    GridSpec,
    SymmetryParams,
    best_symmetry_center,
    default_grid,
    power_transform,
    symmetry_residual,
)

__all__ = [
    "MomentEstimate",
    "moment",
    "MomentReport",
    "moment_recursion_residual",
    "moment_ratio_periodicity",
    "LogIdentityReport",
    "log_identities_report",
    "quadratic_fit_residual",
    "ProbeResult",
    "theorem2_probe",
]


@dataclass(frozen=True)
class MomentEstimate:
    """E(Y^s) by log-domain quadrature, with the integrator's relative error."""

    s: float
    value: float
    rel_error: float


def moment(d: DensityModel, s: float, rel_tol: float = 1e-12) -> MomentEstimate:
    """E(Y^s) for a density model; s may be any real with a convergent integral."""
    if not math.isfinite(s):
        raise ValueError(f"s must be finite, got {s}")
    value, rel_err = moment_quad(d.log_pdf_fn, s, d.w_center, d.w_scale,
                                 d.w_breaks, rel_tol)
    return MomentEstimate(s, value, rel_err)


@dataclass(frozen=True)
class MomentReport:
    """Per-exponent defects of one moment identity."""

    relation: str
    s_values: tuple[float, ...]
    defects: tuple[float, ...]
    tolerance: float
    passed: bool
    extras: Mapping = field(default_factory=dict)

    @property
    def max_defect(self) -> float:
        return max(self.defects)


def moment_recursion_residual(d: DensityModel, params: SymmetryParams,
                              s_values: Sequence[float],
                              tol: float = 1e-8) -> MomentReport:
    """Defects of E(Y^(s+2)) = delta^(2s+4) theta^(-2s-2) E(Y^s).

    Each defect is |1 - factor * E(Y^s) / E(Y^(s+2))| assembled in logs, so
    huge moments cost no precision.
    """
    log_delta = math.log(params.delta)
    log_theta = math.log(params.theta)
    cache: dict[float, float] = {}

    def log_moment(s: float) -> float:
        if s not in cache:
            cache[s] = math.log(moment(d, s).value)
        return cache[s]

    defects = []
    for s in s_values:
        log_factor = (2.0 * s + 4.0) * log_delta - (2.0 * s + 2.0) * log_theta
        defects.append(abs(-math.expm1(
            log_factor + log_moment(s) - log_moment(s + 2.0))))
    defects = tuple(defects)
    return MomentReport("MOMENT_RECURSION", tuple(s_values), defects, tol,
                        max(defects) <= tol)


def moment_ratio_periodicity(d: DensityModel, reference: DensityModel,
                             s_values: Sequence[float], period: float = 2.0,
                             tol: float = 1e-7) -> MomentReport:
    """Defects of rho(s + period) = rho(s) for rho(s) = E_d(Y^s) / E_ref(Y^s).

    Exact whenever both densities satisfy the same two-step recursion, i.e.
    share theta and delta; the reference is typically the matched lognormal.
    """
    defects = []
    for s in s_values:
        lr = (math.log(moment(d, s + period).value)
              - math.log(moment(reference, s + period).value)
              - math.log(moment(d, s).value)
              + math.log(moment(reference, s).value))
        defects.append(abs(math.expm1(lr)))
    defects = tuple(defects)
    return MomentReport("MOMENT_RATIO_PERIOD", tuple(s_values), defects, tol,
                        max(defects) <= tol, {"period": period})


@dataclass(frozen=True)
class LogIdentityReport:
    """Sup residuals of the three log-density identities, in log units."""

    shift_residual: float
    reflection_residual: float
    tilted_residual: float
    tolerance: float
    passed: bool
    masked_fraction: float


def log_identities_report(d: DensityModel, params: SymmetryParams, grid: GridSpec,
                          tol: float = 1e-10) -> LogIdentityReport:
    """Residuals of the identities satisfied by h(w) = log f(e^w).

    shift:      h(w - 2L) = 2(w - log theta - L) + h(w)
    reflection: h(w) = h(2 log theta - w)
    tilted:     h(w - 2L) = h(2 log theta - w) + 2(w - log theta - L)

    The third is the composition of the first two, so its residual is bounded
    by their sum. Points where any participating log-density is -inf are
    masked (with a warning), since the identities compare finite logs.
    """
    L = params.log_k
    lt = math.log(params.theta)
    w = grid.w()
    h = d.log_pdf(np.exp(w))
    h_shift = d.log_pdf(np.exp(w - 2.0 * L))
    h_refl = d.log_pdf(np.exp(2.0 * lt - w))
    tilt = 2.0 * (w - lt - L)

    def sup(a: np.ndarray, finite: np.ndarray) -> tuple[float, float]:
        bad = ~finite
        if bad.all():
            raise ValueError("log-density is -inf on the entire grid")
        return float(np.max(np.abs(a[finite]))), float(bad.mean())

    r1, m1 = sup(h_shift - tilt - h, np.isfinite(h) & np.isfinite(h_shift))
    r2, m2 = sup(h - h_refl, np.isfinite(h) & np.isfinite(h_refl))
    r3, m3 = sup(h_shift - h_refl - tilt, np.isfinite(h_shift) & np.isfinite(h_refl))
    masked = max(m1, m2, m3)
    if masked > 0.0:
        warnings.warn(f"masked {masked:.1%} of grid points where log f = -inf",
                      stacklevel=2)
    passed = max(r1, r2, r3) <= tol
    return LogIdentityReport(r1, r2, r3, tol, passed, masked)


def quadratic_fit_residual(d: DensityModel, grid: GridSpec) -> float:
    """Sup distance of h(w) = log f(e^w) from its best quadratic fit.

    Zero (to rounding) exactly when the density is lognormal; any other
    family shows a visible excess.
    """
    w = grid.w()
    h = d.log_pdf(np.exp(w))
    finite = np.isfinite(h)
    if finite.sum() < 10:
        raise ValueError("not enough finite log-density values to fit")
    fit = np.polynomial.Polynomial.fit(w[finite], h[finite], 2)
    return float(np.max(np.abs(h[finite] - fit(w[finite]))))


@dataclass(frozen=True)
class ProbeResult:
    """Symmetry of Y^gamma: log-symmetry residual at delta^gamma, best R-symmetry found."""

    gamma: float
    log_sym_residual: float
    r_sym_center: float
    r_sym_residual: float
    flagged: bool


_BASE_DS_TOL = 1e-8


def theorem2_probe(d: DensityModel, params: SymmetryParams,
                   gammas: Sequence[float], n_points: int = 801,
                   log_tol: float = 1e-8) -> tuple[ProbeResult, ...]:
    """Measure what a power transform does to each symmetry of a DS density.

    The base density must itself be doubly symmetric (checked first). For
    each gamma, the transform is log-symmetric about delta^gamma by
    construction; the best achievable R-symmetry residual is found by a
    center search around delta^gamma k^(-gamma^2), which is the transformed
    mode in the lognormal case.
    """
    base_grid = default_grid(params, n_points)
    r_log = symmetry_residual(d, LOG_SYM, params.delta, base_grid)
    r_r = symmetry_residual(d, R_SYM, params.theta, base_grid)
    if max(r_log.residual, r_r.residual) > _BASE_DS_TOL:
        raise ValueError("base density is not doubly symmetric; probe is undefined")

    L = params.log_k
    out = []
    for gamma in gammas:
        t = power_transform(d, gamma)
        half = 6.0 * abs(gamma) * L + 5.0
        grid = GridSpec(t.w_center - half, t.w_center + half, n_points)
        ls = symmetry_residual(t, LOG_SYM, params.delta ** gamma, grid)
        c0 = params.delta ** gamma * params.k ** (-gamma * gamma)
        span = 2.0 * abs(gamma) * L + 1.0
        found: CenterSearch = best_symmetry_center(
            t, R_SYM, (c0 * math.exp(-span), c0 * math.exp(span)), grid, log_tol)
        at_c0 = symmetry_residual(t, R_SYM, c0, grid)
        if at_c0.residual < found.residual:
            found = CenterSearch(c0, at_c0.residual, found.flagged, R_SYM)
        out.append(ProbeResult(gamma, ls.residual, found.center,
                               found.residual, found.flagged))
    return tuple(out)
