"""Bilateral power series L_k(y) = sum_n y^n k^(-n^2/2) and the density it generates.

f_gamma(y) proportional to y^(gamma-1) / L_k(y) is R-symmetric about
k^(gamma-1) and log-symmetric about k^gamma whenever 2*gamma is an integer,
via the shift identity L_k(k^c y) = y^(2c) L_k(k^c / y) for half-integer c.
It is then extremely close to, but not the same as, the lognormal with
mu = gamma log k and sigma^2 = log k.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._integrate import NumericsError, moment_quad
from .core import DensityModel, GridSpec, NormInfo, ResidualReport
from .densities import make_lognormal

__all__ = [
    "ThetaEval",
    "ramanujan_theta",
    "theta_log_values",
    "theta_shift_identity_residual",
    "AskeyBergDensity",
    "make_askey_berg",
    "askey_berg_lognormal_gap",
    "gridpoint_equality_check",
]

_TERM_STOP = 1e-18
_TAIL_LIMIT = 1e-15


@dataclass(frozen=True)
class ThetaEval:
    """One certified evaluation: value, its log, term count, and truncation bound."""

    value: float
    log_value: float
    n_terms: int
    tail_bound: float
    tail_rel: float


def _check_k(k: float) -> float:
    if not (math.isfinite(k) and k > 1.0):
        raise ValueError(f"k must be finite and > 1, got {k}")
    return math.log(k)


def ramanujan_theta(y: float, k: float) -> ThetaEval:
    """Adaptive two-sided summation of L_k(y) with a certified geometric tail bound.

    Terms are summed outward from the peak index n ~ log(y)/log(k), scaled by
    the peak term; each direction stops once a term falls below 1e-18 of the
    running sum and its remaining tail is bounded by a geometric series.
    """
    L = _check_k(k)
    if not (math.isfinite(y) and y > 0.0):
        raise ValueError(f"y must be positive and finite, got {y}")
    w = math.log(y)
    n0 = round(w / L)
    log_peak = n0 * w - 0.5 * n0 * n0 * L

    def term(n: int) -> float:
        return math.exp(n * w - 0.5 * n * n * L - log_peak)

    total = term(n0)
    n_terms = 1
    tail = 0.0
    for step in (1, -1):
        n = n0
        while True:
            n += step
            t = term(n)
            total += t
            n_terms += 1
            if n_terms > 200_000:
                raise NumericsError("series did not converge")
            if t < _TERM_STOP * total:
                # ratio of consecutive terms past the peak, strictly below 1
                q = math.exp(step * w - (step * n + 0.5) * L)
                if q < 0.5:
                    tail += t * q / (1.0 - q)
                    break
    tail_rel = tail / total
    if tail_rel > _TAIL_LIMIT:
        raise NumericsError(f"tail bound {tail_rel:.3e} too large to certify")
    log_value = log_peak + math.log(total)
    with np.errstate(over="ignore"):
        value = float(np.exp(log_value))
    return ThetaEval(value, log_value, n_terms, tail, tail_rel)


def theta_log_values(y, k: float) -> np.ndarray:
    """log L_k(y) for an array of y, via a fixed window of terms around each peak.

    The window half-width covers every term within exp(-50) of the local
    peak term, so truncation is far below double precision; summation is a
    single logsumexp over the term matrix.
    """
    L = _check_k(k)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not np.all(np.isfinite(y) & (y > 0.0)):
        raise ValueError("all y must be positive and finite")
    w = np.log(y)
    half = int(math.ceil(math.sqrt(2.0 * 50.0 / L))) + 3
    n = np.rint(w / L)[:, None] + np.arange(-half, half + 1)[None, :]
    log_terms = n * w[:, None] - 0.5 * L * n * n
    return logsumexp(log_terms, axis=1)


def theta_shift_identity_residual(c: float, k: float, grid: GridSpec,
                                  tol: float = 1e-13) -> ResidualReport:
    """Sup defect of L_k(k^c y) = y^(2c) L_k(k^c / y) over the grid.

    The defect is |ratio - 1| computed in logs, so no normalizer is needed.
    The identity is exact iff 2c is an integer (the index shift n -> n - 2c
    maps the series onto itself); for other c the residual has a positive
    floor that grows with k.
    """
    L = _check_k(k)
    if not math.isfinite(c):
        raise ValueError(f"c must be finite, got {c}")
    yv = grid.y()
    shift = math.exp(c * L)
    la = theta_log_values(shift * yv, k)
    lb = theta_log_values(shift / yv, k)
    defect = np.abs(np.expm1(la - lb - 2.0 * c * np.log(yv)))
    residual = float(defect.max())
    return ResidualReport(f"THETA_SHIFT(c={c:g})", residual, 1.0, tol,
                          residual <= tol, grid, {"c": c, "k": k})


@dataclass(frozen=True, kw_only=True)
class AskeyBergDensity(DensityModel):
    """Density y^(gamma-1) / (N L_k(y)); delta/theta are set only when 2*gamma is an integer."""

    gamma: float
    k: float
    delta: float | None
    theta: float | None


def _is_half_integer(gamma: float) -> bool:
    return abs(2.0 * gamma - round(2.0 * gamma)) <= 1e-12


def make_askey_berg(gamma: float, k: float) -> AskeyBergDensity:
    """Normalized f_gamma; the constant comes from log-domain quadrature.

    The integrand in w = log y is a near-Gaussian bump at w = gamma log k
    with scale sqrt(log k), which is where the window search starts.
    """
    L = _check_k(k)
    if not math.isfinite(gamma):
        raise ValueError(f"gamma must be finite, got {gamma}")

    def log_unnorm(y: np.ndarray) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return (gamma - 1.0) * np.log(y) - theta_log_values(y, k)

    mass, rel_err = moment_quad(log_unnorm, 0.0, gamma * L, math.sqrt(L), rel_tol=1e-13)
    log_mass = math.log(mass)

    ds = _is_half_integer(gamma)
    meta = {"gamma": gamma, "k": k, "is_ds": ds}
    if ds:
        meta["delta"] = k ** gamma
        meta["theta"] = k ** (gamma - 1.0)
    return AskeyBergDensity(
        family="askeyberg",
        log_pdf_fn=lambda y: log_unnorm(y) - log_mass,
        norm=NormInfo(mass, rel_err),
        w_center=gamma * L,
        w_scale=math.sqrt(L),
        meta=meta,
        gamma=gamma,
        k=k,
        delta=k ** gamma if ds else None,
        theta=k ** (gamma - 1.0) if ds else None,
    )


def askey_berg_lognormal_gap(gamma: float, k: float, grid: GridSpec) -> float:
    """Sup distance between f_gamma and its matched lognormal, relative to the peak.

    The matched lognormal has mu = gamma log k and sigma^2 = log k. The gap
    shrinks roughly like 2 exp(-2 pi^2 / log k), so it is tiny for k near 1
    and only becomes visible for large k.
    """
    L = _check_k(k)
    d = make_askey_berg(gamma, k)
    f0 = make_lognormal(gamma * L, math.sqrt(L))
    yv = grid.y()
    ref = f0.pdf(yv)
    return float(np.max(np.abs(d.pdf(yv) - ref)) / np.max(ref))


def gridpoint_equality_check(gamma: float, k: float,
                             p_values=(-3, -2, -1, 0, 1, 2, 3)) -> np.ndarray:
    """Relative defects |f_gamma(k^p) / f0(k^p) - 1| at the geometric grid y = k^p.

    At these points the two densities agree to far higher accuracy than
    anywhere in between; the check is only meaningful when 2*gamma is an
    integer, and warns otherwise.
    """
    L = _check_k(k)
    if not _is_half_integer(gamma):
        warnings.warn("gridpoint equality is only expected when 2*gamma is an integer",
                      stacklevel=2)
    d = make_askey_berg(gamma, k)
    f0 = make_lognormal(gamma * L, math.sqrt(L))
    y = np.power(float(k), np.asarray(p_values, dtype=float))
    return np.abs(np.expm1(d.log_pdf(y) - f0.log_pdf(y)))
