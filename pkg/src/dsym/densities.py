"""Concrete density families on (0, inf).

Four families: the lognormal (the canonical doubly symmetric law), its
Stieltjes sine-perturbation class (same moments, neither symmetry), the
general piecewise construction generated by a psi function (every doubly
symmetric density with ratio k arises this way), and the closed-form
piecewise power density that the constant generator produces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._integrate import NumericsError, integrate_exp
from .core import DensityModel, GridSpec, NormInfo, ResidualReport, SymmetryParams, piece_indices
from .psi import PsiFunction, psi_reflection_residual

__all__ = [
    "make_lognormal",
    "StieltjesParams",
    "make_stieltjes",
    "stieltjes_cross_residual",
    "PakesDensity",
    "make_pakes_ds",
    "pakes_log_unnorm",
    "pakes_log_unnorm_alt",
    "pakes_evaluator_agreement",
    "PolyDsDensity",
    "poly_ds_norm_const",
    "make_poly_ds",
    "poly_ds_boundary_limits",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def make_lognormal(mu: float, sigma: float) -> DensityModel:
    """Lognormal density; log Y ~ N(mu, sigma^2).

    Median delta = e^mu, mode theta = e^(mu - sigma^2), so the symmetry
    ratio is k = e^(sigma^2); both symmetry identities hold exactly.
    """
    if not (math.isfinite(mu) and math.isfinite(sigma) and sigma > 0.0):
        raise ValueError("need finite mu and sigma > 0")
    s2 = sigma * sigma
    c = -_LOG_SQRT_2PI - math.log(sigma)

    def log_pdf_fn(y: np.ndarray) -> np.ndarray:
        w = np.log(y)
        return c - w - (w - mu) ** 2 / (2.0 * s2)

    return DensityModel(
        family="lognormal",
        log_pdf_fn=log_pdf_fn,
        norm=NormInfo(1.0, 0.0),
        w_center=mu,
        w_scale=sigma,
        meta={"mu": mu, "sigma": sigma, "delta": math.exp(mu),
              "theta": math.exp(mu - s2), "k": math.exp(s2)},
    )


@dataclass(frozen=True)
class StieltjesParams:
    """Base lognormal (mu, sigma) and perturbation amplitude |eps| <= 1."""

    mu: float
    sigma: float
    eps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError("need finite mu and sigma > 0")
        if not (math.isfinite(self.eps) and abs(self.eps) <= 1.0):
            raise ValueError(f"need |eps| <= 1, got {self.eps}")

    @property
    def delta(self) -> float:
        return math.exp(self.mu)

    @property
    def theta(self) -> float:
        return math.exp(self.mu - self.sigma * self.sigma)

    @property
    def k(self) -> float:
        return math.exp(self.sigma * self.sigma)


def make_stieltjes(p: StieltjesParams) -> DensityModel:
    """Sine-perturbed lognormal f0(y) * (1 + eps sin(2 pi (log y - mu) / sigma^2)).

    The perturbation integrates to zero against every integer power of y,
    so the whole family shares the lognormal's moment sequence while being
    neither log-symmetric nor R-symmetric for eps != 0.
    """
    s2 = p.sigma * p.sigma
    c = -_LOG_SQRT_2PI - math.log(p.sigma)
    mu, eps = p.mu, p.eps

    def log_pdf_fn(y: np.ndarray) -> np.ndarray:
        w = np.log(y)
        bracket = 1.0 + eps * np.sin(2.0 * math.pi * (w - mu) / s2)
        with np.errstate(all="ignore"):
            lb = np.log(np.maximum(bracket, 0.0))
        return c - w - (w - mu) ** 2 / (2.0 * s2) + lb

    return DensityModel(
        family="stieltjes",
        log_pdf_fn=log_pdf_fn,
        norm=NormInfo(1.0, 0.0),
        w_center=p.mu,
        w_scale=p.sigma,
        meta={"mu": p.mu, "sigma": p.sigma, "eps": p.eps,
              "delta": p.delta, "theta": p.theta, "k": p.k},
    )


def stieltjes_cross_residual(p: StieltjesParams, grid: GridSpec,
                             tol: float = 1e-12) -> tuple[ResidualReport, ResidualReport]:
    """Residuals of the two cross-identities linking f_eps and f_(-eps).

    y^2 f_eps(delta*y) = f_(-eps)(delta/y) and f_eps(theta*y) = f_(-eps)(theta/y):
    the perturbed family satisfies the symmetry identities only across the
    sign flip of eps, never within one member.
    """
    fp = make_stieltjes(p)
    fm = make_stieltjes(replace(p, eps=-p.eps))
    yv = grid.y()
    norm = float(np.max(fp.pdf(yv)))
    if not (math.isfinite(norm) and norm > 0.0):
        raise NumericsError("density vanishes on the grid")
    d1 = np.abs(yv * yv * fp.pdf(p.delta * yv) - fm.pdf(p.delta / yv))
    d2 = np.abs(fp.pdf(p.theta * yv) - fm.pdf(p.theta / yv))
    r1 = float(d1.max() / norm)
    r2 = float(d2.max() / norm)
    return (
        ResidualReport("LOG_SYM_CROSS", r1, norm, tol, r1 <= tol, grid),
        ResidualReport("R_SYM_CROSS", r2, norm, tol, r2 <= tol, grid),
    )


# ---------------------------------------------------------------------------
# General construction: piecewise density generated by psi


def pakes_log_unnorm(psi: PsiFunction, params: SymmetryParams, y) -> np.ndarray:
    """Log of the unnormalized piecewise density generated by psi.

    On piece i (in x = y/theta): k^(2i(i-1)) * x^(2i-1) * psi(k^(4(i-1)) x^2),
    where the psi argument always lands in (k^-4, 1]. Everything is assembled
    in logs so remote pieces neither overflow nor underflow.
    """
    theta, k = params.theta, params.k
    L = math.log(k)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    i = piece_indices(y, theta, k).astype(float)
    log_x = np.log(y) - math.log(theta)
    u = np.exp(4.0 * (i - 1.0) * L + 2.0 * log_x)
    with np.errstate(all="ignore"):
        return 2.0 * i * (i - 1.0) * L + (2.0 * i - 1.0) * log_x + np.log(psi(u))


def pakes_log_unnorm_alt(psi: PsiFunction, params: SymmetryParams, y) -> np.ndarray:
    """Independent evaluator of the same construction through omega(u) = psi(u)/u.

    Piece i reads theta^(-2i) * k^(2i(i+1)) * y^(2i+1) * omega(theta^-2 k^(4(i-1)) y^2);
    it must be pointwise proportional to pakes_log_unnorm with a y-free
    constant, which pakes_evaluator_agreement measures.
    """
    theta, k = params.theta, params.k
    L = math.log(k)
    log_theta = math.log(theta)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    i = piece_indices(y, theta, k).astype(float)
    log_y = np.log(y)
    log_u = -2.0 * log_theta + 4.0 * (i - 1.0) * L + 2.0 * log_y
    u = np.exp(log_u)
    with np.errstate(all="ignore"):
        log_omega = np.log(psi(u)) - log_u
    return -2.0 * i * log_theta + 2.0 * i * (i + 1.0) * L + (2.0 * i + 1.0) * log_y + log_omega


def pakes_evaluator_agreement(psi: PsiFunction, params: SymmetryParams,
                              grid: GridSpec) -> float:
    """Sup relative disagreement of the two evaluators after removing one shared ratio.

    The ratio is pinned at the mode; a nonzero result means the two piecewise
    formulas are not proportional, i.e. at least one of them is wrong.
    """
    yv = grid.y()
    la = pakes_log_unnorm(psi, params, yv)
    lb = pakes_log_unnorm_alt(psi, params, yv)
    ref = float(pakes_log_unnorm_alt(psi, params, params.theta)[0]
                - pakes_log_unnorm(psi, params, params.theta)[0])
    diff = lb - la - ref
    finite = np.isfinite(la) & np.isfinite(lb)
    if not finite.any():
        raise NumericsError("density vanished on the whole comparison grid")
    return float(np.max(np.abs(np.expm1(diff[finite]))))


_RING_STOP_REL = 1e-16
_RING_STOP_RUNS = 3
_MAX_RINGS = 400


def _piecewise_normalization(log_unnorm, theta: float, k: float) -> tuple[float, float, int]:
    """Total mass of a piecewise density, pieces added outward from i = 0.

    Each piece is integrated in w = log y, split at its geometric midpoint
    (where reflected seeds may kink). Stops after three consecutive rings
    contribute below 1e-16 of the running total; returns (mass, rel err, i_max).
    """
    L = math.log(k)
    w0 = math.log(theta)

    def phi(w: np.ndarray) -> np.ndarray:
        return log_unnorm(np.exp(w)) + w

    def piece_integral(i: int) -> tuple[float, float]:
        lo = w0 - 2.0 * i * L
        val, err = integrate_exp(phi, lo, lo + 2.0 * L, breaks=(lo + L,))
        return val, err * val

    total, abs_err = piece_integral(0)
    small_runs = 0
    i_max = 0
    for j in range(1, _MAX_RINGS):
        ring = 0.0
        for i in (j, -j):
            v, e = piece_integral(i)
            ring += v
            abs_err += e
        total += ring
        if ring < _RING_STOP_REL * total:
            small_runs += 1
            if small_runs >= _RING_STOP_RUNS:
                i_max = j
                break
        else:
            small_runs = 0
    else:
        raise NumericsError("piecewise normalization did not converge")
    return total, abs_err / total, i_max


@dataclass(frozen=True, kw_only=True)
class PakesDensity(DensityModel):
    """Doubly symmetric density generated by a psi function."""

    psi: PsiFunction
    params: SymmetryParams
    i_max: int


_AGREEMENT_TOL = 1e-12


def make_pakes_ds(psi: PsiFunction, params: SymmetryParams, *,
                  reflection_tol: float = 1e-10) -> PakesDensity:
    """Normalized doubly symmetric density from a generator psi.

    Refuses generators that do not satisfy the reflection identity to
    reflection_tol (use extend_seed to build compliant ones), and
    cross-checks the two independent piecewise evaluators at construction.
    """
    if abs(psi.k - params.k) > 1e-12 * params.k:
        raise ValueError(f"psi was built for k={psi.k!r} but params have k={params.k!r}")
    refl = psi_reflection_residual(psi, 1000)
    if refl > reflection_tol:
        raise ValueError(
            f"psi violates the reflection identity (residual {refl:.3e} > {reflection_tol:.1e})")

    def log_unnorm(y: np.ndarray) -> np.ndarray:
        return pakes_log_unnorm(psi, params, y)

    mass, rel_err, i_max = _piecewise_normalization(log_unnorm, params.theta, params.k)
    log_mass = math.log(mass)

    L = params.log_k
    span = 2 * i_max + 2
    check = GridSpec(math.log(params.theta) - 3.0 * L - 1.0,
                     math.log(params.theta) + 3.0 * L + 1.0, 257)
    agreement = pakes_evaluator_agreement(psi, params, check)
    if agreement > _AGREEMENT_TOL:
        raise NumericsError(f"piecewise evaluators disagree ({agreement:.3e})")

    return PakesDensity(
        family="pakes",
        log_pdf_fn=lambda y: log_unnorm(y) - log_mass,
        norm=NormInfo(mass, rel_err),
        w_center=math.log(params.delta),
        w_scale=max(math.sqrt(L), L),
        w_breaks=tuple(math.log(params.theta) + m * L for m in range(-span, span + 1)),
        meta={"theta": params.theta, "k": params.k, "delta": params.delta,
              "psi": psi.provenance, "evaluator_agreement": agreement},
        psi=psi,
        params=params,
        i_max=i_max,
    )


# ---------------------------------------------------------------------------
# Closed-form piecewise power density (constant generator)


def poly_ds_norm_const(k: float) -> float:
    """C(k) = 2 log k + sum_j k^(-2j^2) (k^(2j) - k^(-2j)) / j.

    The series is the exact mass of the unnormalized piecewise power
    density (the j-th term is the combined mass of pieces +-j); terms are
    summed with sinh to avoid cancellation and truncated at 1e-18 relative.
    """
    if not (math.isfinite(k) and k > 1.0):
        raise ValueError(f"k must be finite and > 1, got {k}")
    L = math.log(k)
    total = 2.0 * L
    for j in range(1, 10_000):
        term = 2.0 * math.exp(-2.0 * j * j * L) * math.sinh(2.0 * j * L) / j
        total += term
        if term < 1e-18 * total:
            return total
    raise NumericsError("normalization series did not converge")


@dataclass(frozen=True, kw_only=True)
class PolyDsDensity(DensityModel):
    """Closed-form doubly symmetric density, piecewise y^(2i-1) with mode theta."""

    params: SymmetryParams
    series_const: float


def make_poly_ds(params: SymmetryParams) -> PolyDsDensity:
    """Piecewise power density k^(2i(i-1)) (y/theta)^(2i-1) / (theta C(k)) on piece i.

    The series constant is cross-checked against quadrature of the
    unnormalized numerator at construction time.
    """
    theta, k = params.theta, params.k
    L = math.log(k)
    C = poly_ds_norm_const(k)
    log_norm = math.log(theta) + math.log(C)

    def log_unnorm(y: np.ndarray) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        i = piece_indices(y, theta, k).astype(float)
        log_x = np.log(y) - math.log(theta)
        return 2.0 * i * (i - 1.0) * L + (2.0 * i - 1.0) * log_x

    mass, _, i_max = _piecewise_normalization(log_unnorm, theta, k)
    defect = abs(mass / (theta * C) - 1.0)
    if defect > 1e-12:
        raise NumericsError(
            f"series constant and quadrature disagree by {defect:.3e}")

    span = 2 * i_max + 2
    return PolyDsDensity(
        family="poly",
        log_pdf_fn=lambda y: log_unnorm(y) - log_norm,
        norm=NormInfo(theta * C, defect),
        w_center=math.log(params.delta),
        w_scale=max(math.sqrt(L), L),
        w_breaks=tuple(math.log(theta) + 2.0 * m * L for m in range(-span, span + 1)),
        meta={"theta": theta, "k": k, "delta": params.delta,
              "series_quadrature_defect": defect},
        params=params,
        series_const=C,
    )


def poly_ds_boundary_limits(params: SymmetryParams, i: int) -> tuple[float, float]:
    """One-sided closed-form limits of the piecewise power density at y = theta*k^(2i).

    Both sides are evaluated through their own piece's integer k-exponent;
    the exponents coincide algebraically, so the two floats are identical
    and the continuity defect is exactly zero.
    """
    k = params.k
    denom = params.theta * poly_ds_norm_const(k)
    # boundary sits at x = k^(2i): upper end of piece 1-i, interior limit of piece -i
    j_below, j_above = 1 - i, -i
    n_below = 2 * j_below * (j_below - 1) + 2 * i * (2 * j_below - 1)
    n_above = 2 * j_above * (j_above - 1) + 2 * i * (2 * j_above - 1)
    return float(k) ** n_below / denom, float(k) ** n_above / denom
