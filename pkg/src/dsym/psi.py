"""Seed functions and their reflection extension.

Every doubly symmetric density with ratio k is generated by one nonnegative
function psi on (k^-4, 1] obeying the reflection psi(u) = psi(1/(k^4 u)).
Choosing psi freely on the upper half [k^-2, 1] (the "seed") and reflecting
it onto the lower half always satisfies that constraint; the constructors
here build the two families used throughout (power seeds u^(alpha - 1/2) and
the seed that reproduces the lognormal), plus diagnostics for smoothness and
unimodality of the resulting density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "PsiSeed",
    "PsiFunction",
    "make_psi_alpha",
    "make_psi_lognormal",
    "psi_from_callable",
    "extend_seed",
    "psi_reflection_residual",
    "SmoothnessReport",
    "smoothness_report",
    "UnimodalityReport",
    "unimodality_check",
]

# arguments may overshoot interval ends by rounding; clamp within this band
_CLAMP_SLACK = 1e-9


def _check_k(k: float) -> None:
    if not (math.isfinite(k) and k > 1.0):
        raise ValueError(f"k must be finite and > 1, got {k}")


def _clamped(u, lo: float, hi: float) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    if arr.size and ((arr < lo * (1.0 - _CLAMP_SLACK)).any() or (arr > hi * (1.0 + _CLAMP_SLACK)).any()):
        raise ValueError(f"argument outside [{lo!r}, {hi!r}]")
    return np.clip(arr, lo, hi)


@dataclass(frozen=True)
class PsiSeed:
    """Nonnegative seed on [k^-2, 1]; deriv is optional and analytic when given."""

    k: float
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    family: str = "custom"

    def __post_init__(self) -> None:
        _check_k(self.k)

    @property
    def lower(self) -> float:
        return self.k ** -2.0

    def __call__(self, u):
        out = np.asarray(self.fn(_clamped(u, self.lower, 1.0)), dtype=float)
        if np.asarray(u).ndim == 0:
            return float(out.reshape(-1)[0])
        return out


@dataclass(frozen=True)
class PsiFunction:
    """Generator function on (k^-4, 1]; reflective constructors guarantee the symmetry."""

    k: float
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    provenance: str = "custom"

    def __post_init__(self) -> None:
        _check_k(self.k)

    @property
    def lower(self) -> float:
        return self.k ** -4.0

    def __call__(self, u):
        out = np.asarray(self.fn(_clamped(u, self.lower, 1.0)), dtype=float)
        if np.asarray(u).ndim == 0:
            return float(out.reshape(-1)[0])
        return out


def make_psi_alpha(alpha: float, k: float) -> PsiSeed:
    """Power seed u^(alpha - 1/2); yields unimodal densities exactly for alpha in (0, 1)."""
    _check_k(k)
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    e = alpha - 0.5

    def fn(u: np.ndarray) -> np.ndarray:
        return u ** e

    def deriv(u: np.ndarray) -> np.ndarray:
        return e * u ** (e - 1.0)

    return PsiSeed(k=k, fn=fn, deriv=deriv, family=f"alpha({alpha:g})")


def make_psi_lognormal(k: float) -> PsiFunction:
    """The generator whose doubly symmetric density is the lognormal itself.

    psi(u) = u^(-1/2) exp(-log(u)^2 / (8 log k)); the reflection identity
    holds in closed form, so no seed extension is needed.
    """
    _check_k(k)
    L = math.log(k)

    def fn(u: np.ndarray) -> np.ndarray:
        lu = np.log(u)
        return np.exp(-0.5 * lu - lu * lu / (8.0 * L))

    def deriv(u: np.ndarray) -> np.ndarray:
        lu = np.log(u)
        return fn(u) * (-0.5 / u - lu / (4.0 * L * u))

    return PsiFunction(k=k, fn=fn, deriv=deriv, provenance="lognormal")


def psi_from_callable(fn: Callable[[np.ndarray], np.ndarray], k: float,
                      deriv: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                      provenance: str = "custom") -> PsiFunction:
    """Wrap a raw callable as a generator WITHOUT enforcing the reflection.

    Use extend_seed for constructions that must satisfy the symmetry; this
    wrapper exists so that violations can be measured.
    """
    return PsiFunction(k=k, fn=fn, deriv=deriv, provenance=provenance)


def extend_seed(seed: PsiSeed) -> PsiFunction:
    """Extend a seed to (k^-4, 1] by psi(u) = seed(1/(k^4 u)) below k^-2.

    The extension is continuous at k^-2 and satisfies the reflection
    identity by construction. Raises if the seed is negative anywhere on a
    dense scan of its interval.
    """
    k = seed.k
    k4 = k ** 4.0
    mid = k ** -2.0
    scan = np.geomspace(mid, 1.0, 2001)
    if np.min(seed(scan)) < 0.0:
        raise ValueError("seed must be nonnegative on [k^-2, 1]")

    def fn(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        hi = u >= mid
        out[hi] = seed(u[hi])
        out[~hi] = seed(1.0 / (k4 * u[~hi]))
        return out

    deriv = None
    if seed.deriv is not None:
        sd = seed.deriv

        def deriv(u: np.ndarray) -> np.ndarray:
            u = np.asarray(u, dtype=float)
            out = np.empty_like(u)
            hi = u >= mid
            out[hi] = sd(_clamped(u[hi], mid, 1.0))
            v = 1.0 / (k4 * u[~hi])
            out[~hi] = -np.asarray(sd(_clamped(v, mid, 1.0)), dtype=float) / (k4 * u[~hi] ** 2)
            return out

    return PsiFunction(k=k, fn=fn, deriv=deriv, provenance=f"seed:{seed.family}")


def psi_reflection_residual(psi: PsiFunction, n_points: int = 1000) -> float:
    """Sup of |psi(u) - psi(1/(k^4 u))| over log-spaced u, relative to sup psi."""
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    k4 = psi.k ** 4.0
    u = np.geomspace(psi.lower, 1.0, n_points + 1)[1:]
    vals = psi(u)
    top = float(np.max(vals))
    if top <= 0.0:
        raise ValueError("psi vanishes identically on the scan")
    refl = psi(1.0 / (k4 * u))
    return float(np.max(np.abs(vals - refl)) / top)


def _deriv_at(psi: PsiFunction, u: float, side: str) -> float:
    """One-sided derivative; the analytic derivative is used when available.

    At the interval midpoint k^-2 the two one-sided slopes of an extended
    seed differ in sign, so the smoothness conditions are stated for the
    seed side (from above at k^-2, from below at 1).
    """
    if psi.deriv is not None:
        return float(np.asarray(psi.deriv(np.asarray([u])), dtype=float)[0])
    h = 1e-6 * u
    if side == "above":
        f0, f1, f2 = (float(psi(u)), float(psi(u + h)), float(psi(u + 2 * h)))
        return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
    f0, f1, f2 = (float(psi(u)), float(psi(u - h)), float(psi(u - 2 * h)))
    return (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h)


@dataclass(frozen=True)
class SmoothnessReport:
    """Continuity/differentiability defects of the induced density at grid points.

    The density built from psi is continuous at the piece endpoints iff
    psi(1) = psi(k^-4), continuously differentiable at the piece midpoints
    iff psi'(k^-2) = 0, and at the piece endpoints iff 2 psi'(1) = -psi(1).
    """

    continuity_defect: float
    midpoint_defect: float
    endpoint_defect: float
    continuous: bool
    midpoint_smooth: bool
    endpoint_smooth: bool
    unimodal: bool


def smoothness_report(psi: PsiFunction, tol: float = 1e-6) -> SmoothnessReport:
    k = psi.k
    p1 = float(psi(1.0))
    if p1 <= 0.0:
        raise ValueError("psi(1) must be positive for the relative continuity defect")
    cont = abs(p1 - float(psi(k ** -4.0))) / p1
    d_mid = _deriv_at(psi, k ** -2.0, side="above")
    d_end = _deriv_at(psi, 1.0, side="below")
    mid = abs(d_mid)
    end = abs(2.0 * d_end + p1)
    return SmoothnessReport(
        continuity_defect=cont,
        midpoint_defect=mid,
        endpoint_defect=end,
        continuous=cont <= tol,
        midpoint_smooth=mid <= tol,
        endpoint_smooth=end <= tol,
        unimodal=unimodality_check(psi).unimodal,
    )


@dataclass(frozen=True)
class UnimodalityReport:
    unimodal: bool
    criterion: str
    first_violation: Optional[float] = None


_STRICT_SLACK = 1e-12


def unimodality_check(psi: PsiFunction, n_points: int = 10_000) -> UnimodalityReport:
    """Whether the induced density is unimodal (strictly rising to the mode).

    Equivalent statements: sqrt(u) psi(u) strictly increasing and
    psi(u)/sqrt(u) strictly decreasing; with a derivative available, both
    amount to |(log psi)'(u)| < 1/(2u) on (k^-2, 1). Strictness is applied
    with a 1e-12 slack so rounding plateaus do not produce false negatives
    on the scan path.
    """
    k = psi.k
    if psi.deriv is not None:
        u = np.geomspace(k ** -2.0, 1.0, n_points + 2)[1:-1]
        vals = psi(u)
        with np.errstate(all="ignore"):
            ratio = 2.0 * u * np.abs(np.asarray(psi.deriv(u), dtype=float)) / vals
        bad = ~(ratio < 1.0 - _STRICT_SLACK)
        if bad.any():
            return UnimodalityReport(False, "derivative", float(u[np.argmax(bad)]))
        return UnimodalityReport(True, "derivative")

    u = np.geomspace(psi.lower, 1.0, n_points)
    r = np.sqrt(u)
    vals = psi(u)
    up = r * vals
    down = vals / r
    inc_bad = np.diff(up) < -_STRICT_SLACK * np.max(np.abs(up))
    dec_bad = np.diff(down) > _STRICT_SLACK * np.max(np.abs(down))
    bad = inc_bad | dec_bad
    if bad.any():
        return UnimodalityReport(False, "scan", float(u[1:][np.argmax(bad)]))
    return UnimodalityReport(True, "scan")
