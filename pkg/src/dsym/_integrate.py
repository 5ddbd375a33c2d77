"""Log-domain quadrature helpers shared by the density and moment code.

Everything here works in w = log(y). Integrals of y^s * f(y) dy become
integrals of exp((s+1)*w + log_pdf(exp(w))) dw, which keeps huge dynamic
ranges representable and lets one window-location routine serve every
family.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad


class NumericsError(RuntimeError):
    """Raised when a quadrature or search routine cannot certify its result."""


# Integration windows are cut where the integrand falls to 1e-18 of its peak.
WINDOW_DROP = math.log(1e18)

_SCAN_POINTS = 2049
_MAX_EXPANSIONS = 14


def _scan_log_integrand(phi: Callable[[np.ndarray], np.ndarray],
                        center: float, half_width: float) -> tuple[np.ndarray, np.ndarray]:
    w = np.linspace(center - half_width, center + half_width, _SCAN_POINTS)
    with np.errstate(all="ignore"):
        vals = np.asarray(phi(w), dtype=float)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    return w, vals


def find_window(phi: Callable[[np.ndarray], np.ndarray], center: float,
                scale: float) -> tuple[float, float]:
    """Locate [w_lo, w_hi] outside which exp(phi) is below 1e-18 of its peak.

    phi is the log-integrand; the scan widens geometrically until both edges
    have dropped, then the window is trimmed to the high region.
    """
    half = 8.0 + 6.0 * max(scale, 1.0)
    for _ in range(_MAX_EXPANSIONS):
        w, vals = _scan_log_integrand(phi, center, half)
        peak = vals.max()
        if not np.isfinite(peak):
            raise NumericsError("log-integrand has no finite values in scan window")
        # recenter on the located peak, then check decay at the edges
        ipk = int(np.argmax(vals))
        if ipk == 0 or ipk == len(w) - 1 or vals[0] > peak - WINDOW_DROP or vals[-1] > peak - WINDOW_DROP:
            center = float(w[ipk])
            half *= 1.7
            continue
        keep = np.nonzero(vals > peak - WINDOW_DROP)[0]
        lo = max(keep[0] - 1, 0)
        hi = min(keep[-1] + 1, len(w) - 1)
        return float(w[lo]), float(w[hi])
    raise NumericsError("integration window did not close; integral may diverge")


def panel_edges(w_lo: float, w_hi: float, breaks: Sequence[float]) -> np.ndarray:
    inner = [b for b in breaks if w_lo < b < w_hi]
    return np.unique(np.concatenate([[w_lo, w_hi], inner]))


def integrate_exp(phi: Callable[[np.ndarray], np.ndarray], w_lo: float, w_hi: float,
                  breaks: Sequence[float] = (), rel_tol: float = 1e-12) -> tuple[float, float]:
    """Adaptive quadrature of exp(phi(w)) over [w_lo, w_hi], split at breaks.

    Returns (value, relative error estimate). The peak value of phi is
    factored out so the working integrand stays within double range.
    """
    edges = panel_edges(w_lo, w_hi, breaks)
    mids = 0.5 * (edges[:-1] + edges[1:])
    probe = np.unique(np.concatenate([edges, mids]))
    with np.errstate(all="ignore"):
        pv = np.asarray(phi(probe), dtype=float)
    peak = np.nanmax(pv)
    if not np.isfinite(peak):
        raise NumericsError("integrand not finite anywhere on the window")

    def f(w: float) -> float:
        with np.errstate(all="ignore"):
            v = float(phi(np.asarray([w]))[0]) - peak
        return math.exp(v) if v > -745.0 else 0.0

    rough = max((w_hi - w_lo) * 1e-18, 1e-300)
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        out = quad(f, a, b, epsabs=rough * 1e-14, epsrel=rel_tol, limit=200, full_output=1)
        total += out[0]
        err += out[1]
        rough = max(rough, total)
    if total <= 0.0 or not math.isfinite(total):
        raise NumericsError("quadrature returned a non-positive total")
    return math.exp(peak) * total, err / total


def moment_quad(log_pdf: Callable[[np.ndarray], np.ndarray], s: float, w_center: float,
                w_scale: float, breaks: Sequence[float] = (),
                rel_tol: float = 1e-12) -> tuple[float, float]:
    """Integral of y^s f(y) dy computed in the log domain. Returns (value, rel err)."""

    def phi(w: np.ndarray) -> np.ndarray:
        return (s + 1.0) * w + log_pdf(np.exp(w))

    center = w_center + s * w_scale * w_scale
    w_lo, w_hi = find_window(phi, center, w_scale * (1.0 + abs(s)))
    return integrate_exp(phi, w_lo, w_hi, breaks, rel_tol)


def cell_masses(log_pdf: Callable[[np.ndarray], np.ndarray], w_edges: np.ndarray,
                order: int = 16) -> np.ndarray:
    """Per-cell integrals of f(y) dy = exp(log_pdf(e^w) + w) dw, vectorized Gauss-Legendre.

    Edges must be sorted and the integrand smooth inside each cell (callers
    splice derivative breakpoints into the edge set beforehand).
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    a = w_edges[:-1]
    h = np.diff(w_edges)
    # (cells, order) matrix of evaluation points
    pts = a[:, None] + (0.5 * (nodes + 1.0))[None, :] * h[:, None]
    flat = pts.ravel()
    with np.errstate(all="ignore"):
        vals = np.exp(log_pdf(np.exp(flat)) + flat)
    vals = np.where(np.isfinite(vals), vals, 0.0).reshape(pts.shape)
    return 0.5 * h * (vals @ weights)
