"""Random variates: a tabulated-CDF sampler for any density model, an exact
inverse-CDF sampler for the piecewise power family, and KS statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._integrate import cell_masses, find_window
from .core import DensityModel, SymmetryParams, piece_indices
from .densities import PolyDsDensity, poly_ds_norm_const

__all__ = [
    "CdfTable",
    "build_cdf",
    "SampleBatch",
    "sample",
    "poly_piece_masses",
    "poly_exact_cdf",
    "sample_poly_exact",
    "ks_statistic",
    "ks_two_sample",
    "ks_critical_value",
]


@dataclass(frozen=True)
class CdfTable:
    """Monotone CDF table on a log grid with PCHIP interpolation both ways.

    interp_error bounds the table's absolute CDF error (quadrature plus
    interpolation), estimated against a half-cell refinement.
    """

    family: str
    w_edges: np.ndarray
    F: np.ndarray
    interp_error: float
    forward: PchipInterpolator
    inverse: PchipInterpolator

    def cdf(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if not np.all(np.isfinite(y) & (y > 0.0)):
            raise ValueError("all y must be positive and finite")
        w = np.clip(np.log(y), self.w_edges[0], self.w_edges[-1])
        return np.clip(self.forward(w), 0.0, 1.0)

    def quantile(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if not np.all((u >= 0.0) & (u <= 1.0)):
            raise ValueError("all u must lie in [0, 1]")
        lo, hi = self.inverse.x[0], self.inverse.x[-1]
        return np.exp(self.inverse(np.clip(u, lo, hi)))


def build_cdf(d: DensityModel, resolution: int = 4096) -> CdfTable:
    """Tabulate the CDF of a density model over its mass-carrying window.

    Cells are log-spaced with the model's breakpoints spliced in so each cell
    is smooth; per-cell masses come from fixed-order Gauss-Legendre, and a
    half-cell refinement provides the error estimate.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")

    def phi(w: np.ndarray) -> np.ndarray:
        return d.log_pdf(np.exp(w)) + w

    w_lo, w_hi = find_window(phi, d.w_center, d.w_scale)
    edges = np.linspace(w_lo, w_hi, resolution + 1)
    inner = [b for b in d.w_breaks if w_lo < b < w_hi]
    if inner:
        edges = np.union1d(edges, inner)
        keep = np.concatenate([[True], np.diff(edges) > 1e-12 * (w_hi - w_lo)])
        edges = edges[keep]

    masses = cell_masses(d.log_pdf, edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    fine_edges = np.sort(np.concatenate([edges, mids]))
    fine_masses = cell_masses(d.log_pdf, fine_edges)

    raw = np.concatenate([[0.0], np.cumsum(masses)])
    raw_fine = np.concatenate([[0.0], np.cumsum(fine_masses)])
    total, total_fine = raw[-1], raw_fine[-1]
    quad_err = float(np.max(np.abs(raw / total - raw_fine[::2] / total_fine)))

    F = np.maximum.accumulate(raw / total)
    F[0], F[-1] = 0.0, 1.0
    forward = PchipInterpolator(edges, F)
    increasing = np.concatenate([[True], np.diff(F) > 0.0])
    inverse = PchipInterpolator(F[increasing], edges[increasing])
    interp_err = float(np.max(np.abs(forward(mids) - raw_fine[1::2] / total_fine)))
    return CdfTable(d.family, edges, F, quad_err + interp_err, forward, inverse)


@dataclass(frozen=True)
class SampleBatch:
    """Sampled values with the seed and family that produced them."""

    values: np.ndarray
    seed: int
    family: str

    def __len__(self) -> int:
        return len(self.values)


def _rng(seed: int) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(seed))


def sample(d: DensityModel, n: int, seed: int, table: CdfTable | None = None) -> SampleBatch:
    """n inverse-CDF draws from a density model; pass a prebuilt table to reuse it."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if table is None:
        table = build_cdf(d)
    u = _rng(seed).random(n)
    return SampleBatch(table.quantile(u), int(seed), d.family)


_PIECE_MASS_STOP = 1e-18


def poly_piece_masses(params: SymmetryParams) -> tuple[np.ndarray, np.ndarray]:
    """Piece indices (descending, so y ascends) and exact normalized masses.

    Piece i of the piecewise power density carries mass
    k^(-2i^2) sinh(2|i| log k)/(|i| C(k)) for i != 0 and 2 log(k)/C(k) for
    i = 0; the enumeration stops once a ring falls below 1e-18 of the total.
    """
    k = params.k
    L = params.log_k
    C = poly_ds_norm_const(k)
    half = []
    total = 2.0 * L / C
    for j in range(1, 10_000):
        m = math.exp(-2.0 * j * j * L) * math.sinh(2.0 * j * L) / (j * C)
        half.append(m)
        total += 2.0 * m
        if 2.0 * m < _PIECE_MASS_STOP * total:
            break
    j_max = len(half)
    i_values = np.arange(j_max, -j_max - 1, -1)
    masses = np.array(half[::-1] + [2.0 * L / C] + half)
    return i_values, masses / masses.sum()


def poly_exact_cdf(poly: PolyDsDensity, y) -> np.ndarray:
    """Closed-form CDF of the piecewise power density.

    Within piece i the primitive of x^(2i-1) is elementary (logarithmic for
    i = 0), so the CDF is a piece-mass prefix sum plus one explicit term.
    """
    params = poly.params
    theta, k, C = params.theta, params.k, poly.series_const
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not np.all(np.isfinite(y) & (y > 0.0)):
        raise ValueError("all y must be positive and finite")

    i_values, masses = poly_piece_masses(params)
    cum = np.cumsum(masses)
    j_max = int(i_values[0])

    i = piece_indices(y, theta, k)
    out = np.empty_like(y)
    below, above = i > j_max, i < -j_max
    out[below] = 0.0
    out[above] = 1.0
    inside = ~(below | above)
    ii = i[inside].astype(float)
    x = y[inside] / theta
    idx = j_max - i[inside]
    prefix = cum[idx] - masses[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        partial = np.where(
            ii == 0.0,
            np.log(x) / C,
            np.power(k, 2.0 * ii * (ii - 1.0))
            * (np.power(x, 2.0 * ii) - np.power(k, -4.0 * ii * ii))
            / (2.0 * ii * C),
        )
    out[inside] = prefix + partial
    return np.clip(out, 0.0, 1.0)


def sample_poly_exact(poly: PolyDsDensity, n: int, seed: int) -> SampleBatch:
    """Exact inverse-CDF draws from the piecewise power density.

    A piece is chosen from the exact mass vector, then the within-piece CDF
    x^(2i) (or log x on piece 0) is inverted in closed form.
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    params = poly.params
    theta, k = params.theta, params.k
    i_values, masses = poly_piece_masses(params)
    cum = np.cumsum(masses)
    cum[-1] = 1.0

    u = _rng(seed).random(n)
    idx = np.searchsorted(cum, u, side="left")
    v = (u - (cum[idx] - masses[idx])) / masses[idx]
    x = np.empty(n)
    for pos in np.unique(idx):
        m = idx == pos
        i = int(i_values[pos])
        if i == 0:
            x[m] = np.power(k, 2.0 * v[m])
        else:
            x[m] = k ** (-2.0 * i) * np.power(
                1.0 + v[m] * (k ** (4.0 * i) - 1.0), 1.0 / (2.0 * i))
    return SampleBatch(theta * x, int(seed), poly.family)


def _values(batch) -> np.ndarray:
    v = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if len(v) == 0:
        raise ValueError("need at least one sample")
    return np.sort(v)


def ks_statistic(batch, cdf) -> float:
    """One-sample KS distance between a batch and a CDF callable."""
    v = _values(batch)
    F = np.asarray(cdf(v), dtype=float)
    n = len(v)
    steps = np.arange(1, n + 1) / n
    return float(max(np.max(steps - F), np.max(F - (steps - 1.0 / n))))


def ks_two_sample(a, b) -> float:
    """Two-sample KS distance between two batches."""
    va, vb = _values(a), _values(b)
    both = np.concatenate([va, vb])
    fa = np.searchsorted(va, both, side="right") / len(va)
    fb = np.searchsorted(vb, both, side="right") / len(vb)
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(n: int, alpha: float = 0.01, n2: int | None = None) -> float:
    """Asymptotic KS critical value sqrt(-ln(alpha/2)/2) with the sample scaling.

    For the two-sample statistic pass n2; the effective size is then
    n*n2/(n+n2).
    """
    if n <= 0 or (n2 is not None and n2 <= 0):
        raise ValueError("sample sizes must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    eff = n if n2 is None else n * n2 / (n + n2)
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(eff)
