"""Parity-resolved spectra of the rotor Hamiltonian along mu0 = chi0/chi,
density of states, unfolded level spacings and ESQPT indicators."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .model import rotated_hamiltonian
from .spinalg import EigenConvergenceError, hermitian_eigen

PARITY_COMMUTE_TOL = 1e-10
DEFAULT_WINDOW = 5
GAP_THRESHOLD = 1e-3


class ParityMixingError(ValueError):
    pass


class SweepPointError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectrumSweep:
    two_j: int
    chi: float
    mu0_grid: np.ndarray
    levels: np.ndarray  # (n_points, 2j+1), ascending in each row
    parity_labels: np.ndarray  # (n_points, 2j+1), +1 even / -1 odd per level


@dataclass(frozen=True)
class DOSHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    peak_energy: float


@dataclass(frozen=True)
class SpacingStats:
    spacings: np.ndarray
    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float


@dataclass(frozen=True)
class BlockGap:
    parity: int
    size: float  # smallest adjacent gap inside the block (nan if < 2 levels)
    energy: float  # midpoint of the two levels
    normalized: float  # gap / mean block spacing


@dataclass(frozen=True)
class EsqptReport:
    mu0_grid: np.ndarray
    dos_peak: np.ndarray
    gaps: List[List[BlockGap]]  # per grid point: even block, odd block
    min_normalized_gap: np.ndarray
    clustered: np.ndarray  # bool per grid point
    threshold: float

    @property
    def onset(self) -> Optional[float]:
        """Smallest mu0 at which the clustering criterion holds."""
        idx = np.nonzero(self.clustered)[0]
        return float(self.mu0_grid[idx[0]]) if idx.size else None

    @property
    def region(self):
        idx = np.nonzero(self.clustered)[0]
        if not idx.size:
            return None
        return float(self.mu0_grid[idx[0]]), float(self.mu0_grid[idx[-1]])


def block_indices(two_j):
    n = np.arange(two_j + 1)
    return n[n % 2 == 0], n[n % 2 == 1]


def parity_blocks(h, two_j):
    """Split H into its even-n and odd-n blocks after checking that it does
    not couple them."""
    h = np.asarray(h)
    ev, od = block_indices(two_j)
    if h.shape != (two_j + 1, two_j + 1):
        raise ValueError(f"matrix shape {h.shape} does not match j={two_j}/2")
    off = np.abs(h[np.ix_(ev, od)])
    if off.size:
        worst = float(off.max())
        scale = max(1.0, float(np.abs(h).max()))
        if worst > PARITY_COMMUTE_TOL * scale:
            a, b = np.unravel_index(np.argmax(off), off.shape)
            raise ParityMixingError(
                f"H couples parity blocks: |H[{ev[a]},{od[b]}]| = {worst:.3e}")
    return h[np.ix_(ev, ev)], h[np.ix_(od, od)]


def _block_spectrum(h, two_j):
    he, ho = parity_blocks(h, two_j)
    we = hermitian_eigen(he).values
    wo = hermitian_eigen(ho).values if ho.size else np.zeros(0)
    levels = np.concatenate([we, wo])
    labels = np.concatenate([np.ones(we.size, dtype=int), -np.ones(wo.size, dtype=int)])
    order = np.argsort(levels, kind="stable")
    return levels[order], labels[order]


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def eigen_sweep(two_j, chi, mu0_from, mu0_to, n_points, threads=None):
    """Diagonalize H'(chi0 = mu0 chi, chi) on a uniform mu0 grid."""
    if n_points < 2:
        raise ValueError(f"a sweep needs at least 2 points, got {n_points}")
    if not chi > 0:
        raise ValueError(f"chi must be positive, got {chi}")
    grid = np.linspace(mu0_from, mu0_to, n_points)

    def point(mu0):
        try:
            return _block_spectrum(rotated_hamiltonian(two_j, mu0 * chi, chi), two_j)
        except EigenConvergenceError as exc:
            raise SweepPointError(f"eigensolver failed at mu0={mu0!r}: {exc}") from exc

    results = _map(point, grid, threads)
    levels = np.array([r[0] for r in results])
    labels = np.array([r[1] for r in results])
    return SpectrumSweep(two_j, float(chi), grid, levels, labels)


def default_bins(n_levels):
    return max(1, n_levels // 4)


def density_of_states(levels, n_bins=None):
    """Histogram of levels over [min, max]; peak at the leftmost tallest bin."""
    e = np.asarray(levels, dtype=float).ravel()
    if e.size < 2:
        raise ValueError("density of states needs at least 2 levels")
    lo, hi = float(e.min()), float(e.max())
    if hi == lo:
        return DOSHistogram(np.array([lo, hi]), np.array([e.size]), lo)
    n_bins = default_bins(e.size) if n_bins is None else int(n_bins)
    counts, edges = np.histogram(e, bins=n_bins, range=(lo, hi))
    k = int(np.argmax(counts))
    return DOSHistogram(edges, counts, 0.5 * (edges[k] + edges[k + 1]))


def spacing_distribution(levels, window=DEFAULT_WINDOW, n_bins=None):
    """Nearest-neighbour spacings unfolded by a sliding local mean.

    Each raw spacing d_i is divided by the mean of d_(i-w)..d_(i+w), the
    window being clipped at the ends of the spectrum.
    """
    e = np.sort(np.asarray(levels, dtype=float).ravel())
    if e.size < 10:
        raise ValueError(f"spacing statistics need at least 10 levels, got {e.size}")
    if window < 1:
        raise ValueError("window must be >= 1")
    d = np.diff(e)
    csum = np.concatenate([[0.0], np.cumsum(d)])
    i = np.arange(d.size)
    lo = np.maximum(0, i - window)
    hi = np.minimum(d.size, i + window + 1)
    local = (csum[hi] - csum[lo]) / (hi - lo)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(local > 0, d / local, 0.0)
    n_bins = max(1, int(np.sqrt(s.size))) if n_bins is None else int(n_bins)
    counts, edges = np.histogram(s, bins=n_bins, range=(0.0, max(float(s.max()), 1e-12)))
    return SpacingStats(s, edges, counts, float(s.mean()))


def _block_gap(levels, parity):
    if levels.size < 2:
        return BlockGap(parity, float("nan"), float("nan"), float("nan"))
    g = np.diff(levels)
    k = int(np.argmin(g))
    mean_spacing = (levels[-1] - levels[0]) / (levels.size - 1)
    norm = g[k] / mean_spacing if mean_spacing > 0 else float("nan")
    return BlockGap(parity, float(g[k]), float(0.5 * (levels[k] + levels[k + 1])), float(norm))


def esqpt_estimate(sweep, threshold=GAP_THRESHOLD, n_bins=None):
    """Per grid point: DOS peak and the smallest intra-block gap.

    A point is flagged as clustered when the smallest gap of either block,
    divided by that block's mean level spacing, drops below ``threshold``.
    """
    peaks, gaps, mins = [], [], []
    for row, lab in zip(sweep.levels, sweep.parity_labels):
        peaks.append(density_of_states(row, n_bins).peak_energy if row.size >= 2 else row[0])
        point = [_block_gap(row[lab == p], p) for p in (1, -1)]
        gaps.append(point)
        norms = [g.normalized for g in point if np.isfinite(g.normalized)]
        mins.append(min(norms) if norms else float("nan"))
    mins = np.array(mins)
    with np.errstate(invalid="ignore"):
        clustered = mins < threshold
    return EsqptReport(sweep.mu0_grid, np.array(peaks), gaps, mins, clustered, threshold)
