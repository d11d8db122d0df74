"""Seeded matrix sampling: X_ij = sqrt(S_ij) * x_ij with reproducible entries.

Entries come from a counter-based generator (Philox) with one counter block
reserved per matrix position, so entry (i, j) is a pure function of
(seed, i, j) and any parallel or partial assembly reproduces the same matrix
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

from .profile import VarianceProfile

_SEED_MASK = (1 << 64) - 1
_COMPANION_XOR = 0x9E3779B97F4A7C15  # fixed so companion runs are replayable


@dataclass(frozen=True)
class EntryDistribution:
    """Mean-0 variance-1 entry law plus the hypothesis flags experiments check."""

    tag: str
    bounded_density: bool
    subgaussian: bool
    all_moments: bool
    complex_valued: bool


GAUSSIAN_REAL = EntryDistribution("gaussian_real", True, True, True, False)
GAUSSIAN_COMPLEX = EntryDistribution("gaussian_complex", True, True, True, True)
UNIFORM_REAL = EntryDistribution("uniform_real", True, True, True, False)
RADEMACHER = EntryDistribution("rademacher", False, True, True, False)

DISTRIBUTIONS = {d.tag: d for d in (GAUSSIAN_REAL, GAUSSIAN_COMPLEX, UNIFORM_REAL, RADEMACHER)}

# CLI spellings
DISTRIBUTION_ALIASES = {
    "gaussian": GAUSSIAN_REAL,
    "cgaussian": GAUSSIAN_COMPLEX,
    "uniform": UNIFORM_REAL,
    "rademacher": RADEMACHER,
}


@dataclass(frozen=True)
class MatrixSample:
    profile: VarianceProfile
    dist: EntryDistribution
    seed: int
    matrix: np.ndarray


def _uniform_lanes(seed: int, block_start: int, blocks: int) -> np.ndarray:
    """Open-interval (0,1) uniforms, shape (blocks, 2): lanes 0 and 1 of each
    Philox counter block. advance() jumps whole 4-output blocks, which is what
    keys each matrix entry to its own counter."""
    bg = Philox(key=np.uint64(seed & _SEED_MASK))
    if block_start:
        bg.advance(block_start)
    raw = Generator(bg).integers(0, 2**64, dtype=np.uint64, size=4 * blocks)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return u.reshape(blocks, 4)[:, :2]


def _draw_entries(dist: EntryDistribution, u: np.ndarray) -> np.ndarray:
    if dist.tag == "gaussian_real":
        return ndtri(u[:, 0])
    if dist.tag == "gaussian_complex":
        return (ndtri(u[:, 0]) + 1j * ndtri(u[:, 1])) / np.sqrt(2.0)
    if dist.tag == "uniform_real":
        return np.sqrt(3.0) * (2.0 * u[:, 0] - 1.0)
    if dist.tag == "rademacher":
        return np.where(u[:, 0] < 0.5, -1.0, 1.0)
    raise ValueError(f"unknown distribution tag {dist.tag!r}")


def raw_entries(dist: EntryDistribution, seed: int, n: int, row_start: int = 0, rows: int | None = None) -> np.ndarray:
    """Normalized entries x_ij for rows [row_start, row_start+rows) of an
    n-by-n matrix. Entry (i, j) always uses counter block i*n + j."""
    if rows is None:
        rows = n - row_start
    u = _uniform_lanes(seed, row_start * n, rows * n)
    return _draw_entries(dist, u).reshape(rows, n)


def entry_value(dist: EntryDistribution, seed: int, n: int, i: int, j: int) -> complex:
    """Single normalized entry, regenerated independently of any other draw."""
    u = _uniform_lanes(seed, i * n + j, 1)
    return _draw_entries(dist, u)[0]


def sample(p: VarianceProfile, d: EntryDistribution, seed: int) -> MatrixSample:
    """One realization X = (sqrt(S_ij) x_ij); zero variance gives exact zeros."""
    x = raw_entries(d, seed, p.n)
    matrix = np.sqrt(p.dense()) * x
    return MatrixSample(profile=p, dist=d, seed=int(seed) & _SEED_MASK, matrix=matrix)


def gaussian_companion(s: MatrixSample) -> MatrixSample:
    """Gaussian model with the same profile and real/complex type, on a seed
    derived from the input sample's seed."""
    dist = GAUSSIAN_COMPLEX if s.dist.complex_valued else GAUSSIAN_REAL
    return sample(s.profile, dist, (s.seed ^ _COMPANION_XOR) & _SEED_MASK)


def shifted(s: MatrixSample, z: complex) -> np.ndarray:
    """Y_z = X - zI."""
    y = s.matrix.astype(complex, copy=True)
    y[np.diag_indices_from(y)] -= z
    return y
