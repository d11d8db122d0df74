"""Spectral decompositions and the distance functionals built on them.

Everything here is dense and exact at desk scale: full SVD / eigensolves,
empirical Stieltjes transforms through singular values, and sup-norm (KS)
distances evaluated exactly at CDF jump points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, EmptyInputError


@dataclass(frozen=True)
class SpectralSummary:
    """Singular values (and optionally eigenvalues) of one shifted sample."""

    z: complex
    singular_values: np.ndarray  # ascending
    eigenvalues: np.ndarray | None
    source: tuple[str, str, int]  # (profile kind, dist tag, seed)

    def to_csv(self, path, eigen_path=None) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "sigma"])
            for i, s in enumerate(self.singular_values):
                writer.writerow([i, repr(float(s))])
        if self.eigenvalues is not None and eigen_path is not None:
            with open(eigen_path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["index", "lambda_re", "lambda_im"])
                for i, lam in enumerate(self.eigenvalues):
                    writer.writerow([i, repr(float(lam.real)), repr(float(lam.imag))])


@dataclass(frozen=True)
class HermitizedMatrix:
    """2n-by-2n block matrix [[0, Y], [Y*, 0]] whose spectrum is +-sigma(Y)."""

    matrix: np.ndarray
    z: complex


def singular_values(y: np.ndarray) -> np.ndarray:
    """All singular values, ascending."""
    try:
        vals = np.linalg.svd(np.asarray(y), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed on shape {np.shape(y)} matrix") from exc
    return np.sort(vals)


def eigenvalues(x: np.ndarray) -> np.ndarray:
    """Eigenvalues of a (generally non-normal) matrix, unordered."""
    try:
        return np.linalg.eigvals(np.asarray(x))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition failed on shape {np.shape(x)} matrix") from exc


def hermitize(y: np.ndarray, z: complex = 0.0) -> HermitizedMatrix:
    y = np.asarray(y)
    n = y.shape[0]
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    m[:n, n:] = y
    m[n:, :n] = y.conj().T
    return HermitizedMatrix(matrix=m, z=complex(z))


def empirical_stieltjes(svals: np.ndarray, eta: float) -> complex:
    """(1/n) sum 1/(sigma_i^2 - i eta): the normalized resolvent trace of
    Y*Y at spectral parameter i eta, without forming the resolvent."""
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    svals = np.asarray(svals, dtype=float)
    return complex(np.mean(1.0 / (svals**2 - 1j * eta)))


def count_small_singulars(svals: np.ndarray, threshold: float) -> int:
    """Number of singular values in the closed interval [0, threshold]."""
    return int(np.count_nonzero(np.asarray(svals) <= threshold))


def least_singular(svals: np.ndarray) -> float:
    return float(np.asarray(svals)[0])


def log_det_avg(svals: np.ndarray) -> float:
    """(1/n) sum log sigma_i; -inf sentinel when the matrix is singular."""
    svals = np.asarray(svals, dtype=float)
    if np.any(svals <= 0.0):
        return float("-inf")
    return float(np.mean(np.log(svals)))


def _ecdf_at(sorted_vals: np.ndarray, points: np.ndarray, side: str) -> np.ndarray:
    return np.searchsorted(sorted_vals, points, side=side) / len(sorted_vals)


def kolmogorov_distance(a, b) -> float:
    """Exact sup |F_a - F_b| between two empirical CDFs, evaluated at every
    jump point from both sides."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptyInputError("kolmogorov_distance needs nonempty samples")
    points = np.union1d(a, b)
    right = np.abs(_ecdf_at(a, points, "right") - _ecdf_at(b, points, "right"))
    left = np.abs(_ecdf_at(a, points, "left") - _ecdf_at(b, points, "left"))
    return float(max(right.max(), left.max()))


def _ks_against_continuous(sorted_vals: np.ndarray, cdf_at_vals: np.ndarray) -> float:
    """One-sample sup distance against a continuous CDF: attained (in the
    limit) at the empirical jump points, from the right and from the left."""
    n = len(sorted_vals)
    upper = np.abs(np.arange(1, n + 1) / n - cdf_at_vals)
    lower = np.abs(np.arange(0, n) / n - cdf_at_vals)
    return float(max(upper.max(), lower.max()))


def circular_law_distance(eigs) -> tuple[float, float]:
    """Sup-norm distances of the radial and angular marginals of an
    eigenvalue cloud from the uniform unit-disk law.

    Radial reference CDF: F(r) = min(r^2, 1); angular reference: uniform on
    (-pi, pi]. Both marginals vanish together exactly when the cloud's
    marginals match the disk's.
    """
    eigs = np.asarray(eigs, dtype=complex)
    if eigs.size == 0:
        raise EmptyInputError("circular_law_distance needs nonempty eigenvalues")
    radii = np.sort(np.abs(eigs))
    radial = _ks_against_continuous(radii, np.minimum(radii**2, 1.0))
    angles = np.sort(np.angle(eigs))
    angular = _ks_against_continuous(angles, (angles + np.pi) / (2.0 * np.pi))
    return radial, angular
