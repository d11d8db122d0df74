"""Doubly stochastic band variance profiles and the bounded-inverse condition.

A profile is the matrix of entry variances of a random band matrix. Two
structured families are supported (cyclic block tridiagonal and symmetric
circulant) plus arbitrary explicit matrices loaded from CSV. The module also
measures the stability of inverting ``I - [[y2 S, y1 S^T], [y1 S, y2 S^T]]``
in the L-infinity operator norm, by dense inversion and by structure-aware
fast paths.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateProfileError,
    DimensionMismatchError,
    SingularOperatorError,
    SpectrumProximityError,
)

DOUBLY_STOCHASTIC_TOL = 1e-10
DEFAULT_CONDITION_CAP = 1e12
DEFAULT_SPECTRUM_MARGIN = 1e-9


@dataclass(frozen=True)
class VarianceProfile:
    """Nonnegative n-by-n variance matrix S with bandwidth metadata.

    For ``kind="circulant"`` only the first row is stored; the full matrix is
    ``S[i, j] = row[(j - i) % n]``. ``cw`` records the bandwidth constant
    ``max(S) * w`` measured on the constructed entries.
    """

    n: int
    w: int
    kind: str  # block_band | circulant | explicit
    entries: np.ndarray
    cw: float

    def dense(self) -> np.ndarray:
        """Materialize the full n-by-n matrix."""
        if self.kind == "circulant":
            idx = (np.arange(self.n)[None, :] - np.arange(self.n)[:, None]) % self.n
            return self.entries[idx]
        return self.entries

    def first_row(self) -> np.ndarray:
        if self.kind == "circulant":
            return self.entries
        return self.dense()[0]

    @property
    def max_entry(self) -> float:
        return float(np.max(self.entries))


@dataclass(frozen=True)
class ProfileFunction:
    """Nonnegative weight function generating a circulant profile row.

    The row is ``(1/w) * evaluator(|b|_n / w)`` over lattice offsets b, then
    rescaled to unit row sum. ``support_radius`` is in units of w;
    ``np.inf`` means unbounded support.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    description: str


INDICATOR = ProfileFunction(
    evaluator=lambda x: np.where(x <= 1.0, 1.0, 0.0),
    support_radius=1.0,
    description="indicator",
)

GAUSS = ProfileFunction(
    evaluator=lambda x: np.exp(-0.5 * np.asarray(x, dtype=float) ** 2),
    support_radius=np.inf,
    description="gauss",
)

PROFILE_FUNCTIONS = {"indicator": INDICATOR, "gauss": GAUSS}


def build_block_band(n: int, w: int) -> VarianceProfile:
    """Cyclic block tridiagonal profile: S_ij = 1/(3w) when the w-blocks of i
    and j are at cyclic distance <= 1, else 0."""
    if n <= 0 or w <= 0:
        raise DimensionMismatchError(f"n={n}, w={w} must be positive")
    if n % w != 0:
        raise DimensionMismatchError(f"bandwidth w={w} must divide n={n}")
    length = n // w
    if length < 3:
        raise DimensionMismatchError(
            f"need at least 3 blocks for a cyclic tridiagonal pattern, got n/w={length}"
        )
    blocks = np.arange(n) // w
    diff = np.abs(blocks[None, :] - blocks[:, None])
    cyc = np.minimum(diff, length - diff)
    entries = np.where(cyc <= 1, 1.0 / (3.0 * w), 0.0)
    return VarianceProfile(n=n, w=w, kind="block_band", entries=entries, cw=float(entries.max() * w))


def build_circulant(n: int, w: int, f: ProfileFunction) -> VarianceProfile:
    """Symmetric circulant profile from a weight function on graph distance.

    The raw row is (1/w) f(|b|_n / w); it is rescaled to exact unit sum so the
    profile is doubly stochastic without the small constant slack a continuum
    normalization would leave.
    """
    if n <= 0 or w <= 0:
        raise DimensionMismatchError(f"n={n}, w={w} must be positive")
    if n < 2 * w:
        raise DimensionMismatchError(f"need n >= 2w, got n={n}, w={w}")
    b = np.arange(n)
    graph_dist = np.minimum(b, n - b)
    raw = f.evaluator(graph_dist / w) / w
    raw = np.asarray(raw, dtype=float)
    if np.any(raw < 0):
        raise DegenerateProfileError(f"profile function {f.description!r} is negative on the lattice")
    total = raw.sum()
    if total <= 0:
        raise DegenerateProfileError(
            f"profile function {f.description!r} puts no mass on the n={n}, w={w} lattice"
        )
    row = raw / total
    return VarianceProfile(n=n, w=w, kind="circulant", entries=row, cw=float(row.max() * w))


def from_entries(entries: np.ndarray, w: int | None = None) -> VarianceProfile:
    """Wrap an explicit matrix. Only shape is enforced; use validate() to
    measure the doubly stochastic invariants."""
    entries = np.asarray(entries, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {entries.shape}")
    n = entries.shape[0]
    max_entry = float(entries.max()) if entries.size else 0.0
    if w is None:
        # natural bandwidth scale of a doubly stochastic profile: entries are O(1/w)
        w = max(1, int(np.floor(1.0 / max_entry))) if max_entry > 0 else 1
    return VarianceProfile(n=n, w=int(w), kind="explicit", entries=entries, cw=max_entry * w)


def load_explicit_csv(path, w: int | None = None) -> VarianceProfile:
    """Read an n-by-n profile from CSV: n rows, comma-separated, no header."""
    with open(path, newline="") as fh:
        rows = [[float(cell) for cell in row] for row in csv.reader(fh) if row]
    entries = np.array(rows, dtype=float)
    return from_entries(entries, w=w)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool | None  # None marks informational checks with no pass bar
    value: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    def __getitem__(self, name: str) -> ValidationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(p: VarianceProfile) -> ValidationReport:
    """Measure every profile invariant. Diagnostic only, never raises."""
    dense = p.dense()
    checks = []

    neg = float(max(0.0, -dense.min())) if dense.size else 0.0
    checks.append(ValidationCheck("nonnegativity", neg == 0.0, neg))

    row_defect = float(np.max(np.abs(dense.sum(axis=1) - 1.0)))
    col_defect = float(np.max(np.abs(dense.sum(axis=0) - 1.0)))
    checks.append(ValidationCheck("row_sums", row_defect <= DOUBLY_STOCHASTIC_TOL, row_defect))
    checks.append(ValidationCheck("col_sums", col_defect <= DOUBLY_STOCHASTIC_TOL, col_defect))

    ratio = float(dense.max() * p.w)
    checks.append(ValidationCheck("max_entry_ratio", ratio <= p.cw + 1e-12, ratio))

    if p.kind == "circulant":
        row = p.entries
        sym_defect = float(np.max(np.abs(row - row[(-np.arange(p.n)) % p.n])))
        checks.append(ValidationCheck("circulant_symmetry", sym_defect == 0.0, sym_defect))
    if p.kind == "block_band":
        pattern = build_block_band(p.n, p.w).dense() if p.n % p.w == 0 and p.n // p.w >= 3 else None
        if pattern is not None:
            defect = float(np.max(np.abs(dense - pattern)))
            checks.append(ValidationCheck("block_pattern", defect == 0.0, defect))

    checks.append(ValidationCheck("diagonal_band_mass", None, _largest_band_mass_constant(dense, p.w)))
    return ValidationReport(tuple(checks))


def _largest_band_mass_constant(dense: np.ndarray, w: int) -> float:
    """Largest c such that min{S_ij : |i-j|_n <= c w} >= c / w.

    The minimum over the cyclic band of radius r is a step function of r, so
    scan integer radii and intersect each step with the constraint c <= m_r w.
    """
    n = dense.shape[0]
    diff = np.abs(np.arange(n)[None, :] - np.arange(n)[:, None])
    cyc = np.minimum(diff, n - diff)
    best = 0.0
    for r in range(n // 2 + 1):
        m_r = float(dense[cyc <= r].min())
        if m_r <= 0.0:
            break
        upper = min((r + 1) / w, m_r * w)
        if upper >= r / w:
            best = max(best, upper)
        else:
            break
    return best


def _linf_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m).sum(axis=1)))


def inverse_norm_dense(
    p: VarianceProfile,
    y1: complex,
    y2: complex,
    condition_cap: float = DEFAULT_CONDITION_CAP,
) -> float:
    """L-inf -> L-inf norm of (I_2n - [[y2 S, y1 S^T], [y1 S, y2 S^T]])^(-1),
    assembled and inverted densely."""
    s = p.dense()
    n = p.n
    block = np.empty((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = y2 * s
    block[:n, n:] = y1 * s.T
    block[n:, :n] = y1 * s
    block[n:, n:] = y2 * s.T
    a = np.eye(2 * n, dtype=complex) - block
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError(f"2n x 2n operator singular at y1={y1}, y2={y2}") from exc
    cond = _linf_norm(a) * _linf_norm(inv)
    if not np.isfinite(cond) or cond > condition_cap:
        raise SingularOperatorError(
            f"condition estimate {cond:.3e} exceeds cap {condition_cap:.1e} at y1={y1}, y2={y2}"
        )
    return _linf_norm(inv)


def _circulant_inverse_row(row_fft: np.ndarray, y: complex, margin: float) -> np.ndarray:
    """First row of (I - y S)^(-1) for circulant S with spectrum row_fft."""
    denom = 1.0 - y * row_fft
    closest = float(np.min(np.abs(denom)))
    if closest < margin:
        raise SpectrumProximityError(
            f"1/y at distance {closest:.3e} from the circulant spectrum (margin {margin:.1e})"
        )
    return np.fft.ifft(1.0 / denom)


def inverse_norm_circulant_fast(
    p: VarianceProfile,
    y1: complex,
    y2: complex,
    margin: float = DEFAULT_SPECTRUM_MARGIN,
) -> float:
    """Exact L-inf -> L-inf norm of the 2n block inverse for symmetric
    circulant S, via the decoupling (I - block)^(-1) = [[P+Q, P-Q], [P-Q, P+Q]]/2
    with P = (I - aS)^(-1), Q = (I - bS)^(-1), a = y1+y2, b = y2-y1.

    Every row of the 2n inverse has identical absolute sum, computed from the
    two circulant first rows; the DFT diagonalizes S so P and Q cost one FFT
    round trip each.
    """
    if p.kind != "circulant":
        raise DimensionMismatchError(f"fast circulant path needs kind=circulant, got {p.kind}")
    a = y1 + y2
    b = y2 - y1
    spectrum = np.fft.fft(p.entries)
    p_row = _circulant_inverse_row(spectrum, a, margin)
    q_row = _circulant_inverse_row(spectrum, b, margin)
    return float(0.5 * (np.abs(p_row + q_row).sum() + np.abs(p_row - q_row).sum()))


def inverse_norm_block_fast(p: VarianceProfile, y: complex) -> float:
    """Upper bound 1 + ||D_y^(-1)|| for ||(I - yS)^(-1)|| on a block band
    profile, where D_y is the L-by-L cyclic tridiagonal reduction (diagonal
    1 - y/3, off-diagonals and corners -y/3). The value is a bound, not the
    exact norm."""
    if p.kind != "block_band":
        raise DimensionMismatchError(f"block fast path needs kind=block_band, got {p.kind}")
    length = p.n // p.w
    d = np.eye(length, dtype=complex) * (1.0 - y / 3.0)
    off = -y / 3.0
    idx = np.arange(length)
    d[idx, (idx + 1) % length] += off
    d[idx, (idx - 1) % length] += off
    try:
        inv = np.linalg.inv(d)
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError(f"cyclic tridiagonal D_y singular at y={y}") from exc
    norm = _linf_norm(inv)
    if not np.isfinite(norm) or norm > DEFAULT_CONDITION_CAP:
        raise SingularOperatorError(f"D_y effectively singular at y={y} (norm {norm:.3e})")
    return 1.0 + norm


@dataclass(frozen=True)
class NormConditionReport:
    """Grid of bounded-inverse probes around the stability center for one z."""

    z: complex
    grid: tuple[tuple[complex, complex], ...]
    norms: tuple[float, ...]  # nan marks a failed probe
    method: str  # dense | circulant_fast | block_fast
    statuses: tuple[str, ...] = field(default=())
    radius: float = 0.0

    @property
    def max_norm(self) -> float:
        finite = [v for v in self.norms if np.isfinite(v)]
        return max(finite) if finite else float("nan")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y1_re", "y1_im", "y2_re", "y2_im", "norm", "method", "status"])
            for (y1, y2), norm, status in zip(self.grid, self.norms, self.statuses):
                writer.writerow(
                    [repr(y1.real), repr(y1.imag), repr(y2.real), repr(y2.imag), repr(norm), self.method, status]
                )


def _probe_norm(p: VarianceProfile, y1: complex, y2: complex, method: str) -> tuple[float, str]:
    if method == "circulant_fast":
        return inverse_norm_circulant_fast(p, y1, y2), "ok"
    if method == "block_fast":
        a = y1 + y2
        b = y2 - y1
        return inverse_norm_block_fast(p, a) + inverse_norm_block_fast(p, b), "upper_bound"
    return inverse_norm_dense(p, y1, y2), "ok"


def scan_norm_condition(
    p: VarianceProfile,
    z: complex,
    radius: float,
    grid_points: int,
    method: str = "auto",
) -> NormConditionReport:
    """Probe the bounded-inverse norm on a grid covering the stability
    neighborhood |y1 + 1 - |z|^2| <= radius, |y2 + |z|^2| <= radius.

    ``grid_points`` points per axis per real/imaginary direction, so
    grid_points**4 probes; radius 0 degenerates to the single center probe.
    Failed probes are recorded with nan norms, not raised.
    """
    if not 0 < abs(z) < 1:
        raise ValueError(f"need 0 < |z| < 1, got z={z}")
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if method == "auto":
        method = {"circulant": "circulant_fast", "block_band": "block_fast"}.get(p.kind, "dense")

    zz = abs(z) ** 2
    center1 = complex(zz - 1.0, 0.0)
    center2 = complex(-zz, 0.0)
    offsets = np.array([0.0]) if radius == 0 else np.linspace(-radius, radius, grid_points)

    grid: list[tuple[complex, complex]] = []
    norms: list[float] = []
    statuses: list[str] = []
    for re1 in offsets:
        for im1 in offsets:
            for re2 in offsets:
                for im2 in offsets:
                    y1 = center1 + complex(re1, im1)
                    y2 = center2 + complex(re2, im2)
                    try:
                        norm, status = _probe_norm(p, y1, y2, method)
                    except (SingularOperatorError, SpectrumProximityError) as exc:
                        norm, status = float("nan"), f"failed: {exc}"
                    grid.append((y1, y2))
                    norms.append(norm)
                    statuses.append(status)
    return NormConditionReport(
        z=z,
        grid=tuple(grid),
        norms=tuple(norms),
        method=method,
        statuses=tuple(statuses),
        radius=radius,
    )
