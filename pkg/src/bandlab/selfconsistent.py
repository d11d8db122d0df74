"""Positive-imaginary-branch solutions of the spectral fixed-point equations.

Two scalar equations are solved, both cubics after clearing denominators:

* squared-singular-value transform:  1/m = -w(1+m) + |z|^2/(1+m)
* symmetrized (2n-block) transform: -1/m = w + m - |z|^2/(w+m)

Roots come from the closed-form Cardano formula polished by Newton steps on
the cleared cubic; the physical branch is the root with positive imaginary
part, disambiguated by continuation from large imaginary part where the
branch is within O(|w|^-2) of -1/w.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguityError

RESIDUAL_TOL = 1e-10
MATCH_RADIUS_FACTOR = 0.1
MAX_REFINE_DEPTH = 8
_DEGENERATE_REL = 1e-8


@dataclass(frozen=True)
class BranchCertificate:
    """All three cubic roots and the rule that picked one of them."""

    roots: tuple[complex, complex, complex]
    rule: str  # unique_positive | continuation | guided
    degenerate: bool = False


@dataclass(frozen=True)
class SelfConsistentSolution:
    w: complex
    z: complex
    mc: complex
    residual: float
    certificate: BranchCertificate


def _cubic_roots(c3: complex, c2: complex, c1: complex, c0: complex) -> tuple[complex, complex, complex]:
    """Cardano roots of c3 m^3 + c2 m^2 + c1 m + c0, Newton-polished on the
    original coefficients so tiny leading coefficients do not cost accuracy."""
    b = c2 / c3
    c = c1 / c3
    d = c0 / c3
    d0 = b * b - 3.0 * c
    d1 = 2.0 * b**3 - 9.0 * b * c + 27.0 * d
    sq = np.sqrt(complex(d1 * d1 - 4.0 * d0**3))
    t = (d1 + sq) / 2.0
    alt = (d1 - sq) / 2.0
    if abs(alt) > abs(t):
        t = alt
    if t == 0:  # triple root
        r = -b / 3.0
        return (r, r, r)
    big_c = t ** (1.0 / 3.0)
    xi = complex(-0.5, np.sqrt(3.0) / 2.0)
    roots = []
    for k in range(3):
        ck = big_c * xi**k
        roots.append(-(b + ck + d0 / ck) / 3.0)
    return tuple(_newton_polish(r, c3, c2, c1, c0) for r in roots)


def _newton_polish(m: complex, c3: complex, c2: complex, c1: complex, c0: complex) -> complex:
    best, best_f = m, abs(((c3 * m + c2) * m + c1) * m + c0)
    stale = 0
    for _ in range(40):
        f = ((c3 * m + c2) * m + c1) * m + c0
        fp = (3.0 * c3 * m + 2.0 * c2) * m + c1
        if fp == 0:
            break
        step = f / fp
        if not (np.isfinite(step.real) and np.isfinite(step.imag)):
            break
        m = m - step
        fm = abs(((c3 * m + c2) * m + c1) * m + c0)
        if fm < best_f:
            best, best_f = m, fm
            stale = 0
        else:
            stale += 1
        if abs(step) <= 1e-16 * max(abs(m), 1.0) or stale >= 2:
            break
    return best


def _mc_cubic(w: complex, z: complex) -> tuple[complex, complex, complex, complex]:
    zz = abs(z) ** 2
    return (w, 2.0 * w, w + 1.0 - zz, 1.0 + 0.0j)


def _mc_residual(m: complex, w: complex, z: complex) -> float:
    return abs(1.0 / m + w * (1.0 + m) - abs(z) ** 2 / (1.0 + m))


def _hermitized_cubic(w: complex, z: complex) -> tuple[complex, complex, complex, complex]:
    zz = abs(z) ** 2
    return (1.0 + 0.0j, 2.0 * w, w * w + 1.0 - zz, w)


def _hermitized_residual(m: complex, w: complex, z: complex) -> float:
    return abs(1.0 / m + w + m - abs(z) ** 2 / (w + m))


def _is_degenerate(roots: tuple[complex, complex, complex]) -> bool:
    scale = max(1.0, max(abs(r) for r in roots))
    gaps = [abs(roots[0] - roots[1]), abs(roots[0] - roots[2]), abs(roots[1] - roots[2])]
    return min(gaps) < _DEGENERATE_REL * scale


def _nearest(roots, target: complex) -> complex:
    return min(roots, key=lambda r: abs(r - target))


def _walk_branch(cubic_fn, z, w_from, root_from, w_to, depth=0) -> complex:
    """Track one root along the segment w_from -> w_to (imaginary part moves
    geometrically), bisecting the path when the root moves more than the
    match radius in one hop."""
    roots = _cubic_roots(*cubic_fn(w_to, z))
    best = _nearest(roots, root_from)
    if abs(best - root_from) <= MATCH_RADIUS_FACTOR * max(abs(root_from), 1e-12):
        return best
    if depth >= MAX_REFINE_DEPTH:
        raise BranchAmbiguityError(
            f"continuation lost the branch between w={w_from} and w={w_to} "
            f"(refinement depth {MAX_REFINE_DEPTH} exhausted)"
        )
    w_mid = complex(
        0.5 * (w_from.real + w_to.real),
        float(np.sqrt(w_from.imag * w_to.imag)),
    )
    r_mid = _walk_branch(cubic_fn, z, w_from, root_from, w_mid, depth + 1)
    return _walk_branch(cubic_fn, z, w_mid, r_mid, w_to, depth + 1)


def _axis_shortcut(positive: list[complex], w: complex, axis_rule: str) -> complex | None:
    """Resolve two-positive-root ties at purely imaginary w from the Stieltjes
    representation: the squared-singular transform lives in the closed first
    quadrant there, the symmetrized transform on the imaginary axis."""
    if w.real != 0.0:
        return None
    if axis_rule == "first_quadrant":
        picks = [r for r in positive if r.real >= -1e-10 * max(1.0, abs(r))]
    else:  # imaginary_axis
        picks = [r for r in positive if abs(r.real) <= 1e-8 * max(1.0, abs(r))]
    return picks[0] if len(picks) == 1 else None


def _solve_branch(cubic_fn, residual_fn, w: complex, z: complex, guide: complex | None, axis_rule: str):
    if w.imag <= 0:
        raise ValueError(f"spectral parameter needs Im w > 0, got w={w}")
    roots = _cubic_roots(*cubic_fn(w, z))
    degenerate = _is_degenerate(roots)

    if guide is not None:
        best = _nearest(roots, guide)
        if abs(best - guide) > MATCH_RADIUS_FACTOR * max(abs(guide), 1e-12):
            raise BranchAmbiguityError(
                f"no root within the match radius of the guide {guide} at w={w}"
            )
        rule = "guided"
    else:
        positive = [r for r in roots if r.imag > 0]
        shortcut = _axis_shortcut(positive, w, axis_rule) if len(positive) > 1 else None
        if len(positive) == 1:
            best = positive[0]
            rule = "unique_positive"
        elif shortcut is not None:
            best = shortcut
            rule = "stieltjes_axis"
        else:
            # anchor high on the imaginary axis where the branch is ~ -1/w
            anchor_im = max(10.0, 4.0 * abs(w))
            w_anchor = complex(w.real, anchor_im)
            anchor_roots = _cubic_roots(*cubic_fn(w_anchor, z))
            root = _nearest(anchor_roots, -1.0 / w_anchor)
            best = _walk_branch(cubic_fn, z, w_anchor, root, w)
            rule = "continuation"

    if best.imag <= 0:
        raise BranchAmbiguityError(
            f"no positive-imaginary-part root survived selection at w={w}, z={z} (roots {roots})"
        )
    residual = residual_fn(best, w, z)
    if residual > RESIDUAL_TOL:
        raise BranchAmbiguityError(
            f"selected root has residual {residual:.3e} > {RESIDUAL_TOL:.1e} at w={w}, z={z}"
        )
    cert = BranchCertificate(roots=roots, rule=rule, degenerate=degenerate)
    return best, residual, cert


def solve_mc(w: complex, z: complex, guide: complex | None = None) -> SelfConsistentSolution:
    """Solve 1/m = -w(1+m) + |z|^2/(1+m) for the Im m > 0 branch."""
    mc, residual, cert = _solve_branch(
        _mc_cubic, _mc_residual, complex(w), complex(z), guide, "first_quadrant"
    )
    return SelfConsistentSolution(w=complex(w), z=complex(z), mc=mc, residual=residual, certificate=cert)


def solve_hermitized(w: complex, z: complex, guide: complex | None = None) -> SelfConsistentSolution:
    """Solve -1/m = w + m - |z|^2/(w+m) for the Im m > 0 branch."""
    mc, residual, cert = _solve_branch(
        _hermitized_cubic, _hermitized_residual, complex(w), complex(z), guide, "imaginary_axis"
    )
    return SelfConsistentSolution(w=complex(w), z=complex(z), mc=mc, residual=residual, certificate=cert)


def solve_mc_hermitized(w: complex, z: complex) -> complex:
    """The symmetrized transform value; equals w * solve_mc(w**2, z).mc."""
    return solve_hermitized(w, z).mc


def mc_limit(z: complex) -> complex:
    """Small-eta limit of sqrt(w) m_c at w = i eta: i sqrt(1 - |z|^2)."""
    if abs(z) >= 1:
        raise ValueError(f"limit formula needs |z| < 1, got |z|={abs(z)}")
    return 1j * np.sqrt(1.0 - abs(z) ** 2)


def mc_curve(z: complex, etas, step_bound: float = 0.2) -> list[SelfConsistentSolution]:
    """solve_mc along a descending eta grid, each solution seeding the next.

    The continuity metric is |m sqrt(eta)| movement between adjacent points;
    grid gaps exceeding ``step_bound`` are bridged with intermediate
    (non-emitted) solves, up to the refinement depth.
    """
    etas = [float(e) for e in etas]
    if any(e <= 0 for e in etas):
        raise ValueError("all eta values must be positive")
    if any(b >= a for a, b in zip(etas, etas[1:])):
        raise ValueError("eta grid must be strictly descending for continuation")

    out: list[SelfConsistentSolution] = []
    for eta in etas:
        if not out:
            out.append(solve_mc(1j * eta, z))
            continue
        prev = out[-1]
        sol = _mc_curve_step(z, prev, eta, step_bound, depth=0)
        out.append(sol)
    return out


def _mc_curve_step(z, prev: SelfConsistentSolution, eta: float, step_bound: float, depth: int):
    try:
        sol = solve_mc(1j * eta, z, guide=prev.mc)
        jump = abs(sol.mc * np.sqrt(eta) - prev.mc * np.sqrt(prev.w.imag))
        if jump <= step_bound:
            return sol
        reason = f"continuity jump {jump:.3f} > {step_bound}"
    except BranchAmbiguityError as exc:
        reason = str(exc)
    if depth >= MAX_REFINE_DEPTH:
        raise BranchAmbiguityError(f"curve refinement exhausted at eta={eta}: {reason}")
    eta_mid = float(np.sqrt(prev.w.imag * eta))
    mid = _mc_curve_step(z, prev, eta_mid, step_bound, depth + 1)
    return _mc_curve_step(z, mid, eta, step_bound, depth + 1)
