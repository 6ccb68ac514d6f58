"""Spectral singularities, complex Siegert poles, and their trajectories.

The stationary amplitudes share one denominator; its real-axis zeros are
the spectral singularities, found here from the pair of real conditions

    g^2 sin(N k) + 2 J^2 sin k cos k = 0,
    g^2 (1 + cos(N k)) - J gamma sin k = 0.

Dressed emitter-photon eigenstates with purely outgoing tails satisfy

    omega_c - 2 J cos k_n = omega_a + i gamma -+ i g^2 (1 + e^{+-i k_n N}) / (J sin k_n),

upper sign for Im k_n >= 0 and lower sign for Im k_n < 0.  `solve_poles`
hunts roots of both branch equations over a complex-plane box with damped
Newton iterations from a uniform seed grid.

Two structural facts shape the bookkeeping:

* the lower-branch residual satisfies F_low(k) = F_up(-k), so every
  lower-branch root mirrors an upper-branch root at -k with the same
  energy and the same spatial profile e^{i k_n |j|}; physically distinct
  states are therefore deduplicated by energy, preferring the Im k_n >= 0
  representative;
* a root on the positive real axis (in-continuum state) exists only when
  gamma sits exactly on a singularity value, and is re-polished on the
  real line for maximum accuracy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import FormulaPoleError
from .model import SystemParams, coupling_phase, dispersion

#: Default complex search box (re_min, re_max, im_min, im_max).  |Im k| = 2
#: bounds spatial decay lengths shorter than one site.
DEFAULT_POLE_BOX = (0.02, math.pi - 0.02, -2.0, 2.0)

#: Tolerances of the pole search (see module docstring of the tests for
#: the convergence study that pins them).
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200
NEWTON_MAX_HALVINGS = 30
DEDUP_RADIUS = 1e-8
RESIDUAL_LIMIT = 1e-10
REAL_AXIS_TOL = 1e-8
AXIS_CLASS_TOL = 1e-9


@dataclass(frozen=True)
class SingularityPoint:
    """A real-axis scattering divergence: wave number, gain rate, energy."""

    k: float
    gamma: float
    omega: float
    residual: float


@dataclass(frozen=True)
class SiegertPole:
    """One outgoing-wave eigenvalue: complex k_n and E_n plus bookkeeping.

    `branch` records which case of the eigenvalue equation was satisfied
    ("upper" for Im k_n >= 0, "lower" otherwise); `classification` is the
    quadrant taxonomy of `classify_siegert`.
    """

    k_n: complex
    E_n: complex
    branch: str
    classification: str
    residual: float


def singularity_residual(params: SystemParams, k: float, gamma_trial: float) -> tuple[float, float]:
    """The two real singularity conditions evaluated at (k, gamma_trial)."""
    g2 = params.g**2
    J = params.J
    return (
        g2 * math.sin(params.N * k) + 2.0 * J * J * math.sin(k) * math.cos(k),
        g2 + g2 * math.cos(params.N * k) - J * gamma_trial * math.sin(k),
    )


def find_singularities(params: SystemParams, *, scan_points: int = 4001) -> list[SingularityPoint]:
    """All spectral singularities (k, gamma) with k in (0, pi).

    Solves the gamma-independent first condition by dense scan plus
    bracketed root refinement and Newton polish, then reads gamma off the
    second condition.  Roots at decoupling points are discarded; every
    returned gamma is positive.  `params.gamma` is ignored.
    """
    if params.g <= 0:
        return []
    g2 = params.g**2
    J = params.J

    def f1(k: float) -> float:
        return g2 * math.sin(params.N * k) + 2.0 * J * J * math.sin(k) * math.cos(k)

    def f1p(k: float) -> float:
        return g2 * params.N * math.cos(params.N * k) + 2.0 * J * J * math.cos(2.0 * k)

    ks = np.linspace(1e-6, math.pi - 1e-6, scan_points)
    vals = np.array([f1(k) for k in ks])
    roots: list[float] = []
    for i in range(len(ks) - 1):
        if vals[i] == 0.0:
            roots.append(float(ks[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(float(brentq(f1, ks[i], ks[i + 1], xtol=1e-15, rtol=1e-15)))

    points: list[SingularityPoint] = []
    for k in roots:
        # Newton polish on the first condition.
        for _ in range(50):
            d = f1p(k)
            if d == 0.0:
                break
            step = f1(k) / d
            k -= step
            if abs(step) < 1e-16:
                break
        if not (1e-9 < k < math.pi - 1e-9):
            continue
        if abs(complex(coupling_phase(params, k))) < 1e-8:
            continue  # decoupled root: the emitter is invisible there
        gamma = g2 * (1.0 + math.cos(params.N * k)) / (J * math.sin(k))
        if gamma <= 0.0:
            continue
        res = singularity_residual(params, k, gamma)
        point = SingularityPoint(
            k=k,
            gamma=gamma,
            omega=float(dispersion(params, k)),
            residual=max(abs(res[0]), abs(res[1])),
        )
        if point.residual < 1e-10 and not any(abs(point.k - p.k) < 1e-10 for p in points):
            points.append(point)
    points.sort(key=lambda p: p.k)
    return points


def critical_gain(params: SystemParams) -> SingularityPoint:
    """The lowest-k spectral singularity; raises if none exists."""
    points = find_singularities(params)
    if not points:
        raise ValueError("no spectral singularity exists for these parameters")
    return points[0]


def _residual_upper(params: SystemParams, k: complex) -> complex:
    sk = cmath.sin(k)
    return (
        complex(dispersion(params, k))
        - params.omega_a
        - 1j * params.gamma
        + 1j * params.g**2 * (1.0 + cmath.exp(1j * k * params.N)) / (params.J * sk)
    )


def _residual_lower(params: SystemParams, k: complex) -> complex:
    sk = cmath.sin(k)
    return (
        complex(dispersion(params, k))
        - params.omega_a
        - 1j * params.gamma
        - 1j * params.g**2 * (1.0 + cmath.exp(-1j * k * params.N)) / (params.J * sk)
    )


def eigen_residual(params: SystemParams, k_n: complex) -> complex:
    """Mismatch between the band energy and the dressed-emitter energy at k_n.

    Branch selection follows the sign of Im k_n; a zero residual marks a
    Siegert eigenvalue.
    """
    k_n = complex(k_n)
    if abs(cmath.sin(k_n)) < 1e-12:
        raise FormulaPoleError(
            f"eigenvalue formula has a pole at k_n={k_n!r} (sin k_n ~ 0)"
        )
    if k_n.imag >= 0:
        return _residual_upper(params, k_n)
    return _residual_lower(params, k_n)


def damped_newton(
    f: Callable[[complex], complex],
    z0: complex,
    *,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    max_halvings: int = NEWTON_MAX_HALVINGS,
) -> complex | None:
    """Damped Newton iteration with a central-difference derivative.

    Steps are halved while they fail to reduce |f|; returns None when no
    improving step exists or the iteration budget is exhausted.
    """
    z = complex(z0)
    try:
        fz = f(z)
    except (ZeroDivisionError, OverflowError, ValueError):
        return None
    for _ in range(max_iter):
        if not cmath.isfinite(fz):
            return None
        h = 1e-7 * (1.0 + abs(z))
        try:
            df = (f(z + h) - f(z - h)) / (2.0 * h)
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
        if df == 0 or not cmath.isfinite(df):
            return None
        step = -fz / df
        lam = 1.0
        accepted = False
        for _ in range(max_halvings):
            z_new = z + lam * step
            try:
                f_new = f(z_new)
            except (ZeroDivisionError, OverflowError, ValueError):
                lam *= 0.5
                continue
            if abs(f_new) < abs(fz):
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            return None
        z, fz = z_new, f_new
        if abs(fz) < tol and abs(lam * step) < tol:
            return z
    return None


def _vector_newton(
    f: Callable[[np.ndarray], np.ndarray],
    seeds: np.ndarray,
    *,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    max_halvings: int = NEWTON_MAX_HALVINGS,
) -> np.ndarray:
    """Damped Newton run on every seed simultaneously (vectorized residuals).

    Same acceptance rule as `damped_newton`; returns the converged roots
    (failures are dropped).  `f` must accept and return complex ndarrays.
    """
    z = np.asarray(seeds, dtype=complex).copy()
    n = len(z)
    roots = np.full(n, np.nan, dtype=complex)
    with np.errstate(all="ignore"):
        fz = f(z)
    alive = np.isfinite(fz)
    idx = np.arange(n)[alive]
    z, fz = z[alive], fz[alive]
    for _ in range(max_iter):
        if len(z) == 0:
            break
        h = 1e-7 * (1.0 + np.abs(z))
        with np.errstate(all="ignore"):
            df = (f(z + h) - f(z - h)) / (2.0 * h)
        good = np.isfinite(df) & (df != 0)
        z, fz, idx, df = z[good], fz[good], idx[good], df[good]
        if len(z) == 0:
            break
        step = -fz / df
        lam = np.ones(len(z))
        z_new = z + step
        with np.errstate(all="ignore"):
            f_new = f(z_new)
        worse = ~(np.abs(f_new) < np.abs(fz))  # NaN counts as worse
        for _ in range(max_halvings):
            if not worse.any():
                break
            lam[worse] *= 0.5
            z_new[worse] = z[worse] + lam[worse] * step[worse]
            with np.errstate(all="ignore"):
                f_new[worse] = f(z_new[worse])
            worse = ~(np.abs(f_new) < np.abs(fz))
        accepted = ~worse
        converged = accepted & (np.abs(f_new) < tol) & (np.abs(lam * step) < tol)
        roots[idx[converged]] = z_new[converged]
        carry = accepted & ~converged
        z, fz, idx = z_new[carry], f_new[carry], idx[carry]
    return roots[np.isfinite(roots)]


def classify_siegert(k_n: complex, tol: float = AXIS_CLASS_TOL) -> str:
    """Quadrant taxonomy of a complex wave number (outgoing convention).

    Positive imaginary axis -> bound; negative imaginary axis -> virtual;
    positive real axis -> in-continuum; first quadrant -> growing (norm
    grows in time); fourth -> resonant; second -> decaying; third ->
    antiresonant.
    """
    k_n = complex(k_n)
    re, im = k_n.real, k_n.imag
    on_imag_axis = abs(re) <= tol
    on_real_axis = abs(im) <= tol
    if on_imag_axis and on_real_axis:
        return "in-continuum"
    if on_imag_axis:
        return "bound" if im > 0 else "virtual"
    if on_real_axis:
        return "in-continuum"
    if re > 0:
        return "growing" if im > 0 else "resonant"
    return "decaying" if im > 0 else "antiresonant"


def _polish_real_root(params: SystemParams, k0: float) -> float:
    """1-D Newton polish of the first singularity condition on the real axis."""
    g2 = params.g**2
    J = params.J
    k = float(k0)
    for _ in range(60):
        f = g2 * math.sin(params.N * k) + 2.0 * J * J * math.sin(k) * math.cos(k)
        d = g2 * params.N * math.cos(params.N * k) + 2.0 * J * J * math.cos(2.0 * k)
        if d == 0.0:
            break
        step = f / d
        k -= step
        if abs(step) < 1e-16:
            break
    return k


def solve_poles(
    params: SystemParams,
    box: tuple[float, float, float, float] = DEFAULT_POLE_BOX,
    *,
    seeds_per_axis: int = 80,
) -> list[SiegertPole]:
    """All Siegert poles inside the principal strip found from `box` seeds.

    Runs damped Newton on each branch equation from a uniform seed grid,
    keeps branch-consistent converged roots compatible with the
    outgoing-wave convention (Re k_n >= 0 on the upper branch; the lower
    branch only contributes on the imaginary axis, see the inline note),
    rejects decoupled quotient artifacts and roots at poles of the formula,
    snaps near-real roots onto the real axis with a dedicated polish, and
    deduplicates (positionally and by energy across mirrored branches).
    Output is sorted by (Re k_n, Im k_n).  For g = 0 the emitter is
    decoupled and the list is empty.
    """
    re_min, re_max, im_min, im_max = box
    if not (0.0 <= re_min < re_max <= math.pi):
        raise ValueError(f"search box {box!r} must lie within the strip 0 < Re k < pi")
    if params.g == 0.0:
        return []

    re_seeds, im_seeds = np.meshgrid(
        np.linspace(re_min, re_max, seeds_per_axis),
        np.linspace(im_min, im_max, seeds_per_axis),
    )
    seeds = (re_seeds + 1j * im_seeds).ravel()

    def upper_vec(z: np.ndarray) -> np.ndarray:
        return (
            params.omega_c - 2.0 * params.J * np.cos(z)
            - params.omega_a - 1j * params.gamma
            + 1j * params.g**2 * (1.0 + np.exp(1j * z * params.N)) / (params.J * np.sin(z))
        )

    def lower_vec(z: np.ndarray) -> np.ndarray:
        return (
            params.omega_c - 2.0 * params.J * np.cos(z)
            - params.omega_a - 1j * params.gamma
            - 1j * params.g**2 * (1.0 + np.exp(-1j * z * params.N)) / (params.J * np.sin(z))
        )

    # Lower-branch roots describe states with asymptotic tails e^{-i k_n |j|};
    # outgoing-wave character then requires Re(-k_n) >= 0, so inside the
    # principal strip only roots pinned to the imaginary axis can qualify
    # (and those mirror upper-branch roots, removed by the energy dedupe).
    raw: list[tuple[complex, str, float]] = []
    for branch, func_vec, func, keep in (
        ("upper", upper_vec, lambda z: _residual_upper(params, z),
         lambda z: z.imag >= -REAL_AXIS_TOL),
        ("lower", lower_vec, lambda z: _residual_lower(params, z),
         lambda z: z.imag < -REAL_AXIS_TOL and abs(z.real) <= REAL_AXIS_TOL),
    ):
        for root in _vector_newton(func_vec, seeds):
            root = complex(root)
            if not keep(root):
                continue
            if root.real < -REAL_AXIS_TOL or root.real > math.pi - 1e-6:
                continue
            sk = abs(cmath.sin(root))
            if sk < 1e-9:
                continue
            # decoupled artifact of the quotient form
            if abs(complex(coupling_phase(params, root))) < 1e-10 and sk < 1e-6:
                continue
            res = abs(func(root))
            if res > RESIDUAL_LIMIT:
                continue
            for i, (k_prev, br_prev, res_prev) in enumerate(raw):
                if br_prev == branch and abs(root - k_prev) < DEDUP_RADIUS:
                    if res < res_prev:
                        raw[i] = (root, branch, res)
                    break
            else:
                raw.append((root, branch, res))

    poles: list[SiegertPole] = []
    for k_root, branch, res in raw:
        if branch == "upper" and abs(k_root.imag) < REAL_AXIS_TOL:
            # In-continuum candidate: re-polish on the real line.
            k_real = _polish_real_root(params, k_root.real)
            k_root = complex(k_real, 0.0)
            res = abs(_residual_upper(params, k_root))
            if res > RESIDUAL_LIMIT:
                continue
        poles.append(
            SiegertPole(
                k_n=k_root,
                E_n=complex(dispersion(params, k_root)),
                branch=branch,
                classification=classify_siegert(k_root, tol=max(AXIS_CLASS_TOL, REAL_AXIS_TOL)),
                residual=res,
            )
        )

    # Mirrored branch duplicates share the energy exactly; keep the
    # Im k_n >= 0 representative.
    deduped: list[SiegertPole] = []
    for pole in sorted(poles, key=lambda p: (p.branch != "upper", -p.k_n.imag)):
        if any(abs(pole.E_n - q.E_n) < DEDUP_RADIUS for q in deduped):
            continue
        deduped.append(pole)
    deduped.sort(key=lambda p: (p.k_n.real, p.k_n.imag))
    return deduped


def trajectory_sweep(
    params: SystemParams,
    gamma_grid: Sequence[float],
    *,
    seeds_per_axis: int = 40,
    box: tuple[float, float, float, float] = DEFAULT_POLE_BOX,
) -> list[tuple[float, list[SiegertPole]]]:
    """Pole set per gamma, warm-starting each solve from the previous roots.

    The grid must be sorted ascending.  Warm starts cost nothing here since
    the full seed grid is always included; they guard against roots drifting
    out of the coarse grid's basins between neighbouring gamma values.
    """
    gamma_grid = [float(gv) for gv in gamma_grid]
    if any(b < a for a, b in zip(gamma_grid, gamma_grid[1:])):
        raise ValueError("gamma grid must be sorted ascending")

    rows: list[tuple[float, list[SiegertPole]]] = []
    warm: list[complex] = []
    for gamma in gamma_grid:
        p = SystemParams(
            omega_a=params.omega_a, omega_c=params.omega_c, gamma=gamma,
            J=params.J, g=params.g, N=params.N,
        )
        poles = solve_poles(p, box, seeds_per_axis=seeds_per_axis)
        found = {q.k_n for q in poles}
        for seed in warm:
            root = damped_newton(lambda z: _residual_upper(p, z), seed)
            if root is None or root.imag < -REAL_AXIS_TOL or root.real < -REAL_AXIS_TOL:
                continue
            if abs(cmath.sin(root)) < 1e-9:
                continue
            res = abs(_residual_upper(p, root))
            if res > RESIDUAL_LIMIT:
                continue
            if abs(root.imag) < REAL_AXIS_TOL:
                root = complex(_polish_real_root(p, root.real), 0.0)
                res = abs(_residual_upper(p, root))
                if res > RESIDUAL_LIMIT:
                    continue
            if not any(abs(root - kf) < DEDUP_RADIUS for kf in found):
                poles.append(
                    SiegertPole(
                        k_n=root,
                        E_n=complex(dispersion(p, root)),
                        branch="upper",
                        classification=classify_siegert(root, tol=max(AXIS_CLASS_TOL, REAL_AXIS_TOL)),
                        residual=res,
                    )
                )
                found.add(root)
        poles.sort(key=lambda q: (q.k_n.real, q.k_n.imag))
        rows.append((gamma, poles))
        warm = [q.k_n for q in poles]
    return rows
