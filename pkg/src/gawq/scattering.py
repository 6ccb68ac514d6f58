"""Stationary scattering amplitudes and their independent oracles.

Three routes to the same numbers:

* closed forms for r and t at resonance (omega_a = omega_c), sharing one
  denominator whose zeros are the spectral singularities;
* a dense linear solve of the stationary piecewise-plane-wave equations
  (general, valid off resonance) - the independent oracle;
* general closed forms derived from that stationary system, kept as a third
  cross-check.

All operations are pure functions of (params, k).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SingularScatteringError
from .model import SystemParams, coupling_phase, dispersion, require_interior_k

#: Relative threshold classifying a scattering denominator as singular.
SINGULAR_REL_TOL = 1e-12

#: Treat |1 + e^{ikN}| below this as an exact decoupling point.
DECOUPLING_TOL = 1e-12

#: Condition-number cutoff for the stationary linear system.
CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class ScatteringResult:
    """Amplitudes and rates at one real wave number."""

    k: float
    r: complex
    t: complex
    R: float
    T: float
    flux_sum: float
    singular: bool = False


@dataclass(frozen=True)
class GeneralizedReflection:
    """Emitter-subsystem response factor at one (possibly complex) wave number."""

    k: complex
    value: complex


@dataclass(frozen=True)
class StationaryAmplitudes:
    """Plane-wave coefficients of the piecewise stationary solution.

    V e^{ikj} + W e^{-ikj} on the left, X e^{ikj} + Y e^{-ikj} between the
    coupling sites, Z e^{ikj} on the right, plus the emitter amplitude psi_a.
    """

    V: complex
    W: complex
    X: complex
    Y: complex
    Z: complex
    psi_a: complex

    def continuity_residuals(self, params: SystemParams, k: float) -> tuple[float, float]:
        """Residuals of the two matching conditions at sites 0 and N."""
        eN = cmath.exp(1j * k * params.N)
        r0 = abs(self.V + self.W - self.X - self.Y)
        rN = abs(self.X * eN + self.Y / eN - self.Z * eN)
        return (r0, rN)


def _require_resonant(params: SystemParams) -> None:
    if not params.resonant:
        raise ValueError(
            "closed-form amplitudes assume omega_a == omega_c; "
            "use stationary_solve for the off-resonant case"
        )


def _denominator(params: SystemParams, k: float) -> complex:
    """Shared denominator of the resonant closed forms."""
    g2 = params.g**2
    J = params.J
    f = complex(coupling_phase(params, k))
    return (
        2.0 * g2 * f
        - 2.0 * J * params.gamma * math.sin(k)
        + 4.0j * J * J * math.sin(k) * math.cos(k)
    )


def _denominator_scale(params: SystemParams, k: float) -> float:
    """Magnitude scale of the denominator terms, for the relative singularity test."""
    g2 = params.g**2
    J = params.J
    return max(
        2.0 * g2 * abs(complex(coupling_phase(params, k))),
        2.0 * J * abs(params.gamma * math.sin(k)),
        4.0 * J * J * abs(math.sin(k) * math.cos(k)),
        g2,
        J * J * 1e-3,
    )


def _checked_denominator(params: SystemParams, k: float) -> complex:
    den = _denominator(params, k)
    if abs(den) < SINGULAR_REL_TOL * _denominator_scale(params, k):
        raise SingularScatteringError(k, params.gamma)
    return den


def reflection_amplitude(params: SystemParams, k: float) -> complex:
    """Resonant reflection amplitude r(k) for real k in (0, pi)."""
    _require_resonant(params)
    require_interior_k(k)
    f = complex(coupling_phase(params, k))
    if abs(f) < DECOUPLING_TOL:
        return 0.0 + 0.0j
    return -(params.g**2) * f * f / _checked_denominator(params, k)


def transmission_amplitude(params: SystemParams, k: float) -> complex:
    """Resonant transmission amplitude t(k) for real k in (0, pi)."""
    _require_resonant(params)
    require_interior_k(k)
    f = complex(coupling_phase(params, k))
    if abs(f) < DECOUPLING_TOL:
        return 1.0 + 0.0j
    fbar = 1.0 + cmath.exp(-1j * k * params.N)
    return 1.0 - params.g**2 * f * fbar / _checked_denominator(params, k)


def generalized_reflection(params: SystemParams, k: complex) -> complex:
    """Emitter response factor -J sin k / [2 J^2 sin k cos k + i gamma J sin k - i g^2 (e^{ikN}+1)].

    Accepts complex k; diverges on the spectral-singularity set.
    """
    k = complex(k)
    J = params.J
    sk = cmath.sin(k)
    den = (
        2.0 * J * J * sk * cmath.cos(k)
        + 1j * params.gamma * J * sk
        - 1j * params.g**2 * (cmath.exp(1j * k * params.N) + 1.0)
    )
    scale = max(
        2.0 * J * J * abs(sk * cmath.cos(k)),
        abs(params.gamma) * J * abs(sk),
        params.g**2 * abs(cmath.exp(1j * k * params.N) + 1.0),
        J * J * 1e-3,
    )
    if abs(den) < SINGULAR_REL_TOL * scale:
        raise SingularScatteringError(k.real, params.gamma)
    return -J * sk / den


def generalized_reflection_point(params: SystemParams, k: complex) -> GeneralizedReflection:
    return GeneralizedReflection(k=complex(k), value=generalized_reflection(params, k))


def scattering_result(params: SystemParams, k: float) -> ScatteringResult:
    """Amplitudes and rates at one k; singular points get a flagged NaN row."""
    try:
        r = reflection_amplitude(params, k)
        t = transmission_amplitude(params, k)
    except SingularScatteringError:
        nan = float("nan")
        return ScatteringResult(
            k=float(k), r=complex(nan, nan), t=complex(nan, nan),
            R=nan, T=nan, flux_sum=nan, singular=True,
        )
    R = abs(r) ** 2
    T = abs(t) ** 2
    return ScatteringResult(k=float(k), r=r, t=t, R=R, T=T, flux_sum=R + T)


def spectrum_sweep(params: SystemParams, k_grid: Sequence[float]) -> list[ScatteringResult]:
    """Evaluate the resonant amplitudes on a k grid, in grid order.

    Singular grid points are reported with `singular=True` rather than
    aborting the sweep.
    """
    k_grid = list(k_grid)
    if len(k_grid) == 0:
        raise ValueError("spectrum_sweep requires a non-empty k grid")
    return [scattering_result(params, k) for k in k_grid]


def stationary_solve(params: SystemParams, k: float) -> StationaryAmplitudes:
    """Solve the stationary equations directly (independent oracle).

    Builds the dense linear system for (W, X, Y, Z, psi_a) with unit
    incident amplitude V = 1.  Keeping psi_a as an unknown avoids the
    division that breaks down when omega_k = omega_a and gamma = 0; the
    eliminated 4x4 form is algebraically identical.  Valid off resonance.
    """
    require_interior_k(k)
    J, g, N = params.J, params.g, params.N
    wk = float(dispersion(params, k))
    dc = wk - params.omega_c
    da = wk - params.omega_a - 1j * params.gamma

    def e(x: float) -> complex:
        return cmath.exp(1j * k * x)

    A = np.zeros((5, 5), dtype=complex)
    b = np.zeros(5, dtype=complex)
    # unknown order: W, X, Y, Z, psi_a
    A[0] = [1.0, -1.0, -1.0, 0.0, 0.0]                       # continuity at 0
    b[0] = -1.0
    A[1] = [0.0, e(N), e(-N), -e(N), 0.0]                    # continuity at N
    A[2] = [dc + J * e(1), J * e(1), J * e(-1), 0.0, -g]     # site-0 equation
    b[2] = -dc - J * e(-1)
    A[3] = [0.0, dc * e(N) + J * e(N - 1), dc * e(-N) + J * e(-(N - 1)),
            J * e(N + 1), -g]                                # site-N equation
    A[4] = [-g, -g * e(N), -g * e(-N), 0.0, da]              # emitter equation
    b[4] = g

    if np.linalg.cond(A) > CONDITION_LIMIT:
        raise SingularScatteringError(k, params.gamma,
                                      f"stationary system is numerically singular at k={k!r}")
    W, X, Y, Z, psi_a = np.linalg.solve(A, b)
    return StationaryAmplitudes(V=1.0 + 0.0j, W=W, X=X, Y=Y, Z=Z, psi_a=psi_a)


def stationary_reflection(params: SystemParams, k: float) -> complex:
    """General closed form for r from the stationary system (third cross-check)."""
    require_interior_k(k)
    g2 = params.g**2
    f = complex(coupling_phase(params, k))
    wk = float(dispersion(params, k))
    den = 2.0 * g2 * f - 2j * params.J * math.sin(k) * (wk - params.omega_a - 1j * params.gamma)
    if abs(den) < SINGULAR_REL_TOL * max(2.0 * g2 * abs(f), 2.0 * params.J * abs(wk - params.omega_a) + 1e-3):
        raise SingularScatteringError(k, params.gamma)
    return -g2 * f * f / den


def stationary_transmission(params: SystemParams, k: float) -> complex:
    """General closed form for t from the stationary system (third cross-check)."""
    require_interior_k(k)
    g2 = params.g**2
    f = complex(coupling_phase(params, k))
    fbar = 1.0 + cmath.exp(-1j * k * params.N)
    wk = float(dispersion(params, k))
    den = 2j * params.J * math.sin(k) * (wk - params.omega_a - 1j * params.gamma) - 2.0 * g2 * f
    if abs(den) < SINGULAR_REL_TOL * max(2.0 * g2 * abs(f), 2.0 * params.J * abs(wk - params.omega_a) + 1e-3):
        raise SingularScatteringError(k, params.gamma)
    return 1.0 + g2 * f * fbar / den
