"""Core model: parameter set, cosine band, and two-point coupling phase.

A two-level emitter with complex on-site energy omega_a + i*gamma couples
with strength g to sites 0 and N of a tight-binding chain (cavity frequency
omega_c, hopping J).  Everything downstream (scattering amplitudes, Siegert
poles, wave-packet dynamics) is expressed through the band dispersion
omega_k = omega_c - 2 J cos k and the interference factor 1 + e^{ikN}.

All functions here are pure; k may be real or complex so the same formulas
serve propagating modes and complex-plane pole searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Reject real wave numbers this close to the band edges 0 and pi, where
#: sin k -> 0 makes the scattering formulas singular.
BAND_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters, all in units of the hopping J.

    Sign convention: gamma < 0 is a lossy emitter, gamma > 0 a gain emitter.
    """

    omega_a: float = 0.0
    omega_c: float = 0.0
    gamma: float = 0.0
    J: float = 1.0
    g: float = 0.0
    N: int = 1

    def __post_init__(self):
        for name in ("omega_a", "omega_c", "gamma", "J", "g"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"SystemParams.{name} must be finite, got {value!r}")
        if self.J <= 0:
            raise ValueError(f"SystemParams.J must be positive, got {self.J!r}")
        if self.g < 0:
            raise ValueError(f"SystemParams.g must be non-negative, got {self.g!r}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ValueError(f"SystemParams.N must be an integer >= 1, got {self.N!r}")

    @property
    def resonant(self) -> bool:
        return self.omega_a == self.omega_c

    def band_limits(self) -> tuple[float, float]:
        return (self.omega_c - 2.0 * self.J, self.omega_c + 2.0 * self.J)


@dataclass(frozen=True)
class BlochMode:
    """One propagating mode: wave number, band energy, group velocity."""

    k: float
    omega_k: float
    v_g: float


def dispersion(params: SystemParams, k):
    """Band energy omega_c - 2 J cos k; accepts real or complex k (scalars or arrays)."""
    return params.omega_c - 2.0 * params.J * np.cos(k)


def group_velocity(params: SystemParams, k):
    """d(omega_k)/dk = 2 J sin k."""
    return 2.0 * params.J * np.sin(k)


def wavenumber_from_energy(params: SystemParams, omega: float) -> float:
    """Invert the dispersion on the principal branch, returning k in [0, pi].

    Raises ValueError for energies outside the band.
    """
    x = (params.omega_c - omega) / (2.0 * params.J)
    if abs(x) > 1.0 + 1e-15:
        lo, hi = params.band_limits()
        raise ValueError(
            f"energy {omega!r} lies outside the band [{lo!r}, {hi!r}]"
        )
    return float(np.arccos(np.clip(x, -1.0, 1.0)))


def coupling_phase(params: SystemParams, k):
    """Two-point interference factor 1 + e^{ikN}.

    Vanishes exactly at the decoupling points k = (2m+1) pi / N on the real
    axis, where the emitter is invisible to the photon.
    """
    return 1.0 + np.exp(1j * params.N * np.asarray(k, dtype=complex))


def bloch_mode(params: SystemParams, k: float) -> BlochMode:
    """Propagating mode for real k in the open interval (0, pi)."""
    require_interior_k(k)
    return BlochMode(
        k=float(k),
        omega_k=float(dispersion(params, k)),
        v_g=float(group_velocity(params, k)),
    )


def decoupling_wavenumbers(params: SystemParams) -> list[float]:
    """All real k in (0, pi) where the coupling phase vanishes."""
    points = []
    for m in range(params.N):
        k = (2 * m + 1) * math.pi / params.N
        if BAND_EDGE_TOL < k < math.pi - BAND_EDGE_TOL:
            points.append(k)
    return points


def require_interior_k(k: float, tol: float = BAND_EDGE_TOL) -> None:
    """Reject real wave numbers within `tol` of the band edges 0 and pi."""
    k = float(k)
    if not (tol < k < math.pi - tol):
        raise ValueError(
            f"wave number {k!r} is outside the interior of (0, pi) "
            f"(band-edge tolerance {tol:g})"
        )
