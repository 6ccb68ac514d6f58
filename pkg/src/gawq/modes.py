"""Bound-state profiles, normalization factors, overlap coefficients, and
the bound-state-only long-time density prediction.

A Siegert pole at k_n (upper branch, Im k_n >= 0) dresses the emitter with
the photon cloud

    <j|Psi_n> / NF = -i g / (2 J sin k_n) * (e^{i k_n |j|} + e^{i k_n |j - N|}),

which reduces to side-resolved outgoing plane waves outside the coupling
region: prefactor (1 + e^{-i k_n N}) e^{i k_n j} on the right and
(1 + e^{+i k_n N}) e^{i k_n |j|} on the left (the two residue contributions
combine differently on the two sides; for real k_n the moduli agree).

Overlap coefficients use the bilinear (complex-symmetric) pairing that the
dressed states are orthogonal under:

    C_n = (g NF_n / sqrt(2 pi)) Int beta(k) (1 + e^{+ikN}) / (E_n - omega_k + i0+) dk,

verified against direct lattice sums (the single-excitation Hamiltonian is
complex symmetric, so left eigenvectors are unconjugated transposes).
In-band real energies are handled by a Sokhotski-Plemelj split (principal
value plus half-residue); a finite-epsilon quadrature of the same integral
is provided as an oracle for epsilon-sequence extrapolation tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .dynamics import GaussianPacketSpec
from .errors import FormulaPoleError, NonNormalizableStateError, NumericalError
from .model import SystemParams, dispersion, group_velocity, wavenumber_from_energy
from .spectral import SiegertPole

#: Energies closer to the real axis than this count as real for pole handling.
REAL_ENERGY_TOL = 1e-12

#: Absolute quadrature tolerance for the adaptive integrals.
QUAD_ABS_TOL = 1e-11


@dataclass(frozen=True)
class BoundStateProfile:
    """Closed-form exterior rule plus tabulated interior values for one pole."""

    pole: SiegertPole
    norm_factor: complex
    interior: dict[int, complex]

    def amplitude(self, params: SystemParams, j: int) -> complex:
        if 0 <= j <= params.N:
            return self.interior[int(j)]
        return bound_profile(params, self.pole, j, norm_factor=self.norm_factor)


@dataclass(frozen=True)
class DecompositionCoefficient:
    """Expansion coefficient C_n and asymptotic amplitude A_n for one pole.

    C_n is None for in-continuum poles whose amplitude was fitted rather
    than computed (their normalization integral diverges).
    """

    pole: SiegertPole
    C_n: complex | None
    A_n: complex


def _complex_quad(
    func: Callable[[float], complex],
    a: float,
    b: float,
    *,
    points: Sequence[float] | None = None,
    limit: int = 300,
) -> complex:
    kw = {"limit": limit, "epsabs": QUAD_ABS_TOL, "epsrel": 1e-10}
    if points:
        pts = [p for p in points if a < p < b]
        if pts:
            kw["points"] = pts
    re, re_err = quad(lambda x: func(x).real, a, b, **kw)
    im, im_err = quad(lambda x: func(x).imag, a, b, **kw)
    if max(re_err, im_err) > 1e-6:
        raise NumericalError(
            f"quadrature failed to converge (error estimate {max(re_err, im_err):.2e})"
        )
    return re + 1j * im


def _pv_quad(func: Callable[[float], complex], a: float, b: float, pole: float) -> complex:
    """Principal value of Int func(k)/(k - pole) dk over [a, b] containing the pole."""
    kw = {"limit": 300, "weight": "cauchy", "wvar": pole}
    re = quad(lambda x: func(x).real, a, b, **kw)[0]
    im = quad(lambda x: func(x).imag, a, b, **kw)[0]
    return re + 1j * im


def band_integral(
    params: SystemParams,
    numer: Callable[[float], complex],
    E_n: complex,
    *,
    pole_sign: float = +1.0,
) -> complex:
    """Int_{-pi}^{pi} numer(k) / (E_n - omega_k + i * pole_sign * 0+) dk.

    Regular adaptive quadrature off the real band; for real in-band E_n the
    Sokhotski-Plemelj split gives PV minus (pole_sign) i pi times the
    residue density at the two band crossings +-k_E.
    """
    E_n = complex(E_n)
    lo, hi = params.band_limits()
    in_band = abs(E_n.imag) <= REAL_ENERGY_TOL and lo + 1e-12 < E_n.real < hi - 1e-12

    if not in_band:
        hint = []
        if lo < E_n.real < hi:
            hint = [wavenumber_from_energy(params, E_n.real)]
            hint += [-hint[0]]
        return _complex_quad(
            lambda k: numer(k) / (E_n - complex(dispersion(params, k))),
            -math.pi, math.pi, points=hint,
        )

    E = E_n.real
    k_E = wavenumber_from_energy(params, E)
    v_g = float(group_velocity(params, k_E))
    d = min(0.4, k_E / 2.0, (math.pi - k_E) / 2.0)
    if d <= 0:
        raise FormulaPoleError("in-band energy sits at a band edge")

    def regular(k: float) -> complex:
        return numer(k) / (E - float(dispersion(params, k)))

    # near +k_E:  1/(E - omega_k) = [(k - k_E)/(E - omega_k)] / (k - k_E)
    def smooth_p(k: float) -> complex:
        dk = k - k_E
        if abs(dk) < 1e-9:
            return numer(k) * (-1.0 / v_g)
        return numer(k) * dk / (E - float(dispersion(params, k)))

    def smooth_m(k: float) -> complex:
        dk = k + k_E
        if abs(dk) < 1e-9:
            return numer(k) * (1.0 / v_g)
        return numer(k) * dk / (E - float(dispersion(params, k)))

    pv = _pv_quad(smooth_p, k_E - d, k_E + d, k_E)
    pv += _pv_quad(smooth_m, -k_E - d, -k_E + d, -k_E)
    for a, b in ((-math.pi, -k_E - d), (-k_E + d, k_E - d), (k_E + d, math.pi)):
        if b > a:
            pv += _complex_quad(regular, a, b)

    residue = -1j * pole_sign * math.pi * (numer(k_E) + numer(-k_E)) / v_g
    return pv + residue


def band_integral_finite_eps(
    params: SystemParams,
    numer: Callable[[float], complex],
    E_n: complex,
    eps: float,
    *,
    pole_sign: float = +1.0,
) -> complex:
    """Same integral with the regulator kept finite (epsilon-sequence oracle)."""
    if eps <= 0:
        raise ValueError("finite-epsilon evaluation requires eps > 0")
    E_shift = complex(E_n) + 1j * pole_sign * eps
    hint: list[float] = []
    lo, hi = params.band_limits()
    if lo < E_n.real < hi:
        k_E = wavenumber_from_energy(params, E_n.real)
        hint = [k_E, -k_E, k_E - 10 * eps, k_E + 10 * eps, -k_E - 10 * eps, -k_E + 10 * eps]
    return _complex_quad(
        lambda k: numer(k) / (E_shift - complex(dispersion(params, k))),
        -math.pi, math.pi, points=hint, limit=800,
    )


def _require_off_axis(params: SystemParams, pole: SiegertPole) -> None:
    lo, hi = params.band_limits()
    if abs(pole.E_n.imag) <= REAL_ENERGY_TOL and lo < pole.E_n.real < hi:
        raise NonNormalizableStateError(
            f"pole at E_n={pole.E_n!r} lies inside the band on the real axis; "
            "its normalization integral diverges (in-continuum state). Use the "
            "un-normalized profile and a fitted amplitude instead."
        )


def normalization_factor(
    params: SystemParams,
    pole: SiegertPole,
    epsilon: float = 0.0,
    *,
    kind: str = "modulus",
) -> complex:
    """Dressing normalization NF_n = 1 / sqrt(1 + g^2/(2 pi) * I).

    kind="modulus" uses the integrand |1 + e^{ikN}|^2 / |E_n - omega_k|^2
    (exact for real energies outside the band); kind="bilinear" uses the
    analytic continuation (2 + 2 cos Nk) / (E_n - omega_k)^2, which equals
    the complex-symmetric lattice sum for any pole and is the normalization
    under which the overlap coefficients reproduce the dynamics.  Both
    coincide for real E_n.  Raises NonNormalizableStateError for real
    in-band energies.
    """
    del epsilon  # the divergent in-band case is signalled, never regularized here
    _require_off_axis(params, pole)
    E_n = pole.E_n
    N = params.N
    lo, hi = params.band_limits()
    hint = []
    if lo < E_n.real < hi:
        k_E = wavenumber_from_energy(params, E_n.real)
        hint = [k_E, -k_E]
    if kind == "modulus":
        integral = _complex_quad(
            lambda k: (2.0 + 2.0 * math.cos(N * k)) / abs(E_n - complex(dispersion(params, k))) ** 2,
            -math.pi, math.pi, points=hint,
        )
    elif kind == "bilinear":
        integral = _complex_quad(
            lambda k: (2.0 + 2.0 * math.cos(N * k)) / (E_n - complex(dispersion(params, k))) ** 2,
            -math.pi, math.pi, points=hint,
        )
    else:
        raise ValueError(f"unknown normalization kind {kind!r}")
    return 1.0 / cmath.sqrt(1.0 + params.g**2 / (2.0 * math.pi) * integral)


def bilinear_norm_square(params: SystemParams, pole: SiegertPole) -> complex:
    """(Psi_n, Psi_n) under the unconjugated pairing, for the NF = 1 profile."""
    _require_off_axis(params, pole)
    E_n = pole.E_n
    integral = _complex_quad(
        lambda k: (2.0 + 2.0 * math.cos(params.N * k)) / (E_n - complex(dispersion(params, k))) ** 2,
        -math.pi, math.pi,
    )
    return 1.0 + params.g**2 / (2.0 * math.pi) * integral


def bound_profile(
    params: SystemParams,
    pole: SiegertPole,
    j: int,
    norm_factor: complex | None = None,
) -> complex:
    """Site amplitude <j|Psi_n>; pass norm_factor=None for the un-normalized profile.

    Exterior sites use the side-resolved closed form; interior sites
    0 <= j <= N are evaluated by adaptive quadrature of the defining
    integral (with the Plemelj split for in-band real energies), which the
    closed form must match at the boundaries.
    """
    k_n = pole.k_n
    sk = cmath.sin(k_n)
    if abs(sk) < 1e-12:
        raise FormulaPoleError(f"profile formula has a pole at k_n={k_n!r}")
    nf = 1.0 + 0.0j if norm_factor is None else complex(norm_factor)
    N = params.N
    j = int(j)
    if j >= N:
        return (
            -1j * nf * params.g * (1.0 + cmath.exp(-1j * k_n * N))
            / (2.0 * params.J * sk) * cmath.exp(1j * k_n * j)
        )
    if j <= 0:
        return (
            -1j * nf * params.g * (1.0 + cmath.exp(1j * k_n * N))
            / (2.0 * params.J * sk) * cmath.exp(-1j * k_n * j)
        )
    integral = band_integral(
        params,
        lambda k: cmath.exp(1j * k * j) + cmath.exp(1j * k * (j - N)),
        pole.E_n,
        pole_sign=+1.0,
    )
    return nf * params.g / (2.0 * math.pi) * integral


def bound_state_profile(
    params: SystemParams,
    pole: SiegertPole,
    norm_factor: complex | None = None,
) -> BoundStateProfile:
    """Materialize the closed-form rule plus the tabulated interior values."""
    interior = {
        j: bound_profile(params, pole, j, norm_factor=norm_factor)
        for j in range(0, params.N + 1)
    }
    nf = 1.0 + 0.0j if norm_factor is None else complex(norm_factor)
    return BoundStateProfile(pole=pole, norm_factor=nf, interior=interior)


def overlap_coefficient(
    params: SystemParams,
    pole: SiegertPole,
    packet: GaussianPacketSpec,
    epsilon: float = 0.0,
    *,
    norm_factor: complex | None = None,
) -> complex:
    """Expansion coefficient C_n of the arrival-time packet on one dressed state.

    epsilon = 0 evaluates the exact limit (regular quadrature off the real
    axis, Plemelj split on it); epsilon > 0 keeps the regulator finite and
    serves as the extrapolation oracle.  norm_factor=None uses NF = 1
    (required for in-continuum poles, whose NF is not defined).
    """
    nf = 1.0 + 0.0j if norm_factor is None else complex(norm_factor)

    def numer(k: float) -> complex:
        beta = complex(packet.momentum_amplitude(params, k, at_arrival=True))
        return beta * (1.0 + cmath.exp(1j * k * params.N))

    if epsilon > 0:
        integral = band_integral_finite_eps(params, numer, pole.E_n, epsilon, pole_sign=+1.0)
    else:
        integral = band_integral(params, numer, pole.E_n, pole_sign=+1.0)
    return params.g * nf / math.sqrt(2.0 * math.pi) * integral


def asymptotic_amplitude(
    params: SystemParams,
    pole: SiegertPole,
    C_n: complex,
    norm_factor: complex,
) -> complex:
    """Right-flank amplitude A_n = -i NF_n C_n g (1 + e^{-i k_n N}) / (2 J sin k_n)."""
    sk = cmath.sin(pole.k_n)
    if abs(sk) < 1e-12:
        raise FormulaPoleError(f"amplitude formula has a pole at k_n={pole.k_n!r}")
    return (
        -1j * complex(norm_factor) * complex(C_n) * params.g
        * (1.0 + cmath.exp(-1j * pole.k_n * params.N)) / (2.0 * params.J * sk)
    )


def decomposition_coefficient(
    params: SystemParams,
    pole: SiegertPole,
    packet: GaussianPacketSpec,
    *,
    norm_kind: str = "bilinear",
) -> DecompositionCoefficient:
    """C_n and A_n for a normalizable pole (raises for in-continuum poles)."""
    nf = normalization_factor(params, pole, kind=norm_kind)
    C_n = overlap_coefficient(params, pole, packet, norm_factor=nf)
    A_n = asymptotic_amplitude(params, pole, C_n, nf)
    return DecompositionCoefficient(pole=pole, C_n=C_n, A_n=A_n)


def fitted_in_continuum_coefficient(
    params: SystemParams,
    pole: SiegertPole,
    packet: GaussianPacketSpec,
    amplitude_modulus: float,
) -> DecompositionCoefficient:
    """In-continuum coefficient with |A_n| fitted (e.g. from a plateau height).

    Only the product NF_n * C_n is observable for these states; the phase is
    taken from the un-normalized overlap so interference terms stay
    well-defined.
    """
    raw = overlap_coefficient(params, pole, packet, norm_factor=None)
    a_raw = asymptotic_amplitude(params, pole, raw, 1.0)
    phase = cmath.phase(a_raw) if abs(a_raw) > 0 else 0.0
    return DecompositionCoefficient(
        pole=pole, C_n=None, A_n=amplitude_modulus * cmath.exp(1j * phase)
    )


def _side_amplitude(params: SystemParams, coeff: DecompositionCoefficient, j: int) -> complex:
    k_n = coeff.pole.k_n
    if j >= params.N:
        return coeff.A_n
    if j <= 0:
        ratio = (1.0 + cmath.exp(1j * k_n * params.N)) / (1.0 + cmath.exp(-1j * k_n * params.N))
        return coeff.A_n * ratio
    raise ValueError(
        f"long-time prediction applies outside the coupling region, got j={j}"
    )


def predict_longtime_density(
    params: SystemParams,
    coeffs: Sequence[DecompositionCoefficient],
    j: int,
    t: float,
) -> float:
    """Bound-state-only density |sum_n A_n^side e^{-i E_n t} e^{i k_n |j|}|^2.

    Valid for sites outside the coupling region and times late enough that
    the dispersive continuum has left the observation window.
    """
    j = int(j)
    total = 0.0 + 0.0j
    for coeff in coeffs:
        amp = _side_amplitude(params, coeff, j)
        total += amp * cmath.exp(-1j * coeff.pole.E_n * t) * cmath.exp(1j * coeff.pole.k_n * abs(j))
    return abs(total) ** 2
