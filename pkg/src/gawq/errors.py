"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so keep the hierarchy flat
and explicit rather than reusing builtins for domain failures.
"""

from __future__ import annotations


class GawqError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GawqError):
    """Invalid or inconsistent run configuration (bad key, type, constraint)."""


class NumericalError(GawqError):
    """A numerical procedure failed to reach its stated tolerance."""


class SingularScatteringError(NumericalError):
    """Scattering denominator vanished: the requested point sits on a
    spectral singularity and the stationary formulas do not apply there."""

    def __init__(self, k: float, gamma: float, message: str | None = None):
        self.k = k
        self.gamma = gamma
        if message is None:
            message = (
                f"singular scattering at k={k!r}, gamma={gamma!r}: the "
                "stationary amplitudes diverge; use the time-dependent "
                "wave-packet machinery for this configuration"
            )
        super().__init__(message)


class FormulaPoleError(GawqError):
    """A closed-form expression was evaluated at a pole of the formula
    itself (sin k_n ~ 0), not at a physical feature."""


class NonNormalizableStateError(GawqError):
    """The normalization integral diverges: real in-band energy
    (in-continuum state). Callers fall back to the un-normalized profile."""


class BoundaryViolationError(GawqError):
    """Probability reached the lattice edges; the run is no longer a faithful
    open-chain simulation."""

    def __init__(self, time: float, edge_probability: float):
        self.time = time
        self.edge_probability = edge_probability
        super().__init__(
            f"edge probability {edge_probability:.3e} exceeded the guard "
            f"threshold at t={time:.6g}; enlarge the lattice or raise "
            "the guard explicitly"
        )
