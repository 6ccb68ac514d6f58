import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gawq.errors import SingularScatteringError
from gawq.model import SystemParams, decoupling_wavenumbers, dispersion
from gawq.scattering import (
    generalized_reflection,
    reflection_amplitude,
    scattering_result,
    spectrum_sweep,
    stationary_reflection,
    stationary_solve,
    stationary_transmission,
    transmission_amplitude,
)
from gawq.spectral import find_singularities

LOSS = SystemParams(gamma=-0.215, g=0.812, N=3)
GAIN = SystemParams(gamma=0.215, g=0.812, N=3)


def test_decoupled_emitter_is_transparent():
    p = SystemParams(g=0.0, N=3, gamma=0.3)
    for k in (0.3, 1.0, 2.5):
        assert reflection_amplitude(p, k) == 0.0
        assert transmission_amplitude(p, k) == 1.0


def test_perfect_transmission_at_decoupling_point():
    for gamma in (-0.215, 0.0, 0.215):
        p = SystemParams(gamma=gamma, g=0.812, N=3)
        assert reflection_amplitude(p, math.pi / 3) == 0.0
        assert transmission_amplitude(p, math.pi / 3) == 1.0
    p2 = SystemParams(gamma=0.1, g=0.6, N=2)
    assert transmission_amplitude(p2, math.pi / 2) == 1.0


def test_hermitian_unitarity_point():
    p = SystemParams(gamma=0.0, g=0.812, N=3)
    r = reflection_amplitude(p, 1.0)
    t = transmission_amplitude(p, 1.0)
    assert abs(r) ** 2 + abs(t) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_off_resonance_rejected_by_closed_forms():
    p = SystemParams(omega_a=0.3, g=0.5, N=2)
    with pytest.raises(ValueError, match="omega_a == omega_c"):
        reflection_amplitude(p, 1.0)
    # the stationary solve handles the same point
    sol = stationary_solve(p, 1.0)
    assert abs(sol.W) <= 1.0 + 1e-9


def test_singular_point_raises():
    point = find_singularities(SystemParams(g=0.812, N=3))[0]
    p = SystemParams(gamma=point.gamma, g=0.812, N=3)
    with pytest.raises(SingularScatteringError):
        reflection_amplitude(p, point.k)


def test_loss_point_matches_oracle():
    sol = stationary_solve(LOSS, 1.32)
    r = reflection_amplitude(LOSS, 1.32)
    t = transmission_amplitude(LOSS, 1.32)
    assert abs(r - sol.W) < 1e-12
    assert abs(t - sol.Z) < 1e-12
    res0, resN = sol.continuity_residuals(LOSS, 1.32)
    assert res0 < 1e-12 and resN < 1e-12


def test_free_propagation_oracle():
    p = SystemParams(g=0.0, N=3)
    sol = stationary_solve(p, 0.9)
    assert abs(sol.W) < 1e-14
    assert sol.X == pytest.approx(1.0, abs=1e-14)
    assert abs(sol.Y) < 1e-14
    assert sol.Z == pytest.approx(1.0, abs=1e-14)


def test_oracle_triangle_random_tuples():
    rng = np.random.default_rng(7)
    worst = 0.0
    accepted = 0
    while accepted < 200:
        p = SystemParams(
            gamma=float(rng.uniform(-0.5, 0.5)),
            g=float(rng.uniform(0.1, 1.5)),
            N=int(rng.integers(1, 7)),
        )
        k = float(rng.uniform(0.05, math.pi - 0.05))
        res = scattering_result(p, k)
        if res.singular or abs(res.r) > 1e3:
            continue
        sol = stationary_solve(p, k)
        worst = max(worst, abs(res.r - sol.W), abs(res.t - sol.Z))
        # third cross-check: the general closed forms from the same system
        worst = max(worst, abs(res.r - stationary_reflection(p, k)))
        worst = max(worst, abs(res.t - stationary_transmission(p, k)))
        accepted += 1
    assert worst < 1e-10


def test_off_resonant_closed_forms_match_solve():
    rng = np.random.default_rng(11)
    for _ in range(50):
        p = SystemParams(
            omega_a=float(rng.uniform(-0.5, 0.5)),
            gamma=float(rng.uniform(-0.4, 0.4)),
            g=float(rng.uniform(0.1, 1.2)),
            N=int(rng.integers(1, 6)),
        )
        k = float(rng.uniform(0.1, math.pi - 0.1))
        sol = stationary_solve(p, k)
        assert abs(stationary_reflection(p, k) - sol.W) < 1e-10
        assert abs(stationary_transmission(p, k) - sol.Z) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    k=st.floats(0.05, math.pi - 0.05),
    g=st.floats(0.05, 1.5),
    N=st.integers(1, 6),
)
def test_unitarity_property(k, g, N):
    p = SystemParams(gamma=0.0, g=g, N=N)
    res = scattering_result(p, k)
    assert res.flux_sum == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    k=st.floats(0.05, math.pi - 0.05),
    g=st.floats(0.1, 1.5),
    N=st.integers(1, 6),
    gamma=st.floats(0.01, 0.5),
    loss=st.booleans(),
)
def test_flux_sign_follows_gain_sign(k, g, N, gamma, loss):
    gamma = -gamma if loss else gamma
    p = SystemParams(gamma=gamma, g=g, N=N)
    if any(abs(k - kd) < 1e-3 for kd in decoupling_wavenumbers(p)):
        return
    res = scattering_result(p, k)
    if res.singular:
        return
    assert math.copysign(1.0, res.flux_sum - 1.0) == math.copysign(1.0, gamma)


def test_even_N_spectral_symmetry():
    for N in (2, 4):
        for gamma in (-0.215, 0.215):
            p = SystemParams(gamma=gamma, g=0.812, N=N)
            ks = np.linspace(0.3, math.pi - 0.3, 401)
            for k in ks[:200]:
                a = scattering_result(p, float(k))
                b = scattering_result(p, float(math.pi - k))
                assert a.R == pytest.approx(b.R, abs=1e-12)
                assert a.T == pytest.approx(b.T, abs=1e-12)


def test_spectrum_sweep_flags_singular_points_and_keeps_order():
    point = find_singularities(SystemParams(g=0.812, N=3))[0]
    p = SystemParams(gamma=point.gamma, g=0.812, N=3)
    grid = [1.0, point.k, 2.0]
    rows = spectrum_sweep(p, grid)
    assert [row.k for row in rows] == grid
    assert not rows[0].singular and not rows[2].singular
    assert rows[1].singular and math.isnan(rows[1].R)
    with pytest.raises(ValueError):
        spectrum_sweep(p, [])


def test_generalized_reflection_values():
    p = SystemParams(g=0.0, gamma=0.0, N=3)
    assert generalized_reflection(p, math.pi / 3) == pytest.approx(-1.0, abs=1e-12)

    point = find_singularities(SystemParams(g=0.812, N=3))[0]
    ps = SystemParams(gamma=point.gamma, g=0.812, N=3)
    # blows up approaching the singularity, raises exactly on it
    assert abs(generalized_reflection(ps, point.k + 1e-11)) > 1e10
    with pytest.raises(SingularScatteringError):
        generalized_reflection(ps, point.k)
    # regular on the loss side
    pl = SystemParams(gamma=-point.gamma, g=0.812, N=3)
    val = generalized_reflection(pl, point.k)
    assert np.isfinite(val.real) and np.isfinite(val.imag)


def test_band_edges_rejected():
    with pytest.raises(ValueError):
        reflection_amplitude(LOSS, 1e-12)
    with pytest.raises(ValueError):
        stationary_solve(LOSS, math.pi)


def test_flux_deficit_and_excess_at_reference_point():
    r_loss = scattering_result(LOSS, 1.0)
    r_gain = scattering_result(GAIN, 1.0)
    assert r_loss.flux_sum < 1.0 < r_gain.flux_sum
    assert dispersion(LOSS, 1.0) == pytest.approx(-2 * math.cos(1.0))
