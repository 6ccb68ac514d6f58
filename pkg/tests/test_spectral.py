import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gawq.errors import FormulaPoleError
from gawq.model import SystemParams, coupling_phase
from gawq.scattering import _denominator, _denominator_scale
from gawq.spectral import (
    classify_siegert,
    critical_gain,
    damped_newton,
    eigen_residual,
    find_singularities,
    singularity_residual,
    solve_poles,
    trajectory_sweep,
)

REF = SystemParams(g=0.812, N=3)


def REF_with(gamma):
    return SystemParams(gamma=gamma, g=0.812, N=3)


def test_singularity_residual_near_paper_point():
    r1, r2 = singularity_residual(REF, 1.32, 0.215)
    assert abs(r1) < 2e-3 and abs(r2) < 2e-3  # rounded inputs
    point = find_singularities(REF)[0]
    r1, r2 = singularity_residual(REF, point.k, point.gamma)
    assert max(abs(r1), abs(r2)) < 1e-12


def test_singularity_residual_trivial_cases():
    p2 = SystemParams(g=0.6, N=2)
    r1, r2 = singularity_residual(p2, math.pi / 2, 0.0)
    assert abs(r1) < 1e-12 and abs(r2) < 1e-12
    # ... but that root is decoupled, so it is not reported
    assert all(abs(pt.k - math.pi / 2) > 1e-6 for pt in find_singularities(p2))
    p0 = SystemParams(g=0.0, N=3)
    assert singularity_residual(p0, 1.0, 0.3)[1] == pytest.approx(-0.3 * math.sin(1.0))
    assert find_singularities(p0) == []


def test_find_singularities_reference_numbers():
    point = find_singularities(REF)[0]
    assert point.gamma == pytest.approx(0.215, abs=0.005)
    assert point.k == pytest.approx(1.32, abs=0.01)
    assert point.omega == pytest.approx(-0.496, abs=0.005)
    assert point.residual < 1e-12
    assert all(pt.gamma > 0 for pt in find_singularities(REF))


def test_find_singularities_hand_solvable_N1():
    # g = 0.5, N = 1: sin k (g^2 + 2 cos k) = 0 -> cos k = -1/8
    p = SystemParams(g=0.5, N=1)
    points = find_singularities(p)
    assert len(points) == 1
    k = math.acos(-1.0 / 8.0)
    gamma = 0.25 * (1.0 + math.cos(k)) / math.sin(k)
    assert points[0].k == pytest.approx(k, abs=1e-12)
    assert points[0].gamma == pytest.approx(gamma, abs=1e-12)
    assert points[0].gamma == pytest.approx(0.2205, abs=2e-4)


def test_singularity_zeroes_scattering_denominator():
    for point in find_singularities(REF):
        p = SystemParams(gamma=point.gamma, g=REF.g, N=REF.N)
        den = _denominator(p, point.k)
        assert abs(den) < 1e-8 * _denominator_scale(p, point.k)


def test_eigen_residual_branches_and_errors():
    p = SystemParams(g=0.0, gamma=0.1, N=3)
    # decoupled emitter: residual reduces to the bare mismatch, -i gamma at band center
    assert eigen_residual(p, math.pi / 2) == pytest.approx(-0.1j, abs=1e-12)
    assert eigen_residual(p, 1.0 + 0.2j) == pytest.approx(-2 * cmath.cos(1.0 + 0.2j) - 0.1j)
    with pytest.raises(FormulaPoleError):
        eigen_residual(p, 0.0 + 0.0j)
    # rounded paper point sits close to a root at critical gain
    pg = SystemParams(gamma=0.215, g=0.812, N=3)
    assert abs(eigen_residual(pg, 1.32 + 0j)) < 1e-2


def test_branch_selection_is_explicit():
    pg = SystemParams(gamma=0.3, g=0.812, N=3)
    up = eigen_residual(pg, 1.0 + 0.1j)
    dn = eigen_residual(pg, 1.0 - 0.1j)
    f = 1.0 + cmath.exp(1j * (1.0 + 0.1j) * 3)
    fbar = 1.0 + cmath.exp(-1j * (1.0 - 0.1j) * 3)
    assert up == pytest.approx(
        -2 * cmath.cos(1.0 + 0.1j) - 0.3j + 1j * 0.812**2 * f / cmath.sin(1.0 + 0.1j)
    )
    assert dn == pytest.approx(
        -2 * cmath.cos(1.0 - 0.1j) - 0.3j - 1j * 0.812**2 * fbar / cmath.sin(1.0 - 0.1j)
    )


def test_solve_poles_hermitian_case():
    poles = solve_poles(SystemParams(gamma=0.0, g=0.812, N=3))
    assert len(poles) == 1
    pole = poles[0]
    assert pole.classification == "bound"
    assert abs(pole.k_n.real) < 1e-9
    assert pole.E_n.real == pytest.approx(-2.152, abs=0.005)
    assert abs(pole.E_n.imag) < 1e-10
    assert pole.residual < 1e-10
    assert pole.branch == "upper"


def test_solve_poles_critical_gain():
    gamma_star = critical_gain(REF).gamma
    poles = solve_poles(SystemParams(gamma=gamma_star, g=0.812, N=3))
    assert len(poles) == 2
    classes = {q.classification for q in poles}
    assert classes == {"in-continuum", "growing"}
    bic = next(q for q in poles if q.classification == "in-continuum")
    grow = next(q for q in poles if q.classification == "growing")
    assert bic.E_n.real == pytest.approx(-0.496, abs=0.005)
    assert abs(bic.E_n.imag) < 1e-8
    assert grow.E_n.imag == pytest.approx(0.021, abs=0.002)
    assert 2 * grow.k_n.imag == pytest.approx(0.776, abs=0.01)
    # every pole satisfies its recorded branch equation
    for q in poles:
        assert abs(eigen_residual(REF_with(gamma_star), q.k_n)) < 1e-10


def test_solve_poles_loss_side_empty():
    for gamma in (-0.05, -0.215, -0.5):
        assert solve_poles(REF_with(gamma)) == []


def test_solve_poles_below_critical_single_root():
    assert len(solve_poles(REF_with(0.1))) == 1
    assert len(solve_poles(REF_with(0.215))) == 1  # just below the polished critical value


def test_solve_poles_decoupled_empty():
    assert solve_poles(SystemParams(g=0.0, gamma=0.3, N=3)) == []


def test_solve_poles_box_validation():
    with pytest.raises(ValueError):
        solve_poles(REF, box=(-0.5, 2.0, -1.0, 1.0))


def test_singularity_pole_consistency():
    for point in find_singularities(REF):
        assert abs(eigen_residual(REF_with(point.gamma), complex(point.k, 0.0))) < 1e-10


def test_trajectory_count_transition():
    gamma_star = critical_gain(REF).gamma
    grid = np.arange(0.20, 0.2325, 0.0025)
    rows = trajectory_sweep(REF, grid)
    counts = [(g, len(p)) for g, p in rows]
    transition = next(g for g, c in counts if c >= 2)
    assert transition == pytest.approx(gamma_star, abs=0.005)
    assert transition == pytest.approx(0.215, abs=0.005)


def test_trajectory_negative_gammas_empty():
    rows = trajectory_sweep(REF, [-0.3, -0.2, -0.1])
    assert all(poles == [] for _, poles in rows)


def test_trajectory_hermitian_row_real_energy():
    rows = trajectory_sweep(REF, [0.0])
    (gamma, poles), = rows
    assert gamma == 0.0
    assert len(poles) == 1
    assert abs(poles[0].E_n.imag) < 1e-10


def test_trajectory_grid_must_be_sorted():
    with pytest.raises(ValueError):
        trajectory_sweep(REF, [0.2, 0.1])


def test_classify_siegert_quadrants():
    assert classify_siegert(0.5j) == "bound"
    assert classify_siegert(-0.5j) == "virtual"
    assert classify_siegert(1.32 + 0.388j) == "growing"
    assert classify_siegert(1.0 - 0.2j) == "resonant"
    assert classify_siegert(-1.0 + 0.2j) == "decaying"
    assert classify_siegert(-1.0 - 0.2j) == "antiresonant"
    assert classify_siegert(1.32) == "in-continuum"
    assert classify_siegert(1.32 + 1e-12j) == "in-continuum"


@settings(max_examples=80)
@given(
    re=st.floats(0.01, math.pi - 0.01),
    im=st.floats(0.01, 1.9),
    upper=st.booleans(),
)
def test_classification_matches_quadrant(re, im, upper):
    k = complex(re, im if upper else -im)
    label = classify_siegert(k)
    assert label == ("growing" if upper else "resonant")


def test_damped_newton_on_polynomial():
    root = damped_newton(lambda z: z * z + 1.0, 0.3 + 0.7j)
    assert root is not None
    assert root == pytest.approx(1j, abs=1e-10)
    assert damped_newton(lambda z: z * 0 + 1.0, 0.5) is None


def test_seed_doubling_invariance():
    gamma_star = critical_gain(REF).gamma
    p = REF_with(gamma_star)
    a = solve_poles(p, seeds_per_axis=80)
    b = solve_poles(p, seeds_per_axis=160)
    assert len(a) == len(b)
    for qa, qb in zip(a, b):
        assert abs(qa.k_n - qb.k_n) < 1e-9


def test_no_poles_for_negative_gamma_over_parameter_grid():
    # empirical claim, checked over a documented grid rather than proved
    for g in (0.3, 0.812, 1.2):
        for N in (1, 2, 3):
            for gamma in (-0.1, -0.4):
                p = SystemParams(g=g, N=N, gamma=gamma)
                assert solve_poles(p, seeds_per_axis=30) == []


def test_spurious_decoupled_roots_rejected():
    # no reported pole may sit at a decoupling point of the coupling phase
    gamma_star = critical_gain(REF).gamma
    for q in solve_poles(REF_with(gamma_star)):
        assert abs(complex(coupling_phase(REF, q.k_n))) > 1e-8
