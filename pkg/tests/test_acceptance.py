"""Acceptance gate: one test per criterion, each at its stated tolerance.

The suite object caches the two expensive wave-packet runs, so the whole
module costs a few minutes, dominated by the Jt=2500 gain run.  Run with
`pytest tests/test_acceptance.py -v -s` to see one line per criterion.
"""

import numpy as np
import pytest

from gawq.acceptance import PACKET, AcceptanceSuite
from gawq.modes import decomposition_coefficient, predict_longtime_density
from gawq.spectral import solve_poles


@pytest.fixture(scope="module")
def suite():
    return AcceptanceSuite()


def _check(result):
    line = f"[{'PASS' if result.passed else 'FAIL'}] criterion {result.index}: " \
           f"{result.name} ({result.elapsed:.1f}s)"
    print(f"\n{line}\n    {result.detail}")
    assert result.passed, result.detail


def test_criterion_01_oracle_equivalence(suite):
    _check(suite.criterion_1())


def test_criterion_02_unitarity(suite):
    _check(suite.criterion_2())


def test_criterion_03_decoupling(suite):
    _check(suite.criterion_3())


def test_criterion_04_spectral_singularity(suite):
    _check(suite.criterion_4())


def test_criterion_05_pole_spectrum(suite):
    _check(suite.criterion_5())


def test_criterion_06_singularity_pole_consistency(suite):
    _check(suite.criterion_6())


def test_criterion_07_loss_run_rates(suite):
    _check(suite.criterion_7())


def test_criterion_08_free_propagation(suite):
    _check(suite.criterion_8())


def test_criterion_09_gain_run_diagnostics(suite):
    _check(suite.criterion_9())


def test_criterion_10_longtime_closure(suite):
    _check(suite.criterion_10())


def test_criterion_11_property_suite(suite):
    _check(suite.criterion_11())


def test_growing_pole_alone_closes_near_field(suite):
    # single-pole variant of the closure: within +-40 sites of the coupling
    # region the growing state alone reproduces the simulated density
    obs = suite.gain_run()
    params = suite.gain_params()
    grow = next(
        q for q in solve_poles(params) if q.classification == "growing"
    )
    coeff = decomposition_coefficient(params, grow, PACKET)
    P2200 = suite.gain_snapshot(2200.0)
    worst = 0.0
    for j in list(range(-40, 0)) + list(range(params.N + 1, params.N + 41)):
        pred = predict_longtime_density(params, [coeff], j, 2200.0)
        sim = float(P2200[j - obs.j_min])
        worst = max(worst, abs(pred - sim) / sim)
    assert worst < 0.15, f"max relative deviation {worst:.3f}"
