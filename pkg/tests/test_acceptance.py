"""Acceptance suite: every headline number at its stated tolerance.

Run with `pytest tests/test_acceptance.py -s` to see one PASS line per
criterion (failures surface as ordinary assertion errors).
"""

import math
import time

import pytest

from dibc.adversaries import (
    HONEST_ASSIGNMENT,
    alice_control,
    bob_gain,
    optimal_alice_ghz,
    optimal_bob_ghz,
)
from dibc.analysis import (
    CHSH_QUANTUM_WIN,
    OptimizerConfig,
    alice_control_bound,
    bob_gain_bound,
    classical_ghz_bound,
    gain_inequalities_hold,
    iterated_bias,
    mc_alice_control,
    mc_bob_gain,
    mc_honest_accept,
    ns_vertices,
    pr_control,
    classical_ghz_enumeration,
)
from dibc.behaviors import NoiseModel, apply_noise, from_quantum, ghz_satisfaction
from dibc.quantum import ghz_state

TRIALS = 100_000


def _report(number: int, text: str, started: float, limit: float | None = None) -> None:
    elapsed = time.perf_counter() - started
    budget = f", {elapsed:.2f}s" + (f" < {limit:.0f}s" if limit else "")
    print(f"PASS criterion {number}: {text}{budget}")


def _sigma(p: float, trials: int = TRIALS) -> float:
    return math.sqrt(p * (1.0 - p) / trials)


@pytest.fixture(scope="module")
def honest_table():
    return from_quantum(ghz_state(), [HONEST_ASSIGNMENT] * 3)


def test_criterion_1_ghz_paradox_exactness(honest_table):
    started = time.perf_counter()
    assert abs(ghz_satisfaction(honest_table) - 1.0) <= 1e-12
    est = mc_honest_accept(honest_table, TRIALS, seed=1)
    aborts = round((1.0 - est.value) * TRIALS)
    assert aborts == 0
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _report(1, f"GHZ satisfaction exactly 1; 0 aborts in {TRIALS} honest runs", started, 10)


def test_criterion_2_classical_bound():
    started = time.perf_counter()
    report = classical_ghz_bound()
    assert report.value == 0.75
    assert len(classical_ghz_enumeration()) == 64
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(2, "classical GHZ bound = 3/4 exactly over 64 strategies", started, 1)


def test_criterion_3_alice_control():
    started = time.perf_counter()
    exact = alice_control(optimal_alice_ghz())
    assert abs(exact - CHSH_QUANTUM_WIN) <= 1e-9
    optimized = alice_control_bound(OptimizerConfig())
    assert abs(optimized.value - CHSH_QUANTUM_WIN) <= 1e-6
    assert optimized.value <= CHSH_QUANTUM_WIN + 1e-6
    est = mc_alice_control(optimal_alice_ghz(), TRIALS, seed=3)
    assert abs(est.value - exact) <= 3.0 * _sigma(exact)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    _report(3, "control = cos^2(pi/8) exactly, optimizer and MC agree", started, 60)


def test_criterion_4_bob_gain():
    started = time.perf_counter()
    exact = bob_gain(optimal_bob_ghz())
    assert abs(exact - 0.75) <= 1e-9
    vertex_set = ns_vertices()
    assert bob_gain_bound(vertex_set).value == 0.75
    assert all(gain_inequalities_hold(v, tol=1e-12) for v in vertex_set.vertices)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(4, "gain = 3/4 exact and at the 24-vertex polytope maximum", started, 1)


def test_criterion_5_pr_breakdown():
    started = time.perf_counter()
    assert pr_control().value == 1.0
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(5, "PR-type boxes drive the control functional to exactly 1", started, 1)


def test_criterion_6_coinflip_biases():
    started = time.perf_counter()
    a1, b1 = iterated_bias(1)
    assert abs(a1.value - CHSH_QUANTUM_WIN) <= 1e-12 and abs(a1.value - 0.8536) <= 5e-5
    assert b1.value == 0.75
    a2, b2 = iterated_bias(2)
    assert abs(a2.value - 0.8384) <= 5e-4
    assert abs(b2.value - 0.8277) <= 5e-4
    a50, b50 = iterated_bias(50)
    for report in (a50, b50):
        assert abs(report.value - 0.83664) <= 1e-4
        assert abs((report.value - 0.5) - 0.336) <= 1e-3
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(6, "biases 0.354/0.25 (n=1), 0.838/0.827 (n=2), 0.3366 limit", started, 1)


def test_criterion_7_noise_properties(honest_table):
    started = time.perf_counter()
    rates = []
    for index, eta in enumerate((0.0, 0.01, 0.1, 0.5)):
        expected = (1.0 - eta) ** 3 + 3.0 * eta**2 * (1.0 - eta)
        table = apply_noise(honest_table, NoiseModel(eta))
        est = mc_honest_accept(table, TRIALS, seed=70 + index)
        band = 3.0 * _sigma(expected)
        assert abs(est.value - expected) <= max(band, 1e-12), f"eta={eta}"
        rates.append(est.value)
    exact_curve = [
        ghz_satisfaction(apply_noise(honest_table, NoiseModel(eta)))
        for eta in (0.0, 0.01, 0.1, 0.5)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(exact_curve, exact_curve[1:]))
    _report(7, "noisy accept rate = (1-eta)^3 + 3 eta^2 (1-eta) on the grid", started)


def test_criterion_8_cross_validation():
    started = time.perf_counter()
    alice_exact = alice_control(optimal_alice_ghz())
    bob_exact = bob_gain(optimal_bob_ghz())
    for seed in (11, 22, 33):
        est_a = mc_alice_control(optimal_alice_ghz(), TRIALS, seed=seed)
        assert abs(est_a.value - alice_exact) < 3.0 * _sigma(alice_exact), f"seed={seed}"
        est_b = mc_bob_gain(optimal_bob_ghz(), TRIALS, seed=seed)
        assert abs(est_b.value - bob_exact) < 3.0 * _sigma(bob_exact), f"seed={seed}"
    _report(8, "exact vs Monte Carlo within 3 sigma for both optimal cheats", started)
