"""Cheat strategies: exact values, symmetries, and ceilings."""

import itertools
import math

import numpy as np
import pytest

from dibc.adversaries import (
    AliceCheatStrategy,
    BobCheatStrategy,
    BobMeasurement,
    DeterministicAliceReport,
    alice_control,
    alice_control_by_target,
    behavior_for_alice_cheat,
    behavior_for_bob_cheat,
    bob_gain,
    bob_gain_by_bit,
    eq1_value,
    honest_alice_as_cheat,
    optimal_alice_ghz,
    optimal_bob_ghz,
    relabel_alice_strategy,
)
from dibc.analysis import mc_alice_control, mc_bob_gain
from dibc.behaviors import (
    LocalDeterministicStrategy,
    from_local_deterministic,
    from_quantum,
    index_to_bits,
    pr_box,
)
from dibc.errors import ContractError
from dibc.quantum import BlochDirection, StateVector, X_DIR, Y_DIR, ghz_state, joint_probability

CHSH_WIN = math.cos(math.pi / 8) ** 2


def random_state(rng, n=3):
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(amps / np.linalg.norm(amps), n)


def random_direction(rng):
    v = rng.normal(size=3)
    return BlochDirection(*(v / np.linalg.norm(v)))


def random_alice_strategy(rng):
    """Arbitrary state/axis/rules with well-formed reveals (claimed input = target)."""
    reveal = tuple(
        tuple((t, int(rng.integers(2))) for t in (0, 1)) for _o in (0, 1)
    )
    return AliceCheatStrategy(
        prepared_state=random_state(rng),
        alice_measurement=random_direction(rng),
        commit_rule=(int(rng.integers(2)), int(rng.integers(2))),
        reveal_rule=reveal,
        bob_box_directions=(
            (random_direction(rng), random_direction(rng)),
            (random_direction(rng), random_direction(rng)),
        ),
    )


def random_bob_strategy(rng):
    def meas():
        return BobMeasurement(
            directions=(random_direction(rng), random_direction(rng)),
            result_map=tuple(tuple(int(rng.integers(2)) for _ in (0, 1)) for _ in (0, 1)),
        )

    return BobCheatStrategy(
        joint_state=random_state(rng),
        alice_box_assignment=(Y_DIR, X_DIR),
        bob_measurements=(meas(), meas()),
        guess_rule=tuple(tuple(int(rng.integers(2)) for _ in (0, 1)) for _ in (0, 1)),
    )


class TestOptimalAlice:
    def test_control_is_tsirelson(self):
        assert alice_control(optimal_alice_ghz()) == pytest.approx(CHSH_WIN, abs=1e-9)

    def test_both_reveal_branches_equal(self):
        p0, p1 = alice_control_by_target(optimal_alice_ghz())
        assert p0 == pytest.approx(p1, abs=1e-12)
        assert p0 == pytest.approx(CHSH_WIN, abs=1e-9)

    def test_commitment_is_uniform(self):
        strategy = optimal_alice_ghz()
        p_outcome0 = joint_probability(
            strategy.prepared_state, [(0, strategy.alice_measurement, 0)]
        )
        assert p_outcome0 == pytest.approx(0.5, abs=1e-12)
        assert strategy.commit_rule == (0, 1)

    def test_honest_as_cheat_scores_three_quarters(self):
        p0, p1 = alice_control_by_target(honest_alice_as_cheat())
        assert p0 == pytest.approx(1.0, abs=1e-12)
        assert p1 == pytest.approx(0.5, abs=1e-12)
        assert alice_control(honest_alice_as_cheat()) == pytest.approx(0.75, abs=1e-12)

    def test_garbage_reveal_scores_at_most_half(self):
        # r_A inconsistent with c for target 0: that branch always aborts.
        garbage = AliceCheatStrategy(
            prepared_state=ghz_state(),
            alice_measurement=Y_DIR,
            commit_rule=(0, 1),
            reveal_rule=(((0, 1), (1, 0)), ((0, 0), (1, 1))),
        )
        assert alice_control(garbage) <= 0.5 + 1e-12

    def test_cheat_table_keeps_bob_honest_looking(self):
        table = behavior_for_alice_cheat(optimal_alice_ghz())
        assert table.is_no_signaling(1e-9)

    @pytest.mark.parametrize("seed", range(8))
    def test_relabeling_invariance(self, seed):
        strategy = random_alice_strategy(np.random.default_rng(seed))
        assert alice_control(relabel_alice_strategy(strategy)) == pytest.approx(
            alice_control(strategy), abs=1e-12
        )

    def test_relabeling_invariance_on_optimal(self):
        strategy = optimal_alice_ghz()
        assert alice_control(relabel_alice_strategy(strategy)) == pytest.approx(
            alice_control(strategy), abs=1e-12
        )

    @pytest.mark.parametrize("seed", range(12))
    def test_quantum_ceiling(self, seed):
        strategy = random_alice_strategy(np.random.default_rng(1000 + seed))
        assert alice_control(strategy) <= CHSH_WIN + 1e-9

    def test_monte_carlo_agrees(self):
        strategy = optimal_alice_ghz()
        est = mc_alice_control(strategy, 50_000, seed=77)
        assert est.within_sigmas(alice_control(strategy), 3.0)

    def test_serialization_round_trip(self):
        strategy = optimal_alice_ghz()
        back = AliceCheatStrategy.from_json_dict(strategy.to_json_dict())
        assert alice_control(back) == pytest.approx(alice_control(strategy), abs=1e-15)
        assert back.commit_rule == strategy.commit_rule


class TestEq1:
    def test_pr_relabeling_reaches_one(self):
        assert eq1_value(pr_box(0, 0, 1), DeterministicAliceReport(1)) == 1.0

    def test_best_local_deterministic_is_three_quarters(self):
        best = max(
            eq1_value(from_local_deterministic(s), DeterministicAliceReport(x_a))
            for s in LocalDeterministicStrategy.all_strategies(2)
            for x_a in (1, -1)
        )
        assert best == 0.75

    def test_collapsed_state_table_reaches_tsirelson(self):
        # Bob's boxes after her outcome-0 measurement, honest y/x wiring.
        pair = StateVector(
            np.array([1.0, 0.0, 0.0, np.exp(-1j * math.pi / 4)]) / math.sqrt(2), 2
        )
        table = from_quantum(pair, [(Y_DIR, X_DIR), (Y_DIR, X_DIR)])
        assert eq1_value(table, DeterministicAliceReport(1)) == pytest.approx(
            CHSH_WIN, abs=1e-12
        )

    def test_consistent_with_strategy_evaluation(self):
        assert eq1_value(
            from_quantum(
                StateVector(np.array([1, 0, 0, np.exp(-1j * math.pi / 4)]) / math.sqrt(2), 2),
                [(Y_DIR, X_DIR), (Y_DIR, X_DIR)],
            ),
            DeterministicAliceReport(1),
        ) == pytest.approx(alice_control(optimal_alice_ghz()), abs=1e-12)

    def test_invalid_report_rejected(self):
        with pytest.raises(ContractError):
            DeterministicAliceReport(0)

    def test_signaling_boxes_rejected(self):
        import numpy as np

        from dibc.behaviors import BehaviorTable, bits_to_index

        probs = np.zeros((4, 4))
        for s1, s2 in itertools.product((0, 1), repeat=2):
            probs[bits_to_index((s1, s2)), bits_to_index((s2, 0))] = 1.0
        with pytest.raises(ContractError):
            eq1_value(BehaviorTable(2, probs), DeterministicAliceReport(1))


class TestOptimalBob:
    def test_gain_is_three_quarters(self):
        assert bob_gain(optimal_bob_ghz()) == pytest.approx(0.75, abs=1e-9)

    def test_perfect_on_bit_zero_chance_on_bit_one(self):
        # His y/x ancilla measurements complete the certain YYX-type parity
        # when she measured y (bit 0); the x branch carries no correlation.
        p0, p1 = bob_gain_by_bit(optimal_bob_ghz())
        assert p0 == pytest.approx(1.0, abs=1e-12)
        assert p1 == pytest.approx(0.5, abs=1e-12)

    def test_alice_marginals_unchanged(self):
        table = behavior_for_bob_cheat(optimal_bob_ghz())
        for s_idx in range(8):
            marg = table.party_marginal(0, index_to_bits(s_idx, 3))
            np.testing.assert_allclose(marg, [0.5, 0.5], atol=1e-12)

    @pytest.mark.parametrize("seed", range(12))
    def test_no_signaling_ceiling(self, seed):
        strategy = random_bob_strategy(np.random.default_rng(2000 + seed))
        assert bob_gain(strategy) <= 0.75 + 1e-9

    def test_guess_ignoring_commitment_is_chance(self):
        # Constant guess 0 regardless of c or the measured result.
        strategy = BobCheatStrategy(
            joint_state=ghz_state(),
            alice_box_assignment=(Y_DIR, X_DIR),
            bob_measurements=optimal_bob_ghz().bob_measurements,
            guess_rule=((0, 0), (0, 0)),
        )
        assert bob_gain(strategy) == pytest.approx(0.5, abs=1e-12)

    def test_monte_carlo_agrees(self):
        strategy = optimal_bob_ghz()
        est = mc_bob_gain(strategy, 50_000, seed=78)
        assert est.within_sigmas(bob_gain(strategy), 3.0)

    def test_serialization_round_trip(self):
        strategy = optimal_bob_ghz()
        back = BobCheatStrategy.from_json_dict(strategy.to_json_dict())
        assert bob_gain(back) == pytest.approx(bob_gain(strategy), abs=1e-15)
        assert back.guess_rule == strategy.guess_rule
