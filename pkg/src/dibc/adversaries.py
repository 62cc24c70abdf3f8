"""Dishonest parties: cheat strategies and exact evaluation of their success.

Alice's control = the mean over both target values of the probability that
honest Bob accepts her reveal of that value. Bob's information gain = the
probability his guess matches honest Alice's committed bit before the reveal.
Both are evaluated exactly from the joint quantum state via Born-rule sums;
Monte Carlo cross-checks live in `dibc.analysis`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .behaviors import BehaviorTable, from_quantum, ghz_relation_holds
from .errors import ContractError
from .protocol import INPUT_PAIRS, CommitMessage, RevealMessage, Verdict
from .quantum import BlochDirection, StateVector, X_DIR, Y_DIR, ghz_state, joint_probability

# Honest box wiring: input 0 measures sigma_y, input 1 measures sigma_x.
HONEST_ASSIGNMENT = (Y_DIR, X_DIR)

_BITS = (0, 1)


def _check_bit_rule(rule, shape_desc):
    def walk(node):
        if isinstance(node, tuple):
            for sub in node:
                walk(sub)
        elif node not in (0, 1):
            raise ContractError(f"{shape_desc} must contain bits, got {node!r}")

    walk(rule)


@dataclass(frozen=True)
class AliceCheatStrategy:
    """Dishonest committer: a prepared 3-qubit state (her ancilla is qubit 0,
    Bob's boxes are qubits 1 and 2), her measurement axis, and total rules
    mapping her outcome to the commitment and to the (s_A, r_A) she reveals
    for each target value."""

    prepared_state: StateVector
    alice_measurement: BlochDirection
    commit_rule: tuple[int, int]
    reveal_rule: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    bob_box_directions: tuple[
        tuple[BlochDirection, BlochDirection], tuple[BlochDirection, BlochDirection]
    ] = (HONEST_ASSIGNMENT, HONEST_ASSIGNMENT)

    def __post_init__(self):
        if self.prepared_state.qubit_count != 3:
            raise ContractError("prepared state must cover her ancilla plus Bob's two boxes")
        _check_bit_rule(self.commit_rule, "commit rule")
        _check_bit_rule(self.reveal_rule, "reveal rule")

    def to_json_dict(self) -> dict:
        return {
            "state": [[z.real, z.imag] for z in self.prepared_state.amplitudes],
            "measurement": [self.alice_measurement.x, self.alice_measurement.y, self.alice_measurement.z],
            "commit_rule": list(self.commit_rule),
            "reveal_rule": [[list(sr) for sr in per_outcome] for per_outcome in self.reveal_rule],
            "bob_boxes": [[[d.x, d.y, d.z] for d in per_input] for per_input in self.bob_box_directions],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AliceCheatStrategy":
        amps = [complex(re, im) for re, im in data["state"]]
        return cls(
            prepared_state=StateVector.from_amplitudes(amps),
            alice_measurement=BlochDirection(*data["measurement"]),
            commit_rule=tuple(data["commit_rule"]),
            reveal_rule=tuple(tuple(tuple(sr) for sr in per_o) for per_o in data["reveal_rule"]),
            bob_box_directions=tuple(
                tuple(BlochDirection(*d) for d in per_input) for per_input in data["bob_boxes"]
            ),
        )


def optimal_alice_ghz() -> AliceCheatStrategy:
    """The GHZ cheat: measure the ancilla along (x+y)/sqrt(2).

    Outcome 0: commit 0, reveal target t as (s_A=t, r_A=0); outcome 1 is the
    bit-flipped mirror.
    """
    inv = 1.0 / math.sqrt(2.0)
    return AliceCheatStrategy(
        prepared_state=ghz_state(),
        alice_measurement=BlochDirection(inv, inv, 0.0),
        commit_rule=(0, 1),
        reveal_rule=(((0, 0), (1, 0)), ((0, 1), (1, 1))),
    )


def honest_alice_as_cheat() -> AliceCheatStrategy:
    """Honest GHZ boxes scored as a cheat: truthfully report the box outcome,
    claim the target as the input."""
    return AliceCheatStrategy(
        prepared_state=ghz_state(),
        alice_measurement=Y_DIR,
        commit_rule=(0, 1),
        reveal_rule=(((0, 0), (1, 0)), ((0, 1), (1, 1))),
    )


def relabel_alice_strategy(strategy: AliceCheatStrategy) -> AliceCheatStrategy:
    """Apply the relabeling c -> c^1, r_A -> r_A^1, r_B -> r_B^1.

    Flipping box B's outputs is realized by flipping its measurement
    directions. Alice's control is invariant under this relabeling.
    """
    return AliceCheatStrategy(
        prepared_state=strategy.prepared_state,
        alice_measurement=strategy.alice_measurement,
        commit_rule=tuple(c ^ 1 for c in strategy.commit_rule),
        reveal_rule=tuple(
            tuple((s, r ^ 1) for s, r in per_outcome) for per_outcome in strategy.reveal_rule
        ),
        bob_box_directions=(
            tuple(d.flipped() for d in strategy.bob_box_directions[0]),
            strategy.bob_box_directions[1],
        ),
    )


def behavior_for_alice_cheat(strategy: AliceCheatStrategy) -> BehaviorTable:
    """The 3-party behavior of the devices she hands out (her box ignores its input)."""
    return from_quantum(
        strategy.prepared_state,
        [
            (strategy.alice_measurement, strategy.alice_measurement),
            strategy.bob_box_directions[0],
            strategy.bob_box_directions[1],
        ],
    )


def alice_control_by_target(strategy: AliceCheatStrategy) -> tuple[float, float]:
    """Exact success probability of revealing each target value.

    A reveal of target t succeeds when the claimed input equals t, the
    commitment check passes, and Bob's GHZ test passes for his uniformly
    chosen input pair.
    """
    state = strategy.prepared_state
    a_dir = strategy.alice_measurement
    per_target = [0.0, 0.0]
    for outcome in _BITS:
        p_outcome = joint_probability(state, [(0, a_dir, outcome)])
        if p_outcome <= 1e-15:
            continue
        c = strategy.commit_rule[outcome]
        for target in _BITS:
            s_a, r_a = strategy.reveal_rule[outcome][target]
            if s_a != target:
                continue
            if c != r_a and c != (r_a ^ s_a):
                continue
            for s_b, s_c in INPUT_PAIRS[s_a]:
                dir_b = strategy.bob_box_directions[0][s_b]
                dir_c = strategy.bob_box_directions[1][s_c]
                for r_b, r_c in itertools.product(_BITS, repeat=2):
                    if not ghz_relation_holds((s_a, s_b, s_c), (r_a, r_b, r_c)):
                        continue
                    per_target[target] += 0.5 * joint_probability(
                        state, [(0, a_dir, outcome), (1, dir_b, r_b), (2, dir_c, r_c)]
                    )
    return per_target[0], per_target[1]


def alice_control(strategy: AliceCheatStrategy) -> float:
    """Exact mean probability of successfully revealing either target value."""
    p0, p1 = alice_control_by_target(strategy)
    return (p0 + p1) / 2.0


@dataclass(frozen=True)
class DeterministicAliceReport:
    """Her deterministic report for s_A = 1, in +-1 notation: x_A = (-1)**r_A."""

    x_a: int

    def __post_init__(self):
        if self.x_a not in (1, -1):
            raise ContractError(f"x_A must be +1 or -1, got {self.x_a!r}")


def _parity_prob(table: BehaviorTable, inputs: tuple[int, int], parity: int) -> float:
    return sum(
        table.prob(inputs, (r1, r2))
        for r1, r2 in itertools.product(_BITS, repeat=2)
        if (r1 ^ r2) == parity
    )


def eq1_value(bob_boxes: BehaviorTable, report: DeterministicAliceReport) -> float:
    """Her mean cheating probability as a functional of Bob's bipartite boxes.

    Mean of four terms: anti-correlation on the mixed input pairs (reveal-0
    branch) and the x_A-dependent parities on the matched pairs (reveal-1
    branch). Reduces to a CHSH success probability for either x_A.
    """
    if bob_boxes.party_count != 2:
        raise ContractError("Bob holds two boxes")
    if not bob_boxes.check_no_signaling():
        raise ContractError("signaling behavior table rejected")
    odd_if_plus = 1 if report.x_a == 1 else 0
    terms = (
        _parity_prob(bob_boxes, (0, 1), 1),
        _parity_prob(bob_boxes, (1, 0), 1),
        _parity_prob(bob_boxes, (0, 0), odd_if_plus),
        _parity_prob(bob_boxes, (1, 1), odd_if_plus ^ 1),
    )
    return sum(terms) / 4.0


@dataclass(frozen=True)
class BobMeasurement:
    """One two-outcome procedure on his two ancillas: a direction per ancilla
    and a map from the outcome pair to the binary result."""

    directions: tuple[BlochDirection, BlochDirection]
    result_map: tuple[tuple[int, int], tuple[int, int]] = ((0, 1), (1, 0))

    def __post_init__(self):
        _check_bit_rule(self.result_map, "result map")


@dataclass(frozen=True)
class BobCheatStrategy:
    """Dishonest receiver: Alice's box (qubit 0) entangled with his two
    ancillas (qubits 1, 2), one measurement procedure per received
    commitment, and a guess rule (commitment, result) -> guessed bit."""

    joint_state: StateVector
    alice_box_assignment: tuple[BlochDirection, BlochDirection]
    bob_measurements: tuple[BobMeasurement, BobMeasurement]
    guess_rule: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        if self.joint_state.qubit_count != 3:
            raise ContractError("joint state must cover Alice's box plus both ancillas")
        _check_bit_rule(self.guess_rule, "guess rule")

    def to_json_dict(self) -> dict:
        return {
            "state": [[z.real, z.imag] for z in self.joint_state.amplitudes],
            "alice_box": [[d.x, d.y, d.z] for d in self.alice_box_assignment],
            "measurements": [
                {
                    "directions": [[d.x, d.y, d.z] for d in m.directions],
                    "result_map": [list(row) for row in m.result_map],
                }
                for m in self.bob_measurements
            ],
            "guess_rule": [list(row) for row in self.guess_rule],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BobCheatStrategy":
        amps = [complex(re, im) for re, im in data["state"]]
        return cls(
            joint_state=StateVector.from_amplitudes(amps),
            alice_box_assignment=tuple(BlochDirection(*d) for d in data["alice_box"]),
            bob_measurements=tuple(
                BobMeasurement(
                    directions=tuple(BlochDirection(*d) for d in m["directions"]),
                    result_map=tuple(tuple(row) for row in m["result_map"]),
                )
                for m in data["measurements"]
            ),
            guess_rule=tuple(tuple(row) for row in data["guess_rule"]),
        )


def optimal_bob_ghz() -> BobCheatStrategy:
    """The GHZ gain attack: y on one ancilla, x on the other (both branches);
    correlated outcomes and c=0 mean guess 1, anti-correlated reverse."""
    measurement = BobMeasurement(directions=(Y_DIR, X_DIR))
    return BobCheatStrategy(
        joint_state=ghz_state(),
        alice_box_assignment=HONEST_ASSIGNMENT,
        bob_measurements=(measurement, measurement),
        guess_rule=((1, 0), (0, 1)),
    )


def behavior_for_bob_cheat(strategy: BobCheatStrategy) -> BehaviorTable:
    """3-party behavior of the tampered devices; his ancillas' inputs select
    the measurement branch m."""
    return from_quantum(
        strategy.joint_state,
        [
            strategy.alice_box_assignment,
            (strategy.bob_measurements[0].directions[0], strategy.bob_measurements[1].directions[0]),
            (strategy.bob_measurements[0].directions[1], strategy.bob_measurements[1].directions[1]),
        ],
    )


def bob_gain_by_bit(strategy: BobCheatStrategy) -> tuple[float, float]:
    """Exact guessing success conditioned on each committed bit.

    Uniform over her masking bit; he measures branch m = c and guesses via
    his rule.
    """
    state = strategy.joint_state
    per_bit = [0.0, 0.0]
    for s_a, mask in itertools.product(_BITS, repeat=2):
        a_dir = strategy.alice_box_assignment[s_a]
        for r_a in _BITS:
            c = r_a ^ (s_a & mask)
            meas = strategy.bob_measurements[c]
            for o1, o2 in itertools.product(_BITS, repeat=2):
                g = strategy.guess_rule[c][meas.result_map[o1][o2]]
                if g != s_a:
                    continue
                per_bit[s_a] += 0.5 * joint_probability(
                    state,
                    [(0, a_dir, r_a), (1, meas.directions[0], o1), (2, meas.directions[1], o2)],
                )
    return per_bit[0], per_bit[1]


def bob_gain(strategy: BobCheatStrategy) -> float:
    """Exact probability that his guess equals her uniformly committed bit."""
    p0, p1 = bob_gain_by_bit(strategy)
    return (p0 + p1) / 2.0


class CheatingCommitter:
    """Protocol adapter for an AliceCheatStrategy.

    In bare bit commitment the target is the `bit` passed to the run; in coin
    flipping she targets `desired_outcome` by revealing a = b ^ target.
    """

    mask = None

    def __init__(self, strategy: AliceCheatStrategy, desired_outcome: int | None = None):
        self.strategy = strategy
        self.desired_outcome = desired_outcome
        self._outcome: int | None = None
        self._bit: int | None = None

    def pick_bit(self, rng) -> int:
        return 0  # placeholder; her reveal decides the value

    def commit(self, bit: int, box, rng) -> CommitMessage:
        self._bit = bit
        self._outcome = box.query(0)
        return CommitMessage(self.strategy.commit_rule[self._outcome])

    def reveal(self, b, rng) -> RevealMessage:
        if self.desired_outcome is not None and b is not None:
            target = b ^ self.desired_outcome
        else:
            target = self._bit
        s_a, r_a = self.strategy.reveal_rule[self._outcome][target]
        return RevealMessage(s_a, r_a)


class GuessingReceiver:
    """Protocol adapter for a BobCheatStrategy: measures the branch selected
    by the commitment, guesses, and never aborts."""

    queried = None

    def __init__(self, strategy: BobCheatStrategy, desired_outcome: int = 0):
        self.strategy = strategy
        self.desired_outcome = desired_outcome
        self.c: int | None = None
        self.last_guess: int | None = None
        self.b_sent: int | None = None

    def receive(self, msg: CommitMessage) -> None:
        self.c = msg.c

    def choose_b(self, boxes, rng) -> int:
        m = self.c
        o1, o2 = boxes.query(m, m)
        result = self.strategy.bob_measurements[m].result_map[o1][o2]
        self.last_guess = self.strategy.guess_rule[self.c][result]
        self.b_sent = self.last_guess ^ self.desired_outcome
        return self.b_sent

    def verify(self, msg: RevealMessage, boxes, rng) -> Verdict:
        return Verdict.ACCEPT


class CheatingChainAlice:
    """Chain-level adversary for the iterated coin flip, targeting `target`.

    Plays the control cheat whenever she commits and the information-gain
    attack whenever Bob commits, supplying the matching tampered boxes.
    """

    def __init__(
        self,
        target: int = 0,
        commit_strategy: AliceCheatStrategy | None = None,
        receive_strategy: BobCheatStrategy | None = None,
    ):
        self.target = target
        self.commit_strategy = commit_strategy or optimal_alice_ghz()
        self.receive_strategy = receive_strategy or optimal_bob_ghz()
        self._control_table = behavior_for_alice_cheat(self.commit_strategy)
        self._gain_table = behavior_for_bob_cheat(self.receive_strategy)

    def make_committer(self, rep: int) -> CheatingCommitter:
        return CheatingCommitter(self.commit_strategy, desired_outcome=self.target)

    def make_receiver(self, rep: int) -> GuessingReceiver:
        return GuessingReceiver(self.receive_strategy, desired_outcome=self.target)

    def boxes_override(self, rep: int, committer_name: str) -> BehaviorTable:
        return self._control_table if committer_name == "alice" else self._gain_table
