"""Black-box behaviors: conditional distributions P(outputs | inputs).

A behavior over n binary-input/binary-output boxes is stored as a
(2**n, 2**n) array indexed by [input index, output index], where party 0
holds the most significant bit of both indices (matching the qubit-ordering
convention of `dibc.quantum`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .quantum import BlochDirection, StateVector, _apply_on_qubit, as_generator

NORM_TOL = 1e-9

# The four GHZ-paradox input triples (those with s_A ^ s_B ^ s_C = 1).
GHZ_INPUT_TRIPLES = ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1))


def ghz_relation_holds(s: tuple[int, int, int], r: tuple[int, int, int]) -> bool:
    """The paradox relation r_A ^ r_B ^ r_C = s_A.s_B.s_C ^ 1."""
    return (r[0] ^ r[1] ^ r[2]) == ((s[0] & s[1] & s[2]) ^ 1)


def bits_to_index(bits) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | (b & 1)
    return idx


def index_to_bits(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - i)) & 1 for i in range(n))


@dataclass(frozen=True)
class BehaviorTable:
    """Joint conditional distribution for `party_count` boxes."""

    party_count: int
    probs: np.ndarray
    _ns_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        size = 2**self.party_count
        probs = np.asarray(self.probs, dtype=float).copy()
        if probs.shape != (size, size):
            raise ContractError(f"expected a {size}x{size} table, got shape {probs.shape}")
        if probs.min() < -1e-12:
            raise ContractError(f"negative probability entry: {probs.min()!r}")
        probs = np.clip(probs, 0.0, None)
        row_sums = probs.sum(axis=1)
        if np.max(np.abs(row_sums - 1.0)) > NORM_TOL:
            raise ContractError(
                f"output distributions must sum to 1 within {NORM_TOL}; "
                f"worst row sum = {row_sums[np.argmax(np.abs(row_sums - 1.0))]!r}"
            )
        probs /= row_sums[:, None]
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def prob(self, inputs, outputs) -> float:
        return float(self.probs[bits_to_index(inputs), bits_to_index(outputs)])

    def row(self, inputs) -> np.ndarray:
        return self.probs[bits_to_index(inputs)]

    def party_marginal(self, party: int, inputs) -> np.ndarray:
        """[P(r_party=0 | inputs), P(r_party=1 | inputs)] summed over other outputs."""
        n = self.party_count
        r = self.row(inputs).reshape([2] * n)
        axes = tuple(i for i in range(n) if i != party)
        return r.sum(axis=axes)

    def is_no_signaling(self, tol: float = NORM_TOL) -> bool:
        return is_no_signaling(self, tol)

    def check_no_signaling(self, tol: float = NORM_TOL) -> bool:
        """Memoized `is_no_signaling` (tables are immutable)."""
        if tol not in self._ns_cache:
            self._ns_cache[tol] = is_no_signaling(self, tol)
        return self._ns_cache[tol]

    def to_json_dict(self) -> dict:
        n = self.party_count
        table = {}
        for s in range(2**n):
            key = format(s, f"0{n}b")
            table[key] = {
                format(r, f"0{n}b"): float(self.probs[s, r])
                for r in range(2**n)
                if self.probs[s, r] > 0.0
            }
        return {"parties": n, "table": table}

    @classmethod
    def from_json_dict(cls, data: dict, require_no_signaling: bool = False) -> "BehaviorTable":
        n = int(data["parties"])
        probs = np.zeros((2**n, 2**n))
        for s_key, outputs in data["table"].items():
            s = int(s_key, 2)
            for r_key, p in outputs.items():
                probs[s, int(r_key, 2)] = float(p)
        table = cls(n, probs)
        if require_no_signaling and not table.check_no_signaling():
            raise ContractError("behavior table is signaling; refusing to load it for protocol use")
        return table


@dataclass(frozen=True)
class LocalDeterministicStrategy:
    """One response function per party: responses[i] = (r for s=0, r for s=1)."""

    responses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for resp in self.responses:
            if len(resp) != 2 or any(b not in (0, 1) for b in resp):
                raise ContractError(f"response functions must map {{0,1}} -> {{0,1}}, got {resp!r}")

    @property
    def party_count(self) -> int:
        return len(self.responses)

    def output(self, inputs) -> tuple[int, ...]:
        return tuple(self.responses[i][s] for i, s in enumerate(inputs))

    @classmethod
    def all_strategies(cls, party_count: int):
        """All 4**party_count deterministic strategies, lexicographic order."""
        per_party = [(0, 0), (0, 1), (1, 0), (1, 1)]
        for combo in itertools.product(per_party, repeat=party_count):
            yield cls(combo)


@dataclass(frozen=True)
class NoiseModel:
    """Independent symmetric output flip, probability `flip_probability` per box."""

    flip_probability: float

    def __post_init__(self):
        if not 0.0 <= self.flip_probability <= 0.5:
            raise ContractError(f"flip probability must lie in [0, 1/2], got {self.flip_probability!r}")


def from_quantum(
    state: StateVector,
    assignment: list[tuple[BlochDirection, BlochDirection]],
) -> BehaviorTable:
    """Behavior induced by measuring one qubit per party.

    `assignment[i]` gives party i's measurement direction for inputs 0 and 1.
    """
    n = state.qubit_count
    if len(assignment) != n:
        raise ContractError(
            f"state has {n} qubits but the assignment covers {len(assignment)} parties"
        )
    probs = np.zeros((2**n, 2**n))
    for s in range(2**n):
        s_bits = index_to_bits(s, n)
        # Project every qubit for outcome 0/1 at once: transform amplitudes by
        # the basis-change whose rows are the outcome eigenvectors.
        amps = state.amplitudes
        for party, s_i in enumerate(s_bits):
            direction = assignment[party][s_i]
            basis = np.stack(
                [_eigvec(direction, 0).conj(), _eigvec(direction, 1).conj()]
            )
            amps = _apply_on_qubit(amps, basis, party, n)
        probs[s] = np.abs(amps) ** 2
    return BehaviorTable(n, probs)


def _eigvec(direction: BlochDirection, outcome: int) -> np.ndarray:
    """An eigenvector of n.sigma for eigenvalue (-1)**outcome."""
    proj = direction.projector(outcome)
    # Rank-1 projector: take its largest column, normalized.
    col = proj[:, int(np.argmax(np.abs(np.diag(proj))))]
    return col / np.linalg.norm(col)


def from_local_deterministic(strategy: LocalDeterministicStrategy) -> BehaviorTable:
    n = strategy.party_count
    probs = np.zeros((2**n, 2**n))
    for s in range(2**n):
        out = strategy.output(index_to_bits(s, n))
        probs[s, bits_to_index(out)] = 1.0
    return BehaviorTable(n, probs)


def pr_box(alpha: int = 0, beta: int = 0, gamma: int = 0) -> BehaviorTable:
    """Bipartite box with r_1 ^ r_2 = (s_1 ^ alpha).(s_2 ^ beta) ^ gamma, uniform otherwise.

    The default (0, 0, 0) is the standard PR box.
    """
    probs = np.zeros((4, 4))
    for s1, s2 in itertools.product((0, 1), repeat=2):
        target = ((s1 ^ alpha) & (s2 ^ beta)) ^ gamma
        for r1, r2 in itertools.product((0, 1), repeat=2):
            if r1 ^ r2 == target:
                probs[bits_to_index((s1, s2)), bits_to_index((r1, r2))] = 0.5
    return BehaviorTable(2, probs)


def is_no_signaling(table: BehaviorTable, tol: float = NORM_TOL) -> bool:
    """Every party's output marginal is independent of the other parties' inputs."""
    n = table.party_count
    for party in range(n):
        # Marginals indexed by the full input tuple; group by this party's input.
        marg = np.stack(
            [table.party_marginal(party, index_to_bits(s, n)) for s in range(2**n)]
        )
        for own_input in (0, 1):
            rows = [
                marg[s]
                for s in range(2**n)
                if index_to_bits(s, n)[party] == own_input
            ]
            ref = rows[0]
            for other in rows[1:]:
                if np.max(np.abs(other - ref)) > tol:
                    return False
    return True


def ghz_satisfaction(table: BehaviorTable) -> float:
    """Mean probability of the GHZ relation over the four valid input triples."""
    if table.party_count != 3:
        raise ContractError(f"GHZ satisfaction needs 3 parties, got {table.party_count}")
    total = 0.0
    for s in GHZ_INPUT_TRIPLES:
        row = table.row(s)
        for r_idx in range(8):
            if ghz_relation_holds(s, index_to_bits(r_idx, 3)):
                total += row[r_idx]
    return total / 4.0


def apply_noise(table: BehaviorTable, noise: NoiseModel) -> BehaviorTable:
    """Flip each box's output independently with the model's probability."""
    eta = noise.flip_probability
    if eta == 0.0:
        return table
    n = table.party_count
    arr = table.probs.reshape([2] * (2 * n))
    for party in range(n):
        arr = (1.0 - eta) * arr + eta * np.flip(arr, axis=n + party)
    return BehaviorTable(n, arr.reshape(2**n, 2**n))


def _inverse_cdf(probs: np.ndarray, u: float) -> int:
    acc = 0.0
    for k, p in enumerate(probs):
        acc += p
        if u < acc:
            return k
    return len(probs) - 1


def sample_outputs(
    table: BehaviorTable,
    inputs,
    rng: np.random.Generator | int | None = None,
) -> tuple[int, ...]:
    """Sample the full output tuple for the given inputs."""
    gen = as_generator(rng)
    r_idx = _inverse_cdf(table.row(inputs), gen.random())
    return index_to_bits(r_idx, table.party_count)


def sample_remaining(
    table: BehaviorTable,
    fixed: dict[int, tuple[int, int]],
    inputs: dict[int, int],
    rng: np.random.Generator | int | None = None,
) -> dict[int, int]:
    """Sample the remaining parties' outputs, conditioned on already-queried boxes.

    `fixed` maps a party to its (input, output); `inputs` gives the inputs of
    every remaining party. Well-defined for no-signaling tables, where the
    fixed parties' marginal does not depend on the inputs chosen later.
    """
    gen = as_generator(rng)
    n = table.party_count
    remaining = sorted(inputs)
    if set(fixed) | set(inputs) != set(range(n)) or set(fixed) & set(inputs):
        raise ContractError("fixed and remaining parties must partition the box set")
    full_inputs = [0] * n
    for party, (s, _r) in fixed.items():
        full_inputs[party] = s
    for party, s in inputs.items():
        full_inputs[party] = s
    row = table.row(full_inputs).reshape([2] * n)
    for party, (_s, r) in fixed.items():
        row = np.take(row, r, axis=party)
        row = np.expand_dims(row, party)
    # Flattening leaves one axis of size 2 per remaining party, in party order.
    row = row.reshape(-1)
    total = float(row.sum())
    if total <= 1e-12:
        raise ContractError("conditioning on a zero-probability output")
    k = _inverse_cdf(row / total, gen.random())
    out_bits = index_to_bits(k, len(remaining))
    return {party: out_bits[i] for i, party in enumerate(remaining)}
