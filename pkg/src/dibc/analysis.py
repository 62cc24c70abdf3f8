"""Independent derivation of the security bounds.

Four routes, none sharing code with the strategy evaluators they check:

* exhaustive enumeration of local deterministic strategies (classical GHZ
  bound, classical CHSH value);
* vertex enumeration over the 24-vertex bipartite no-signaling polytope
  (receiver's information-gain bound);
* numerical optimization over two-qubit states and planar measurement
  angles (committer's control / CHSH quantum value);
* the linear recurrence for the iterated coin-flip cheating bounds.

Monte Carlo estimators for cross-validating the exact strategy evaluations
against protocol runs live here too, backed by the batched trial kernels.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import _backend
from .adversaries import (
    AliceCheatStrategy,
    BobCheatStrategy,
    DeterministicAliceReport,
    behavior_for_alice_cheat,
    behavior_for_bob_cheat,
    eq1_value,
)
from .behaviors import (
    BehaviorTable,
    LocalDeterministicStrategy,
    from_local_deterministic,
    from_quantum,
    ghz_relation_holds,
    GHZ_INPUT_TRIPLES,
    pr_box,
)
from .errors import ContractError, OptimizerError
from .quantum import BlochDirection, StateVector

# Analytic reference values.
CHSH_QUANTUM_WIN = math.cos(math.pi / 8) ** 2  # Tsirelson: ~0.8535533905932737
CLASSICAL_GHZ_WIN = 0.75
NO_SIGNALING_GAIN = 0.75

# Cited context only (best device-dependent protocol and the fair-protocol
# lower bound); nothing in this package reproduces them.
DEVICE_DEPENDENT_CONTROL = 0.75
DEVICE_DEPENDENT_GAIN = 0.75
FAIR_BIAS_LOWER_BOUND = 0.207


class Quantity:
    CLASSICAL_GHZ = "classical-ghz"
    ALICE_CONTROL = "alice-control"
    BOB_GAIN = "bob-gain"
    PR_CONTROL = "pr-control"
    ITERATED_BIAS_ALICE = "iterated-bias-alice"
    ITERATED_BIAS_BOB = "iterated-bias-bob"


class Method:
    BRUTE_FORCE = "brute-force"
    VERTEX_ENUMERATION = "vertex-enumeration"
    NUMERIC_OPTIMIZATION = "numeric-optimization"
    RECURRENCE = "recurrence"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class BoundReport:
    """One computed security quantity with provenance metadata."""

    quantity: str
    value: float
    method: str
    tolerance: float
    runtime_ms: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ContractError(f"bound value must lie in [0, 1], got {self.value!r}")
        if self.tolerance <= 0.0:
            raise ContractError(f"tolerance must be positive, got {self.tolerance!r}")

    def to_json_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "value": self.value,
            "method": self.method,
            "tolerance": self.tolerance,
            "runtime_ms": self.runtime_ms,
        }


CSV_HEADER = ("quantity", "value", "method", "tolerance", "runtime_ms")


def reports_to_csv(reports: list[BoundReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow([r.quantity, repr(r.value), r.method, repr(r.tolerance), r.runtime_ms])
    return buf.getvalue()


def _timed(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


# ---------------------------------------------------------------------------
# Classical bound: exhaustive enumeration.


def classical_ghz_enumeration() -> list[tuple[LocalDeterministicStrategy, int]]:
    """Per-strategy count of satisfied GHZ input triples (integer, out of 4)."""
    results = []
    for strategy in LocalDeterministicStrategy.all_strategies(3):
        satisfied = sum(
            1
            for s in GHZ_INPUT_TRIPLES
            if ghz_relation_holds(s, strategy.output(s))
        )
        results.append((strategy, satisfied))
    return results


def classical_ghz_bound() -> BoundReport:
    """Exact maximum of the GHZ satisfaction over all 64 deterministic strategies."""
    start = time.perf_counter()
    best = max(count for _, count in classical_ghz_enumeration())
    return BoundReport(
        quantity=Quantity.CLASSICAL_GHZ,
        value=best / 4.0,
        method=Method.BRUTE_FORCE,
        tolerance=1e-15,
        runtime_ms=_timed(start),
    )


# ---------------------------------------------------------------------------
# No-signaling polytope: the 24 bipartite vertices.


@dataclass(frozen=True)
class NSVertexSet:
    """The 16 local deterministic vertices followed by the 8 PR-type vertices."""

    vertices: tuple[BehaviorTable, ...]
    local_count: int = 16

    @property
    def local(self) -> tuple[BehaviorTable, ...]:
        return self.vertices[: self.local_count]

    @property
    def pr(self) -> tuple[BehaviorTable, ...]:
        return self.vertices[self.local_count :]


def ns_vertices() -> NSVertexSet:
    locals_ = [
        from_local_deterministic(s) for s in LocalDeterministicStrategy.all_strategies(2)
    ]
    prs = [
        pr_box(alpha, beta, gamma)
        for alpha, beta, gamma in itertools.product((0, 1), repeat=3)
    ]
    vertices = tuple(locals_ + prs)
    distinct = {tuple(np.round(v.probs, 12).ravel()) for v in vertices}
    if len(distinct) != 24:
        raise ContractError(f"expected 24 distinct vertices, got {len(distinct)}")
    for v in vertices:
        if not v.is_no_signaling(1e-12):
            raise ContractError("polytope vertex fails the no-signaling check")
    return NSVertexSet(vertices)


def bob_gain_objective(table: BehaviorTable) -> float:
    """The information-gain functional of a bipartite behavior.

    Party 0 is Alice's box (input s_A, output r_A); party 1 is the receiver's
    effective guess box (input m, output g). Uniform over s_A and the masking
    bit, the two m-branches per (s_A, r_A) are m = r_A and m = r_A ^ s_A, and
    a trial wins when g = s_A.
    """
    if table.party_count != 2:
        raise ContractError("the gain objective is a bipartite functional")
    total = 0.0
    for s_a, r_a in itertools.product((0, 1), repeat=2):
        for m in (r_a, r_a ^ s_a):
            total += 0.25 * table.prob((s_a, m), (r_a, s_a))
    return total


def gain_inequalities_hold(table: BehaviorTable, tol: float = 1e-12) -> bool:
    """The two inequality families that pin the gain bound on no-signaling behaviors."""
    for k in (0, 1):
        lhs = (
            table.prob((0, k), (k, 0))
            + table.prob((1, k), (0, 1))
            + table.prob((1, k), (1, 1))
        )
        if lhs > 1.0 + tol:
            return False
    lhs = table.prob((0, 0), (0, 0)) + table.prob((0, 1), (1, 0))
    return lhs <= 1.0 + tol


def bob_gain_bound(vertex_set: NSVertexSet | None = None) -> BoundReport:
    """Maximum of the gain functional over the no-signaling polytope (exact)."""
    start = time.perf_counter()
    vs = vertex_set or ns_vertices()
    best = max(bob_gain_objective(v) for v in vs.vertices)
    return BoundReport(
        quantity=Quantity.BOB_GAIN,
        value=best,
        method=Method.VERTEX_ENUMERATION,
        tolerance=1e-15,
        runtime_ms=_timed(start),
    )


def pr_control(vertex_set: NSVertexSet | None = None) -> BoundReport:
    """Maximum of the control functional when PR-type boxes are allowed (exact 1)."""
    start = time.perf_counter()
    vs = vertex_set or ns_vertices()
    best = max(
        eq1_value(v, DeterministicAliceReport(x_a))
        for v in vs.pr
        for x_a in (1, -1)
    )
    return BoundReport(
        quantity=Quantity.PR_CONTROL,
        value=best,
        method=Method.VERTEX_ENUMERATION,
        tolerance=1e-15,
        runtime_ms=_timed(start),
    )


# ---------------------------------------------------------------------------
# Quantum control bound: grid + golden-section coordinate ascent.


@dataclass(frozen=True)
class OptimizerConfig:
    """Search configuration: a coarse grid per angle followed by golden-section
    refinement, coordinate by coordinate, with random restarts."""

    grid_points: int = 32
    refine_rounds: int = 20
    restarts: int = 5
    max_sweeps: int = 12
    seed: int = 20260810
    tolerance: float = 1e-6
    planar_only: bool = True


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def control_objective(params: np.ndarray) -> float:
    """eq1 functional of the planar quantum point, maximized over x_A.

    params = (Schmidt angle, box-B angles for inputs 0/1, box-C angles for
    inputs 0/1); measurements lie in the equatorial plane.
    """
    theta, b0, b1, g0, g1 = params
    state = StateVector(
        np.array([math.cos(theta), 0.0, 0.0, math.sin(theta)], dtype=complex), 2
    )
    table = from_quantum(
        state,
        [
            (BlochDirection.from_azimuth(b0), BlochDirection.from_azimuth(b1)),
            (BlochDirection.from_azimuth(g0), BlochDirection.from_azimuth(g1)),
        ],
    )
    return max(
        eq1_value(table, DeterministicAliceReport(1)),
        eq1_value(table, DeterministicAliceReport(-1)),
    )


def _golden_refine(fun, params, coord, lo, hi, rounds):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)

    def at(x):
        params[coord] = x
        return fun(params)

    fc, fd = at(c), at(d)
    for _ in range(rounds):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = at(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = at(d)
    x = c if fc > fd else d
    params[coord] = x
    return max(fc, fd)


def alice_control_bound(config: OptimizerConfig | None = None) -> BoundReport:
    """Numerically maximize the control functional over the planar quantum family.

    Raises OptimizerError when no restart's coordinate ascent stabilizes
    within the sweep budget.
    """
    cfg = config or OptimizerConfig()
    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    grid = np.linspace(0.0, 2.0 * math.pi, cfg.grid_points, endpoint=False)
    spacing = 2.0 * math.pi / cfg.grid_points

    best_value = -math.inf
    converged = False
    for _restart in range(cfg.restarts):
        params = rng.uniform(0.0, 2.0 * math.pi, size=5)
        previous = -math.inf
        value = control_objective(params)
        for _sweep in range(cfg.max_sweeps):
            for coord in range(5):
                current = params[coord]
                values = []
                for x in grid:
                    params[coord] = x
                    values.append(control_objective(params))
                pivot = grid[int(np.argmax(values))]
                if control_objective(_with(params, coord, current)) > max(values):
                    pivot = current
                value = _golden_refine(
                    control_objective, params, coord, pivot - spacing, pivot + spacing,
                    cfg.refine_rounds,
                )
            if value - previous < 1e-12:
                converged = True
                break
            previous = value
        best_value = max(best_value, value)
    if not converged:
        raise OptimizerError(
            f"coordinate ascent did not stabilize within {cfg.max_sweeps} sweeps"
        )
    return BoundReport(
        quantity=Quantity.ALICE_CONTROL,
        value=best_value,
        method=Method.NUMERIC_OPTIMIZATION,
        tolerance=cfg.tolerance,
        runtime_ms=_timed(start),
    )


def _with(params, coord, value):
    out = params.copy()
    out[coord] = value
    return out


# ---------------------------------------------------------------------------
# Iterated coin flipping: the cheating-probability recurrence.


def iterated_bias_sequence(n: int) -> list[tuple[float, float]]:
    """(committer-cheat bound C_k, receiver-cheat bound R_k) for k = 1..n.

    C_1 = cos^2(pi/8) and R_1 = 3/4; each further repetition mixes the two
    branches according to who wins the current flip: the cheater keeps
    committing after outcome 0 and receives after outcome 1.
    """
    if n < 1:
        raise ContractError(f"need at least one repetition, got {n!r}")
    c = CHSH_QUANTUM_WIN
    g = NO_SIGNALING_GAIN
    seq = [(c, g)]
    for _ in range(1, n):
        prev_c, prev_r = seq[-1]
        seq.append((c * prev_c + (1.0 - c) * prev_r, g * prev_c + (1.0 - g) * prev_r))
    return seq


def iterated_bias(n: int) -> tuple[BoundReport, BoundReport]:
    """Upper bounds on either party's probability of forcing their outcome
    after n repetitions (biases are value - 1/2)."""
    start = time.perf_counter()
    c_n, r_n = iterated_bias_sequence(n)[-1]
    ms = _timed(start)
    return (
        BoundReport(f"{Quantity.ITERATED_BIAS_ALICE}(n={n})", c_n, Method.RECURRENCE, 1e-12, ms),
        BoundReport(f"{Quantity.ITERATED_BIAS_BOB}(n={n})", r_n, Method.RECURRENCE, 1e-12, ms),
    )


def iterated_bias_limit() -> float:
    """Fixed point of the recurrence: g / (g + 1 - c) ~ 0.8366 (bias ~ 0.3366)."""
    c = CHSH_QUANTUM_WIN
    g = NO_SIGNALING_GAIN
    return g / (g + 1.0 - c)


def security_vs_chsh(t: float) -> tuple[float, float]:
    """(control, gain) if the theory's maximal CHSH success probability were t.

    Control tracks t; the gain stays at the no-signaling value 3/4.
    """
    if not CLASSICAL_GHZ_WIN <= t <= 1.0:
        raise ContractError(f"CHSH success probability must lie in [3/4, 1], got {t!r}")
    return (t, NO_SIGNALING_GAIN)


# ---------------------------------------------------------------------------
# Monte Carlo cross-validation (batched kernels; see dibc._kernels_py).


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    trials: int
    seed: int

    def within_sigmas(self, expected: float, sigmas: float = 3.0) -> bool:
        band = sigmas * math.sqrt(expected * (1.0 - expected) / self.trials)
        return abs(self.value - expected) <= max(band, 1e-12)

    def to_json_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "trials": self.trials, "seed": self.seed}


def _estimate(successes: int, trials: int, seed: int) -> MonteCarloEstimate:
    p = successes / trials
    return MonteCarloEstimate(p, math.sqrt(p * (1.0 - p) / trials), trials, seed)


def _check_trials(trials: int) -> None:
    if trials < 1:
        raise ContractError(f"need at least one trial, got {trials!r}")


def _table_array(table: BehaviorTable) -> np.ndarray:
    return np.ascontiguousarray(table.probs, dtype=np.float64)


def mc_honest_accept(table: BehaviorTable, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Accept rate of honest commit/reveal runs with uniform committed bits."""
    _check_trials(trials)
    if not table.check_no_signaling():
        raise ContractError("signaling behavior table rejected before execution")
    rng = np.random.default_rng(seed)
    bits = (rng.random(trials) >= 0.5).astype(np.uint8)
    u = rng.random((trials, 4))
    verdicts = _backend.bc_trials(_table_array(table), bits, u)
    return _estimate(int(np.count_nonzero(verdicts == 0)), trials, seed)


def mc_alice_control(strategy: AliceCheatStrategy, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Protocol-run estimate of the strategy's control (uniform random targets)."""
    _check_trials(trials)
    table = behavior_for_alice_cheat(strategy)
    commit_c = np.array(strategy.commit_rule, dtype=np.uint8)
    reveal_s = np.array(
        [[sr[0] for sr in per_o] for per_o in strategy.reveal_rule], dtype=np.uint8
    )
    reveal_r = np.array(
        [[sr[1] for sr in per_o] for per_o in strategy.reveal_rule], dtype=np.uint8
    )
    rng = np.random.default_rng(seed)
    targets = (rng.random(trials) >= 0.5).astype(np.uint8)
    u = rng.random((trials, 3))
    wins = _backend.alice_cheat_trials(_table_array(table), commit_c, reveal_s, reveal_r, targets, u)
    return _estimate(int(np.count_nonzero(wins)), trials, seed)


def mc_bob_gain(strategy: BobCheatStrategy, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Protocol-run estimate of the strategy's guessing success."""
    _check_trials(trials)
    table = behavior_for_bob_cheat(strategy)
    guess = np.array(strategy.guess_rule, dtype=np.uint8)
    rmap0 = np.array(strategy.bob_measurements[0].result_map, dtype=np.uint8)
    rmap1 = np.array(strategy.bob_measurements[1].result_map, dtype=np.uint8)
    rng = np.random.default_rng(seed)
    u = rng.random((trials, 4))
    wins = _backend.gain_trials(_table_array(table), guess, rmap0, rmap1, u)
    return _estimate(int(np.count_nonzero(wins)), trials, seed)


@dataclass(frozen=True)
class CoinflipStats:
    heads: int
    tails: int
    aborts: int
    trials: int
    seed: int

    @property
    def abort_rate(self) -> float:
        return self.aborts / self.trials

    def to_json_dict(self) -> dict:
        return {
            "p0": self.heads / self.trials,
            "p1": self.tails / self.trials,
            "abort_rate": self.abort_rate,
            "trials": self.trials,
            "seed": self.seed,
        }


def mc_coinflip(table: BehaviorTable, trials: int, seed: int = 0) -> CoinflipStats:
    """Outcome frequencies and abort rate of honest coin flips."""
    _check_trials(trials)
    if not table.check_no_signaling():
        raise ContractError("signaling behavior table rejected before execution")
    rng = np.random.default_rng(seed)
    u = rng.random((trials, 6))
    codes = _backend.coinflip_trials(_table_array(table), u)
    heads = int(np.count_nonzero(codes == 0))
    tails = int(np.count_nonzero(codes == 1))
    return CoinflipStats(heads, tails, trials - heads - tails, trials, seed)


def monte_carlo(target, trials: int, seed: int = 0) -> MonteCarloEstimate:
    """Seeded empirical estimate for a strategy or an honest behavior table."""
    if isinstance(target, AliceCheatStrategy):
        return mc_alice_control(target, trials, seed)
    if isinstance(target, BobCheatStrategy):
        return mc_bob_gain(target, trials, seed)
    if isinstance(target, BehaviorTable):
        return mc_honest_accept(target, trials, seed)
    raise ContractError(f"no Monte Carlo route for {type(target).__name__}")
