"""Device-independent bit commitment and coin flipping.

Simulation of the GHZ-based commit/reveal protocol over untrusted
binary-input/binary-output boxes, optimal cheating strategies for either
party, and independent re-derivations of the security bounds (classical GHZ
value 3/4, quantum control cos^2(pi/8), no-signaling gain 3/4, PR-box
breakdown, iterated coin-flip biases).
"""

from ._backend import backend_name
from .adversaries import (
    AliceCheatStrategy,
    BobCheatStrategy,
    BobMeasurement,
    CheatingChainAlice,
    CheatingCommitter,
    DeterministicAliceReport,
    GuessingReceiver,
    alice_control,
    behavior_for_alice_cheat,
    behavior_for_bob_cheat,
    bob_gain,
    eq1_value,
    honest_alice_as_cheat,
    optimal_alice_ghz,
    optimal_bob_ghz,
)
from .analysis import (
    BoundReport,
    CHSH_QUANTUM_WIN,
    MonteCarloEstimate,
    OptimizerConfig,
    alice_control_bound,
    bob_gain_bound,
    classical_ghz_bound,
    iterated_bias,
    iterated_bias_limit,
    mc_alice_control,
    mc_bob_gain,
    mc_coinflip,
    mc_honest_accept,
    monte_carlo,
    ns_vertices,
    pr_control,
    security_vs_chsh,
)
from .behaviors import (
    BehaviorTable,
    LocalDeterministicStrategy,
    NoiseModel,
    apply_noise,
    from_local_deterministic,
    from_quantum,
    ghz_satisfaction,
    is_no_signaling,
    pr_box,
    sample_outputs,
    sample_remaining,
)
from .errors import ContractError, OptimizerError
from .protocol import (
    BCTranscript,
    CoinResult,
    CommitMessage,
    HonestChainParty,
    HonestCommitter,
    HonestReceiver,
    RevealMessage,
    Verdict,
    run_bc,
    run_coinflip,
    run_iterated_coinflip,
)
from .quantum import (
    BlochDirection,
    StateVector,
    ghz_state,
    joint_probability,
    measure_and_collapse,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
