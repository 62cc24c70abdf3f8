"""Executable state machines for bit commitment and coin flipping.

One session is strictly sequential: the committer holds box A (party 0) and
the receiver holds boxes B and C (parties 1, 2) of a shared 3-party behavior
table. Box A is queried during the commit phase; boxes B and C during the
reveal phase, by conditional sampling. Each box can be queried once.

Randomness is consumed from one Generator in a fixed order per phase (see
`dibc._kernels_py` for the exact draw protocol), so batched kernel runs and
per-trial engine runs are reproducibly identical given the same uniforms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .behaviors import BehaviorTable, ghz_relation_holds
from .errors import ContractError
from .quantum import as_generator

# Bob's two candidate input pairs, indexed by the revealed s_A.
INPUT_PAIRS = (((0, 1), (1, 0)), ((0, 0), (1, 1)))


def derive_rng(seed, *indices) -> np.random.Generator:
    """Independent stream for (seed, session index, ...)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(indices)))


class Verdict(enum.Enum):
    ACCEPT = "accept"
    ABORT_COMMITMENT_MISMATCH = "abort-commitment-mismatch"
    ABORT_GHZ_VIOLATION = "abort-ghz-violation"


@dataclass(frozen=True)
class CommitMessage:
    c: int

    def __post_init__(self):
        if self.c not in (0, 1):
            raise ContractError(f"commitment must be a bit, got {self.c!r}")


@dataclass(frozen=True)
class RevealMessage:
    s_a: int
    r_a: int

    def __post_init__(self):
        if self.s_a not in (0, 1) or self.r_a not in (0, 1):
            raise ContractError(f"reveal fields must be bits, got {(self.s_a, self.r_a)!r}")


@dataclass(frozen=True)
class BCTranscript:
    """Full record of one commit/reveal execution.

    `a` is the honest committer's masking bit (None for adversarial
    committers, which fix c by a rule instead). Receiver-side fields are None
    when the receiver aborted before querying its boxes.
    """

    committed_bit: int | None
    a: int | None
    c: int
    s_a: int
    r_a: int
    s_b: int | None
    s_c: int | None
    r_b: int | None
    r_c: int | None
    verdict: Verdict

    def __post_init__(self):
        if self.verdict is Verdict.ACCEPT:
            if self.c not in (self.r_a, self.r_a ^ self.s_a):
                raise ContractError("accepted transcript violates commitment consistency")
            if (self.s_b ^ self.s_c) != (1 ^ self.s_a):
                raise ContractError("accepted transcript has an invalid input pair")
            if not ghz_relation_holds((self.s_a, self.s_b, self.s_c), (self.r_a, self.r_b, self.r_c)):
                raise ContractError("accepted transcript violates the GHZ relation")

    def to_json_dict(self, seed=None, table_id: str | None = None) -> dict:
        d = {
            "committed_bit": self.committed_bit,
            "a": self.a,
            "c": self.c,
            "s_a": self.s_a,
            "r_a": self.r_a,
            "s_b": self.s_b,
            "s_c": self.s_c,
            "r_b": self.r_b,
            "r_c": self.r_c,
            "verdict": self.verdict.value,
        }
        if seed is not None:
            d["seed"] = seed
        if table_id is not None:
            d["table"] = table_id
        return d


@dataclass(frozen=True)
class CoinResult:
    """Outcome bit, or an abort attributed to the party whose check failed."""

    outcome: int | None
    verdict: Verdict
    aborted_by: str | None = None

    @property
    def is_aborted(self) -> bool:
        return self.verdict is not Verdict.ACCEPT


class _CommitterBox:
    """Single-query view of party 0."""

    def __init__(self, session):
        self._session = session

    def query(self, s: int) -> int:
        return self._session.query_committer(s)


class _ReceiverBoxes:
    """Single-query joint view of parties 1 and 2."""

    def __init__(self, session):
        self._session = session

    def query(self, s_b: int, s_c: int) -> tuple[int, int]:
        return self._session.query_receiver(s_b, s_c)


class _Session:
    """Sequential query access to one 3-party behavior table."""

    def __init__(self, table: BehaviorTable, rng: np.random.Generator):
        if table.party_count != 3:
            raise ContractError(f"protocol needs a 3-party table, got {table.party_count}")
        if not table.check_no_signaling():
            raise ContractError("signaling behavior table rejected before execution")
        self._probs = table.probs
        self._rng = rng
        self._committer_query: tuple[int, int] | None = None
        self._receiver_done = False

    def query_committer(self, s: int) -> int:
        if self._committer_query is not None:
            raise ContractError("committer box was already queried")
        row = self._probs[4 * s]
        p0 = row[0] + row[1] + row[2] + row[3]
        r = 0 if self._rng.random() < p0 else 1
        self._committer_query = (s, r)
        return r

    def query_receiver(self, s_b: int, s_c: int) -> tuple[int, int]:
        if self._receiver_done:
            raise ContractError("receiver boxes were already queried")
        self._receiver_done = True
        if self._committer_query is not None:
            s_a, r_a = self._committer_query
            row = self._probs[4 * s_a + 2 * s_b + s_c]
            base = 4 * r_a
            chunk = row[base : base + 4]
        else:
            # Committer never used its box; parties 1,2 marginal (input 0 on A).
            row = self._probs[2 * s_b + s_c]
            chunk = row[0:4] + row[4:8]
        norm = chunk[0] + chunk[1] + chunk[2] + chunk[3]
        if norm <= 1e-12:
            raise ContractError("conditioning on a zero-probability committer output")
        u = self._rng.random()
        acc = 0.0
        k = 3
        for j in range(4):
            acc += chunk[j] / norm
            if u < acc:
                k = j
                break
        return k >> 1, k & 1


class HonestCommitter:
    """Honest Alice: inputs her bit, masks it with a uniform bit."""

    def __init__(self, forced_bit: int | None = None):
        self.forced_bit = forced_bit
        self.mask: int | None = None
        self._s: int | None = None
        self._r: int | None = None

    def pick_bit(self, rng) -> int:
        if self.forced_bit is not None:
            return self.forced_bit
        return 0 if rng.random() < 0.5 else 1

    def commit(self, bit: int, box: _CommitterBox, rng) -> CommitMessage:
        self._s = bit
        self._r = box.query(bit)
        self.mask = 0 if rng.random() < 0.5 else 1
        c = self._r ^ (self._s & self.mask)
        return CommitMessage(c)

    def reveal(self, b, rng) -> RevealMessage:
        return RevealMessage(self._s, self._r)


class HonestReceiver:
    """Honest Bob: checks commitment consistency, then the GHZ relation."""

    def __init__(self):
        self.c: int | None = None
        self.queried: tuple[int, int, int, int] | None = None

    def receive(self, msg: CommitMessage) -> None:
        self.c = msg.c

    def choose_b(self, boxes: _ReceiverBoxes, rng) -> int:
        return 0 if rng.random() < 0.5 else 1

    def verify(self, msg: RevealMessage, boxes: _ReceiverBoxes, rng) -> Verdict:
        if self.c not in (msg.r_a, msg.r_a ^ msg.s_a):
            return Verdict.ABORT_COMMITMENT_MISMATCH
        pair = INPUT_PAIRS[msg.s_a][0 if rng.random() < 0.5 else 1]
        s_b, s_c = pair
        r_b, r_c = boxes.query(s_b, s_c)
        self.queried = (s_b, s_c, r_b, r_c)
        if not ghz_relation_holds((msg.s_a, s_b, s_c), (msg.r_a, r_b, r_c)):
            return Verdict.ABORT_GHZ_VIOLATION
        return Verdict.ACCEPT


def run_bc(alice, bob, boxes: BehaviorTable, bit: int, rng=None) -> BCTranscript:
    """One commit/reveal execution; `bit` is the committed (or target) value."""
    if bit not in (0, 1):
        raise ContractError(f"bit must be 0 or 1, got {bit!r}")
    gen = as_generator(rng)
    session = _Session(boxes, gen)
    commit_msg = alice.commit(bit, _CommitterBox(session), gen)
    bob.receive(commit_msg)
    reveal_msg = alice.reveal(None, gen)
    verdict = bob.verify(reveal_msg, _ReceiverBoxes(session), gen)
    queried = bob.queried if bob.queried is not None else (None, None, None, None)
    return BCTranscript(
        committed_bit=bit,
        a=getattr(alice, "mask", None),
        c=commit_msg.c,
        s_a=reveal_msg.s_a,
        r_a=reveal_msg.r_a,
        s_b=queried[0],
        s_c=queried[1],
        r_b=queried[2],
        r_c=queried[3],
        verdict=verdict,
    )


def run_coinflip(committer, receiver, boxes: BehaviorTable, rng=None) -> CoinResult:
    """Commit to a bit, receive b, reveal; outcome is revealed-bit XOR b."""
    gen = as_generator(rng)
    session = _Session(boxes, gen)
    bit = committer.pick_bit(gen)
    commit_msg = committer.commit(bit, _CommitterBox(session), gen)
    receiver.receive(commit_msg)
    receiver_boxes = _ReceiverBoxes(session)
    b = receiver.choose_b(receiver_boxes, gen)
    reveal_msg = committer.reveal(b, gen)
    verdict = receiver.verify(reveal_msg, receiver_boxes, gen)
    if verdict is not Verdict.ACCEPT:
        return CoinResult(None, verdict, aborted_by="receiver")
    return CoinResult(reveal_msg.s_a ^ b, verdict)


class HonestChainParty:
    """Honest participant in the iterated coin-flipping chain."""

    def make_committer(self, rep: int) -> HonestCommitter:
        return HonestCommitter()

    def make_receiver(self, rep: int) -> HonestReceiver:
        return HonestReceiver()

    def boxes_override(self, rep: int, committer_name: str) -> BehaviorTable | None:
        return None


def run_iterated_coinflip(n: int, alice, bob, boxes, rng=None) -> CoinResult:
    """Chain of n coin flips; repetition k's outcome picks repetition k+1's committer.

    Alice commits first; outcome 0 keeps Alice as committer, outcome 1 hands
    the role to Bob. Boxes are fresh per repetition: `boxes` is a table or a
    callable (rep index, committer name) -> table, overridable by either
    party (a dishonest party supplies the devices; Alice's override wins).
    Any abort ends the chain.
    """
    if n < 1:
        raise ContractError(f"need at least one repetition, got {n!r}")
    gen = as_generator(rng)
    committer_name = "alice"
    result = None
    for rep in range(n):
        if committer_name == "alice":
            committer, receiver = alice.make_committer(rep), bob.make_receiver(rep)
            receiver_name = "bob"
        else:
            committer, receiver = bob.make_committer(rep), alice.make_receiver(rep)
            receiver_name = "alice"
        table = alice.boxes_override(rep, committer_name)
        if table is None:
            table = bob.boxes_override(rep, committer_name)
        if table is None:
            table = boxes(rep, committer_name) if callable(boxes) else boxes
        result = run_coinflip(committer, receiver, table, gen)
        if result.is_aborted:
            return CoinResult(None, result.verdict, aborted_by=receiver_name)
        committer_name = "alice" if result.outcome == 0 else "bob"
    return result
