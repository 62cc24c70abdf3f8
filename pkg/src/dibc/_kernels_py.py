"""Pure-Python Monte Carlo trial kernels.

Reference implementation of the batched trial loops; `dibc._kernels` is the
compiled twin. Both consume pre-drawn uniforms `u` (one row per trial) in a
fixed order so that, given the same inputs, the two backends and the
per-trial protocol engine produce identical trial-by-trial results:

* honest bit commitment  (4 draws): box output r_A | mask bit | input-pair
  choice | joint (r_B, r_C) sample
* committer cheat        (3 draws): her measurement outcome | pair | joint
* receiver gain attack   (4 draws): s_A | r_A | mask | ancilla outcomes
* honest coin flip       (6 draws): committed bit | r_A | mask | receiver's
  b | pair | joint

Bits are decoded as 0 iff u < threshold; discrete samples use the inverse
CDF with sequentially accumulated, pre-normalized probabilities.

Verdict codes: 0 accept, 1 commitment mismatch, 2 GHZ violation; coin-flip
codes: 0/1 outcome, 2 mismatch abort, 3 GHZ abort.
"""

from __future__ import annotations

import numpy as np

name = "python"

_PAIRS = ((((0, 1)), ((1, 0))), (((0, 0)), ((1, 1))))  # [s_A][choice] -> (s_B, s_C)


def _marginal(table: list[list[float]], s_a: int, r_a: int) -> float:
    row = table[4 * s_a]
    base = 4 * r_a
    return row[base] + row[base + 1] + row[base + 2] + row[base + 3]


def _sample_pair_outputs(row: list[float], r_first: int, u: float) -> int:
    """Inverse-CDF sample of the two remaining outputs given the first box's output."""
    base = 4 * r_first
    norm = row[base] + row[base + 1] + row[base + 2] + row[base + 3]
    acc = 0.0
    k = 3
    for j in range(4):
        acc += row[base + j] / norm
        if u < acc:
            k = j
            break
    return k


def bc_trials(table: np.ndarray, bits: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Honest bit-commitment trials on a 3-party behavior table."""
    t = table.tolist()
    out = np.empty(len(bits), dtype=np.uint8)
    for i in range(len(bits)):
        s_a = int(bits[i])
        r_a = 0 if u[i, 0] < _marginal(t, s_a, 0) else 1
        mask = 0 if u[i, 1] < 0.5 else 1
        c = r_a ^ (s_a & mask)
        out[i] = _verify(t, s_a, r_a, s_a, r_a, c, u[i, 2], u[i, 3])
    return out


def _verify(table, claimed_s, claimed_r, actual_input, actual_outcome, c, u_pair, u_joint):
    """Bob's reveal-phase checks: commitment consistency, then the GHZ relation.

    The pair of inputs is chosen from the *claimed* s_A; the joint sample is
    conditioned on the committer box's *actual* input and outcome.
    """
    if c != claimed_r and c != (claimed_r ^ claimed_s):
        return 1
    s_b, s_c = _PAIRS[claimed_s][0 if u_pair < 0.5 else 1]
    row = table[4 * actual_input + 2 * s_b + s_c]
    k = _sample_pair_outputs(row, actual_outcome, u_joint)
    r_b, r_c = k >> 1, k & 1
    if (claimed_r ^ r_b ^ r_c) != ((claimed_s & s_b & s_c) ^ 1):
        return 2
    return 0


def alice_cheat_trials(
    table: np.ndarray,
    commit_c: np.ndarray,
    reveal_s: np.ndarray,
    reveal_r: np.ndarray,
    targets: np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    """Committer-cheat trials: success = Bob accepts and the revealed value is the target."""
    t = table.tolist()
    cc = commit_c.tolist()
    rs = reveal_s.tolist()
    rr = reveal_r.tolist()
    out = np.empty(len(targets), dtype=np.uint8)
    for i in range(len(targets)):
        tgt = int(targets[i])
        o = 0 if u[i, 0] < _marginal(t, 0, 0) else 1
        c = cc[o]
        s_a, r_a = rs[o][tgt], rr[o][tgt]
        verdict = _verify(t, s_a, r_a, 0, o, c, u[i, 1], u[i, 2])
        out[i] = 1 if (verdict == 0 and s_a == tgt) else 0
    return out


def gain_trials(
    table: np.ndarray,
    guess: np.ndarray,
    rmap0: np.ndarray,
    rmap1: np.ndarray,
    u: np.ndarray,
) -> np.ndarray:
    """Receiver gain-attack trials: success = the guess equals Alice's committed bit.

    The receiver's measurement branch m = c is selected through its boxes'
    inputs: both ancilla boxes are queried with input m.
    """
    t = table.tolist()
    g = guess.tolist()
    maps = (rmap0.tolist(), rmap1.tolist())
    n = u.shape[0]
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        s_a = 0 if u[i, 0] < 0.5 else 1
        r_a = 0 if u[i, 1] < _marginal(t, s_a, 0) else 1
        mask = 0 if u[i, 2] < 0.5 else 1
        c = r_a ^ (s_a & mask)
        row = t[4 * s_a + 3 * c]
        k = _sample_pair_outputs(row, r_a, u[i, 3])
        result = maps[c][k >> 1][k & 1]
        out[i] = 1 if g[c][result] == s_a else 0
    return out


def coinflip_trials(table: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Honest coin-flip trials; codes 0/1 outcome, 2 mismatch abort, 3 GHZ abort."""
    t = table.tolist()
    n = u.shape[0]
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        bit = 0 if u[i, 0] < 0.5 else 1
        r_a = 0 if u[i, 1] < _marginal(t, bit, 0) else 1
        mask = 0 if u[i, 2] < 0.5 else 1
        c = r_a ^ (bit & mask)
        b = 0 if u[i, 3] < 0.5 else 1
        verdict = _verify(t, bit, r_a, bit, r_a, c, u[i, 4], u[i, 5])
        out[i] = (bit ^ b) if verdict == 0 else verdict + 1
    return out
