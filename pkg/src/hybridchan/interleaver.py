"""Keyed whole-frame bit interleaving.

The permutation for a key is a Fisher-Yates shuffle of the index set drawn
from the same Philox stream family as the simulator, so the mapping is a
pure, reproducible function of (length, key).  Each frame gets its own key
derived from a base key and the frame sequence number; one shared
permutation would also whiten position-locked noise, but distinct keys are
the conservative choice and cost nothing.

Whitening can be applied after the fact: for noise that depends on bit
position rather than bit value, permuting the observed error vector is
exactly what a transmit-side interleave plus receive-side deinterleave
would have produced.  whiten_error_vector does that bookkeeping.
"""

from __future__ import annotations

import numpy as np

from . import rng


def _permutation(n: int, key: int) -> np.ndarray:
    return rng.stream(key, rng.ROLE_PERMUTATION).permutation(n)


def interleave(payload: np.ndarray, key: int) -> np.ndarray:
    """Permute a bit vector with the keyed permutation of its index set."""
    payload = np.asarray(payload)
    if payload.size == 0:
        raise ValueError("payload must be non-empty")
    return payload[_permutation(payload.size, key)]


def deinterleave(payload: np.ndarray, key: int) -> np.ndarray:
    """Invert interleave for the same key."""
    payload = np.asarray(payload)
    if payload.size == 0:
        raise ValueError("payload must be non-empty")
    perm = _permutation(payload.size, key)
    out = np.empty_like(payload)
    out[perm] = payload
    return out


def frame_key(base_key: int, seq: int) -> int:
    """Per-frame permutation key: splitmix64 mix of base key and frame seq."""
    return rng.splitmix64((base_key ^ seq) & ((1 << 64) - 1))


def whiten_error_vector(ev: np.ndarray, base_key: int, seq: int) -> np.ndarray:
    """Error vector as it would appear had the frame been interleaved."""
    return deinterleave(ev, frame_key(base_key, seq))
