"""Deterministic random streams for simulation and interleaving.

All randomness in the package flows through Philox4x64 (a counter-based
generator with a published algorithm, exposed through numpy).  Streams are
keyed by a 128-bit value: the high 64 bits hold the user seed XORed with a
role constant, the low 64 bits hold the frame index.  Two consumers of
randomness therefore never share a stream, and any frame's stream can be
reconstructed without generating its predecessors.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Role constants separating the independent stream families.
ROLE_TX_PAYLOAD = 0x9D8F_3A17_5B2C_E601
ROLE_CHANNEL = 0x5EC4_A9B3_0D7F_1182
ROLE_PERIODIC = 0xC1A3_52E8_96BD_4F03
ROLE_PERMUTATION = 0x7F0E_6D29_C835_B1A4


def stream(seed: int, role: int, index: int = 0) -> np.random.Generator:
    """Return the Philox stream for (seed, role, index)."""
    key = (((seed ^ role) & _MASK64) << 64) | (index & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mix function (public-domain constant set)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)
