"""Deterministic derivation of per-realization RNG substreams.

Contract (version 1): the seed for realization ``l`` of an operation is
the first 8 bytes (big-endian) of::

    SHA-256("dualbandsim.v1|<purpose>|<base_seed>|<l>|<repr(k_mm_db)>")

``purpose`` separates independent phases ("sweep", "weight-table") so
weight selection never reuses the randomness it is later evaluated on.
The SNR is deliberately absent: realizations at the same (purpose,
seed, l, K) share channel, pilot, and unit-variance noise draws across
SNR points, which keeps SNR ladders paired.  Keying on grid values
rather than positions means adding grid points never perturbs existing
ones.
"""

from __future__ import annotations

import hashlib

import numpy as np

_SCHEME = "dualbandsim.v1"


def realization_seed(purpose: str, base_seed: int, realization_index: int,
                     k_mm_db: float) -> int:
    """64-bit substream seed for one Monte Carlo realization."""
    message = f"{_SCHEME}|{purpose}|{base_seed}|{realization_index}|{float(k_mm_db)!r}"
    digest = hashlib.sha256(message.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def realization_rng(purpose: str, base_seed: int, realization_index: int,
                    k_mm_db: float) -> np.random.Generator:
    return np.random.default_rng(
        realization_seed(purpose, base_seed, realization_index, k_mm_db))
