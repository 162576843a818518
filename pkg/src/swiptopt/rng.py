"""Deterministic named random streams.

All randomness in the package flows from a single root seed. Independent
streams are derived from (root_seed, name path), so parallel work units
(optimizer restarts, oracle batches) draw from reproducible, order-independent
generators.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _path_words(path: tuple) -> list[int]:
    words = []
    for part in path:
        if isinstance(part, (int, np.integer)):
            words.append(int(part) & 0xFFFFFFFF)
        else:
            digest = hashlib.sha256(str(part).encode("utf-8")).digest()
            words.append(int.from_bytes(digest[:4], "little"))
    return words


def stream(root_seed: int, *path) -> np.random.Generator:
    """Generator for the stream named by `path` under `root_seed`.

    Example: stream(seed, "wpt", "restart", 17).
    """
    entropy = [int(root_seed) & 0xFFFFFFFFFFFFFFFF] + _path_words(tuple(path))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
