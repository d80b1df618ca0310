"""Counter-keyed random substreams.

Every random draw in the toolkit comes from a generator keyed by the master
seed plus a tuple of integers (hypothesis, noise kind, trial block, ...).
Streams for distinct keys are statistically independent and the mapping is
order-free, so work can be split across threads without changing results.
"""

from __future__ import annotations

import numpy as np

# noise kinds
MEASUREMENT = 0
QUANTIZATION = 1
SCENARIO = 2

# trials are drawn in fixed-size blocks; each block owns one substream
BLOCK_SIZE = 4096


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return a Philox generator for ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def trial_blocks(n_trials: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int, int]]:
    """Split ``range(n_trials)`` into ``(block_index, start, stop)`` triples."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    n_blocks = -(-n_trials // block_size)
    return [(b, b * block_size, min(n_trials, (b + 1) * block_size)) for b in range(n_blocks)]
