"""Seeded random streams.

Every noise draw goes through :func:`make_rng`, which wraps numpy's Philox
counter-based bit generator. Monte Carlo trials get their own stream via
:func:`substream_seed`, a hash of ``(seed, index)`` computed by
``numpy.random.SeedSequence``, so a trial's noise does not depend on which
worker ran it or in what order.

Gaussian variates come from ``Generator.standard_normal`` (ziggurat method,
exact up to floating point).
"""

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(check_seed(seed))))


def substream_seed(seed, index):
    """64-bit seed for substream ``index`` of ``seed``."""
    ss = np.random.SeedSequence([check_seed(seed), check_seed(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
