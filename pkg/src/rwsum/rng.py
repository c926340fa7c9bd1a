"""Deterministic random streams.

Every replication block gets its own generator derived from the user seed
through ``SeedSequence(seed, spawn_key=(block, purpose))``.  Blocks have a
fixed size, so the numbers a given replication sees do not depend on how the
blocks are distributed over threads.
"""
import numpy as np

BLOCK = 65536

# purposes; separate streams keep increments, weights and stopping times
# on common random numbers when one of them changes
INCREMENTS = 0
WEIGHTS = 1
TAU = 2

_TINY = 0.5 * 2.0 ** -53


def block_rng(seed, block, purpose=INCREMENTS):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block), int(purpose)))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def open_uniform(rng, size=None):
    """Uniforms on the open interval (0, 1)."""
    u = rng.random(size)
    if np.ndim(u) == 0:
        return max(float(u), _TINY)
    np.maximum(u, _TINY, out=u)
    return u


def block_plan(N, block=BLOCK):
    """List of (block_index, rows) covering N replications."""
    N = int(N)
    nb = -(-N // block)
    return [(b, min(block, N - b * block)) for b in range(nb)]
