"""SplitMix64 stream used by all finite-field sampling.

Every stochastic finite-field operation takes an explicit integer seed and
derives its draws from a SplitMix64 stream (Steele, Lea & Flood's mixer).
The compiled kernels re-implement the same recurrence bit for bit, so the
stream of field elements is identical whichever implementation is active.

Per-trial substreams are derived with ``substream_state(seed, index)``; the
aggregate result of a Monte Carlo run therefore does not depend on the order
in which trials execute.

Nonzero field elements are drawn as ``1 + (u64 % (q - 1))``.  The modulo
bias is at most (q-1)/2**64 and q is capped at 2**16, so it is far below
anything a statistical test at realistic sample sizes can see.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 output mixer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def next_u64(state: int) -> tuple[int, int]:
    """Advance the stream once; returns (value, new_state)."""
    state = (state + GOLDEN) & MASK64
    return mix64(state), state


def substream_state(seed: int, index: int) -> int:
    """Initial stream state for substream `index` of master seed `seed`."""
    return mix64((mix64(seed & MASK64) + GOLDEN * ((index + 1) & MASK64)) & MASK64)


def uniform_nonzero(q: int, state: int) -> tuple[int, int]:
    """One draw uniform on {1, ..., q-1}; returns (value, new_state)."""
    value, state = next_u64(state)
    return 1 + value % (q - 1), state
