"""Reproducible pseudorandomness: SplitMix64 with per-worker streams.

All randomized experiments in this package draw from SplitMix64 (Steele,
Lea, Flood 2014), a 64-bit generator with a single additive state update:

    state_{i+1} = (state_i + 0x9E3779B97F4A7C15) mod 2^64
    output      = mix(state_{i+1})

where mix is the murmur-style finalizer with constants 0xBF58476D1CE4E5B9
and 0x94D049BB133111EB.  The algorithm is fixed here so that experiments
are bit-reproducible across machines and across reimplementations; the
compiled scan kernels reproduce this sequence word for word.

Worker streams: a master SplitMix64 seeded with the experiment seed emits
one 64-bit value per worker, which becomes that worker's initial state.
Worker w always receives the (w+1)-st master output, so stream contents do
not depend on how many workers run.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def mix64(z):
    """SplitMix64 output finalizer."""
    z &= MASK64
    z ^= z >> 30
    z = (z * MIX1) & MASK64
    z ^= z >> 27
    z = (z * MIX2) & MASK64
    z ^= z >> 31
    return z


class SplitMix64:
    """Sequential SplitMix64 generator over python ints."""

    def __init__(self, seed):
        self.state = seed & MASK64

    def next64(self):
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_bits(self, width):
        """Uniform integer with `width` random bits (0 <= value < 2**width)."""
        words = (width + 63) // 64
        value = 0
        for i in range(words):
            value |= self.next64() << (64 * i)
        return value & ((1 << width) - 1)

    def next_below(self, bound):
        """Uniform integer in [0, bound) by rejection on the top bits."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        width = max(1, (bound - 1).bit_length())
        while True:
            v = self.next_bits(width)
            if v < bound:
                return v


def worker_seeds(seed, workers):
    """Initial states for `workers` independent streams (see module doc)."""
    master = SplitMix64(seed)
    return [master.next64() for _ in range(workers)]
