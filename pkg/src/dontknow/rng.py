"""Portable seeded random source.

The generator is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit state
advanced by the golden-ratio increment and scrambled by the fmix-style
finalizer below. Every draw used by the engine is defined in terms of
``next_u64`` so other implementations can reproduce them exactly:

* ``random()``      -> (next_u64() >> 11) * 2**-53
* ``randbelow(n)``  -> (next_u64() * n) >> 64
* ``choice(seq)``   -> seq[randbelow(len(seq))]
* ``shuffle(seq)``  -> Fisher-Yates from the last position down to 1,
                       swapping i with randbelow(i + 1)
"""

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed, *keys):
    """Fold integer ``keys`` into ``seed``; used for per-record and per-request streams."""
    state = seed & MASK64
    for key in keys:
        state = mix64(state ^ mix64((key + GAMMA) & MASK64))
    return state


class SplitMix64:
    def __init__(self, seed=0):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def random(self):
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n):
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        return (self.next_u64() * n) >> 64

    def choice(self, seq):
        if not seq:
            raise IndexError("cannot choose from an empty sequence")
        return seq[self.randbelow(len(seq))]

    def shuffle(self, seq):
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
