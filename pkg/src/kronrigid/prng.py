"""Reproducible 64-bit PRNG (splitmix64) for seeded randomized runs.

The CLI and tests need byte-stable output across platforms and Python
versions, so we pin the generator instead of relying on random.Random
internals.
"""

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def randint(self, a: int, b: int) -> int:
        """Uniform in [a, b] inclusive."""
        return a + self.randrange(b - a + 1)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def field_element(self, ctx):
        """Uniform raw residue; small random fraction in rational mode."""
        if ctx.is_prime_field:
            return self.randrange(ctx.modulus)
        from fractions import Fraction

        return Fraction(self.randint(-8, 8), self.randint(1, 8))

    def nonzero_field_element(self, ctx):
        if not ctx.is_prime_field:
            from fractions import Fraction

            return Fraction(self.randint(1, 8), self.randint(1, 8))
        return 1 + self.randrange(ctx.modulus - 1)
