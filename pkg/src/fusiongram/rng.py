"""Portable pseudo-random stream: xoshiro256** seeded through splitmix64.

Update equations (all arithmetic mod 2^64)::

    splitmix64:  x += 0x9E3779B97F4A7C15
                 z = x
                 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                 return z ^ (z >> 31)

    state s0..s3 = four successive splitmix64 outputs from the seed

    xoshiro256**: result = rotl(s1 * 5, 7) * 9
                  t = s1 << 17
                  s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
                  s2 ^= t;  s3 = rotl(s3, 45)

A uniform double is ``(next >> 11) * 2^-53`` in [0, 1). Gaussian variates use
Box-Muller on two consecutive uniforms ``u1, u2``: with ``r = sqrt(-2 ln(1 - u1))``
the stream yields ``r cos(2 pi u2)`` and then ``r sin(2 pi u2)``. A complex
normal draws its real part first, then its imaginary part; matrices are
filled row-major.
"""

import math

import numpy as np

MASK = (1 << 64) - 1


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


def splitmix64(state):
    """Return ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


class Xoshiro256:
    def __init__(self, seed):
        if not 0 <= int(seed) <= MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        sm = int(seed)
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s
        self._spare = None

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK, 7) * 9) & MASK
        t = (s1 << 17) & MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self, a=0.0, b=1.0):
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return a + (b - a) * u

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def complex_normal(self):
        re = self.normal()
        return complex(re, self.normal())

    def complex_matrix(self, rows, cols):
        data = [self.complex_normal() for _ in range(rows * cols)]
        return np.array(data, dtype=np.complex128).reshape(rows, cols)

    def uniform_array(self, size, a=0.0, b=1.0):
        return np.array([self.uniform(a, b) for _ in range(size)])
