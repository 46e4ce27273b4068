"""Deterministic random streams for instance generation.

The bit source is the Philox4x64-10 counter generator keyed by the instance
seed.  Uniforms take the top 53 bits of each 64-bit word; normal variates use
the Box-Muller transform on consecutive uniform pairs (no ziggurat, no
rejection), so the stream layout is reproducible from the seed alone in any
language with a Philox implementation.  The CSI1 version field pins this
layout: version 1 means "philox4x64-10, top-53-bit uniforms, Box-Muller".
"""

from __future__ import annotations

import numpy as np

_U53 = 2.0 ** -53


class Stream:
    """Sequential sampler over the keyed counter stream.

    ``substream`` selects an independent stream for the same seed (used to
    retry degenerate draws without disturbing the primary stream).
    """

    def __init__(self, seed: int, substream: int = 0):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= substream < 2 ** 64:
            raise ValueError("substream must be a 64-bit unsigned integer")
        self._bg = np.random.Philox(key=(substream << 64) | seed)

    def raw(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit words."""
        out = self._bg.random_raw(count)
        return np.atleast_1d(np.asarray(out, dtype=np.uint64))

    def uniforms(self, count: int) -> np.ndarray:
        """IID uniforms on [0, 1)."""
        return (self.raw(count) >> np.uint64(11)) * _U53

    def uniforms_open(self, count: int) -> np.ndarray:
        """IID uniforms on (0, 1] (safe under log)."""
        return ((self.raw(count) >> np.uint64(11)) + np.uint64(1)) * _U53

    def normals(self, count: int) -> np.ndarray:
        """IID standard normals via Box-Muller; consumes 2*ceil(count/2) words."""
        pairs = (count + 1) // 2
        u1 = self.uniforms_open(pairs)
        u2 = self.uniforms(pairs)
        rad = np.sqrt(-2.0 * np.log(u1))
        ang = (2.0 * np.pi) * u2
        z = np.empty(2 * pairs)
        z[0::2] = rad * np.cos(ang)
        z[1::2] = rad * np.sin(ang)
        return z[:count]

    def below(self, bound: int) -> int:
        """One integer in [0, bound) by reduction modulo ``bound``.

        The modulo bias is below 2**-40 for any bound that fits a desk
        problem, and the rule is trivially portable.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        return int(self.raw(1)[0] % np.uint64(bound))

    def signs(self, count: int) -> np.ndarray:
        """IID +-1.0 values from the low bit of each word."""
        return np.where(self.raw(count) & np.uint64(1), 1.0, -1.0)

    def choose(self, n: int, s: int) -> np.ndarray:
        """``s`` distinct indices from [0, n), uniform, sorted ascending.

        Partial Fisher-Yates over an explicit pool; consumes exactly ``s``
        words.
        """
        if not 0 <= s <= n:
            raise ValueError("need 0 <= s <= n")
        pool = np.arange(n, dtype=np.intp)
        for i in range(s):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.sort(pool[:s])
