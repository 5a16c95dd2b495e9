"""Counter-based random streams.

Every draw is a pure function of ``(seed, stream, index)``: Philox keyed by
``(seed, stream)`` emits one 64-bit word per counter step, so slices of a path
can be regenerated independently with :func:`uniforms` and ``start``.
"""

from __future__ import annotations

import numpy as np

# a process sampled by harvest.sample_path uses ids ``stream`` and ``stream + 1``
HARVEST = 0
SYMBOL = 2
SLEEP = 3
PROCESSING = 4
NOISE = 6

_INV_2_53 = 1.0 / float(1 << 53)


def _raw(seed: int, stream: int, n: int, start: int) -> np.ndarray:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream], dtype=np.uint64)
    bitgen = np.random.Philox(key=key)
    # one Philox counter block yields four words
    block, offset = divmod(start, 4)
    if block:
        bitgen.advance(block)
    return bitgen.random_raw(n + offset)[offset:]


def uniforms(seed: int, stream: int, n: int, start: int = 0) -> np.ndarray:
    """Uniforms on the open interval (0, 1), one counter step per value."""
    words = _raw(seed, stream, n, start) >> np.uint64(11)
    return (words.astype(np.float64) + 0.5) * _INV_2_53


def normals(seed: int, stream: int, n: int, start: int = 0) -> np.ndarray:
    """Standard normals by Box-Muller; value ``k`` uses counters ``2k`` and ``2k+1``."""
    u = uniforms(seed, stream, 2 * n, 2 * start)
    return np.sqrt(-2.0 * np.log(u[0::2])) * np.cos(2.0 * np.pi * u[1::2])
