"""Counter-based random numbers (Philox4x32-10).

A draw is a pure function of ``(seed, path_index, draw_index)``, so a path's
stream never depends on how many other paths are generated, in what order,
or by how many workers.
"""

from __future__ import annotations

import numpy as np

from .gaussian import norm_ppf

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)
ROUNDS = 10


def philox4x32(counter, key, rounds: int = ROUNDS):
    """Philox4x32 block function.

    ``counter`` is a sequence of four uint32 arrays (broadcastable), ``key`` a
    pair of uint32 scalars or arrays. Returns four uint32 arrays (as uint64).
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & _MASK for c in counter)
    k0, k1 = (np.asarray(k, dtype=np.uint64) & _MASK for k in key)
    for i in range(rounds):
        if i:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _SHIFT) ^ c1 ^ k0,
            p1 & _MASK,
            (p0 >> _SHIFT) ^ c3 ^ k1,
            p0 & _MASK,
        )
    return c0, c1, c2, c3


def _split_seed(seed: int) -> tuple[int, int]:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def uniforms(seed: int, path_indices, n_draws: int) -> np.ndarray:
    """Open-interval uniforms of shape ``(len(path_indices), n_draws)``.

    Row ``i`` depends only on ``(seed, path_indices[i])``; column ``j`` is the
    ``j``-th draw of that path's stream. Each Philox block yields two doubles
    with 53 random bits each.
    """
    paths = np.atleast_1d(np.asarray(path_indices, dtype=np.uint64))
    n_blocks = (n_draws + 1) // 2
    key = _split_seed(seed)
    blk = np.arange(n_blocks, dtype=np.uint64)[None, :]
    pid = paths[:, None]
    x0, x1, x2, x3 = philox4x32(
        (blk & _MASK, blk >> _SHIFT, pid & _MASK, pid >> _SHIFT), key
    )
    hi = np.stack([x0, x2], axis=-1).reshape(len(paths), -1)[:, :n_draws]
    lo = np.stack([x1, x3], axis=-1).reshape(len(paths), -1)[:, :n_draws]
    k = (hi >> np.uint64(5)) * np.uint64(1 << 26) + (lo >> np.uint64(6))
    return (k.astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, path_indices, n_draws: int) -> np.ndarray:
    """Standard normals by inverse CDF of :func:`uniforms`."""
    return norm_ppf(uniforms(seed, path_indices, n_draws))
