"""Code configuration and the GF(2) polar transform.

Bit blocks are plain ``numpy.uint8`` arrays with values in {0, 1}.
Information/frozen index sets are 1-based in every public contract;
0-based views used internally never leak out.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "CodeConfig",
    "as_bits",
    "embed_message",
    "generator_matrix",
    "polar_transform",
    "row_weight",
]


def as_bits(x, length=None) -> np.ndarray:
    """Validate and convert ``x`` to a uint8 bit array, optionally of fixed length."""
    bits = np.asarray(x, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError(f"bit block must be 1-D, got shape {bits.shape}")
    if np.any(bits > 1):
        raise ValueError("bit block entries must be 0 or 1")
    if length is not None and bits.size != length:
        raise ValueError(f"bit block length {bits.size} != expected {length}")
    return bits


def _check_power_of_two(N: int) -> int:
    if N < 1 or (N & (N - 1)) != 0:
        raise ValueError(f"length must be a power of two, got {N}")
    return int(N).bit_length() - 1


@dataclass(frozen=True)
class CodeConfig:
    """An (N, K) polar code: length, dimension and information set.

    ``A`` is the ascending 1-based tuple of information indices, ``F`` its
    complement in 1..N.
    """

    n: int
    N: int
    K: int
    A: tuple
    F: tuple

    @classmethod
    def from_info_set(cls, N, A) -> "CodeConfig":
        n = _check_power_of_two(N)
        A = tuple(sorted(int(a) for a in A))
        if len(set(A)) != len(A):
            raise ValueError("information set contains duplicate indices")
        if A and (A[0] < 1 or A[-1] > N):
            raise ValueError(f"information indices must lie in 1..{N}")
        F = tuple(i for i in range(1, N + 1) if i not in set(A))
        return cls(n=n, N=N, K=len(A), A=A, F=F)

    def a(self, k: int) -> int:
        """The k-th smallest information index (1-based k)."""
        if not 1 <= k <= self.K:
            raise IndexError(f"message index {k} out of 1..{self.K}")
        return self.A[k - 1]

    @cached_property
    def frozen_mask(self) -> np.ndarray:
        """uint8[N], 1 at frozen positions (0-based array over 1..N)."""
        mask = np.ones(self.N, dtype=np.uint8)
        idx = np.asarray(self.A, dtype=np.int64) - 1
        mask[idx] = 0
        mask.setflags(write=False)
        return mask

    @cached_property
    def info_idx0(self) -> np.ndarray:
        """int64[K], 0-based information positions in ascending order."""
        idx = np.asarray(self.A, dtype=np.int64) - 1
        idx.setflags(write=False)
        return idx

    def to_json_dict(self) -> dict:
        return {"N": self.N, "K": self.K, "A": list(self.A)}

    @classmethod
    def from_json_dict(cls, d) -> "CodeConfig":
        return cls.from_info_set(int(d["N"]), d["A"])


def polar_transform(u, n=None) -> np.ndarray:
    """x = u G over GF(2), G = F^{(x)n}, via the in-place butterfly recursion.

    Involutive (G G = I), so the same routine inverts itself.
    """
    u = as_bits(u)
    if n is None:
        n = _check_power_of_two(u.size)
    elif u.size != (1 << n):
        raise ValueError(f"length {u.size} != 2^{n}")
    x = u.copy()
    h = x.size >> 1
    while h >= 1:
        blocks = x.reshape(-1, 2 * h)
        blocks[:, :h] ^= blocks[:, h:]
        h >>= 1
    return x


def row_weight(i: int, n: int) -> int:
    """Hamming weight of row i (1-based) of F^{(x)n}: 2**popcount(i-1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    N = 1 << n
    if not 1 <= i <= N:
        raise ValueError(f"row index {i} out of 1..{N}")
    return 1 << int(bin(i - 1).count("1"))


def generator_matrix(n: int) -> np.ndarray:
    """Materialized F^{(x)n}, for test oracles only (n <= 10)."""
    if not 0 <= n <= 10:
        raise ValueError("generator_matrix is a test oracle, limited to n <= 10")
    G = np.array([[1]], dtype=np.uint8)
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    for _ in range(n):
        G = np.kron(F, G)
    return G


def embed_message(v, cfg: CodeConfig) -> np.ndarray:
    """Place message bits v on the information set; frozen positions are 0."""
    v = as_bits(v, cfg.K)
    u = np.zeros(cfg.N, dtype=np.uint8)
    u[cfg.info_idx0] = v
    return u
