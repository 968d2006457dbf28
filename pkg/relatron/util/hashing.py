"""Keyed random streams and hashes.

Streams are Philox counter-based generators keyed on integer tuples, so any unit
of work can recompute its own draws without shared RNG state.
"""

import hashlib

import numpy as np

__all__ = (
    "MERSENNE_PRIME",
    "keyed_generator",
    "keyed_words",
    "keyed_signs",
    "PolyHash",
    "stable_token_hash",
)

MERSENNE_PRIME = (1 << 61) - 1

_WORD = (1 << 64) - 1


def _philox(keys) -> np.random.Philox:
    return np.random.Philox(np.random.SeedSequence([int(key) & _WORD for key in keys]))


def keyed_generator(*keys: int) -> np.random.Generator:
    """A Philox-backed generator fixed by `keys`; negative keys wrap to 64 bits."""
    return np.random.Generator(_philox(keys))


def keyed_words(n: int, *keys: int) -> np.ndarray:
    """The first `n` raw 64-bit outputs of the stream keyed on `keys`.

    Word i depends only on the keys and its counter i, not on `n`.
    """
    return _philox(keys).random_raw(n)


def keyed_signs(n: int, *keys: int) -> np.ndarray:
    """±1 from the top bit of each of the first `n` keyed words."""
    return (keyed_words(n, *keys) >> np.uint64(63)).astype(np.float64) * 2.0 - 1.0


class PolyHash:
    """Pairwise-independent polynomial hash modulo the Mersenne prime 2^61 - 1.

    `k=2` gives a linear hash (pairwise independence). Coefficients are the
    first `k` keyed words reduced modulo the prime, so a family member is
    fixed by its keys.
    """

    def __init__(self, *keys: int, k: int = 2):
        coeffs = [int(word) % MERSENNE_PRIME for word in keyed_words(k, *keys)]
        coeffs[0] = coeffs[0] or 1
        self.coeffs = coeffs
        self.k = k

    def raw(self, values) -> np.ndarray:
        out = []
        for x in np.asarray(values, dtype=np.int64).ravel().tolist():
            acc = self.coeffs[0]
            for c in self.coeffs[1:]:
                acc = (acc * x + c) % MERSENNE_PRIME
            out.append(acc)
        return np.asarray(out, dtype=np.int64).reshape(np.shape(values))

    def bins(self, values, width: int) -> np.ndarray:
        return self.raw(values) % width

    def signs(self, values) -> np.ndarray:
        return ((self.raw(values) & 1) * 2 - 1).astype(np.float64)


def stable_token_hash(text: str) -> int:
    """Process-independent 63-bit hash of a string (Python's hash() is salted)."""
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "little") >> 1
