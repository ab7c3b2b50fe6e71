"""Prime infrastructure: sieving, pi(x), p_n, primorials and primality.

All counting is exact (sieve based). Primality below 2**64 is deterministic
Miller-Rabin; above it a Baillie-PSW test is used and reported as
``"probable"``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DETERMINISTIC_LIMIT = 2**64

# Miller-Rabin with these bases is exact for every n < 3.3e24 > 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SEGMENT = 1 << 21


def _odd_sieve(limit: int) -> np.ndarray:
    """Sorted int64 array of the primes <= limit."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index i stands for 2*i + 1
    flags = np.ones(limit // 2 + 1, dtype=bool)
    flags[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if flags[i]:
            p = 2 * i + 1
            flags[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(flags) + 1
    odd = odd[odd <= limit]
    return np.concatenate(([2], odd)).astype(np.int64)


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __post_init__(self):
        self.primes.flags.writeable = False

    def __len__(self):
        return len(self.primes)

    def __contains__(self, n):
        i = np.searchsorted(self.primes, n)
        return i < len(self.primes) and self.primes[i] == n

    def tolist(self) -> list[int]:
        return [int(p) for p in self.primes]


def sieve(limit: int) -> PrimeTable:
    """All primes <= ``limit``."""
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    return PrimeTable(int(limit), _odd_sieve(int(limit)))


_cache_lock = threading.Lock()
_cache = sieve(1 << 16)


def _table(limit: int) -> PrimeTable:
    global _cache
    table = _cache
    if table.limit >= limit:
        return table
    with _cache_lock:
        if _cache.limit < limit:
            _cache = sieve(max(limit, 2 * _cache.limit))
        return _cache


def primes_up_to(x: int) -> list[int]:
    if x < 2:
        return []
    table = _table(x)
    return table.primes[: np.searchsorted(table.primes, x, side="right")].tolist()


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes q with lo <= q <= hi."""
    if hi < max(lo, 2):
        return []
    table = _table(hi)
    a = np.searchsorted(table.primes, lo, side="left")
    b = np.searchsorted(table.primes, hi, side="right")
    return table.primes[a:b].tolist()


def _segmented_count(x: int) -> int:
    base = _table(math.isqrt(x) + 1).primes
    base = base[base <= math.isqrt(x)]
    count = 0
    lo = 0
    while lo <= x:
        hi = min(lo + _SEGMENT, x + 1)
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[: min(2, hi)] = False
        for p in base:
            p = int(p)
            start = max(p * p, (lo + p - 1) // p * p)
            if start >= hi:
                continue
            seg[start - lo :: p] = False
        count += int(seg.sum())
        lo = hi
    return count


_DIRECT_LIMIT = 1 << 24


def prime_count(x: int) -> int:
    """pi(x), the number of primes <= x."""
    if x < 2:
        return 0
    if x <= max(_DIRECT_LIMIT, _cache.limit):
        table = _table(x)
        return int(np.searchsorted(table.primes, x, side="right"))
    return _segmented_count(x)


def nth_prime(n: int) -> int:
    """p_n with p_1 = 2."""
    if n < 1:
        raise ValueError(f"prime index must be >= 1, got {n}")
    if n < 6:
        return (2, 3, 5, 7, 11)[n - 1]
    ln = math.log(n)
    bound = int(n * (ln + math.log(ln))) + 3
    return int(_table(bound).primes[n - 1])


def next_prime(p: int) -> int:
    """Smallest prime > p."""
    n = p + 1
    while True:
        if n <= _cache.limit:
            table = _cache
            i = np.searchsorted(table.primes, n, side="left")
            if i < len(table.primes):
                return int(table.primes[i])
            n = table.limit + 1
        if is_prime(n):
            return n
        n += 1


def prev_prime(p: int) -> int:
    """Largest prime < p."""
    if p <= 2:
        raise ValueError(f"no prime below {p}")
    table = _table(p)
    return int(table.primes[np.searchsorted(table.primes, p, side="left") - 1])


def primorial(p: int) -> int:
    """p# = product of all primes <= p, with primorial(1) == 1."""
    return math.prod(primes_up_to(p))


class Primality(NamedTuple):
    is_prime: bool
    certainty: str  # "deterministic" or "probable"


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge's parameter choice (method A)."""
    if math.isqrt(n) ** 2 == n:
        return False
    d = 5
    while True:
        j = _jacobi(d, n)
        if j == -1:
            break
        if j == 0 and abs(d) != n:
            return False
        d = -d - 2 if d > 0 else -d + 2
    p, q = 1, (1 - d) // 4

    k = n + 1
    s = (k & -k).bit_length() - 1
    k >>= s

    def half(x):
        return (x + n if x & 1 else x) // 2 % n

    # binary ladder for U_k, V_k, Q^k
    u, v, qk = 0, 2, 1
    for bit in bin(k)[2:]:
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = half(p * u + v), half(d * u + p * v)
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if v == 0:
            return True
    return False


_TRIAL = _odd_sieve(1000).tolist()


def primality(n: int) -> Primality:
    """Primality of ``n`` together with how certain the verdict is.

    Composite verdicts are always certain. Prime verdicts are exact below
    ``DETERMINISTIC_LIMIT`` and Baillie-PSW probable primes above it (no
    counterexample is known).
    """
    if n < 2:
        return Primality(False, "deterministic")
    for p in _TRIAL:
        if n % p == 0:
            return Primality(n == p, "deterministic")
        if p * p > n:
            return Primality(True, "deterministic")
    if n < DETERMINISTIC_LIMIT:
        return Primality(all(_strong_probable_prime(n, a) for a in _MR_BASES), "deterministic")
    if not _strong_probable_prime(n, 2):
        return Primality(False, "deterministic")
    if not _strong_lucas_probable_prime(n):
        return Primality(False, "deterministic")
    return Primality(True, "probable")


def is_prime(n: int) -> bool:
    return primality(n).is_prime


def prime_gap_constellation(J: int):
    """The first J gaps of the primes counted from 0: [2, 1, 2, 2, 4, ...]."""
    from nonconvex.constellation import from_offsets

    if J < 1:
        raise ValueError(f"length must be >= 1, got {J}")
    return from_offsets([0] + primes_up_to(nth_prime(J)))
