"""Constellations (gap patterns) and their residue structure.

A constellation of length J is stored by its J+1 offsets ``0 = h_0 < ... < h_J``;
the gaps and the span ``|s| = h_J`` are derived from them.
"""

from __future__ import annotations

import hashlib
import threading
from collections import Counter
from typing import Iterable, Sequence

from nonconvex.primes import (
    is_prime,
    nth_prime,
    prime_count,
    primes_up_to,
    primorial,
)


class ConstellationError(ValueError):
    pass


class Constellation:
    """Immutable gap pattern with a lazily filled per-prime nu cache."""

    __slots__ = ("offsets", "_nu", "_lock")

    def __init__(self, offsets: Sequence[int]):
        offsets = tuple(int(h) for h in offsets)
        if len(offsets) < 2:
            raise ConstellationError("a constellation needs at least two offsets")
        if offsets[0] != 0:
            raise ConstellationError(f"offsets must start at 0, got {offsets[0]}")
        for i, (a, b) in enumerate(zip(offsets, offsets[1:]), 1):
            if b <= a:
                raise ConstellationError(f"offsets not strictly ascending at position {i}: {a}, {b}")
        self.offsets = offsets
        self._nu: dict[int, int] = {}
        self._lock = threading.Lock()

    @property
    def length(self) -> int:
        """J, the number of gaps."""
        return len(self.offsets) - 1

    @property
    def span(self) -> int:
        return self.offsets[-1]

    @property
    def gaps(self) -> tuple[int, ...]:
        h = self.offsets
        return tuple(b - a for a, b in zip(h, h[1:]))

    def nu(self, q: int) -> int:
        # idempotent fill: racing threads compute the same value
        v = self._nu.get(q)
        if v is None:
            if q > self.span:
                v = len(self.offsets)
            else:
                v = len({h % q for h in self.offsets})
            with self._lock:
                self._nu[q] = v
        return v

    def digest(self) -> str:
        text = ",".join(map(str, self.offsets))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, Constellation) and self.offsets == other.offsets

    def __hash__(self):
        return hash(self.offsets)

    def __len__(self):
        return self.length

    def __repr__(self):
        if self.length <= 8:
            return f"Constellation(gaps={list(self.gaps)})"
        return f"Constellation(J={self.length}, span={self.span})"


def from_offsets(offsets: Iterable[int]) -> Constellation:
    return Constellation(list(offsets))


def from_gaps(gaps: Iterable[int]) -> Constellation:
    offsets = [0]
    for g in gaps:
        if g < 1:
            raise ConstellationError(f"gaps must be positive, got {g}")
        offsets.append(offsets[-1] + g)
    return Constellation(offsets)


def _require_prime(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")


def nu(s: Constellation, q: int) -> int:
    """Number of distinct residues of the offsets mod q."""
    _require_prime(q)
    return s.nu(q)


def admissible_residues(s: Constellation, q: int) -> set[int]:
    """Residues r mod q with r + h != 0 (mod q) for every offset h."""
    _require_prime(q)
    covered = {(-h) % q for h in s.offsets}
    return set(range(q)) - covered


def is_admissible(s: Constellation) -> bool:
    # for q > J+1 at most J+1 < q residues can be covered
    return all(s.nu(q) < q for q in primes_up_to(s.length + 1))


def nonconvexity_score(s: Constellation) -> int:
    """J - pi(|s|); positive means an instance among primes breaks convexity."""
    return s.length - prime_count(s.span)


def legacy_score(s: Constellation) -> int:
    """The k - pi(w) score with k = J+1 and w = |s|+1, kept for cross-checks."""
    return (s.length + 1) - prime_count(s.span + 1)


def is_counterexample(s: Constellation) -> bool:
    return s.span < nth_prime(s.length)


def mirror(s: Constellation) -> Constellation:
    return from_gaps(reversed(s.gaps))


def gap_histogram(s: Constellation) -> dict[int, int]:
    return dict(sorted(Counter(s.gaps).items()))


def repetition(J: int, g: int) -> Constellation:
    """J copies of the gap g."""
    if J < 1 or g < 1:
        raise ConstellationError(f"repetition needs J >= 1 and g >= 1, got ({J}, {g})")
    return Constellation([i * g for i in range(J + 1)])


def minimal_repetition_gap(J: int) -> int:
    """Smallest g for which J copies of g form an admissible constellation.

    Every prime q <= J+1 must divide g, otherwise the J+1 multiples of g
    cover all residues mod q.
    """
    if J < 1:
        raise ValueError(f"length must be >= 1, got {J}")
    return primorial(J + 1)
