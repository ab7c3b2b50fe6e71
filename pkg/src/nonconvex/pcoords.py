"""Primorial (mixed-radix) coordinates.

A natural number n is written ``n = m_1*p_0# + m_2*p_1# + ... + m_k*p_{k-1}#``
with ``p_0# = 1`` and ``0 <= m_j < p_j``. Digits are stored lowest position
first with trailing zeros trimmed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

from nonconvex.primes import nth_prime, prime_count, primes_up_to

TEXT_HEADER = "# primorial coordinates m1,m2,...: value = sum m_j * p_(j-1)#, p_0# = 1"


class CoordinateError(ValueError):
    pass


def _radices(k: int) -> list[int]:
    if k == 0:
        return []
    return primes_up_to(nth_prime(k))


@total_ordering
@dataclass(frozen=True)
class PrimorialCoords:
    digits: tuple[int, ...] = ()

    def __post_init__(self):
        digits = tuple(int(m) for m in self.digits)
        while digits and digits[-1] == 0:
            digits = digits[:-1]
        for j, (m, p) in enumerate(zip(digits, _radices(len(digits))), 1):
            if not 0 <= m < p:
                raise CoordinateError(f"digit m_{j} = {m} out of range [0, {p})")
        object.__setattr__(self, "digits", digits)

    @property
    def value(self) -> int:
        return decode(self)

    def digit(self, j: int) -> int:
        """m_j (1-based); zero beyond the stored digits."""
        return self.digits[j - 1] if j <= len(self.digits) else 0

    def __lt__(self, other):
        if not isinstance(other, PrimorialCoords):
            return NotImplemented
        a, b = self.digits, other.digits
        if len(a) != len(b):
            return len(a) < len(b)
        return a[::-1] < b[::-1]

    def __int__(self):
        return decode(self)

    def to_text(self) -> str:
        return ",".join(map(str, self.digits))

    @classmethod
    def from_text(cls, text: str) -> PrimorialCoords:
        text = text.strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError as exc:
            raise CoordinateError(f"bad coordinate text {text!r}: {exc}") from None

    def anchored(self, anchor: int = 11) -> str:
        """Display as ``base + m*p# + ...`` with base = value mod anchor#."""
        k = prime_count(anchor)
        base = decode(self.digits[:k])
        parts = [str(base)]
        for j in range(k + 1, len(self.digits) + 1):
            m = self.digits[j - 1]
            if m:
                parts.append(f"{m}*{nth_prime(j - 1)}#")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()


def encode(n: int) -> PrimorialCoords:
    """Mixed-radix digits of n by repeated division by 2, 3, 5, ..."""
    if n < 0:
        raise CoordinateError(f"cannot encode negative value {n}")
    digits = []
    j = 1
    while n:
        p = nth_prime(j)
        n, m = divmod(n, p)
        digits.append(m)
        j += 1
    return PrimorialCoords(tuple(digits))


def decode(c: PrimorialCoords | tuple | list) -> int:
    digits = c.digits if isinstance(c, PrimorialCoords) else tuple(c)
    radices = _radices(len(digits))
    value = 0
    weight = 1
    for j, (m, p) in enumerate(zip(digits, radices), 1):
        if not 0 <= m < p:
            raise CoordinateError(f"digit m_{j} = {m} out of range [0, {p})")
        value += m * weight
        weight *= p
    return value


def leading_term(c: PrimorialCoords) -> tuple[int, int]:
    """(m, p) for the highest nonzero term m * p#; p = 1 for the unit position."""
    if not c.digits:
        raise CoordinateError("zero has no leading term")
    k = len(c.digits)
    return c.digits[-1], (nth_prime(k - 1) if k > 1 else 1)


def residue_mod_primorial(c: PrimorialCoords, p: int) -> int:
    """Value of c modulo p#, from the digits below the p#-position."""
    k = prime_count(p)
    return decode(c.digits[:k])
