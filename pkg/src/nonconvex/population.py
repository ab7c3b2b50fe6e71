"""Instance-count products and asymptotic relative populations.

Everything is exact (int / Fraction); decimal rendering happens only in
:func:`sci`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import reduce
from typing import Sequence

from nonconvex.constellation import Constellation
from nonconvex.primes import is_prime, next_prime, primes_between, primes_up_to

EULER_GAMMA = 0.57721566490153286

# primes up to this bound are trial-divided out of the common gap divisor
_FACTOR_BOUND = 10**6
# spans up to this bound are handled by walking every prime <= span
_DIRECT_SPAN = 10**7


class InadmissibleWarning(UserWarning):
    pass


class ComparabilityError(ValueError):
    pass


def sci(x, digits: int = 7) -> str:
    """Scientific rendering of an exact int/Fraction, e.g. ``4.074808E89``."""
    x = Fraction(x)
    if x == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits + 10
        d = Decimal(x.numerator) / Decimal(x.denominator)
        text = f"{d:.{digits - 1}E}"
    mant, _, exp = text.partition("E")
    return f"{mant}E{int(exp)}"


def instance_count(s: Constellation, lo: int, hi: int) -> int:
    """Product of (q - nu_q) over primes lo <= q <= hi."""
    total = 1
    for q in primes_between(lo, hi):
        f = q - s.nu(q)
        if f == 0:
            warnings.warn(f"constellation covers every residue mod {q}", InadmissibleWarning, stacklevel=2)
            return 0
        total *= f
    return total


@dataclass(frozen=True)
class PopulationReport:
    tuple_id: str
    length: int
    factor1: int
    factor2: Fraction
    last_prime: int  # largest prime that can contribute a factor != 1

    @property
    def w_infinity(self) -> Fraction:
        return self.factor1 * self.factor2

    def row(self, digits: int = 7) -> tuple[str, str, str]:
        return sci(self.factor1, digits), sci(self.factor2, digits), sci(self.w_infinity, digits)


def _small_factors(n: int) -> list[int]:
    out = []
    for p in primes_up_to(_FACTOR_BOUND):
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        if p * p > n:
            break
    if n > 1:
        if not is_prime(n):
            raise ValueError(f"cannot factor gap divisor cofactor {n}")
        out.append(n)
    return out


def _second_factor_primes(s: Constellation) -> list[int]:
    """Primes q > J+1 for which nu_q can fall below J+1.

    nu_q < J+1 needs q to divide some offset difference. Every difference is
    a multiple of d = gcd(gaps) and at most span, so q divides d or q <= span/d.
    """
    lo = s.length + 2
    if s.span <= _DIRECT_SPAN:
        return primes_between(lo, s.span)
    d = reduce(math.gcd, s.gaps)
    reduced = s.span // d
    if reduced > _DIRECT_SPAN:
        raise ValueError(f"span {s.span} too large for an exact second factor")
    qs = set(primes_between(lo, reduced)) | {p for p in _small_factors(d) if p >= lo}
    return sorted(qs)


def w_infinity(s: Constellation, tuple_id: str | None = None) -> PopulationReport:
    """Both factors of w(inf) = prod_{q<=J+1}(q-nu_q) * prod_{q>J+1}(q-nu_q)/(q-J-1)."""
    J = s.length
    tid = tuple_id if tuple_id is not None else s.digest()
    f1 = 1
    for q in primes_up_to(J + 1):
        f = q - s.nu(q)
        if f == 0:
            warnings.warn(f"constellation covers every residue mod {q}", InadmissibleWarning, stacklevel=2)
            return PopulationReport(tid, J, 0, Fraction(0), q)
        f1 *= f
    num, den = 1, 1
    last = J + 1
    for q in _second_factor_primes(s):
        nu = s.nu(q)
        num *= q - nu
        den *= q - J - 1
        last = q
    # the truncation is asserted, not assumed
    beyond = next_prime(max(last, s.span if s.span <= _DIRECT_SPAN else last))
    assert s.nu(beyond) == J + 1, f"nu_{beyond} != J+1 beyond the truncation point"
    return PopulationReport(tid, J, f1, Fraction(num, den), last)


def w_infinity_table(tuples: Sequence[Constellation], ids: Sequence[str] | None = None) -> list[PopulationReport]:
    """Reports for constellations of one common length, in input order."""
    lengths = {s.length for s in tuples}
    if len(lengths) > 1:
        raise ComparabilityError(f"relative populations need equal lengths, got {sorted(lengths)}")
    ids = ids if ids is not None else [str(i) for i in range(len(tuples))]
    return [w_infinity(s, tid) for s, tid in zip(tuples, ids)]


def mertens_mu_threshold(target_mu: float) -> tuple[float, int]:
    """p with e^gamma * ln p = target_mu, as (mantissa, decimal exponent).

    Mertens' third theorem gives the mean gap among integers coprime to p#
    as about e^gamma ln p.
    """
    if target_mu <= 1:
        raise ValueError("target mean gap must exceed 1")
    log10p = target_mu * math.exp(-EULER_GAMMA) / math.log(10)
    exp = math.floor(log10p)
    mant = 10 ** (log10p - exp)
    if mant >= 10:
        mant, exp = mant / 10, exp + 1
    return mant, exp
