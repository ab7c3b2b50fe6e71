"""Nonconvex (narrow) prime constellations: admissibility, scoring, sieve
evolution in primorial coordinates, population products and instance search."""

from nonconvex.primes import (
    PrimeTable,
    is_prime,
    next_prime,
    nth_prime,
    prev_prime,
    prime_count,
    prime_gap_constellation,
    primality,
    primes_up_to,
    primorial,
    sieve,
)
from nonconvex.constellation import (
    Constellation,
    admissible_residues,
    from_gaps,
    from_offsets,
    gap_histogram,
    is_admissible,
    is_counterexample,
    legacy_score,
    minimal_repetition_gap,
    mirror,
    nonconvexity_score,
    nu,
    repetition,
)
from nonconvex.pcoords import PrimorialCoords, decode, encode, leading_term, residue_mod_primorial

__version__ = "0.1.0"

__all__ = [
    "PrimeTable",
    "is_prime",
    "next_prime",
    "nth_prime",
    "prev_prime",
    "prime_count",
    "prime_gap_constellation",
    "primality",
    "primes_up_to",
    "primorial",
    "sieve",
    "Constellation",
    "admissible_residues",
    "from_gaps",
    "from_offsets",
    "gap_histogram",
    "is_admissible",
    "is_counterexample",
    "legacy_score",
    "minimal_repetition_gap",
    "mirror",
    "nonconvexity_score",
    "nu",
    "repetition",
    "PrimorialCoords",
    "decode",
    "encode",
    "leading_term",
    "residue_mod_primorial",
]
