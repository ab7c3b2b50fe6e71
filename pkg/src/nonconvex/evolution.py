"""Driving terms: the sieve survivors over a constellation's window.

For an instance g at stage p, the driving term is the gap pattern of the
integers in ``[g, g + span]`` that are coprime to p#. It contains the target
constellation and loses interior points as later primes strike them, until
it equals the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nonconvex.constellation import Constellation, from_offsets, is_admissible
from nonconvex.pcoords import PrimorialCoords, decode, encode
from nonconvex.primes import next_prime, primes_up_to
from nonconvex.search import DEFAULT_BUDGET, SearchFrontier, bfs, lift


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, last_stage: int | None):
        super().__init__(message)
        self.last_stage = last_stage


def _value(gamma0) -> int:
    return decode(gamma0) if isinstance(gamma0, PrimorialCoords) else int(gamma0)


def survivors_in_window(gamma0, span: int, stage: int) -> list[int]:
    """Offsets t in [0, span] with gamma0 + t coprime to stage#.

    Works by striking the class -gamma0 mod q for each q <= stage.
    """
    g = _value(gamma0)
    alive = np.ones(span + 1, dtype=bool)
    for q in primes_up_to(stage):
        alive[(-g) % q :: q] = False
    return np.flatnonzero(alive).tolist()


@dataclass(frozen=True)
class DrivingTerm:
    stage: int
    gamma0: PrimorialCoords
    survivors: tuple[int, ...]
    contains_target: bool
    equals_target: bool

    @property
    def length(self) -> int:
        return len(self.survivors) - 1

    @property
    def term(self) -> Constellation | None:
        return from_offsets(self.survivors) if len(self.survivors) >= 2 and self.survivors[0] == 0 else None


def driving_term(gamma0, target: Constellation, stage: int) -> DrivingTerm:
    coords = gamma0 if isinstance(gamma0, PrimorialCoords) else encode(int(gamma0))
    surv = tuple(survivors_in_window(coords, target.span, stage))
    have = set(surv)
    contains = all(h in have for h in target.offsets)
    return DrivingTerm(stage, coords, surv, contains, surv == target.offsets)


@dataclass(frozen=True)
class PrefixRow:
    stage: int
    count: int
    gamma0: PrimorialCoords | None  # set when the instance is unique
    length: int | None  # driving-term length of the unique instance
    equals_target: bool


def track_prefix(
    target: Constellation,
    max_stage: int,
    start_stage: int = 11,
    budget: int = DEFAULT_BUDGET,
) -> list[PrefixRow]:
    """Instance counts per stage and the unique prefix while there is one."""
    if not is_admissible(target):
        raise ValueError("target constellation is not admissible")
    start_stage = min(start_stage, max_stage)
    rows = []
    last = None
    try:
        for f in _iter_stages(target, start_stage, max_stage, budget):
            if len(f) == 1:
                c = f.coords(0)
                dt = driving_term(c, target, f.stage)
                rows.append(PrefixRow(f.stage, f.count, c, dt.length, dt.equals_target))
            else:
                rows.append(PrefixRow(f.stage, f.count, None, None, False))
            last = f.stage
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), last) from None
    return rows


def _iter_stages(target, start_stage, max_stage, budget):
    f = bfs(target, start_stage, start_stage, budget).frontier
    while True:
        if f.truncated:
            raise BudgetExceeded(f"more than {budget} instances at stage {f.stage}", None)
        yield f
        if f.stage >= max_stage:
            return
        f = lift(f, target, next_prime(f.stage), budget)


def _any_exact(f: SearchFrontier, target: Constellation) -> bool:
    for c in f.instances():
        if decode(c) < 2:
            # the unit is not a generator
            continue
        if tuple(survivors_in_window(c, target.span, f.stage)) == target.offsets:
            return True
    return False


def first_appearance(
    target: Constellation,
    max_stage: int,
    start_stage: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> int | None:
    """First stage at which some instance's driving term is the target itself."""
    if not is_admissible(target):
        return None
    for f in _iter_stages(target, start_stage, max_stage, budget):
        if _any_exact(f, target):
            return f.stage
    return None
