"""Instance search across sieve stages.

An instance of a constellation at stage p is a residue g mod p# with every
``g + h`` coprime to p#. Instances are kept as primorial digit columns so a
frontier of millions fits in a few numpy arrays; ordering by value is the
lexicographic order of the digits read from the top position down.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from nonconvex.constellation import Constellation
from nonconvex.pcoords import PrimorialCoords, decode
from nonconvex.primes import (
    next_prime,
    nth_prime,
    prev_prime,
    primality,
    prime_count,
    primes_up_to,
    primorial,
)

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
DEFAULT_BUDGET = 10_000_000
_SCAN_LIMIT = 1 << 20


class SearchError(RuntimeError):
    pass


class CheckpointError(SearchError):
    pass


def _digit_dtype(stage: int):
    return np.uint8 if stage < 256 else np.uint16


def admissible_residue_array(s: Constellation, q: int) -> np.ndarray:
    """Sorted residues r mod q with r + h != 0 (mod q) for all offsets h."""
    ok = np.ones(q, dtype=bool)
    ok[[(-h) % q for h in s.offsets]] = False
    return np.flatnonzero(ok)


@dataclass
class SearchFrontier:
    """Admissible instances of one constellation modulo stage#.

    Row i of ``digits`` holds the digits m_{a+1}..m_k of instance i, where a
    is ``len(prefix)`` and k = pi(stage); the first a digits are common to all
    rows. Rows are in ascending value order.
    """

    tuple_id: str
    stage: int
    prefix: tuple[int, ...]
    digits: np.ndarray
    count: int
    truncated: bool = False

    def __len__(self):
        return self.digits.shape[0]

    @property
    def positions(self) -> int:
        return prime_count(self.stage)

    def coords(self, i: int) -> PrimorialCoords:
        return PrimorialCoords(self.prefix + tuple(int(m) for m in self.digits[i]))

    def instances(self) -> list[PrimorialCoords]:
        return [self.coords(i) for i in range(len(self))]

    def values(self) -> list[int]:
        return [decode(c) for c in self.instances()]

    def residues(self, q: int) -> np.ndarray:
        """Value of every instance mod q, as int64."""
        a = len(self.prefix)
        acc = np.full(len(self), decode(self.prefix) % q, dtype=np.int64)
        weight = primorial(nth_prime(a)) % q if a else 1
        for c in range(self.digits.shape[1]):
            acc = (acc + self.digits[:, c].astype(np.int64) * weight) % q
            weight = weight * nth_prime(a + c + 1) % q
        return acc

    def normalized(self) -> SearchFrontier:
        """Move leading columns shared by every row into the prefix."""
        prefix = list(self.prefix)
        digits = self.digits
        while digits.shape[1] and len(digits) and (digits[:, 0] == digits[0, 0]).all():
            prefix.append(int(digits[0, 0]))
            digits = digits[:, 1:]
        return SearchFrontier(self.tuple_id, self.stage, tuple(prefix), np.ascontiguousarray(digits), self.count, self.truncated)


@dataclass(frozen=True)
class StageCount:
    stage: int
    admissible: int  # q - nu_q
    count: int  # exact instance count, prod of (q - nu_q)
    materialized: int
    truncated: bool


@dataclass
class BfsResult:
    frontier: SearchFrontier
    stages: list[StageCount] = field(default_factory=list)


def scan(s: Constellation, stage: int) -> SearchFrontier:
    """Exhaustive scan of all residues mod stage# (stage# must be small)."""
    modulus = primorial(stage)
    if modulus > _SCAN_LIMIT:
        raise SearchError(f"{stage}# = {modulus} is too large for an exhaustive scan")
    r = np.arange(modulus, dtype=np.int64)
    keep = np.ones(modulus, dtype=bool)
    count = 1
    for q in primes_up_to(stage):
        ok = np.zeros(q, dtype=bool)
        adm = admissible_residue_array(s, q)
        ok[adm] = True
        count *= len(adm)
        keep &= ok[r % q]
    r = r[keep]
    ps = primes_up_to(stage)
    digits = np.empty((len(r), len(ps)), dtype=_digit_dtype(stage))
    rest = r.copy()
    for j, p in enumerate(ps):
        digits[:, j] = rest % p
        rest //= p
    assert len(r) == count
    return SearchFrontier(s.digest(), stage, (), digits, count).normalized()


def _lift_chunk(rho, adm, sinv, q):
    return ((adm[None, :] - rho[:, None]) * sinv) % q


def lift(
    frontier: SearchFrontier,
    s: Constellation,
    next_stage: int,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> SearchFrontier:
    """Extend every instance by one digit, keeping the admissible children.

    A parent g spawns g + m*stage# for m in [0, next_stage); exactly
    ``next_stage - nu`` of those survive. Children come out in ascending
    value order; past ``budget`` only the smallest are kept.
    """
    q = next_stage
    if q != next_prime(frontier.stage):
        raise SearchError(f"{q} does not follow stage {frontier.stage}")
    adm = admissible_residue_array(s, q).astype(np.int64)
    count = frontier.count * len(adm)
    width = frontier.digits.shape[1]
    dtype = _digit_dtype(q)
    if budget <= 0 or len(frontier) == 0 or len(adm) == 0:
        empty = np.zeros((0, width + 1), dtype=dtype)
        return SearchFrontier(frontier.tuple_id, q, frontier.prefix, empty, count, frontier.truncated or budget <= 0)

    sinv = pow(primorial(frontier.stage) % q, -1, q)
    rho = frontier.residues(q)
    if threads > 1 and len(rho) > 100_000:
        chunks = np.array_split(rho, threads)
        with ThreadPoolExecutor(threads) as pool:
            m = np.concatenate(list(pool.map(lambda c: _lift_chunk(c, adm, sinv, q), chunks)))
        m = m.ravel()
    else:
        m = _lift_chunk(rho, adm, sinv, q).ravel()
    # row-major ravel lists children parent by parent, so a stable sort on the
    # new top digit yields value order
    order = np.argsort(m, kind="stable")
    truncated = frontier.truncated
    if len(order) > budget:
        order = order[:budget]
        truncated = True
    parents = order // len(adm)
    digits = np.empty((len(order), width + 1), dtype=dtype)
    digits[:, :width] = frontier.digits[parents]
    digits[:, width] = m[order]
    out = SearchFrontier(frontier.tuple_id, q, frontier.prefix, digits, count, truncated)
    return out.normalized()


def _initial(s: Constellation, start_stage: int) -> SearchFrontier:
    stage = start_stage
    while primorial(stage) > _SCAN_LIMIT:
        stage = prev_prime(stage)
    return scan(s, stage)


def bfs(
    s: Constellation,
    start_stage: int,
    end_stage: int,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
    frontier: SearchFrontier | None = None,
) -> BfsResult:
    """Breadth-first lifting from stage ``start_stage`` to ``end_stage``.

    Counts for every stage come from the product formula, so they stay exact
    when the materialized frontier has been truncated.
    """
    if frontier is None:
        frontier = _initial(s, start_stage)
        while frontier.stage < start_stage:
            frontier = lift(frontier, s, next_prime(frontier.stage), budget, threads)
    elif frontier.tuple_id != s.digest():
        raise CheckpointError("frontier belongs to a different constellation")
    stages = [_stage_count(s, frontier)]
    while frontier.stage < end_stage:
        q = next_prime(frontier.stage)
        frontier = lift(frontier, s, q, budget, threads)
        stages.append(_stage_count(s, frontier))
        log.debug("stage %d: %d instances (exact %d)", q, len(frontier), frontier.count)
        if not frontier.truncated:
            assert len(frontier) == frontier.count
    return BfsResult(frontier, stages)


def _stage_count(s, frontier):
    q = frontier.stage
    return StageCount(q, q - s.nu(q), frontier.count, len(frontier), frontier.truncated)


@dataclass(frozen=True)
class MinGamma:
    coords: PrimorialCoords
    stage: int
    optimal: bool

    @property
    def value(self) -> int:
        return decode(self.coords)


def min_gamma(
    s: Constellation,
    end_stage: int,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
    start_stage: int = 11,
) -> MinGamma:
    """Smallest admissible instance modulo end_stage#.

    Because value order is digit order from the top down, the minimum over
    the full frontier at end_stage is the parent (at the previous stage)
    admitting the smallest top digit, ties going to the smaller parent. The
    last stage is therefore never materialized.
    """
    if primorial(end_stage) <= _SCAN_LIMIT:
        f = scan(s, end_stage)
        if len(f) == 0:
            raise SearchError("constellation has no admissible instance")
        return MinGamma(f.coords(0), end_stage, True)
    last = prev_prime(end_stage)
    parents = bfs(s, min(start_stage, last), last, budget, threads).frontier
    q = end_stage
    adm = admissible_residue_array(s, q).astype(np.int64)
    if len(parents) == 0 or len(adm) == 0:
        raise SearchError("constellation has no admissible instance")
    sinv = pow(primorial(parents.stage) % q, -1, q)
    top = _lift_chunk(parents.residues(q), adm, sinv, q).min(axis=1)
    i = int(np.argmin(top))
    below = parents.coords(i).digits
    coords = PrimorialCoords(below + (0,) * (parents.positions - len(below)) + (int(top[i]),))
    # a truncated parent set only kept the smallest values, which says
    # nothing about which parent admits the smallest top digit
    return MinGamma(coords, q, not parents.truncated)


def min_gamma_all(tuples, end_stage: int, budget: int = DEFAULT_BUDGET, threads: int = 1):
    """Per-tuple minima and the index of the global minimum."""
    rows = [min_gamma(s, end_stage, budget, threads) for s in tuples]
    best = min(range(len(rows)), key=lambda i: rows[i].value)
    return rows, best


@dataclass(frozen=True)
class HorizonOfSurvival:
    """H(q) = (q^2, q1^2): integers inside that are coprime to q# are prime."""

    q: int

    @property
    def next(self) -> int:
        return next_prime(self.q)

    @property
    def interval(self) -> tuple[int, int]:
        return self.q * self.q, self.next**2

    def __contains__(self, n: int) -> bool:
        lo, hi = self.interval
        return lo < n < hi


def horizon_for(n: int) -> HorizonOfSurvival:
    """The horizon whose interval holds n (n must exceed 4)."""
    q = math.isqrt(n)
    q = q if q >= 2 and primality(q).is_prime else prev_prime(q + 1)
    h = HorizonOfSurvival(q)
    if n not in h:
        raise ValueError(f"{n} is not interior to a horizon of survival")
    return h


_HORIZON_LIMIT = 10**14


def _coprime_to_primorial(n: int, q: int) -> bool:
    return all(n % p for p in primes_up_to(q))


def survival_check(gamma0, s: Constellation) -> str:
    """``"dead"``, ``"probable"`` or ``"certified"`` for the instance at gamma0."""
    g = decode(gamma0) if isinstance(gamma0, PrimorialCoords) else int(gamma0)
    tiers = set()
    for h in s.offsets:
        res = primality(g + h)
        if not res.is_prime:
            return "dead"
        tiers.add(res.certainty)
    if tiers == {"deterministic"}:
        return "certified"
    top = g + s.span
    if 4 < g and top < _HORIZON_LIMIT:
        try:
            h = horizon_for(g)
        except ValueError:
            return "probable"
        if top < h.next**2 and all(_coprime_to_primorial(g + x, h.q) for x in s.offsets):
            return "certified"
    return "probable"


@dataclass(frozen=True)
class ZeroRunCandidate:
    coords: PrimorialCoords
    stage: int
    status: str

    @property
    def value(self) -> int:
        return decode(self.coords)


def dfs_zero_run(s: Constellation, frontier: SearchFrontier, depth: int) -> list[ZeroRunCandidate]:
    """Instances that stay admissible with ``depth`` further zero digits.

    Each instance is followed depth-first along the m = 0 branch only; it is
    pruned at the first stage where that branch is inadmissible. Survivors
    are handed to :func:`survival_check`.
    """
    stages = []
    q = frontier.stage
    for _ in range(depth):
        q = next_prime(q)
        stages.append(q)
    out = []
    for i in range(len(frontier)):
        c = frontier.coords(i)
        g = decode(c)
        if all(all((g + h) % p for h in s.offsets) for p in stages):
            out.append(ZeroRunCandidate(c, stages[-1] if stages else frontier.stage, survival_check(g, s)))
    return out


def save_checkpoint(frontier: SearchFrontier, path: str | os.PathLike) -> None:
    """Write the frontier as UTF-8 text, one instance per line."""
    prefix = ",".join(map(str, frontier.prefix))
    lines = [
        f"version: {CHECKPOINT_VERSION}",
        f"tuple-digest: {frontier.tuple_id}",
        f"stage: {frontier.stage}",
        f"count: {frontier.count}",
        f"truncated: {str(frontier.truncated).lower()}",
        "# primorial coordinates m1,m2,...: value = sum m_j * p_(j-1)#, p_0# = 1",
    ]
    body = frontier.digits.astype(str)
    sep = "," if prefix and body.shape[1] else ""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
            for row in body:
                fh.write(prefix + sep + ",".join(row) + "\n")
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}") from exc


def load_checkpoint(path: str | os.PathLike, s: Constellation) -> SearchFrontier:
    header = {}
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if ":" in line:
                    key, _, value = line.partition(":")
                    header[key.strip()] = value.strip()
                else:
                    rows.append([int(t) for t in line.split(",")])
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if int(header.get("version", -1)) != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")
    if header.get("tuple-digest") != s.digest():
        raise CheckpointError("checkpoint digest does not match the constellation")
    stage = int(header["stage"])
    k = prime_count(stage)
    digits = np.zeros((len(rows), k), dtype=_digit_dtype(stage))
    for i, row in enumerate(rows):
        digits[i, : len(row)] = row
    f = SearchFrontier(s.digest(), stage, (), digits, int(header["count"]), header["truncated"] == "true")
    return f.normalized()
