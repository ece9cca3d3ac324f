"""Finding and certifying prime triples of the floor-power equation.

The solver indexes certified floor powers once and then walks canonical value
pairs (v1 <= v2), looking up v3 = N - v1 - v2: meet-in-the-middle instead of
a cubic prime loop.  Solutions are canonicalized p1 <= p2 <= p3 and filtered
by the almost-prime condition on p_i + 2.  `verify` re-checks every clause of
a claimed solution through an independent high-precision path (mpmath, plain
trial division), and `scan` aggregates per-N statistics over a whole range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .arith import PrimeTable, big_omega, floor_power
from .errors import AmbiguityError, DomainError
from .params import ProblemParams


@dataclass(frozen=True)
class FloorPowerIndex:
    """Map from a floor-power value v to the ascending primes with that value."""

    c: float
    mu: float
    X: float
    entries: dict[int, list[int]]

    def values_sorted(self) -> list[int]:
        return sorted(self.entries)


@dataclass(frozen=True)
class SolutionTriple:
    p1: int
    p2: int
    p3: int
    v1: int
    v2: int
    v3: int
    omega1: int
    omega2: int
    omega3: int

    @property
    def primes(self):
        return (self.p1, self.p2, self.p3)

    def to_json_dict(self, N: int, c: float) -> dict:
        return {
            "N": N,
            "c": c,
            "p": [self.p1, self.p2, self.p3],
            "v": [self.v1, self.v2, self.v3],
            "omega": [self.omega1, self.omega2, self.omega3],
        }


@dataclass(frozen=True)
class SolveResult:
    """Solutions in canonical order; `count` is complete even when `triples`
    is truncated at `limit` (or empty in count-only mode, limit = 0)."""

    triples: list
    count: int


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def build_index(params: ProblemParams, table: PrimeTable) -> FloorPowerIndex:
    """Certified floor powers for every prime in (mu*X, X], grouped by value."""
    if table.limit < math.floor(params.X):
        raise DomainError(
            f"prime table up to {table.limit} does not cover X = {params.X}"
        )
    entries: dict[int, list[int]] = {}
    for p in table.primes_between(params.mu * params.X, params.X).tolist():
        try:
            v = floor_power(p, params.c).value
        except AmbiguityError as exc:
            raise AmbiguityError(
                f"floor certification failed at prime {p}: {exc}", exc.candidates
            ) from exc
        entries.setdefault(v, []).append(p)
    return FloorPowerIndex(c=params.c, mu=params.mu, X=params.X, entries=entries)


def solve(
    N: int,
    params: ProblemParams,
    r: int,
    limit: int = 0,
    table: PrimeTable = None,
    index: FloorPowerIndex = None,
) -> SolveResult:
    """All canonical triples p1 <= p2 <= p3 with v1 + v2 + v3 = N and
    Omega(p_i + 2) <= r.

    limit > 0 truncates the stored list (the count keeps only what was seen
    before stopping); limit = 0 counts everything and stores nothing.
    """
    if r < 1:
        raise DomainError(f"almost-prime order must be >= 1, got {r}")
    if limit < 0:
        raise DomainError(f"limit must be >= 0, got {limit}")
    if index is None:
        if table is None:
            raise DomainError("solve needs a prime table or a prebuilt index")
        index = build_index(params, table)
    filtered: dict[int, list[tuple[int, int]]] = {}
    for v, plist in index.entries.items():
        kept = []
        for p in plist:
            om = big_omega(p + 2, table) if table is not None else _omega_trial(p + 2)
            if om <= r:
                kept.append((p, om))
        if kept:
            filtered[v] = kept
    values = sorted(filtered)
    triples: list[SolutionTriple] = []
    count = 0
    store = limit > 0
    for i, v1 in enumerate(values):
        if 3 * v1 > N:
            break
        for v2 in values[i:]:
            v3 = N - v1 - v2
            if v3 < v2:
                break
            plist3 = filtered.get(v3)
            if plist3 is None:
                continue
            for a, (p1, om1) in enumerate(filtered[v1]):
                p2_pool = filtered[v2][a:] if v2 == v1 else filtered[v2]
                for b, (p2, om2) in enumerate(p2_pool):
                    if v3 == v2:
                        p3_pool = p2_pool[b:]
                    elif v3 == v1:
                        p3_pool = filtered[v3][a:]
                    else:
                        p3_pool = plist3
                    for p3, om3 in p3_pool:
                        if not (p1 <= p2 <= p3):
                            continue
                        count += 1
                        if store:
                            triples.append(
                                SolutionTriple(p1, p2, p3, v1, v2, v3, om1, om2, om3)
                            )
                            if count >= limit:
                                return SolveResult(triples=triples, count=count)
    return SolveResult(triples=triples, count=count)


def _omega_trial(n: int) -> int:
    """Omega(n) by plain trial division; independent of any prime table."""
    count = 0
    m = n
    d = 2
    while d * d <= m:
        while m % d == 0:
            m //= d
            count += 1
        d += 1 if d == 2 else 2
    return count + (1 if m > 1 else 0)


def _floor_power_mpmath(p: int, c: float) -> int:
    """floor(p^c) recomputed at high precision along an independent path."""
    with mpmath.workdps(60):
        y = mpmath.power(p, mpmath.mpf(c))
        fl = mpmath.floor(y)
        if y - fl < mpmath.mpf(10) ** -40 or (fl + 1) - y < mpmath.mpf(10) ** -40:
            with mpmath.workdps(200):
                y = mpmath.power(p, mpmath.mpf(c))
                fl = mpmath.floor(y)
        return int(fl)


def _is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def verify(t: SolutionTriple, N: int, params: ProblemParams, r: int) -> VerifyResult:
    """Re-check every clause of a claimed solution independently.

    Floor powers are recomputed with mpmath, primality and Omega by direct
    trial division; nothing is shared with the solver's fast path.
    """
    ps = (t.p1, t.p2, t.p3)
    vs = (t.v1, t.v2, t.v3)
    oms = (t.omega1, t.omega2, t.omega3)
    if not (t.p1 <= t.p2 <= t.p3):
        return VerifyResult(False, "not canonical")
    if t.v1 + t.v2 + t.v3 != N:
        return VerifyResult(False, "sum mismatch")
    for p, v, om in zip(ps, vs, oms):
        if not _is_prime_trial(p):
            return VerifyResult(False, "not prime")
        if not params.mu * params.X < p <= params.X:
            return VerifyResult(False, "out of range")
        if _floor_power_mpmath(p, params.c) != v:
            return VerifyResult(False, "floor power mismatch")
        true_om = _omega_trial(p + 2)
        if true_om != om:
            return VerifyResult(False, "omega mismatch")
        if true_om > r:
            return VerifyResult(False, "almost-prime bound")
    return VerifyResult(True, None)


@dataclass(frozen=True)
class ScanRow:
    N: int
    count: int
    min_omega: int  # smallest t with a solution satisfying all Omega <= t; -1 if none


def scan(
    c: float,
    r: int,
    n_lo: int,
    n_hi: int,
    step: int = 1,
    mu: float = 0.0,
    table: PrimeTable = None,
) -> list[ScanRow]:
    """Per-N solution statistics over N in [n_lo, n_hi] with stride `step`.

    Counts unordered triples via threshold-filtered convolution: for each
    Omega bound t, f_t(v) counts primes with floor power v and
    Omega(p+2) <= t; the ordered count is the triple convolution and the
    unordered one follows from the symmetry-group correction
        (ordered + 3 * equal-pair + 2 * equal-triple) / 6.
    Deterministic and independent of any worker scheduling by construction.
    """
    if n_lo > n_hi:
        return []
    if step < 1:
        raise DomainError(f"step must be >= 1, got {step}")
    if table is None:
        raise DomainError("scan needs a prime table")
    X = n_hi ** (1.0 / c)
    if table.limit < math.floor(X):
        raise DomainError(f"prime table up to {table.limit} does not cover {X}")
    primes = table.primes_between(mu * X, X)
    vs, oms = [], []
    for p in primes.tolist():
        v = floor_power(p, c).value
        if v > n_hi:
            continue
        vs.append(v)
        oms.append(big_omega(p + 2, table))
    if not vs:
        return [ScanRow(N, 0, -1) for N in range(n_lo, n_hi + 1, step)]
    vs = np.array(vs)
    oms = np.array(oms)
    om_levels = sorted({t for t in oms.tolist() if t <= r})
    size = n_hi + 1

    def unordered_counts(t: int) -> np.ndarray:
        f = np.zeros(size)
        np.add.at(f, vs[oms <= t], 1.0)
        ordered = np.convolve(np.convolve(f, f)[:size], f)[:size]
        f2 = np.zeros(2 * size - 1)
        f2[::2] = f
        pairs = np.convolve(f2, f)[:size]
        triple = np.zeros(size)
        idx = np.arange(0, size, 3)
        triple[idx] = f[idx // 3]
        return np.rint((ordered + 3.0 * pairs + 2.0 * triple) / 6.0).astype(np.int64)

    per_level = {t: unordered_counts(t) for t in om_levels if t <= r}
    counts_r = unordered_counts(r) if r not in per_level else per_level[r]
    rows = []
    levels = sorted(per_level)
    for N in range(n_lo, n_hi + 1, step):
        cnt = int(counts_r[N])
        mo = -1
        for t in levels:
            if per_level[t][N] > 0:
                mo = t
                break
        rows.append(ScanRow(N=N, count=cnt, min_omega=mo))
    return rows
