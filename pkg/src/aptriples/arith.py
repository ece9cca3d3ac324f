"""Exact integer arithmetic services.

Prime sieving, multiplicity-counted factor counting, certified evaluation of
floor(p^c), and fractional-part utilities.  Everything downstream (sieve
weights, exponential sums, the solver) leans on this module, so the floor
certification is deliberately paranoid: a double-precision fast path is
accepted only when the fractional part is far from the integer grid, and
everything else goes through directed-rounding interval evaluation in MPFR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from .errors import AmbiguityError, CapacityError, DomainError, InsufficientTableError

# Bitmap of limit+1 bytes must fit in desk memory.
MAX_SIEVE_LIMIT = 1 << 30

# Fast floor path is rejected when frac(p^c) is within |p^c| * 2^-GUARD_BITS
# of 0 or 1; certification then starts at CERT_PREC bits and doubles.
GUARD_BITS = 20
CERT_PREC = 200
MAX_CERT_PREC = 3200

# Deterministic Miller-Rabin witness set, valid for n < 3.317e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_VALID_BELOW = 3_317_044_064_679_887_385_961_981


@dataclass(frozen=True)
class PrimeTable:
    """Primes up to `limit` plus a primality bitmap indexed 0..limit."""

    limit: int
    primes: np.ndarray
    is_prime: np.ndarray

    def __len__(self):
        return len(self.primes)

    def is_prime_int(self, n: int) -> bool:
        if not 0 <= n <= self.limit:
            raise DomainError(f"{n} outside table range 0..{self.limit}")
        return bool(self.is_prime[n])

    def primes_between(self, lo: float, hi: float) -> np.ndarray:
        """Primes p with lo < p <= hi, as an int64 array."""
        i = np.searchsorted(self.primes, math.floor(lo), side="right")
        j = np.searchsorted(self.primes, math.floor(hi), side="right")
        return self.primes[i:j]


def sieve_primes(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes up to `limit`, odd-stride marking."""
    if not 2 <= limit <= MAX_SIEVE_LIMIT:
        raise CapacityError(
            f"sieve limit must lie in [2, {MAX_SIEVE_LIMIT}], got {limit}"
        )
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    root = math.isqrt(limit)
    for p in range(3, root + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False  # odd multiples only; evens are gone
    primes = np.flatnonzero(flags).astype(np.int64)
    return PrimeTable(limit=limit, primes=primes, is_prime=flags)


def _mr_is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.317e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def big_omega(n: int, table: PrimeTable) -> int:
    """Omega(n): number of prime factors of n counted with multiplicity."""
    if n < 1:
        raise DomainError(f"big_omega needs n >= 1, got {n}")
    count = 0
    m = n
    for p in table.primes:
        p = int(p)
        if p * p > m:
            break
        while m % p == 0:
            m //= p
            count += 1
    else:
        # table exhausted before p^2 > m: the cofactor may be composite
        if m > 1 and not (m <= table.limit and table.is_prime[m]):
            if m >= _MR_VALID_BELOW:
                raise InsufficientTableError(
                    f"cofactor {m} too large for deterministic primality check"
                )
            if not _mr_is_prime(m):
                raise InsufficientTableError(
                    f"cofactor {m} of {n} is composite with no factor <= {table.limit}"
                )
        return count + (1 if m > 1 else 0)
    if m > 1:
        count += 1  # p^2 > m, so the cofactor is prime
    return count


def is_almost_prime(n: int, r: int, table: PrimeTable) -> bool:
    """True iff Omega(n) <= r."""
    if r < 1:
        raise DomainError(f"almost-prime order must be >= 1, got {r}")
    return big_omega(n, table) <= r


@dataclass(frozen=True)
class CertifiedFloor:
    """floor(base^exponent) with a certified margin.

    `margin` is a lower bound on the distance from base^exponent to the
    nearest integer it could be misrounded to.  Exact integer powers (integer
    exponent) report margin 1.0: the floor is then unambiguous.
    """

    base: int
    exponent: float
    value: int
    margin: float


def _mpfr_pow_bounds(p: int, c: float, prec: int):
    """Directed-rounding enclosure [lo, hi] of p^c at `prec` bits.

    exp/log/mul are monotone, so rounding every step down (up) gives a true
    lower (upper) bound for c > 0, p >= 1.
    """
    down = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
    cc = gmpy2.mpfr(c, prec)  # binary float: exact conversion
    lo = down.exp(down.mul(cc, down.log(gmpy2.mpfr(p, prec))))
    hi = up.exp(up.mul(cc, up.log(gmpy2.mpfr(p, prec))))
    return lo, hi


def _mpfr_floor_exact(x, prec: int) -> int:
    """Exact floor of an mpfr; the result context must out-precision x."""
    ctx = gmpy2.context(precision=prec + 64)
    return int(ctx.floor(x))


def floor_power(p: int, c: float) -> CertifiedFloor:
    """Certified floor(p^c) for integer p >= 1 and real 0 < c <= 4."""
    if p < 1:
        raise DomainError(f"floor_power needs p >= 1, got {p}")
    if not 0.0 < c <= 4.0:
        raise DomainError(f"floor_power needs 0 < c <= 4, got {c}")
    if float(c).is_integer():
        return CertifiedFloor(base=p, exponent=c, value=p ** int(c), margin=1.0)

    y = math.pow(p, c)
    if math.isfinite(y):
        v = math.floor(y)
        frac = y - v
        band = y * 2.0**-GUARD_BITS
        if frac > band and (1.0 - frac) > band:
            # fast path: the double's error (a few ulps, ~y*2^-50) is far
            # inside the guard band, so the floor is certain
            return CertifiedFloor(
                base=p, exponent=c, value=v, margin=min(frac, 1.0 - frac) - 0.5 * band
            )

    prec = CERT_PREC
    while prec <= MAX_CERT_PREC:
        lo, hi = _mpfr_pow_bounds(p, c, prec)
        fl = _mpfr_floor_exact(lo, prec)
        fh = _mpfr_floor_exact(hi, prec)
        if fl == fh:
            if lo == hi and lo == fl:
                # provably exact integer power (p = 1): unambiguous floor
                return CertifiedFloor(base=p, exponent=c, value=fl, margin=1.0)
            margin = float(min(lo - fl, (fl + 1) - hi))
            return CertifiedFloor(base=p, exponent=c, value=fl, margin=margin)
        prec *= 2
    raise AmbiguityError(
        f"{p}^{c} is integral or too close to an integer to certify at "
        f"{MAX_CERT_PREC} bits",
        candidates=(fl, fh),
    )


def power_dist_to_int(n: int, c: float) -> float:
    """Certified distance from n^c to the nearest integer (0.0 if integral)."""
    if float(c).is_integer():
        return 0.0
    cf = floor_power(n, c)
    y = math.pow(n, c)
    frac = y - cf.value
    dist = min(frac, 1.0 - frac)
    if dist > y * 2.0**-GUARD_BITS:
        return dist
    # near the integer grid: take the fractional part from an MPFR enclosure
    lo, _hi = _mpfr_pow_bounds(n, c, CERT_PREC)
    frac = float(lo - cf.value)
    return min(max(frac, 0.0), max(1.0 - frac, 0.0))


def dist_to_nearest_int(t: float) -> float:
    """||t||: the distance from t to the nearest integer, in [0, 1/2]."""
    if not math.isfinite(t):
        raise DomainError(f"dist_to_nearest_int needs a finite value, got {t}")
    f = t % 1.0
    return min(f, 1.0 - f)
