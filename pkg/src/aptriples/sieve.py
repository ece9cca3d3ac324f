"""Level-D sieve weights and the linear-sieve calculus.

The upper/lower weight functions lambda(d) live on odd squarefree d <= D
composed of primes below the sifting bound z.  Writing d = q1*q2*...*qr with
q1 > q2 > ... > qr, d is accepted

    upper sign:  q1...q_{2l} * q_{2l+1}^3 <= D   for every l >= 0, 2l+1 <= r,
    lower sign:  q1...q_{2l-1} * q_{2l}^3 <= D   for every l >= 1, 2l   <= r,

together with d <= D, and then lambda(d) = mu(d) = (-1)^r; all other d get 0.
The acceptance conditions are prefix-monotone, which makes both the weight
enumeration and per-integer divisor sums prunable without loss.

Also here: the weight sums N^+/N^- and the product B they envelope, the
limit functions F(s) = 2e^gamma/s and f(s) = 2e^gamma*log(s-1)/s on [2,3],
and the three-dimensional vector-sieve lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .arith import sieve_primes
from .errors import CapacityError, DomainError

# Euler's constant, 50+ digits; double rounding happens at use time.
EULER_GAMMA = 0.57721566490153286060651209008240243104215933593992

DEFAULT_NODE_BUDGET = 100_000_000
EXACT_Z_CEILING = 100  # rational arithmetic for the weight sums up to here


@dataclass(frozen=True)
class SieveSupport:
    """Sifting bound z, the odd primes in (2, z), and the level D."""

    z: float
    odd_primes: np.ndarray
    D: float

    def __post_init__(self):
        if self.D <= 0:
            raise DomainError(f"sieve level must be positive, got D={self.D}")


def make_support(z: float, D: float) -> SieveSupport:
    if z < 0 or not math.isfinite(z):
        raise DomainError(f"bad sifting bound z={z}")
    if z <= 3:
        odd = np.empty(0, dtype=np.int64)
    else:
        table = sieve_primes(int(math.ceil(z)))
        odd = table.primes[(table.primes > 2) & (table.primes < z)]
    return SieveSupport(z=z, odd_primes=odd, D=float(D))


class RosserWeights:
    """Weight table for one sign: a map from accepted d to lambda(d).

    Stored as parallel sorted arrays (d values are int64, weights int8) since
    large z produce millions of entries.
    """

    def __init__(
        self,
        sign: str,
        support: SieveSupport,
        d: np.ndarray,
        lam: np.ndarray,
        sum_over_phi: float | None = None,
    ):
        if sign not in ("upper", "lower"):
            raise DomainError(f"sign must be 'upper' or 'lower', got {sign!r}")
        order = np.argsort(d, kind="stable")
        self.sign = sign
        self.support = support
        self._d = d[order]
        self._lam = lam[order]
        # sum of lambda(d)/phi(d) accumulated at build time (float path)
        self.sum_over_phi = sum_over_phi

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, d: int) -> bool:
        return self.value(d) != 0

    def value(self, d: int) -> int:
        """lambda(d); 0 for anything not stored."""
        i = np.searchsorted(self._d, d)
        if i < len(self._d) and self._d[i] == d:
            return int(self._lam[i])
        return 0

    def items(self) -> Iterator[tuple[int, int]]:
        for d, lam in zip(self._d.tolist(), self._lam.tolist()):
            yield d, lam

    def export(self, fh) -> None:
        """Sorted `d lambda` pairs, one per line (golden-file format)."""
        for d, lam in self.items():
            fh.write(f"{d} {lam:+d}\n")


def _cube_condition_level(sign: str, level: int) -> bool:
    """Does the acceptance inequality apply at chain position `level`?"""
    return level % 2 == 1 if sign == "upper" else level % 2 == 0


def build_weights(
    support: SieveSupport, sign: str, node_budget: int = DEFAULT_NODE_BUDGET
) -> RosserWeights:
    """Enumerate all accepted divisors for one sign.

    Breadth-first over chain length; each level is expanded with numpy in
    chunks, pruning by d <= D at generation time and by the positional cube
    inequality afterwards.
    """
    if sign not in ("upper", "lower"):
        raise DomainError(f"sign must be 'upper' or 'lower', got {sign!r}")
    if support.D <= 4 and len(support.odd_primes):
        raise DomainError(f"weight construction needs level D > 4, got {support.D}")
    D = support.D
    Dint = int(math.floor(D))  # all acceptance comparisons are exact in int64
    primes_desc = support.odd_primes[::-1].astype(np.int64)  # descending
    n = len(primes_desc)

    out_d = [np.array([1], dtype=np.int64)]
    out_lam = [np.array([1], dtype=np.int8)]
    if n == 0:
        return RosserWeights(
            sign, support, np.concatenate(out_d), np.concatenate(out_lam), sum_over_phi=1.0
        )
    if Dint * int(primes_desc[0]) ** 2 > 2**62:
        raise CapacityError(f"level D={D} too large for exact int64 acceptance tests")

    pf = primes_desc.astype(np.float64)
    # level-1 candidates: single primes <= D
    prod = primes_desc[primes_desc <= Dint]
    last = np.arange(len(prod), dtype=np.int64)
    invphi = 1.0 / (prod.astype(np.float64) - 1.0)
    if _cube_condition_level(sign, 1):
        keep = prod**3 <= Dint
        prod, last, invphi = prod[keep], last[keep], invphi[keep]
    nodes = len(prod)
    level = 1
    chunk = 200_000
    sum_over_phi = 1.0  # d = 1 term
    while len(prod):
        out_d.append(prod.copy())
        out_lam.append(np.full(len(prod), -1 if level % 2 else 1, dtype=np.int8))
        sum_over_phi += (-1.0 if level % 2 else 1.0) * float(invphi.sum())
        # expand: children append one strictly smaller prime
        expandable = prod * int(primes_desc[-1]) <= Dint
        prod, last, invphi = prod[expandable], last[expandable], invphi[expandable]
        next_prod, next_last, next_invphi = [], [], []
        for lo in range(0, len(prod), chunk):
            pr = prod[lo : lo + chunk]
            la = last[lo : lo + chunk]
            iv = invphi[lo : lo + chunk]
            # child primes must satisfy p < p_last and prod*p <= D; in the
            # descending array that is an index window [j_min, n); the float
            # window is widened a little and the exact test re-applied below
            j_min = np.maximum(
                la + 1,
                np.searchsorted(-pf, -(D / pr.astype(np.float64)) * (1.0 + 1e-9)),
            )
            counts = n - j_min
            counts[counts < 0] = 0
            total = int(counts.sum())
            if total == 0:
                continue
            nodes += total
            if nodes > node_budget:
                raise CapacityError(
                    f"weight enumeration exceeded node budget {node_budget}"
                )
            ends = np.cumsum(counts)
            offs = np.arange(total) - np.repeat(ends - counts, counts)
            rep = np.repeat(np.arange(len(pr)), counts)
            j = j_min[rep] + offs
            # strictly descending prime chains: this is what keeps every
            # stored d squarefree, odd, and a divisor of P(z)
            assert (j > la[rep]).all()
            child = pr[rep] * primes_desc[j]
            ok = child <= Dint
            if _cube_condition_level(sign, level + 1):
                ok &= child * primes_desc[j] ** 2 <= Dint
            next_prod.append(child[ok])
            next_last.append(j[ok])
            next_invphi.append(iv[rep[ok]] / (pf[j[ok]] - 1.0))
        if next_prod:
            prod = np.concatenate(next_prod)
            last = np.concatenate(next_last)
            invphi = np.concatenate(next_invphi)
        else:
            prod = np.empty(0, dtype=np.int64)
            last = np.empty(0, dtype=np.int64)
            invphi = np.empty(0, dtype=np.float64)
        level += 1
    return RosserWeights(
        sign,
        support,
        np.concatenate(out_d),
        np.concatenate(out_lam),
        sum_over_phi=sum_over_phi,
    )


def lambda_of_chain(primes_desc: tuple[int, ...] | list[int], sign: str, D: float) -> int:
    """lambda(d) for d given by its strictly decreasing odd prime chain."""
    prod = 1
    for k, q in enumerate(primes_desc, start=1):
        prod *= q
        if prod > D:
            return 0
        if _cube_condition_level(sign, k) and prod * q * q > D:
            return 0
    return -1 if len(primes_desc) % 2 else 1


def divisor_lambda_sum(n_primes_desc, sign: str, D: float) -> int:
    """Sum of lambda(d) over divisors d of n = product of the given primes.

    Walks the divisor chains depth-first, pruning on the prefix-monotone
    acceptance conditions, so the cost tracks accepted divisors rather than
    2^omega(n).
    """
    qs = list(n_primes_desc)
    m = len(qs)

    def walk(start: int, prod: int, length: int) -> int:
        total = -1 if length % 2 else 1
        for i in range(start, m):
            q = qs[i]
            child = prod * q
            if child > D:
                continue
            if _cube_condition_level(sign, length + 1) and child * q * q > D:
                continue
            total += walk(i + 1, child, length + 1)
        return total

    return walk(0, 1, 0)


def fundamental_inequality_check(weights_pair, n) -> tuple[int, int, int]:
    """Divisor sums (sum lambda^-, sum mu, sum lambda^+) over d | n.

    `weights_pair` is (lower, upper) built on a common support; n must be a
    squarefree odd product of support primes (n = 1 allowed).  The caller
    asserts lower <= mu-sum <= upper.
    """
    lower, upper = weights_pair
    if lower.sign != "lower" or upper.sign != "upper":
        raise DomainError("weights_pair must be (lower, upper)")
    support = lower.support
    qs = _factor_over_support(n, support)
    mob = 1 if n == 1 else 0  # sum_{d|n} mu(d) for squarefree n
    lo = divisor_lambda_sum(qs, "lower", lower.support.D)
    up = divisor_lambda_sum(qs, "upper", upper.support.D)
    return lo, mob, up


def _factor_over_support(n: int, support: SieveSupport) -> list[int]:
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    qs = []
    m = n
    for q in support.odd_primes[::-1].tolist():
        if m % q == 0:
            qs.append(q)
            m //= q
            if m % q == 0:
                raise DomainError(f"{n} is not squarefree (repeated factor {q})")
    if m != 1:
        raise DomainError(f"{n} has a factor outside the sieve support")
    return qs


@dataclass(frozen=True)
class SieveSums:
    N_plus: float
    N_minus: float
    B: float
    s0: float


def sieve_sums(weights_pair, support: SieveSupport, exact: bool | None = None) -> SieveSums:
    """N^{+-} = sum lambda(d)/phi(d) over stored entries, and B, s0.

    B = prod_{2<p<z} (1 - 1/(p-1)).  Exact rational arithmetic is used when
    z <= 100 (or on request); the property tests bite hardest there.
    """
    lower, upper = weights_pair
    if exact is None:
        exact = support.z <= EXACT_Z_CEILING

    def weight_sum(w: RosserWeights):
        if exact:
            total = Fraction(0)
            for d, lam in w.items():
                total += Fraction(lam, _phi_squarefree(d, support))
            return float(total)
        if w.sum_over_phi is not None:
            return w.sum_over_phi
        inv_phi = _inv_phi_array(w, support)
        return float(np.sum(w._lam.astype(np.float64) * inv_phi))

    if exact:
        b = Fraction(1)
        for q in support.odd_primes.tolist():
            b *= Fraction(q - 2, q - 1)
        B = float(b)
    else:
        q = support.odd_primes.astype(np.float64)
        B = float(np.exp(np.sum(np.log1p(-1.0 / (q - 1.0))))) if len(q) else 1.0

    s0 = math.log(support.D) / math.log(support.z) if support.z > 1 else float("nan")
    return SieveSums(N_plus=weight_sum(upper), N_minus=weight_sum(lower), B=B, s0=s0)


def _phi_squarefree(d: int, support: SieveSupport) -> int:
    phi = 1
    m = d
    for q in support.odd_primes.tolist():
        if m % q == 0:
            phi *= q - 1
            m //= q
        if m == 1:
            break
    if m != 1:
        raise DomainError(f"stored divisor {d} not composed of support primes")
    return phi


def _inv_phi_array(w: RosserWeights, support: SieveSupport) -> np.ndarray:
    """1/phi(d) for every stored d, by repeated division over support primes."""
    d = w._d.astype(np.int64).copy()
    inv = np.ones(len(d), dtype=np.float64)
    for q in support.odd_primes.tolist():
        mask = d % q == 0
        if mask.any():
            inv[mask] /= q - 1
            d[mask] //= q
    return inv


def F_of(s: float) -> float:
    """Upper linear-sieve limit 2*e^gamma/s, defined on 2 <= s <= 3."""
    if not 2.0 <= s <= 3.0:
        raise DomainError(f"F(s) is defined on [2, 3], got s={s}")
    return 2.0 * math.exp(EULER_GAMMA) / s

def f_of(s: float) -> float:
    """Lower linear-sieve limit 2*e^gamma*log(s-1)/s, defined on 2 <= s <= 3."""
    if not 2.0 <= s <= 3.0:
        raise DomainError(f"f(s) is defined on [2, 3], got s={s}")
    return 2.0 * math.exp(EULER_GAMMA) * math.log(s - 1.0) / s


def vector_sieve_lower(a, lower, upper) -> float:
    """Lower bound for a1*a2*a3 from per-coordinate sieve envelopes.

    With l_i <= a_i <= u_i and a_i in {0, 1}:

        a1*a2*a3 >= l1*u2*u3 + u1*l2*u3 + u1*u2*l3 - 2*u1*u2*u3.

    The symmetric right-hand side is what the three-fold sieve decomposition
    uses; it is returned here.
    """
    a1, a2, a3 = a
    l1, l2, l3 = lower
    u1, u2, u3 = upper
    for ai, li, ui in ((a1, l1, u1), (a2, l2, u2), (a3, l3, u3)):
        if ai not in (0, 1):
            raise DomainError(f"indicator entries must be 0 or 1, got {ai}")
        if not li <= ai <= ui:
            raise DomainError(f"need lower <= a <= upper, got {li}, {ai}, {ui}")
    return l1 * u2 * u3 + u1 * l2 * u3 + u1 * u2 * l3 - 2.0 * u1 * u2 * u3
