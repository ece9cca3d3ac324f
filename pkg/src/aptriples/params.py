"""Scalar parameters of the construction and their constraint calculus.

All exponents are tied to the single exponent c in (1, 17/16):

    xi    = (16c - 5)/32          minor-arc split exponent
    delta = (17 - 16c)/32         sieve level exponent,  D = X^delta
    kappa = (8c - 5)/56           Fourier truncation exponent,  M = X^kappa
    eta   = delta / 2.95          sifting exponent,  z = X^eta
    r     = floor(95 / (17-16c))  almost-prime order of the shifts p_i + 2

with X = N^(1/c), Delta = X^(xi-c) and s0 = delta/eta fixed at 2.95.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import ConstraintViolationError, DomainError

C_SUP = Fraction(17, 16)
S0 = 2.95

_FIELD_ORDER = (
    "c", "N", "X", "mu", "eta", "delta", "xi", "kappa",
    "z", "D", "Delta", "M", "s0", "A", "r",
)


@dataclass(frozen=True)
class ProblemParams:
    c: float
    N: int
    X: float
    mu: float
    eta: float
    delta: float
    xi: float
    kappa: float
    z: float
    D: float
    Delta: float
    M: float
    s0: float
    A: float
    r: int

    def to_json(self) -> str:
        return json.dumps({k: getattr(self, k) for k in _FIELD_ORDER})

    @classmethod
    def from_json(cls, text: str) -> "ProblemParams":
        data = json.loads(text)
        return cls(**{k: (int(data[k]) if k in ("N", "r") else data[k]) for k in _FIELD_ORDER})

    def to_config(self) -> str:
        """Flat key=value serialization, one field per line."""
        return "".join(f"{k}={getattr(self, k)!r}\n" for k in _FIELD_ORDER)

    @classmethod
    def from_config(cls, text: str) -> "ProblemParams":
        data = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, raw = line.partition("=")
            data[key.strip()] = raw.strip()
        unknown = set(data) - set(_FIELD_ORDER)
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for k in _FIELD_ORDER:
            if k not in data:
                raise DomainError(f"missing config key: {k}")
            kwargs[k] = int(data[k]) if k in ("N", "r") else float(data[k])
        return cls(**kwargs)


def r_bound(c: float) -> int:
    """floor(95 / (17 - 16c)), the almost-prime order guaranteed for p_i + 2.

    Evaluated in exact rational arithmetic on the binary value of c so that
    near-integer quotients floor correctly.
    """
    _check_c(c)
    return int(Fraction(95) / (17 - 16 * Fraction(c)))


def _check_c(c: float) -> None:
    if not 1.0 < c < float(C_SUP):
        raise DomainError(f"exponent c must lie in (1, 17/16), got {c}")


def derive_params(c: float, N: int, mu: float = 0.1, A: float = 12.0) -> ProblemParams:
    """Populate every scalar from the explicit choices tied to c.

    Raises ConstraintViolationError if any derived value violates the
    constraint system (cannot happen for valid inputs; kept as a guard).
    """
    _check_c(c)
    if N < 2:
        raise DomainError(f"target N must be >= 2, got {N}")
    if not 0.0 < mu < 1.0:
        raise DomainError(f"cutoff mu must lie in (0, 1), got {mu}")

    xi = (16 * c - 5) / 32
    delta = (17 - 16 * c) / 32
    kappa = (8 * c - 5) / 56
    eta = delta / S0
    X = N ** (1.0 / c)
    params = ProblemParams(
        c=c, N=N, X=X, mu=mu,
        eta=eta, delta=delta, xi=xi, kappa=kappa,
        z=X**eta, D=X**delta, Delta=X ** (xi - c), M=X**kappa,
        s0=S0, A=A, r=r_bound(c),
    )
    bad = [v for v in validate(params) if not v.ok]
    if bad:
        raise ConstraintViolationError(
            "derived parameters violate: " + "; ".join(v.name for v in bad)
        )
    return params


def desk_params(
    c: float,
    N: int,
    mu: float = 0.1,
    z: float | None = None,
    s0: float = S0,
    A: float = 12.0,
) -> ProblemParams:
    """Hand-built parameters for desk-scale experiments.

    Unlike derive_params this accepts any exponent 0 < c <= 4 and mu = 0
    (validate() reports which proof constraints such choices break), and the
    sifting bound z may be set directly, with D = z^s0.
    """
    if not 0.0 < c <= 4.0:
        raise DomainError(f"desk exponent must lie in (0, 4], got {c}")
    if N < 2:
        raise DomainError(f"target N must be >= 2, got {N}")
    if not 0.0 <= mu < 1.0:
        raise DomainError(f"cutoff mu must lie in [0, 1), got {mu}")
    xi = (16 * c - 5) / 32
    kappa = (8 * c - 5) / 56
    X = N ** (1.0 / c)
    logX = math.log(X)
    if z is not None:
        if z <= 1.0:
            raise DomainError(f"sifting bound z must exceed 1, got {z}")
        eta = math.log(z) / logX
        delta = eta * s0
        D = z**s0
    else:
        delta = (17 - 16 * c) / 32
        eta = delta / s0
        z = X**eta
        D = X**delta
    r = r_bound(c) if 1.0 < c < float(C_SUP) else 0
    return ProblemParams(
        c=c, N=N, X=X, mu=mu,
        eta=eta, delta=delta, xi=xi, kappa=kappa,
        z=z, D=D, Delta=X ** (xi - c), M=X**kappa,
        s0=s0, A=A, r=r,
    )


def with_sieve_scale(params: ProblemParams, z: float, s0: float = S0) -> ProblemParams:
    """Copy of `params` with an explicit sifting bound z and D = z^s0.

    Desk-scale experiments need z chosen by hand (X^eta is barely above 1 for
    realistic N), so eta and delta are recomputed from the requested z to keep
    the fields mutually consistent.  validate() reports any constraint the
    override breaks.
    """
    if z <= 1.0:
        raise DomainError(f"sifting bound z must exceed 1, got {z}")
    logX = math.log(params.X)
    eta = math.log(z) / logX
    D = z**s0
    return replace(params, z=z, D=D, eta=eta, delta=eta * s0, s0=s0)


@dataclass(frozen=True)
class ConstraintReport:
    name: str
    ok: bool
    slack: float


def validate(params: ProblemParams) -> list[ConstraintReport]:
    """Report every constraint with its numeric slack; violations are data."""
    p = params
    logX = math.log(p.X) if p.X > 1 else float("nan")
    logz = math.log(p.z) if p.z > 0 else float("nan")
    logD = math.log(p.D) if p.D > 0 else float("nan")
    ratio = p.delta / p.eta if p.eta else float("inf")
    checks = [
        ("xi + 3*delta < 12/25", 12 / 25 - (p.xi + 3 * p.delta), True),
        ("2 < delta/eta", ratio - 2.0, True),
        ("delta/eta < 3", 3.0 - ratio, True),
        ("mu < 1", 1.0 - p.mu, True),
        ("z^2 <= D", logD - 2 * logz, False),
        ("D <= z^3", 3 * logz - logD, False),
        ("xi < c", p.c - p.xi, True),
        ("D <= X", logX - logD, False),
        ("Delta <= X^(1-c)", (1 - p.c) - (math.log(p.Delta) / logX if p.Delta > 0 else float("-inf")), False),
    ]
    return [
        ConstraintReport(name, slack > 0 if strict else slack >= 0, slack)
        for name, slack, strict in checks
    ]
