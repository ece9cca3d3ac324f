import io
import math
import random
import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aptriples.errors import CapacityError, DomainError
from aptriples.sieve import (
    EULER_GAMMA,
    F_of,
    build_weights,
    divisor_lambda_sum,
    f_of,
    fundamental_inequality_check,
    lambda_of_chain,
    make_support,
    sieve_sums,
    vector_sieve_lower,
)


def _pair(z, D):
    sup = make_support(z, D)
    return (build_weights(sup, "lower"), build_weights(sup, "upper")), sup


def test_weights_z5_D56():
    (wl, wu), sup = _pair(5, 56)
    assert dict(wu.items()) == {1: 1, 3: -1}  # 3^3 = 27 <= 56
    assert dict(wl.items()) == {1: 1, 3: -1}


def test_weights_z5_D20_upper_excludes_3():
    (wl, wu), _ = _pair(5, 20)
    assert dict(wu.items()) == {1: 1}  # 27 > 20
    assert wl.value(3) == -1  # no cube condition at chain length 1 for lower


def test_lambda_one_is_plus_one():
    for z, D in [(5, 56), (30, 1000), (100, 100**2.5)]:
        (wl, wu), _ = _pair(z, D)
        assert wl.value(1) == 1
        assert wu.value(1) == 1


def test_weight_support_invariants():
    (wl, wu), sup = _pair(50, 50**2.95)
    qs = set(sup.odd_primes.tolist())
    for w in (wl, wu):
        for d, lam in w.items():
            assert lam in (-1, 1)
            assert d <= sup.D
            if d > 1:
                assert d % 2 == 1
                m, seen = d, set()
                for q in sorted(qs):
                    while m % q == 0:
                        assert q not in seen  # squarefree
                        seen.add(q)
                        m //= q
                assert m == 1  # divides P(z)
                assert lam == (-1) ** len(seen)


def test_entries_match_chain_predicate():
    (wl, wu), sup = _pair(30, 30**2.5)
    qs = sup.odd_primes.tolist()
    # every subset of support primes must agree with the stored table
    for mask in range(1 << len(qs)):
        chain = [qs[i] for i in range(len(qs)) if mask >> i & 1]
        d = math.prod(chain)
        for w, sign in ((wl, "lower"), (wu, "upper")):
            assert w.value(d) == lambda_of_chain(sorted(chain, reverse=True), sign, sup.D)


def test_fundamental_inequality_examples():
    (wl, wu), _ = _pair(5, 56)
    assert fundamental_inequality_check((wl, wu), 1) == (1, 1, 1)
    assert fundamental_inequality_check((wl, wu), 3) == (0, 0, 0)


def test_fundamental_inequality_exhaustive_small_z():
    for z in (20, 30):
        (wl, wu), sup = _pair(z, z**2.95)
        qs = sup.odd_primes.tolist()
        for mask in range(1 << len(qs)):
            n = math.prod(q for i, q in enumerate(qs) if mask >> i & 1)
            lo, mob, up = fundamental_inequality_check((wl, wu), n)
            assert lo <= mob <= up, (z, n)


def test_fundamental_inequality_random_products():
    rng = random.Random(0)
    (wl, wu), sup = _pair(100, 100**2.5)
    qs = sup.odd_primes.tolist()
    for _ in range(2000):
        k = rng.randint(0, 5)
        n = math.prod(rng.sample(qs, k)) if k else 1
        lo, mob, up = fundamental_inequality_check((wl, wu), n)
        assert lo <= mob <= up


def test_fundamental_inequality_rejects_foreign_prime():
    (wl, wu), _ = _pair(10, 200)
    with pytest.raises(DomainError):
        fundamental_inequality_check((wl, wu), 11 * 3)  # 11 >= z
    with pytest.raises(DomainError):
        fundamental_inequality_check((wl, wu), 9)  # not squarefree


def test_sieve_sums_z5():
    (wl, wu), sup = _pair(5, 56)
    s = sieve_sums((wl, wu), sup)
    assert s.N_plus == 0.5 and s.N_minus == 0.5
    assert s.B == 0.5


def test_sieve_sums_empty_support():
    (wl, wu), sup = _pair(3, 10)
    s = sieve_sums((wl, wu), sup)
    assert s.N_plus == 1.0 and s.N_minus == 1.0 and s.B == 1.0


def test_sieve_sums_exact_mode_matches_float():
    (wl, wu), sup = _pair(60, 60**2.95)
    exact = sieve_sums((wl, wu), sup, exact=True)
    fast = sieve_sums((wl, wu), sup, exact=False)
    assert fast.N_plus == pytest.approx(exact.N_plus, rel=1e-12)
    assert fast.N_minus == pytest.approx(exact.N_minus, rel=1e-12)
    assert fast.B == pytest.approx(exact.B, rel=1e-12)


def test_envelope_on_grid():
    # N- <= B <= N+ and the limit-function deviation with the stated decay
    worst = 0.0
    for z in (50, 100, 300, 1000):
        (wl, wu), sup = _pair(z, z**2.95)
        s = sieve_sums((wl, wu), sup)
        assert s.N_minus <= s.B <= s.N_plus
        dev = (math.log(sup.D)) ** (1 / 3)
        worst = max(
            worst,
            abs(s.N_plus / s.B - F_of(2.95)) * dev,
            abs(s.N_minus / s.B - f_of(2.95)) * dev,
        )
        assert 0.2 <= s.B * math.log(z) <= 5.0
        # the main-term sign survives at finite level: 3 N^- > 2 N^+
        assert 3 * s.N_minus - 2 * s.N_plus > 0
    assert worst <= 5.0


def test_limit_functions():
    assert f_of(2.0) == 0.0
    assert F_of(2.95) == pytest.approx(1.20750672, abs=5e-9)
    with mpmath.workdps(50):
        expect = float(
            (3 * mpmath.log(mpmath.mpf("1.95")) - 1) * 2 * mpmath.exp(mpmath.euler) / mpmath.mpf("2.95")
        )
    assert 3 * f_of(2.95) - F_of(2.95) == pytest.approx(expect, abs=1e-12)
    assert 3 * f_of(2.95) - F_of(2.95) == pytest.approx(1.21172, abs=1e-5)
    for bad in (1.9, 3.1):
        with pytest.raises(DomainError):
            F_of(bad)
        with pytest.raises(DomainError):
            f_of(bad)


def test_euler_gamma_literal():
    with mpmath.workdps(60):
        assert abs(float(mpmath.euler) - EULER_GAMMA) < 1e-16


def test_vector_sieve_examples():
    assert vector_sieve_lower((1, 1, 1), (1, 1, 1), (1, 1, 1)) == 1.0
    v = vector_sieve_lower((1, 1, 1), (-10, -10, -10), (1, 1, 1))
    assert v == -32.0
    assert v <= 1.0
    assert vector_sieve_lower((0, 1, 1), (0, 0, 0), (0, 2, 2)) == 0.0


def test_vector_sieve_printed_variant_fails():
    # the sign-asymmetric variant l1*u2*u3 + u1*l2*u3 + l1*u2*l3 - 2*u1*u2*u3
    # is NOT a lower bound: this counterexample pushes it above the product
    a, l, u = (1, 1, 1), (-10, -10, -10), (1, 1, 1)
    printed = l[0] * u[1] * u[2] + u[0] * l[1] * u[2] + l[0] * u[1] * l[2] - 2 * u[0] * u[1] * u[2]
    assert printed == 78
    assert printed > a[0] * a[1] * a[2]


def test_vector_sieve_domain_errors():
    with pytest.raises(DomainError):
        vector_sieve_lower((2, 1, 1), (0, 0, 0), (3, 3, 3))
    with pytest.raises(DomainError):
        vector_sieve_lower((1, 1, 1), (2, 0, 0), (3, 3, 3))


@settings(max_examples=500, deadline=None)
@given(
    st.tuples(*[st.integers(0, 1)] * 3),
    st.tuples(*[st.floats(0, 10)] * 3),
    st.tuples(*[st.floats(0, 10)] * 3),
)
def test_vector_sieve_lower_bound_property(a, dl, du):
    lower = tuple(ai - d for ai, d in zip(a, dl))
    upper = tuple(ai + d for ai, d in zip(a, du))
    rhs = vector_sieve_lower(a, lower, upper)
    assert rhs <= a[0] * a[1] * a[2] + 1e-9


def test_export_format():
    (wl, wu), _ = _pair(5, 56)
    buf = io.StringIO()
    wu.export(buf)
    assert buf.getvalue() == "1 +1\n3 -1\n"


def test_export_golden_files():
    import os

    (wl, wu), _ = _pair(30, 30**2.5)
    here = os.path.join(os.path.dirname(__file__), "data")
    for w, name in ((wu, "golden_weights_upper_z30.txt"), (wl, "golden_weights_lower_z30.txt")):
        buf = io.StringIO()
        w.export(buf)
        with open(os.path.join(here, name)) as fh:
            assert buf.getvalue() == fh.read()


def test_divisor_sum_via_fraction_identity():
    # sum over d | n of mu(d)/phi(d)-style: spot-check divisor_lambda_sum
    # against brute-force enumeration over subsets
    sup = make_support(40, 40**2.5)
    qs = sup.odd_primes.tolist()
    rng = random.Random(3)
    for _ in range(200):
        k = rng.randint(0, 4)
        chain = sorted(rng.sample(qs, k), reverse=True)
        for sign in ("lower", "upper"):
            brute = 0
            for mask in range(1 << k):
                sub = [chain[i] for i in range(k) if mask >> i & 1]
                brute += lambda_of_chain(sorted(sub, reverse=True), sign, sup.D)
            assert brute == divisor_lambda_sum(chain, sign, sup.D)


def test_build_weights_node_budget():
    sup = make_support(300, 300.0**3)
    with pytest.raises(CapacityError):
        build_weights(sup, "upper", node_budget=50)
