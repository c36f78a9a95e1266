"""Integer and polynomial arithmetic against sympy oracles."""

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from a4census import arith


def test_primes_upto_matches_sympy():
    assert arith.primes_upto(10**4) == list(sympy.primerange(2, 10**4 + 1))


def test_primes_upto_is_inclusive():
    assert arith.primes_upto(13)[-1] == 13
    assert arith.primes_upto(1) == []


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=5000))
@settings(max_examples=40)
def test_primes_in_range_agrees_with_sieve(lo, width):
    hi = lo + width
    assert arith.primes_in_range(lo, hi) == list(sympy.primerange(max(lo, 2), hi))


# strong-pseudoprime stress values: Carmichael numbers and Miller-Rabin
# worst cases for small bases
_HARD = [561, 1105, 1729, 25326001, 3215031751, 3474749660383, 2152302898747]


@pytest.mark.parametrize("n", _HARD)
def test_is_prime_on_pseudoprimes(n):
    assert arith.is_prime(n) == sympy.isprime(n)


@given(st.integers(min_value=2, max_value=10**9))
@settings(max_examples=150)
def test_is_prime_matches_sympy(n):
    assert arith.is_prime(n) == sympy.isprime(n)


@given(st.integers(min_value=2, max_value=10**7))
@settings(max_examples=60)
def test_factorize_recombines(n):
    fac = arith.factorize(n)
    prod = 1
    for p, e in fac.items():
        assert sympy.isprime(p)
        prod *= p**e
    assert prod == n


def test_factorize_rejects_hard_composites():
    # two primes above the trial bound
    n = (10**9 + 7) * (10**9 + 9)
    with pytest.raises(ArithmeticError):
        arith.factorize(n, bound=10**5)


def test_valuation():
    assert arith.valuation(2**5 * 9, 2) == 5
    assert arith.valuation(7, 5) == 0


def test_cornacchia_representation():
    for ell in (7, 13, 163, 277, 349, 547, 607):
        a, b = arith.cornacchia_4l(ell)
        assert a * a + 27 * b * b == 4 * ell
        assert a % 3 == 1


# ---------------------------------------------------------------------------
# Polynomials mod p.


def _sym_poly(f, p):
    x = sympy.symbols("x")
    return sympy.Poly(list(reversed(f)) or [0], x, modulus=p)


small_prime = st.sampled_from([2, 3, 5, 7, 11, 13])
coeffs = st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=7)


@given(coeffs, coeffs, small_prime)
@settings(max_examples=60)
def test_pm_mul_matches_sympy(f, g, p):
    ours = arith.pm_mul(tuple(f), tuple(g), p)
    theirs = _sym_poly(f, p) * _sym_poly(g, p)
    assert _sym_poly(ours, p) == theirs


@given(coeffs, coeffs, small_prime)
@settings(max_examples=60)
def test_pm_gcd_matches_sympy(f, g, p):
    ours = arith.pm_gcd(tuple(f), tuple(g), p)
    theirs = _sym_poly(f, p).gcd(_sym_poly(g, p))
    if arith.poly_deg(ours) < 0:
        assert theirs.is_zero
    else:
        assert _sym_poly(ours, p).monic() == theirs.monic()


@given(coeffs, small_prime)
@settings(max_examples=50)
def test_factor_poly_mod_p_recombines(f, p):
    f = tuple(f)
    if arith.poly_deg(arith.pm_reduce(f, p)) < 1:
        return
    factors = arith.factor_poly_mod_p(f, p)
    prod = (1,)
    for g, e in factors:
        x = sympy.symbols("x")
        assert _sym_poly(g, p).is_irreducible
        for _ in range(e):
            prod = arith.pm_mul(prod, g, p)
    lead = arith.pm_reduce(f, p)[-1]
    assert _sym_poly(arith.pm_mul(prod, (lead,), p), p) == _sym_poly(f, p)


def test_distinct_roots_mod_p():
    # x^2 - 1 mod 7 has roots 1 and 6
    assert sorted(arith.distinct_roots_mod_p((-1, 0, 1), 7)) == [1, 6]


monic_int = st.lists(st.integers(min_value=-30, max_value=30), min_size=2, max_size=4).map(
    lambda c: tuple(c) + (1,)
)


@given(monic_int)
@settings(max_examples=60)
def test_poly_discriminant_matches_sympy(f):
    x = sympy.symbols("x")
    expr = sum(c * x**i for i, c in enumerate(f))
    assert arith.poly_discriminant(f) == sympy.discriminant(expr, x)


@given(st.lists(st.lists(st.integers(min_value=-9, max_value=9), min_size=3, max_size=3), min_size=3, max_size=3))
@settings(max_examples=60)
def test_det_bareiss_matches_sympy(rows):
    assert arith.det_bareiss([list(r) for r in rows]) == sympy.Matrix(rows).det()
