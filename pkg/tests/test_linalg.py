"""Lattice kernel: HNF/SNF against sympy, LLL against its own definition."""

from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form

from a4census import linalg
from a4census.arith import det_bareiss

mat3 = st.lists(
    st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3),
    min_size=3,
    max_size=4,
)


@given(mat3)
@settings(max_examples=80)
def test_hnf_spans_same_lattice(rows):
    h = linalg.hnf(rows, ncols=3)
    # every input row is in the HNF lattice
    for r in rows:
        if not any(r):
            continue
        assert _in_span(h, r)
    # every HNF row is an integer combination of input rows (mutual inclusion
    # via sympy's HNF of the same stack)
    nonzero = [r for r in rows if any(r)]
    if nonzero and len(h) == 3:
        ours = sympy.Matrix(h).det()
        theirs_rows = _sympy_row_hnf(nonzero)
        if len(theirs_rows) == 3:
            assert abs(ours) == abs(sympy.Matrix(theirs_rows).det())


def _sympy_row_hnf(rows):
    # sympy's hermite_normal_form works on columns; transpose twice
    m = sympy.Matrix(rows).T
    try:
        h = hermite_normal_form(m)
    except Exception:
        return []
    return [list(c) for c in h.T.tolist() if any(c)]


def _in_span(h, v):
    if not h:
        return not any(v)
    ncols = len(h[0])
    t = list(v)
    rows = {next(j for j, x in enumerate(r) if x): r for r in h}
    for col in range(ncols):
        if t[col] == 0:
            continue
        r = rows.get(col)
        if r is None or t[col] % r[col] != 0:
            return False
        q = t[col] // r[col]
        for j in range(col, ncols):
            t[j] -= q * r[j]
    return not any(t)


@given(mat3)
@settings(max_examples=60)
def test_hnf_is_canonical(rows):
    h = linalg.hnf(rows, ncols=3)
    assert linalg.lattice_eq(linalg.hnf(h, ncols=3), h)
    for i, r in enumerate(h):
        piv_col = next(j for j, x in enumerate(r) if x)
        assert r[piv_col] > 0
        for other in h[:i]:
            assert 0 <= other[piv_col] < r[piv_col]


def test_hnf_solve_roundtrip():
    h = linalg.hnf([[2, 1, 0], [0, 3, 1], [0, 0, 5]])
    target = [2 * 2 + 0, 2 * 1 + 3 * 3, 3 * 1 + 4 * 5]
    coeffs = linalg.hnf_solve(h, target)
    assert coeffs is not None
    rebuilt = [sum(c * h[i][j] for i, c in enumerate(coeffs)) for j in range(3)]
    assert rebuilt == target
    assert linalg.hnf_solve(h, [1, 0, 0]) is None


@given(mat3)
@settings(max_examples=60)
def test_smith_normal_form_matches_sympy(rows):
    divisors, u, v = linalg.smith_normal_form(rows)
    m = sympy.Matrix(rows)
    d = sympy.Matrix(u) * m * sympy.Matrix(v)
    # U A V is the diagonal the function reports
    for i in range(d.rows):
        for j in range(d.cols):
            assert d[i, j] == (divisors[min(i, j)] if i == j else 0)
    # unimodular transforms
    assert abs(sympy.Matrix(u).det()) == 1
    assert abs(sympy.Matrix(v).det()) == 1
    # divisibility chain
    nz = [x for x in divisors if x]
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    theirs = smith_normal_form(m)
    for i, x in enumerate(divisors):
        assert abs(theirs[i, i]) == abs(x)


# ---------------------------------------------------------------------------
# LLL on Gram matrices: verified against the definition, not an oracle.


def _rational_gso(gram):
    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    mu = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    for i in range(n):
        b[i] = g[i][i]
        for j in range(i):
            mu[i][j] = g[i][j]
            for k in range(j):
                mu[i][j] -= mu[i][k] * mu[j][k] * b[k]
            mu[i][j] /= b[j]
            b[i] -= mu[i][j] ** 2 * b[j]
    return mu, b


def _transformed_gram(gram, t):
    n = len(t)
    m = len(gram)
    rows = [[sum(t[i][a] * gram[a][b] for a in range(m)) for b in range(m)] for i in range(n)]
    return [[sum(rows[i][b] * t[j][b] for b in range(m)) for j in range(n)] for i in range(n)]


def _check_reduced(gram, t, delta=Fraction(3, 4)):
    assert abs(det_bareiss([list(r) for r in t])) == 1
    g2 = _transformed_gram(gram, t)
    mu, b = _rational_gso(g2)
    n = len(g2)
    for i in range(n):
        for j in range(i):
            assert abs(mu[i][j]) <= Fraction(1, 2)
    for k in range(1, n):
        assert b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1]


basis_strategy = st.integers(min_value=2, max_value=5).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(min_value=-40, max_value=40), min_size=n, max_size=n),
        min_size=n,
        max_size=n,
    ).filter(lambda rows: det_bareiss([list(r) for r in rows]) != 0)
)


@given(basis_strategy)
@settings(max_examples=80, deadline=None)
def test_lll_gram_produces_reduced_basis(rows):
    n = len(rows)
    gram = [[sum(rows[i][k] * rows[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
    t = linalg.lll_gram(gram)
    _check_reduced(gram, t)


@given(st.integers(min_value=5, max_value=10**5).filter(lambda v: v % 3 == 1))
@settings(max_examples=25, deadline=None)
def test_lll_gram_on_census_shaped_lattices(v):
    # lattices of the prime-ideal kind: (v^3, 0, ...) plus shifted rows
    r = v // 2
    rows = [
        [v**3, 0, 0, 0],
        [r, 1, 0, 0],
        [r * r % v**3, 0, 1, 0],
        [pow(r, 3, v**3), 0, 0, 1],
    ]
    gram = [[sum(a * b for a, b in zip(x, y)) for y in rows] for x in rows]
    t = linalg.lll_gram(gram)
    _check_reduced(gram, t)


def test_lll_gram_rejects_indefinite_forms():
    with pytest.raises(ValueError):
        linalg.lll_gram([[1, 0], [0, -1]])


def test_short_vectors_finds_the_minimum():
    rows = [[5, 1], [1, 4]]
    gram = [[sum(a * b for a, b in zip(x, y)) for y in rows] for x in rows]
    got = linalg.short_vectors(gram, 60)
    # brute force over a coefficient box, up to sign
    best = None
    for c1, c2 in product(range(-6, 7), repeat=2):
        if (c1, c2) == (0, 0):
            continue
        val = sum((c1 * rows[0][k] + c2 * rows[1][k]) ** 2 for k in range(2))
        if best is None or val < best:
            best = val
    vals = []
    for val, c in got:
        direct = sum(c[a] * gram[a][b] * c[b] for a in range(2) for b in range(2))
        assert val == direct
        vals.append(val)
    assert vals == sorted(vals)
    assert vals[0] == best


def test_rref_mod_p_and_residual():
    rows = [[1, 2, 0, 1], [0, 1, 1, 1], [1, 0, 1, 2]]
    rref, pivots = linalg.rref_mod_p(rows, 4, 3)
    for r in rref:
        assert any(r)
    # residual vanishes exactly on the row span
    span = set()
    for a in range(3):
        for b in range(3):
            for c in range(3):
                vec = tuple(
                    (a * rows[0][j] + b * rows[1][j] + c * rows[2][j]) % 3 for j in range(4)
                )
                span.add(vec)
    for vec in product(range(3), repeat=4):
        res = linalg.residual_mod_p(rref, pivots, list(vec), 3)
        assert (not any(res)) == (tuple(vec) in span)


def test_kernel_mod_p():
    rows = [[1, 1, 1], [2, 2, 2]]
    basis = linalg.kernel_mod_p(rows, 3, 3)
    assert len(basis) == 2
    for k in basis:
        for r in rows:
            assert sum(a * b for a, b in zip(k, r)) % 3 == 0
