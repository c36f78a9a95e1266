"""Small exact linear algebra: lattices over Z, spaces over F_p and Q.

Matrices are lists (or tuples) of rows.  Everything is sized for number
fields of degree <= 4 and factor bases of a few dozen primes, so the
algorithms favour exactness and clarity over asymptotics.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import det_bareiss

__all__ = [
    "hnf",
    "hnf_solve",
    "in_lattice",
    "lattice_eq",
    "lattice_index",
    "inverse_rational",
    "solve_rational",
    "kernel_mod_p",
    "rref_mod_p",
    "rank_mod_p",
    "residual_mod_p",
    "smith_normal_form",
    "lll_gram",
    "short_vectors",
    "gram_matrix",
]


def hnf(rows, ncols=None):
    """Row-style Hermite normal form of the lattice spanned by `rows`.

    Returns the list of nonzero HNF rows (upper triangular by pivot
    column, positive pivots, entries above a pivot reduced into [0, pivot)).
    Full-rank square input lattices give a square result.
    """
    work = [list(r) for r in rows if any(r)]
    if ncols is None:
        ncols = len(work[0]) if work else 0
    out = []
    col = 0
    while col < ncols and work:
        # gcd-reduce all rows with a nonzero entry in this column
        while True:
            live = [r for r in work if r[col] != 0]
            if len(live) <= 1:
                break
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            for r in live[1:]:
                q = r[col] // piv[col]
                for j in range(col, ncols):
                    r[j] -= q * piv[j]
        piv = None
        for r in work:
            if r[col] != 0:
                piv = r
                break
        if piv is not None:
            work = [r for r in work if r is not piv and any(r)]
            if piv[col] < 0:
                piv = [-a for a in piv]
            out.append(piv)
        col += 1
    # reduce entries above each pivot, left to right so each reduction
    # only touches columns whose pivots are not yet processed
    for i in range(len(out)):
        pcol = next(j for j in range(ncols) if out[i][j] != 0)
        for k in range(i):
            q = out[k][pcol] // out[i][pcol]
            if q:
                for j in range(pcol, ncols):
                    out[k][j] -= q * out[i][j]
    return [tuple(r) for r in out]


def hnf_solve(h, target):
    """Integer coordinates of `target` over square full-rank HNF rows, or None."""
    n = len(h)
    t = list(target)
    coeffs = [0] * n
    # Row i is the only remaining row with a nonzero entry in column i,
    # so forward substitution peels coordinates off left to right.
    for i in range(n):
        piv = h[i][i]
        if t[i] % piv != 0:
            return None
        c = t[i] // piv
        coeffs[i] = c
        if c:
            for j in range(i, n):
                t[j] -= c * h[i][j]
    if any(t):
        return None
    return coeffs


def in_lattice(h, v) -> bool:
    return hnf_solve(h, v) is not None


def lattice_eq(h1, h2) -> bool:
    return [tuple(r) for r in h1] == [tuple(r) for r in h2]


def lattice_index(h) -> int:
    """Index [Z^n : L] for a square full-rank HNF basis of L."""
    out = 1
    for i, row in enumerate(h):
        out *= row[i]
    return out


def inverse_rational(mat):
    """Exact inverse of a square matrix with int or Fraction entries."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def solve_rational(mat, rhs):
    """Solve mat^T-free row convention: x * mat = rhs, both rows of rationals."""
    inv = inverse_rational(mat)
    return [sum(Fraction(rhs[k]) * inv[k][j] for k in range(len(rhs))) for j in range(len(rhs))]


def kernel_mod_p(rows, ncols, p):
    """Basis of {x in F_p^ncols : sum_j rows[i][j] * x[j] = 0 for all i}.

    Each row is one homogeneous equation.
    """
    red, pivots = rref_mod_p(rows, ncols, p)
    basis = []
    free = [j for j in range(ncols) if j not in pivots]
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for i, pcol in enumerate(pivots):
            v[pcol] = (-red[i][fcol]) % p
        basis.append(tuple(v))
    return basis


def rref_mod_p(rows, ncols, p):
    """Reduced row echelon form over F_p; returns (rows, pivot columns)."""
    work = [[x % p for x in r] for r in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = pow(work[rank][col], -1, p)
        work[rank] = [x * inv % p for x in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                f = work[r][col]
                work[r] = [(a - f * b) % p for a, b in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    return [tuple(r) for r in work[:rank]], pivots


def rank_mod_p(rows, ncols, p) -> int:
    return len(rref_mod_p(rows, ncols, p)[0])


def residual_mod_p(rref_rows, pivots, vec, p):
    """Reduce `vec` against an RREF row space; zero residual = containment."""
    v = [x % p for x in vec]
    for row, col in zip(rref_rows, pivots):
        if v[col]:
            f = v[col]
            v = [(a - f * b) % p for a, b in zip(v, row)]
    return tuple(v)


def smith_normal_form(mat, nrows=None, ncols=None):
    """Smith normal form D = U*A*V with unimodular U, V.

    Returns (divisors, U, V) where `divisors` is the full diagonal of D
    (zeros included), U is nrows x nrows and V is ncols x ncols.
    """
    a = [list(r) for r in mat]
    m = nrows if nrows is not None else len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    while len(a) < m:
        a.append([0] * n)
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in a:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(m, n):
        # find smallest nonzero pivot in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
        # divisibility fix-up: pivot must divide the rest of the block
        piv = a[t][t]
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % piv:
                    row_op(t, i, -1)
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        if piv < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    divisors = [a[i][i] for i in range(min(m, n))]
    return divisors, u, v


# ---------------------------------------------------------------------------
# Lattice reduction on an exact Gram matrix.


def lll_gram(gram, delta=Fraction(3, 4)):
    """LLL-reduce a basis known only through its Gram matrix.

    Returns the unimodular transform rows T, so the reduced basis is
    T applied to the original one and its Gram matrix is T G T^t.
    The form must be positive definite.

    All-integer variant: instead of rational Gram-Schmidt data it
    carries d[i] (the leading i x i Gram determinants) and the scaled
    coefficients lam[i][j] = mu_ij * d[j+1], in which every division
    below is exact.
    """
    n = len(gram)
    if n == 0:
        return []
    dn, dd = delta.numerator, delta.denominator
    b = [[int(x) for x in row] for row in gram]  # Gram of the current basis
    h = [[int(i == j) for j in range(n)] for i in range(n)]
    lam = [[0] * n for _ in range(n)]
    d = [1] * (n + 1)

    def set_gso(k):
        for j in range(k + 1):
            u = b[k][j]
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            elif u > 0:
                d[k + 1] = u
            else:
                raise ValueError("gram matrix is not positive definite")

    def red(k, l):
        if 2 * abs(lam[k][l]) <= d[l + 1]:
            return
        q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
        hk, hl = h[k], h[l]
        for j in range(n):
            hk[j] -= q * hl[j]
        bk, bl = b[k], b[l]
        for j in range(n):
            bk[j] -= q * bl[j]
        for row in b:
            row[k] -= q * row[l]
        lam[k][l] -= q * d[l + 1]
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    set_gso(0)
    k_max = 0
    k = 1
    while k < n:
        if k > k_max:
            k_max = k
            set_gso(k)
        red(k, k - 1)
        if dd * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) >= dn * d[k] ** 2:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
        else:
            h[k], h[k - 1] = h[k - 1], h[k]
            b[k], b[k - 1] = b[k - 1], b[k]
            for row in b:
                row[k], row[k - 1] = row[k - 1], row[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            lam_ = lam[k][k - 1]
            newd = (d[k - 1] * d[k + 1] + lam_ * lam_) // d[k]
            for i in range(k + 1, k_max + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_ * t) // d[k]
                lam[i][k - 1] = (newd * t + lam_ * lam[i][k]) // d[k + 1]
            d[k] = newd
            k = max(k - 1, 1)
    return [tuple(r) for r in h]


def gram_matrix(rows, form):
    """Gram matrix of `rows` under the symmetric bilinear `form` matrix."""
    n = len(rows)
    m = len(form)
    out = []
    for i in range(n):
        tmp = [sum(rows[i][a] * form[a][b] for a in range(m)) for b in range(m)]
        out.append([sum(tmp[b] * rows[j][b] for b in range(m)) for j in range(n)])
    return out


def short_vectors(gram, bound, limit=100000):
    """Nonzero coefficient vectors c (up to sign) with c G c^t <= bound.

    Exact Fincke-Pohst enumeration using the Gram-Schmidt data of `gram`.
    Results are sorted by quadratic-form value.  Raises RuntimeError if
    more than `limit` vectors would be produced.
    """
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
        if b[i] <= 0:
            raise ValueError("form is not positive definite")
    bound = Fraction(bound)
    out = []
    c = [0] * n

    def recurse(i, remaining):
        if len(out) > limit:
            raise RuntimeError("short-vector enumeration overflow")
        if i < 0:
            if any(c):
                out.append((bound - remaining, tuple(c)))
            return
        center = -sum(mu[j][i] * c[j] for j in range(i + 1, n))
        if remaining < 0:
            return
        # integer range around the real center with (x - center)^2 * b_i <= remaining
        half = _frac_sqrt_ceil(remaining / b[i])
        x = math.ceil(center - half)
        hi = center + half
        while x <= hi:
            d = x - center
            used = d * d * b[i]
            if used <= remaining:
                c[i] = x
                recurse(i - 1, remaining - used)
            x += 1
        c[i] = 0

    recurse(n - 1, bound)
    seen = set()
    uniq = []
    for val, vec in sorted(out):
        canon = vec if _first_nonzero_positive(vec) else tuple(-x for x in vec)
        if canon not in seen:
            seen.add(canon)
            uniq.append((val, canon))
    return uniq


def _first_nonzero_positive(vec) -> bool:
    for x in vec:
        if x:
            return x > 0
    return True


def _frac_sqrt_ceil(fr: Fraction) -> Fraction:
    """A rational upper bound for sqrt(fr), tight enough for enumeration."""
    if fr <= 0:
        return Fraction(0)
    num, den = fr.numerator, fr.denominator
    # ceil(sqrt(num/den)) <= ceil(sqrt(num*den))/den
    r = math.isqrt(num * den)
    if r * r < num * den:
        r += 1
    return Fraction(r, den)
