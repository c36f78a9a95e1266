"""Class groups and unit groups of the census fields, at desk scale.

Factor bases below the Minkowski bound hold at most a few dozen primes
for the discriminants in range (<= 10^8), so the class group comes from
exact relation collection: short-vector enumeration inside each
factor-base prime gives smooth principal ideals, Smith reduction of the
relation lattice gives the elementary divisors, and the run is accepted
only once adding half again as many fresh relations leaves the Smith
form unchanged.  Generators of every relation are kept, because the ray
class construction reuses them as principal-ideal input.

Units are a byproduct (norm +-1 elements and quotients of elements
generating the same ideal); they are certified multiplicatively
independent through the logarithmic embedding but not certified
fundamental.  Downstream 3-quotients only need the unit lattice to be
3-saturated, which exact_cube_root / saturate_units_at_3 provide.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import mpmath

from . import arith, linalg
from .fields import (
    FieldError,
    NumberField,
    PrimeIdeal,
    element_valuation,
    factor_rational_prime,
    ideal_contains,
    ideal_mul,
    ideal_norm,
    minkowski_bound,
)

__all__ = [
    "ClassGroupData",
    "UnitData",
    "class_group",
    "two_rank",
    "ideal_class_coordinates",
    "unit_group",
    "el_div_exact",
    "exact_cube_root",
    "saturate_units_at_3",
]


@dataclass(frozen=True)
class ClassGroupData:
    field: NumberField
    factor_base: tuple  # PrimeIdeal, sorted by (p, f, e, hnf)
    divisors: tuple  # nontrivial elementary divisors (> 1)
    h: int
    coord_rows: tuple  # row j = class coordinates of factor_base[j]
    relations: tuple  # (generator coords, valuation vector over factor_base)
    unit_candidates: tuple


@dataclass(frozen=True)
class UnitData:
    fundamental_units: tuple
    regulator_estimate: float
    rank: int


# ---------------------------------------------------------------------------
# Factor base and smoothness.


class _FBContext:
    def __init__(self, K: NumberField, bound: int):
        self.K = K
        self.bound = bound
        self.rational_primes = arith.primes_upto(bound) if bound >= 2 else []
        self.above = {}
        fb = []
        for p in self.rational_primes:
            pr = factor_rational_prime(K, p)
            self.above[p] = pr
            fb.extend(P for P in pr if P.norm <= bound)
        fb.sort(key=lambda P: (P.p, P.f, P.e, P.hnf))
        self.fb = fb
        self.index = {P.key(): i for i, P in enumerate(fb)}

    def relation_of(self, alpha):
        """Valuation vector of (alpha) over the factor base, or None.

        None means (alpha) is divisible by a prime outside the base.
        """
        K = self.K
        N = abs(K.el_norm(alpha))
        if N == 0:
            return None
        fac = {}
        rem = N
        for p in self.rational_primes:
            while rem % p == 0:
                fac[p] = fac.get(p, 0) + 1
                rem //= p
        if rem != 1:
            return None
        vec = [0] * len(self.fb)
        for p, ep in fac.items():
            got = 0
            for P in self.above[p]:
                v = element_valuation(K, alpha, P)
                if v:
                    idx = self.index.get(P.key())
                    if idx is None:
                        return None
                    vec[idx] = v
                    got += v * P.f
            assert got == ep, "norm factorization does not match valuations"
        return tuple(vec)


def _short_elements(K: NumberField, lattice_rows, bound, limit=20000):
    """(value, element coords) for lattice elements with trace form <= bound."""
    gram = linalg.gram_matrix(lattice_rows, K.trace_gram)
    T = linalg.lll_gram(gram)
    red = [
        tuple(sum(T[i][k] * lattice_rows[k][j] for k in range(len(lattice_rows))) for j in range(K.degree))
        for i in range(len(lattice_rows))
    ]
    red_gram = linalg.gram_matrix(red, K.trace_gram)
    out = []
    for val, c in linalg.short_vectors(red_gram, bound, limit):
        el = tuple(sum(c[i] * red[i][j] for i in range(len(red))) for j in range(K.degree))
        out.append((val, el))
    return out


def _start_bound(K: NumberField, covol_sq) -> int:
    # Minkowski: the lattice minimum of the trace form is at most
    # n * (covolume)^(2/n); covol_sq = disc * norm^2 for an ideal lattice.
    n = K.degree
    root = int(round(covol_sq ** (1.0 / n))) + 1
    return 2 * n * max(root, 1)


# ---------------------------------------------------------------------------
# Class group.


def class_group(K: NumberField, max_rounds: int = 8) -> ClassGroupData:
    """Class group by relation collection and Smith reduction.

    Deterministic: enumeration is in trace-form order, ties broken by the
    canonical sign convention of the enumerator.  Accepts only after the
    Smith form survives a top-up of 50% fresh relations.
    """
    if K.disc > 10**8:
        raise FieldError("discriminant above desk scale (10^8)")
    mb = minkowski_bound(K)
    ctx = _FBContext(K, mb)
    fb = ctx.fb
    nfb = len(fb)
    unit_cands = []
    if nfb == 0:
        return ClassGroupData(K, (), (), 1, (), (), ())

    rel_vecs = {}
    relations = []

    def add_relation(gen, vec):
        if not any(vec):
            if abs(K.el_norm(gen)) == 1 and gen != K.one() and gen != tuple(-x for x in K.one()):
                unit_cands.append(gen)
            return False
        if vec in rel_vecs:
            other = rel_vecs[vec]
            q = el_div_exact(K, gen, other)
            if q is not None and abs(K.el_norm(q)) == 1 and q != K.one():
                unit_cands.append(q)
            return False
        rel_vecs[vec] = gen
        relations.append((gen, vec))
        return True

    # free relations: rational primes whose primes all sit in the base
    for p in ctx.rational_primes:
        pr = ctx.above[p]
        if all(P.norm <= mb for P in pr):
            vec = [0] * nfb
            for P in pr:
                vec[ctx.index[P.key()]] = P.e
            add_relation(K.from_int(p), tuple(vec))

    ring_rows = [tuple(int(i == j) for j in range(K.degree)) for i in range(K.degree)]
    sources = [(ring_rows, K.disc)] + [(list(P.hnf), K.disc * P.norm * P.norm) for P in fb]
    source_bounds = [_start_bound(K, cs) for _, cs in sources]
    source_done = [0] * len(sources)  # value threshold already processed

    source_active = [True] * len(sources)

    def harvest(target_new: int) -> int:
        got = 0
        for _ in range(6):
            for si, (rows, _) in enumerate(sources):
                if got >= target_new:
                    return got
                if not source_active[si]:
                    continue
                lo = source_done[si]
                hi = source_bounds[si]
                try:
                    batch = _short_elements(K, rows, hi)
                except RuntimeError:
                    source_active[si] = False  # enumeration too dense to push deeper
                    continue
                for val, el in batch:
                    if val <= lo:
                        continue
                    vec = ctx.relation_of(el)
                    if vec is not None and add_relation(el, vec):
                        got += 1
                source_done[si] = hi
                source_bounds[si] = hi * 2
        return got

    harvest(max(2 * nfb, nfb + 6))

    snapshot = None
    for _ in range(max_rounds):
        mat = [list(vec) for _, vec in relations]
        divisors, _, V = linalg.smith_normal_form(mat, max(len(mat), nfb), nfb)
        divisors = list(divisors[:nfb])
        if len(divisors) < nfb or any(d == 0 for d in divisors):
            if harvest(max(4, nfb // 2)) == 0:
                raise FieldError("relation search exhausted before the class group closed; data unusable")
            continue
        if snapshot == divisors:
            h = 1
            for d in divisors:
                h *= d
            keep = [i for i, d in enumerate(divisors) if d > 1]
            coord_rows = tuple(tuple(V[j][i] % divisors[i] for i in keep) for j in range(nfb))
            return ClassGroupData(
                field=K,
                factor_base=tuple(fb),
                divisors=tuple(divisors[i] for i in keep),
                h=h,
                coord_rows=coord_rows,
                relations=tuple(relations),
                unit_candidates=tuple(unit_cands),
            )
        snapshot = divisors
        harvest(max(4, math.ceil(len(relations) / 2)))
    raise FieldError("class group did not stabilize; relation data unusable")


def two_rank(cg: ClassGroupData) -> int:
    return sum(1 for d in cg.divisors if d % 2 == 0)


def _class_coords_of_vec(cg: ClassGroupData, vec):
    r = len(cg.divisors)
    out = [0] * r
    for j, v in enumerate(vec):
        if v:
            row = cg.coord_rows[j]
            for i in range(r):
                out[i] += v * row[i]
    return tuple(x % d for x, d in zip(out, cg.divisors))


def ideal_class_coordinates(A, cg: ClassGroupData):
    """Coordinates of [A] over the elementary divisors; zero iff principal."""
    K = cg.field
    if not cg.divisors:
        return ()
    ctx = getattr(cg, "_ctx", None)
    if ctx is None:
        ctx = _FBContext(K, minkowski_bound(K))
        object.__setattr__(cg, "_ctx", ctx)
    rng = random.Random(K.disc)
    trial = [tuple(r) for r in A]
    shift = [0] * len(cg.factor_base)
    for attempt in range(6):
        coords = _smooth_cofactor_coords(K, trial, ctx, cg)
        if coords is not None:
            base = [(-c) % d for c, d in zip(coords, cg.divisors)]
            adj = _class_coords_of_vec(cg, shift)
            return tuple((b - a) % d for b, a, d in zip(base, adj, cg.divisors))
        j = rng.randrange(len(cg.factor_base))
        shift[j] += 1
        trial = ideal_mul(K, trial, list(cg.factor_base[j].hnf))
    raise FieldError("ideal not expressible over the factor base after randomization")


def _smooth_cofactor_coords(K, A, ctx, cg):
    """Class coordinates of the cofactor (alpha)/A for a short alpha in A."""
    nA = ideal_norm(A)
    bound = _start_bound(K, K.disc * nA * nA)
    val_A = {}
    for _ in range(5):
        for _sv, el in _short_elements(K, [tuple(r) for r in A], bound):
            total, rem = divmod(abs(K.el_norm(el)), nA)
            assert rem == 0
            fac = {}
            t = total
            for p in ctx.rational_primes:
                while t % p == 0:
                    fac[p] = fac.get(p, 0) + 1
                    t //= p
            if t != 1:
                continue
            vec = [0] * len(ctx.fb)
            ok = True
            for p in fac:
                for P in ctx.above[p]:
                    if P.key() not in val_A:
                        val_A[P.key()] = _ideal_valuation(K, A, P)
                    v = element_valuation(K, el, P) - val_A[P.key()]
                    assert v >= 0
                    if v:
                        idx = ctx.index.get(P.key())
                        if idx is None:
                            ok = False
                            break
                        vec[idx] = v
                if not ok:
                    break
            if ok:
                covered = 1
                for P, v in zip(ctx.fb, vec):
                    covered *= P.norm**v
                if covered == total:
                    return _class_coords_of_vec(cg, tuple(vec))
        bound *= 2
    return None


def _ideal_valuation(K, A, P: PrimeIdeal, cap=64) -> int:
    v = 0
    power = [tuple(r) for r in P.hnf]
    while v < cap:
        if not ideal_contains(power, A):
            return v
        v += 1
        power = ideal_mul(K, power, list(P.hnf))
    raise ArithmeticError("ideal valuation cap exceeded")


# ---------------------------------------------------------------------------
# Exact element division and units.


def el_div_exact(K: NumberField, a, b):
    """a / b when the quotient lies in the maximal order, else None."""
    if not any(b):
        raise ZeroDivisionError
    M = K.mul_matrix(b)
    try:
        x = linalg.solve_rational(M, list(a))
    except ZeroDivisionError:
        return None
    if any(f.denominator != 1 for f in x):
        return None
    return tuple(int(f) for f in x)


def _gram_det(rows):
    if not rows:
        return mpmath.mpf(1)
    n = len(rows)
    g = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            g[i, j] = mpmath.fsum(a * b for a, b in zip(rows[i], rows[j]))
    return mpmath.det(g)


def unit_group(K: NumberField, seed_candidates=(), max_rounds: int = 7) -> UnitData:
    """Rank degree-1 independent units by bounded search.

    Candidates are norm +-1 elements in trace-form order (plus any seeds,
    e.g. class-group byproducts); a candidate joins the basis when it
    raises the rank of the log-embedding lattice, certified by the Gram
    determinant staying above the numerical noise floor.
    """
    n = K.degree
    rank = n - 1
    found = []
    found_rows = []
    digits = 60
    noise = mpmath.mpf(10) ** (-25)
    roots = K.embeddings(digits)

    def consider(u):
        if abs(K.el_norm(u)) != 1:
            return
        if len(found) >= rank:
            return
        with mpmath.workdps(digits):
            vals = K.embed_element(u, roots)
            row = [mpmath.log(abs(v)) for v in vals]
            if _gram_det(found_rows + [row]) > noise:
                found.append(tuple(u))
                found_rows.append(row)

    for u in seed_candidates:
        consider(u)
    ring_rows = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    bound = _start_bound(K, K.disc)
    done = 0
    for _ in range(max_rounds):
        if len(found) >= rank:
            break
        for val, el in _short_elements(K, ring_rows, bound, limit=120000):
            if val <= done:
                continue
            consider(el)
            if len(found) >= rank:
                break
        done, bound = bound, bound * 2
    if len(found) < rank:
        raise FieldError(
            f"found {len(found)} of {rank} independent units within search bounds; "
            "supply units explicitly in the conductor config"
        )
    with mpmath.workdps(digits):
        reg = abs(mpmath.det(mpmath.matrix([r[:rank] for r in found_rows])))
    return UnitData(fundamental_units=tuple(found), regulator_estimate=float(reg), rank=rank)


def exact_cube_root(K: NumberField, u):
    """y with y^3 = u in the maximal order, or None.  Exactly verified."""
    digits = 80
    with mpmath.workdps(digits):
        roots = K.embeddings(digits)
        vals = K.embed_element(u, roots)
        # real cube root; mpmath.cbrt would pick the complex principal root
        targets = [mpmath.sign(v) * mpmath.cbrt(abs(v)) for v in vals]
        basis = mpmath.matrix(K.degree, K.degree)
        for r_i, r in enumerate(roots):
            for b_i in range(K.degree):
                basis[r_i, b_i] = (
                    mpmath.fsum(K.basis_num[b_i][j] * r**j for j in range(K.degree)) / K.basis_den
                )
        try:
            sol = mpmath.lu_solve(basis, mpmath.matrix(targets))
        except ZeroDivisionError:
            return None
        cand = tuple(int(mpmath.nint(x)) for x in sol)
    if K.el_pow(cand, 3) == tuple(u):
        return cand
    return None


_SATURATION_MEMO: dict = {}


def saturate_units_at_3(K: NumberField, units):
    """3-saturate the unit lattice: while some product of the generators
    (exponents in {0,1,2}, leading exponent 1) is a cube in the order,
    swap the cube root in.  Returns (units, number of swaps).

    Memoized on (field, units): ray-class presentations re-saturate the
    same generators for every auxiliary prime.
    """
    memo_key = (K.poly, tuple(tuple(u) for u in units))
    hit = _SATURATION_MEMO.get(memo_key)
    if hit is not None:
        return hit
    units = [tuple(u) for u in units]
    swaps = 0
    for _ in range(24):
        hit = None
        for exps in _leading_one_vectors(len(units)):
            w = K.one()
            for u, e in zip(units, exps):
                for _ in range(e):
                    w = K.el_mul(w, u)
            y = exact_cube_root(K, w)
            if y is not None:
                hit = (exps, y)
                break
        if hit is None:
            out = (tuple(units), swaps)
            _SATURATION_MEMO[memo_key] = out
            return out
        exps, y = hit
        j = next(i for i, e in enumerate(exps) if e)  # leading exponent is 1
        units[j] = y
        swaps += 1
    raise FieldError("unit saturation at 3 did not terminate")


def _leading_one_vectors(r):
    """Exponent vectors in {0,1,2}^r with first nonzero entry 1."""
    for lead in range(r):
        tail = r - lead - 1
        for rest in range(3**tail):
            v = [0] * lead + [1]
            x = rest
            for _ in range(tail):
                v.append(x % 3)
                x //= 3
            yield tuple(v)
