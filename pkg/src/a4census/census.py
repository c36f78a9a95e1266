"""Census of auxiliary primes against the quartic deformation datum.

For a conductor ell the datum is the pair (L, F): the cyclic cubic
field of conductor ell inside Q(zeta_ell), and a totally real quartic
A4-field F of discriminant ell^2.  An auxiliary prime v != ell counts
when v = 1 mod 3 and Frobenius at v acts on the roots of F with cycle
type (3,1), so v splits in F as v1 * v2 with residue degrees 3 and 1.
That is the set C^(3); its members are then sorted by two mod-3 ray
class conditions on the degree-3 prime v1:

  * v lies in C^(tau-bar) when v1 becomes trivial in the fixed quotient
    Cl_{3_1^2 ell_2} (x) F_3, the Galois group of the cubic governing
    extension ramified at 3 and ell only;
  * v lies in C^(Lambda) when v1 stays nontrivial in the moving
    quotient Cl_{3_1^2 v_2} (x) F_3, a level-raising obstruction group
    recomputed for every v.

Here 3_1 is the residue-degree-3 prime of F over 3 and ell_2 the
ramified prime over ell (ell factors as ell_1 * ell_2^3).  Taking the
ramified prime is essential: the compositum of F with the cyclic cubic
resolvent field is a cubic extension of F ramified at ell_1 alone, and
any modulus admitting ell_1 would pick up that base change, in which
every degree-3 prime v1 splits for trivial reasons.  Two classifiers implement the same
contract: classify_prime builds the moving ray class group from
scratch (the reference path), fast_classify replaces factor-base
columns by principality certificates Q^m = (gamma), which is valid
because the class number of F is prime to 3.  Both are deterministic;
the census output is byte-identical for any worker count because work
is split into fixed chunks and merged in order.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import arith, linalg
from .arith import factorize, pm_gcd, pm_pow_xn, pm_sub, poly_deg, primes_in_range
from .classgroup import (
    ClassGroupData,
    UnitData,
    _short_elements,
    _start_bound,
    class_group,
    ideal_class_coordinates,
    saturate_units_at_3,
    two_rank,
    unit_group,
)
from .config import TABLE_CHECKPOINTS, Config, cache_read, cache_write, shipped_config
from .fields import (
    FieldError,
    NumberField,
    PrimeIdeal,
    _poly_at_theta,
    cubic_subfield,
    factor_rational_prime,
    field_from_record,
    field_to_record,
    ideal_from_elements,
    ideal_norm,
    ideal_pow,
    element_valuation,
    new_number_field,
    quartic_field_search,
    quartic_galois_tag,
    shanks_param,
    splitting_pattern,
)
from .rayclass import (
    Modulus,
    RayClass3Quotient,
    TameBlock,
    artin_vector,
    modulus_stability_check,
    ray_class_3_quotient,
)

log = logging.getLogger(__name__)

CHUNK = 1000  # primes are counted in fixed blocks so merges are order-stable

# cofactor primes in smooth splittings stay at desk scale
_COFACTOR_PRIME_BOUND = 10**6


class VerificationError(FieldError):
    """A conductor datum failed one of the load-time checks.

    `check` is a stable tag naming the failed verification, so callers
    can tell a wrong discriminant from, say, a failed stability test.
    """

    def __init__(self, check: str, message: str):
        self.check = check
        super().__init__(message)


@dataclass(frozen=True)
class PrimeClassification:
    """Census verdict for one auxiliary prime.

    The ray-class memberships are only defined on C^(3), so they stay
    None for primes outside it.  `skipped` marks primes the census must
    exclude (v dividing 3, ell, or the index of F); those are counted
    in neither numerators nor denominators.
    """

    v: int
    in_C3: bool
    in_CLambda: bool = None
    in_Ctaubar: bool = None
    skipped: bool = False


@dataclass(frozen=True)
class CensusRow:
    """Cumulative counts at a checkpoint n."""

    n: int
    c3: int
    c_lambda: int
    c_taubar: int
    c_both: int
    n_classified: int  # primes <= n actually classified (skips removed)

    def ratio_lambda(self):
        return Fraction(self.c_lambda, self.c3) if self.c3 else None

    def ratio_taubar(self):
        return Fraction(self.c_taubar, self.c3) if self.c3 else None

    def ratio_product(self):
        if not self.c3:
            return None
        return Fraction(self.c_lambda * self.c_taubar, self.c3 * self.c3)

    def ratio_both(self):
        return Fraction(self.c_both, self.c3) if self.c3 else None


@dataclass(eq=False)
class ConductorData:
    """Everything v-independent about one conductor, precomputed once."""

    ell: int
    recipe: Config
    L: NumberField
    F: NumberField
    cg_L: ClassGroupData
    cg: ClassGroupData
    u: UnitData
    units: tuple  # 3-saturated fundamental units of F
    p31: PrimeIdeal  # over 3, residue degree 3
    p32: PrimeIdeal  # over 3, residue degree 1
    l1: PrimeIdeal  # over ell, unramified
    l2: PrimeIdeal  # over ell, e = 3
    fixed_q: RayClass3Quotient  # Cl_{3_1^2 ell_2} (x) F_3, reference shape
    wild: object  # shared block for (O/3_1^2)^* (x) F_3
    tame_l2: TameBlock
    unit_wild: tuple  # wild philog of each saturated unit
    unit_l2: tuple  # ell_2 character of each saturated unit
    fixed_rref: tuple  # unit rows reduced mod 3: the fast fixed functional
    fixed_pivots: tuple
    shanks_a: object
    external_flags: dict
    certs: dict = field(default_factory=dict)
    cert_failures: set = field(default_factory=set)
    q_primes: dict = field(default_factory=dict)

    @property
    def is_shanks(self) -> bool:
        return self.shanks_a is not None

    def excluded(self, v: int) -> bool:
        return v == 3 or v == self.ell or self.F.index % v == 0


# ---------------------------------------------------------------------------
# Conductor loading.


def load_conductor(config) -> ConductorData:
    """Build and verify the census datum for one conductor.

    Every claim the census later relies on is checked here and failures
    carry distinct tags: conductor shape, cubic and quartic discriminant,
    Galois group, splitting at 3 and ell, 4 | h(L), 3 coprime to h(F),
    exponent stability of the wild modulus, and the one-dimensionality
    of the fixed quotient.
    """
    if isinstance(config, int):
        try:
            config = shipped_config(config)
        except FileNotFoundError:
            config = Config(ell=config)
    ell = config.ell
    if not arith.is_prime(ell) or ell % 3 != 1:
        raise VerificationError("conductor", f"conductor {ell} is not a prime = 1 mod 3")

    cached = cache_read(ell) if config.use_cache else None

    if config.cubic_poly is not None:
        L = new_number_field(tuple(config.cubic_poly))
    elif cached and "L" in cached:
        L = field_from_record(cached["L"])
    else:
        L = cubic_subfield(ell)
    if L.degree != 3 or L.disc != ell * ell:
        raise VerificationError(
            "cubic-disc", f"cubic field has discriminant {L.disc}, expected {ell}^2"
        )

    # The class-number screen comes before any quartic work: conductors
    # with h(L) not divisible by 4 (ell = 7 say) carry no datum at all.
    cg_L = class_group(L)
    if cg_L.h % 4 != 0:
        raise VerificationError(
            "class-number", f"h(L) = {cg_L.h} is not divisible by 4 for ell = {ell}"
        )

    if config.quartic_poly is not None:
        quartic = tuple(config.quartic_poly)
    elif cached and "quartic_poly" in cached:
        quartic = tuple(cached["quartic_poly"])
    else:
        quartic = quartic_field_search(ell).poly
    F = field_from_record(cached["F"]) if cached and "F" in cached else new_number_field(quartic)
    if F.poly != tuple(quartic):
        F = new_number_field(quartic)
    if F.degree != 4 or F.disc != ell * ell:
        raise VerificationError(
            "quartic-disc", f"quartic field has discriminant {F.disc}, expected {ell}^2"
        )
    if quartic_galois_tag(F.poly) != "A4":
        raise VerificationError("galois", "quartic polynomial does not have Galois group A4")
    if splitting_pattern(F, 3) != [(1, 1), (1, 3)]:
        raise VerificationError("splitting-3", "3 does not split as 3_1 * 3_2 in F")
    if splitting_pattern(F, ell) != [(1, 1), (3, 1)]:
        raise VerificationError(
            "splitting-ell", f"{ell} does not factor as ell_1 * ell_2^3 in F"
        )

    cg = class_group(F)
    if cg.h % 3 == 0:
        raise VerificationError(
            "class-3part", f"h(F) = {cg.h} is divisible by 3; certificates need 3 invertible"
        )

    if config.units is not None:
        for cand in config.units:
            if len(cand) != F.degree or abs(F.el_norm(tuple(cand))) != 1:
                raise VerificationError("units", f"supplied candidate {cand} is not a unit of F")
    u = unit_group(F, seed_candidates=tuple(config.units or ()))
    units, _sw = saturate_units_at_3(F, u.fundamental_units)

    at3 = factor_rational_prime(F, 3)
    p31 = next(P for P in at3 if P.f == 3)
    p32 = next(P for P in at3 if P.f == 1)
    at_ell = factor_rational_prime(F, ell)
    l1 = next(P for P in at_ell if P.e == 1)
    l2 = next(P for P in at_ell if P.e == 3)

    if not modulus_stability_check(F, p31, cg, u, exponents=(2, 3)):
        raise VerificationError(
            "stability", "ray class quotient still grows from exponent 2 to 3 at 3_1"
        )

    fixed_q = ray_class_3_quotient(Modulus(F, ((p31, 2), (l2, 1))), cg, u)
    if fixed_q.dim != 1:
        raise VerificationError(
            "fixed-dim", f"fixed quotient has F_3-dimension {fixed_q.dim}, expected 1"
        )
    wild, tame_l2 = fixed_q.blocks
    unit_wild = tuple(wild.philog(w) for w in units)
    unit_l2 = tuple(tame_l2.philog(w)[0] for w in units)
    rows = [list(pw) + [t] for pw, t in zip(unit_wild, unit_l2)]
    fixed_rref, fixed_pivots = linalg.rref_mod_p(rows, 4, 3)
    if 4 - len(fixed_pivots) != 1:
        raise VerificationError(
            "fixed-dim", "unit images do not cut the fixed quotient to one dimension"
        )

    # Freeze the found polynomials into the recipe so census workers can
    # rebuild this datum without repeating the quartic search.
    recipe = dataclasses.replace(
        config, cubic_poly=tuple(L.poly), quartic_poly=tuple(F.poly)
    )
    cd = ConductorData(
        ell=ell,
        recipe=recipe,
        L=L,
        F=F,
        cg_L=cg_L,
        cg=cg,
        u=u,
        units=units,
        p31=p31,
        p32=p32,
        l1=l1,
        l2=l2,
        fixed_q=fixed_q,
        wild=wild,
        tame_l2=tame_l2,
        unit_wild=unit_wild,
        unit_l2=unit_l2,
        fixed_rref=tuple(tuple(r) for r in fixed_rref),
        fixed_pivots=tuple(fixed_pivots),
        shanks_a=shanks_param(ell),
        external_flags=dict(config.external_flags),
    )
    if config.use_cache and cached is None:
        cache_write(
            ell,
            {
                "L": field_to_record(L),
                "F": field_to_record(F),
                "quartic_poly": list(F.poly),
            },
        )
    return cd


# ---------------------------------------------------------------------------
# Reference classifier: the moving ray class group is rebuilt per prime.


def classify_prime(cd: ConductorData, v: int) -> PrimeClassification:
    """Classify one auxiliary prime through the full ray-class machinery."""
    if cd.excluded(v):
        log.info("conductor %d: skipping excluded prime %d", cd.ell, v)
        return PrimeClassification(v, False, skipped=True)
    if v % 3 != 1:
        return PrimeClassification(v, False)
    primes = factor_rational_prime(cd.F, v)
    if sorted(P.f for P in primes) != [1, 3]:
        return PrimeClassification(v, False)
    v1 = next(P for P in primes if P.f == 3)
    v2 = next(P for P in primes if P.f == 1)

    moving = ray_class_3_quotient(Modulus(cd.F, ((cd.p31, 2), (v2, 1))), cd.cg, cd.u)
    in_lambda = any(artin_vector(moving, list(v1.hnf)))
    in_taubar = not any(artin_vector(cd.fixed_q, list(v1.hnf)))
    return PrimeClassification(v, True, in_lambda, in_taubar)


# ---------------------------------------------------------------------------
# Fast classifier: same contract, certificates instead of factor bases.


def fast_classify(cd: ConductorData, v: int) -> PrimeClassification:
    """Classify one auxiliary prime via principality certificates.

    Agrees with classify_prime everywhere.  The moving quotient is
    presented on the four local coordinates only (three wild, one tame
    at v_2), with unit images as relations; ideal classes are moved
    into that presentation through cached certificates Q^m = (gamma)
    with m prime to 3, which exist because 3 does not divide h(F).
    """
    if cd.excluded(v):
        log.info("conductor %d: skipping excluded prime %d", cd.ell, v)
        return PrimeClassification(v, False, skipped=True)
    if v % 3 != 1:
        return PrimeClassification(v, False)
    root = _single_root(cd.F.poly, v)
    if root is None:
        return PrimeClassification(v, False)
    r, cofactor = root

    gtheta = _poly_at_theta(cd.F, cofactor)
    v1 = ideal_from_elements(cd.F, [gtheta], rational=v)
    assert ideal_norm(v1) == v**3, "degree-3 prime part has the wrong norm"
    tame_v = _tame_line(cd.F, v, r)

    alpha, cofactor_vals = _certified_split(cd, v1, v)
    wild_net = list(cd.wild.philog(alpha))
    l2_net = cd.tame_l2.philog(alpha)[0]
    v_net = tame_v.philog(alpha)[0]
    for Q, vq in cofactor_vals:
        inv3m, wg, lg, gamma = _certificate(cd, Q)
        s = vq * inv3m
        wild_net = [(a - s * b) % 3 for a, b in zip(wild_net, wg)]
        l2_net = (l2_net - s * lg) % 3
        v_net = (v_net - s * tame_v.philog(gamma)[0]) % 3

    fix_res = linalg.residual_mod_p(
        cd.fixed_rref, cd.fixed_pivots, tuple(wild_net) + (l2_net,), 3
    )
    in_taubar = not any(fix_res)

    rows = [list(pw) + [tame_v.philog(w)[0]] for pw, w in zip(cd.unit_wild, cd.units)]
    rref, pivots = linalg.rref_mod_p(rows, 4, 3)
    mov_res = linalg.residual_mod_p(rref, pivots, tuple(wild_net) + (v_net,), 3)
    in_lambda = any(mov_res)
    return PrimeClassification(v, True, in_lambda, in_taubar)


def _single_root(f, v: int):
    """(root, monic cubic cofactor) when f mod v has cycle type (3,1).

    The number of roots of f mod v is deg gcd(x^v - x, f).  When it is
    one, the remaining cubic factor has no roots, hence is irreducible,
    so the cycle type check needs no full factorization.
    """
    fv = tuple(c % v for c in f)
    xv = pm_pow_xn(v, fv, v)
    lin = pm_gcd(pm_sub(xv, (0, 1), v), fv, v)
    if poly_deg(lin) != 1:
        return None
    r = (-lin[0]) % v
    # synthetic division of f by (x - r) mod v
    out = [0] * (len(fv) - 1)
    acc = 0
    for i in range(len(fv) - 1, 0, -1):
        acc = (acc * r + fv[i]) % v
        out[i - 1] = acc
    assert (acc * r + fv[0]) % v == 0
    return r, tuple(out)


def _tame_line(K: NumberField, v: int, r: int) -> TameBlock:
    """Character block at the degree-1 prime (v, theta - r)."""
    stub = PrimeIdeal(
        p=v, e=1, f=1, norm=v, hnf=(), gen_num=(-r, 1, 0, 0), gen_den=1, theta_root=r
    )
    return TameBlock(K, stub)


def _certified_split(cd: ConductorData, v1, v: int):
    """A short alpha in v1 whose cofactor is certified prime by prime.

    Returns (alpha, [(Q, v_Q(alpha)), ...]) with (alpha) = v1 * prod Q^vQ,
    every Q coprime to 3, ell and v.  Candidates whose cofactor norm
    shares a factor with 3 * ell * v, or has a prime factor beyond desk
    scale, are passed over.
    """
    K = cd.F
    rows = [tuple(row) for row in v1]
    target = v**3
    avoid = 3 * cd.ell * v
    for el in _reduced_combinations(K, rows):
        nm = abs(K.el_norm(el))
        B, rem = divmod(nm, target)
        if rem or B == 0 or math.gcd(B, avoid) != 1:
            continue
        if B == 1:
            return el, []
        try:
            fac = factorize(B, bound=10**5)
        except ArithmeticError:
            continue
        if max(fac) > _COFACTOR_PRIME_BOUND:
            continue
        vals = _cofactor_valuations(cd, el, fac)
        if vals is not None:
            return el, vals
    raise FieldError(f"no certified splitting found in the degree-3 prime over {v}")


def _reduced_combinations(K: NumberField, rows):
    """Lattice elements as small combinations of an LLL-reduced basis.

    Enumerates coefficient boxes of growing radius (one representative
    per +- pair), then falls back to full sorted enumeration with a
    doubling bound, so the stream is deterministic and only runs dry
    when the lattice genuinely has no short usable vector.
    """
    n = K.degree
    gram = linalg.gram_matrix(rows, K.trace_gram)
    T = linalg.lll_gram(gram)
    red = [
        tuple(sum(T[i][k] * rows[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    ]
    seen = set()
    for radius in (1, 2, 4):
        coeffs = sorted(
            itertools.product(range(-radius, radius + 1), repeat=n),
            key=lambda c: (sum(abs(x) for x in c), c),
        )
        for c in coeffs:
            if all(x == 0 for x in c):
                continue
            if c in seen:
                continue
            seen.add(c)
            seen.add(tuple(-x for x in c))
            yield tuple(
                sum(c[i] * red[i][j] for i in range(n)) for j in range(n)
            )
    bound = _start_bound(K, K.disc * linalg.lattice_index(rows) ** 2)
    for _round in range(6):
        for _val, el in _short_elements(K, rows, bound):
            yield el
        bound *= 2


def _cofactor_valuations(cd: ConductorData, el, fac):
    """[(Q, v_Q(el)), ...] covering the full cofactor, or None."""
    out = []
    for q, e in sorted(fac.items()):
        if q in cd.cert_failures:
            return None
        primes = cd.q_primes.get(q)
        if primes is None:
            primes = cd.q_primes[q] = factor_rational_prime(cd.F, q)
        got = 0
        for Q in primes:
            if Q.f > e:
                continue
            w = element_valuation(cd.F, el, Q)
            if w:
                out.append((Q, w))
                got += w * Q.f
        if got != e:
            return None  # valuations must account for the whole q-part
    return out


def _certificate(cd: ConductorData, Q: PrimeIdeal):
    """(m^-1 mod 3, wild philog, ell_2 char, gamma) with Q^m = (gamma)."""
    key = Q.key()
    cert = cd.certs.get(key)
    if cert is not None:
        return cert
    coords = ideal_class_coordinates(list(Q.hnf), cd.cg)
    m = 1
    for c, d in zip(coords, cd.cg.divisors):
        if c % d:
            m = math.lcm(m, d // math.gcd(d, c))
    assert m % 3 != 0, "class order divisible by 3 despite h prime to 3"
    power = ideal_pow(cd.F, list(Q.hnf), m)
    target = ideal_norm(power)
    rows = [tuple(row) for row in power]
    gamma = None
    bound = _start_bound(cd.F, cd.F.disc * target * target)
    for _round in range(6):
        for _val, el in _short_elements(cd.F, rows, bound):
            if abs(cd.F.el_norm(el)) == target:
                gamma = el
                break
        if gamma is not None:
            break
        bound *= 2
    if gamma is None:
        cd.cert_failures.add(Q.p)
        raise FieldError(f"no generator found for the certificate at a prime over {Q.p}")
    cert = (
        pow(m, -1, 3),
        cd.wild.philog(gamma),
        cd.tame_l2.philog(gamma)[0],
        gamma,
    )
    cd.certs[key] = cert
    return cert


# ---------------------------------------------------------------------------
# The census driver.


def _checkpoints_for(N: int, checkpoints) -> tuple:
    if checkpoints is None:
        cps = tuple(c for c in TABLE_CHECKPOINTS if c <= N)
    else:
        cps = tuple(checkpoints)
        if list(cps) != sorted(set(cps)):
            raise ValueError("checkpoints must be strictly ascending")
        if cps and cps[-1] > N:
            raise ValueError("checkpoints must not exceed the census bound")
    if not cps:
        raise ValueError(f"no checkpoints at or below {N}")
    return cps


def _segments(limit: int, cps) -> list:
    bounds = sorted(set(range(0, limit + 1, CHUNK)) | set(cps) | {limit})
    return list(zip(bounds, bounds[1:]))


def _count_segment(cd: ConductorData, lo: int, hi: int, want_detail: bool):
    """Classify primes in (lo, hi]; returns counts and optional records."""
    c3 = cl = ct = cb = done = 0
    detail = [] if want_detail else None
    for v in primes_in_range(lo + 1, hi + 1):
        pc = fast_classify(cd, v)
        if pc.skipped:
            continue
        done += 1
        if pc.in_C3:
            c3 += 1
            cl += pc.in_CLambda
            ct += pc.in_Ctaubar
            cb += pc.in_CLambda and pc.in_Ctaubar
            if want_detail:
                detail.append(
                    '{"v": %d, "lambda": %s, "taubar": %s}'
                    % (v, str(pc.in_CLambda).lower(), str(pc.in_Ctaubar).lower())
                )
    return c3, cl, ct, cb, done, detail


_WORKER_CD = None


def _worker_init(recipe: Config):
    global _WORKER_CD
    logging.basicConfig(level=logging.WARNING)
    _WORKER_CD = load_conductor(recipe)


def _worker_count(args):
    lo, hi, want_detail = args
    return _count_segment(_WORKER_CD, lo, hi, want_detail)


def run_census(cd: ConductorData, N: int, checkpoints=None, workers: int = 1, jsonl=None):
    """Cumulative census rows at each checkpoint up to N.

    Primes beyond the last checkpoint are never classified.  Work is cut
    into fixed CHUNK-sized ranges (checkpoints always land on segment
    boundaries), so the merged rows do not depend on the worker count.
    """
    cps = _checkpoints_for(N, checkpoints)
    limit = cps[-1]
    segs = _segments(limit, cps)
    want_detail = jsonl is not None

    if workers <= 1:
        results = (_count_segment(cd, lo, hi, want_detail) for lo, hi in segs)
        rows, detail_lines = _merge_segments(cd, segs, results, cps)
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(cd.recipe,)
        ) as pool:
            results = pool.map(
                _worker_count, [(lo, hi, want_detail) for lo, hi in segs], chunksize=8
            )
            rows, detail_lines = _merge_segments(cd, segs, results, cps)
    if jsonl is not None:
        if jsonl == "-":
            for line in detail_lines:
                sys.stdout.write(line + "\n")
        else:
            with open(jsonl, "w") as fh:
                for line in detail_lines:
                    fh.write(line + "\n")
    return rows


def _merge_segments(cd, segs, results, cps):
    rows = []
    c3 = cl = ct = cb = done = 0
    cps_left = list(cps)
    detail_lines = []
    for (lo, hi), res in zip(segs, results):
        sc3, scl, sct, scb, sdone, detail = res
        c3 += sc3
        cl += scl
        ct += sct
        cb += scb
        done += sdone
        if detail:
            detail_lines.extend(detail)
        if cps_left and hi == cps_left[0]:
            cps_left.pop(0)
            rows.append(CensusRow(hi, c3, cl, ct, cb, done))
            log.info(
                "conductor %d: n=%d |C3|=%d lambda=%d taubar=%d both=%d",
                cd.ell, hi, c3, cl, ct, cb,
            )
    return rows, detail_lines


# ---------------------------------------------------------------------------
# Conductor scan and the composite-conductor cross-check.


@dataclass(frozen=True)
class ScanRow:
    ell: int
    h: int
    two_rank: int
    shanks_a: object  # the a with ell = a^2 + 3a + 9, or None
    passes: bool  # 4 | h(L); the quartic-side conditions are external


def scan_conductors(max_ell: int):
    """Screen all prime conductors = 1 mod 3 up to max_ell by 4 | h(L).

    Conditions on the quartic side of the classification are not decided here
    and are reported as external by the CLI.
    """
    if max_ell > 2000:
        raise ValueError("conductor scan is sized for max_ell <= 2000")
    rows = []
    for ell in arith.primes_upto(max_ell):
        if ell % 3 != 1:
            continue
        cg = class_group(cubic_subfield(ell))
        rows.append(ScanRow(ell, cg.h, two_rank(cg), shanks_param(ell), cg.h % 4 == 0))
    return rows


@dataclass(frozen=True)
class DiagonalField:
    poly: tuple
    disc: int
    h: int
    two_rank: int


@dataclass(frozen=True)
class DiagonalReport:
    ell1: int
    ell2: int
    fields: tuple  # the two diagonal cubic fields
    rank_obstructed: bool  # both 2-ranks below 2


def diagonal_check(ell1: int, ell2: int) -> DiagonalReport:
    """Class data of the two diagonal cubics of conductor ell1 * ell2.

    (Z/ell1 ell2)^* has four index-3 subgroups; the two whose fixed
    cubics have full conductor are the diagonal ones.  Their defining
    polynomials are recovered exactly from Gauss periods: coefficients
    are sums of roots of unity, grouped into Galois orbits where the
    orbit sum is mu(order), so every power sum is an exact integer.
    Failure of that grouping, or a field discriminant other than
    (ell1 * ell2)^2, raises a VerificationError.
    """
    for ell in (ell1, ell2):
        if not arith.is_prime(ell) or ell % 3 != 1:
            raise VerificationError("conductor", f"{ell} is not a prime = 1 mod 3")
    if ell1 == ell2:
        raise VerificationError("conductor", "diagonal check needs distinct conductors")
    m = ell1 * ell2
    chi1 = _dlog3_table(ell1)
    chi2 = _dlog3_table(ell2)
    fields = []
    for twist in (1, 2):
        cosets = ([], [], [])
        for t in range(1, m):
            if t % ell1 == 0 or t % ell2 == 0:
                continue
            cosets[(chi1[t % ell1] + twist * chi2[t % ell2]) % 3].append(t)
        e2 = _orbit_sum(_pair_counts(cosets, m), m)
        e3 = _orbit_sum(_triple_counts(cosets, m), m)
        K = new_number_field((-e3, e2, -1, 1))
        if K.disc != m * m:
            raise VerificationError(
                "diagonal-disc",
                f"period cubic for twist {twist} has field discriminant {K.disc}, "
                f"expected {m}^2",
            )
        cg = class_group(K)
        fields.append(DiagonalField(K.poly, K.disc, cg.h, two_rank(cg)))
    return DiagonalReport(ell1, ell2, tuple(fields), all(f.two_rank < 2 for f in fields))


def _dlog3_table(ell: int):
    """table[x] = discrete log of x mod ell, reduced mod 3."""
    g = _smallest_generator(ell)
    table = [0] * ell
    acc = 1
    for k in range(ell - 1):
        table[acc] = k % 3
        acc = acc * g % ell
    return table


def _smallest_generator(ell: int) -> int:
    parts = [(ell - 1) // p for p in factorize(ell - 1)]
    for g in range(2, ell):
        if all(pow(g, e, ell) != 1 for e in parts):
            return g
    raise ValueError(f"no generator mod {ell}")


def _pair_counts(cosets, m: int):
    cnt = [0] * m
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for s in cosets[i]:
            for t in cosets[j]:
                cnt[(s + t) % m] += 1
    return cnt


def _triple_counts(cosets, m: int):
    pair = [0] * m
    for s in cosets[1]:
        for t in cosets[2]:
            pair[(s + t) % m] += 1
    cnt = [0] * m
    for s in cosets[0]:
        for k in range(m):
            if pair[k]:
                cnt[(s + k) % m] += pair[k]
    return cnt


def _orbit_sum(cnt, m: int) -> int:
    """Exact value of sum cnt[k] * zeta_m^k, which must be rational.

    zeta_m^k only depends on k through its order m/gcd(k, m); the count
    vector must be constant on each orbit {k : gcd(k, m) = d} (this is
    Galois stability of the symmetric function being evaluated), and
    the orbit then contributes count * mu(order).
    """
    reps = {}
    for k in range(m):
        d = math.gcd(k, m)
        if d in reps:
            if cnt[k] != reps[d]:
                raise VerificationError(
                    "diagonal-orbits", "period power sum is not Galois stable"
                )
        else:
            reps[d] = cnt[k]
    total = 0
    for d, c in reps.items():
        if c:
            total += c * _moebius(m // d)
    return total


def _moebius(t: int) -> int:
    if t == 1:
        return 1
    mu = 1
    for _p, e in factorize(t).items():
        if e > 1:
            return 0
        mu = -mu
    return mu


# ---------------------------------------------------------------------------
# The group-theoretic density input.


def a4_order3_density() -> Fraction:
    """Density of C^(3), derived from the conjugacy classes of A4.

    Builds A4 as the even permutations of four letters, splits it into
    conjugacy classes (sizes 1, 3, 4, 4), and combines the two classes
    of 3-cycles with the index-2 condition v = 1 mod 3:
    (1/2) * (4/12 + 4/12) = 1/3.
    """
    perms = [p for p in itertools.permutations(range(4)) if _parity(p) == 0]
    assert len(perms) == 12
    classes = []
    seen = set()
    for p in perms:
        if p in seen:
            continue
        orbit = {_conj(g, p) for g in perms}
        seen |= orbit
        classes.append(orbit)
    assert sorted(len(c) for c in classes) == [1, 3, 4, 4]
    order3 = [c for c in classes if _perm_order(next(iter(c))) == 3]
    assert len(order3) == 2
    return Fraction(1, 2) * sum(Fraction(len(c), len(perms)) for c in order3)


def _parity(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


def _compose(a, b):
    return tuple(a[b[i]] for i in range(len(b)))


def _conj(g, p):
    gi = tuple(sorted(range(len(g)), key=g.__getitem__))
    return _compose(_compose(g, p), gi)


def _perm_order(p) -> int:
    acc = p
    n = 1
    ident = tuple(range(len(p)))
    while acc != ident:
        acc = _compose(acc, p)
        n += 1
    return n
