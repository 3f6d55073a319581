"""Enriched and twisted binomial coefficients in GW(k).

binom(A, j) is the trace form of the etale algebra of j-element subsets
of the fiber of A with its induced Galois action, computed by literal
orbit enumeration (the brute-force route; algebra degree is capped at 12,
i.e. at most C(12, 6) = 924 subsets).  tbinom(A, j, d) composes the
action with complementation through the quadratic character of d.

The closed-form sides of the standard identities (symmetry, products,
the twisted product decomposition, and the main/auxiliary twist
identities) are built from untwisted binomials by plain GW arithmetic,
so every check_* function compares two independently computed values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .errors import DegreeLimitExceeded, DegreeMismatch, IndexOutOfRange, SquareTwistWarning
from .etale import (
    EtaleAlgebra,
    FiniteFactor,
    _trace_form_factor,
    class_coords,
    cyclic_orbits,
    e2_orbits,
    fiber_set,
    stabilizer_factor,
)
from .fields import FQ, BaseField, SquareClass, sq_class
from .gw import GWElement, gw_eq, gw_unit, gw_zero

DEGREE_CAP = 12


def _subsets(n: int, j: int) -> list[frozenset]:
    from itertools import combinations

    return [frozenset(c) for c in combinations(range(n), j)]


def _check_query(algebra: EtaleAlgebra, j: int):
    if algebra.degree > DEGREE_CAP:
        raise DegreeLimitExceeded(f"degree {algebra.degree} exceeds the enumeration cap {DEGREE_CAP}")
    if j < 0 or j > algebra.degree:
        raise IndexOutOfRange(f"j = {j} outside 0..{algebra.degree}")


def _twist_class(algebra: EtaleAlgebra, d) -> SquareClass:
    return d if isinstance(d, SquareClass) else sq_class(algebra.base, d)


@lru_cache(maxsize=None)
def binom(algebra: EtaleAlgebra, j: int) -> GWElement:
    """The enriched binomial coefficient (A over k choose j) in GW(k)."""
    _check_query(algebra, j)
    S = fiber_set(algebra)
    items = _subsets(S.size, j)
    out = gw_zero(algebra.base)
    if S.group_kind == "cyclic":
        g = S.generators[0]
        for orbit in cyclic_orbits(items, lambda s: frozenset(g[i] for i in s)):
            out = out + _trace_form_factor(algebra.base, FiniteFactor(len(orbit)))
    else:
        actions = [lambda s, g=g: frozenset(g[i] for i in s) for g in S.generators]
        for _, stab in e2_orbits(items, actions):
            out = out + _trace_form_factor(algebra.base, stabilizer_factor(algebra.base, stab, S.basis_classes))
    return out.canonical()


def _binom_or_zero(algebra: EtaleAlgebra, j: int) -> GWElement:
    if j < 0 or j > algebra.degree:
        return gw_zero(algebra.base)
    return binom(algebra, j)


def tbinom(algebra: EtaleAlgebra, j: int, d) -> GWElement:
    """The twisted binomial coefficient (A[sqrt d] over k choose j).

    Requires deg A = 2j; the Galois action on j-subsets is composed with
    complementation through the character of d.  A square twist class
    makes the extra action trivial: the plain binomial is returned under
    a SquareTwistWarning.
    """
    _check_query(algebra, j)
    if algebra.degree != 2 * j:
        raise DegreeMismatch(f"twisted coefficients need degree 2j, got {algebra.degree} != {2 * j}")
    d_cls = _twist_class(algebra, d)
    if d_cls.is_square:
        warnings.warn("twist by a square class is trivial", SquareTwistWarning, stacklevel=2)
        return binom(algebra, j)
    return _tbinom_nonsquare(algebra, j, d_cls)


@lru_cache(maxsize=None)
def _tbinom_nonsquare(algebra: EtaleAlgebra, j: int, d_cls: SquareClass) -> GWElement:
    base = algebra.base
    out = gw_zero(base)
    if base.kind == FQ:
        S = fiber_set(algebra)
        items = _subsets(S.size, j)
        g = S.generators[0]
        full = frozenset(range(S.size))

        def step(s: frozenset) -> frozenset:
            return full - frozenset(g[i] for i in s)

        for orbit in cyclic_orbits(items, step):
            out = out + _trace_form_factor(base, FiniteFactor(len(orbit)))
        return out.canonical()

    S = fiber_set(algebra, extra_classes=(d_cls,))
    items = _subsets(S.size, j)
    full = frozenset(range(S.size))
    # d's coordinates over the basis dual to the generators
    d_coords = class_coords(d_cls, S.basis_classes)
    actions = []
    for jgen, g in enumerate(S.generators):
        flip = bool((d_coords >> jgen) & 1)

        def act(s: frozenset, g=g, flip=flip) -> frozenset:
            img = frozenset(g[i] for i in s)
            return (full - img) if flip else img

        actions.append(act)
    for _, stab in e2_orbits(items, actions):
        out = out + _trace_form_factor(base, stabilizer_factor(base, stab, S.basis_classes))
    return out


# ---------------------------------------------------------------------------
# Identity right-hand sides and dual-evaluation checks
# ---------------------------------------------------------------------------


def _two_and_twod(field: BaseField, d_cls: SquareClass) -> tuple[GWElement, GWElement]:
    two = sq_class(field, 2)
    return gw_unit(field, two), gw_unit(field, two * d_cls)


def check_symmetry(algebra: EtaleAlgebra, j: int) -> bool:
    """binom(A, j) == binom(A, n - j)."""
    return gw_eq(binom(algebra, j), binom(algebra, algebra.degree - j))


def check_product(a1: EtaleAlgebra, a2: EtaleAlgebra, j: int) -> bool:
    """binom(A1 x A2, j) == sum_i binom(A1, i) binom(A2, j - i)."""
    lhs = binom(a1 * a2, j)
    rhs = gw_zero(a1.base)
    for i in range(j + 1):
        rhs = rhs + _binom_or_zero(a1, i) * _binom_or_zero(a2, j - i)
    return gw_eq(lhs, rhs)


def _tbinom_any(algebra: EtaleAlgebra, j: int, d_cls: SquareClass) -> GWElement:
    if d_cls.is_square:
        return binom(algebra, j)
    return _tbinom_nonsquare(algebra, j, d_cls)


def twisted_product_rhs(e: EtaleAlgebra, f: EtaleAlgebra, d) -> GWElement:
    """Decomposition of the twist along sigma = E x F with deg E = 2m even."""
    if e.degree % 2:
        raise DegreeMismatch("the split-off factor must have even degree")
    sigma = e * f
    if sigma.degree % 2:
        raise DegreeMismatch("twisted coefficients need even total degree")
    m, j = e.degree // 2, sigma.degree // 2
    d_cls = _twist_class(sigma, d)
    two, twod = _two_and_twod(sigma.base, d_cls)
    out = _tbinom_any(e, m, d_cls) * _tbinom_any(f, j - m, d_cls)
    cross = gw_zero(sigma.base)
    for i in range(m):
        cross = cross + _binom_or_zero(e, i) * _binom_or_zero(f, j - i)
    return out + cross * (two + twod)


def check_twisted_product(e: EtaleAlgebra, f: EtaleAlgebra, d) -> bool:
    sigma = e * f
    return gw_eq(tbinom_quiet(sigma, sigma.degree // 2, d), twisted_product_rhs(e, f, d))


def tbinom_quiet(algebra: EtaleAlgebra, j: int, d) -> GWElement:
    """tbinom without the square-twist warning (for bulk identity sweeps)."""
    _check_query(algebra, j)
    if algebra.degree != 2 * j:
        raise DegreeMismatch(f"twisted coefficients need degree 2j, got {algebra.degree} != {2 * j}")
    return _tbinom_any(algebra, j, _twist_class(algebra, d))


def main_identity_rhs(sigma: EtaleAlgebra, j: int, d) -> GWElement:
    """binom(sigma, j) <d^j> + (<2> - <2d>) sum_{l<j} (-1)^l binom(sigma, l)."""
    if sigma.degree != 2 * j:
        raise DegreeMismatch(f"need degree 2j, got {sigma.degree} != {2 * j}")
    d_cls = _twist_class(sigma, d)
    two, twod = _two_and_twod(sigma.base, d_cls)
    out = binom(sigma, j) * gw_unit(sigma.base, d_cls**j)
    alt = gw_zero(sigma.base)
    for l in range(j):
        term = binom(sigma, l)
        alt = alt + (term if l % 2 == 0 else -term)
    return out + (two - twod) * alt


def check_main_identity(sigma: EtaleAlgebra, j: int, d) -> bool:
    return gw_eq(tbinom_quiet(sigma, j, d), main_identity_rhs(sigma, j, d))


def useful_identity_rhs(sigma: EtaleAlgebra, j: int, d) -> GWElement:
    """binom(sigma, j) + (-1)^j (<2> - <2d>) sum_{l<j} (-1)^l binom(sigma, l)."""
    if sigma.degree != 2 * j:
        raise DegreeMismatch(f"need degree 2j, got {sigma.degree} != {2 * j}")
    d_cls = _twist_class(sigma, d)
    two, twod = _two_and_twod(sigma.base, d_cls)
    alt = gw_zero(sigma.base)
    for l in range(j):
        term = binom(sigma, l)
        alt = alt + (term if l % 2 == 0 else -term)
    corr = (two - twod) * alt
    return binom(sigma, j) + (corr if j % 2 == 0 else -corr)


def check_useful_identity(sigma: EtaleAlgebra, j: int, d) -> bool:
    d_cls = _twist_class(sigma, d)
    lhs = tbinom_quiet(sigma, j, d) * gw_unit(sigma.base, d_cls**j)
    return gw_eq(lhs, useful_identity_rhs(sigma, j, d))


def check_induction_step(e: EtaleAlgebra, f: EtaleAlgebra, d) -> bool:
    """Replay of the inductive step: with deg F = 2, the main-identity
    right-hand sides for E and F recombine to the one for E x F through
    the twisted product decomposition."""
    if f.degree != 2:
        raise DegreeMismatch("the induction step splits off a degree-2 factor")
    sigma = e * f
    if sigma.degree % 2:
        raise DegreeMismatch("need even total degree")
    j = sigma.degree // 2
    d_cls = _twist_class(sigma, d)
    two, twod = _two_and_twod(sigma.base, d_cls)
    lhs = main_identity_rhs(sigma, j, d)
    rhs = _binom_or_zero(e, j - 2) * (two + twod)
    if j - 1 >= 0:
        rhs = rhs + main_identity_rhs(e, j - 1, d) * main_identity_rhs(f, 1, d)
    return gw_eq(lhs, rhs)


# ---------------------------------------------------------------------------
# Pascal layouts
# ---------------------------------------------------------------------------


def pascal_triangle(q: int, nmax: int) -> list[list[GWElement]]:
    """Rows j = 0..nmax of binom(F_{q^n}, j) for n = j..nmax."""
    field = BaseField.finite(q)
    rows = []
    for j in range(nmax + 1):
        row = [binom(EtaleAlgebra.of(field, [n] if n else []), j) for n in range(j, nmax + 1)]
        rows.append(row)
    return rows


def twisted_diagonal(q: int, jmax: int) -> list[GWElement]:
    """tbinom(F_{q^(2j)}[F_{q^2}], j) for j = 1..jmax."""
    field = BaseField.finite(q)
    return [tbinom(EtaleAlgebra.of(field, [2 * j]), j, "u") for j in range(1, jmax + 1)]


# ---------------------------------------------------------------------------
# Corpus enumeration and the identity suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinomialQuery:
    algebra: EtaleAlgebra
    j: int
    twist: SquareClass | None = None

    def describe(self) -> str:
        t = f", d={self.twist.rep}" if self.twist is not None else ""
        return f"({self.algebra}, j={self.j}{t})"


@dataclass
class SuiteReport:
    checks_run: int = 0
    failures: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, passed: bool, check: str, query: BinomialQuery):
        self.checks_run += 1
        if not passed:
            self.failures.append((check, query))


def _partitions(n: int, cap: int | None = None):
    cap = n if cap is None else cap
    if n == 0:
        yield ()
        return
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def fq_corpus(q: int, degmax: int) -> list[EtaleAlgebra]:
    """Every etale algebra over F_q of degree 1..degmax."""
    field = BaseField.finite(q)
    out = []
    for n in range(1, degmax + 1):
        for part in _partitions(n):
            out.append(EtaleAlgebra.of(field, list(part)))
    return out


def multiquadratic_corpus(base: BaseField, classes, degmax: int) -> list[EtaleAlgebra]:
    """Multiquadratic algebras with quadratic classes from the given pool."""
    pool = [None] + [sq_class(base, c) for c in classes]
    out = []

    def build(idx: int, left: int, chosen: tuple):
        if chosen:
            out.append(EtaleAlgebra.of(base, list(chosen)))
        if idx == len(pool) or left == 0:
            return
        spec = pool[idx]
        cost = 1 if spec is None else 2
        count = left // cost
        for reps in range(count + 1):
            build(idx + 1, left - reps * cost, chosen + (spec,) * reps)

    build(0, degmax, ())
    # dedupe by canonical key
    seen = {}
    for a in out:
        seen.setdefault(a.key(), a)
    return list(seen.values())


def _splittings(algebra: EtaleAlgebra):
    """Distinct unordered splittings A = A1 x A2 (A1 nonempty)."""
    from itertools import product as iproduct

    factors = list(algebra.factors)
    distinct: dict = {}
    for f in factors:
        distinct[f.key()] = distinct.get(f.key(), [f, 0])
        distinct[f.key()][1] += 1
    keys = list(distinct.values())
    seen = set()
    out = []
    for counts in iproduct(*[range(c + 1) for _, c in keys]):
        chosen = []
        rest = []
        for (f, total), take in zip(keys, counts):
            chosen.extend([f] * take)
            rest.extend([f] * (total - take))
        if not chosen:
            continue
        a1 = EtaleAlgebra(algebra.base, tuple(chosen))
        a2 = EtaleAlgebra(algebra.base, tuple(rest))
        sig = frozenset((a1.key(), a2.key()))
        if sig in seen:
            continue
        seen.add(sig)
        out.append((a1, a2))
    return out


def run_identity_suite(algebras, d, report: SuiteReport | None = None) -> SuiteReport:
    """Dual-evaluation sweep of the binomial identities over a corpus.

    For each algebra: symmetry and product splittings at every index;
    for even degrees also the twisted product decompositions, the main
    and auxiliary twist identities, and the degree-2 induction replay.
    """
    report = report or SuiteReport()
    for a in algebras:
        d_cls = _twist_class(a, d)
        n = a.degree
        for j in range(n // 2 + 1):
            report.record(check_symmetry(a, j), "symmetry", BinomialQuery(a, j))
        for a1, a2 in _splittings(a):
            if not a2.factors:
                continue
            for j in range(n + 1):
                report.record(check_product(a1, a2, j), "product", BinomialQuery(a, j))
        if n % 2 == 0 and n > 0:
            j = n // 2
            report.record(check_main_identity(a, j, d_cls), "main-identity", BinomialQuery(a, j, d_cls))
            report.record(check_useful_identity(a, j, d_cls), "useful-identity", BinomialQuery(a, j, d_cls))
            for e, f in _splittings(a):
                if e.degree % 2 == 0:
                    report.record(
                        check_twisted_product(e, f, d_cls), "twisted-product", BinomialQuery(a, j, d_cls)
                    )
                if f.degree % 2 == 0 and f.key() != e.key():
                    report.record(
                        check_twisted_product(f, e, d_cls), "twisted-product", BinomialQuery(a, j, d_cls)
                    )
                if f.degree == 2:
                    report.record(
                        check_induction_step(e, f, d_cls), "induction-step", BinomialQuery(a, j, d_cls)
                    )
                elif e.degree == 2:
                    report.record(
                        check_induction_step(f, e, d_cls), "induction-step", BinomialQuery(a, j, d_cls)
                    )
    return report
