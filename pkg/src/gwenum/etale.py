"""Finite etale algebras, their Galois sets, trace forms, and transfers.

Supported algebra kinds:

* over F_q: products of field factors F_{q^m}, any degrees;
* over the rationals / a real closed field: products of multiquadratic
  field factors k(sqrt(c_1), ..., sqrt(c_t)) stored by an independent
  tuple of square classes (t = 0 is the base field, t = 1 a quadratic
  extension --- the only kinds accepted from user input; larger t arises
  internally as fixed fields of subset orbits).

The fiber functor sends an algebra to a finite set with generators of the
acting group: one Frobenius permutation over F_q, or s commuting
involutions dual to a basis of the span of the factor classes.  Orbit
decompositions go back to algebras via stabilizer fixed fields, computed
with F_2 linear algebra on character lattices.

This module also houses the node mass ⟨N(delta)⟩ and the curve weight
Tr(prod of masses), the transfer-flavored operations consumed by the
wall-crossing engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._gf import (
    FractionOps,
    diagonalize_symmetric,
    find_nonsquare_poly,
    gf,
    gf_ext,
    newton_trace_sums,
)
from .errors import FieldMismatch, UnsupportedExtension
from .fields import FQ, RAT, REAL, U, BaseField, SquareClass, factorize, rep_key, sq_class
from .gw import GWElement, gw_form, gw_unit, gw_zero

# ---------------------------------------------------------------------------
# F_2 linear algebra on square classes
# ---------------------------------------------------------------------------


def _class_mask(cls: SquareClass, prime_bits: dict) -> int:
    """Square class as an F_2 vector over the coordinates {-1} u primes."""
    rep = cls.rep
    mask = 0
    if rep == U:
        raise ValueError("symbolic F_q classes have no rational prime vector")
    if rep < 0:
        mask |= 1 << prime_bits.setdefault(-1, len(prime_bits))
        rep = -rep
    for p in factorize(rep):
        mask |= 1 << prime_bits.setdefault(p, len(prime_bits))
    return mask


def _f2_reduce(vectors: list[int]) -> list[int]:
    """Row-reduced echelon basis (as bitmasks) of the span."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    reduced = []
    for i, v in enumerate(basis):
        for j, b in enumerate(basis):
            if i != j and v & (1 << (b.bit_length() - 1)):
                v ^= b
        reduced.append(v)
    return reduced


def _f2_solve(v: int, vectors: list[int]) -> int | None:
    """Coordinates of v in the span of ``vectors`` (a bitmask), or None."""
    pivots: dict[int, tuple[int, int]] = {}
    for i, vec in enumerate(vectors):
        combo = 1 << i
        while vec:
            top = vec.bit_length() - 1
            if top in pivots:
                pv, pc = pivots[top]
                vec ^= pv
                combo ^= pc
            else:
                pivots[top] = (vec, combo)
                break
    combo = 0
    while v:
        top = v.bit_length() - 1
        if top not in pivots:
            return None
        pv, pc = pivots[top]
        v ^= pv
        combo ^= pc
    return combo


def class_coords(cls: SquareClass, basis_classes) -> int | None:
    """Coordinates of a square class over a list of independent classes."""
    prime_bits: dict = {}
    masks = [_class_mask(b, prime_bits) for b in basis_classes]
    return _f2_solve(_class_mask(cls, prime_bits), masks)


def _f2_nullspace(rows: list[int], width: int) -> list[int]:
    """Basis of {v : v . r = 0 for all r} inside F_2^width."""
    basis = _f2_reduce([r for r in rows if r])
    pivots = [b.bit_length() - 1 for b in basis]
    free = [i for i in range(width) if i not in pivots]
    out = []
    for f in free:
        v = 1 << f
        for b, piv in zip(basis, pivots):
            if (b >> f) & 1:
                v |= 1 << piv
        out.append(v)
    return out


def _dot(a: int, b: int) -> int:
    return bin(a & b).count("1") % 2


# ---------------------------------------------------------------------------
# Factors and algebras
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteFactor:
    """The field F_{q^m} over the base F_q."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("factor degree must be >= 1")

    @property
    def degree(self) -> int:
        return self.m

    def key(self):
        return ("ff", self.m)


@dataclass(frozen=True)
class MultiQuadFactor:
    """k(sqrt(c) : c in classes), classes an independent tuple of non-squares."""

    classes: tuple[SquareClass, ...]

    def __post_init__(self):
        prime_bits: dict = {}
        masks = [_class_mask(c, prime_bits) for c in self.classes]
        if any(c.rep == 1 for c in self.classes):
            raise ValueError("square classes in a field factor must be non-trivial")
        if len(_f2_reduce(masks)) != len(masks):
            raise ValueError(f"dependent class tuple {self.classes}")
        object.__setattr__(self, "classes", tuple(sorted(self.classes, key=lambda c: rep_key(c.rep))))

    @property
    def degree(self) -> int:
        return 2 ** len(self.classes)

    def key(self):
        return ("mq", tuple(rep_key(c.rep) + (c.rep,) for c in self.classes))


Factor = FiniteFactor | MultiQuadFactor


@dataclass(frozen=True)
class EtaleAlgebra:
    base: BaseField
    factors: tuple[Factor, ...]

    def __post_init__(self):
        for f in self.factors:
            if self.base.kind == FQ and not isinstance(f, FiniteFactor):
                raise ValueError("factors over F_q are finite-field factors")
            if self.base.kind in (RAT, REAL) and not isinstance(f, MultiQuadFactor):
                raise ValueError("factors over Q/R are multiquadratic factors")
            if self.base.kind == REAL:
                for c in getattr(f, "classes", ()):
                    if c.rep != -1:
                        raise ValueError("the only real quadratic class is -1")
        object.__setattr__(self, "factors", tuple(sorted(self.factors, key=lambda f: f.key())))

    @staticmethod
    def of(base: BaseField, factors) -> "EtaleAlgebra":
        """Build from factor specs, normalizing Quad(square) to two trivials.

        Specs: FiniteFactor / int degree over F_q; MultiQuadFactor, None
        (trivial), or a square-class value a (quadratic factor) over Q/R.
        """
        out: list[Factor] = []
        for spec in factors:
            if base.kind == FQ:
                out.append(spec if isinstance(spec, FiniteFactor) else FiniteFactor(int(spec)))
                continue
            if isinstance(spec, MultiQuadFactor):
                out.append(spec)
            elif spec is None:
                out.append(MultiQuadFactor(()))
            else:
                cls = spec if isinstance(spec, SquareClass) else sq_class(base, spec)
                if cls.is_square:
                    out.extend([MultiQuadFactor(()), MultiQuadFactor(())])
                else:
                    out.append(MultiQuadFactor((cls,)))
        return EtaleAlgebra(base, tuple(out))

    @staticmethod
    def split(base: BaseField, n: int) -> "EtaleAlgebra":
        """The split algebra k^n."""
        if base.kind == FQ:
            return EtaleAlgebra.of(base, [1] * n)
        return EtaleAlgebra.of(base, [None] * n)

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)

    def key(self):
        return (self.base, tuple(f.key() for f in self.factors))

    def __mul__(self, other: "EtaleAlgebra") -> "EtaleAlgebra":
        if self.base != other.base:
            raise FieldMismatch(f"{self.base} vs {other.base}")
        return EtaleAlgebra(self.base, self.factors + other.factors)

    def __str__(self):
        if not self.factors:
            return "1"
        bits = []
        for f in self.factors:
            if isinstance(f, FiniteFactor):
                bits.append(f"F{self.base.q}^{f.m}" if f.m > 1 else f"F{self.base.q}")
            elif not f.classes:
                bits.append("k")
            else:
                bits.append("k(" + ",".join(f"sqrt({c.rep})" for c in f.classes) + ")")
        return " x ".join(bits)

    def to_json(self) -> dict:
        factors = []
        for f in self.factors:
            if isinstance(f, FiniteFactor):
                factors.append({"kind": "ff", "m": f.m})
            elif len(f.classes) == 0:
                factors.append({"kind": "trivial"})
            elif len(f.classes) == 1:
                factors.append({"kind": "quad", "a": f.classes[0].rep})
            else:
                factors.append({"kind": "mquad", "classes": [c.rep for c in f.classes]})
        return {"base": self.base.to_json(), "factors": factors}

    @staticmethod
    def from_json(obj: dict) -> "EtaleAlgebra":
        base = BaseField.from_json(obj["base"])
        specs: list = []
        for f in obj["factors"]:
            kind = f["kind"]
            if kind == "ff":
                specs.append(FiniteFactor(int(f["m"])))
            elif kind == "trivial":
                specs.append(None)
            elif kind == "quad":
                specs.append(int(f["a"]))
            elif kind == "mquad":
                specs.append(MultiQuadFactor(tuple(sq_class(base, int(c)) for c in f["classes"])))
            else:
                raise ValueError(f"bad factor kind {kind!r}")
        return EtaleAlgebra.of(base, specs)


def quad_ext(base: BaseField, d) -> EtaleAlgebra:
    """k[x]/(x^2 - d): a quadratic field factor, or k x k when d is a square."""
    cls = d if isinstance(d, SquareClass) else sq_class(base, d)
    if base.kind == FQ:
        return EtaleAlgebra.of(base, [1, 1] if cls.is_square else [2])
    return EtaleAlgebra.of(base, [cls])


# ---------------------------------------------------------------------------
# Fiber functor and orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaloisSet:
    """A finite set with generators of the acting Galois group.

    ``cyclic``: one Frobenius generator (finite base field).
    ``elementary2``: s commuting involutions, generator j dual to
    ``basis_classes[j]`` in the span of the algebra's quadratic classes.
    """

    base: BaseField
    size: int
    generators: tuple[tuple[int, ...], ...]
    group_kind: str
    labels: tuple = ()
    basis_classes: tuple[SquareClass, ...] = ()

    def __post_init__(self):
        for g in self.generators:
            if sorted(g) != list(range(self.size)):
                raise ValueError("generator is not a permutation")
        if self.group_kind == "cyclic" and len(self.generators) != 1:
            raise ValueError("cyclic sets carry exactly one generator")
        if self.group_kind == "elementary2":
            for g in self.generators:
                if any(g[g[i]] != i for i in range(self.size)):
                    raise ValueError("elementary-2 generators must be involutions")


@dataclass(frozen=True)
class OrbitDecomposition:
    base: BaseField
    orbits: tuple[tuple[frozenset, Factor], ...]


def fiber_set(algebra: EtaleAlgebra, extra_classes: tuple = ()) -> GaloisSet:
    """The fiber functor image: points with their Galois generators.

    ``extra_classes`` enlarge the acting group's character span without
    adding points (used for twists by a class outside the algebra's span).
    """
    base = algebra.base
    if base.kind == FQ:
        perm: list[int] = []
        labels: list = []
        offset = 0
        for fi, f in enumerate(algebra.factors):
            perm.extend(offset + ((i + 1) % f.m) for i in range(f.m))
            labels.extend((fi, i) for i in range(f.m))
            offset += f.m
        return GaloisSet(base, offset, (tuple(perm),), "cyclic", tuple(labels))

    prime_bits: dict = {}
    all_masks = [_class_mask(c, prime_bits) for f in algebra.factors for c in f.classes]
    all_masks += [_class_mask(c, prime_bits) for c in extra_classes]
    basis_masks = _f2_reduce(all_masks)
    s = len(basis_masks)
    basis_classes = tuple(_mask_to_class(base, b, prime_bits) for b in basis_masks)
    # factor f contributes the coset space dual to its class span
    points: list = []  # (factor index, chi) with chi in F_2^{t_f}
    moves: list[list[int]] = [[] for _ in range(s)]  # per generator, translation per point
    for fi, f in enumerate(algebra.factors):
        w_coords = [_f2_solve(_class_mask(c, prime_bits), basis_masks) for c in f.classes]
        t = len(w_coords)
        start = len(points)
        points.extend((fi, chi) for chi in range(2**t))
        for j in range(s):
            shift = 0
            for i, w in enumerate(w_coords):
                if (w >> j) & 1:
                    shift |= 1 << i
            for chi in range(2**t):
                moves[j].append(start + (chi ^ shift))
    generators = tuple(tuple(mv) for mv in moves)
    return GaloisSet(base, len(points), generators, "elementary2", tuple(points), basis_classes)


def _mask_to_class(base: BaseField, mask: int, prime_bits: dict) -> SquareClass:
    inv = {bit: p for p, bit in prime_bits.items()}
    val = 1
    b = 0
    while mask:
        if mask & 1:
            val *= inv[b]
        mask >>= 1
        b += 1
    return sq_class(base, val)


def cyclic_orbits(items, step) -> list[list]:
    """Orbits of a bijection ``step`` on hashable items."""
    seen = set()
    out = []
    for it in items:
        if it in seen:
            continue
        orbit = [it]
        seen.add(it)
        cur = step(it)
        while cur != it:
            orbit.append(cur)
            seen.add(cur)
            cur = step(cur)
        out.append(orbit)
    return out


def e2_orbits(items, gen_actions) -> list[tuple[list, list[int]]]:
    """Orbits with stabilizer masks under commuting involutions.

    Returns (orbit, stabilizer) pairs; group elements and stabilizer
    members are bitmasks over the generators.
    """
    s = len(gen_actions)
    group = []
    for mask in range(2**s):
        def act(item, mask=mask):
            for j in range(s):
                if (mask >> j) & 1:
                    item = gen_actions[j](item)
            return item

        group.append((mask, act))
    seen = set()
    out = []
    for it in items:
        if it in seen:
            continue
        orbit_set = {}
        stab = []
        for mask, act in group:
            img = act(it)
            if img == it:
                stab.append(mask)
            orbit_set.setdefault(img, None)
        orbit = list(orbit_set)
        seen.update(orbit)
        out.append((orbit, stab))
    return out


def stabilizer_factor(base: BaseField, stab_masks: list[int], basis_classes: tuple[SquareClass, ...]) -> MultiQuadFactor:
    """Fixed-field factor of a stabilizer subgroup: classes annihilating it."""
    s = len(basis_classes)
    null = _f2_nullspace(stab_masks, s)
    classes = []
    for v in _f2_reduce(null):
        cls = SquareClass(base, 1)
        for j in range(s):
            if (v >> j) & 1:
                cls = cls * basis_classes[j]
        classes.append(cls)
    return MultiQuadFactor(tuple(classes))


def orbits(galois_set: GaloisSet) -> OrbitDecomposition:
    """Decompose the point set into orbits with their field factors."""
    base = galois_set.base
    n = galois_set.size
    if galois_set.group_kind == "cyclic":
        g = galois_set.generators[0]
        out = [
            (frozenset(orb), FiniteFactor(len(orb)))
            for orb in cyclic_orbits(range(n), lambda i: g[i])
        ]
        return OrbitDecomposition(base, tuple(out))
    actions = [lambda i, g=g: g[i] for g in galois_set.generators]
    out = []
    for orbit, stab in e2_orbits(range(n), actions):
        factor = stabilizer_factor(base, stab, galois_set.basis_classes)
        if factor.degree != len(orbit):
            raise AssertionError("orbit size does not match fixed-field degree")
        out.append((frozenset(orbit), factor))
    return OrbitDecomposition(base, tuple(out))


def algebra_of_decomposition(decomp: OrbitDecomposition) -> EtaleAlgebra:
    return EtaleAlgebra(decomp.base, tuple(f for _, f in decomp.orbits))


# ---------------------------------------------------------------------------
# Trace forms and scaled transfers
# ---------------------------------------------------------------------------


# Explicit Gram computations are bounded; beyond the cap only plain trace
# forms are needed (orbit factors of subset actions) and the closed form
# applies: disc(F_{q^m}/F_q) is a square iff the m-cycle is even, i.e. m odd.
# The two routes are cross-checked on the full overlap range in the tests.
GRAM_DEGREE_CAP = 16


@lru_cache(maxsize=None)
def _trace_form_ff(q: int, m: int) -> GWElement:
    field = BaseField.finite(q)
    if m == 1:
        return gw_unit(field, 1)
    if m > GRAM_DEGREE_CAP:
        return GWElement.make(field, {1: m - (m + 1) % 2, U: (m + 1) % 2})
    sums = newton_trace_sums(q, m, 2 * m - 2)
    gram = [[sums[i + j] for j in range(m)] for i in range(m)]
    return _classify_gf_diagonal(field, diagonalize_symmetric(gf(q), gram))


def _classify_gf_diagonal(field: BaseField, diag) -> GWElement:
    F = gf(field.q)
    out: dict = {}
    for d in diag:
        if d == F.zero:
            raise ValueError("degenerate bilinear form")
        rep = 1 if F.is_square(d) else U
        out[rep] = out.get(rep, 0) + 1
    return GWElement.make(field, out)


@lru_cache(maxsize=None)
def _scaled_trace_ff(q: int, m: int, cls_rep) -> GWElement:
    field = BaseField.finite(q)
    if m == 1:
        return gw_unit(field, SquareClass(field, cls_rep))
    if m > GRAM_DEGREE_CAP:
        raise UnsupportedExtension(f"scaled transfers are computed up to degree {GRAM_DEGREE_CAP}")
    F = gf(q)
    e = (F.one,) if cls_rep == 1 else find_nonsquare_poly(q, m)
    sums = newton_trace_sums(q, m, 2 * m - 2 + len(e) - 1)
    gram = [
        [_dot_sum(F, e, sums, i + j) for j in range(m)]
        for i in range(m)
    ]
    return _classify_gf_diagonal(field, diagonalize_symmetric(gf(q), gram))


def _dot_sum(F, e, sums, k):
    acc = F.zero
    for t, et in enumerate(e):
        if et != F.zero:
            acc = F.add(acc, F.mul(et, sums[k + t]))
    return acc


def trace_form(algebra: EtaleAlgebra) -> GWElement:
    """The class of (x, y) |-> Tr_{A/k}(xy) in GW(k)."""
    out = gw_zero(algebra.base)
    for f in algebra.factors:
        out = out + _trace_form_factor(algebra.base, f)
    return out


def _trace_form_factor(base: BaseField, factor: Factor) -> GWElement:
    if isinstance(factor, FiniteFactor):
        return _trace_form_ff(base.q, factor.m)
    t = len(factor.classes)
    two_t = sq_class(base, 2) ** t
    entries: dict = {}
    for mask in range(2**t):
        cls = two_t
        for i, c in enumerate(factor.classes):
            if (mask >> i) & 1:
                cls = cls * c
        entries[cls.rep] = entries.get(cls.rep, 0) + 1
    return GWElement.make(base, entries)


def scaled_trace(base: BaseField, factor: Factor, e) -> GWElement:
    """Tr_{E/k} of the rank-1 form <e> on the factor E.

    Over F_q, ``e`` is a square class of F_{q^m}.  For a quadratic factor
    k(sqrt a), ``e`` is given by coordinates (e0, e1) in the basis {1, sqrt a}
    (a bare value means e1 = 0).  Deeper factors are unsupported.
    """
    if isinstance(factor, FiniteFactor):
        rep = _ext_class_rep(base, factor.m, e)
        return _scaled_trace_ff(base.q, factor.m, rep)
    if len(factor.classes) == 0:
        cls = e if isinstance(e, SquareClass) else sq_class(base, e)
        return gw_unit(base, cls)
    if len(factor.classes) == 1:
        a = Fraction(factor.classes[0].rep)
        if isinstance(e, tuple):
            e0, e1 = Fraction(e[0]), Fraction(e[1])
        else:
            rep = e.rep if isinstance(e, SquareClass) else e
            e0, e1 = Fraction(rep), Fraction(0)
        if e0 == 0 and e1 == 0:
            raise ValueError("e must be a unit of the quadratic factor")
        gram = [[2 * e0, 2 * e1 * a], [2 * e1 * a, 2 * e0 * a]]
        diag = diagonalize_symmetric(FractionOps(), gram)
        return gw_form(base, *[d for d in diag])
    raise UnsupportedExtension("transfers from nested multiquadratic factors are not supported")


def _ext_class_rep(base: BaseField, m: int, e):
    if isinstance(e, SquareClass):
        if e.field != BaseField.finite(base.q**m):
            raise FieldMismatch(f"class of {e.field}, expected F_{base.q**m}")
        return e.rep
    if e in (1, "u", U):
        return U if e != 1 else 1
    raise TypeError(f"bad extension square class {e!r}")


def transfer(base: BaseField, factor: Factor | None, x: GWElement) -> GWElement:
    """Tr_{E/k} applied termwise to a GW element over the factor field E."""
    if factor is None or (isinstance(factor, MultiQuadFactor) and not factor.classes):
        if x.field != base:
            raise FieldMismatch(f"{x.field} vs {base}")
        return x
    if isinstance(factor, FiniteFactor):
        expected = BaseField.finite(base.q**factor.m)
        if x.field != expected:
            raise FieldMismatch(f"{x.field} vs {expected}")
        out = gw_zero(base)
        for rep, mult in x.terms:
            out = out + mult * _scaled_trace_ff(base.q, factor.m, rep)
        return out
    raise UnsupportedExtension("GW coefficients over number-field extensions are not modeled")


def ext_field(base: BaseField, factor: Factor | None) -> BaseField:
    """The base field of GW coefficients living on the factor."""
    if factor is None or (isinstance(factor, MultiQuadFactor) and not factor.classes):
        return base
    if isinstance(factor, FiniteFactor):
        return BaseField.finite(base.q**factor.m)
    raise UnsupportedExtension("no GW coefficient field for number-field factors")


def class_in_ext(base: BaseField, factor: Factor | None, cls: SquareClass) -> SquareClass:
    """Image of a base square class in the factor's coefficient field."""
    target = ext_field(base, factor)
    if target == base:
        return cls
    # F_q -> F_{q^m}: the non-square class dies exactly when m is even
    m = factor.m
    if cls.rep == U and m % 2 == 0:
        return SquareClass(target, 1)
    return SquareClass(target, cls.rep)


# ---------------------------------------------------------------------------
# Node masses and curve weights
# ---------------------------------------------------------------------------


def mass(delta, base: BaseField, ext: Factor | None = None) -> GWElement:
    """Mass of a node: <N(delta)> over the curve's field of definition.

    ``ext`` is the residue extension k(x)/k(u) of the node (None: trivial).
    ``delta`` is the square class of the tangent-direction discriminant in
    k(x); over a quadratic factor it may be coordinates (d0, d1).
    """
    if ext is None or (isinstance(ext, MultiQuadFactor) and not ext.classes):
        cls = delta if isinstance(delta, SquareClass) else sq_class(base, delta)
        return gw_unit(base, cls)
    if isinstance(ext, FiniteFactor):
        if base.kind != FQ:
            raise UnsupportedExtension("finite factors need a finite base field")
        rep = _ext_class_rep(base, ext.m, delta)
        if ext.m == 1:
            return gw_unit(base, SquareClass(base, rep))
        E = gf_ext(base.q, ext.m)
        el = E.one if rep == 1 else E.find_nonsquare()
        n = E.rel_norm(el)
        F = gf(base.q)
        return gw_unit(base, SquareClass(base, 1 if F.is_square(n) else U))
    if len(ext.classes) == 1:
        if not isinstance(delta, tuple):
            raise TypeError("quadratic-extension masses take coordinates (d0, d1)")
        a = Fraction(ext.classes[0].rep)
        d0, d1 = Fraction(delta[0]), Fraction(delta[1])
        norm = d0 * d0 - a * d1 * d1
        return gw_unit(base, sq_class(base, norm))
    raise UnsupportedExtension("node masses over nested multiquadratic factors are not supported")


def curve_weight(masses, base: BaseField, ext: Factor | None = None) -> GWElement:
    """Tr_{k(u)/k(p)} of the product of node masses (empty product: <1>)."""
    coeff_field = ext_field(base, ext)
    prod = gw_unit(coeff_field, 1)
    for m in masses:
        if m.field != coeff_field:
            raise FieldMismatch(f"{m.field} vs {coeff_field}")
        prod = prod * m
    if isinstance(ext, FiniteFactor) and ext.m > 1:
        return transfer(base, ext, prod)
    return prod
