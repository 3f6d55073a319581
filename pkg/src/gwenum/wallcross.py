"""The invariant engine: tables, wall-crossing, degeneration sums, closed forms.

An InvariantTable stores GW-valued counts keyed by (divisor class,
constraint algebra).  wall_cross evaluates

    N(D, d) = N(D) + (<2> - <2d>) * sum_{j >= 1} (-1)^j N(D - j gamma)

with the sum truncated both by the genus bound (j_range) and by the
missing-entry policy; the truncations surface as separate diagnostics.

ProfileData models synthetic degeneration input: per record, a field of
definition ell, an intersection algebra sigma' of degree 2*shift over ell,
and a GW value.  degeneration_sum pairs each record with the enriched
binomial weight of its fiber pair; check_surgery_consistency verifies
that the twisted sum equals the wall-crossing combination of split sums,
one independent evaluation on each side.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

from .binomial import _binom_or_zero, _tbinom_nonsquare, binom
from .errors import (
    DegreeMismatch,
    FieldMismatch,
    MissingEntry,
    MissingEntryWarning,
    NotPerpendicular,
    ParityViolation,
    ProfileInconsistent,
    UnsupportedExtension,
)
from .etale import EtaleAlgebra, FiniteFactor, class_in_ext, ext_field, transfer
from .fields import FQ, REAL, BaseField, SquareClass, sq_class
from .gw import GWElement, gw_eq, gw_from_json, gw_to_json, gw_unit, gw_zero, hyperbolic
from .lattice import (
    Divisor,
    LatticeModel,
    SurgeryModel,
    blowup_lattice,
    dehn_twist,
    dot,
    j_range,
    model_from_json,
    n_points,
    sub,
)

ZERO_WITH_WARNING = "zero"
STRICT = "error"

# profile extensions are transferred through explicit Gram computations
PROFILE_ELL_CAP = 6
PROFILE_SIGMA_CAP = 12


@dataclass
class InvariantTable:
    """(divisor class, constraint algebra) -> GW value, with provenance tags."""

    model: SurgeryModel | LatticeModel
    field: BaseField
    missing_policy: str = ZERO_WITH_WARNING
    entries: dict = dc_field(default_factory=dict)
    algebras: dict = dc_field(default_factory=dict)
    sources: dict = dc_field(default_factory=dict)

    def _key(self, d: Divisor, sigma: EtaleAlgebra):
        if sigma.degree != n_points(self.model, d):
            raise DegreeMismatch(
                f"sigma degree {sigma.degree} != point count {n_points(self.model, d)} for class {d}"
            )
        return (tuple(d), sigma.key())

    def put(self, d: Divisor, sigma: EtaleAlgebra, value: GWElement, source: str = "computed"):
        if value.field != self.field:
            raise FieldMismatch(f"{value.field} vs table field {self.field}")
        key = self._key(d, sigma)
        self.entries[key] = value
        self.algebras[key] = sigma
        self.sources[key] = source

    def get(self, d: Divisor, sigma: EtaleAlgebra, strict: bool | None = None) -> GWElement:
        key = self._key(d, sigma)
        if key in self.entries:
            return self.entries[key]
        if strict or (strict is None and self.missing_policy == STRICT):
            raise MissingEntry(f"no entry for class {d}")
        warnings.warn(f"missing entry for class {d}: treated as 0", MissingEntryWarning, stacklevel=2)
        return gw_zero(self.field)

    def has(self, d: Divisor, sigma: EtaleAlgebra) -> bool:
        try:
            return self._key(d, sigma) in self.entries
        except DegreeMismatch:
            return False

    def classes(self) -> list[Divisor]:
        return sorted({k[0] for k in self.entries})

    def to_json(self) -> dict:
        items = []
        for key in sorted(self.entries, key=lambda k: (k[0], str(k[1]))):
            d, _ = key
            items.append(
                {
                    "class": list(d),
                    "sigma": self.algebras[key].to_json(),
                    "value": gw_to_json(self.entries[key]),
                    "source": self.sources.get(key, "computed"),
                }
            )
        if isinstance(self.model, SurgeryModel):
            model_json = self.model.to_json()
        else:
            model_json = {"model": self.model.name}
        return {
            "model": model_json,
            "field": self.field.to_json(),
            "missing_policy": self.missing_policy,
            "entries": items,
        }

    @staticmethod
    def from_json(obj: dict) -> "InvariantTable":
        model_name = obj["model"]["model"]
        if model_name.startswith("blowup_p2_"):
            model: SurgeryModel | LatticeModel = blowup_lattice(int(model_name.rsplit("_", 1)[1]))
        else:
            model = model_from_json(obj["model"])
        field = BaseField.from_json(obj["field"])
        table = InvariantTable(model, field, obj.get("missing_policy", ZERO_WITH_WARNING))
        for item in obj["entries"]:
            table.put(
                tuple(item["class"]),
                EtaleAlgebra.from_json(item["sigma"]),
                gw_from_json(item["value"]),
                item.get("source", "computed"),
            )
        return table


# ---------------------------------------------------------------------------
# Wall crossing
# ---------------------------------------------------------------------------


@dataclass
class WallCrossDiagnostics:
    genus_window: tuple[int, int] | None = None
    used: list = dc_field(default_factory=list)
    missing: list = dc_field(default_factory=list)


def wall_cross(
    table: InvariantTable,
    d_class: Divisor,
    sigma: EtaleAlgebra,
    d,
    diagnostics: WallCrossDiagnostics | None = None,
) -> GWElement:
    """N(D) + (<2> - <2d>) sum_{j>=1} (-1)^j N(D - j gamma)."""
    model = table.model
    if not isinstance(model, SurgeryModel):
        raise UnsupportedExtension("wall crossing needs a surgery model with a vanishing cycle")
    if dot(model, d_class, model.gamma) != 0:
        raise NotPerpendicular(f"{d_class} is not orthogonal to the vanishing cycle")
    d_cls = d if isinstance(d, SquareClass) else sq_class(table.field, d)
    out = table.get(d_class, sigma)
    window = j_range(model, d_class)
    if diagnostics is not None:
        diagnostics.genus_window = window
    if window is None:
        return out
    two = sq_class(table.field, 2)
    factor = gw_unit(table.field, two) - gw_unit(table.field, two * d_cls)
    for j in range(1, window[1] + 1):
        cls = sub(d_class, model.gamma, j)
        if table.has(cls, sigma):
            term = table.get(cls, sigma)
            if diagnostics is not None:
                diagnostics.used.append(cls)
        else:
            term = table.get(cls, sigma)  # applies the missing policy
            if diagnostics is not None:
                diagnostics.missing.append(cls)
        signed = term if j % 2 == 0 else -term
        out = out + factor * signed
    return out


def dehn_check(table: InvariantTable, d_class: Divisor, sigma: EtaleAlgebra) -> bool:
    """Do the stored values at D and at its Dehn reflection agree?"""
    if not isinstance(table.model, SurgeryModel):
        raise UnsupportedExtension("Dehn checks need a surgery model")
    twisted = dehn_twist(table.model, d_class)
    a = table.get(d_class, sigma, strict=True)
    b = table.get(twisted, sigma, strict=True)
    return gw_eq(a, b)


# ---------------------------------------------------------------------------
# Degeneration profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileRecord:
    """One synthetic degeneration contribution.

    ``ell`` is the field of definition as an extension of the base (None:
    the base itself); ``sigma_prime`` the intersection algebra over ell of
    degree 2*shift; ``value`` the GW-valued count over ell.
    """

    ell: FiniteFactor | None
    sigma_prime: EtaleAlgebra
    shift: int
    value: GWElement


@dataclass(frozen=True)
class ProfileData:
    base: BaseField
    records: tuple[ProfileRecord, ...]

    def __post_init__(self):
        for rec in self.records:
            if rec.ell is not None and self.base.kind != FQ:
                raise UnsupportedExtension(
                    "profile fields of definition beyond the base are supported over F_q only"
                )
            if rec.ell is not None and rec.ell.m > PROFILE_ELL_CAP:
                raise UnsupportedExtension(f"profile extension degree capped at {PROFILE_ELL_CAP}")
            coeff = ext_field(self.base, rec.ell)
            if rec.sigma_prime.base != coeff:
                raise ProfileInconsistent(f"sigma' base {rec.sigma_prime.base} != {coeff}")
            if rec.value.field != coeff:
                raise ProfileInconsistent(f"value field {rec.value.field} != {coeff}")
            if rec.shift < 0 or rec.sigma_prime.degree != 2 * rec.shift:
                raise ProfileInconsistent(
                    f"sigma' degree {rec.sigma_prime.degree} != 2 * shift {rec.shift}"
                )
            if rec.sigma_prime.degree > PROFILE_SIGMA_CAP:
                raise ProfileInconsistent(f"sigma' degree capped at {PROFILE_SIGMA_CAP}")

    @property
    def max_shift(self) -> int:
        return max((rec.shift for rec in self.records), default=0)


def degeneration_sum(profile: ProfileData, d, l: int = 0) -> GWElement:
    """Sum of binomial-weighted profile values, transferred to the base.

    Split twist (d a square): the record with shift i contributes
    binom(sigma', i - l) * value for the fiber pair (i+l, i-l).
    Non-square d: only l = 0 is meaningful (the twisted Picard group is
    the diagonal) and the weight is tbinom(sigma', i, d) <d^i>, with d
    read in the record's field of definition.
    """
    base = profile.base
    d_cls = d if isinstance(d, SquareClass) else sq_class(base, d)
    out = gw_zero(base)
    if not d_cls.is_square and l != 0:
        raise ProfileInconsistent("non-square twists only pair with the diagonal (l = 0)")
    for rec in profile.records:
        coeff = ext_field(base, rec.ell)
        if d_cls.is_square:
            weight = _binom_or_zero(rec.sigma_prime, rec.shift - l)
        else:
            d_ell = class_in_ext(base, rec.ell, d_cls)
            if d_ell.is_square:
                weight = binom(rec.sigma_prime, rec.shift)
            else:
                weight = _tbinom_nonsquare(rec.sigma_prime, rec.shift, d_ell) * gw_unit(
                    coeff, d_ell**rec.shift
                )
        if weight.is_zero_map():
            continue
        out = out + transfer(base, rec.ell, weight * rec.value)
    return out


def check_surgery_consistency(profile: ProfileData, d) -> bool:
    """Twisted sum vs wall-crossing combination of split sums (two routes)."""
    base = profile.base
    d_cls = d if isinstance(d, SquareClass) else sq_class(base, d)
    lhs = degeneration_sum(profile, d_cls, 0)
    two = sq_class(base, 2)
    factor = gw_unit(base, two) - gw_unit(base, two * d_cls)
    corr = gw_zero(base)
    for l in range(1, profile.max_shift + 1):
        term = degeneration_sum(profile, 1, l)
        corr = corr + (term if l % 2 == 0 else -term)
    rhs = degeneration_sum(profile, 1, 0) + factor * corr
    return gw_eq(lhs, rhs)


def random_profile(rng, base: BaseField, max_records: int = 4) -> ProfileData:
    """A random well-formed profile for consistency fuzzing."""
    records = []
    for _ in range(rng.randint(1, max_records)):
        shift = rng.randint(0, 3)
        if base.kind == FQ:
            m = rng.choice([1, 1, 2, 3])
            ell = None if m == 1 else FiniteFactor(m)
            coeff = ext_field(base, ell)
            sigma = _random_fq_algebra(rng, coeff, 2 * shift)
            value = _random_gw(rng, coeff, [1, "u"])
        else:
            ell = None
            coeff = base
            sigma = _random_multiquad_algebra(rng, coeff, 2 * shift)
            pool = [1, -1] if coeff.kind == REAL else [1, -1, 2, 3, 5, -5, 6]
            value = _random_gw(rng, coeff, pool)
        records.append(ProfileRecord(ell, sigma, shift, value))
    return ProfileData(base, tuple(records))


def _random_fq_algebra(rng, field: BaseField, degree: int) -> EtaleAlgebra:
    parts = []
    left = degree
    while left > 0:
        part = rng.randint(1, left)
        parts.append(part)
        left -= part
    return EtaleAlgebra.of(field, parts)


def _random_multiquad_algebra(rng, field: BaseField, degree: int) -> EtaleAlgebra:
    pool = [-1] if field.kind == "r" else [-1, 2, 3, 5]
    specs: list = []
    left = degree
    while left > 0:
        if left >= 2 and rng.random() < 0.6:
            specs.append(sq_class(field, rng.choice(pool)))
            left -= 2
        else:
            specs.append(None)
            left -= 1
    return EtaleAlgebra.of(field, specs)


def _random_gw(rng, field: BaseField, pool) -> GWElement:
    out = gw_zero(field)
    for _ in range(rng.randint(1, 3)):
        out = out + rng.randint(-3, 3) * gw_unit(field, sq_class(field, rng.choice(pool)))
    return out


# ---------------------------------------------------------------------------
# Closed forms for split constraints
# ---------------------------------------------------------------------------


def quadric_split(field: BaseField, gw_count: int, welschinger: int) -> GWElement:
    """Split-constraint value from the count pair: W<1> + ((GW - W)/2) h."""
    if not (gw_count >= welschinger >= 0):
        raise ParityViolation(f"need GW >= W >= 0, got {gw_count}, {welschinger}")
    if (gw_count - welschinger) % 2:
        raise ParityViolation(f"GW and W must have equal parity: {gw_count}, {welschinger}")
    return welschinger * gw_unit(field, 1) + ((gw_count - welschinger) // 2) * hyperbolic(field)


def quadric_general(field: BaseField, gw_count: int, w_plus: int, w_minus: int, d) -> GWElement:
    """W-<1> + ((W+ - W-)/2)(<2> + <2d>) + ((GW - W+)/2) h."""
    if (w_plus - w_minus) % 2 or (gw_count - w_plus) % 2:
        raise ParityViolation(f"inconsistent parities: {gw_count}, {w_plus}, {w_minus}")
    d_cls = d if isinstance(d, SquareClass) else sq_class(field, d)
    two = sq_class(field, 2)
    pair = gw_unit(field, two) + gw_unit(field, two * d_cls)
    return (
        w_minus * gw_unit(field, 1)
        + ((w_plus - w_minus) // 2) * pair
        + ((gw_count - w_plus) // 2) * hyperbolic(field)
    )


def blowup_general(field: BaseField, gw_count: int, w_real: int, w_conj: int, d) -> GWElement:
    """Blow-up variant: real-point and conjugate-point counts play W+/W-."""
    return quadric_general(field, gw_count, w_real, w_conj, d)


def welschinger_reduction(table: InvariantTable, a: int, sigma: EtaleAlgebra, d) -> GWElement:
    """Trade a quadratic point constraint for a blown-up class:

        N(a e0, sigma_d x sigma) = N(a e0, k^2 x sigma) - (<2> - <2d>) N(a e0 - 2 e1, sigma).

    The table lives on the plane blown up at one point (classes a e0 and
    a e0 - 2 e1); sigma has degree 3a - 3.
    """
    if sigma.degree != 3 * a - 3:
        raise DegreeMismatch(f"sigma degree {sigma.degree} != 3a - 3 = {3 * a - 3}")
    field = table.field
    d_cls = d if isinstance(d, SquareClass) else sq_class(field, d)
    split2 = EtaleAlgebra.split(field, 2)
    base_term = table.get((a, 0), split2 * sigma, strict=True)
    blowup_term = table.get((a, -2), sigma)
    two = sq_class(field, 2)
    factor = gw_unit(field, two) - gw_unit(field, two * d_cls)
    return base_term - factor * blowup_term


def conjectural_blowup_reduction(
    table: InvariantTable, d_class: Divisor, e_class: Divisor, sigma: EtaleAlgebra, d
) -> GWElement:
    """CONJECTURAL: the same trade on a general surface, never asserted.

    Evaluates N(D, k^2 x sigma) - (<2> - <2d>) N(D - 2e, sigma) from the
    table; exposed behind an explicit flag for exploration only.
    """
    field = table.field
    d_cls = d if isinstance(d, SquareClass) else sq_class(field, d)
    split2 = EtaleAlgebra.split(field, 2)
    base_term = table.get(d_class, split2 * sigma, strict=True)
    reduced = tuple(x - 2 * e for x, e in zip(d_class, e_class))
    blowup_term = table.get(reduced, sigma)
    two = sq_class(field, 2)
    factor = gw_unit(field, two) - gw_unit(field, two * d_cls)
    return base_term - factor * blowup_term


# ---------------------------------------------------------------------------
# Euler characteristics of the quadric family
# ---------------------------------------------------------------------------


def euler_char_quadric(field: BaseField, d) -> GWElement:
    """h + <2> + <-2d> for the quadric of discriminant d."""
    d_cls = d if isinstance(d, SquareClass) else sq_class(field, d)
    two = sq_class(field, 2)
    minus_two_d = sq_class(field, -1) * two * d_cls
    return hyperbolic(field) + gw_unit(field, two) + gw_unit(field, minus_two_d)


def euler_diff(field: BaseField, d) -> GWElement:
    """chi(discriminant 1) - chi(discriminant d); equals <-1>(<2> - <2d>)."""
    return euler_char_quadric(field, 1) - euler_char_quadric(field, d)
