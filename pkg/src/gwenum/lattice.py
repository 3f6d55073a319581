"""Integer lattice models of the Picard groups in play.

Presets: the quadric surface (hyperbolic plane, rulings e1/e2) and
blow-ups of the plane (e0, e1, ..., em with diagonal form +1, -1, ...).
A surgery model fixes a vanishing cycle gamma with gamma^2 = -2 and
K.gamma = 0; divisor classes are plain integer tuples.

The phi-fiber bookkeeping follows the convention that a class D in
gamma-perp lifts to the base pair (D0, (0,0)); the fiber over D - l*gamma
is the family (D0 - i*E, (i+l, i-l)), stored as (shift i, bidegree)
because E itself is not a class of this lattice.  The recorded ruling
convention maps (0, (1,-1)) to -gamma, making the tuples match; all
downstream sums are checked to be independent of the sign of gamma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import DimensionMismatch, NotPerpendicular

Divisor = tuple[int, ...]


@dataclass(frozen=True)
class LatticeModel:
    name: str
    gram: tuple[tuple[int, ...], ...]
    basis_labels: tuple[str, ...]
    canonical: Divisor

    def __post_init__(self):
        n = len(self.gram)
        for row in self.gram:
            if len(row) != n:
                raise DimensionMismatch("gram matrix must be square")
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if len(self.canonical) != n:
            raise DimensionMismatch("canonical class length mismatch")

    @property
    def rank(self) -> int:
        return len(self.gram)


@dataclass(frozen=True)
class SurgeryModel:
    lattice: LatticeModel
    gamma: Divisor
    perp_basis: tuple[Divisor, ...]
    description: str = ""

    def __post_init__(self):
        if dot(self.lattice, self.gamma, self.gamma) != -2:
            raise ValueError("the vanishing cycle must have self-intersection -2")
        if dot(self.lattice, self.lattice.canonical, self.gamma) != 0:
            raise ValueError("the vanishing cycle must be orthogonal to K")
        for b in self.perp_basis:
            if dot(self.lattice, b, self.gamma) != 0:
                raise ValueError("perp basis vector not orthogonal to gamma")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def to_json(self) -> dict:
        return {
            "model": self.description or self.lattice.name,
            "rank": self.lattice.rank,
            "gamma": list(self.gamma),
            "base_lift": [0, 0],
        }


def quadric_lattice() -> LatticeModel:
    return LatticeModel("quadric", ((0, 1), (1, 0)), ("e1", "e2"), (-2, -2))


def blowup_lattice(m: int) -> LatticeModel:
    gram = tuple(
        tuple((1 if i == 0 else -1) if i == j else 0 for j in range(m + 1)) for i in range(m + 1)
    )
    labels = tuple(f"e{i}" for i in range(m + 1))
    return LatticeModel(f"blowup_p2_{m}", gram, labels, (-3,) + (1,) * m)


def quadric_model() -> SurgeryModel:
    """Pic of the smooth quadric; gamma = e1 - e2, gamma-perp = Z.H."""
    return SurgeryModel(quadric_lattice(), (1, -1), ((1, 1),), "quadric")


def blowup_model() -> SurgeryModel:
    """Plane blown up at a length-2 scheme; gamma = e1 - e2."""
    lat = blowup_lattice(2)
    return SurgeryModel(lat, (0, 1, -1), ((1, 0, 0), (0, 1, 1)), "blowup_p2")


def cubic_model() -> SurgeryModel:
    """Six points on a conic; gamma = 2e0 - e1 - ... - e6.

    Shipped as lattice data only: which twists give well-defined invariants
    on the smoothed cubic is left open.
    """
    lat = blowup_lattice(6)
    gamma = (2,) + (-1,) * 6
    perp = [(1, 0, 0, 0, 0, 0, -2)]
    perp += [tuple(1 if j == i else (-1 if j == 6 else 0) for j in range(7)) for i in range(1, 6)]
    return SurgeryModel(lat, gamma, tuple(perp), "cubic")


MODEL_BUILDERS = {
    "quadric": quadric_model,
    "blowup_p2": blowup_model,
    "cubic": cubic_model,
}


def model_from_json(obj: dict) -> SurgeryModel:
    name = obj["model"]
    if name not in MODEL_BUILDERS:
        raise ValueError(f"unknown surface model {name!r}")
    return MODEL_BUILDERS[name]()


def _check_dim(model, d: Divisor):
    lat = model.lattice if isinstance(model, SurgeryModel) else model
    if len(d) != lat.rank:
        raise DimensionMismatch(f"class length {len(d)} != lattice rank {lat.rank}")
    return lat


def dot(model, d1: Divisor, d2: Divisor) -> int:
    """Intersection product d1 . d2."""
    lat = _check_dim(model, d1)
    _check_dim(model, d2)
    return sum(d1[i] * lat.gram[i][j] * d2[j] for i in range(lat.rank) for j in range(lat.rank))


def n_points(model: SurgeryModel, d: Divisor) -> int:
    """Number of point constraints: -K.D - 1."""
    lat = _check_dim(model, d)
    return -dot(lat, lat.canonical, d) - 1


def adjunction_genus(model, d: Divisor) -> Fraction:
    """Arithmetic genus p_a = D.(K + D)/2 + 1."""
    lat = _check_dim(model, d)
    k_plus_d = tuple(k + x for k, x in zip(lat.canonical, d))
    return Fraction(dot(lat, d, k_plus_d), 2) + 1


def sub(d1: Divisor, d2: Divisor, times: int = 1) -> Divisor:
    return tuple(a - times * b for a, b in zip(d1, d2))


def add(d1: Divisor, d2: Divisor, times: int = 1) -> Divisor:
    return tuple(a + times * b for a, b in zip(d1, d2))


def j_range(model: SurgeryModel, d: Divisor) -> tuple[int, int] | None:
    """Integers j with p_a(D - j*gamma) >= 0, or None if empty.

    With gamma^2 = -2 the genus condition reads
    -2 <= D.K + D^2 - 2j(gamma.D) - 2j^2, a downward parabola in j;
    evaluated by brute scan over a covering window.
    """
    lat = _check_dim(model, d)
    c0 = dot(lat, lat.canonical, d) + dot(lat, d, d) + 2
    g = dot(lat, model.gamma, d)
    disc = g * g + 2 * c0
    if disc < 0:
        return None
    r = isqrt(disc) + 1
    feasible = [
        j for j in range((-g - r) // 2 - 1, (-g + r) // 2 + 2) if 2 * j * j + 2 * g * j - c0 <= 0
    ]
    if not feasible:
        return None
    return (min(feasible), max(feasible))


def dehn_twist(model: SurgeryModel, d: Divisor) -> Divisor:
    """The reflection D -> D + (D.gamma) gamma; fixes gamma-perp, negates gamma."""
    _check_dim(model, d)
    c = dot(model.lattice, d, model.gamma)
    return add(d, model.gamma, c)


def phi_fiber(model: SurgeryModel, d: Divisor, l: int) -> list[tuple[int, tuple[int, int]]]:
    """The fiber over D - l*gamma as (shift i, ruling bidegree (i+l, i-l)).

    Entries are the pairs (D0 - i*E, (i+l, i-l)) relative to the base lift
    (D0, (0, 0)) of D; only genus-feasible shifts are listed (the genus of
    D0 - i*E equals that of D - i*gamma along the base-lift normalization).
    """
    lat = _check_dim(model, d)
    if dot(lat, d, model.gamma) != 0:
        raise NotPerpendicular("the base class must lie in gamma-perp")
    c0 = dot(lat, lat.canonical, d) + dot(lat, d, d) + 2
    # feasible: 2i^2 <= c0
    if c0 < 0:
        return []
    imax = isqrt(c0 // 2)
    return [(i, (i + l, i - l)) for i in range(-imax, imax + 1)]


def fiber_image(model: SurgeryModel, d: Divisor, entry: tuple[int, tuple[int, int]]) -> Divisor:
    """Image in Pic of a fiber pair: D - l*gamma with l = (b1 - b2)/2.

    Uses the recorded convention phi(0, (1,-1)) = -gamma.
    """
    _, (b1, b2) = entry
    if (b1 - b2) % 2:
        raise ValueError("bidegree difference must be even")
    l = (b1 - b2) // 2
    return sub(d, model.gamma, l)


def perp_project(model: SurgeryModel, d: Divisor) -> Divisor:
    """Coordinates of a gamma-orthogonal class in the recorded perp basis."""
    lat = _check_dim(model, d)
    if dot(lat, d, model.gamma) != 0:
        raise NotPerpendicular(f"{d} . gamma != 0")
    basis = model.perp_basis
    # solve sum c_i basis_i = d by integer Gaussian elimination over Q
    n, r = lat.rank, len(basis)
    rows = [[Fraction(basis[j][i]) for j in range(r)] + [Fraction(d[i])] for i in range(n)]
    coords = [Fraction(0)] * r
    col = 0
    pivot_rows = []
    for j in range(r):
        piv = next((i for i in range(col, n) if rows[i][j] != 0), None)
        if piv is None:
            continue
        rows[col], rows[piv] = rows[piv], rows[col]
        pr = rows[col]
        for i in range(n):
            if i != col and rows[i][j] != 0:
                f = rows[i][j] / pr[j]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivot_rows.append((col, j))
        col += 1
    for i, j in pivot_rows:
        coords[j] = rows[i][-1] / rows[i][j]
    for i in range(n):
        if all(rows[i][j] == 0 for j in range(r)) and rows[i][-1] != 0:
            raise NotPerpendicular(f"{d} is not in the span of the perp basis")
    for c in coords:
        if c.denominator != 1:
            raise NotPerpendicular(f"{d} has non-integral perp coordinates")
    return tuple(int(c) for c in coords)
