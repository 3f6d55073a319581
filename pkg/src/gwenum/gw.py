"""Arithmetic in the Grothendieck-Witt ring GW(k) with decidable equality.

Elements are finite integer combinations of rank-1 classes <a>, with a a
canonical square-class representative.  Addition/multiplication are termwise
resp. bilinear with square-class reduction.  Two elements with different
term maps can still be equal in GW(k); ``gw_eq`` decides equality by a
complete set of invariants:

* F_q          -- rank and discriminant;
* real closed  -- rank and signature;
* rationals    -- rank, signature, discriminant, and Hasse invariants at
                  every relevant place applied to the effective forms
                  x+ + y- vs y+ + x-  (Hasse-Minkowski plus Witt
                  cancellation).

The Hasse invariant convention is s(<a_1,...,a_n>) = prod_{i<j} (a_i,a_j)_p;
only equality is consumed downstream, so any consistent convention works.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import FieldMismatch, ZeroElement
from .fields import (
    FQ,
    RAT,
    REAL,
    U,
    BaseField,
    ClassRep,
    SquareClass,
    factorize,
    rep_key,
    sq_class,
)

INF = "inf"  # the archimedean place


def _as_rep(field: BaseField, a) -> ClassRep:
    if isinstance(a, SquareClass):
        if a.field != field:
            raise FieldMismatch(f"{a.field} vs {field}")
        return a.rep
    return sq_class(field, a).rep


@dataclass(frozen=True)
class GWElement:
    """A formal integer combination of square classes (group completion)."""

    field: BaseField
    terms: tuple[tuple[ClassRep, int], ...]  # sorted by rep, zero multiplicities dropped

    @staticmethod
    def make(field: BaseField, term_map: dict) -> "GWElement":
        items = tuple(sorted(((r, m) for r, m in term_map.items() if m != 0), key=lambda t: rep_key(t[0])))
        return GWElement(field, items)

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.terms)

    def term_map(self) -> dict:
        return dict(self.terms)

    def is_zero_map(self) -> bool:
        return not self.terms

    def _check(self, other: "GWElement"):
        if not isinstance(other, GWElement):
            raise TypeError(f"expected GWElement, got {type(other).__name__}")
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "GWElement") -> "GWElement":
        self._check(other)
        out = self.term_map()
        for r, m in other.terms:
            out[r] = out.get(r, 0) + m
        return GWElement.make(self.field, out)

    def __sub__(self, other: "GWElement") -> "GWElement":
        return self + (-other)

    def __neg__(self) -> "GWElement":
        return GWElement(self.field, tuple((r, -m) for r, m in self.terms))

    def __mul__(self, other):
        if isinstance(other, int):
            return GWElement.make(self.field, {r: m * other for r, m in self.terms})
        self._check(other)
        out: dict = {}
        for r1, m1 in self.terms:
            c1 = SquareClass(self.field, r1)
            for r2, m2 in other.terms:
                rep = (c1 * SquareClass(self.field, r2)).rep
                out[rep] = out.get(rep, 0) + m1 * m2
        return GWElement.make(self.field, out)

    __rmul__ = __mul__

    def canonical(self) -> "GWElement":
        """Field-canonical representative of the same GW class.

        F_q: rank/discriminant normal form (r-e)<1> + e<u>; real closed and
        rationals are already canonical term maps.
        """
        if self.field.kind != FQ:
            return self
        e = sum(m for r, m in self.terms if r == U) % 2
        return GWElement.make(self.field, {1: self.rank - e, U: e})

    def pretty(self, extract_h: bool = False) -> str:
        return pretty(self, extract_h=extract_h)

    def __str__(self):
        return self.pretty()


def gw_zero(field: BaseField) -> GWElement:
    return GWElement(field, ())


def gw_unit(field: BaseField, a) -> GWElement:
    """The rank-1 class <a>."""
    return GWElement.make(field, {_as_rep(field, a): 1})


def gw_form(field: BaseField, *entries) -> GWElement:
    """The diagonal form <a_1> + ... + <a_n>."""
    out: dict = {}
    for a in entries:
        r = _as_rep(field, a)
        out[r] = out.get(r, 0) + 1
    return GWElement.make(field, out)


def hyperbolic(field: BaseField) -> GWElement:
    """h = <1> + <-1>."""
    return gw_form(field, 1, -1)


# ---------------------------------------------------------------------------
# Hilbert symbols over Q
# ---------------------------------------------------------------------------


def _to_int_class(a) -> int:
    """Nonzero rational/SquareClass -> integer of the same square class."""
    if isinstance(a, SquareClass):
        if a.field.kind != RAT:
            raise ValueError("Hilbert symbols are over the rationals")
        return a.rep
    if isinstance(a, Fraction):
        a = a.numerator * a.denominator
    if not isinstance(a, int):
        raise TypeError(f"bad Hilbert symbol argument {a!r}")
    if a == 0:
        raise ZeroElement("Hilbert symbol needs nonzero arguments")
    return a


def _split_val(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert_symbol(a, b, place) -> int:
    """The Hilbert symbol (a, b)_v over Q_v, v a prime or the place "inf"."""
    a, b = _to_int_class(a), _to_int_class(b)
    if place == INF:
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    if p == 2:
        alpha, u = _split_val(a, 2)
        beta, v = _split_val(b, 2)
        eps_u, eps_v = ((u - 1) // 2) % 2, ((v - 1) // 2) % 2
        om_u, om_v = ((u * u - 1) // 8) % 2, ((v * v - 1) // 8) % 2
        return -1 if (eps_u * eps_v + alpha * om_v + beta * om_u) % 2 else 1
    # (a,b)_p = (-1|p)^(alpha beta) (u|p)^beta (v|p)^alpha for odd p
    alpha, u = _split_val(a, p)
    beta, v = _split_val(b, p)
    sgn = 1

    def legendre(n: int) -> int:
        n %= p
        if n == 0:
            raise ZeroElement(f"{n} vanishes mod {p}")
        return 1 if pow(n, (p - 1) // 2, p) == 1 else -1

    if (alpha * beta) % 2:
        sgn *= legendre(-1)
    if beta % 2:
        sgn *= legendre(u)
    if alpha % 2:
        sgn *= legendre(v)
    return sgn


def hilbert_places(*ints) -> list:
    """2, the odd primes dividing any argument, and the archimedean place."""
    primes = {2}
    for n in ints:
        primes.update(factorize(n))
    return sorted(primes) + [INF]


# ---------------------------------------------------------------------------
# Invariants and equality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GWInvariants:
    rank: int
    signature: int | None
    det_class: SquareClass
    hasse: tuple | None  # ((place, +-1), ...) over Q; None elsewhere


def _effective_parts(x: GWElement) -> tuple[dict, dict]:
    pos = {r: m for r, m in x.terms if m > 0}
    neg = {r: -m for r, m in x.terms if m < 0}
    return pos, neg


def _det_rep(field: BaseField, eff: dict) -> ClassRep:
    cls = SquareClass(field, 1)
    for r, m in eff.items():
        cls = cls * SquareClass(field, r) ** m
    return cls.rep


def _signature(eff_pos: dict, eff_neg: dict) -> int:
    s = 0
    for r, m in eff_pos.items():
        s += m if r > 0 else -m
    for r, m in eff_neg.items():
        s -= m if r > 0 else -m
    return s


def _hasse_effective(eff: dict, place) -> int:
    """s(<a_1,...,a_n>) = prod_{i<j}(a_i,a_j)_v for a diagonal multiset.

    Repeated entries are handled mod 2: within one class a of multiplicity m
    the C(m,2) pairs contribute (a,a)_v^(C(m,2)); cross terms (a,b)_v^(m_a m_b).
    """
    reps = [r for r, m in eff.items() if m]
    s = 1
    for i, a in enumerate(reps):
        ma = eff[a]
        if (ma * (ma - 1) // 2) % 2:
            s *= hilbert_symbol(a, a, place)
        for b in reps[i + 1 :]:
            if (ma * eff[b]) % 2:
                s *= hilbert_symbol(a, b, place)
    return s


def gw_invariants(x: GWElement) -> GWInvariants:
    """Rank, signature, discriminant, and (over Q) a Hasse digest.

    The Hasse digest is the Hasse invariant of the total effective form
    x+ + x- at each place of interest; for effective x this is the usual
    Hasse invariant.
    """
    pos, neg = _effective_parts(x)
    field = x.field
    total = dict(pos)
    for r, m in neg.items():
        total[r] = total.get(r, 0) + m
    det = SquareClass(field, _det_rep(field, {r: m for r, m in x.terms}))
    if field.kind == FQ:
        return GWInvariants(x.rank, None, det, None)
    sig = _signature(pos, neg)
    if field.kind == REAL:
        return GWInvariants(x.rank, sig, det, None)
    places = hilbert_places(*total)
    hasse = tuple((p, _hasse_effective(total, p)) for p in places)
    return GWInvariants(x.rank, sig, det, hasse)


def gw_eq(x: GWElement, y: GWElement) -> bool:
    """Sound and complete equality in GW(k) for the supported base fields."""
    if x.field != y.field:
        raise FieldMismatch(f"{x.field} vs {y.field}")
    field = x.field
    if field.kind == FQ:
        return x.rank == y.rank and _det_rep(field, dict(x.terms)) == _det_rep(field, dict(y.terms))
    xp, xn = _effective_parts(x)
    yp, yn = _effective_parts(y)
    if field.kind == REAL:
        return x.rank == y.rank and _signature(xp, xn) == _signature(yp, yn)
    # over Q compare the effective forms A = x+ + y- and B = y+ + x-
    a: dict = dict(xp)
    for r, m in yn.items():
        a[r] = a.get(r, 0) + m
    b: dict = dict(yp)
    for r, m in xn.items():
        b[r] = b.get(r, 0) + m
    if sum(a.values()) != sum(b.values()):
        return False
    if _signature(a, {}) != _signature(b, {}):
        return False
    if _det_rep(field, a) != _det_rep(field, b):
        return False
    for place in hilbert_places(*list(a) + list(b)):
        if _hasse_effective(a, place) != _hasse_effective(b, place):
            return False
    return True


# ---------------------------------------------------------------------------
# Pretty printing and parsing
# ---------------------------------------------------------------------------


def pretty(x: GWElement, extract_h: bool = False) -> str:
    """Render as "6<1> + <2> + <-2> + 2h"; optional greedy h-extraction.

    Extraction pairs literal <1>/<-1> multiplicities and is offered over the
    rationals and real closed fields (over F_q the class of -1 varies with q).
    """
    terms = x.term_map()
    h_count = 0
    if extract_h and x.field.kind in (RAT, REAL):
        h_count = min(terms.get(1, 0), terms.get(-1, 0))
        if h_count > 0:
            terms[1] -= h_count
            terms[-1] -= h_count
    parts: list[tuple[str, str]] = []  # (sign, body)
    for r, m in sorted(terms.items(), key=lambda t: rep_key(t[0])):
        if m == 0:
            continue
        sign = "+" if m > 0 else "-"
        coef = "" if abs(m) == 1 else str(abs(m))
        parts.append((sign, f"{coef}<{r}>"))
    if h_count:
        coef = "" if h_count == 1 else str(h_count)
        parts.append(("+", f"{coef}h"))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<sign>[+-])|(?P<int>\d+)|(?P<h>h)|<\s*(?P<cls>[^<>]+?)\s*>)"
)


def _parse_class(field: BaseField, token: str, d) -> ClassRep:
    token = token.replace(" ", "")
    if token == "u":
        if field.kind != FQ:
            raise ValueError("class u only exists over F_q")
        return U
    if token.endswith("d"):
        if d is None:
            raise ValueError(f"class <{token}> needs a value for d")
        coef_str = token[:-1]
        coef = int(coef_str) if coef_str not in ("", "-") else (-1 if coef_str == "-" else 1)
        d_cls = d if isinstance(d, SquareClass) else sq_class(field, d)
        return (sq_class(field, coef) * d_cls).rep
    return _as_rep(field, int(token))


def parse_gw(text: str, field: BaseField, d=None) -> GWElement:
    """Parse printer output: signed terms m<a>, mh, or bare integers (= m<1>).

    Symbolic class tokens "u", "d", "2d", ... are resolved against the field
    and the optional twist value d.
    """
    text = text.strip()
    if text == "0":
        return gw_zero(field)
    pos = 0
    sign = 1
    pending_int: int | None = None
    out: dict = {}

    def flush_bare():
        nonlocal pending_int, sign
        if pending_int is not None:
            r = _as_rep(field, 1)
            out[r] = out.get(r, 0) + sign * pending_int
            pending_int, sign = None, 1

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        if m.group("sign"):
            flush_bare()
            sign = -1 if m.group("sign") == "-" else 1
        elif m.group("int"):
            if pending_int is not None:
                raise ValueError(f"two adjacent integers in {text!r}")
            pending_int = int(m.group("int"))
        elif m.group("h"):
            coef = pending_int if pending_int is not None else 1
            for a in (1, -1):
                r = _as_rep(field, a)
                out[r] = out.get(r, 0) + sign * coef
            pending_int, sign = None, 1
        else:
            coef = pending_int if pending_int is not None else 1
            r = _parse_class(field, m.group("cls"), d)
            out[r] = out.get(r, 0) + sign * coef
            pending_int, sign = None, 1
    flush_bare()
    return GWElement.make(field, out)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def gw_to_json(x: GWElement) -> dict:
    return {
        "field": x.field.to_json(),
        "terms": [{"class": r, "mult": m} for r, m in x.terms],
    }


def gw_from_json(obj: dict) -> GWElement:
    field = BaseField.from_json(obj["field"])
    out: dict = {}
    for t in obj["terms"]:
        r = t["class"]
        rep = U if r == U else int(r)
        out[rep] = out.get(rep, 0) + int(t["mult"])
    return GWElement.make(field, out)
