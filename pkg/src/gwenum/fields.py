"""Base fields and square classes.

Three base fields are supported: F_q with q an odd prime power, a real
closed field, and the rationals.  A square class is stored by a canonical
representative:

* F_q        -- 1 or the symbol ``"u"`` (the fixed non-square class);
* real closed -- +1 or -1;
* rationals  -- a square-free nonzero integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .errors import EvenCharacteristic, FieldMismatch, ZeroElement

FQ = "fq"
REAL = "r"
RAT = "q"

U = "u"  # non-square marker over F_q


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division (inputs here are small)."""
    n = abs(n)
    if n == 0:
        raise ZeroElement("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(n: int) -> int:
    """Sign times the product of primes dividing n to an odd power."""
    if n == 0:
        raise ZeroElement("0 has no square class")
    out = -1 if n < 0 else 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return out


def _prime_power(q: int) -> tuple[int, int]:
    """Return (p, n) with q = p^n, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    fac = factorize(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    [(p, n)] = fac.items()
    return p, n


@dataclass(frozen=True)
class BaseField:
    kind: str
    q: int | None = None

    def __post_init__(self):
        if self.kind == FQ:
            if self.q is None or self.q < 3:
                raise ValueError("finite base field needs an odd prime power q >= 3")
            p, _ = _prime_power(self.q)
            if p == 2:
                raise EvenCharacteristic(f"q = {self.q} has characteristic 2")
        elif self.kind in (REAL, RAT):
            if self.q is not None:
                raise ValueError("q only applies to finite fields")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @staticmethod
    def finite(q: int) -> "BaseField":
        return BaseField(FQ, q)

    @staticmethod
    def rationals() -> "BaseField":
        return BaseField(RAT)

    @staticmethod
    def real_closed() -> "BaseField":
        return BaseField(REAL)

    @property
    def char(self) -> int:
        return _prime_power(self.q)[0] if self.kind == FQ else 0

    def __str__(self):
        return {FQ: f"F{self.q}", REAL: "R", RAT: "Q"}[self.kind]

    def to_json(self) -> dict:
        if self.kind == FQ:
            return {"kind": "Fq", "q": self.q}
        return {"kind": "Q" if self.kind == RAT else "R"}

    @staticmethod
    def from_json(obj: dict) -> "BaseField":
        kind = obj["kind"]
        if kind == "Fq":
            return BaseField.finite(int(obj["q"]))
        if kind == "Q":
            return BaseField.rationals()
        if kind == "R":
            return BaseField.real_closed()
        raise ValueError(f"bad field kind {kind!r}")


# A square-class representative: an int, or U over F_q.
ClassRep = int | str


def rep_key(rep: ClassRep) -> tuple:
    """Deterministic sort key: 1, 2, -2, 3, ... and u after all integers."""
    if rep == U:
        return (1, 0, 0)
    return (0, abs(rep), 0 if rep > 0 else 1)


@dataclass(frozen=True)
class SquareClass:
    field: BaseField
    rep: ClassRep

    def __post_init__(self):
        k = self.field.kind
        if k == FQ:
            if self.rep not in (1, U):
                raise ValueError(f"F_q square class must be 1 or {U!r}")
        elif k == REAL:
            if self.rep not in (1, -1):
                raise ValueError("real square class must be +1 or -1")
        else:
            if not isinstance(self.rep, int) or self.rep == 0:
                raise ValueError("rational square class must be a nonzero integer")
            if self.rep != squarefree_part(self.rep):
                raise ValueError(f"{self.rep} is not square-free")

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        k = self.field.kind
        if k == FQ:
            flag = (self.rep == U) ^ (other.rep == U)
            return SquareClass(self.field, U if flag else 1)
        if k == REAL:
            return SquareClass(self.field, self.rep * other.rep)
        return SquareClass(self.field, squarefree_part(self.rep * other.rep))

    def __pow__(self, n: int) -> "SquareClass":
        if n % 2 == 0:
            return SquareClass(self.field, 1)
        return self

    @property
    def is_square(self) -> bool:
        return self.rep == 1

    def __str__(self):
        return str(self.rep)


def _euler_is_square_mod_q(a: int, q: int) -> bool:
    """Euler criterion for an integer residue in F_q, q an odd prime power."""
    p, n = _prime_power(q)
    a %= p
    if a == 0:
        raise ZeroElement(f"{a} vanishes in F_{q}")
    # a lies in the prime field; a^((q-1)/2) = (a^((p-1)/2))^((q-1)/(p-1)).
    legendre = pow(a, (p - 1) // 2, p)
    if legendre == 1:
        return True
    return ((q - 1) // (p - 1)) % 2 == 0


def sq_class(field: BaseField, a) -> SquareClass:
    """Canonical square class of a nonzero element.

    Over the rationals ``a`` may be an int, Fraction, or (num, den) pair;
    denominators are cleared by a square.  Over F_q an int is read as a
    residue and classified by the Euler criterion; the strings "square"/
    "nonsquare"/"u" are accepted as symbolic inputs.
    """
    k = field.kind
    if k == FQ:
        if a in ("u", "nonsquare", U):
            return SquareClass(field, U)
        if a == "square":
            return SquareClass(field, 1)
        if isinstance(a, int):
            return SquareClass(field, 1 if _euler_is_square_mod_q(a, field.q) else U)
        raise TypeError(f"cannot classify {a!r} over {field}")
    if isinstance(a, tuple):
        num, den = a
        a = Fraction(num, den)
    if isinstance(a, Fraction):
        if a == 0:
            raise ZeroElement("0 has no square class")
        a = a.numerator * a.denominator
    if not isinstance(a, int):
        raise TypeError(f"cannot classify {a!r} over {field}")
    if a == 0:
        raise ZeroElement("0 has no square class")
    if k == REAL:
        return SquareClass(field, 1 if a > 0 else -1)
    return SquareClass(field, squarefree_part(a))


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
