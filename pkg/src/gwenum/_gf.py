"""Exact arithmetic in small finite fields of odd characteristic.

Internal plumbing behind trace forms and norms.  A field is either the
prime field Z/p (elements: ints) or an extension of a supported field by
an irreducible monic polynomial (elements: tuples of base elements in the
power basis 1, t, ..., t^{m-1}).  Towers are shallow: GF(q) over Z/p and
one relative layer GF(q^m) over GF(q).

Element representations are canonical, so ``==`` on raw representations
is field equality.  All searches (irreducible modulus, non-square) are
deterministic, making every downstream value reproducible.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

from .fields import _prime_power, factorize


class PrimeField:
    def __init__(self, p: int):
        self.p = p
        self.size = p
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def pow(self, a, n: int):
        return pow(a, n, self.p)

    def from_int(self, n: int):
        return n % self.p

    def elements(self):
        return iter(range(self.p))

    def is_square(self, a) -> bool:
        if a % self.p == 0:
            raise ZeroDivisionError("0 has no square class")
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def find_nonsquare(self):
        for a in range(2, self.p):
            if not self.is_square(a):
                return a
        raise RuntimeError("no non-square mod p")

    def __repr__(self):
        return f"GF({self.p})"


class ExtField:
    """GF(base.size ** deg) in the power basis over ``base``."""

    def __init__(self, base, deg: int):
        self.base = base
        self.deg = deg
        self.size = base.size**deg
        self.modulus = _find_irreducible(base, deg)  # low coeffs of monic f, length deg
        self.zero = tuple(base.zero for _ in range(deg))
        self.one = tuple(base.one if i == 0 else base.zero for i in range(deg))

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.base.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        F, m = self.base, self.deg
        prod_ = [F.zero] * (2 * m - 1)
        for i, ai in enumerate(a):
            if ai == F.zero:
                continue
            for j, bj in enumerate(b):
                prod_[i + j] = F.add(prod_[i + j], F.mul(ai, bj))
        # reduce t^k for k = 2m-2 .. m using t^m = -modulus
        for k in range(2 * m - 2, m - 1, -1):
            c = prod_[k]
            if c == F.zero:
                continue
            prod_[k] = F.zero
            for i, mi in enumerate(self.modulus):
                prod_[k - m + i] = F.sub(prod_[k - m + i], F.mul(c, mi))
        return tuple(prod_[:m])

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverting 0")
        return self.pow(a, self.size - 2)

    def pow(self, a, n: int):
        out, b = self.one, a
        while n:
            if n & 1:
                out = self.mul(out, b)
            b = self.mul(b, b)
            n >>= 1
        return out

    def from_int(self, n: int):
        return self.embed(self.base.from_int(n))

    def elements(self):
        for coeffs in product(*[list(self.base.elements())] * self.deg):
            yield tuple(coeffs)

    def embed(self, x):
        """Base-field element as a constant of the extension."""
        return tuple(x if i == 0 else self.base.zero for i in range(self.deg))

    def constant_part(self, a):
        """Inverse of ``embed`` for elements known to lie in the base field."""
        if any(c != self.base.zero for c in a[1:]):
            raise ValueError(f"{a} is not a base-field constant")
        return a[0]

    def power_basis(self):
        """1, t, ..., t^{deg-1}."""
        return [tuple(self.base.one if i == j else self.base.zero for i in range(self.deg)) for j in range(self.deg)]

    def rel_trace(self, a):
        """Trace to the base field: sum of a^(q^i), q = base size."""
        q = self.base.size
        out, frob = self.zero, a
        for _ in range(self.deg):
            out = self.add(out, frob)
            frob = self.pow(frob, q)
        return self.constant_part(out)

    def rel_norm(self, a):
        """Norm to the base field: a^((q^m - 1)/(q - 1))."""
        q = self.base.size
        return self.constant_part(self.pow(a, (self.size - 1) // (q - 1)))

    def is_square(self, a) -> bool:
        if a == self.zero:
            raise ZeroDivisionError("0 has no square class")
        return self.pow(a, (self.size - 1) // 2) == self.one

    def find_nonsquare(self):
        for x in self.elements():
            if x != self.zero and not self.is_square(x):
                return x
        raise RuntimeError("no non-square found")  # unreachable for odd size

    def __repr__(self):
        return f"GF({self.base.size}^{self.deg})"


# --- polynomials over an abstract coefficient field: lists, ascending degree ---


def _ptrim(F, f):
    while f and f[-1] == F.zero:
        f.pop()
    return f


def _psub(F, a, b):
    n = max(len(a), len(b))
    a = list(a) + [F.zero] * (n - len(a))
    b = list(b) + [F.zero] * (n - len(b))
    return _ptrim(F, [F.sub(x, y) for x, y in zip(a, b)])


def _pdivmod(F, a, b):
    a = _ptrim(F, list(a))
    db, lead_inv = len(b) - 1, F.inv(b[-1])
    q = [F.zero] * max(0, len(a) - db)
    while a and len(a) - 1 >= db:
        c = F.mul(a[-1], lead_inv)
        shift = len(a) - 1 - db
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
        a = _ptrim(F, a)
    return q, a


def _pmulmod(F, a, b, mod):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == F.zero:
            continue
        for j, bj in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return _pdivmod(F, out, mod)[1]


def _pgcd(F, a, b):
    a, b = _ptrim(F, list(a)), _ptrim(F, list(b))
    while b:
        a, b = b, _pdivmod(F, a, b)[1]
    return a


def _ppowmod(F, base, n, mod):
    out = [F.one]
    b = _pdivmod(F, list(base), mod)[1]
    while n:
        if n & 1:
            out = _pmulmod(F, out, b, mod)
        b = _pmulmod(F, b, b, mod)
        n >>= 1
    return out


def _is_irreducible(F, low_coeffs, deg):
    """Is the monic f = x^deg + sum(low_coeffs[i] x^i) irreducible over F?"""
    f = list(low_coeffs) + [F.one]
    q = F.size
    x = [F.zero, F.one]
    if _psub(F, _ppowmod(F, x, q**deg, f), x):
        return False  # x^(q^deg) != x mod f
    for ell in factorize(deg):
        g = _pgcd(F, f, _psub(F, _ppowmod(F, x, q ** (deg // ell), f), x))
        if len(g) - 1 > 0:
            return False
    return True


def _find_irreducible(F, deg):
    """Monic irreducible of the given degree, deterministic per (field, deg).

    Seeded random search (about ``deg`` expected trials); reproducible, so
    the modulus and everything derived from it is stable across runs.
    """
    if deg == 1:
        return (F.zero,)
    import random

    els = list(F.elements())
    rng = random.Random(10007 * F.size + deg)
    for _ in range(20000):
        low = tuple(rng.choice(els) for _ in range(deg))
        if low[0] == F.zero:
            continue  # x divides f
        if _is_irreducible(F, low, deg):
            return low
    raise RuntimeError(f"no irreducible of degree {deg} over {F!r} found")


class FractionOps:
    """Exact-rational adapter matching the finite-field protocol."""

    def __init__(self):
        from fractions import Fraction

        self.zero = Fraction(0)
        self.one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def __repr__(self):
        return "Q"


def diagonalize_symmetric(F, gram):
    """Diagonal entries of a congruent diagonal matrix (char != 2).

    Simultaneous symmetric row/column reduction.  Input rows are not
    mutated.  Zero entries are returned for a degenerate input.
    """
    M = [list(row) for row in gram]
    n = len(M)
    out = []
    for k in range(n):
        if M[k][k] == F.zero:
            j = next((j for j in range(k + 1, n) if M[j][j] != F.zero), None)
            if j is not None:
                M[k], M[j] = M[j], M[k]
                for row in M:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if M[k][j] != F.zero), None)
                if j is None:
                    out.append(F.zero)
                    continue
                # v_k += v_j gives diagonal 2*M[k][j] != 0 away from char 2
                for t in range(n):
                    M[k][t] = F.add(M[k][t], M[j][t])
                for t in range(n):
                    M[t][k] = F.add(M[t][k], M[t][j])
        d = M[k][k]
        out.append(d)
        dinv = F.inv(d)
        for i in range(k + 1, n):
            c = F.mul(M[i][k], dinv)
            if c == F.zero:
                continue
            for t in range(n):
                M[i][t] = F.sub(M[i][t], F.mul(c, M[k][t]))
            for t in range(n):
                M[t][i] = F.sub(M[t][i], F.mul(c, M[t][k]))
    return out


class TableField:
    """GF(q) for a proper prime power, backed by lookup tables on 0..q-1.

    Index i encodes the polynomial element sum(c_j t^j) with i = sum(c_j p^j);
    in particular 0/1 are the additive/multiplicative identities and ints
    0..p-1 coincide with the prime subfield.
    """

    def __init__(self, q: int):
        p, n = _prime_power(q)
        poly = ExtField(PrimeField(p), n)
        self.p, self.q = p, q
        self.size = q
        self.zero, self.one = 0, 1

        def idx(el: tuple) -> int:
            return sum(c * p**j for j, c in enumerate(el))

        els = sorted(poly.elements(), key=idx)
        self._add = [[idx(poly.add(a, b)) for b in els] for a in els]
        self._mul = [[idx(poly.mul(a, b)) for b in els] for a in els]
        self._inv = [0] + [idx(poly.inv(a)) for a in els[1:]]
        self._square = [False] + [poly.is_square(a) for a in els[1:]]
        self._minus1 = p - 1  # index of -1: the constant p-1

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self.neg(b)]

    def neg(self, a):
        return self._mul[a][self._minus1]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverting 0")
        return self._inv[a]

    def pow(self, a, n: int):
        return generic_pow(self, a, n)

    def from_int(self, n: int):
        return n % self.p

    def elements(self):
        return iter(range(self.size))

    def is_square(self, a) -> bool:
        if a == 0:
            raise ZeroDivisionError("0 has no square class")
        return self._square[a]

    def find_nonsquare(self):
        return next(a for a in range(1, self.size) if not self._square[a])

    def __repr__(self):
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def gf(q: int):
    """The field with q elements (q an odd prime power); int-valued elements."""
    p, n = _prime_power(q)
    return PrimeField(p) if n == 1 else TableField(q)


@lru_cache(maxsize=None)
def gf_ext(q: int, m: int):
    """GF(q^m) as a relative extension of gf(q); gf(q) itself for m = 1."""
    if m == 1:
        return gf(q)
    return ExtField(gf(q), m)


@lru_cache(maxsize=None)
def modulus_poly(q: int, m: int) -> tuple:
    """Low coefficients of the canonical monic irreducible of degree m over GF(q)."""
    return _find_irreducible(gf(q), m)


@lru_cache(maxsize=None)
def newton_trace_sums(q: int, m: int, upto: int) -> tuple:
    """Power sums p_k = Tr(t^k) of the degree-m modulus roots, k = 0..upto.

    Newton's identities on the modulus coefficients; every p_k lies in GF(q).
    """
    F = gf(q)
    low = modulus_poly(q, m)
    a = [None] + [low[m - i] if m - i < len(low) else F.zero for i in range(1, m + 1)]
    p = [F.zero] * (upto + 1)
    p[0] = F.from_int(m)
    for k in range(1, upto + 1):
        acc = F.zero
        for i in range(1, min(k - 1, m) + 1):
            acc = F.add(acc, F.mul(a[i], p[k - i]))
        if k <= m:
            acc = F.add(acc, F.mul(F.from_int(k), a[k]))
        p[k] = F.neg(acc)
    return tuple(p)


def poly_is_square(q: int, m: int, e: list) -> bool:
    """Is e (a polynomial in t) a square in GF(q)[t]/(modulus of degree m)?"""
    F = gf(q)
    f = list(modulus_poly(q, m)) + [F.one]
    r = _ppowmod(F, e, (q**m - 1) // 2, f)
    return r == [F.one]


@lru_cache(maxsize=None)
def find_nonsquare_poly(q: int, m: int) -> tuple:
    """A non-square of GF(q^m) as low-degree polynomial coefficients in t.

    For odd m a non-square constant of GF(q) stays a non-square; for even m
    small polynomials are scanned (half of all elements qualify).
    """
    F = gf(q)
    if m % 2 == 1:
        return (F.find_nonsquare(),)
    for c in F.elements():
        cand = [c, F.one]  # t + c
        if not poly_is_square(q, m, cand):
            return tuple(cand)
    for c in F.elements():
        for b in F.elements():
            cand = [c, b, F.one]  # t^2 + b t + c
            if len(cand) > m:
                break
            if not poly_is_square(q, m, cand):
                return tuple(cand)
    raise RuntimeError(f"no small non-square found in GF({q}^{m})")
