"""Elliptic curves over Q: models, reduction, conductors, a_p.

Models are Weierstrass quintuples with rational coefficients; global
minimal models are computed with the Laska-Kraus-Connell method and
reduced to the canonical form with a1, a3 in {0,1} and a2 in {-1,0,1},
which doubles as the equality test inside an isogeny class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import SingularCurve, StrongWeilError
from .ntheory import factorint, valuation


@dataclass(frozen=True)
class Curve:
    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    @staticmethod
    def from_ainvs(seq) -> "Curve":
        a1, a2, a3, a4, a6 = (Fraction(x) for x in seq)
        return Curve(a1, a2, a3, a4, a6)

    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    # b- and c-invariants
    @property
    def b2(self):
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self):
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    @property
    def c4(self):
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j(self):
        d = self.discriminant
        if d == 0:
            raise SingularCurve("j-invariant of singular model")
        return self.c4**3 / d

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.ainvs())

    def transform(self, u, r, s, t) -> "Curve":
        """Model in the new coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""
        u, r, s, t = Fraction(u), Fraction(r), Fraction(s), Fraction(t)
        if u == 0:
            raise ValueError("u must be nonzero")
        a1, a2, a3, a4, a6 = self.ainvs()
        na1 = (a1 + 2 * s) / u
        na2 = (a2 - s * a1 + 3 * r - s * s) / u**2
        na3 = (a3 + r * a1 + 2 * t) / u**3
        na4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4
        na6 = (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6
        return Curve(na1, na2, na3, na4, na6)

    def __str__(self):
        return "[" + ",".join(str(x) for x in self.ainvs()) + "]"


_VP_INFINITY = 10**9  # stands in for the valuation of 0


def _vp(x: int, p: int) -> int:
    return _VP_INFINITY if x == 0 else valuation(x, p)


def _kraus_ok2(c4: int, c6: int) -> bool:
    if c6 % 4 == 3:
        return True
    return _vp(c4, 2) >= 4 and c6 % 32 in (0, 8)


def _kraus_ok3(c6: int) -> bool:
    return _vp(c6, 3) != 2


def _model_from_c4c6(c4: int, c6: int) -> Curve:
    """Canonical reduced integral model with the given invariants."""
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4, rem = divmod(b2 * b2 - c4, 24)
    assert rem == 0, "inadmissible c4"
    b6, rem = divmod(-(b2**3) + 36 * b2 * b4 - c6, 216)
    assert rem == 0, "inadmissible c6"
    a1 = b2 % 2
    a3 = b6 % 2
    a2, rem = divmod(b2 - a1, 4)
    assert rem == 0
    a4, rem = divmod(b4 - a1 * a3, 2)
    assert rem == 0
    a6, rem = divmod(b6 - a3, 4)
    assert rem == 0
    E = Curve.from_ainvs((a1, a2, a3, a4, a6))
    assert E.c4 == c4 and E.c6 == c6
    return E


def minimal_model(E: Curve) -> tuple[Curve, Fraction]:
    """Global minimal model in canonical reduced form.

    Returns (E_min, u) with c4(E) = u^4 c4(E_min) and c6(E) = u^6 c6(E_min);
    equivalently the standard isomorphism phi: E -> E_min pulls the Neron
    differential back to u * omega_E.
    """
    if E.discriminant == 0:
        raise SingularCurve(f"singular model {E}")
    # scale to an integral model first
    m = 1
    for i, a in zip((1, 2, 3, 4, 6), E.ainvs()):
        for q, e in factorint(a.denominator).items():
            need = -((-e) // i)  # ceil(e / i)
            have = valuation(m, q) if m % q == 0 else 0
            if need > have:
                m *= q ** (need - have)
    u_total = Fraction(1, m)
    Ei = E.transform(u_total, 0, 0, 0)
    assert Ei.is_integral()
    c4, c6 = int(Ei.c4), int(Ei.c6)
    disc = int(Ei.discriminant)
    for p in sorted(factorint(math.gcd(c4, c6) if c4 and c6 else disc)):
        while True:
            e = min(_vp(c4, p) // 4, _vp(c6, p) // 6, _vp(disc, p) // 12)
            if e <= 0:
                break
            nc4, nc6 = c4 // p**4, c6 // p**6
            if p == 2 and not _kraus_ok2(nc4, nc6):
                break
            if p == 3 and not _kraus_ok3(nc6):
                break
            c4, c6 = nc4, nc6
            disc //= p**12
            u_total *= p
    assert _kraus_ok2(c4, c6) and _kraus_ok3(c6), "minimal invariants inadmissible"
    Emin = _model_from_c4c6(c4, c6)
    assert Emin.discriminant == disc
    return Emin, u_total


def real_components(E: Curve) -> int:
    Emin, _ = minimal_model(E)
    return 2 if Emin.discriminant > 0 else 1


# ---------------------------------------------------------------------------
# Tate's algorithm


@dataclass(frozen=True)
class LocalData:
    p: int
    conductor_exponent: int
    kodaira: str
    split: bool | None  # multiplicative reduction only
    disc_valuation: int


def _find_singular_point(a, p):
    a1, a2, a3, a4, a6 = a
    if p <= 3:
        for x in range(p):
            for y in range(p):
                F = y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6
                if F % p:
                    continue
                Fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
                Fy = 2 * y + a1 * x + a3
                if Fx % p == 0 and Fy % p == 0:
                    return x, y
        raise StrongWeilError(f"no singular point mod {p}")
    # p odd: complete the square; singular x is a multiple root of the cubic
    b2, b4, b6, _ = _binvs(a)
    inv2 = pow(2, p - 2, p)
    for x in range(p):
        if (4 * x**3 + b2 * x * x + 2 * b4 * x + b6) % p:
            continue
        if (12 * x * x + 2 * b2 * x + 2 * b4) % p == 0:
            return x, (-(a1 * x + a3) * inv2) % p
    raise StrongWeilError(f"no singular point mod {p}")


def _translate(a, r, s, t):
    a1, a2, a3, a4, a6 = a
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
    )


def _binvs(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _disc_of(a):
    b2, b4, b6, b8 = _binvs(a)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def _quad_distinct_roots_y(b, c, p):
    """Does Y^2 + b Y - c have distinct roots over the algebraic closure of F_p?"""
    if p == 2:
        return b % 2 == 1
    return (b * b + 4 * c) % p != 0


def _quad_root_y(b, c, p):
    for y in range(p):
        if (y * y + b * y - c) % p == 0:
            return y
    raise StrongWeilError("expected a root")


def _quad_distinct_roots_x(a, b, c, p):
    """Distinct roots of a X^2 + b X + c over closure, a nonzero mod p."""
    if p == 2:
        return b % 2 == 1
    return (b * b - 4 * a * c) % p != 0


def _quad_root_x(a, b, c, p):
    for x in range(p):
        if (a * x * x + b * x + c) % p == 0:
            return x
    raise StrongWeilError("expected a root")


def tate_local(E: Curve, p: int) -> LocalData:
    """Reduction data of the (globally minimal) model at the prime p."""
    assert E.is_integral()
    a = tuple(int(x) for x in E.ainvs())
    disc = _disc_of(a)
    if disc == 0:
        raise SingularCurve("singular curve in tate_local")
    n = _vp(disc, p)
    if n == 0:
        return LocalData(p, 0, "I0", None, 0)
    if p > 1000:
        # f <= 2 for p >= 5; multiplicative iff p does not divide c4
        from .ntheory import kronecker

        b2, b4, b6, _ = _binvs(a)
        c4 = int(E.c4)
        if c4 % p:
            # double root alpha, simple root beta of 4x^3+b2x^2+2b4x+b6;
            # the node is split iff alpha - beta is a square mod p
            alpha = (18 * b6 - b2 * b4) * pow(c4, p - 2, p) % p
            beta = (-b2 * pow(4, p - 2, p) - 2 * alpha) % p
            split = kronecker((alpha - beta) % p, p) == 1
            return LocalData(p, 1, f"I{n}", split, n)
        return LocalData(p, 2, "additive", None, n)
    return _tate_small(a, p, n)


def _tate_small(a, p, n):
    """Classical Tate loop; p is small enough for residue searches."""
    u_scale = 1
    while True:
        disc = _disc_of(a)
        n = _vp(disc, p)
        if n == 0:
            return LocalData(p, 0, "I0", None, 0)
        x0, y0 = _find_singular_point(a, p)
        a = _translate(a, x0, 0, y0)
        b2, b4, b6, b8 = _binvs(a)
        if b2 % p:
            # node: type I_n
            a1, a2, *_ = a
            if p == 2:
                split = a2 % 2 == 0
            else:
                from .ntheory import kronecker

                split = kronecker(b2, p) == 1
            return LocalData(p, 1, f"I{n}", split, n)
        if a[4] % p**2:
            return LocalData(p, n + 1 - 1, "II", None, n)
        if b8 % p**3:
            return LocalData(p, n + 1 - 2, "III", None, n)
        if b6 % p**3:
            return LocalData(p, n + 1 - 3, "IV", None, n)
        # arrange v(a1)>=1, v(a2)>=1, v(a3)>=2, v(a4)>=2, v(a6)>=3
        a = _arrange_star(a, p)
        a1, a2, a3, a4, a6 = a
        # cubic T^3 + (a2/p) T^2 + (a4/p^2) T + (a6/p^3) mod p; repeated or
        # triple roots of a cubic are always rational, so scanning F_p and
        # measuring multiplicity by synthetic division is complete
        P = [_exact_div(a6, p**3) % p, _exact_div(a4, p**2) % p, _exact_div(a2, p) % p, 1]
        T0, mult = 0, 1
        for T in range(p):
            m = _root_multiplicity(P, T, p)
            if m > mult:
                T0, mult = T, m
        if mult == 1:
            return LocalData(p, n + 1 - 5, "I0*", None, n)
        if mult == 2:
            a = _translate(a, p * T0, 0, 0)
            nn, a = _insstar_loop(a, p)
            return LocalData(p, n + 1 - (5 + nn), f"I{nn}*", None, n)
        # triple root
        a = _translate(a, p * T0, 0, 0)
        a1, a2, a3, a4, a6 = a
        if _quad_distinct_roots_y(_exact_div(a3, p**2), _exact_div(a6, p**4), p):
            return LocalData(p, n + 1 - 7, "IV*", None, n)
        y1 = _quad_root_y(_exact_div(a3, p**2), _exact_div(a6, p**4), p)
        a = _translate(a, 0, 0, p**2 * y1)
        a1, a2, a3, a4, a6 = a
        if a4 % p**4:
            return LocalData(p, n + 1 - 8, "III*", None, n)
        if a6 % p**6:
            return LocalData(p, n + 1 - 9, "II*", None, n)
        # non-minimal at p: rescale and restart
        a = tuple(_exact_div(ai, p**i) for ai, i in zip(a, (1, 2, 3, 4, 6)))
        u_scale *= p


def _exact_div(x: int, d: int) -> int:
    q, r = divmod(x, d)
    assert r == 0, "inexact division in Tate step"
    return q


def _root_multiplicity(coeffs, T, p):
    """Multiplicity of T as a root of the ascending-coefficient poly mod p."""
    c = [x % p for x in coeffs]
    m = 0
    while len(c) > 0 and sum(ci * pow(T, i, p) for i, ci in enumerate(c)) % p == 0:
        m += 1
        # synthetic division by (X - T)
        out = [0] * (len(c) - 1)
        carry = 0
        for i in range(len(c) - 1, 0, -1):
            carry = (carry * T + c[i]) % p
            out[i - 1] = carry
        c = out
        if not c:
            break
    return m


def _arrange_star(a, p):
    """Translate so that v(a1)>=1, v(a2)>=1, v(a3)>=2, v(a4)>=2, v(a6)>=3."""
    for s in range(p):
        for t in range(p**3):
            cand = _translate(a, 0, s, t)
            c1, c2, c3, c4_, c6_ = cand
            if (
                c1 % p == 0
                and c2 % p == 0
                and c3 % p**2 == 0
                and c4_ % p**2 == 0
                and c6_ % p**3 == 0
            ):
                return cand
    raise StrongWeilError("Tate step: no arranging translation found")


def _insstar_loop(a, p):
    """Subprocedure for I_n^* types; returns (n, model)."""
    n = 1
    q = 2
    while True:
        a1, a2, a3, a4, a6 = a
        b = _exact_div(a3, p**q)
        c = _exact_div(a6, p ** (2 * q))
        if _quad_distinct_roots_y(b, c, p):
            return n, a
        y1 = _quad_root_y(b % p, c % p, p)
        a = _translate(a, 0, 0, p**q * y1)
        n += 1
        a1, a2, a3, a4, a6 = a
        aa = _exact_div(a2, p)
        bb = _exact_div(a4, p ** (q + 1))
        cc = _exact_div(a6, p ** (2 * q + 1))
        if _quad_distinct_roots_x(aa, bb, cc, p):
            return n, a
        x1 = _quad_root_x(aa % p, bb % p, cc % p, p)
        a = _translate(a, p**q * x1, 0, 0)
        n += 1
        q += 1


@lru_cache(maxsize=None)
def _conductor_of_minimal(ainvs: tuple) -> int:
    E = Curve.from_ainvs(ainvs)
    disc = int(E.discriminant)
    N = 1
    for p in sorted(factorint(disc)):
        ld = tate_local(E, p)
        N *= p**ld.conductor_exponent
    return N


def conductor(E: Curve) -> int:
    """Conductor via Tate's algorithm at every bad prime."""
    Emin, _ = minimal_model(E)
    return _conductor_of_minimal(tuple(Emin.ainvs()))


# ---------------------------------------------------------------------------
# traces of Frobenius and L-series coefficients


def _ap_bruteforce(a, p):
    """Count of smooth points over F_p determines a_p (works for p = 2, 3)."""
    a1, a2, a3, a4, a6 = a
    disc = _disc_of(a)
    singular = disc % p == 0
    npts = 1  # infinity
    sing_count = 0
    for x in range(p):
        for y in range(p):
            F = y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6
            if F % p:
                continue
            Fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
            Fy = 2 * y + a1 * x + a3
            if singular and Fx % p == 0 and Fy % p == 0:
                sing_count += 1
                continue
            npts += 1
    if not singular:
        return p + 1 - npts
    if npts == p - 1:
        return 1
    if npts == p + 1:
        return -1
    assert npts == p, f"unexpected smooth count {npts} at {p}"
    return 0


def ap(E: Curve, p: int) -> int:
    """Trace of Frobenius; +-1 and 0 at multiplicative/additive primes."""
    Emin, _ = minimal_model(E)
    a = tuple(int(x) for x in Emin.ainvs())
    if p < 5:
        return _ap_bruteforce(a, p)
    a1, a2, a3, a4, a6 = a
    # complete the square: (2y + a1x + a3)^2 = 4x^3 + b2x^2 + 2b4x + b6
    b2, b4, b6, _ = _binvs(a)
    squares = bytearray(p)
    for t in range((p + 1) // 2):
        squares[t * t % p] = 1
    total = 0
    for x in range(p):
        d = (4 * x**3 + b2 * x * x + 2 * b4 * x + b6) % p
        if d == 0:
            continue
        total += 1 if squares[d] else -1
    return -total


class AnTable:
    """Memoized L-series coefficients a_n with a_1 = 1.

    Backed either by a curve (point counting) or by any callable p -> a_p,
    which lets Hecke eigenvalue providers reuse the same recursion.
    """

    def __init__(self, curve: Curve | None = None, ap_provider=None, conductor_n=None):
        if curve is not None:
            self.curve, _ = minimal_model(curve)
            self.N = conductor(curve)
            self._ap = lambda p: ap(self.curve, p)
        else:
            if ap_provider is None or conductor_n is None:
                raise ValueError("need curve or (ap_provider, conductor)")
            self.curve = None
            self.N = conductor_n
            self._ap = ap_provider
        self._cache: dict[int, int] = {1: 1}

    def ap(self, p: int) -> int:
        if p not in self._cache:
            self._cache[p] = self._ap(p)
        return self._cache[p]

    def an(self, n: int) -> int:
        if n in self._cache:
            return self._cache[n]
        val = 1
        for p, e in factorint(n).items():
            val *= self._prime_power(p, e)
        self._cache[n] = val
        return val

    def _prime_power(self, p: int, e: int) -> int:
        apv = self.ap(p)
        if self.N % p == 0:
            return apv**e
        prev, cur = 1, apv
        for _ in range(e - 1):
            prev, cur = cur, apv * cur - p * prev
        return cur

    def an_list(self, nmax: int) -> list[int]:
        """[a_1, ..., a_nmax]."""
        return [self.an(n) for n in range(1, nmax + 1)]
