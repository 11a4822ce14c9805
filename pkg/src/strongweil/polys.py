"""Dense univariate polynomial helpers over exact coefficients.

Coefficients are ints or Fractions in ascending order; the zero
polynomial is the empty list.  Only the operations the isogeny and
division-polynomial code needs.
"""

from __future__ import annotations

from fractions import Fraction


def trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p) -> int:
    return len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return trim(out)


def sub(p, q):
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] -= c
    return trim(out)


def neg(p):
    return [-c for c in p]


def scale(p, c):
    if c == 0:
        return []
    return [c * x for x in p]


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return trim(out)


def pow_(p, n):
    out = [1]
    base = list(p)
    while n:
        if n & 1:
            out = mul(out, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return out


def divmod_exact(p, q):
    """Quotient and remainder over Q; q must be nonzero."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in p]
    lead = Fraction(q[-1])
    dq = len(q) - 1
    quot = [Fraction(0)] * max(0, len(rem) - dq)
    while len(rem) - 1 >= dq and rem:
        c = rem[-1] / lead
        k = len(rem) - 1 - dq
        quot[k] = c
        for i, b in enumerate(q):
            rem[k + i] -= c * Fraction(b)
        trim(rem)
    return trim(quot), rem


def derivative(p):
    return trim([i * c for i, c in enumerate(p)][1:])


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def monic(p):
    if not p:
        return p
    lead = Fraction(p[-1])
    return [Fraction(c) / lead for c in p]


def gcd(p, q):
    """Monic gcd over Q."""
    a = [Fraction(c) for c in p]
    b = [Fraction(c) for c in q]
    while b:
        _, r = divmod_exact(a, b)
        a, b = b, r
    return monic(a)


def content_den(p) -> int:
    """Lcm of coefficient denominators."""
    import math

    den = 1
    for c in p:
        d = Fraction(c).denominator
        den = den * d // math.gcd(den, d)
    return den


def rational_roots(p) -> list[Fraction]:
    """All rational roots of an integer-coefficient polynomial."""
    from .ntheory import divisors

    q = [int(c) for c in p]
    trim(q)
    if not q:
        raise ValueError("zero polynomial")
    roots = []
    mult_zero = 0
    while q and q[0] == 0:
        mult_zero += 1
        q = q[1:]
    if mult_zero:
        roots.append(Fraction(0))
    if len(q) <= 1:
        return roots
    for num in divisors(q[0]):
        for den in divisors(q[-1]):
            for s in (1, -1):
                cand = Fraction(s * num, den)
                if evaluate(q, cand) == 0 and cand not in roots:
                    roots.append(cand)
    return sorted(roots)
