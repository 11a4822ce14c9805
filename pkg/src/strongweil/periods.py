"""Complex period lattices of minimal models at arbitrary precision.

Conventions: omega_plus generates Lambda ∩ R (positive real),
omega_minus generates Lambda ∩ iR (positive imaginary part);
omega1 = omega_plus and omega2 = (omega_plus + omega_minus)/2 when the
real locus is connected, omega2 = omega_minus otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .curves import Curve
from .errors import PrecisionTooLow

GUARD_BITS = 24


def _agm(a, b, prec: int):
    """Complex AGM with the optimal square-root branch at every step."""
    cap = 4 * prec + 64
    eps = mp.mpf(2) ** (-(prec + GUARD_BITS // 2))
    for _ in range(cap):
        if abs(a - b) <= eps * abs(a):
            return (a + b) / 2
        am = (a + b) / 2
        gm = mp.sqrt(a * b)
        # right choice: |am - gm| <= |am + gm|, ties broken upward
        if abs(am - gm) > abs(am + gm) or (
            abs(am - gm) == abs(am + gm) and mp.im(gm / am) < 0
        ):
            gm = -gm
        a, b = am, gm
    raise PrecisionTooLow(f"AGM did not stabilise within {cap} iterations")


@dataclass(frozen=True)
class PeriodLattice:
    omega_plus: mp.mpf
    omega_minus: mp.mpc
    omega1: mp.mpc
    omega2: mp.mpc
    c_infinity: int
    area: mp.mpf
    precision: int

    def basis(self):
        return self.omega1, self.omega2


def period_lattice(E_min: Curve, precision: int = 128) -> PeriodLattice:
    """AGM periods of a (minimal) integral model at the given bit precision."""
    b2, b4, b6 = int(E_min.b2), int(E_min.b4), int(E_min.b6)
    disc = int(E_min.discriminant)
    c_inf = 2 if disc > 0 else 1
    with mp.workprec(precision + GUARD_BITS * 2):
        roots = mp.polyroots([4, b2, 2 * b4, b6], maxsteps=200, extraprec=60)
        if disc > 0:
            es = sorted((mp.re(r) for r in roots), reverse=True)
            e1, e2, e3 = es
            om_p = mp.pi / _agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2), precision)
            om_m = mp.mpc(0, 1) * mp.pi / _agm(
                mp.sqrt(e1 - e3), mp.sqrt(e2 - e3), precision
            )
            omega1, omega2 = mp.mpc(om_p), mp.mpc(om_m)
        else:
            e1 = min(roots, key=lambda r: abs(mp.im(r)))
            e1 = mp.re(e1)
            others = sorted(
                (r for r in roots if r != e1 and abs(mp.im(r)) > 0),
                key=lambda r: mp.im(r),
            )
            if len(others) != 2:
                others = [r for r in roots if abs(mp.im(r)) > abs(mp.im(e1))]
            beta = mp.re(others[0])
            gamma = abs(mp.im(others[0]))
            A = mp.sqrt((e1 - beta) ** 2 + gamma**2)
            B = e1 - beta
            om_p = mp.pi / _agm(mp.sqrt(A), mp.sqrt((A + B) / 2), precision)
            om_m = mp.mpc(0, 1) * mp.pi / _agm(
                mp.sqrt(A), mp.sqrt((A - B) / 2), precision
            )
            omega1 = mp.mpc(om_p)
            omega2 = (omega1 + om_m) / 2
        area = abs(mp.im(mp.conj(omega1) * omega2))
        lattice = PeriodLattice(
            omega_plus=mp.re(om_p) + 0,
            omega_minus=om_m,
            omega1=omega1,
            omega2=omega2,
            c_infinity=c_inf,
            area=area,
            precision=precision,
        )
        _check_conventions(lattice)
        return lattice


def _check_conventions(L: PeriodLattice):
    tol = mp.mpf(2) ** (-(L.precision // 2))
    assert L.omega_plus > 0
    assert mp.im(L.omega_minus) > 0 and abs(mp.re(L.omega_minus)) < tol
    # |omega+ . omega-| = (2/c_inf) * area
    lhs = abs(L.omega_plus * L.omega_minus)
    rhs = 2 * L.area / L.c_infinity
    assert abs(lhs - rhs) < tol * abs(lhs)


def lattice_contains(L: PeriodLattice, z, eps) -> bool:
    """Is z within eps of an integer combination of (omega1, omega2)?"""
    with mp.workprec(L.precision + GUARD_BITS):
        w1, w2 = L.omega1, L.omega2
        det = mp.re(w1) * mp.im(w2) - mp.re(w2) * mp.im(w1)
        alpha = (mp.re(z) * mp.im(w2) - mp.re(w2) * mp.im(z)) / det
        beta = (mp.re(w1) * mp.im(z) - mp.re(z) * mp.im(w1)) / det
        m, n = mp.nint(alpha), mp.nint(beta)
        return abs(z - (m * w1 + n * w2)) < eps


def gauss_reduce(w1, w2):
    """Reduced oriented basis of Z w1 + Z w2; final tau in the fundamental domain."""
    if abs(w1) < abs(w2):
        w1, w2 = w2, w1
    # now |w2| <= |w1|: reduce w1 against w2 repeatedly
    for _ in range(10000):
        mu = mp.nint((mp.re(w1) * mp.re(w2) + mp.im(w1) * mp.im(w2)) / abs(w2) ** 2)
        w1 = w1 - mu * w2
        if abs(w1) >= abs(w2):
            break
        w1, w2 = w2, w1
    else:
        raise PrecisionTooLow("lattice reduction did not terminate")
    # orient: Im(w1'/w2') with basis (larger, smaller) -> use (w2, w1) so that
    # tau = w1/w2 has |tau| >= 1; ensure Im(tau) > 0
    wa, wb = w2, w1  # |wa| <= |wb|
    if mp.im(wb / wa) < 0:
        wb = -wb
    return wa, wb


def tau_of_basis(wa, wb):
    tau = wb / wa
    # shift into |Re| <= 1/2
    tau = tau - mp.nint(mp.re(tau))
    return tau


def eisenstein_c4_c6(w1, w2, precision: int):
    """c4 and c6 of the complex torus C / (Z w1 + Z w2)."""
    with mp.workprec(precision + GUARD_BITS * 2):
        wa, wb = gauss_reduce(mp.mpc(w1), mp.mpc(w2))
        tau = tau_of_basis(wa, wb)
        q = mp.exp(2j * mp.pi * tau)
        eps = mp.mpf(2) ** (-(precision + GUARD_BITS))
        e4 = mp.mpc(1)
        e6 = mp.mpc(1)
        n = 1
        qn = q
        while abs(qn) * (n + 1) ** 6 > eps and n < 10000:
            s3 = sum(d**3 for d in _divisors_small(n))
            s5 = sum(d**5 for d in _divisors_small(n))
            e4 += 240 * s3 * qn
            e6 -= 504 * s5 * qn
            n += 1
            qn *= q
        fac = 2 * mp.pi / wa
        return fac**4 * e4, fac**6 * e6


def _divisors_small(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
        d += 1
    return out


def weierstrass_p(z, w1, w2, precision: int):
    """Weierstrass p-function of the lattice Z w1 + Z w2 via the q-series."""
    with mp.workprec(precision + GUARD_BITS * 2):
        wa, wb = gauss_reduce(mp.mpc(w1), mp.mpc(w2))
        tau = tau_of_basis(wa, wb)
        # coordinates of z in the (wa, wa*tau) basis
        wbt = wa * tau
        det = mp.re(wa) * mp.im(wbt) - mp.re(wbt) * mp.im(wa)
        alpha = (mp.re(z) * mp.im(wbt) - mp.re(wbt) * mp.im(z)) / det
        beta = (mp.re(wa) * mp.im(z) - mp.re(z) * mp.im(wa)) / det
        alpha -= mp.nint(alpha)
        beta -= mp.nint(beta)
        q = mp.exp(2j * mp.pi * tau)
        u = mp.exp(2j * mp.pi * (alpha + beta * tau))
        eps = mp.mpf(2) ** (-(precision + GUARD_BITS))
        total = mp.mpf(1) / 12 + u / (1 - u) ** 2
        n = 1
        qn = q
        while n < 10000:
            t1 = qn * u / (1 - qn * u) ** 2
            t2 = (qn / u) / (1 - qn / u) ** 2
            t3 = 2 * qn / (1 - qn) ** 2
            term = t1 + t2 - t3
            total += term
            if abs(qn) < eps and abs(term) < eps:
                break
            n += 1
            qn *= q
        return (2j * mp.pi / wa) ** 2 * total
