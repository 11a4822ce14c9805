"""Rational prime-degree isogenies and the oriented class graph.

Kernel polynomials of odd prime degree are found analytically: the
ell+1 cyclic sublattice candidates give floating kernel polynomials via
the Weierstrass p-function, integrality of ell*h filters the rational
ones, and an exact Velu construction certifies every candidate, so no
floating artifact can leak into the results.  Edges are oriented by the
exact pullback scale of Neron differentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from . import polys
from .curves import Curve, ap, conductor, minimal_model
from .errors import NoUniqueSource, NotAKernel, StrongWeilError
from .ntheory import kronecker, primes_up_to
from .periods import period_lattice, weierstrass_p

MAZUR_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 37, 43, 67, 163)


# ---------------------------------------------------------------------------
# division polynomials


def division_polynomial(E: Curve, ell: int) -> list[int]:
    """psi_ell in Z[x] for odd ell (degree (ell^2-1)/2, leading coeff ell)."""
    assert ell % 2 == 1 and ell >= 3
    assert E.is_integral()
    b2, b4, b6, b8 = (int(x) for x in (E.b2, E.b4, E.b6, E.b8))
    F = [b6, 2 * b4, b2, 4]  # psi_2^2
    # table[k] = psi_k for odd k, psi_k / psi_2 for even k (as x-polynomials)
    table: dict[int, list[int]] = {
        0: [],
        1: [1],
        2: [1],
        3: [b8, 3 * b6, 3 * b4, b2, 3],
        4: [
            b4 * b8 - b6 * b6,
            b2 * b8 - b4 * b6,
            10 * b8,
            10 * b6,
            5 * b4,
            b2,
            2,
        ],
    }

    def psi(k: int) -> list[int]:
        if k in table:
            return table[k]
        m = k // 2
        if k % 2 == 1:
            A, B = psi(m + 2), psi(m)
            C, D = psi(m - 1), psi(m + 1)
            t1 = polys.mul(A, polys.pow_(B, 3))
            t2 = polys.mul(C, polys.pow_(D, 3))
            if m % 2 == 0:
                # A, B carry a psi_2 factor: multiply by F^2
                val = polys.sub(polys.mul(t1, polys.mul(F, F)), t2)
            else:
                val = polys.sub(t1, polys.mul(t2, polys.mul(F, F)))
        else:
            A, B = psi(m + 2), psi(m - 1)
            C, D = psi(m - 2), psi(m + 1)
            inner = polys.sub(
                polys.mul(A, polys.mul(B, B)), polys.mul(C, polys.mul(D, D))
            )
            val = polys.mul(psi(m), inner)
        table[k] = val
        return val

    out = psi(ell)
    assert polys.degree(out) == (ell * ell - 1) // 2
    assert out[-1] == ell
    return out


# ---------------------------------------------------------------------------
# Velu construction with exact verification


def velu(E: Curve, kernel_poly) -> tuple[Curve, Fraction]:
    """Codomain of the normalised isogeny with the given kernel polynomial.

    Returns (E_target_minimal, alpha) with pi^* omega_target = alpha omega_E
    on minimal models; raises NotAKernel if the polynomial does not define
    an isogeny.
    """
    Emin, u0 = minimal_model(E)
    if Emin != E:
        raise ValueError("velu expects a minimal model")
    h = [Fraction(c) for c in kernel_poly]
    if not h or h[-1] != 1:
        raise NotAKernel("kernel polynomial must be monic")
    d = polys.degree(h)
    ell = 2 * d + 1 if d >= 1 else 1
    a1, a2, a3, a4, a6 = E.ainvs()
    b2, b4, b6 = E.b2, E.b4, E.b6
    if d == 1 and _is_two_torsion_kernel(E, h):
        ell = 2
        x0 = -h[0]
        y0 = -(a1 * x0 + a3) / 2
        t = 3 * x0 * x0 + 2 * a2 * x0 + a4 - a1 * y0
        w = x0 * t
        EV = Curve(a1, a2, a3, a4 - 5 * t, a6 - b2 * t - 7 * w)
        P = polys.add(polys.mul([0, 1], h), [t])  # x*h + t
        Q = h
    else:
        p1 = -h[-2] if d >= 1 else Fraction(0)
        e2 = h[-3] if d >= 2 else Fraction(0)
        e3 = -h[-4] if d >= 3 else Fraction(0)
        p2 = p1 * p1 - 2 * e2
        p3 = p1**3 - 3 * p1 * e2 + 3 * e3
        t = 6 * p2 + b2 * p1 + d * b4
        w = 10 * p3 + 2 * b2 * p2 + 3 * b4 * p1 + d * b6
        EV = Curve(a1, a2, a3, a4 - 5 * t, a6 - b2 * t - 7 * w)
        hp = polys.derivative(h)
        # S_m = sum_i x_i^m h/(x - x_i)
        S0 = hp
        S1 = polys.sub(polys.mul([0, 1], hp), polys.scale(h, d))
        S2 = polys.sub(polys.mul([0, 0, 1], hp), polys.mul(h, [p1, d]))
        S3 = polys.sub(polys.mul([0, 0, 0, 1], hp), polys.mul(h, [p2, p1, d]))
        T = polys.add(
            polys.add(polys.scale(S2, 6), polys.scale(S1, b2)), polys.scale(S0, b4)
        )
        U1 = polys.add(
            polys.add(polys.scale(S3, 4), polys.scale(S2, b2)),
            polys.add(polys.scale(S1, 2 * b4), polys.scale(S0, b6)),
        )
        h2 = polys.mul(h, h)
        P = polys.add(
            polys.add(polys.mul([0, 1], h2), polys.mul(polys.sub(T, polys.derivative(U1)), h)),
            polys.mul(U1, hp),
        )
        Q = h2
    _verify_isogeny(E, EV, P, Q, ell)
    ET, uV = minimal_model(EV)
    return ET, Fraction(uV)


def _is_two_torsion_kernel(E: Curve, h) -> bool:
    x0 = -h[0]
    val = (
        4 * x0**3 + E.b2 * x0 * x0 + 2 * E.b4 * x0 + E.b6
    )
    return val == 0


def _verify_isogeny(E: Curve, EV: Curve, P, Q, ell: int):
    """Certify that x -> P/Q extends to an isogeny E -> EV of degree ell."""
    g = polys.gcd(P, Q)
    if polys.degree(g) > 0:
        P, _ = polys.divmod_exact(P, g)
        Q, _ = polys.divmod_exact(Q, g)
    if max(polys.degree(P), polys.degree(Q)) != ell or polys.degree(P) <= polys.degree(Q):
        raise NotAKernel("isogeny degree mismatch")
    a1, a2, a3 = E.a1, E.a2, E.a3
    a4p, a6p = EV.a4, EV.a6
    b2, b4, b6 = E.b2, E.b4, E.b6
    gpoly = [b6, 2 * b4, b2, 4]
    Pd = polys.derivative(P)
    Qd = polys.derivative(Q)
    W = polys.sub(polys.mul(Pd, Q), polys.mul(P, Qd))
    lhs = polys.mul(polys.mul(W, W), gpoly)
    t1 = polys.add(polys.scale(P, a1), polys.scale(Q, a3))
    lhs = polys.sub(lhs, polys.mul(polys.mul(Q, Q), polys.mul(t1, t1)))
    cubic = polys.add(
        polys.add(polys.pow_(P, 3), polys.scale(polys.mul(polys.mul(P, P), Q), a2)),
        polys.add(
            polys.scale(polys.mul(P, polys.mul(Q, Q)), a4p),
            polys.scale(polys.pow_(Q, 3), a6p),
        ),
    )
    lhs = polys.sub(lhs, polys.scale(polys.mul(Q, cubic), 4))
    if lhs:
        raise NotAKernel("isogeny identity failed")


# ---------------------------------------------------------------------------
# kernel polynomials


def _two_isogeny_kernels(E: Curve) -> list[list[Fraction]]:
    b2, b4, b6 = (int(x) for x in (E.b2, E.b4, E.b6))
    roots = polys.rational_roots([b6, 2 * b4, b2, 4])
    return [[-x0, Fraction(1)] for x0 in sorted(roots)]


def _has_isogeny_chance(E: Curve, ell: int, N: int) -> bool:
    """Necessary condition: Frobenius has an eigenvalue mod ell everywhere."""
    if ell <= 7:
        return True
    for p in primes_up_to(60):
        if N % p == 0 or p == ell:
            continue
        a = ap(E, p)
        disc = (a * a - 4 * p) % ell
        if disc and kronecker(disc, ell) == -1:
            return False
    return True


def kernel_polynomials(E: Curve, ell: int, precision: int = 192) -> list[list[Fraction]]:
    """Monic kernel polynomials of the rational ell-isogenies from E."""
    assert ell in MAZUR_PRIMES, f"unsupported isogeny degree {ell}"
    Emin, _ = minimal_model(E)
    if Emin != E:
        raise ValueError("kernel_polynomials expects a minimal model")
    if ell == 2:
        return _two_isogeny_kernels(E)
    d = (ell - 1) // 2
    found: list[list[Fraction]] = []
    prec = precision
    while True:
        with mp.workprec(prec + 48):
            L = period_lattice(E, prec)
            w1, w2 = L.omega1, L.omega2
            b2_12 = mp.mpf(int(E.b2)) / 12
            candidates = [(1, 0)] + [(k, 1) for k in range(ell)]
            maxmag = mp.mpf(1)
            results = []
            for a, b in candidates:
                z = (a * w1 + b * w2) / ell
                xs = []
                for j in range(1, d + 1):
                    xj = weierstrass_p(j * z, w1, w2, prec) - b2_12
                    xs.append(xj)
                # h = prod (x - x_j), ascending coefficients
                coeffs = [mp.mpc(1)]
                for xj in xs:
                    new = [mp.mpc(0)] * (len(coeffs) + 1)
                    for i, c in enumerate(coeffs):
                        new[i + 1] += c
                        new[i] -= c * xj
                    coeffs = new
                mag = max(abs(c) for c in coeffs)
                maxmag = max(maxmag, mag)
                results.append(coeffs)
            if prec < mp.log(maxmag, 2) + 96:
                prec = int(2 * prec)
                if prec > 4096:
                    raise StrongWeilError("kernel search exceeded precision cap")
                continue
            tol = mp.mpf(2) ** -40
            for coeffs in results:
                ok = True
                intpoly: list[Fraction] = []
                for c in coeffs[:-1]:
                    scaled = mp.mpc(c) * ell
                    if abs(mp.im(scaled)) > tol:
                        ok = False
                        break
                    m = mp.nint(mp.re(scaled))
                    if abs(mp.re(scaled) - m) > tol:
                        ok = False
                        break
                    intpoly.append(Fraction(int(m), ell))
                if not ok:
                    continue
                h = intpoly + [Fraction(1)]
                if h in found:
                    continue
                try:
                    velu(E, h)
                except NotAKernel:
                    continue
                found.append(h)
            return sorted(found, key=lambda hh: tuple(hh))


# ---------------------------------------------------------------------------
# the isogeny class graph


@dataclass(frozen=True)
class IsogenyEdge:
    source: int
    target: int
    degree: int
    alpha: Fraction  # pullback scale along the admissible direction


@dataclass
class IsogenyClassGraph:
    curves: list[Curve]
    edges: list[IsogenyEdge]
    adjacency: list[list[int]]

    def undirected_neighbours(self, i: int):
        for e in self.edges:
            if e.source == i:
                yield e.target, e
            elif e.target == i:
                yield e.source, e


def isogeny_class(E: Curve, precision: int = 192) -> IsogenyClassGraph:
    """Breadth-first closure under rational prime-degree isogenies."""
    E0, _ = minimal_model(E)
    N = conductor(E0)
    curves = [E0]
    index = {E0.ainvs(): 0}
    raw_edges: dict[tuple[int, int, int], Fraction] = {}
    queue = [0]
    while queue:
        i = queue.pop(0)
        cur = curves[i]
        for ell in MAZUR_PRIMES:
            if not _has_isogeny_chance(cur, ell, N):
                continue
            for h in kernel_polynomials(cur, ell, precision):
                target, alpha = velu(cur, h)
                key = target.ainvs()
                if key not in index:
                    index[key] = len(curves)
                    curves.append(target)
                    queue.append(index[key])
                j = index[key]
                raw_edges[(i, j, ell)] = alpha
        if len(curves) > 16:
            raise StrongWeilError("isogeny class larger than expected")
    # orient: keep the direction with |alpha| = 1
    edges = []
    seen_pairs = set()
    for (i, j, ell), alpha in sorted(raw_edges.items()):
        pair = (min(i, j), max(i, j), ell)
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        dual = raw_edges.get((j, i, ell))
        if dual is not None:
            if abs(alpha * dual) != ell:
                raise StrongWeilError(
                    f"dual isogeny scales inconsistent: {alpha} * {dual} != +-{ell}"
                )
        if abs(alpha) == 1:
            edges.append(IsogenyEdge(i, j, ell, alpha))
        elif abs(alpha) == ell:
            if dual is None:
                raise StrongWeilError("missing dual for non-admissible direction")
            edges.append(IsogenyEdge(j, i, ell, dual))
        else:
            raise StrongWeilError(f"unexpected pullback scale {alpha}")
    n = len(curves)
    adjacency = [[0] * n for _ in range(n)]
    for e in edges:
        adjacency[e.source][e.target] = e.degree
    return IsogenyClassGraph(curves, sorted(edges, key=lambda e: (e.source, e.target)), adjacency)


def graph_source(G: IsogenyClassGraph) -> int:
    """Unique vertex of the oriented graph with no incoming edge."""
    incoming = {e.target for e in G.edges}
    sources = [i for i in range(len(G.curves)) if i not in incoming]
    if len(sources) != 1:
        raise NoUniqueSource(f"graph sources: {sources}")
    return sources[0]
