"""Weight-2 modular symbols for Gamma_0(N) with integral structure.

The space is presented on Manin symbols indexed by P^1(Z/N); the
relation quotient keeps an exact integral basis (torsion discarded), so
the cuspidal homology lattice, the eigenform lattice and every path
evaluation below are exact rational data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .curves import AnTable, Curve, conductor
from .errors import DimensionNotTwo, StrongWeilError
from .exactla import (
    hnf,
    kernel_integral,
    left_kernel_exact,
    preimage_lattice,
    saturate_span,
    snf,
    solve_in_span,
)
from .ntheory import primes_up_to, psi_index, sturm_cap, xgcd

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# P^1(Z/N)


def p1_normalize(N: int, u: int, v: int) -> tuple[int, int]:
    """Canonical representative of the projective class (u : v) over Z/N."""
    if N == 1:
        return (0, 0)
    u %= N
    v %= N
    if u == 0:
        if math.gcd(v, N) != 1:
            raise ValueError(f"({u}:{v}) not a projective point mod {N}")
        return (0, 1)
    g = math.gcd(u, N)
    uu = u // g
    m = N // g
    if math.gcd(v, g) != 1 and math.gcd(math.gcd(u, v), N) != 1:
        raise ValueError(f"({u}:{v}) not a projective point mod {N}")
    w0 = pow(uu % m, -1, m)
    # lift w0 to a unit modulo N
    w = w0
    while math.gcd(w, N) != 1:
        w += m
    v1 = (w * v) % N
    if g == 1:
        return (g, v1)
    best = None
    for k in range(g):
        mult = 1 + k * m
        if math.gcd(mult, N) != 1:
            continue
        cand = (mult * v1) % N
        if best is None or cand < best:
            best = cand
    return (g, best)


def p1_list(N: int):
    """All canonical representatives, sorted, with an index lookup."""
    seen = {}
    if N == 1:
        return [(0, 0)], {(0, 0): 0}
    reps = set()
    for u in range(N):
        g = math.gcd(u, N)
        for v in range(N):
            if math.gcd(g, math.gcd(v, N)) == 1:
                reps.add(p1_normalize(N, u, v))
    reps = sorted(reps)
    seen = {r: i for i, r in enumerate(reps)}
    return reps, seen


def lift_to_sl2z(c: int, d: int, N: int) -> tuple[int, int, int, int]:
    """Matrix (a, b; c0, d0) of determinant 1 with (c0, d0) = (c, d) mod N."""
    if N == 1:
        return (1, 0, 0, 1)
    c %= N
    d %= N
    if c == 0 and d == 0:
        raise ValueError("invalid symbol")
    if c == 0:
        c0 = 0 if d == 1 else N
        d0 = d
        if math.gcd(c0, d0) != 1:
            c0 = N
        while math.gcd(c0, d0) != 1:
            d0 += N
    else:
        c0, d0 = c, d
        while math.gcd(c0, d0) != 1:
            d0 += N
    g, x, y = xgcd(d0, c0)
    assert g == 1
    # a*d0 - b*c0 = 1
    a, b = x, -y
    assert a * d0 - b * c0 == 1
    return (a, b, c0, d0)


# ---------------------------------------------------------------------------
# cusps


def cusp_normalize(p: int, q: int) -> tuple[int, int]:
    if q == 0:
        return (1, 0)
    if q < 0:
        p, q = -p, -q
    g = math.gcd(abs(p), q)
    return (p // g, q // g)


def cusps_equivalent(N: int, c1: tuple[int, int], c2: tuple[int, int]) -> bool:
    """Gamma_0(N)-equivalence of cusps p1/q1 and p2/q2 (reduced)."""
    p1, q1 = c1
    p2, q2 = c2
    # s_i p_i = 1 mod q_i
    s1 = pow(p1 % q1, -1, q1) if q1 not in (0, 1) else (1 if q1 == 0 else 0)
    s2 = pow(p2 % q2, -1, q2) if q2 not in (0, 1) else (1 if q2 == 0 else 0)
    g = math.gcd(q1 * q2, N)
    return (s1 * q2 - s2 * q1) % g == 0


def cusp_width(N: int, cusp: tuple[int, int]) -> int:
    q = cusp[1]
    return N // math.gcd(q * q, N)


def cusp_scaling_matrix(cusp: tuple[int, int]) -> tuple[int, int, int, int]:
    """sigma in SL2(Z) with sigma(infinity) = cusp."""
    p, q = cusp
    if q == 0:
        return (1, 0, 0, 1)
    g, x, y = xgcd(p, q)
    assert g == 1
    # p*y' - q*x' = 1 with first column (p, q)
    return (p, -y, q, x)


# ---------------------------------------------------------------------------
# symbol space


@dataclass
class SymbolSpace:
    N: int
    p1: list
    p1_index: dict
    lifts: list
    k: int  # rank of the relative homology lattice
    proj: list  # per symbol: sparse {basis_pos: int}
    basis_chains: list  # per basis pos: sparse {symbol: int}
    cusps: list
    cusp_of_symbol: dict = field(repr=False, default=None)
    boundary: list = None  # k x n_cusps
    H_basis: list = None  # rows (2g x k)
    hecke_cache: dict = field(default_factory=dict, repr=False)
    star_matrix: list = None

    @property
    def genus(self) -> int:
        return len(self.H_basis) // 2

    def symbol_sigma(self, i: int) -> int:
        c, d = self.p1[i]
        return self.p1_index[p1_normalize(self.N, d, -c)]

    def symbol_tau(self, i: int) -> int:
        c, d = self.p1[i]
        return self.p1_index[p1_normalize(self.N, d, -c - d)]

    def symbol_star(self, i: int) -> int:
        c, d = self.p1[i]
        return self.p1_index[p1_normalize(self.N, c, -d)]

    def apply_matrix(self, i: int, m) -> int:
        c, d = self.p1[i]
        a_, b_, c_, d_ = m
        return self.p1_index[p1_normalize(self.N, c * a_ + d * c_, c * b_ + d * d_)]

    def project_chain(self, chain: dict) -> list:
        out = [0] * self.k
        for sym, coeff in chain.items():
            for pos, val in self.proj[sym].items():
                out[pos] += coeff * val
        return out


def _relation_quotient(n_sym, sigma, tau):
    """Integral quotient of Z^symbols by the 2- and 3-term relations.

    Returns (proj, basis_chains): proj[symbol] is a sparse row over the
    quotient basis; basis_chains[j] is a sparse symbol-chain mapping to
    the j-th basis vector.
    """
    # step 1: sigma pairing
    gen_of_sym = {}  # symbol -> (gen, sign) or None for zero
    gens = []
    for i in range(n_sym):
        if i in gen_of_sym:
            continue
        j = sigma[i]
        if j == i:
            gen_of_sym[i] = None
        else:
            g = len(gens)
            gens.append(i)
            gen_of_sym[i] = (g, 1)
            gen_of_sym[j] = (g, -1)
    # step 2: tau relations on generators
    rows = {}
    row_id = 0
    gen_rows = {g: set() for g in range(len(gens))}
    seen_orbit = set()
    forced_zero = set()
    for i in range(n_sym):
        if i in seen_orbit:
            continue
        orbit = [i, tau[i], tau[tau[i]]]
        seen_orbit.update(orbit)
        if tau[i] == i:
            if gen_of_sym[i] is not None:
                forced_zero.add(gen_of_sym[i][0])
            continue
        assert tau[orbit[2]] == i, "tau must have order 3"
        row = {}
        for s in orbit:
            gs = gen_of_sym[s]
            if gs is None:
                continue
            g, sign = gs
            row[g] = row.get(g, 0) + sign
        row = {g: c for g, c in row.items() if c}
        if row:
            rows[row_id] = row
            for g in row:
                gen_rows[g].add(row_id)
            row_id += 1
    # forced zeros behave like eliminations with empty expressions
    subs = []  # (gen, expr) in elimination order
    eliminated = set()

    def eliminate(gen, expr):
        subs.append((gen, expr))
        eliminated.add(gen)
        for rid in list(gen_rows[gen]):
            row = rows.get(rid)
            if row is None or gen not in row:
                continue
            coeff = row.pop(gen)
            gen_rows[gen].discard(rid)
            for g2, c2 in expr.items():
                nv = row.get(g2, 0) + coeff * c2
                if nv:
                    row[g2] = nv
                    gen_rows[g2].add(rid)
                else:
                    row.pop(g2, None)
                    gen_rows[g2].discard(rid)
            if not row:
                del rows[rid]
        gen_rows[gen] = set()

    for g in sorted(forced_zero):
        eliminate(g, {})
    progress = True
    while progress:
        progress = False
        for rid in sorted(rows):
            row = rows.get(rid)
            if row is None:
                continue
            if len(row) == 1:
                ((g, c),) = row.items()
                # c * g = 0: torsion, discard
                del rows[rid]
                gen_rows[g].discard(rid)
                eliminate(g, {})
                progress = True
                continue
            unit_gens = [g for g, c in row.items() if abs(c) == 1]
            if unit_gens:
                g = min(unit_gens)
                c = row[g]
                expr = {g2: -c2 * c for g2, c2 in row.items() if g2 != g}
                del rows[rid]
                for g2 in list(row):
                    gen_rows[g2].discard(rid)
                eliminate(g, expr)
                progress = True
    free = [g for g in range(len(gens)) if g not in eliminated]
    if rows:
        # leftover block without unit pivots: exact Smith quotient
        sub_gens = sorted({g for row in rows.values() for g in row})
        sub_pos = {g: t for t, g in enumerate(sub_gens)}
        M = [[row.get(g, 0) for g in sub_gens] for row in rows.values()]
        D, U, V = snf(M)
        rank = sum(
            1 for t in range(min(len(D), len(sub_gens))) if D[t][t] != 0
        )
        # x = y * V^{-1} with free coordinates y_t for t >= rank; basis of the
        # quotient: columns of V beyond the rank give expressions
        # gen_j = sum_t V[j][t] y_t  -> in torsion-free quotient drop t < rank
        new_ids = {}
        for t in range(rank, len(sub_gens)):
            new_ids[t] = len(gens) + t  # virtual generator ids
        for g in sub_gens:
            expr = {}
            for t in range(rank, len(sub_gens)):
                coeff = V[sub_pos[g]][t]
                if coeff:
                    expr[new_ids[t]] = coeff
            eliminate(g, expr)
        free = [g for g in range(len(gens)) if g not in eliminated]
        virtual = sorted(new_ids.values())
        free_all = free + virtual
        # virtual generator chains: y_t corresponds to x = row t of V^{-1}
        Vinv = _unimodular_inverse(V)
        virtual_chains = {}
        for t in range(rank, len(sub_gens)):
            chain = {}
            for j, g in enumerate(sub_gens):
                coeff = Vinv[t][j]
                if coeff:
                    sym = gens[g]
                    chain[sym] = chain.get(sym, 0) + coeff
            virtual_chains[new_ids[t]] = chain
    else:
        free_all = free
        virtual_chains = {}
    pos_of_gen = {g: t for t, g in enumerate(free_all)}
    # resolve eliminated generators bottom-up
    resolved = {g: {g: 1} for g in free_all}
    for g, expr in reversed(subs):
        acc = {}
        for g2, c2 in expr.items():
            for g3, c3 in resolved[g2].items():
                acc[g3] = acc.get(g3, 0) + c2 * c3
        resolved[g] = {g3: c for g3, c in acc.items() if c}
    proj = []
    for i in range(n_sym):
        gs = gen_of_sym[i]
        if gs is None:
            proj.append({})
            continue
        g, sign = gs
        row = {}
        for g2, c2 in resolved[g].items():
            row[pos_of_gen[g2]] = sign * c2
        proj.append(row)
    basis_chains = []
    for g in free_all:
        if g in virtual_chains:
            basis_chains.append(virtual_chains[g])
        else:
            basis_chains.append({gens[g]: 1})
    return proj, basis_chains


def _unimodular_inverse(V):
    n = len(V)
    H, U = hnf(V)
    # V unimodular: H should be identity
    assert all(H[i][i] == 1 for i in range(n)) and all(
        H[i][j] == 0 for i in range(n) for j in range(n) if i != j
    ), "matrix not unimodular"
    return U


def build_space(N: int, cache_dir: str | None = None) -> SymbolSpace:
    """Manin-symbol presentation of the level-N space with exact structure."""
    if cache_dir:
        cached = _load_cache(N, cache_dir)
        if cached is not None:
            return cached
    p1, p1_index = p1_list(N)
    n_sym = len(p1)
    assert n_sym == psi_index(N) or N == 1
    lifts = [lift_to_sl2z(c, d, N) for (c, d) in p1]
    S = SymbolSpace(
        N=N,
        p1=p1,
        p1_index=p1_index,
        lifts=lifts,
        k=0,
        proj=None,
        basis_chains=None,
        cusps=None,
    )
    sigma = [S.symbol_sigma(i) for i in range(n_sym)]
    tau = [S.symbol_tau(i) for i in range(n_sym)]
    proj, basis_chains = _relation_quotient(n_sym, sigma, tau)
    S.proj = proj
    S.basis_chains = basis_chains
    S.k = len(basis_chains)
    # sanity: proj(basis chain) = unit vector
    for j, chain in enumerate(basis_chains):
        vec = S.project_chain(chain)
        assert vec[j] == 1 and sum(map(abs, vec)) == 1, "inconsistent quotient"
    _build_boundary(S)
    B = S.boundary
    H = kernel_integral(B) if S.k else kernel_integral([[0]])
    if S.k:
        S.H_basis = [list(map(int, row)) for row in H.basis]
    else:
        S.H_basis = []
    S.star_matrix = _star_matrix(S)
    if cache_dir:
        _save_cache(S, cache_dir)
    return S


def _build_boundary(S: SymbolSpace):
    cusps: list[tuple[int, int]] = []
    cusp_index = {}

    def classify(p, q):
        c = cusp_normalize(p, q)
        if c in cusp_index:
            return cusp_index[c]
        for i, rep in enumerate(cusps):
            if cusps_equivalent(S.N, rep, c):
                cusp_index[c] = i
                return i
        cusps.append(c)
        cusp_index[c] = len(cusps) - 1
        return len(cusps) - 1

    rows = []
    for j, chain in enumerate(S.basis_chains):
        acc: dict[int, int] = {}
        for sym, coeff in chain.items():
            a, b, c, d = S.lifts[sym]
            head = classify(a, c)
            tail = classify(b, d)
            acc[head] = acc.get(head, 0) + coeff
            acc[tail] = acc.get(tail, 0) - coeff
        rows.append(acc)
    n_c = len(cusps)
    S.cusps = cusps
    S.boundary = [[row.get(c, 0) for c in range(n_c)] for row in rows]


def _star_matrix(S: SymbolSpace):
    mat = []
    for chain in S.basis_chains:
        acc = [0] * S.k
        for sym, coeff in chain.items():
            img = S.symbol_star(sym)
            for pos, val in S.proj[img].items():
                acc[pos] += coeff * val
        mat.append(acc)
    return mat


def star_involution(S: SymbolSpace):
    """Matrix of the conjugation action on the quotient basis (row action)."""
    return S.star_matrix


# ---------------------------------------------------------------------------
# Hecke operators


def heilbronn_merel(n: int):
    """Integral matrices of determinant n with a > b >= 0, d > c >= 0."""
    out = []
    for a in range(1, n + 1):
        for b in range(a):
            if b == 0:
                if n % a == 0:
                    d = n // a
                    for c in range(d):
                        out.append((a, 0, c, d))
            else:
                # a d - b c = n with d > c >= 0
                for c in range(1, (n // (a - b)) + 1):
                    num = n + b * c
                    if num % a == 0:
                        d = num // a
                        if d > c:
                            out.append((a, b, c, d))
    return out


def hecke_matrix(S: SymbolSpace, p: int):
    """Matrix of T_p acting on chains (rows: image of each basis vector)."""
    if p in S.hecke_cache:
        return S.hecke_cache[p]
    mats = heilbronn_merel(p)
    T = []
    for chain in S.basis_chains:
        acc = [0] * S.k
        for sym, coeff in chain.items():
            for m in mats:
                img = S.apply_matrix(sym, m)
                for pos, val in S.proj[img].items():
                    acc[pos] += coeff * val
        T.append(acc)
    S.hecke_cache[p] = T
    return T


def hecke_dual(S: SymbolSpace, p: int):
    """Matrix of the dual action of T_p on functionals (the transpose)."""
    T = hecke_matrix(S, p)
    return [list(col) for col in zip(*T)]


def hecke_eigenvalue(S: SymbolSpace, p: int, phi_int: list) -> Fraction:
    """a_p of the eigen-functional phi (integer vector in dual coordinates)."""
    mats = heilbronn_merel(p)
    j = next(i for i, x in enumerate(phi_int) if x)
    chain = S.basis_chains[j]
    total = 0
    for sym, coeff in chain.items():
        for m in mats:
            img = S.apply_matrix(sym, m)
            for pos, val in S.proj[img].items():
                total += coeff * val * phi_int[pos]
    return Fraction(total, phi_int[j])


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class PathChain:
    """Formal sum of unimodular paths {g0, g infinity} with the endpoints."""

    terms: tuple  # ((coeff, (a, b, c, d)), ...)
    start: object
    end: object


def _infty_to(r) -> list:
    """Unimodular decomposition of the path {infinity -> r}."""
    if r is None:
        return []
    r = Fraction(r)
    # continued fraction convergents
    p_prev, q_prev = 1, 0
    a0 = math.floor(r)
    p_cur, q_cur = a0, 1
    terms = [(1, (a0, -1, 1, 0))]  # {infinity -> a0}, determinant +1
    x = r - a0
    k = 1
    while x != 0:
        x = 1 / x
        ak = math.floor(x)
        x = x - ak
        p_next = ak * p_cur + p_prev
        q_next = ak * q_cur + q_prev
        s = 1 if k % 2 == 1 else -1
        g = (p_next, s * p_cur, q_next, s * q_cur)
        assert g[0] * g[3] - g[1] * g[2] == 1
        terms.append((1, g))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        k += 1
    assert Fraction(p_cur, q_cur) == r
    return terms


def path_to_chain(a, b) -> PathChain:
    """Decompose {a -> b} into unimodular paths (None denotes infinity)."""
    terms = []
    for coeff, g in _infty_to(a):
        terms.append((-coeff, g))
    for coeff, g in _infty_to(b):
        terms.append((coeff, g))
    return PathChain(terms=tuple(terms), start=a, end=b)


def eval_path(S: SymbolSpace, phi, chain: PathChain) -> Fraction:
    """Exact value of the dual vector phi on the path chain."""
    total = Fraction(0)
    for coeff, g in chain.terms:
        sym = S.p1_index[p1_normalize(S.N, g[2], g[3])]
        for pos, val in S.proj[sym].items():
            total += coeff * val * phi[pos]
    return total


# ---------------------------------------------------------------------------
# eigenspaces


@dataclass
class EigenData:
    space: SymbolSpace
    curve: Curve | None
    dual_basis: list  # two integer rows spanning V_f in dual coordinates
    b_plus: list  # Fraction rows in dual coordinates
    b_minus: list
    lf_in_pm: list  # basis of L_f in (b_plus, b_minus) coordinates (Fractions)
    cut_primes: list


def _eigencut(S: SymbolSpace, ap_of, transpose: bool, cap: int, avoid: int):
    """Iterated kernel cut of (T_p - a_p) until the space is 2-dimensional."""
    basis = None  # rows over Z spanning the current space (in dual coords)
    used = []
    for p in primes_up_to(cap * 20):
        if len(used) >= cap:
            break
        if avoid % p == 0:
            continue
        a_p = ap_of(p)
        T = hecke_matrix(S, p)
        M = [list(row) for row in (zip(*T) if transpose else T)]
        for i in range(S.k):
            M[i][i] -= a_p
        if basis is None:
            rows = M
        else:
            rows = [[sum(b[i] * M[i][j] for i in range(S.k)) for j in range(S.k)] for b in basis]
        kern = left_kernel_exact(rows)
        if basis is None:
            basis = kern
        else:
            basis = [
                [sum(c[t] * basis[t][j] for t in range(len(basis))) for j in range(S.k)]
                for c in kern
            ]
        used.append(p)
        if len(basis) == 2:
            return basis, used
        if len(basis) < 2:
            raise DimensionNotTwo(
                f"eigenspace dimension {len(basis)} at level {S.N} after p={p}"
            )
    raise DimensionNotTwo(
        f"eigenspace did not stabilise at dimension 2 by the Sturm cap at level {S.N}"
    )


def eigenspace(S: SymbolSpace, E: Curve) -> EigenData:
    """The 2-dimensional dual eigenspace of the newform attached to E."""
    N = conductor(E)
    if N != S.N:
        raise ValueError(f"curve has conductor {N}, space has level {S.N}")
    tab = AnTable(curve=E)
    cap = sturm_cap(N)
    dual_basis, used = _eigencut(S, tab.ap, transpose=True, cap=cap, avoid=N)
    return _finish_eigen(S, E, dual_basis, used)


def _finish_eigen(S, E, dual_basis, used) -> EigenData:
    lf = _lf_lattice(S, dual_basis)
    b_plus, b_minus, lf_pm = _star_split(S, lf)
    return EigenData(
        space=S,
        curve=E,
        dual_basis=dual_basis,
        b_plus=b_plus,
        b_minus=b_minus,
        lf_in_pm=lf_pm,
        cut_primes=used,
    )


def _lf_lattice(S: SymbolSpace, dual_basis):
    """Basis of {phi in V_f : phi integral on H} as combinations of dual_basis."""
    H = S.H_basis
    G = [
        [
            Fraction(sum(h[j] * dual_basis[t][j] for j in range(S.k)))
            for t in range(len(dual_basis))
        ]
        for h in H
    ]
    coeff_basis = preimage_lattice(G)
    out = []
    for c in coeff_basis:
        vec = [
            sum(c[t] * Fraction(dual_basis[t][j]) for t in range(len(dual_basis)))
            for j in range(S.k)
        ]
        out.append(vec)
    return out


def _star_split(S: SymbolSpace, lf):
    """Generators of the +1/-1 star eigenlattices inside L_f."""
    Sm = S.star_matrix
    # star acts on functionals by phi -> phi o star: right-multiply by Sm^T,
    # i.e. new[j] = sum_i phi[i] * Sm[j][i]
    images = []
    for phi in lf:
        img = [sum(phi[i] * Sm[j][i] for i in range(S.k)) for j in range(S.k)]
        images.append(img)
    A = []
    for img in images:
        coeffs = solve_in_span(lf, img)
        assert coeffs is not None, "star does not preserve L_f"
        assert all(c.denominator == 1 for c in coeffs)
        A.append([int(c) for c in coeffs])
    out = {}
    for eps in (1, -1):
        M = [[A[i][j] - (eps if i == j else 0) for j in range(2)] for i in range(2)]
        kern = kernel_integral(M)
        assert kern.rank == 1, f"star eigenspace rank {kern.rank}"
        c = [int(x) for x in kern.basis[0]]
        vec = [c[0] * lf[0][j] + c[1] * lf[1][j] for j in range(S.k)]
        # deterministic sign
        lead = next(x for x in vec if x)
        if lead < 0:
            vec = [-x for x in vec]
            c = [-x for x in c]
        out[eps] = (vec, c)
    b_plus, c_plus = out[1]
    b_minus, c_minus = out[-1]
    # L_f in (b+, b-) coordinates: express lf basis through (c_plus, c_minus)
    M = [[Fraction(c_plus[0]), Fraction(c_plus[1])], [Fraction(c_minus[0]), Fraction(c_minus[1])]]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    Minv = [[M[1][1] / det, -M[0][1] / det], [-M[1][0] / det, M[0][0] / det]]
    lf_pm = []
    for i in range(2):
        # lf[i] = x * b_plus + y * b_minus
        x = Minv[0][0] * (1 if i == 0 else 0) + Minv[1][0] * (1 if i == 1 else 0)
        y = Minv[0][1] * (1 if i == 0 else 0) + Minv[1][1] * (1 if i == 1 else 0)
        lf_pm.append([x, y])
    return b_plus, b_minus, lf_pm


def rational_eigenclasses(S: SymbolSpace):
    """All 2-dimensional rational Hecke eigensystems in the dual space.

    Returns a list of (dual_basis, {p: a_p}) pairs, one per isogeny class
    of newforms with rational eigenvalues at this exact level.
    """
    cap = sturm_cap(S.N)
    plist = [p for p in primes_up_to(max(100, cap * 20)) if S.N % p]
    found = []

    def recurse(basis, aps, depth):
        dim = len(basis)
        if dim == 0:
            return
        if dim == 2:
            found.append((basis, dict(aps)))
            return
        if depth >= len(plist) or len(aps) >= cap:
            return
        p = plist[depth]
        T = hecke_matrix(S, p)
        Tt = [list(col) for col in zip(*T)]
        base_rows = [
            [sum(b[i] * Tt[i][j] for i in range(S.k) if b[i]) for j in range(S.k)]
            for b in basis
        ]
        bound = math.isqrt(4 * p)
        for a_p in range(-bound, bound + 1):
            rows = [
                [base_rows[t][j] - a_p * basis[t][j] for j in range(S.k)]
                for t in range(dim)
            ]
            kern = left_kernel_exact(rows)
            if not kern or len(kern) > dim:
                continue
            sub = [
                [sum(c[t] * basis[t][j] for t in range(dim)) for j in range(S.k)]
                for c in kern
            ]
            recurse(sub, aps + [(p, a_p)], depth + 1)

    start = [[1 if i == j else 0 for j in range(S.k)] for i in range(S.k)]
    recurse(start, [], 0)
    # deduplicate by the span itself (different prime paths, same system)
    uniq = []
    seen = set()
    for basis, aps in found:
        key = tuple(tuple(r) for r in hnf(basis)[0] if any(r))
        if key in seen:
            continue
        seen.add(key)
        uniq.append((basis, aps))
    return uniq


# ---------------------------------------------------------------------------
# cache


def _cache_path(N: int, cache_dir: str) -> Path:
    return Path(cache_dir) / f"level{N}-v{FORMAT_VERSION}.json"


def _save_cache(S: SymbolSpace, cache_dir: str):
    path = _cache_path(S.N, cache_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {
        "version": FORMAT_VERSION,
        "N": S.N,
        "p1_size": len(S.p1),
        "p1": [list(x) for x in S.p1],
        "lifts": [list(x) for x in S.lifts],
        "k": S.k,
        "proj": [sorted(d.items()) for d in S.proj],
        "basis_chains": [sorted(d.items()) for d in S.basis_chains],
        "cusps": [list(c) for c in S.cusps],
        "boundary": S.boundary,
        "H_basis": S.H_basis,
        "star": S.star_matrix,
        "hecke": {str(p): m for p, m in S.hecke_cache.items()},
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(data))
    tmp.replace(path)


def _load_cache(N: int, cache_dir: str) -> SymbolSpace | None:
    path = _cache_path(N, cache_dir)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        if data["version"] != FORMAT_VERSION or data["N"] != N:
            return None
        p1 = [tuple(x) for x in data["p1"]]
        S = SymbolSpace(
            N=N,
            p1=p1,
            p1_index={r: i for i, r in enumerate(p1)},
            lifts=[tuple(x) for x in data["lifts"]],
            k=data["k"],
            proj=[dict((int(a), int(b)) for a, b in d) for d in data["proj"]],
            basis_chains=[dict((int(a), int(b)) for a, b in d) for d in data["basis_chains"]],
            cusps=[tuple(c) for c in data["cusps"]],
        )
        S.boundary = data["boundary"]
        S.H_basis = data["H_basis"]
        S.star_matrix = data["star"]
        S.hecke_cache = {int(p): m for p, m in data["hecke"].items()}
        return S
    except (KeyError, ValueError, json.JSONDecodeError):
        return None
