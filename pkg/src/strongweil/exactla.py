"""Exact linear algebra over Z and Q.

Dense matrices are plain lists of rows with int or Fraction entries;
arbitrary precision comes from Python integers, so nothing here can
overflow silently.  Large kernels are found modulo word-size primes
(numpy) and then certified exactly over Z, so every returned object is
exact regardless of the route that produced it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NoConvergent, RankDeficient
from .ntheory import next_prime

IntMatrix = "list[list[int]]"
RatMatrix = "list[list[Fraction]]"


# ---------------------------------------------------------------------------
# basic dense helpers


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(m: int, n: int) -> list[list[int]]:
    return [[0] * n for _ in range(m)]


def transpose(M):
    return [list(col) for col in zip(*M)] if M else []


def mat_mul(A, B):
    if not A or not B:
        return []
    n = len(B)
    cols = len(B[0])
    out = []
    for row in A:
        acc = [0] * cols
        for j, a in enumerate(row):
            if a:
                Bj = B[j]
                for k in range(cols):
                    acc[k] += a * Bj[k]
        out.append(acc)
    return out


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def vec_mat(v, A):
    cols = len(A[0]) if A else 0
    acc = [0] * cols
    for x, row in zip(v, A):
        if x:
            for k in range(cols):
                acc[k] += x * row[k]
    return acc


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def det2(a, b, c, d):
    return a * d - b * c


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms


def hnf(M: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row Hermite normal form.

    Returns (H, U) with U unimodular and U*M = H: row echelon, positive
    pivots, entries above each pivot reduced into [0, pivot).
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity_matrix(m)
    row = 0
    for col in range(n):
        if row >= m:
            break
        # gcd-cascade all entries of this column below `row` into one place
        while True:
            nz = [i for i in range(row, m) if A[i][col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(A[i][col]))
            i0, i1 = nz[0], nz[1]
            q = A[i1][col] // A[i0][col]
            for k in range(n):
                A[i1][k] -= q * A[i0][k]
            for k in range(m):
                U[i1][k] -= q * U[i0][k]
        nz = [i for i in range(row, m) if A[i][col]]
        if not nz:
            continue
        i0 = nz[0]
        if i0 != row:
            A[i0], A[row] = A[row], A[i0]
            U[i0], U[row] = U[row], U[i0]
        if A[row][col] < 0:
            A[row] = [-x for x in A[row]]
            U[row] = [-x for x in U[row]]
        piv = A[row][col]
        for i in range(row):
            q = A[i][col] // piv
            if q:
                for k in range(n):
                    A[i][k] -= q * A[row][k]
                for k in range(m):
                    U[i][k] -= q * U[row][k]
        row += 1
    return A, U


def snf(
    M: list[list[int]], need_u: bool = True, need_v: bool = True
) -> tuple[list[list[int]], list[list[int]] | None, list[list[int]] | None]:
    """Smith normal form: U*M*V = D diagonal with d1 | d2 | ...

    U and V are unimodular; pass need_u/need_v=False to skip tracking.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity_matrix(m) if need_u else None
    V = identity_matrix(n) if need_v else None
    t = 0
    while t < min(m, n):
        # locate smallest nonzero entry of the trailing block
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                if Ai[j] and (best is None or abs(Ai[j]) < best[0]):
                    best = (abs(Ai[j]), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            A[bi], A[t] = A[t], A[bi]
            if need_u:
                U[bi], U[t] = U[t], U[bi]
        if bj != t:
            for row in A:
                row[bj], row[t] = row[t], row[bj]
            if need_v:
                for row in V:
                    row[bj], row[t] = row[t], row[bj]
        while True:
            # clear column t
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    if q:
                        for k in range(t, n):
                            A[i][k] -= q * A[t][k]
                        if need_u:
                            for k in range(m):
                                U[i][k] -= q * U[t][k]
                    if A[i][t]:
                        A[i], A[t] = A[t], A[i]
                        if need_u:
                            U[i], U[t] = U[t], U[i]
                        dirty = True
            if dirty:
                continue
            # clear row t
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    if q:
                        for i2 in range(t, m):
                            A[i2][j] -= q * A[i2][t]
                        if need_v:
                            for i2 in range(n):
                                V[i2][j] -= q * V[i2][t]
                    if A[t][j]:
                        for i2 in range(t, m):
                            A[i2][j], A[i2][t] = A[i2][t], A[i2][j]
                        if need_v:
                            for i2 in range(n):
                                V[i2][j], V[i2][t] = V[i2][t], V[i2][j]
                        dirty = True
            if not dirty:
                break
        # divisibility: pivot must divide the whole trailing block
        piv = A[t][t]
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % piv:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for k in range(t, n):
                A[t][k] += A[offender][k]
            if need_u:
                for k in range(m):
                    U[t][k] += U[offender][k]
            continue
        if piv < 0:
            for k in range(t, n):
                A[t][k] = -A[t][k]
            if need_u:
                for k in range(m):
                    U[t][k] = -U[t][k]
        t += 1
    return A, U, V


def elementary_divisors_int(M: list[list[int]]) -> list[int]:
    """Diagonal of the Smith form, padded with zeros to min(m, n)."""
    D, _, _ = snf(M, need_u=False, need_v=False)
    k = min(len(D), len(D[0]) if D else 0)
    return [abs(D[i][i]) for i in range(k)]


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class Lattice:
    """Full-row-rank lattice given by basis rows inside Q^ambient."""

    ambient: int
    basis: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows, ambient=None) -> "Lattice":
        rows = [tuple(Fraction(x) for x in row) for row in rows]
        amb = ambient if ambient is not None else (len(rows[0]) if rows else 0)
        return Lattice(amb, tuple(rows))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def integer_rows(self) -> list[list[int]]:
        out = []
        for row in self.basis:
            den = 1
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
            if den != 1:
                raise ValueError("lattice has non-integer coordinates")
            out.append([int(x) for x in row])
        return out


def kernel_integral(M: list[list[int]]) -> Lattice:
    """Saturated integral left kernel {x : x*M = 0} of an integer matrix."""
    m = len(M)
    if m == 0:
        return Lattice.from_rows([], 0)
    H, U = hnf(M)
    rows = [U[i] for i in range(m) if not any(H[i])]
    # canonical HNF presentation of the kernel itself
    if rows:
        rows = [r for r in hnf(rows)[0] if any(r)]
    return Lattice.from_rows(rows, m)


def saturate(L: Lattice) -> Lattice:
    """Smallest direct summand of Z^n containing L (same rank)."""
    B = L.integer_rows()
    if not B:
        return L
    comp = kernel_integral(transpose(B))
    if comp.rank == 0:
        # full rank: saturation is all of Z^n
        return Lattice.from_rows(identity_matrix(L.ambient), L.ambient)
    sat = kernel_integral(transpose(comp.integer_rows()))
    if sat.rank != L.rank:
        raise RankDeficient("saturation changed the rank")
    return sat


def saturate_span(rows: list[list[int]], ambient: int) -> list[list[int]]:
    """Saturation of the span of a small number of integer rows.

    Cheap route for rank <= 3 spans inside a large ambient space: solve
    for the coordinates on a pivot minor and take the preimage lattice
    of the integrality conditions.
    """
    rank = len(rows)
    if rank == 0:
        return []
    # pivot columns: greedily pick columns making the minor invertible
    piv: list[int] = []
    frac_rows = [[Fraction(x) for x in row] for row in rows]
    work = [row[:] for row in frac_rows]
    for r in range(rank):
        col = None
        for j in range(ambient):
            if j in piv:
                continue
            if work[r][j]:
                col = j
                break
        if col is None:
            raise RankDeficient("rows are linearly dependent")
        piv.append(col)
        inv = 1 / work[r][col]
        work[r] = [x * inv for x in work[r]]
        for r2 in range(rank):
            if r2 != r and work[r2][col]:
                f = work[r2][col]
                work[r2] = [a - f * b for a, b in zip(work[r2], work[r])]
    # basis vectors u_j: the span element with pivot coordinates e_j
    units = [[Fraction(1 if i == j else 0) for j in range(rank)] for i in range(rank)]
    span_vecs = []
    for unit in units:
        vec = [Fraction(0)] * ambient
        for coef, row in zip(unit, work):
            if coef:
                vec = [a + coef * b for a, b in zip(vec, row)]
        span_vecs.append(vec)
    # lattice {c : sum c_j * span_vecs[j] is integral}
    G = [[span_vecs[j][t] for j in range(rank)] for t in range(ambient)]
    coeffs = preimage_lattice(G)
    out = []
    for c in coeffs:
        vec = [Fraction(0)] * ambient
        for coef, sv in zip(c, span_vecs):
            if coef:
                vec = [a + coef * b for a, b in zip(vec, sv)]
        assert all(x.denominator == 1 for x in vec)
        out.append([int(x) for x in vec])
    return [r for r in hnf(out)[0] if any(r)]


def preimage_lattice(G: list[list[Fraction]]) -> list[list[Fraction]]:
    """Basis of {c in Q^k : G*c is integral}, G of full column rank k."""
    m = len(G)
    k = len(G[0]) if m else 0
    den = 1
    for row in G:
        for x in row:
            x = Fraction(x)
            den = den * x.denominator // math.gcd(den, x.denominator)
    A = [[int(Fraction(x) * den) for x in row] for row in G]
    D, _, V = snf(A, need_u=False)
    basis = []
    for j in range(k):
        dj = D[j][j] if j < len(D) else 0
        if dj == 0:
            raise RankDeficient("preimage_lattice needs full column rank")
        scale = Fraction(den, dj)
        basis.append([scale * V[i][j] for i in range(k)])
    return basis


# ---------------------------------------------------------------------------
# rational reconstruction


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    # mpmath mpf: (sign, mantissa, exponent, bitcount)
    mpf_tuple = getattr(x, "_mpf_", None)
    if mpf_tuple is not None:
        sign, man, exp, _ = mpf_tuple
        if man == 0 and exp != 0:
            raise ValueError(f"non-finite value {x!r}")
        val = Fraction(man) * Fraction(2) ** exp
        return -val if sign else val
    raise TypeError(f"cannot convert {type(x)} to Fraction")


def rational_reconstruct(x, qmax: int, eps) -> Fraction:
    """First continued-fraction convergent p/q of x with q <= qmax, |x-p/q| < eps."""
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    X = _to_fraction(x)
    eps = _to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    p0, q0 = 1, 0
    p1, q1 = math.floor(X), 1
    rem = X - p1
    while True:
        if q1 > qmax:
            break
        if abs(X - Fraction(p1, q1)) < eps:
            return Fraction(p1, q1)
        if rem == 0:
            break
        a = math.floor(1 / rem)
        rem = 1 / rem - a
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    raise NoConvergent(f"no convergent with q <= {qmax} within {float(eps):.3g}")


def ratrecon_mod(r: int, M: int) -> Fraction | None:
    """Rational number n/d with n = r*d (mod M), |n|, |d| <= sqrt(M/2)."""
    r %= M
    bound = math.isqrt(M // 2)
    a0, a1 = M, r
    b0, b1 = 0, 1
    while a1 > bound:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        b0, b1 = b1, b0 - q * b1
    if b1 == 0 or abs(b1) > bound or math.gcd(a1, abs(b1)) != 1:
        return None
    if b1 < 0:
        a1, b1 = -a1, -b1
    return Fraction(a1, b1)


# ---------------------------------------------------------------------------
# modular kernels with exact certification

_P30 = []
_p = 1 << 30
for _ in range(25):
    _p = next_prime(_p)
    _P30.append(_p)
PRIMES30 = tuple(_P30)


def rref_modp(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of A over F_p; returns (R, pivot columns)."""
    R = A % p
    m, n = R.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        i = row + int(nz[0])
        if i != row:
            R[[row, i]] = R[[i, row]]
        inv = pow(int(R[row, col]), p - 2, p)
        R[row] = R[row] * inv % p
        other = np.nonzero(R[:, col])[0]
        for j in other:
            if j != row:
                R[j] = (R[j] - R[j, col] * R[row]) % p
        pivots.append(col)
        row += 1
    return R, pivots


def right_kernel_modp(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Canonical basis of {y : A y = 0 mod p}; rows are the basis vectors."""
    R, pivots = rref_modp(A, p)
    n = A.shape[1]
    free = [j for j in range(n) if j not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for bi, fj in enumerate(free):
        basis[bi, fj] = 1
        for ri, pj in enumerate(pivots):
            basis[bi, pj] = (-int(R[ri, fj])) % p
    return basis, pivots


def left_kernel_exact(rows: list[list[int]], max_primes: int = 12) -> list[list[int]]:
    """Exact basis of {x : x*M = 0} over Q, integer primitive rows.

    Kernels are found modulo several word-size primes, CRT-combined,
    rationally reconstructed and certified by exact multiplication; the
    certified dimension argument (rank can only drop modulo p) makes the
    result provably a full kernel basis.  Rows are primitive integer
    vectors but not necessarily a saturated lattice basis.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0:
        return []
    if n == 0:
        return identity_matrix(m)
    big = max(abs(x) for row in rows for x in row) if any(any(r) for r in rows) else 0
    if big == 0:
        return identity_matrix(m)
    AT = np.array([[rows[i][j] for i in range(m)] for j in range(n)], dtype=object)
    results = []  # (p, basis ndarray, pivots)
    best_dim = None
    for p in PRIMES30[:max_primes]:
        Ap = np.array(AT % p, dtype=np.int64)
        basis, pivots = right_kernel_modp(Ap, p)
        dim = basis.shape[0]
        if best_dim is None or dim < best_dim:
            best_dim = dim
            results = [(p, basis, pivots)]
        elif dim == best_dim and pivots == results[0][2]:
            results.append((p, basis, pivots))
        # try reconstruction once at least two agreeing primes are in hand
        if len(results) >= 1:
            cand = _reconstruct_kernel(results, best_dim, m)
            if cand is not None and _verify_left_kernel(cand, rows):
                return cand
    raise RankDeficient("could not certify kernel after modular attempts")


def _reconstruct_kernel(results, dim, n_cols) -> list[list[int]] | None:
    if dim == 0:
        return []
    mod = 1
    combined = np.zeros((dim, n_cols), dtype=object)
    for p, basis, _ in results:
        if mod == 1:
            combined = basis.astype(object)
            mod = p
        else:
            # CRT lift entrywise
            inv = pow(mod, p - 2, p)
            delta = (basis.astype(object) - combined) % p
            combined = combined + mod * ((delta * inv) % p)
            mod *= p
    out = []
    for i in range(dim):
        fracs = []
        den = 1
        for j in range(n_cols):
            f = ratrecon_mod(int(combined[i, j]), mod)
            if f is None:
                return None
            fracs.append(f)
            den = den * f.denominator // math.gcd(den, f.denominator)
        out.append([int(f * den) for f in fracs])
    for row in out:
        g = 0
        for x in row:
            g = math.gcd(g, x)
        if g > 1:
            for j in range(len(row)):
                row[j] //= g
    return out


def _verify_left_kernel(cand: list[list[int]], rows: list[list[int]]) -> bool:
    n = len(rows[0])
    for x in cand:
        acc = [0] * n
        for xi, row in zip(x, rows):
            if xi:
                for k in range(n):
                    acc[k] += xi * row[k]
        if any(acc):
            return False
    return True


# ---------------------------------------------------------------------------
# small exact rational solving


def solve_in_span(basis_rows, vec):
    """Coefficients c with sum c_i basis_rows[i] = vec, else None (exact)."""
    rows = [list(map(Fraction, r)) for r in basis_rows]
    target = list(map(Fraction, vec))
    n = len(target)
    k = len(rows)
    aug = [[rows[i][j] for i in range(k)] + [target[j]] for j in range(n)]
    piv_cols: list[int] = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, n) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = aug[i][k]
    for i in range(r, n):
        if aug[i][k]:
            return None
    return sol
