import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongweil.errors import NoConvergent
from strongweil.exactla import (
    Lattice,
    elementary_divisors_int,
    hnf,
    identity_matrix,
    kernel_integral,
    left_kernel_exact,
    mat_mul,
    preimage_lattice,
    rational_reconstruct,
    saturate,
    saturate_span,
    snf,
    solve_in_span,
    transpose,
)


def det(M):
    # exact cofactor expansion, fine for the small matrices used here
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        if M[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in M[1:]]
            total += (-1) ** j * M[0][j] * det(minor)
    return total


def is_row_hnf(H):
    pivots = []
    last = -1
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            continue
        j = nz[0]
        assert j > last, "pivots must move right"
        last = j
        assert row[j] > 0
        pivots.append((len(pivots), j))
    for r, j in pivots:
        for i in range(r):
            assert 0 <= H[i][j] < H[r][j]
    return True


class TestHnf:
    def test_identity(self):
        H, U = hnf(identity_matrix(3))
        assert H == identity_matrix(3)
        assert U == identity_matrix(3)

    def test_2x2_example(self):
        M = [[2, 1], [0, 3]]
        H, U = hnf(M)
        assert mat_mul(U, M) == H
        assert abs(det(U)) == 1
        assert is_row_hnf(H)
        assert H[0][0] == 2 and H[1][1] == 3 and 0 <= H[0][1] < 3

    def test_zero(self):
        M = [[0, 0], [0, 0]]
        H, U = hnf(M)
        assert H == M
        assert U == identity_matrix(2)

    @given(
        st.lists(
            st.lists(st.integers(-30, 30), min_size=3, max_size=3),
            min_size=2,
            max_size=4,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_random(self, M):
        H, U = hnf(M)
        assert mat_mul(U, M) == H
        assert abs(det(U)) == 1
        assert is_row_hnf(H)


class TestSnf:
    def test_identity(self):
        D, U, V = snf(identity_matrix(3))
        assert D == identity_matrix(3)

    def test_diag_2_3(self):
        # oracle: d1 = gcd of all entries, d1*d2 = |det|
        M = [[2, 0], [0, 3]]
        g = math.gcd(2, 3)
        assert elementary_divisors_int(M) == [g, 6 // g] == [1, 6]

    def test_rank_one(self):
        assert elementary_divisors_int([[0, 5], [0, 0]]) == [5, 0]

    @given(
        st.lists(
            st.lists(st.integers(-20, 20), min_size=3, max_size=3),
            min_size=3,
            max_size=3,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_transforms_and_divisibility(self, M):
        D, U, V = snf(M)
        assert mat_mul(mat_mul(U, M), V) == D
        assert abs(det(U)) == 1
        assert abs(det(V)) == 1
        diag = [D[i][i] for i in range(3)]
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert D[i][j] == 0
        for a, b in zip(diag, diag[1:]):
            if a:
                assert b % a == 0
            else:
                assert b == 0

    def test_invariance_under_unimodular(self):
        rng = random.Random(7)
        M = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
        base = elementary_divisors_int(M)
        for _ in range(5):
            L = identity_matrix(3)
            R = identity_matrix(3)
            for _ in range(6):
                i, j = rng.sample(range(3), 2)
                c = rng.randint(-3, 3)
                for k in range(3):
                    L[i][k] += c * L[j][k]
                i, j = rng.sample(range(3), 2)
                c = rng.randint(-3, 3)
                for k in range(3):
                    R[k][i] += c * R[k][j]
            assert elementary_divisors_int(mat_mul(mat_mul(L, M), R)) == base


class TestKernel:
    def test_column_ones(self):
        K = kernel_integral([[1], [1]])
        assert K.rank == 1
        row = [int(x) for x in K.basis[0]]
        assert row in ([1, -1], [-1, 1])

    def test_identity_kernel_empty(self):
        assert kernel_integral(identity_matrix(3)).rank == 0

    def test_saturated_2_4(self):
        K = kernel_integral([[2], [4]])
        assert K.rank == 1
        row = [int(x) for x in K.basis[0]]
        assert row in ([2, -1], [-2, 1])

    @given(
        st.lists(
            st.lists(st.integers(-9, 9), min_size=2, max_size=2),
            min_size=3,
            max_size=4,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_kernel_times_matrix_zero_and_saturated(self, M):
        K = kernel_integral(M)
        rows = K.integer_rows()
        for x in rows:
            prod = [sum(a * b for a, b in zip(x, col)) for col in transpose(M)]
            assert all(v == 0 for v in prod)
        if rows:
            sat = saturate(Lattice.from_rows(rows))
            assert sorted(sat.basis) == sorted(K.basis)


class TestSaturate:
    def test_doubled_vector(self):
        L = Lattice.from_rows([[2, 0]])
        S = saturate(L)
        assert [list(map(int, r)) for r in S.basis] == [[1, 0]]

    def test_already_saturated(self):
        L = Lattice.from_rows([[2, 1], [1, 1]])
        S = saturate(L)
        assert elementary_divisors_int([list(map(int, r)) for r in S.basis]) == [1, 1]

    def test_full_rank_saturates_to_ambient(self):
        # full-rank sublattice: the only direct summand of equal rank is Z^2
        L = Lattice.from_rows([[2, 2], [0, 4]])
        S = saturate(L)
        got = sorted([list(map(int, r)) for r in S.basis])
        assert got == [[0, 1], [1, 0]]

    def test_plane_in_z3(self):
        L = Lattice.from_rows([[2, 2, 2], [0, 4, 8]])
        S = saturate(L)
        rows = [list(map(int, r)) for r in S.basis]
        # summand property: elementary divisors of the basis are all 1
        assert elementary_divisors_int(rows) == [1, 1]
        # each original generator is an integer combination of the basis
        for gen in ([2, 2, 2], [0, 4, 8]):
            c = solve_in_span(rows, gen)
            assert c is not None and all(x.denominator == 1 for x in c)
        # index of L in its saturation is finite and positive
        M = [[int(x) for x in solve_in_span(rows, gen)] for gen in ([2, 2, 2], [0, 4, 8])]
        assert det(M) != 0

    def test_saturate_span_matches(self):
        rows = [[2, 2, 0], [0, 4, 0]]
        got = saturate_span(rows, 3)
        want = [list(map(int, r)) for r in saturate(Lattice.from_rows(rows)).basis]
        assert sorted(got) == sorted(want)


class TestRationalReconstruct:
    def test_fifth(self):
        assert rational_reconstruct(0.2000000000001, 10**6, 1e-9) == Fraction(1, 5)

    def test_third(self):
        x = Fraction(3333333333333333333333333333333333333333, 10**40)
        assert rational_reconstruct(x, 10**6, Fraction(1, 10**20)) == Fraction(1, 3)

    def test_exact_integer(self):
        assert rational_reconstruct(3.0, 10, 1e-9) == Fraction(3)

    def test_failure(self):
        with pytest.raises(NoConvergent):
            rational_reconstruct(Fraction(355, 113), 50, Fraction(1, 10**12))

    @given(st.integers(-999, 999), st.integers(1, 400))
    @settings(max_examples=80, deadline=None)
    def test_roundtrip_with_noise(self, p, q):
        g = math.gcd(p, q) or 1
        p, q = p // g, q // g
        qmax = 500
        delta = Fraction(1, 2 * q * qmax + 1)
        x = Fraction(p, q) + delta
        assert rational_reconstruct(x, qmax, Fraction(1, 2 * q * qmax)) == Fraction(p, q)


class TestModularKernel:
    def test_matches_small_exact(self):
        M = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
        K = left_kernel_exact(M)
        assert len(K) == 1
        x = K[0]
        assert [sum(a * b for a, b in zip(x, col)) for col in transpose(M)] == [0, 0, 0]

    def test_full_rank(self):
        assert left_kernel_exact(identity_matrix(4)) == []

    @given(
        st.lists(
            st.lists(st.integers(-50, 50), min_size=3, max_size=3),
            min_size=4,
            max_size=6,
        )
    )
    @settings(max_examples=40, deadline=None)
    def test_random_dimension(self, M):
        K = left_kernel_exact(M)
        KK = kernel_integral(M)
        assert len(K) == KK.rank


class TestPreimageAndSolve:
    def test_preimage(self):
        G = [[Fraction(1, 2), Fraction(0)], [Fraction(0), Fraction(1, 3)]]
        basis = preimage_lattice(G)
        # {c : c1/2, c2/3 integral} = 2Z x 3Z, compare via canonical HNF
        rows = [[int(x) for x in row] for row in basis]
        assert hnf(rows)[0] == [[2, 0], [0, 3]]

    def test_solve_in_span(self):
        basis = [[1, 0, 1], [0, 1, 1]]
        c = solve_in_span(basis, [2, 3, 5])
        assert c == [Fraction(2), Fraction(3)]
        assert solve_in_span(basis, [0, 0, 1]) is None
