import mpmath as mp
import pytest

from strongweil.curves import Curve
from strongweil.periods import (
    eisenstein_c4_c6,
    gauss_reduce,
    lattice_contains,
    period_lattice,
    weierstrass_p,
)

E11A1 = Curve.from_ainvs((0, -1, 1, -10, -20))
E37A1 = Curve.from_ainvs((0, 0, 1, -1, 0))
E17A1 = Curve.from_ainvs((1, -1, 1, -1, -14))


@pytest.fixture(autouse=True)
def high_precision_context():
    with mp.workprec(320):
        yield


def quad_real_period(E):
    # independent oracle: direct numerical integration of dx/y over the
    # unbounded real component
    b2, b4, b6 = int(E.b2), int(E.b4), int(E.b6)
    roots = mp.polyroots([4, b2, 2 * b4, b6])
    e1 = max(mp.re(r) for r in roots if abs(mp.im(r)) < mp.mpf(10) ** -10)
    return 2 * mp.quad(
        lambda x: 1 / mp.sqrt(4 * x**3 + b2 * x * x + 2 * b4 * x + b6),
        [e1, e1 + 1, mp.inf],
    )


class TestPeriodLattice:
    def test_11a1_value_and_stability(self):
        L128 = period_lattice(E11A1, 128)
        L256 = period_lattice(E11A1, 256)
        assert mp.nstr(L128.omega_plus, 12) == "1.26920930428"
        assert abs(L128.omega_plus - L256.omega_plus) < mp.mpf(2) ** (-124)

    def test_quad_oracle_both_signs(self):
        for E in (E11A1, E37A1):
            L = period_lattice(E, 96)
            assert abs(L.omega_plus - quad_real_period(E)) < mp.mpf(10) ** -25

    def test_conventions(self):
        for E, c_inf in ((E11A1, 1), (E37A1, 2)):
            L = period_lattice(E, 128)
            assert L.c_infinity == c_inf
            assert L.omega_plus > 0
            assert mp.im(L.omega_minus) > 0
            tol = mp.mpf(2) ** -100
            if c_inf == 1:
                # omega2 - omega1/2 purely imaginary
                assert abs(mp.re(L.omega2 - L.omega1 / 2)) < tol
            else:
                assert abs(L.omega2 - L.omega_minus) < tol
            # area relation
            assert abs(abs(L.omega_plus * L.omega_minus) - 2 * L.area / c_inf) < tol

    def test_area_formula(self):
        L = period_lattice(E11A1, 128)
        assert abs(L.area - abs(mp.im(mp.conj(L.omega1) * L.omega2))) < mp.mpf(2) ** -110

    def test_eisenstein_roundtrip(self):
        # the recovered invariants certify that (omega1, omega2) is a basis
        # of the honest period lattice of the minimal model
        for E in (E11A1, E37A1, E17A1):
            L = period_lattice(E, 128)
            c4, c6 = eisenstein_c4_c6(L.omega1, L.omega2, 128)
            assert abs(c4 - int(E.c4)) < mp.mpf(2) ** -80
            assert abs(c6 - int(E.c6)) < mp.mpf(2) ** -80


class TestLatticeContains:
    def test_member(self):
        L = period_lattice(E11A1, 128)
        z = L.omega1 + 3 * L.omega2
        assert lattice_contains(L, z, mp.mpf(2) ** -60)

    def test_half_period_not_member(self):
        L = period_lattice(E11A1, 128)
        assert not lattice_contains(L, L.omega1 / 2, mp.mpf(2) ** -60)


class TestWeierstrassP:
    def test_two_torsion(self):
        for E in (E11A1, E37A1):
            L = period_lattice(E, 128)
            b2, b4, b6 = int(E.b2), int(E.b4), int(E.b6)
            for z in (L.omega1 / 2, L.omega2 / 2, (L.omega1 + L.omega2) / 2):
                x = weierstrass_p(z, L.omega1, L.omega2, 128) - mp.mpf(b2) / 12
                val = 4 * x**3 + b2 * x * x + 2 * b4 * x + b6
                assert abs(val) < mp.mpf(2) ** -60

    def test_lattice_invariance(self):
        L = period_lattice(E11A1, 128)
        z = mp.mpc(0.3, 0.11)
        a = weierstrass_p(z, L.omega1, L.omega2, 128)
        b = weierstrass_p(z, L.omega1 + 2 * L.omega2, L.omega2, 128)
        assert abs(a - b) < mp.mpf(2) ** -90

    def test_periodicity(self):
        L = period_lattice(E37A1, 128)
        z = mp.mpc(0.21, 0.17)
        a = weierstrass_p(z, L.omega1, L.omega2, 128)
        b = weierstrass_p(z + 2 * L.omega1 - L.omega2, L.omega1, L.omega2, 128)
        assert abs(a - b) < mp.mpf(2) ** -80


class TestGaussReduce:
    def test_reduction(self):
        w1, w2 = mp.mpc(1, 0), mp.mpc(100, 0.5)
        a, b = gauss_reduce(w1, w2)
        tau = b / a
        assert mp.im(tau) > 0
        assert abs(tau) >= 1 - mp.mpf(2) ** -40
