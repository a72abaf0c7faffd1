import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grusin import scalar_functions as sf
from grusin.scalar_functions import DomainError


def bisect(f, lo, hi, iters=200):
    """Plain bisection, kept independent of the library's root finders."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# roots of tan b = b and 1 + b tan b = 0 from the bisection oracle above
TILDE_1 = 4.493409457909064
TILDE_2 = 7.725251836937707
HAT_0 = 2.7983860457838086

off_pole = st.floats(-12.0, 12.0).filter(lambda b: abs(b / math.pi - round(b / math.pi)) > 1e-3)
shape = st.floats(-1.0, 1.0)


def direct_mu(b, a):
    return b / math.sin(b) ** 2 - 1 / math.tan(b) + a * (1 - b / math.tan(b)) / math.sin(b)


def test_frozen_oracle_values():
    assert bisect(lambda b: math.sin(b) - b * math.cos(b), math.pi + 1e-9, 1.5 * math.pi) == pytest.approx(TILDE_1, abs=1e-13)
    assert bisect(lambda b: math.sin(b) - b * math.cos(b), 2 * math.pi + 1e-9, 2.5 * math.pi) == pytest.approx(TILDE_2, abs=1e-13)
    assert bisect(lambda b: math.cos(b) + b * math.sin(b), 0.5 * math.pi, 1.5 * math.pi) == pytest.approx(HAT_0, abs=1e-13)


class TestValues:
    def test_zero(self):
        for a in (-1, -0.3, 0, 0.7, 1):
            assert sf.mu(0.0, a) == 0.0
        assert sf.mu_tilde(0.0) == 0.0
        assert sf.mu_hat(0.0) == 0.0

    def test_mu_tilde_half_pi(self):
        assert sf.mu_tilde(math.pi / 2) == pytest.approx(math.pi / 2, rel=1e-15)

    def test_delta(self):
        assert sf.delta(0.0) == 1.0
        for m in range(1, 6):
            assert sf.delta(2 * m * math.pi) == pytest.approx(1.0, abs=1e-12)
            assert sf.delta((2 * m + 1) * math.pi) == pytest.approx(-1.0, abs=1e-12)

    def test_ell(self):
        for a in (-0.9, 0.0, 0.4, 1.0):
            assert sf.ell(0.0, a) == pytest.approx(1 - a, abs=1e-15)
        assert sf.ell(math.pi / 2, 0.0) == pytest.approx(math.pi**2 / 4, rel=1e-15)

    def test_convex_combination_example(self):
        assert sf.mu(1.0, 0.5) == pytest.approx(0.5 * sf.mu_tilde(1.0) + 0.5 * sf.mu_hat(0.5), rel=1e-14)

    def test_figure_roots_mu(self):
        roots = sf.level_set_roots(4.0, 0.8, 2 * math.pi)
        assert roots[0] == pytest.approx(1.922, abs=2e-3)
        assert any(abs(r - 5.3163) < 2e-3 for r in roots)

    def test_figure_roots_mu_hat(self):
        roots = sorted(sf.level_set_roots(6.0, 1.0, 7.0))
        assert roots[0] == pytest.approx(2.1014, abs=2e-3)
        assert roots[1] == pytest.approx(4.2565, abs=2e-3)
        for r in roots:
            assert sf.mu_hat(r / 2) == pytest.approx(6.0, rel=1e-10)

    def test_poles_raise(self):
        with pytest.raises(DomainError):
            sf.mu(math.pi, 0.3)
        with pytest.raises(DomainError):
            sf.mu_tilde(2 * math.pi)
        with pytest.raises(DomainError):
            sf.mu_hat(math.pi / 2)
        with pytest.raises(DomainError):
            sf.ell(-math.pi, 0.0)

    def test_removable_poles_at_unit_shape(self):
        # a = 1 leaves only the poles of mu_hat(b/2), so b = 2 pi is finite
        assert sf.mu(2 * math.pi, 1.0) == pytest.approx(sf.mu_hat(math.pi), rel=1e-14)
        assert sf.mu(math.pi * 3, -1.0) == pytest.approx(-(-sf.mu_tilde(1.5 * math.pi)), rel=1e-14)

    def test_psi_and_V_at_origin(self):
        for a in (-1.0, 0.2, 1.0):
            assert sf.psi_complex(0.0, 0.0, a) == pytest.approx(1 - a, abs=1e-15)
        for b in (0.5, 2.0, 3.0):
            a = 0.3
            assert sf.psi_complex(0.0, b, a) == pytest.approx(b / math.tan(b) - a * b / math.sin(b), rel=1e-13)
            for n in (1, 2, 3):
                assert sf.V_complex(0.0, b, n) == pytest.approx((b / math.sin(b)) ** (n / 2), rel=1e-13)
        assert sf.V_complex(0.0, 0.0, 2) == pytest.approx(1.0)

    def test_V_no_overflow(self):
        v = sf.V_complex(700.0, 1.0, 4)
        assert np.isfinite(v) and abs(v) < 1e-290
        assert np.isfinite(sf.log_V_complex(5000.0, 2.0, 3))

    def test_shape_parameter(self):
        R2, a, comp = sf.shape_parameter([1.0], [2.0])
        assert (R2, a) == (5.0, 0.8)
        assert comp == pytest.approx(0.2, abs=1e-16)
        R2, a, comp = sf.shape_parameter([1.0, 2.0], [-1.0, -2.0 + 1e-9])
        assert a == pytest.approx(-1.0) and comp > 0


class TestCriticalPoints:
    def test_tilde_values(self):
        assert sf.critical_point_tilde(1) == pytest.approx(TILDE_1, abs=1e-12)
        assert sf.critical_point_tilde(2) == pytest.approx(TILDE_2, abs=1e-12)

    def test_hat_value(self):
        assert sf.critical_point_hat(0) == pytest.approx(HAT_0, abs=1e-12)

    @pytest.mark.parametrize("m", range(1, 21))
    def test_tilde_bracket(self, m):
        b = sf.critical_point_tilde(m)
        assert m * math.pi < b < m * math.pi + math.pi / 2

    @pytest.mark.parametrize("m", range(0, 11))
    def test_fixed_points(self, m):
        bh = sf.critical_point_hat(m)
        assert abs(sf.mu_hat(bh) - bh) < 1e-10
        assert bh >= math.pi * (m + 0.5)
        if m >= 1:
            bt = sf.critical_point_tilde(m)
            assert abs(sf.mu_tilde(bt) - bt) < 1e-10

    @pytest.mark.parametrize("m", range(1, 8))
    def test_mu_critical_reduces_at_zero_shape(self, m):
        assert sf.critical_point_mu(m, 0.0) == pytest.approx(sf.critical_point_tilde(m), abs=1e-12)

    def test_mu_prime_zero_at_tilde(self):
        assert sf.mu_prime(TILDE_1, 0.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("a", [-0.99, -0.5, 0.0, 0.5, 0.99])
    def test_lower_bound_and_sign_change(self, a):
        for m in range(1, 16):
            bm = sf.critical_point_mu(m, a)
            assert m * math.pi < bm < (m + 1) * math.pi
            assert sf.mu(bm, a) >= (m - 1) * math.pi / 2
            assert sf.mu_prime(bm - 1e-4, a) < 0 < sf.mu_prime(bm + 1e-4, a)

    @pytest.mark.parametrize("a", [0.0, 0.3, 0.8, 0.99])
    def test_odd_index_bracketing(self, a):
        for m in range(0, 5):
            b = sf.critical_point_mu(2 * m + 1, a)
            assert (2 * m + 1) * math.pi < sf.critical_point_tilde(2 * m + 1) <= b + 1e-12
            assert b <= 2 * sf.critical_point_hat(m) + 1e-12 < (2 * m + 2) * math.pi

    def test_unit_shape_rejected(self):
        with pytest.raises(DomainError):
            sf.critical_point_mu(1, 1.0)

    @pytest.mark.parametrize("m", range(0, 8))
    def test_delta_zero(self, m):
        z = sf.delta_zero(m)
        assert m * math.pi < z < (m + 1) * math.pi
        assert abs(sf.delta(z)) < 1e-12
        oracle = bisect(lambda b: 2 * math.cos(b) + b * math.sin(b), m * math.pi + 1e-12, (m + 1) * math.pi - 1e-12)
        assert z == pytest.approx(oracle, abs=1e-12)

    def test_tiny_complement_is_stable(self):
        # near-antipodal pair: the generic formula loses every digit here
        comp = 1e-13
        b = sf.critical_point_mu(1, -1 + comp, comp)
        assert math.pi < b < 2 * math.pi
        assert abs(sf.mu_prime(b, -1 + comp, comp)) < 1e-6 * abs(sf.mu(b, -1 + comp, comp))


class TestLevelSets:
    def test_branch_counts(self):
        # target below the branch minimum: no root on that branch
        b1 = sf.critical_point_mu(1, 0.3)
        low = float(sf.mu(b1, 0.3))
        roots = sf.level_set_roots(low - 0.5, 0.3, 2 * math.pi)
        assert len(roots) == 1
        roots = sf.level_set_roots(low + 0.5, 0.3, 2 * math.pi)
        assert len(roots) == 3

    def test_tangency(self):
        b1 = sf.critical_point_mu(1, 0.3)
        roots = sf.level_set_roots(float(sf.mu(b1, 0.3)), 0.3, 2 * math.pi)
        assert len(roots) == 2
        assert roots[1] == pytest.approx(b1, abs=1e-12)

    def test_principal_root_tiny_target(self):
        b = sf.principal_root(1e-10, 0.2)
        assert sf.mu(b, 0.2) == pytest.approx(1e-10, rel=1e-10)

    def test_principal_root_huge_target(self):
        b = sf.principal_root(1e12, 0.1)
        assert 0 < b < math.pi
        assert sf.mu(b, 0.1) == pytest.approx(1e12, rel=1e-6)


class TestProperties:
    @given(off_pole, shape)
    def test_convex_combination(self, b, a):
        tilde = sf.mu_tilde(b)
        half = sf.mu_hat(b / 2) if a >= 0 else sf.mu_tilde(b / 2)
        if abs(math.cos(b / 2)) < 1e-3 or abs(math.sin(b / 2)) < 1e-3:
            return
        expected = (1 - abs(a)) * tilde + abs(a) * half
        assert sf.mu(b, a) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    @given(off_pole.filter(lambda b: abs(b) > 0.05), shape)
    def test_matches_definition(self, b, a):
        if abs(math.cos(b / 2)) < 1e-2 and a == 1.0:
            return
        ref = direct_mu(b, a)
        assert sf.mu(b, a) == pytest.approx(ref, rel=1e-9, abs=1e-9 * abs(b) / math.sin(b) ** 2)

    @given(off_pole, shape)
    def test_oddness(self, b, a):
        assert sf.mu(-b, a) == pytest.approx(-sf.mu(b, a), rel=1e-15, abs=1e-300)
        assert sf.mu_tilde(-b) == pytest.approx(-sf.mu_tilde(b), rel=1e-15, abs=1e-300)
        assert sf.delta(-b) == sf.delta(b)

    @given(st.floats(-1.2, 1.2).filter(lambda b: abs(abs(b) - math.pi / 2) > 1e-2))
    def test_mu_hat_odd(self, b):
        assert sf.mu_hat(-b) == pytest.approx(-sf.mu_hat(b), rel=1e-15, abs=1e-300)

    @settings(max_examples=100)
    @given(st.floats(-12.0, 12.0).filter(lambda b: abs(b / math.pi - round(b / math.pi)) > 0.05), st.floats(-0.99, 0.99))
    def test_ell_derivative(self, b, a):
        h = 1e-5
        fd = (sf.ell(b + h, a) - sf.ell(b - h, a)) / (2 * h)
        exact = b * sf.mu_prime(b, a)
        assert fd == pytest.approx(exact, rel=1e-5, abs=1e-5 * max(1.0, abs(float(sf.ell(b, a)))))

    def test_mu_prime_finite_difference(self):
        h = 1e-5
        fd = (sf.mu(1.3 + h, 0.4) - sf.mu(1.3 - h, 0.4)) / (2 * h)
        assert sf.mu_prime(1.3, 0.4) == pytest.approx(fd, rel=1e-6)

    @given(st.integers(1, 10), st.floats(-0.999, 0.999))
    def test_critical_length_identity(self, m, a):
        bm = sf.critical_point_mu(m, a)
        lhs = sf.ell(bm, a) - bm * sf.mu(bm, a)
        assert abs(lhs - (1 - a * sf.delta(bm))) <= 1e-10 * max(1.0, abs(lhs))

    @given(st.integers(0, 6), st.floats(-0.95, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
    def test_mu_prime_increasing_on_branch(self, m, a, s1, s2):
        if abs(s1 - s2) < 1e-3:
            return
        lo, hi = sorted((s1, s2))
        b_lo, b_hi = (m + lo) * math.pi, (m + hi) * math.pi
        if m == 0:
            b_lo, b_hi = lo * math.pi, hi * math.pi
        assert sf.mu_prime(b_lo, a) < sf.mu_prime(b_hi, a)

    def test_strip_bounds_grid(self):
        nu = np.linspace(-10, 10, 100)
        for b in np.linspace(-0.99 * math.pi, 0.99 * math.pi, 100):
            cap_small = (b / math.sin(b)) ** 0.5 if b != 0 else 1.0
            mod = np.abs(sf.V_complex(nu, b, 1))
            assert np.all(mod <= cap_small * (1 + 1e-12))
            nz = nu[nu != 0]
            cap_large = (1 + b * b / nz**2) ** 0.25 * (nz / np.sinh(nz)) ** 0.5
            assert np.all(np.abs(sf.V_complex(nz, b, 1)) <= cap_large * (1 + 1e-12))
            for a in (-1.0, -0.4, 0.0, 0.5, 1.0):
                assert np.all(sf.psi_complex(nu, b, a).real >= sf.psi_ib(b, a) - 1e-12)

    def test_pole_asymptotics(self):
        for b in np.linspace(0.99 * math.pi, 0.999 * math.pi, 10):
            assert (math.pi - b) * (b / math.sin(b)) == pytest.approx(b, rel=1e-2)

    @given(shape)
    def test_series_branch_continuity(self, a):
        # the series and closed forms meet at the threshold without a jump;
        # the two samples are 2e-12 apart, so allow for the slope
        t = sf.SERIES_THRESHOLD
        for f in (lambda v: sf.mu(v, a), lambda v: sf.ell(v, a), lambda v: sf.psi_ib(v, a)):
            lo, hi = f(t * (1 - 1e-12)), f(t * (1 + 1e-12))
            assert abs(lo - hi) < 1e-11
