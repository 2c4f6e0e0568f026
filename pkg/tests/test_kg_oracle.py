import math

import numpy as np
import pytest

from dkgreen.coulomb_chain import CoulombSystem
from dkgreen.errors import DomainError, NearPole
from dkgreen.green_amplitude import closed_form_level, coulomb_kernel
from dkgreen.kg_oracle import (
    GreenOracle,
    RadialProblem,
    default_r_start,
    integrate_decaying,
    integrate_regular,
    normalized_wronskian,
    oracle_green,
    oracle_level,
    wronskian,
)
from dkgreen.specfun import WhittakerIndex, whittaker_w

ALPHA = 1 / 137.036


def solutions(c: CoulombSystem, r_lo=0.05, r_hi=50.0, **kw):
    p = RadialProblem(c)
    reg = integrate_regular(p, default_r_start(p, r_lo), r_hi, **kw)
    dec = integrate_decaying(p, max(p.default_r_far(), 2 * r_hi), r_lo, **kw)
    return p, reg, dec


class TestProblem:
    def test_potential_forms_agree(self):
        p = RadialProblem(CoulombSystem(0.6, 0.2, 1, 3))
        for r in (0.1, 1.0, 10.0):
            assert p.potential(r) == pytest.approx(p.potential_unexpanded(r), rel=1e-12)

    def test_tail_limit(self):
        c = CoulombSystem(0.9, ALPHA)
        assert RadialProblem(c).potential(1e9) == pytest.approx(0.5 * (1 - 0.81), rel=1e-6)

    def test_frobenius_exponent(self):
        c = CoulombSystem(0.9, 0.3, 0, 3)
        assert RadialProblem(c).frobenius_exponent == pytest.approx(0.5 + math.sqrt(0.25 - 0.09), rel=1e-15)


class TestSolutions:
    @pytest.mark.parametrize("eps, alpha, l", [(0.9, ALPHA, 0), (0.3, 0.3, 1), (0.999, ALPHA, 2)])
    def test_wronskian_constant(self, eps, alpha, l):
        _, reg, dec = solutions(CoulombSystem(eps, alpha, l))
        ws = [wronskian(reg, dec, r) for r in (0.5, 1.0, 5.0, 20.0)]
        assert max(abs(w / ws[0] - 1) for w in ws) <= 1e-9

    def test_wronskian_bilinear(self):
        _, reg, dec = solutions(CoulombSystem(0.5, 0.2))
        assert wronskian(reg.scaled(2.0), dec, 3.0) == pytest.approx(2 * wronskian(reg, dec, 3.0), rel=1e-15)

    def test_regular_log_slope(self):
        p = RadialProblem(CoulombSystem(0.9, ALPHA, 0, 3))
        reg = integrate_regular(p, 1e-7, 1.0)
        # r u'/u -> s at the origin
        assert reg.log_slope(1e-5) == pytest.approx(p.frobenius_exponent, abs=1e-6)

    def test_regular_log_slope_first_correction(self):
        # strong coupling: r u'/u = s + c1 r + O(r^2) with c1 = -2 eps alpha / (2 s)
        eps, alpha = 0.9, 0.3
        p = RadialProblem(CoulombSystem(eps, alpha, 0, 3))
        s = p.frobenius_exponent
        reg = integrate_regular(p, 1e-7, 1.0)
        r = 1e-5
        assert reg.log_slope(r) == pytest.approx(s - eps * alpha / s * r, abs=1e-9)

    @pytest.mark.parametrize("l", [0, 1])
    def test_free_case_bessel(self, l):
        # alpha = 0, eps = 0: u'' = (l(l+1)/r^2 + 1) u, regular solution r i_l(r)
        p = RadialProblem(CoulombSystem(0.0, 0.0, l, 3))
        reg = integrate_regular(p, 1e-6, 10.0)
        exact = (lambda r: math.sinh(r)) if l == 0 else (lambda r: math.cosh(r) - math.sinh(r) / r)
        ratios = [reg.value(r) / exact(r) for r in (0.01, 0.5, 2.0, 8.0)]
        assert max(abs(x / ratios[0] - 1) for x in ratios) <= 1e-10

    @pytest.mark.parametrize("eps, alpha, l", [(0.9, ALPHA, 0), (0.4, 0.3, 1)])
    def test_decaying_matches_whittaker(self, eps, alpha, l):
        c = CoulombSystem(eps, alpha, l)
        _, _, dec = solutions(c)
        idx = WhittakerIndex(c.kappa, c.mu_tilde)
        radii = np.geomspace(0.1, 40.0, 10)
        ratios = [dec.value(r) / whittaker_w(idx, 2 * c.k * r) for r in radii]
        assert max(abs(x / ratios[0] - 1) for x in ratios) <= 1e-9

    def test_decay_rate(self):
        c = CoulombSystem(0.9, ALPHA)
        p = RadialProblem(c)
        r_far = p.default_r_far()
        dec = integrate_decaying(p, r_far, 1.0)
        slope = dec.log_slope(r_far) / r_far
        assert abs(slope / (-c.k) - 1) <= (abs(c.kappa) + 1) / (c.k * r_far)

    def test_domain_errors(self):
        p = RadialProblem(CoulombSystem(0.5, 0.2))
        with pytest.raises(DomainError):
            integrate_regular(p, 2.0, 1.0)
        with pytest.raises(DomainError):
            integrate_decaying(p, 1.0, 2.0)


class TestLevels:
    def test_wronskian_vanishes_at_level(self):
        base = CoulombSystem(0.0, 0.3)
        eps = closed_form_level(base, 1).energy_ratio
        c = base.with_energy(eps)
        p = RadialProblem(c)
        r_m = p.outer_turning_point()
        reg = integrate_regular(p, default_r_start(p, r_m), r_m)
        dec = integrate_decaying(p, p.default_r_far(), r_m)
        assert abs(normalized_wronskian(reg, dec, r_m)) < 1e-8

    def test_near_pole_rejected(self):
        base = CoulombSystem(0.0, 0.3)
        c = base.with_energy(closed_form_level(base, 0).energy_ratio)
        with pytest.raises(NearPole):
            oracle_green(RadialProblem(c), 2.0, 1.0)

    @pytest.mark.parametrize("alpha", [0.3, ALPHA])
    def test_oracle_level(self, alpha):
        base = CoulombSystem(0.0, alpha, 1)
        levels = [closed_form_level(base, n).energy_ratio for n in range(3)]
        lo, hi = 0.5 * (levels[0] + levels[0] - (levels[1] - levels[0])), 0.5 * (levels[0] + levels[1])
        found = oracle_level(base, lo, hi, xtol=1e-13, rtol=1e-10)
        assert abs(found - levels[0]) <= 1e-9


class TestOracleGreen:
    def test_symmetric(self):
        p = RadialProblem(CoulombSystem(0.9, ALPHA))
        g = GreenOracle(p, 0.1, 10.0)
        assert g(5.0, 0.2) == g(0.2, 5.0)

    def test_ratio_flat(self):
        c = CoulombSystem(0.7, 0.1, 1)
        grid = np.geomspace(0.05, 50.0, 6)
        g = GreenOracle(RadialProblem(c), grid[0], grid[-1])
        ratios = [g(a, b) / coulomb_kernel(c, a, b) for a in grid for b in grid]
        assert max(abs(x - 1) for x in ratios) <= 1e-6

    def test_mesh_refinement(self):
        c = CoulombSystem(0.9, ALPHA)
        p = RadialProblem(c)
        coarse = GreenOracle(p, 0.1, 20.0, rtol=1e-11, atol=1e-13)
        fine = GreenOracle(p, 0.1, 20.0, rtol=5e-12, atol=5e-14)
        for rb, ra in [(20.0, 0.1), (3.0, 1.0), (0.5, 0.5)]:
            assert abs(fine(rb, ra) / coarse(rb, ra) - 1) <= 1e-8

    def test_positive_below_ground_state(self):
        # alpha = 0.3 ground level sits near eps = 0.95; eps = 0.3 is well below it
        c = CoulombSystem(0.3, 0.3)
        grid = np.geomspace(0.05, 50.0, 8)
        g = GreenOracle(RadialProblem(c), grid[0], grid[-1])
        assert all(g(r, r) > 0 for r in grid)
