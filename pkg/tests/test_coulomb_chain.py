import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dkgreen.coulomb_chain import (
    CoulombSystem,
    MorseParams,
    OscillatorParams,
    coulomb_radius,
    half_coordinate_inverse,
    half_coordinate_map,
    oscillator_from_morse,
    oscillator_radius,
    parameter_map,
    to_morse,
    to_oscillator,
)
from dkgreen.errors import FallToCenter, ParameterError, ThresholdError
from dkgreen.green_amplitude import closed_form_level

ALPHA = 1 / 137.036


def random_system(rng: random.Random) -> CoulombSystem:
    l = rng.randrange(0, 4)
    dim = rng.randrange(2 if l else 3, 6)
    mu_c = l + dim / 2 - 1
    alpha = rng.uniform(0, 0.99 * mu_c)
    return CoulombSystem(rng.uniform(-0.999, 0.999), alpha, l, dim)


# l = 0 with D = 2 has mu_C = 0 and admits no valid coupling
systems = st.integers(0, 5).flatmap(
    lambda l: st.builds(
        lambda eps, frac, dim: CoulombSystem(eps, frac * (l + dim / 2 - 1), l, dim),
        st.floats(-0.999, 0.999),
        st.floats(0.0, 0.99),
        st.integers(2 if l else 3, 7),
    )
)


class TestCoulombSystem:
    def test_mu_c(self):
        assert CoulombSystem(0.5, ALPHA, l=2, dim=3).mu_c == 2.5
        assert CoulombSystem(0.5, ALPHA, l=1, dim=3).mu_c == CoulombSystem(0.5, ALPHA, l=0, dim=5).mu_c

    @pytest.mark.parametrize("eps", [1.0, -1.0, 1.5])
    def test_threshold(self, eps):
        with pytest.raises(ThresholdError):
            CoulombSystem(eps, ALPHA)

    def test_fall_to_center(self):
        with pytest.raises(FallToCenter):
            CoulombSystem(0.5, 0.5, l=0, dim=3)
        with pytest.raises(FallToCenter):
            CoulombSystem(0.5, 0.7, l=0, dim=3)
        # l = 0, D = 2 gives mu_C = 0: any coupling falls to the centre
        with pytest.raises(FallToCenter):
            CoulombSystem(0.5, 0.0, l=0, dim=2)

    @pytest.mark.parametrize("kw", [dict(l=-1), dict(l=0.5), dict(dim=1), dict(dim=2.5)])
    def test_bad_quantum_numbers(self, kw):
        with pytest.raises(ParameterError):
            CoulombSystem(0.5, ALPHA, **kw)

    def test_negative_coupling(self):
        with pytest.raises(ParameterError):
            CoulombSystem(0.5, -0.1)


class TestMorse:
    def test_zero_energy(self):
        c = CoulombSystem(0.0, 0.3, l=1, dim=3)
        m = to_morse(c)
        assert m.v == 1.0 and m.a_dk == 0.0
        assert m.e_m == pytest.approx(-(1.5**2 - 0.3**2) / 2, rel=1e-15)

    def test_zero_coupling(self):
        m = to_morse(CoulombSystem(0.6, 0.0, l=0, dim=3))
        assert m.a_dk == 0.0 and m.e_m == -0.125

    def test_near_threshold_v(self):
        m = to_morse(CoulombSystem(0.999973, ALPHA))
        assert abs(m.v - 0.007348419626014731998517) <= 1e-15 * m.v

    @given(systems)
    def test_e_m_negative(self, c):
        assert to_morse(c).e_m < 0
        assert to_morse(c).v > 0


class TestOscillator:
    def test_zero_coupling(self):
        c = CoulombSystem(0.4, 0.0, l=2, dim=3)
        p = to_oscillator(c)
        assert p.mu_o == 2 * c.mu_c and p.pseudoenergy == 0.0

    def test_zero_energy_frequency(self):
        assert to_oscillator(CoulombSystem(0.0, ALPHA)).omega == 0.5

    def test_mass(self):
        assert to_oscillator(CoulombSystem(0.3, ALPHA)).mass == 4.0

    def test_validation(self):
        with pytest.raises(ParameterError):
            OscillatorParams(4.0, 0.5, 0.0, 0.0)
        with pytest.raises(ParameterError):
            OscillatorParams(4.0, -0.5, 0.0, 1.0)

    def test_dictionary_consistency_1000_draws(self):
        rng = random.Random(20240611)
        worst = 0.0
        for _ in range(1000):
            c = random_system(rng)
            direct = to_oscillator(c)
            chained = oscillator_from_morse(to_morse(c))
            for x, y in [
                (direct.omega, chained.omega),
                (direct.pseudoenergy, chained.pseudoenergy),
                (direct.mu_o, chained.mu_o),
            ]:
                if x != y:
                    worst = max(worst, abs(x - y) / max(abs(x), abs(y)))
        assert worst <= 1e-14

    def test_matching_relations(self):
        c = CoulombSystem(0.8, 0.2, l=1, dim=4)
        m, p = to_morse(c), to_oscillator(c)
        assert p.mu_o**2 == pytest.approx(-2 * p.mass * m.e_m, rel=1e-14)
        assert p.mass * p.omega**2 / 2 == pytest.approx(2 * m.v**2 / p.mass, rel=1e-14)
        assert p.pseudoenergy == pytest.approx(4 * m.a_dk * m.v**2 / p.mass, rel=1e-14)

    def test_kappa_is_v_times_a_dk(self):
        c = CoulombSystem(0.93, ALPHA)
        m, p = to_morse(c), to_oscillator(c)
        assert p.kappa == pytest.approx(c.kappa, rel=1e-14)
        assert m.v * m.a_dk == pytest.approx(c.kappa, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.45])
    @pytest.mark.parametrize("l", [0, 1, 3])
    def test_bound_state_condition_at_pole(self, l, alpha):
        base = CoulombSystem(0.0, alpha, l=l)
        for n_r in range(4):
            p = to_oscillator(base.with_energy(closed_form_level(base, n_r).energy_ratio))
            assert p.kappa == pytest.approx(n_r + (1 + p.mu_o) / 2, rel=1e-12)

    @pytest.mark.parametrize("l", [0, 1, 3])
    def test_bound_state_condition_weak_coupling(self, l):
        # eps_n sits within alpha^2 of 1; a double only pins 1 - eps to
        # eps_machine / (1 - eps) relative, which bounds how exactly kappa can match
        base = CoulombSystem(0.0, ALPHA, l=l)
        for n_r in range(4):
            entry = closed_form_level(base, n_r)
            p = to_oscillator(base.with_energy(entry.energy_ratio))
            bound = 4 * 2.2e-16 / entry.binding
            assert p.kappa == pytest.approx(n_r + (1 + p.mu_o) / 2, rel=bound)

    @given(st.floats(0.0, 0.99), st.floats(0.0, 0.99))
    def test_omega_decreasing_in_abs_eps(self, e1, e2):
        if abs(e1 - e2) < 1e-6:
            return
        lo, hi = sorted((e1, e2))
        w_lo = to_oscillator(CoulombSystem(lo, ALPHA)).omega
        w_hi = to_oscillator(CoulombSystem(hi, ALPHA)).omega
        assert w_hi < w_lo
        assert to_oscillator(CoulombSystem(-hi, ALPHA)).omega == w_hi

    @given(st.floats(0.0, 0.49), st.floats(0.0, 0.49))
    def test_mu_o_decreasing_in_alpha(self, a1, a2):
        if abs(a1 - a2) < 1e-6:
            return
        lo, hi = sorted((a1, a2))
        assert to_oscillator(CoulombSystem(0.5, hi)).mu_o < to_oscillator(CoulombSystem(0.5, lo)).mu_o


class TestCoordinates:
    def test_half_map(self):
        assert half_coordinate_map(0.0) == 0.0
        assert half_coordinate_inverse(half_coordinate_map(3.7)) == 3.7

    def test_radius_chain(self):
        assert oscillator_radius(4.0) == 2.0
        for r in [0.05, 0.3, 1.0, 7.0, 50.0]:
            z = oscillator_radius(r)
            assert z == pytest.approx(math.sqrt(r), rel=1e-15)
            assert coulomb_radius(z) == pytest.approx(r, rel=1e-15)

    @given(st.floats(-50, 50, allow_subnormal=False))
    def test_round_trip(self, x):
        assert half_coordinate_inverse(half_coordinate_map(x)) == x


def test_parameter_map_shape():
    data = parameter_map(CoulombSystem(0.9, ALPHA))
    assert set(data) == {"coulomb", "morse", "oscillator"}
    assert MorseParams(**data["morse"]) == to_morse(CoulombSystem(0.9, ALPHA))
    assert data["oscillator"]["mass"] == 4.0
