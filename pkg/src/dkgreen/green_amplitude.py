"""Closed-form fixed-energy amplitudes, their DK equivalence, and the bound spectrum.

Conventions
-----------
* Kernels are real numbers.  Constant complex units are stripped and
  recorded in :class:`GreenValue` (``phase``); the oscillator amplitude
  carries -i, the Coulomb amplitude none.
* Arguments are ordered (r_b >= r_a): W sits on the larger radius, M on the
  smaller one.  :func:`coulomb_kernel` accepts either order.
* The Coulomb amplitude as returned is the resolvent of the radial operator
  -(1/2) d^2/dr^2 + U(r) at spectral point 0 (see :mod:`kg_oracle`).  The
  path-integral prefactor i*hbar/(2 m_C c) is *not* folded in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coulomb_chain import CoulombSystem, OscillatorParams, oscillator_radius, to_oscillator
from .errors import OrderError, ParameterError, PoleError
from .specfun import WhittakerIndex, log_gamma, whittaker_m, whittaker_w

POLE_GUARD = 1e-9
SPECTRUM_BRACKET = 1e-14

OSCILLATOR_CONVENTION = "1/omega included; -i factored out; hbar = 1"
COULOMB_CONVENTION = "prefactor 1/sqrt(1-eps^2) (m_C c/sqrt(m^2c^4-E^2)); i*hbar/(2 m_C c) not included"


@dataclass(frozen=True)
class GreenValue:
    value: float
    phase: complex = 1.0
    convention: str = COULOMB_CONVENTION

    @property
    def complex_value(self) -> complex:
        return self.phase * self.value


@dataclass(frozen=True)
class SpectrumEntry:
    n_r: int
    l: int
    energy_ratio: float
    principal_combination: float
    binding: float  # 1 - eps_n, computed without cancellation


def _gamma_ratio(num_arg: float, den_arg: float) -> float:
    if num_arg <= 0 and abs(num_arg - round(num_arg)) < POLE_GUARD:
        raise PoleError(
            f"Gamma argument {num_arg!r} is within {POLE_GUARD} of the pole at {round(num_arg)}",
            "epsilon",
        )
    lg_n, s_n = log_gamma(num_arg)
    lg_d, s_d = log_gamma(den_arg)
    return s_n * s_d * math.exp(lg_n - lg_d)


def _check_order(b: float, a: float, names: str) -> None:
    if not a > 0:
        raise ParameterError(f"radii must be positive, got {a}", names)
    if b < a:
        raise OrderError(f"expected {names.split(',')[0]} >= {names.split(',')[1]}, got {b} < {a}", names)


def oscillator_green(p: OscillatorParams, z_b: float, z_a: float) -> GreenValue:
    """Radial oscillator fixed-energy amplitude (real part after removing -i)."""
    _check_order(z_b, z_a, "z_b,z_a")
    kappa = p.pseudoenergy / (2.0 * p.omega)
    idx = WhittakerIndex(kappa, 0.5 * p.mu_o)
    ratio = _gamma_ratio(0.5 * (1.0 + p.mu_o) - kappa, 1.0 + p.mu_o)
    w = whittaker_w(idx, p.scale * z_b * z_b)
    m = whittaker_m(idx, p.scale * z_a * z_a)
    value = ratio / (p.omega * math.sqrt(z_b * z_a)) * w * m
    return GreenValue(value, phase=-1j, convention=OSCILLATOR_CONVENTION)


def coulomb_green(c: CoulombSystem, r_b: float, r_a: float) -> GreenValue:
    """Relativistic Coulomb radial fixed-energy amplitude, r_b >= r_a."""
    _check_order(r_b, r_a, "r_b,r_a")
    k, mu, kappa = c.k, c.mu_tilde, c.kappa
    idx = WhittakerIndex(kappa, mu)
    ratio = _gamma_ratio(0.5 + mu - kappa, 1.0 + 2.0 * mu)
    value = ratio / k * whittaker_w(idx, 2.0 * k * r_b) * whittaker_m(idx, 2.0 * k * r_a)
    return GreenValue(value)


def coulomb_kernel(c: CoulombSystem, r1: float, r2: float) -> float:
    """Symmetric kernel: orders the radii before evaluating."""
    return coulomb_green(c, max(r1, r2), min(r1, r2)).value


def dk_prefactor(z_b: float, z_a: float) -> float:
    """Constant-free factor linking the oscillator amplitude to the Coulomb one.

    Collected along the chain: exp(x_b/2) exp(x_a/2) -> z_b z_a from the first
    transformation, 1/2 from rescaling the Morse coordinate, and
    (z_b z_a)**-1/2 from the second transformation's f**(1/4) factors.  The
    overall i*hbar/(2 m_C c) and the oscillator's -i are left out on both sides.
    """
    return 0.5 * z_b * z_a / math.sqrt(z_b * z_a)


@dataclass
class DKIdentityReport:
    r_b: float
    r_a: float
    direct: float
    chained: float

    @property
    def rel_deviation(self) -> float:
        scale = max(abs(self.direct), 1e-300)
        return abs(self.direct - self.chained) / scale


def dk_identity_check(c: CoulombSystem, r_b: float, r_a: float) -> DKIdentityReport:
    direct = coulomb_green(c, r_b, r_a).value
    z_b, z_a = oscillator_radius(r_b), oscillator_radius(r_a)
    osc = oscillator_green(to_oscillator(c), z_b, z_a)
    return DKIdentityReport(r_b, r_a, direct, dk_prefactor(z_b, z_a) * osc.value)


# ---------------------------------------------------------------- spectrum


def pole_condition(c: CoulombSystem, energy_ratio: float, n_r: int) -> float:
    """1/2 + mu~ + n_r - eps*alpha/sqrt(1-eps^2); vanishes at the n_r-th pole."""
    eps = energy_ratio
    return 0.5 + c.mu_tilde + n_r - eps * c.coupling / math.sqrt((1.0 - eps) * (1.0 + eps))


def _pole_condition_derivative(c: CoulombSystem, eps: float) -> float:
    return -c.coupling / ((1.0 - eps) * (1.0 + eps)) ** 1.5


def closed_form_level(c: CoulombSystem, n_r: int) -> SpectrumEntry:
    n = n_r + 0.5 + c.mu_tilde
    root = math.hypot(n, c.coupling)
    binding = c.coupling**2 / (root * (root + n))
    return SpectrumEntry(n_r, c.l, n / root, n, binding)


def solve_level(c: CoulombSystem, n_r: int) -> float:
    """Bisection on (0, 1) down to ``SPECTRUM_BRACKET`` plus one Newton polish."""
    if c.coupling == 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    # g(0) > 0 and g -> -inf as eps -> 1
    while hi - lo > SPECTRUM_BRACKET:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if pole_condition(c, mid, n_r) > 0:
            lo = mid
        else:
            hi = mid
    eps = 0.5 * (lo + hi)
    step = pole_condition(c, eps, n_r) / _pole_condition_derivative(c, eps)
    polished = eps - step
    return polished if lo <= polished <= hi else eps


def bound_spectrum(c_template: CoulombSystem, n_r_max: int) -> list[SpectrumEntry]:
    """Bound levels n_r = 0..n_r_max for the template's (alpha, l, dim).

    Raises ArithmeticError if root finding and the closed form disagree by
    more than 1e-12.
    """
    if n_r_max < 0:
        raise ParameterError(f"n_r_max must be >= 0, got {n_r_max}", "nmax")
    out = []
    for n_r in range(n_r_max + 1):
        entry = closed_form_level(c_template, n_r)
        root = solve_level(c_template, n_r)
        if abs(root - entry.energy_ratio) > 1e-12:
            raise ArithmeticError(
                f"level n_r={n_r}: bisection {root!r} vs closed form {entry.energy_ratio!r}"
            )
        out.append(entry)
    return out


# ---------------------------------------------------------------- residues


def _pole_step(c: CoulombSystem, entry: SpectrumEntry) -> float:
    # offset giving a Gamma-argument distance of ~1e-3 from the pole
    slope = abs(_pole_condition_derivative(c, entry.energy_ratio)) if c.coupling else 1.0
    return min(1e-3 / slope, 0.1 * entry.binding)


def residue_at_pole(c: CoulombSystem, entry: SpectrumEntry, r_b: float, r_a: float) -> float:
    """lim_{eps -> eps_n} (eps - eps_n) G(r_b, r_a; eps), via Richardson extrapolation.

    The arguments may come in either order; the residue is symmetric.
    """
    if c.coupling == 0.0:
        raise ParameterError("no bound states at zero coupling", "alpha")
    eps_n = entry.energy_ratio
    h0 = _pole_step(c, entry)

    def sym(h):
        vals = []
        for sgn in (1.0, -1.0):
            eps = eps_n + sgn * h
            delta = eps - eps_n
            vals.append(delta * coulomb_kernel(c.with_energy(eps), r_b, r_a))
        return 0.5 * (vals[0] + vals[1])

    # even expansion in h: eliminate the h^2 and h^4 terms
    s1, s2, s3 = sym(h0), sym(h0 / 2), sym(h0 / 4)
    r12 = (4 * s2 - s1) / 3
    r23 = (4 * s3 - s2) / 3
    return (16 * r23 - r12) / 15
