"""Parameter sets of the relativistic Coulomb problem and its Morse/oscillator images.

Units: hbar = c = m_C = 1.  Energies are in units of m_C c**2, lengths in
reduced Compton wavelengths hbar/(m_C c).

The fine-structure constant is ``coupling`` (alpha_fs).  The Morse-stage
depth parameter E*e**2/(m**2 c**4 - E**2) is kept separately as ``a_dk``;
downstream only the product v * a_dk = eps*alpha_fs/sqrt(1-eps**2) is used.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import FallToCenter, ParameterError, ThresholdError

OSCILLATOR_MASS = 4.0  # m_O = 4 m_C
_CHAIN_RTOL = 1e-13


@dataclass(frozen=True)
class CoulombSystem:
    energy_ratio: float
    coupling: float
    l: int = 0
    dim: int = 3

    def __post_init__(self):
        eps, alpha = self.energy_ratio, self.coupling
        if not math.isfinite(eps):
            raise ParameterError("energy ratio must be finite", "epsilon")
        if not abs(eps) < 1.0:
            raise ThresholdError(f"|epsilon| = {abs(eps)} is not below threshold 1", "epsilon")
        if int(self.l) != self.l or self.l < 0:
            raise ParameterError(f"l must be a non-negative integer, got {self.l}", "l")
        if int(self.dim) != self.dim or self.dim < 2:
            raise ParameterError(f"dim must be an integer >= 2, got {self.dim}", "dim")
        if not (math.isfinite(alpha) and alpha >= 0):
            raise ParameterError(f"coupling must be finite and >= 0, got {alpha}", "alpha")
        if alpha >= self.mu_c:
            raise FallToCenter(
                f"coupling {alpha} >= mu_C = {self.mu_c}: fall to center", "alpha"
            )

    @property
    def mu_c(self) -> float:
        return self.l + self.dim / 2 - 1

    @property
    def mu_tilde(self) -> float:
        """sqrt(mu_C**2 - alpha**2): the coupling-shifted angular index."""
        return math.sqrt((self.mu_c - self.coupling) * (self.mu_c + self.coupling))

    @property
    def k(self) -> float:
        """sqrt(1 - eps**2): decay constant of the bound tail."""
        eps = self.energy_ratio
        return math.sqrt((1.0 - eps) * (1.0 + eps))

    @property
    def kappa(self) -> float:
        return self.energy_ratio * self.coupling / self.k

    def with_energy(self, energy_ratio: float) -> "CoulombSystem":
        return CoulombSystem(energy_ratio, self.coupling, self.l, self.dim)

    def as_dict(self) -> dict:
        return {
            "epsilon": self.energy_ratio,
            "alpha": self.coupling,
            "l": self.l,
            "dim": self.dim,
            "mu_c": self.mu_c,
        }


@dataclass(frozen=True)
class MorseParams:
    v: float
    a_dk: float
    e_m: float


@dataclass(frozen=True)
class OscillatorParams:
    mass: float
    omega: float
    pseudoenergy: float
    mu_o: float

    def __post_init__(self):
        if not self.mu_o > 0:
            raise ParameterError(f"mu_O must be positive, got {self.mu_o}", "mu_o")
        if not self.omega > 0:
            raise ParameterError(f"omega must be positive, got {self.omega}", "omega")
        if not self.mass > 0:
            raise ParameterError(f"mass must be positive, got {self.mass}", "mass")

    @property
    def kappa(self) -> float:
        """Whittaker first index E_O / (2 hbar omega)."""
        return self.pseudoenergy / (2.0 * self.omega)

    @property
    def scale(self) -> float:
        """m_O omega / hbar, the factor multiplying z**2 in the Whittaker arguments."""
        return self.mass * self.omega


def to_morse(c: CoulombSystem) -> MorseParams:
    eps, alpha = c.energy_ratio, c.coupling
    one_minus_eps2 = (1.0 - eps) * (1.0 + eps)
    return MorseParams(
        v=math.sqrt(one_minus_eps2),
        a_dk=eps * alpha / one_minus_eps2,
        e_m=-0.5 * (c.mu_c - alpha) * (c.mu_c + alpha),
    )


def oscillator_from_morse(m: MorseParams, mass: float = OSCILLATOR_MASS) -> OscillatorParams:
    """Solve the three Morse -> oscillator matching relations for (mu_O, omega, E_O)."""
    # hbar^2 mu_O^2 = -2 m_O E_M ; m_O w^2 / 2 = 2 v^2 / m_O ; E_O = 4 a v^2 / m_O
    return OscillatorParams(
        mass=mass,
        omega=math.sqrt(4.0 * m.v * m.v / (mass * mass)),
        pseudoenergy=4.0 * m.a_dk * m.v * m.v / mass,
        mu_o=math.sqrt(-2.0 * mass * m.e_m),
    )


def to_oscillator(c: CoulombSystem) -> OscillatorParams:
    """Closed-form Coulomb -> oscillator dictionary, checked against the Morse route."""
    direct = OscillatorParams(
        mass=OSCILLATOR_MASS,
        omega=0.5 * c.k,
        pseudoenergy=c.energy_ratio * c.coupling,
        mu_o=2.0 * c.mu_tilde,
    )
    chained = oscillator_from_morse(to_morse(c))
    for name, x, y in (
        ("omega", direct.omega, chained.omega),
        ("pseudoenergy", direct.pseudoenergy, chained.pseudoenergy),
        ("mu_o", direct.mu_o, chained.mu_o),
    ):
        assert abs(x - y) <= _CHAIN_RTOL * max(abs(x), abs(y), 1e-300), (name, x, y)
    return direct


def half_coordinate_map(x: float) -> float:
    """Morse coordinate x -> rescaled coordinate x_O = x/2."""
    return 0.5 * x


def half_coordinate_inverse(x_o: float) -> float:
    return 2.0 * x_o


def oscillator_radius(r_c: float) -> float:
    """z from r_C through x = ln r_C, x_O = x/2, z = exp(x_O); equals sqrt(r_C)."""
    return math.exp(half_coordinate_map(math.log(r_c)))


def coulomb_radius(z: float) -> float:
    """Inverse chain: r_C = exp(2 ln z) = z**2."""
    return math.exp(half_coordinate_inverse(math.log(z)))


def parameter_map(c: CoulombSystem) -> dict:
    """Full dictionary (Coulomb, Morse, oscillator) as plain data."""
    return {
        "coulomb": c.as_dict(),
        "morse": asdict(to_morse(c)),
        "oscillator": asdict(to_oscillator(c)),
    }
