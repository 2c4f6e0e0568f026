"""Effective potential generated by a coordinate transformation r = h(q).

For a path-dependent time reparameterization combined with r = h(q) the
transformed action picks up

    V_eff(q) = -(rho * hbar**2 / m) * [ h'''/(4 h') - (3/8) (h''/h')**2 ]

with the local time-scaling function f fixed by h'(q)**2 = f(h(q)).  All
quantities are dimensionless (hbar = 1 unless passed explicitly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import DegenerateMap, DomainError, ParameterError

Map = Callable[[float], float]

DEGENERATE_DERIVATIVE = 1e-300
F_CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class GaugeChoice:
    """Delta gauge: the fluctuating scale variable is pinned to rho = 1."""

    rho: float = 1.0

    def __post_init__(self):
        if self.rho != 1.0:
            raise ParameterError("the delta gauge fixes rho = 1", "rho")


@dataclass(frozen=True)
class TransformSpec:
    """A transformation h with analytic first three derivatives on an open interval."""

    name: str
    h: Map
    d1: Map
    d2: Map
    d3: Map
    domain: tuple[float, float] = (-math.inf, math.inf)

    def check(self, q: float) -> None:
        lo, hi = self.domain
        if not (lo < q < hi):
            raise DomainError(f"q = {q} outside the domain {self.domain} of map '{self.name}'", "q")


def identity_map() -> TransformSpec:
    return TransformSpec(
        "identity",
        h=lambda q: q,
        d1=lambda q: 1.0,
        d2=lambda q: 0.0,
        d3=lambda q: 0.0,
    )


def exponential_map() -> TransformSpec:
    """r = e^x, taking the half line onto the whole line (Coulomb -> Morse)."""
    return TransformSpec("exp", h=math.exp, d1=math.exp, d2=math.exp, d3=math.exp)


def logarithmic_map() -> TransformSpec:
    """x = ln z (Morse -> radial oscillator)."""
    return TransformSpec(
        "log",
        h=math.log,
        d1=lambda z: 1.0 / z,
        d2=lambda z: -1.0 / (z * z),
        d3=lambda z: 2.0 / (z * z * z),
        domain=(0.0, math.inf),
    )


MAPS = {"identity": identity_map, "exp": exponential_map, "log": logarithmic_map}


def _bracket(d1: float, d2: float, d3: float) -> float:
    if abs(d1) < DEGENERATE_DERIVATIVE:
        raise DegenerateMap(f"|h'(q)| = {abs(d1)} is below {DEGENERATE_DERIVATIVE}", "q")
    ratio = d2 / d1
    return 0.25 * d3 / d1 - 0.375 * ratio * ratio


def effective_potential(
    t: TransformSpec, q: float, rho: float = 1.0, mass: float = 1.0, hbar: float = 1.0
) -> float:
    t.check(q)
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}", "rho")
    if not mass > 0:
        raise ParameterError(f"mass must be positive, got {mass}", "mass")
    return -(rho * hbar * hbar / mass) * _bracket(t.d1(q), t.d2(q), t.d3(q))


def effective_potential_numeric(
    t: TransformSpec, q: float, rho: float = 1.0, mass: float = 1.0, step: float | None = None
) -> float:
    """Same formula with derivatives of ``t.h`` from 5-point stencils (cross-check only)."""
    t.check(q)
    if step is None:
        # stay well inside the domain: the stencil reaches q +- 3 step
        edge = min(q - t.domain[0], t.domain[1] - q)
        step = 1e-2 * min(max(1.0, abs(q)), edge)
    hs = step
    f = [t.h(q + k * hs) for k in (-3, -2, -1, 0, 1, 2, 3)]
    fm3, fm2, fm1, f0, fp1, fp2, fp3 = f
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * hs)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * hs * hs)
    # 4th-order accurate third derivative needs the 7-point stencil
    d3 = (fm3 - 8 * fm2 + 13 * fm1 - 13 * fp1 + 8 * fp2 - fp3) / (8 * hs**3)
    return -(rho / mass) * _bracket(d1, d2, d3)


@dataclass
class FConsistencyReport:
    """Result of checking h'(q)**2 == f(h(q)) on a grid.

    ``max_deviation`` is absolute; ``max_scaled_deviation`` divides each
    deviation by max(1, |f|) and is what ``passed`` is judged on.
    """

    map_name: str
    max_deviation: float
    max_scaled_deviation: float
    tolerance: float
    failures: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_scaled_deviation <= self.tolerance


def verify_f_consistency(
    t: TransformSpec, f: Map, q_grid: Sequence[float], tolerance: float = F_CONSISTENCY_TOL
) -> FConsistencyReport:
    worst = worst_scaled = 0.0
    failures = []
    for q in q_grid:
        t.check(q)
        target = f(t.h(q))
        dev = abs(t.d1(q) ** 2 - target)
        scaled = dev / max(1.0, abs(target))
        worst = max(worst, dev)
        worst_scaled = max(worst_scaled, scaled)
        if scaled > tolerance:
            failures.append(q)
    return FConsistencyReport(t.name, worst, worst_scaled, tolerance, failures)
