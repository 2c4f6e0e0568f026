"""Independent check: Green's function of the radial Klein-Gordon Coulomb operator from ODE solutions.

The stationary version of the radial Coulomb action is the operator

    H = -(1/2) d^2/dr^2 + U(r),
    U(r) = (mu_C^2 - 1/4)/(2 r^2) - (eps + alpha/r)^2 / 2 + 1/2,

and the fixed-energy amplitude is its resolvent at spectral point 0,

    G(r_b, r_a) = -2 u_reg(r_<) u_dec(r_>) / Wr[u_reg, u_dec].

u_reg is started from a Frobenius series at the origin, u_dec from the
asymptotic series of the decaying tail; both are integrated with an
embedded 8(5,3) Runge-Kutta pair (scipy's DOP853).  Solutions are stored
segment-wise with a running log scale so the e^{+-k r} dynamic range never
leaves floating-point range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .coulomb_chain import CoulombSystem
from .errors import DomainError, NearPole, StiffnessError, UnderflowError

RTOL = 1e-12
ATOL = 1e-14
TAIL_KR = 40.0
FROBENIUS_TOL = 1e-16
SEGMENT_GROWTH = 32.0  # geometric segment ratio near the origin
SEGMENT_KR = 20.0  # max k * (segment length) away from it
NEAR_POLE_WRONSKIAN = 1e-10


@dataclass(frozen=True)
class RadialProblem:
    system: CoulombSystem

    @property
    def k(self) -> float:
        return self.system.k

    @property
    def frobenius_exponent(self) -> float:
        c = self.system
        return 0.5 + math.sqrt(c.mu_c**2 - c.coupling**2)

    def potential(self, r: float) -> float:
        """U(r), expanded so that 1 - eps^2 never cancels in floating point."""
        c = self.system
        a = (c.mu_c - c.coupling) * (c.mu_c + c.coupling) - 0.25
        return 0.5 * a / (r * r) - c.energy_ratio * c.coupling / r + 0.5 * c.k**2

    def potential_unexpanded(self, r: float) -> float:
        c = self.system
        w = c.energy_ratio + c.coupling / r
        return (c.mu_c**2 - 0.25) / (2.0 * r * r) - 0.5 * w * w + 0.5

    def q(self, r: float) -> float:
        """u'' = q(r) u."""
        return 2.0 * self.potential(r)

    def outer_turning_point(self) -> float:
        """Largest r with U(r) = 0, or a characteristic length if there is none."""
        c = self.system
        a_coef = c.mu_c**2 - 0.25 - c.coupling**2
        b_coef = c.energy_ratio * c.coupling
        disc = b_coef * b_coef - c.k**2 * a_coef
        if disc > 0 and b_coef + math.sqrt(disc) > 0:
            return (b_coef + math.sqrt(disc)) / c.k**2
        return max(math.sqrt(abs(a_coef)), 1.0) / c.k

    def default_r_far(self) -> float:
        kappa = abs(self.system.kappa)
        return max((TAIL_KR + 2.0 * kappa) / self.k, 2.0 * self.outer_turning_point())


@dataclass
class _Segment:
    lo: float
    hi: float
    sol: object
    log_scale: float


@dataclass
class SolutionTable:
    """A homogeneous solution stored as scaled pieces: u = y[0] * exp(log_scale)."""

    problem: RadialProblem
    segments: list = field(default_factory=list)

    @property
    def r_min(self) -> float:
        return min(s.lo for s in self.segments)

    @property
    def r_max(self) -> float:
        return max(s.hi for s in self.segments)

    def scaled_state(self, r: float) -> tuple[float, float, float]:
        """(u, u', log_scale) with the true solution equal to (u, u') * exp(log_scale)."""
        for seg in self.segments:
            if seg.lo <= r <= seg.hi:
                y = seg.sol(r)
                return float(y[0]), float(y[1]), seg.log_scale
        raise DomainError(f"r = {r} outside the table range [{self.r_min}, {self.r_max}]", "r")

    def value(self, r: float) -> float:
        u, _, ls = self.scaled_state(r)
        return u * math.exp(ls)

    def derivative(self, r: float) -> float:
        _, du, ls = self.scaled_state(r)
        return du * math.exp(ls)

    def log_slope(self, r: float) -> float:
        u, du, _ = self.scaled_state(r)
        return r * du / u

    def scaled(self, factor: float) -> "SolutionTable":
        """Same solution multiplied by ``factor`` (> 0 keeps log scaling, sign kept in y)."""
        shift = math.log(abs(factor))
        out = SolutionTable(self.problem)
        for seg in self.segments:
            sol = seg.sol
            if factor < 0:
                sol = _Negated(sol)
            out.segments.append(_Segment(seg.lo, seg.hi, sol, seg.log_scale + shift))
        return out


class _EndpointOnly:
    """Stand-in for a dense solution when only the final state was kept."""

    def __init__(self, r, y):
        self.r, self.y = r, y

    def __call__(self, r):
        if r != self.r:
            raise DomainError(f"only r = {self.r} was stored, asked for {r}", "r")
        return self.y


class _Negated:
    def __init__(self, sol):
        self.sol = sol

    def __call__(self, r):
        return -self.sol(r)


def _rhs(problem: RadialProblem):
    c = problem.system
    # q(r) = a / r^2 - b / r + k^2, constants hoisted out of the hot loop
    a = (c.mu_c - c.coupling) * (c.mu_c + c.coupling) - 0.25
    b = 2.0 * c.energy_ratio * c.coupling
    k2 = c.k**2

    def f(r, y):
        inv = 1.0 / r
        return (y[1], ((a * inv - b) * inv + k2) * y[0])

    return f


def _edges(r0: float, r1: float, k: float) -> list[float]:
    edges = [r0]
    r = r0
    if r1 > r0:
        while r < r1:
            r = min(r * SEGMENT_GROWTH, r + SEGMENT_KR / k, r1)
            edges.append(r)
    else:
        while r > r1:
            r = max(r / SEGMENT_GROWTH, r - SEGMENT_KR / k, r1)
            edges.append(r)
    return edges


def _integrate(problem, r0, r1, u0, du0, log0, rtol, atol, dense=True) -> SolutionTable:
    table = SolutionTable(problem)
    f = _rhs(problem)
    u, du, log_scale = u0, du0, log0
    edges = _edges(r0, r1, problem.k)
    for a, b in zip(edges[:-1], edges[1:]):
        length = min(a, 1.0 / problem.k)
        norm = math.hypot(u, du * length)
        if norm == 0.0 or not math.isfinite(norm):
            raise UnderflowError(f"solution norm {norm} at r = {a}")
        u, du = u / norm, du / norm
        log_scale += math.log(norm)
        res = solve_ivp(
            f, (a, b), (u, du), method="DOP853", rtol=rtol, atol=atol, dense_output=dense
        )
        if res.status != 0:
            raise StiffnessError(f"integrator failed on [{a}, {b}]: {res.message}")
        lo, hi = (a, b) if a < b else (b, a)
        sol = res.sol if dense else _EndpointOnly(res.t[-1], res.y[:, -1])
        table.segments.append(_Segment(lo, hi, sol, log_scale))
        u, du = float(res.y[0, -1]), float(res.y[1, -1])
    return table


def _frobenius(problem: RadialProblem, r: float) -> tuple[float, float, float]:
    c = problem.system
    s = problem.frobenius_exponent
    bcoef = 2.0 * c.energy_ratio * c.coupling
    k2 = c.k**2
    coeffs = [1.0]
    u_sum, du_sum = 1.0, s
    n = 0
    prev = 0.0
    while True:
        n += 1
        cn = (-bcoef * coeffs[-1] + (k2 * prev if n >= 2 else 0.0)) / (n * (2 * s + n - 1))
        prev = coeffs[-1]
        coeffs.append(cn)
        term = cn * r**n
        u_sum += term
        du_sum += (s + n) * term
        if abs(term) < FROBENIUS_TOL * abs(u_sum) and n >= 2:
            break
        if n > 200:
            raise StiffnessError(f"Frobenius series slow at r_start = {r}; pick a smaller start")
    # u = r^s u_sum, u' = r^(s-1) du_sum
    return u_sum, du_sum / r, s * math.log(r)


def _tail(problem: RadialProblem, r: float) -> tuple[float, float, float]:
    """Asymptotic series e^{-k r} r^kappa sum d_n r^-n at large r."""
    c = problem.system
    k, kappa = c.k, c.kappa
    a_coef = c.mu_c**2 - 0.25 - c.coupling**2
    d = 1.0
    s_u, s_du = 1.0, 0.0  # sum d_n r^-n and sum -n d_n r^-n-1
    best = math.inf
    for n in range(1, 200):
        d *= (a_coef - (kappa - n + 1) * (kappa - n)) / (2.0 * k * n)
        term = d * r ** (-n)
        # terms may grow while n < kappa; past that, growth means divergence
        if abs(term) > best and n > abs(kappa) + 2:
            raise UnderflowError(f"tail series diverges at r_far = {r}; increase r_far")
        best = min(best, abs(term)) if n > abs(kappa) + 2 else math.inf
        s_u += term
        s_du += -n * term / r
        if abs(term) < FROBENIUS_TOL * abs(s_u):
            break
    # u = e^{-kr} r^kappa S, u' = e^{-kr} r^kappa [(-k + kappa/r) S + S']
    du = (-k + kappa / r) * s_u + s_du
    return s_u, du, -k * r + kappa * math.log(r)


def integrate_regular(
    p: RadialProblem,
    r_start: float,
    r_end: float,
    rtol: float = RTOL,
    atol: float = ATOL,
    dense: bool = True,
) -> SolutionTable:
    if not 0 < r_start < r_end:
        raise DomainError(f"need 0 < r_start < r_end, got {r_start}, {r_end}", "r_start")
    u, du, ls = _frobenius(p, r_start)
    return _integrate(p, r_start, r_end, u, du, ls, rtol, atol, dense)


def integrate_decaying(
    p: RadialProblem,
    r_far: float,
    r_end: float,
    rtol: float = RTOL,
    atol: float = ATOL,
    dense: bool = True,
) -> SolutionTable:
    if not 0 < r_end < r_far:
        raise DomainError(f"need 0 < r_end < r_far, got {r_end}, {r_far}", "r_far")
    u, du, ls = _tail(p, r_far)
    return _integrate(p, r_far, r_end, u, du, ls, rtol, atol, dense)


def log_wronskian(u1: SolutionTable, u2: SolutionTable, r: float) -> tuple[int, float]:
    """(sign, ln|W|) of u1 u2' - u1' u2 at r."""
    a, da, la = u1.scaled_state(r)
    b, db, lb = u2.scaled_state(r)
    w = a * db - da * b
    if w == 0.0:
        return 0, -math.inf
    return (1 if w > 0 else -1), math.log(abs(w)) + la + lb


def wronskian(u1: SolutionTable, u2: SolutionTable, r: float) -> float:
    sign, lw = log_wronskian(u1, u2, r)
    return sign * math.exp(lw) if sign else 0.0


def normalized_wronskian(u1: SolutionTable, u2: SolutionTable, r: float) -> float:
    """Wronskian divided by the state norms: the sine of the angle between the solutions."""
    a, da, _ = u1.scaled_state(r)
    b, db, _ = u2.scaled_state(r)
    length = min(r, 1.0 / u1.problem.k)
    na, nb = math.hypot(a, da * length), math.hypot(b, db * length)
    return (a * db - da * b) * length / (na * nb)


def default_r_start(p: RadialProblem, r_min: float) -> float:
    return min(1e-6, 1e-3 * r_min, 1e-3 / max(1.0, abs(p.system.energy_ratio * p.system.coupling)))


class GreenOracle:
    """Resolvent built once for all radii in [r_lo, r_hi]."""

    def __init__(
        self,
        p: RadialProblem,
        r_lo: float,
        r_hi: float,
        rtol: float = RTOL,
        atol: float = ATOL,
        r_far: float | None = None,
    ):
        self.problem = p
        self.r_match = r_hi
        r_far = max(r_far or p.default_r_far(), 2.0 * r_hi)
        self.reg = integrate_regular(p, default_r_start(p, r_lo), r_hi, rtol, atol)
        self.dec = integrate_decaying(p, r_far, r_lo, rtol, atol)
        if abs(normalized_wronskian(self.reg, self.dec, self.r_match)) < NEAR_POLE_WRONSKIAN:
            raise NearPole(
                f"Wronskian vanishes at epsilon = {p.system.energy_ratio}: bound state", "epsilon"
            )
        self.w_sign, self.w_log = log_wronskian(self.reg, self.dec, self.r_match)

    def __call__(self, r_b: float, r_a: float) -> float:
        r_b, r_a = max(r_b, r_a), min(r_b, r_a)
        u, _, lu = self.reg.scaled_state(r_a)
        v, _, lv = self.dec.scaled_state(r_b)
        return -2.0 * u * v * self.w_sign * math.exp(lu + lv - self.w_log)


def oracle_green(p: RadialProblem, r_b: float, r_a: float, **kw) -> float:
    if r_b < r_a:
        r_b, r_a = r_a, r_b
    return GreenOracle(p, r_a, r_b, **kw)(r_b, r_a)


# ---------------------------------------------------------------- bound states


def level_function(c_template: CoulombSystem, rtol: float = RTOL, atol: float = ATOL):
    """eps -> normalized Wronskian of u_reg and u_dec; its zeros are the bound levels."""

    def f(eps: float) -> float:
        p = RadialProblem(c_template.with_energy(eps))
        r_m = p.outer_turning_point()
        reg = integrate_regular(p, default_r_start(p, r_m), r_m, rtol, atol, dense=False)
        dec = integrate_decaying(p, p.default_r_far(), r_m, rtol, atol, dense=False)
        return normalized_wronskian(reg, dec, r_m)

    return f


def oracle_level(
    c_template: CoulombSystem, lo: float, hi: float, xtol: float = 1e-15, **kw
) -> float:
    """Zero of the level function inside the bracket [lo, hi]."""
    f = level_function(c_template, **kw)
    return brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


@dataclass
class BoundState:
    """Eigenfunction at a level, normalized to int u^2 dr = 1."""

    problem: RadialProblem
    reg: SolutionTable
    dec: SolutionTable
    r_match: float
    r_far: float

    def __call__(self, r: float) -> float:
        table = self.reg if r <= self.r_match else self.dec
        return table.value(r)

    def expectation(self, g, points: int = 4000) -> float:
        """int g(r) u(r)^2 dr by composite Gauss-Legendre on a log-spaced mesh."""
        from numpy.polynomial.legendre import leggauss

        x, w = leggauss(16)
        r0 = self.reg.r_min
        edges = np.geomspace(r0, self.r_far, points // 16 + 1)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            rs = 0.5 * (b - a) * x + 0.5 * (a + b)
            total += 0.5 * (b - a) * sum(wi * g(r) * self(r) ** 2 for r, wi in zip(rs, w))
        return total


def bound_state(c: CoulombSystem, rtol: float = RTOL, atol: float = ATOL) -> BoundState:
    """Eigenfunction at the (already located) level c.energy_ratio."""
    p = RadialProblem(c)
    r_m = p.outer_turning_point()
    r_far = p.default_r_far()
    reg = integrate_regular(p, default_r_start(p, r_m), r_m, rtol, atol)
    dec = integrate_decaying(p, r_far, r_m, rtol, atol)
    ratio = reg.value(r_m) / dec.value(r_m)
    state = BoundState(p, reg, dec.scaled(ratio), r_m, r_far)
    norm = state.expectation(lambda r: 1.0)
    scale = 1.0 / math.sqrt(norm)
    return BoundState(p, reg.scaled(scale), state.dec.scaled(scale), r_m, r_far)
