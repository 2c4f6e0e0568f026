"""Real-argument special functions: log-Gamma, Kummer M, Tricomi U, Whittaker M/W.

Evaluation strategy
-------------------
Kummer M(a, b, z), z >= 0
    Power series summed with ``math.fsum``.  When the terms cancel badly the
    same series is re-summed in ``decimal`` arithmetic with enough digits to
    absorb the cancellation.  Above ``SERIES_CROSSOVER`` the dominant
    asymptotic expansion is used when it provably meets double precision
    (converged tail, negligible recessive part); otherwise the series.

Tricomi U(a, b, z), z > 0
    * z >= ``SERIES_CROSSOVER``: asymptotic series, if it converges to
      double precision before its terms start growing.
    * z < ``SERIES_CROSSOVER``: connection formula through two Kummer
      series, accepted when the two terms cancel by less than
      ``CONNECTION_MAX_CANCELLATION``.  Near-integer b (where the terms
      cancel like 1/dist(b, Z)) is handled by interpolating in b from
      nodes a safe distance away.
    * otherwise, and directly for a > 0 once z >= ``MILLER_PREFERRED_Z``:
      backward recurrence in a (U is the minimal solution),
      normalized with  sum_n (a)_n (a-b+1)_n / n! U(a+n, b, z) = z**-a.

Whittaker functions follow the standard definitions

    M_{k,m}(z) = exp(-z/2) z**(m+1/2) M(m-k+1/2, 1+2m, z)
    W_{k,m}(z) = exp(-z/2) z**(m+1/2) U(m-k+1/2, 1+2m, z)

so that W*M' - M*W' = Gamma(1+2m) / Gamma(m-k+1/2).
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from decimal import Decimal, localcontext

from .errors import NonConvergence, ParameterError, PoleError

SERIES_CROSSOVER = 30.0
MILLER_MIN_Z = 0.05
MILLER_PREFERRED_Z = 3.0
MAX_SERIES_TERMS = 20000
MAX_MILLER_TERMS = 200000
POLE_TOL = 1e-12
NEAR_INTEGER_B = 1e-3
B_NODE_STEP = 2e-3
CONNECTION_MAX_CANCELLATION = 1e3

_EPS = 2.220446049250313e-16
# cancellation factor beyond which the float series is re-summed in decimal
_CANCELLATION_LIMIT = 1e3


def _nonpos_int(x: float, tol: float = 0.0) -> bool:
    return x <= tol and abs(x - round(x)) <= tol


def log_gamma(x: float) -> tuple[float, int]:
    """Return ``(ln|Gamma(x)|, sign(Gamma(x)))``.

    Raises PoleError within ``POLE_TOL`` of a non-positive integer.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ParameterError(f"log_gamma needs a finite argument, got {x}", "x")
    if _nonpos_int(x, POLE_TOL):
        raise PoleError(f"Gamma has a pole at x = {x}", "x")
    value = math.lgamma(x)
    if x > 0:
        return value, 1
    # Gamma alternates sign between consecutive negative integers
    return value, -1 if math.ceil(-x) % 2 else 1


def rgamma(x: float) -> float:
    """1/Gamma(x); exactly zero at the poles of Gamma."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    if x > 0 and x < 170:
        return 1.0 / math.gamma(x)
    lg, sign = math.lgamma(x), (1 if x > 0 or math.ceil(-x) % 2 == 0 else -1)
    return sign * math.exp(-lg)


@dataclass(frozen=True)
class WhittakerIndex:
    kappa: float
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.mu)):
            raise ParameterError("Whittaker indices must be finite", "kappa/mu")
        if self.mu <= -0.5:
            raise ParameterError(f"mu must exceed -1/2, got {self.mu}", "mu")

    @property
    def a(self) -> float:
        return self.mu - self.kappa + 0.5

    @property
    def b(self) -> float:
        return 1.0 + 2.0 * self.mu


# ---------------------------------------------------------------- Kummer M


def _series_terms(a: float, b: float, z: float) -> list[float]:
    terms = [1.0]
    t = 1.0
    n = 0
    running = 1.0
    while n < MAX_SERIES_TERMS:
        t *= (a + n) / (b + n) * z / (n + 1)
        n += 1
        if t == 0.0:
            return terms
        terms.append(t)
        running += t
        if n > z and n > abs(a) and n > abs(b) and abs(t) <= 1e-18 * abs(running):
            return terms
        if not math.isfinite(t):
            break
    raise NonConvergence(f"Kummer series did not converge (a={a}, b={b}, z={z})")


def _series_decimal(a: float, b: float, z: float, digits: int) -> float:
    with localcontext() as ctx:
        ctx.prec = digits
        da, db, dz = Decimal(a), Decimal(b), Decimal(z)
        tiny = Decimal(10) ** (-(digits + 2))
        s = t = Decimal(1)
        n = 0
        while n < MAX_SERIES_TERMS:
            t = t * (da + n) / (db + n) * dz / (n + 1)
            n += 1
            s += t
            if t == 0 or (n > z and n > abs(a) and n > abs(b) and abs(t) <= tiny * abs(s)):
                return float(s)
    raise NonConvergence(f"extended Kummer series did not converge (a={a}, b={b}, z={z})")


def _kummer_series(a: float, b: float, z: float) -> float:
    terms = _series_terms(a, b, z)
    total = math.fsum(terms)
    if len(terms) > 1:
        scale = math.fsum(abs(t) for t in terms)
        cond = scale / abs(total) if total != 0.0 else math.inf
        if cond > _CANCELLATION_LIMIT:
            extra = 40 if not math.isfinite(cond) else int(math.log10(cond)) + 1
            return _series_decimal(a, b, z, 24 + extra)
    return total


def _kummer_asymptotic(a: float, b: float, z: float) -> tuple[float, float] | None:
    """Dominant large-z expansion as (mantissa, log_scale), or None when unusable."""
    if _nonpos_int(a, 1e-8) or _nonpos_int(b - a, 0.0):
        return None
    lga, sa = log_gamma(a)
    lgb, sb = log_gamma(b)
    log_dom = lgb - lga + z + (a - b) * math.log(z)
    # the recessive part ~ Gamma(b)/Gamma(b-a) z**-a must be invisible
    try:
        lgba, _ = log_gamma(b - a)
        log_rec = lgb - lgba - a * math.log(z)
    except PoleError:
        log_rec = -math.inf
    if log_rec - log_dom > math.log(1e-17):
        return None
    s = t = 1.0
    prev = math.inf
    for k in range(1, 400):
        t *= (b - a + k - 1) * (k - a) / (k * z)
        if abs(t) > prev:
            return None
        prev = abs(t)
        s += t
        if abs(t) <= 1e-17 * abs(s):
            return sa * sb * s, log_dom
    return None


def _kummer_parts(a: float, b: float, z: float) -> tuple[float, float]:
    if _nonpos_int(b):
        raise ParameterError(f"Kummer M undefined for non-positive integer b = {b}", "b")
    if z < 0:
        raise ParameterError(f"kummer_m is implemented for z >= 0, got z = {z}", "z")
    if z == 0.0 or a == 0.0:
        return 1.0, 0.0
    if z > SERIES_CROSSOVER:
        asym = _kummer_asymptotic(a, b, z)
        if asym is not None:
            return asym
        if z > 650:
            raise NonConvergence(f"kummer_m: z = {z} beyond the series range for a={a}, b={b}")
    return _kummer_series(a, b, z), 0.0


def kummer_m(a: float, b: float, z: float) -> float:
    """Confluent hypergeometric function 1F1(a; b; z) for real a, b and z >= 0."""
    mant, log_scale = _kummer_parts(float(a), float(b), float(z))
    return mant * math.exp(log_scale) if log_scale else mant


# ---------------------------------------------------------------- Tricomi U


def _u_polynomial(m: int, b: float, z: float) -> float:
    # U(-m, b, z) = (-1)^m sum_s C(m, s) (b+s)_{m-s} (-z)^s, summed exactly:
    # the alternating terms cancel badly in floating point
    bq, zq = Fraction(b), Fraction(z)
    total = Fraction(0)
    for s in range(m + 1):
        poch = Fraction(1)
        for k in range(s, m):
            poch *= bq + k
        total += math.comb(m, s) * poch * (-zq) ** s
    return float((-1) ** m * total)


def _u_asymptotic(a: float, b: float, z: float) -> float | None:
    s = t = 1.0
    prev = math.inf
    for k in range(1, 500):
        t *= -(a + k - 1) * (a - b + k) / (k * z)
        if t == 0.0:
            break
        if abs(t) > prev:
            return None
        prev = abs(t)
        s += t
        if abs(t) <= 1e-17 * abs(s):
            break
    else:
        return None
    return s * z ** (-a)


def _miller_u(a: float, b: float, z: float, n_top: int, j: int) -> float:
    # ratios rho_n = U(a+n)/U(a+n-1) from the top, via
    # U(c-1) + (b - 2c - z) U(c) + c(c-b+1) U(c+1) = 0
    rho = [0.0] * (n_top + 2)
    nxt = 0.0
    for n in range(n_top, 0, -1):
        c = a + n
        denom = (b - 2.0 * c - z) + c * (c - b + 1.0) * nxt
        if denom == 0.0:
            denom = 1e-300
        nxt = -1.0 / denom
        rho[n] = nxt
    # normalization sum anchored at index j where every weight is positive
    aj = a + j
    total = [1.0]
    term = 1.0
    for m in range(1, n_top - j + 1):
        term *= (aj + m - 1) * (aj - b + m) / m * rho[j + m]
        total.append(term)
        if abs(term) < 1e-18 * total[0] and m > 5:
            break
    s = math.fsum(total)
    log_ratio, sign = 0.0, 1
    for n in range(1, j + 1):
        r = rho[n]
        if r == 0.0:
            return 0.0
        if r < 0:
            sign = -sign
        log_ratio += math.log(abs(r))
    # U(a) = z**-aj / (S * prod_{n<=j} rho_n)
    return sign * math.exp(-aj * math.log(z) - log_ratio) / s


def _u_backward(a: float, b: float, z: float) -> float:
    j = 0
    floor_val = max(0.0, b - 1.0)
    if a <= floor_val:
        j = int(math.floor(floor_val - a)) + 1
    n_top = j + 60 + int(450.0 / z)
    prev = _miller_u(a, b, z, n_top, j)
    while n_top < MAX_MILLER_TERMS:
        n_top = int(n_top * 1.5) + 20
        cur = _miller_u(a, b, z, n_top, j)
        if abs(cur - prev) <= 4 * _EPS * abs(cur):
            return cur
        prev = cur
    raise NonConvergence(f"backward recurrence for U did not settle (a={a}, b={b}, z={z})")


def _u_descend(a: float, b: float, z: float) -> tuple[float, float]:
    """U for a < 0 by downward recurrence; returns (U, error amplification)."""
    # start from two positive indices and recur down in a; the perturbation
    # sequences track how much the starting errors grow relative to U
    m = int(math.floor(-a)) + 1
    upper = _u_backward(a + m + 1.0, b, z)
    cur = _u_backward(a + m, b, z)
    pu, pc = abs(upper), 0.0
    qu, qc = 0.0, abs(cur)
    for n in range(m, 0, -1):
        c = a + n
        p, q = b - 2.0 * c - z, c * (c - b + 1.0)
        cur, upper = -p * cur - q * upper, cur
        pc, pu = -p * pc - q * pu, pc
        qc, qu = -p * qc - q * qu, qc
    amp = (abs(pc) + abs(qc)) / abs(cur) if cur != 0.0 else math.inf
    return cur, max(amp, 1.0)


def _u_connection(a: float, b: float, z: float) -> tuple[float, float]:
    """Connection formula; returns (U, cancellation factor)."""
    # U = G(1-b)/G(a-b+1) M(a,b,z) + G(b-1)/G(a) z^(1-b) M(a-b+1, 2-b, z)
    first = math.gamma(1.0 - b) * rgamma(a - b + 1.0) if not _nonpos_int(1.0 - b) else 0.0
    t1 = first * _kummer_series(a, b, z) if first != 0.0 else 0.0
    lg, sg = log_gamma(b - 1.0)
    coef = sg * math.exp(lg + (1.0 - b) * math.log(z)) * rgamma(a)
    t2 = coef * _kummer_series(a - b + 1.0, 2.0 - b, z) if coef != 0.0 else 0.0
    total = t1 + t2
    cond = (abs(t1) + abs(t2)) / abs(total) if total != 0.0 else math.inf
    return total, cond


def _u_interpolated(a: float, b: float, z: float) -> tuple[float, float]:
    """Connection formula at near-integer b, interpolated from offset nodes."""
    center = round(b)
    xs = [center + k * B_NODE_STEP for k in (-3, -2, -1, 1, 2, 3)]
    ys, cond = [], 1.0
    for x in xs:
        y, c = _u_connection(a, x, z)
        ys.append(y)
        cond = max(cond, c)
    # Neville
    p = list(ys)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            p[i] = ((b - xs[i + level]) * p[i] + (xs[i] - b) * p[i + 1]) / (xs[i] - xs[i + level])
    return p[0], cond


def tricomi_u(a: float, b: float, z: float) -> float:
    """Confluent hypergeometric function of the second kind U(a, b, z), z > 0."""
    a, b, z = float(a), float(b), float(z)
    if not z > 0:
        raise ParameterError(f"tricomi_u needs z > 0, got {z}", "z")
    if a == 0.0:
        return 1.0
    if _nonpos_int(a):
        return _u_polynomial(int(round(-a)), b, z)
    if _nonpos_int(a - b + 1.0):
        # U(a,b,z) = z^(1-b) U(a-b+1, 2-b, z), a polynomial
        return z ** (1.0 - b) * _u_polynomial(int(round(b - a - 1.0)), 2.0 - b, z)
    if z >= SERIES_CROSSOVER:
        val = _u_asymptotic(a, b, z)
        if val is not None:
            return val
    if a > 0 and z >= MILLER_PREFERRED_Z:
        return _u_backward(a, b, z)
    if a < 0 and z >= MILLER_PREFERRED_Z:
        val, amp = _u_descend(a, b, z)
        if amp <= 4.0:
            return val
        try:
            alt, cond = _u_connection(a, b, z)
        except (OverflowError, NonConvergence):
            return val
        return alt if cond < amp else val
    if z < SERIES_CROSSOVER:
        near_int = abs(b - round(b)) < NEAR_INTEGER_B
        try:
            val, cond = _u_interpolated(a, b, z) if near_int else _u_connection(a, b, z)
        except (OverflowError, NonConvergence):
            val, cond = math.nan, math.inf
        # the backward recurrence loses accuracy for a < 0, so tolerate more
        # cancellation there before switching over
        limit = CONNECTION_MAX_CANCELLATION * (100.0 if a < 0 else 1.0)
        if cond <= limit or (z < MILLER_MIN_Z and math.isfinite(val)):
            return val
    return _u_backward(a, b, z)


# ---------------------------------------------------------------- Whittaker


def whittaker_m(idx: WhittakerIndex, z: float) -> float:
    """M_{kappa,mu}(z) for z >= 0."""
    z = float(z)
    if z < 0:
        raise ParameterError(f"whittaker_m needs z >= 0, got {z}", "z")
    if z == 0.0:
        return 0.0
    mant, log_scale = _kummer_parts(idx.a, idx.b, z)
    return mant * math.exp(log_scale - 0.5 * z + (idx.mu + 0.5) * math.log(z))


def whittaker_w(idx: WhittakerIndex, z: float) -> float:
    """W_{kappa,mu}(z) for z > 0; decays like exp(-z/2) z**kappa."""
    z = float(z)
    if not z > 0:
        raise ParameterError(f"whittaker_w needs z > 0, got {z}", "z")
    u = tricomi_u(idx.a, idx.b, z)
    return u * math.exp(-0.5 * z + (idx.mu + 0.5) * math.log(z))


def whittaker_wronskian(idx: WhittakerIndex) -> float:
    """Closed form of W*M' - M*W' (independent of z)."""
    lg_num, s_num = log_gamma(idx.b)
    g = rgamma(idx.a)
    return s_num * math.exp(lg_num) * g
