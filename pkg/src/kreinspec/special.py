"""Bessel functions of the first kind for integer and half-integer orders,
their positive zeros, and the fixed points of tan t = t.

Only integer and half-integer orders are supported: every radial channel of
the interval and ball spectra uses an order of the form l + (n-2)/2 or
l + n/2 with integer n and l, so general-order Gamma machinery is never
needed.

Evaluation is by backward recurrence: integer orders use Miller's algorithm
normalized through J_0(x) + 2*sum_k J_{2k}(x) = 1, half-integer orders
recur on spherical Bessel functions and normalize against the closed forms
sin(x)/x and sin(x)/x^2 - cos(x)/x, whichever is better conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BracketFailure, DomainError

__all__ = ["BesselOrder", "bessel_j", "bessel_j_derivative", "bessel_zero", "tan_fixed_point"]

_MAX_TWICE_ORDER = 1000     # nu <= 500
_MAX_X = 1.0e4              # public evaluation domain
_MAX_X_INTERNAL = 4.0e4     # zero refinement may evaluate somewhat further
_MAX_ZERO_INDEX = 100_000
_RESCALE = 1.0e250          # rescaling threshold inside backward recurrences
_SCAN_STEP = 1.5            # below the minimal spacing of consecutive zeros


def _recurrence_start(n_max: int, x: float) -> int:
    """Start order for backward recurrence.

    The seed must sit well past the turning point k = x, where the wanted
    solution decays like an Airy tail; 9 x^(1/3) extra orders push the
    contamination of the unwanted solution below 1e-14 of the amplitude,
    and 40 is the floor for small arguments.
    """
    margin = max(40, int(math.ceil(9.0 * x ** (1.0 / 3.0))))
    return max(n_max, int(math.ceil(x))) + margin


@dataclass(frozen=True)
class BesselOrder:
    """Order nu = twice_order / 2; only integers and half-integers exist."""

    twice_order: int

    def __post_init__(self):
        if self.twice_order < 0:
            raise DomainError(f"negative order {self.twice_order / 2}")
        if self.twice_order > _MAX_TWICE_ORDER:
            raise DomainError(f"order {self.twice_order / 2} exceeds 500")

    @property
    def nu(self) -> float:
        return self.twice_order / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice_order % 2 == 0


def _coerce_order(nu) -> BesselOrder:
    if isinstance(nu, BesselOrder):
        return nu
    twice = 2.0 * float(nu)
    if abs(twice - round(twice)) > 1e-12:
        raise DomainError(f"order {nu} is neither integer nor half-integer")
    return BesselOrder(int(round(twice)))


def _gamma_int_or_half(twice_a: int) -> float:
    """Gamma(a) for a = twice_a/2 > 0 by the recurrence from Gamma(1), Gamma(1/2)."""
    if twice_a % 2 == 0:
        g, a = 1.0, 1.0
    else:
        g, a = math.sqrt(math.pi), 0.5
    while 2.0 * a < twice_a:
        g *= a
        a += 1.0
    return g


def _tiny_argument_series(order: BesselOrder, x: float) -> float:
    """Leading power-series terms; only used for x <= 1e-3 where 4 terms
    leave a relative error far below 1e-12."""
    nu = order.nu
    q = 0.25 * x * x
    total, term = 1.0, 1.0
    for j in range(1, 4):
        term *= -q / (j * (nu + j))
        total += term
    log_lead = nu * math.log(0.5 * x) - math.lgamma(nu + 1.0)
    if log_lead < -745.0:
        return 0.0
    return math.exp(log_lead) * total


def _miller_integer_all(n_max: int, x: float) -> list:
    """J_0(x) .. J_{n_max}(x) by one backward Miller recurrence pass."""
    start = _recurrence_start(n_max, x)
    out = [0.0] * (n_max + 1)
    fplus = 0.0
    f = 1.0e-30
    norm = 0.0
    if start <= n_max:
        out[start] = f
    for k in range(start, 0, -1):
        fminus = (2.0 * k / x) * f - fplus
        fplus = f
        f = fminus
        idx = k - 1
        if idx <= n_max:
            out[idx] = f
        if idx >= 2 and idx % 2 == 0:
            norm += 2.0 * f
        if abs(f) > _RESCALE:
            inv = 1.0 / _RESCALE
            f *= inv
            fplus *= inv
            norm *= inv
            for j in range(max(idx, 0), n_max + 1):
                out[j] *= inv
    norm += f  # f is now J_0 up to the common factor
    return [v / norm for v in out]


def _spherical_all(l_max: int, x: float) -> list:
    """Spherical Bessel j_0(x) .. j_{l_max}(x) by backward recurrence."""
    start = _recurrence_start(l_max, x)
    out = [0.0] * (l_max + 1)
    fplus = 0.0
    f = 1.0e-30
    if start <= l_max:
        out[start] = f
    for k in range(start, 0, -1):
        fminus = ((2.0 * k + 1.0) / x) * f - fplus
        fplus = f
        f = fminus
        idx = k - 1
        if idx <= l_max:
            out[idx] = f
        if abs(f) > _RESCALE:
            inv = 1.0 / _RESCALE
            f *= inv
            fplus *= inv
            for j in range(max(idx, 0), l_max + 1):
                out[j] *= inv
    j0 = math.sin(x) / x
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    # f is the unnormalized j_0 and fplus the unnormalized j_1
    if abs(j0) >= abs(j1) or fplus == 0.0:
        scale = j0 / f
    else:
        scale = j1 / fplus
    return [v * scale for v in out]


def _eval_j(order: BesselOrder, x: float) -> float:
    if x <= 1e-3:
        return _tiny_argument_series(order, x)
    if order.is_integer:
        n = order.twice_order // 2
        return _miller_integer_all(n, x)[n]
    l = (order.twice_order - 1) // 2
    return math.sqrt(2.0 * x / math.pi) * _spherical_all(l, x)[l]


def _eval_j_pair(order: BesselOrder, x: float):
    """(J_nu(x), J_nu'(x)) sharing a single recurrence pass."""
    if order.is_integer:
        n = order.twice_order // 2
        vals = _miller_integer_all(n + 1, x)
        if n == 0:
            return vals[0], -vals[1]
        return vals[n], 0.5 * (vals[n - 1] - vals[n + 1])
    l = (order.twice_order - 1) // 2
    amp = math.sqrt(2.0 * x / math.pi)
    vals = _spherical_all(l + 1, x)
    below = math.cos(x) / x if l == 0 else vals[l - 1]
    return amp * vals[l], 0.5 * amp * (below - vals[l + 1])


def bessel_j(nu, x: float) -> float:
    """J_nu(x) for integer or half-integer nu <= 500 and 0 < x <= 1e4."""
    order = _coerce_order(nu)
    if not (0.0 < x <= _MAX_X):
        raise DomainError(f"argument {x} outside (0, {_MAX_X:g}]")
    return _eval_j(order, x)


def bessel_j_derivative(nu, x: float) -> float:
    """J_nu'(x) = (J_{nu-1}(x) - J_{nu+1}(x)) / 2."""
    order = _coerce_order(nu)
    if not (0.0 < x <= _MAX_X):
        raise DomainError(f"argument {x} outside (0, {_MAX_X:g}]")
    return _eval_j_pair(order, x)[1]


def _mcmahon_terms(order: BesselOrder, k: int):
    """Asymptotic expansion terms for the k-th zero; returns (beta, [t2..t5])."""
    nu = order.nu
    beta = (k + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    m1 = mu - 1.0
    b8 = 8.0 * beta
    t2 = m1 / b8
    t3 = 4.0 * m1 * (7.0 * mu - 31.0) / (3.0 * b8**3)
    t4 = 32.0 * m1 * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8**5)
    t5 = 64.0 * m1 * (6949.0 * mu**3 - 153855.0 * mu * mu
                      + 1585743.0 * mu - 6277237.0) / (105.0 * b8**7)
    return beta, (t2, t3, t4, t5)


def _mcmahon_is_reliable(terms) -> bool:
    t2, t3, t4, t5 = (abs(t) for t in terms)
    if t2 < 1e-13:
        return True  # nu = 1/2: the expansion is exact
    return t3 <= 0.05 * t2 and t4 <= 0.05 * t3 + 1e-13 and t5 <= 0.05 * t4 + 1e-13


def _refine_zero(order: BesselOrder, lo: float, hi: float) -> float:
    """Newton with a certified sign-change bracket; bisection on bad steps."""
    flo = _eval_j(order, lo)
    fhi = _eval_j(order, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketFailure(f"no sign change in [{lo}, {hi}] for order {order.nu}")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f, fp = _eval_j_pair(order, x)
        if f == 0.0:
            return x
        if math.copysign(1.0, f) == math.copysign(1.0, flo):
            lo = x
        else:
            hi = x
        step_ok = fp != 0.0
        if step_ok:
            nxt = x - f / fp
            step_ok = lo < nxt < hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 5e-15 * abs(x):
            return nxt
        x = nxt
    return x


# ascending zeros already computed, keyed by twice_order
_zero_cache: dict = {}


def _scan_next_zero(order: BesselOrder, after: float) -> float:
    """First zero beyond `after`, located by stepping below the minimal
    spacing of consecutive zeros (> 3 for every supported order)."""
    x = after
    f = _eval_j(order, x) if x > 0.0 else 1.0  # J_nu(0+) > 0
    if f == 0.0:
        x += 1e-9 * max(x, 1.0)
        f = _eval_j(order, x)
    for _ in range(200_000):
        x2 = x + _SCAN_STEP
        f2 = _eval_j(order, x2)
        if f2 == 0.0 or math.copysign(1.0, f2) != math.copysign(1.0, f):
            return _refine_zero(order, x, x2)
        x, f = x2, f2
    raise BracketFailure(f"scan for a zero of J_{order.nu} ran away from {after}")


def bessel_zero(nu, k: int) -> float:
    """k-th positive zero j_{nu,k}, accurate to about 1e-11 relative.

    The asymptotic expansion seeds a Newton iteration inside a sign-change
    bracket whenever its terms certify themselves by rapid decay; otherwise
    (large order, small index) zeros are located by an ascending scan that
    is cached per order.
    """
    order = _coerce_order(nu)
    if not (1 <= k <= _MAX_ZERO_INDEX):
        raise DomainError(f"zero index {k} outside 1..{_MAX_ZERO_INDEX}")
    beta, terms = _mcmahon_terms(order, k)
    guess = beta - sum(terms)
    if _mcmahon_is_reliable(terms):
        if guess > _MAX_X_INTERNAL:
            return guess  # residual expansion error is far below 1e-11 relative
        return _refine_zero(order, guess - 0.5, guess + 0.5)
    zeros = _zero_cache.setdefault(order.twice_order, [])
    while len(zeros) < k:
        after = zeros[-1] + 0.05 if zeros else max(order.nu, 0.4)
        zeros.append(_scan_next_zero(order, after))
    return zeros[k - 1]


def tan_fixed_point(m: int) -> float:
    """m-th positive root of tan t = t, inside (m pi, (2m+1) pi / 2).

    Newton runs on the pole-free form t cos t - sin t = 0 from the guess
    (2m+1) pi/2 - 1/((2m+1) pi/2), safeguarded by the enclosing bracket.
    """
    if not (1 <= m <= _MAX_ZERO_INDEX):
        raise DomainError(f"root index {m} outside 1..{_MAX_ZERO_INDEX}")
    lo = m * math.pi
    hi = (2 * m + 1) * math.pi / 2.0
    asym = hi
    x = asym - 1.0 / asym
    flo = lo * math.cos(lo) - math.sin(lo)
    for _ in range(100):
        f = x * math.cos(x) - math.sin(x)
        if f == 0.0:
            return x
        if math.copysign(1.0, f) == math.copysign(1.0, flo):
            lo = x
        else:
            hi = x
        fp = -x * math.sin(x)
        step_ok = fp != 0.0
        if step_ok:
            nxt = x - f / fp
            step_ok = lo < nxt < hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= 5e-15 * abs(x):
            return nxt
        x = nxt
    return x
