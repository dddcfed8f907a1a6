"""Closed-form spectra for the interval and the n-ball.

Interval (length L): the Dirichlet eigenvalues are (j pi / L)^2.  The soft
realization has a two-dimensional kernel (constants and linear functions)
and two interleaved branches of simple nonzero eigenvalues, an even-symmetry
branch at (2 m pi / L)^2 and an odd-symmetry branch at (2 t_m / L)^2 where
t_m solves tan t = t.

Ball of radius R in dimension n: each angular momentum l contributes the
radial eigenvalues (j_{nu,k} / R)^2 with nu = l + (n-2)/2 for the Dirichlet
realization and nu = l + n/2 for the soft one, every one carrying the
spherical-harmonic multiplicity d_{n,l}; the soft realization additionally
has an infinite-dimensional kernel.

The paper-style index bookkeeping for the interval merges the zero mode into
the even branch (index k = 0); here the nonzero spectrum excludes k = 0 and
the kernel dimension 2 is reported separately, resolving that overlap
explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

from .errors import DomainError
from .special import tan_fixed_point, bessel_zero, bessel_j
from .tolerances import DEFAULT, ToleranceProfile

INFINITE = math.inf

__all__ = [
    "IntervalSpec",
    "BallSpec",
    "Spectrum",
    "ChannelInterlaceReport",
    "INFINITE",
    "interval_dirichlet",
    "interval_krein",
    "interval_krein_bc_residual",
    "ball_multiplicity",
    "ball_spectrum",
    "channel_interlace_report",
]


@dataclass(frozen=True)
class IntervalSpec:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"empty interval ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class BallSpec:
    n: int
    radius: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"ball dimension {self.n} < 2")
        if not self.radius > 0.0:
            raise ValueError(f"radius {self.radius} <= 0")


@dataclass(frozen=True)
class Spectrum:
    """Ascending (value, multiplicity) pairs plus the kernel dimension.

    Zero modes never appear among the entries; they are counted by
    kernel_dim (math.inf for an infinite-dimensional kernel).  When
    complete_below is set, no eigenvalue below it is missing.
    """

    entries: tuple
    kernel_dim: float
    complete_below: float | None = None

    def __post_init__(self):
        values = [v for v, _ in self.entries]
        if any(v <= 0.0 for v in values):
            raise ValueError("nonpositive value among spectrum entries")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("spectrum entries not strictly increasing")
        if any(m < 1 for _, m in self.entries):
            raise ValueError("nonpositive multiplicity")

    def values(self):
        return [v for v, _ in self.entries]

    def flattened(self, count: int | None = None):
        """Eigenvalues repeated by multiplicity, ascending."""
        out = []
        for v, m in self.entries:
            out.extend([v] * m)
            if count is not None and len(out) >= count:
                return out[:count]
        return out

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)


def interval_dirichlet(spec: IntervalSpec, count: int) -> Spectrum:
    """First `count` hard-boundary eigenvalues (j pi / L)^2, all simple."""
    if count < 1:
        raise ValueError("count must be >= 1")
    length = spec.length
    entries = tuple(((j * math.pi / length) ** 2, 1) for j in range(1, count + 1))
    return Spectrum(entries=entries, kernel_dim=0, complete_below=entries[-1][0])


def interval_krein(spec: IntervalSpec, count: int) -> Spectrum:
    """First `count` nonzero soft-boundary eigenvalues, kernel dimension 2.

    The even branch (2 m pi / L)^2 and odd branch (2 t_m / L)^2 alternate
    strictly: m pi < t_m < (m + 1/2) pi puts exactly one odd value between
    consecutive even ones.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    length = spec.length
    vals = []
    m = 1
    while len(vals) < count:
        vals.append((2.0 * m * math.pi / length) ** 2)
        vals.append((2.0 * tan_fixed_point(m) / length) ** 2)
        m += 1
    vals = vals[:count]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise AssertionError("even/odd eigenvalue branches failed to alternate")
    return Spectrum(
        entries=tuple((v, 1) for v in vals),
        kernel_dim=2,
        complete_below=vals[-1],
    )


def interval_krein_bc_residual(spec: IntervalSpec, branch: str, m: int) -> float:
    """Boundary-condition defect of the m-th eigenfunction of one branch.

    The soft boundary condition prescribes v'(a) = v'(b) = (v(b)-v(a))/L;
    the residual is the worst violation by the closed-form eigenfunction at
    the computed frequency.  Expected at rounding level, about 1e-10 * k.
    """
    if m < 1:
        raise ValueError("branch index must be >= 1")
    length = spec.length
    center = 0.5 * (spec.a + spec.b)
    if branch == "cos":
        k = 2.0 * m * math.pi / length
        value = lambda x: math.cos(k * (x - center))
        deriv = lambda x: -k * math.sin(k * (x - center))
    elif branch == "sin":
        k = 2.0 * tan_fixed_point(m) / length
        value = lambda x: math.sin(k * (x - center))
        deriv = lambda x: k * math.cos(k * (x - center))
    else:
        raise ValueError(f"branch must be cos or sin, got {branch!r}")
    slope = (value(spec.b) - value(spec.a)) / length
    return max(abs(deriv(spec.a) - slope), abs(deriv(spec.b) - slope))


def ball_multiplicity(n: int, ell: int) -> int:
    """Dimension d_{n,l} of degree-l spherical harmonics in R^n.

    Exact integer arithmetic via binomials; equivalent to the ratio of
    Gamma factors but free of floating-point Gamma evaluations.
    """
    if n < 2:
        raise DomainError(f"ambient dimension {n} < 2")
    if ell < 0:
        raise DomainError(f"negative degree {ell}")
    result = comb(n + ell - 1, ell)
    if ell >= 2:
        result -= comb(n + ell - 3, ell - 2)
    if result > 2**63 - 1:
        raise OverflowError(f"multiplicity d_{{{n},{ell}}} exceeds 2^63 - 1")
    return result


def _merge_coincident(pairs, merge_rel: float):
    """Sort (value, multiplicity) pairs and merge near-coincident values.

    Values from distinct channels are kept separate unless within merge_rel
    relative distance, in which case multiplicities add; whether distinct
    integer-order zeros can coincide exactly is treated as an open question
    and settled numerically only.
    """
    pairs = sorted(pairs)
    merged = []
    for value, mult in pairs:
        if merged and value - merged[-1][0] <= merge_rel * value:
            merged[-1][1] += mult
        else:
            merged.append([value, mult])
    return tuple((v, m) for v, m in merged)


def ball_spectrum(spec: BallSpec, which: str, lambda_max: float,
                  profile: ToleranceProfile = DEFAULT) -> Spectrum:
    """Every eigenvalue <= lambda_max with its multiplicity.

    Channel scan: degree l contributes zeros of the order nu = l + (n-2)/2
    (hard boundary) or nu = l + n/2 (soft); the scan stops once nu exceeds
    sqrt(lambda_max) * R because the first zero of order nu exceeds nu.
    """
    if lambda_max <= 0.0:
        raise ValueError("lambda_max must be positive")
    if which not in ("dirichlet", "krein"):
        raise ValueError(f"which must be dirichlet or krein, got {which!r}")
    n, radius = spec.n, spec.radius
    offset = n - 2 if which == "dirichlet" else n  # twice the order shift
    limit = math.sqrt(lambda_max) * radius
    cap = lambda_max * radius * radius
    pairs = []
    ell = 0
    while True:
        twice_nu = 2 * ell + offset
        if twice_nu / 2.0 >= limit:
            break
        mult = ball_multiplicity(n, ell)
        k = 1
        while True:
            z = bessel_zero(twice_nu / 2.0, k)
            if z * z > cap:
                break
            pairs.append(((z / radius) ** 2, mult))
            k += 1
        ell += 1
    kernel = 0 if which == "dirichlet" else INFINITE
    return Spectrum(
        entries=_merge_coincident(pairs, profile.merge_rel),
        kernel_dim=kernel,
        complete_below=lambda_max,
    )


@dataclass(frozen=True)
class ChannelInterlaceReport:
    """Strict interlacing of one channel's hard and soft eigenvalues."""

    strict: bool
    min_gap: float
    witnesses: tuple


def channel_interlace_report(spec: BallSpec, ell: int, k_max: int) -> ChannelInterlaceReport:
    """Check j_{nu,k} < j_{nu+1,k} < j_{nu,k+1} for nu = l + (n-2)/2.

    Order nu + 1 is exactly the soft-boundary order of the same channel, so
    strictness here is the channelwise hard/soft eigenvalue interlacing.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    nu = ell + (spec.n - 2) / 2.0
    strict = True
    min_gap = math.inf
    witnesses = []
    for k in range(1, k_max + 1):
        low = bessel_zero(nu, k)
        mid = bessel_zero(nu + 1.0, k)
        high = bessel_zero(nu, k + 1)
        gap = min(mid - low, high - mid)
        min_gap = min(min_gap, gap)
        if not (low < mid < high):
            strict = False
            witnesses.append(k)
    return ChannelInterlaceReport(strict=strict, min_gap=min_gap, witnesses=tuple(witnesses))
