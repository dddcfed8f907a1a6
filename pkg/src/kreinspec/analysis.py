"""Counting functions, Weyl coefficients and fits, and inequality verifiers.

Counting convention: N(lambda) counts eigenvalues <= lambda with
multiplicity, so N is right-continuous and jumps at each eigenvalue.

The two-term ball asymptotics compared against here:

    N(lambda) ~ (2 pi)^-n v_n^2 R^n lambda^(n/2)
                - (2 pi)^-(n-1) v_{n-1} C R^(n-1) lambda^((n-1)/2)

with C = (n/4) v_n for the hard boundary and C = (n/4) v_n + v_{n-1} for
the soft one; the difference of the second coefficients is exactly
(2 pi)^-(n-1) v_{n-1}^2 R^(n-1).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InsufficientData, InsufficientEigenvalues
from .special import _gamma_int_or_half, bessel_zero
from .spectra import BallSpec, IntervalSpec, Spectrum, ball_spectrum, interval_dirichlet, interval_krein

__all__ = [
    "CountingFunction",
    "WeylFit",
    "InequalityReport",
    "counting_from_spectrum",
    "counting_domination",
    "unit_ball_volume",
    "weyl_leading",
    "kozlov_coefficient",
    "two_term_ball_coefficients",
    "weyl_fit",
    "sandwich_check",
    "universal_inequalities",
    "interval_counting",
    "ball_counting",
]


@dataclass(frozen=True)
class CountingFunction:
    """Nondecreasing step function stored as breakpoints with prefix sums."""

    breakpoints: tuple        # ascending eigenvalues
    cumulative: tuple         # counts including the breakpoint value
    source: str = ""
    complete_below: float | None = None

    def __call__(self, lam: float) -> int:
        idx = bisect.bisect_right(self.breakpoints, lam)
        return self.cumulative[idx - 1] if idx else 0


def counting_from_spectrum(spectrum: Spectrum, source: str = "") -> CountingFunction:
    values = spectrum.values()
    counts = []
    total = 0
    for _, mult in spectrum.entries:
        total += mult
        counts.append(total)
    return CountingFunction(
        breakpoints=tuple(values),
        cumulative=tuple(counts),
        source=source,
        complete_below=spectrum.complete_below,
    )


@dataclass(frozen=True)
class InequalityReport:
    name: str
    satisfied: bool
    margin: float             # smallest slack seen, in the stated units
    witnesses: tuple = ()
    inconclusive: bool = False

    def __post_init__(self):
        if self.satisfied and self.margin < 0.0 and not self.inconclusive:
            raise ValueError("satisfied report with negative margin")


def _probe_points(*countings, grid=()):
    probes = set(float(g) for g in grid)
    for counting in countings:
        for bp in counting.breakpoints:
            probes.add(bp - 1e-9)
            probes.add(bp)
            probes.add(bp + 1e-9)
    return sorted(probes)


def counting_domination(n_soft: CountingFunction, n_hard: CountingFunction,
                        lam_grid=()) -> InequalityReport:
    """Check N_soft(lambda) <= N_hard(lambda) everywhere both are complete."""
    cap = min(
        x for x in (n_soft.complete_below, n_hard.complete_below, math.inf)
        if x is not None
    )
    margin = math.inf
    witnesses = []
    for lam in _probe_points(n_soft, n_hard, grid=lam_grid):
        if lam > cap or lam <= 0.0:
            continue
        slack = n_hard(lam) - n_soft(lam)
        if slack < margin:
            margin = slack
        if slack < 0:
            witnesses.append(lam)
    return InequalityReport(
        name="counting-domination",
        satisfied=not witnesses,
        margin=float(margin),
        witnesses=tuple(witnesses[:16]),
    )


def unit_ball_volume(n: int) -> float:
    """v_n = pi^(n/2) / Gamma(n/2 + 1), via the half-integer recurrence."""
    if n < 1:
        raise DomainError(f"dimension {n} < 1")
    return math.pi ** (n / 2.0) / _gamma_int_or_half(n + 2)


def weyl_leading(n: int, volume: float) -> float:
    """Leading counting coefficient (2 pi)^-n v_n |Omega|."""
    if volume <= 0.0:
        raise ValueError(f"volume {volume} <= 0")
    return (2.0 * math.pi) ** (-n) * unit_ball_volume(n) * volume


def _sphere_quadrature(n: int, integrand, panels: int = 8, order: int = 12) -> float:
    """Integral over the unit sphere S^(n-1) by a composite product rule."""
    nodes, weights = np.polynomial.legendre.leggauss(order)

    def panel_rule(lo, hi):
        out = []
        width = (hi - lo) / panels
        for p in range(panels):
            a = lo + p * width
            mid = a + 0.5 * width
            for t, w in zip(nodes, weights):
                out.append((mid + 0.5 * width * t, 0.5 * width * w))
        return out

    theta_rule = panel_rule(0.0, 2.0 * math.pi)
    if n == 2:
        return sum(w * integrand((math.cos(t), math.sin(t))) for t, w in theta_rule)
    phi_rule = panel_rule(0.0, math.pi)
    if n == 3:
        total = 0.0
        for p, wp in phi_rule:
            sp = math.sin(p)
            for t, wt in theta_rule:
                xi = (sp * math.cos(t), sp * math.sin(t), math.cos(p))
                total += wp * wt * sp * integrand(xi)
        return total
    if n == 4:
        total = 0.0
        for p1, w1 in phi_rule:
            s1 = math.sin(p1)
            for p2, w2 in phi_rule:
                s2 = math.sin(p2)
                for t, wt in theta_rule:
                    xi = (
                        s1 * s2 * math.cos(t),
                        s1 * s2 * math.sin(t),
                        s1 * math.cos(p2),
                        math.cos(p1),
                    )
                    total += w1 * w2 * wt * s1 * s1 * s2 * integrand(xi)
        return total
    raise DomainError(f"sphere quadrature supports n <= 4, got {n}")


def kozlov_coefficient(n: int, m: int, r: int, volume: float) -> float:
    """Leading coefficient of the counting asymptotics for the form pencil
    with isotropic symbols |xi|^(2m) over |xi|^(2r).

    On the unit sphere the symbol ratio is identically one, so the closed
    form collapses to the same (2 pi)^-n v_n |Omega| as the second-order
    counting coefficient; the sphere integral is still evaluated by
    quadrature as a self-check, to 1e-8.
    """
    if not (m > r >= 0):
        raise ValueError(f"need m > r >= 0, got m={m}, r={r}")
    if volume <= 0.0:
        raise ValueError(f"volume {volume} <= 0")
    eta = 2 * (m - r)
    power = n / eta

    def integrand(xi):
        norm_sq = sum(c * c for c in xi)
        return (norm_sq**r / norm_sq**m) ** power

    closed = volume * n * unit_ball_volume(n) / (n * (2.0 * math.pi) ** n)
    quad = volume * _sphere_quadrature(n, integrand) / (n * (2.0 * math.pi) ** n)
    if abs(quad - closed) > 1e-8 * max(abs(closed), 1.0):
        raise AssertionError(
            f"sphere quadrature self-check failed: {quad!r} vs {closed!r}"
        )
    return closed


def two_term_ball_coefficients(n: int, radius: float, which: str):
    """(leading, second) counting coefficients for the ball of radius R."""
    if n < 2:
        raise DomainError(f"dimension {n} < 2")
    if which not in ("dirichlet", "krein"):
        raise ValueError(f"which must be dirichlet or krein, got {which!r}")
    v_n = unit_ball_volume(n)
    v_m = unit_ball_volume(n - 1)
    lead = (2.0 * math.pi) ** (-n) * v_n * v_n * radius**n
    curvature = (n / 4.0) * v_n
    if which == "krein":
        curvature += v_m
    second = -((2.0 * math.pi) ** (-(n - 1))) * v_m * curvature * radius ** (n - 1)
    return lead, second


@dataclass(frozen=True)
class WeylFit:
    n: int
    c_lead: float
    c_second: float
    analytic_lead: float
    analytic_second: float
    window: tuple
    residual_sup: float
    remainder_slope: float
    samples: int


def weyl_fit(counting: CountingFunction, n: int, window,
             analytic=None, sample_count: int = 240) -> WeylFit:
    """Two-term least squares of N(lambda) on lambda^(n/2), lambda^((n-1)/2).

    Samples are log-uniform across the window.  The remainder order is
    estimated on the upper half of the window (in log scale) against the
    analytic two-term law, after compressing the oscillatory remainder to
    bin maxima (six bins per log-decade span).
    """
    lo, hi = float(window[0]), float(window[1])
    if not (0.0 < lo < hi):
        raise InsufficientData(f"empty window ({lo}, {hi})")
    if counting.complete_below is not None and hi > counting.complete_below * (1 + 1e-12):
        raise InsufficientData(
            f"window top {hi} beyond complete range {counting.complete_below}"
        )
    if sample_count < 50:
        raise InsufficientData("need at least 50 sample points")
    lams = np.exp(np.linspace(math.log(lo), math.log(hi), sample_count))
    counts = np.array([counting(lam) for lam in lams], dtype=float)
    x1 = lams ** (n / 2.0)
    x2 = lams ** ((n - 1) / 2.0)
    # 2x2 normal equations, solved in closed form
    a11, a12, a22 = float(x1 @ x1), float(x1 @ x2), float(x2 @ x2)
    b1, b2 = float(x1 @ counts), float(x2 @ counts)
    det = a11 * a22 - a12 * a12
    c_lead = (a22 * b1 - a12 * b2) / det
    c_second = (a11 * b2 - a12 * b1) / det
    residual_sup = float(np.max(np.abs(counts - c_lead * x1 - c_second * x2)))

    if analytic is None:
        analytic = (c_lead, c_second)
    a_lead, a_second = analytic
    half_lo = math.sqrt(lo * hi)
    mask = lams >= half_lo
    rem = np.abs(counts[mask] - a_lead * x1[mask] - a_second * x2[mask])
    logs = np.log10(lams[mask])
    span = logs[-1] - logs[0]
    bins = max(int(round(6 * span)), 3)
    edges = np.linspace(logs[0], logs[-1] + 1e-12, bins + 1)
    centers, maxima = [], []
    for i in range(bins):
        sel = (logs >= edges[i]) & (logs < edges[i + 1])
        if np.any(sel) and np.max(rem[sel]) > 0.0:
            centers.append(0.5 * (edges[i] + edges[i + 1]))
            maxima.append(np.max(rem[sel]))
    if len(centers) >= 2:
        slope = np.polyfit(centers, np.log10(maxima), 1)[0]
    else:
        slope = math.nan
    return WeylFit(
        n=n,
        c_lead=float(c_lead),
        c_second=float(c_second),
        analytic_lead=float(a_lead),
        analytic_second=float(a_second),
        window=(lo, hi),
        residual_sup=residual_sup,
        remainder_slope=float(slope),
        samples=sample_count,
    )


def interval_counting(spec: IntervalSpec, which: str, lam_max: float) -> CountingFunction:
    """Counting function of the interval spectra, complete below lam_max."""
    length = spec.length
    if which == "dirichlet":
        count = max(int(math.ceil(length * math.sqrt(lam_max) / math.pi)) + 2, 1)
        spectrum = interval_dirichlet(spec, count)
    elif which == "krein":
        count = max(int(math.ceil(length * math.sqrt(lam_max) / math.pi)) + 4, 2)
        spectrum = interval_krein(spec, count)
    else:
        raise ValueError(f"which must be dirichlet or krein, got {which!r}")
    entries = tuple((v, m) for v, m in spectrum.entries if v <= lam_max)
    trimmed = Spectrum(entries=entries, kernel_dim=spectrum.kernel_dim,
                       complete_below=lam_max)
    return counting_from_spectrum(trimmed, source=f"interval-{which}")


def ball_counting(spec: BallSpec, which: str, lam_max: float) -> CountingFunction:
    return counting_from_spectrum(
        ball_spectrum(spec, which, lam_max), source=f"ball{spec.n}-{which}"
    )


def sandwich_check(n: int, radius: float, lam_max: float) -> InequalityReport:
    """Two-sided counting bounds tying dimensions n and n-1:

        N_K,n + N_K,n-1 <= N_D,n <= N_K,n + N_D,n-1

    checked at every breakpoint below lam_max; for n = 2 the lower-
    dimensional body is the interval (-R, R).
    """
    if n < 2:
        raise DomainError(f"dimension {n} < 2")
    hard_n = ball_counting(BallSpec(n, radius), "dirichlet", lam_max)
    soft_n = ball_counting(BallSpec(n, radius), "krein", lam_max)
    if n == 2:
        segment = IntervalSpec(-radius, radius)
        hard_m = interval_counting(segment, "dirichlet", lam_max)
        soft_m = interval_counting(segment, "krein", lam_max)
    else:
        hard_m = ball_counting(BallSpec(n - 1, radius), "dirichlet", lam_max)
        soft_m = ball_counting(BallSpec(n - 1, radius), "krein", lam_max)
    margin = math.inf
    witnesses = []
    for lam in _probe_points(hard_n, soft_n, hard_m, soft_m):
        if lam > lam_max or lam <= 0.0:
            continue
        upper = soft_n(lam) + hard_m(lam) - hard_n(lam)
        lower = hard_n(lam) - soft_n(lam) - soft_m(lam)
        slack = min(upper, lower)
        if slack < margin:
            margin = slack
        if slack < 0:
            witnesses.append(lam)
    return InequalityReport(
        name=f"sandwich-n{n}",
        satisfied=not witnesses,
        margin=float(margin),
        witnesses=tuple(witnesses[:16]),
    )


def universal_inequalities(soft: Spectrum, hard: Spectrum, n: int,
                           volume: float, k_max: int):
    """Reports for the low-eigenvalue bounds on the soft spectrum.

    Checked, in order: the second/first ratio bound, the first-n sum bound
    (strict; ties within 1e-12 relative are flagged inconclusive), the gap
    quadratic bound for k <= k_max, the two halves of the isoperimetric
    two-sided bound, the [1, 4] bracket for the soft/hard bottom ratio, and
    per-index domination up to k_max.

    Margins are normalized by the scale of the quantity they bound, so a
    margin of zero always means a sharp case.
    """
    if n < 2:
        raise DomainError(f"dimension {n} < 2")
    need = max(k_max + 1, n + 1, 2)
    lam = soft.flattened(need)
    mu = hard.flattened(max(k_max, 2))
    if len(lam) < need or len(mu) < 2:
        raise InsufficientEigenvalues(
            f"need {need} soft and 2 hard eigenvalues, have {len(lam)}, {len(mu)}"
        )
    reports = []

    ratio_bound = (n * n + 8.0 * n + 20.0) / (n + 2.0) ** 2
    ratio = lam[1] / lam[0]
    reports.append(InequalityReport(
        name="second-to-first-ratio",
        satisfied=ratio <= ratio_bound,
        margin=ratio_bound - ratio,
    ))

    lhs = sum(lam[1:n + 1])
    rhs = (n + 4.0) * lam[0] - (4.0 / (n + 4.0)) * (lam[1] - lam[0])
    slack = (rhs - lhs) / lam[0]
    tie = abs(rhs - lhs) <= 1e-12 * lam[0]
    reports.append(InequalityReport(
        name="first-sum-bound",
        satisfied=rhs - lhs > 0.0 or tie,
        margin=slack,
        inconclusive=tie,
    ))

    gap_margin = math.inf
    gap_witnesses = []
    for k in range(1, k_max + 1):
        top = lam[k]
        gaps = [top - lam[j] for j in range(k)]
        lhs_k = sum(g * g for g in gaps)
        rhs_k = (4.0 * (n + 2.0) / (n * n)) * sum(
            g * lam[j] for j, g in enumerate(gaps)
        )
        slack_k = (rhs_k - lhs_k) / (lam[0] * lam[0])
        gap_margin = min(gap_margin, slack_k)
        if lhs_k > rhs_k:
            gap_witnesses.append(k)
    reports.append(InequalityReport(
        name="gap-quadratic-bound",
        satisfied=not gap_witnesses,
        margin=float(gap_margin),
        witnesses=tuple(gap_witnesses),
    ))

    v_n = unit_ball_volume(n)
    j_first = bessel_zero((n - 2) / 2.0, 1)
    iso = 2.0 ** (2.0 / n) * j_first * j_first * v_n ** (2.0 / n) / volume ** (2.0 / n)
    reports.append(InequalityReport(
        name="isoperimetric-lower",
        satisfied=iso < mu[1],
        margin=(mu[1] - iso) / mu[1],
    ))
    upper_margin = (lam[0] - mu[1]) / lam[0]
    reports.append(InequalityReport(
        name="hard-second-below-soft-first",
        satisfied=mu[1] <= lam[0] or abs(upper_margin) <= 1e-12,
        margin=upper_margin,
        inconclusive=abs(upper_margin) <= 1e-12,
    ))

    bottom_ratio = lam[0] / mu[0]
    reports.append(InequalityReport(
        name="bottom-ratio-bracket",
        satisfied=1.0 - 1e-12 <= bottom_ratio <= 4.0 + 1e-12,
        margin=min(bottom_ratio - 1.0, 4.0 - bottom_ratio),
    ))

    dom_margin = math.inf
    dom_witnesses = []
    upto = min(k_max, len(lam), len(mu))
    for j in range(upto):
        slack_j = (lam[j] - mu[j]) / mu[j]
        dom_margin = min(dom_margin, slack_j)
        if lam[j] < mu[j] * (1.0 - 1e-12):
            dom_witnesses.append(j + 1)
    reports.append(InequalityReport(
        name="per-index-domination",
        satisfied=not dom_witnesses,
        margin=float(dom_margin),
        witnesses=tuple(dom_witnesses),
    ))
    return reports
