"""Finite-difference realizations feeding the matrix model and the exact
spectra.

Two builds live here.  The interval build encodes the minimal operator
-d^2/dx^2 + V with clamped data as an extension model: the matrix is the
usual second-difference operator on all interior nodes, and the restricted
domain omits the first and last interior node, which pins the boundary
derivatives at first order and reproduces the codimension-2 deficiency of
the continuum problem.  The radial build discretizes the reduced channel
operators -d^2/dr^2 + c/r^2 on (0, R) with either a hard endpoint row or
the soft derivative condition f'(R) = (l + (n-1)/2) f(R) / R.

The soft endpoint row is produced by eliminating a centered ghost node and
restoring symmetry with a half-weight mass entry, which keeps the pencil
symmetric-definite (real spectrum) at the cost of a nonidentity mass matrix.

The channel (n=2, l=0) is excluded: its coefficient c = -1/4 is the
attractive-critical case with logarithmic behavior at the origin, where this
plain difference scheme does not converge reliably; the closed-form spectra
cover that channel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonMonotoneError, UnsupportedChannel
from .extensions import ExtensionModel, new_model, pencil_values
from .linalg import SymMatrix, sturm_count
from .spectra import Spectrum
from .tolerances import DEFAULT, ToleranceProfile

__all__ = [
    "Grid1D",
    "PotentialSpec",
    "RadialChannelSpec",
    "RadialPencil",
    "ConvergenceReport",
    "interval_model",
    "discrete_krein_spectrum",
    "radial_pencil",
    "radial_eigenvalues",
    "convergence_order",
]


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    m: int  # interior point count

    def __post_init__(self):
        if self.m < 8:
            raise ValueError(f"need at least 8 interior points, got {self.m}")
        if not self.b > self.a:
            raise ValueError(f"empty interval ({self.a}, {self.b})")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.m + 1)

    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.m + 1)


@dataclass(frozen=True)
class PotentialSpec:
    """Bounded nonnegative potential: zero, constant, or node samples."""

    kind: str                      # "zero" | "constant" | "sampled"
    constant: float = 0.0
    samples: tuple = ()

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls(kind="zero")

    @classmethod
    def of_constant(cls, c: float) -> "PotentialSpec":
        if not (c >= 0.0 and math.isfinite(c)):
            raise ValueError(f"constant potential must be finite and >= 0, got {c}")
        return cls(kind="constant", constant=float(c))

    @classmethod
    def sampled(cls, values) -> "PotentialSpec":
        vals = tuple(float(v) for v in values)
        bad = [v for v in vals if not (v >= 0.0 and math.isfinite(v))]
        if bad:
            raise ValueError(f"sampled potential has invalid entries, e.g. {bad[0]}")
        return cls(kind="sampled", samples=vals)

    @classmethod
    def from_csv(cls, path, m: int) -> "PotentialSpec":
        """One value per line; the count must equal the interior node count."""
        vals = []
        with open(path) as handle:
            for lineno, line in enumerate(handle, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                try:
                    v = float(text)
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: not a number: {text!r}")
                if not (v >= 0.0 and math.isfinite(v)):
                    raise ValueError(f"{path}: line {lineno}: potential value {v} < 0")
                vals.append(v)
        if len(vals) != m:
            raise ValueError(f"{path}: expected {m} values, found {len(vals)}")
        return cls.sampled(vals)

    def values_at(self, grid: Grid1D) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros(grid.m)
        if self.kind == "constant":
            return np.full(grid.m, self.constant)
        if len(self.samples) != grid.m:
            raise ValueError(
                f"sampled potential has {len(self.samples)} values for {grid.m} nodes"
            )
        return np.array(self.samples)


def interval_model(grid: Grid1D, potential: PotentialSpec,
                   profile: ToleranceProfile = DEFAULT) -> ExtensionModel:
    """Second-difference operator as an extension model with codimension 2."""
    m = grid.m
    h2 = grid.h * grid.h
    a = np.zeros((m, m))
    idx = np.arange(m)
    a[idx, idx] = 2.0 / h2 + potential.values_at(grid)
    a[idx[:-1], idx[:-1] + 1] = -1.0 / h2
    a[idx[:-1] + 1, idx[:-1]] = -1.0 / h2
    basis = np.eye(m)[:, 1:m - 1]
    return new_model(SymMatrix(a), basis, profile)


def _group_spectrum(values, kernel_dim, merge_rel: float) -> Spectrum:
    entries = []
    for v in values:
        v = float(v)
        if entries and v - entries[-1][0] <= merge_rel * max(abs(v), 1e-300):
            entries[-1][1] += 1
        else:
            entries.append([v, 1])
    return Spectrum(
        entries=tuple((v, m) for v, m in entries),
        kernel_dim=kernel_dim,
        complete_below=float(values[-1]) if len(values) else None,
    )


def discrete_krein_spectrum(model: ExtensionModel, count: int,
                            profile: ToleranceProfile = DEFAULT) -> Spectrum:
    """First `count` nonzero eigenvalues of the model's soft extension.

    These are the compressed-pencil eigenvalues, which agree with the
    nonzero Krein eigenvalues exactly at matrix level; the kernel dimension
    equals the codimension of the restricted domain.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    vals = pencil_values(model, profile)[:count]
    return _group_spectrum(vals, model.codimension, profile.merge_rel)


@dataclass(frozen=True)
class RadialChannelSpec:
    n: int
    ell: int
    radius: float
    m: int
    bc: str  # "dirichlet" | "krein"

    def __post_init__(self):
        if self.n < 2 or self.ell < 0:
            raise ValueError(f"invalid channel n={self.n}, l={self.ell}")
        if self.n == 2 and self.ell == 0:
            raise UnsupportedChannel(
                "channel n=2, l=0 has critical coefficient -1/4; use exact spectra"
            )
        if not self.radius > 0.0:
            raise ValueError(f"radius {self.radius} <= 0")
        if self.m < 8:
            raise ValueError(f"need at least 8 grid points, got {self.m}")
        if self.bc not in ("dirichlet", "krein"):
            raise ValueError(f"bc must be dirichlet or krein, got {self.bc!r}")

    @property
    def coefficient(self) -> float:
        """c_{n,l} = l (l + n - 2) + (n-1)(n-3)/4 in the c / r^2 term."""
        return self.ell * (self.ell + self.n - 2) + (self.n - 1) * (self.n - 3) / 4.0


@dataclass(frozen=True)
class RadialPencil:
    """Symmetric tridiagonal stiffness with a diagonal mass matrix."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray
    mass: np.ndarray

    def k_matrix(self) -> SymMatrix:
        a = np.diag(self.diagonal)
        idx = np.arange(self.diagonal.size - 1)
        a[idx, idx + 1] = self.offdiagonal
        a[idx + 1, idx] = self.offdiagonal
        return SymMatrix(a)

    def m_matrix(self) -> SymMatrix:
        return SymMatrix(np.diag(self.mass))

    def reduced_tridiagonal(self):
        """Congruence by the inverse mass square root, staying tridiagonal."""
        root = np.sqrt(self.mass)
        d = self.diagonal / self.mass
        e = self.offdiagonal / (root[:-1] * root[1:])
        return d, e


def radial_pencil(spec: RadialChannelSpec) -> RadialPencil:
    """Assemble the channel operator on (0, R].

    Hard endpoint: grid r_i = i h with h = R/(m+1), no node at R.  Soft
    endpoint: h = R/m with a node at r_m = R whose ghost neighbor is
    eliminated through the centered derivative condition, symmetrized by a
    half mass weight.  The origin row is truncated (no node at r = 0).
    """
    m = spec.m
    c = spec.coefficient
    if spec.bc == "dirichlet":
        h = spec.radius / (m + 1)
    else:
        h = spec.radius / m
    r = h * np.arange(1, m + 1)
    h2 = h * h
    diag = 2.0 / h2 + c / (r * r)
    off = np.full(m - 1, -1.0 / h2)
    mass = np.ones(m)
    if spec.bc == "krein":
        alpha = (spec.ell + (spec.n - 1) / 2.0) / spec.radius
        diag[-1] = (1.0 - h * alpha) / h2 + 0.5 * c / (spec.radius * spec.radius)
        mass[-1] = 0.5
    return RadialPencil(diagonal=diag, offdiagonal=off, mass=mass)


def radial_eigenvalues(spec: RadialChannelSpec, count: int,
                       include_zero_mode: bool = False) -> np.ndarray:
    """Lowest nonzero pencil eigenvalues by Sturm bisection.

    The soft endpoint condition carries the channel's one-dimensional kernel
    (the discrete image of r^(l + (n-1)/2)), so its pencil has exactly one
    near-zero eigenvalue, which is dropped unless include_zero_mode is set;
    a kernel candidate that is not tiny against the first nonzero eigenvalue
    indicates a broken assembly and raises.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    pencil = radial_pencil(spec)
    d, e = pencil.reduced_tridiagonal()
    abs_e = np.concatenate(([0.0], np.abs(e), [0.0]))
    radius = abs_e[:-1] + abs_e[1:]
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    skip = 1 if (spec.bc == "krein" and not include_zero_mode) else 0
    out = []
    for j in range(1, count + skip + 1):
        a, b = lo, hi
        for _ in range(120):
            mid = 0.5 * (a + b)
            if sturm_count(d, e, mid) >= j:
                b = mid
            else:
                a = mid
            if b - a <= 1e-13 * max(abs(a), abs(b), 1.0):
                break
        out.append(0.5 * (a + b))
    if skip and not abs(out[0]) <= 1e-4 * abs(out[1]):
        raise AssertionError(
            f"expected a zero mode, got lowest eigenvalues {out[0]:.3e}, {out[1]:.3e}"
        )
    return np.array(out[skip:])


@dataclass(frozen=True)
class ConvergenceReport:
    order: float             # least-squares slope of log error vs log h
    richardson: float        # extrapolated value from the two finest grids
    errors: tuple
    sizes: tuple


def convergence_order(run, sizes, target: float, spacing=None) -> ConvergenceReport:
    """Empirical order of a grid refinement study against a known target.

    `run` maps a size to the computed value; sizes must refine by factors of
    two.  Errors that fail to decrease raise NonMonotoneError carrying the
    measured data.
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes")
    for a, b in zip(sizes, sizes[1:]):
        if b != 2 * a:
            raise ValueError(f"sizes must double: {a} -> {b}")
    if spacing is None:
        spacing = lambda m: 1.0 / (m + 1)
    errors = tuple(abs(run(m) - target) for m in sizes)
    if any(e2 >= e1 for e1, e2 in zip(errors, errors[1:])):
        raise NonMonotoneError(f"errors not decreasing: sizes={sizes} errors={errors}")
    logs_h = np.log([spacing(m) for m in sizes])
    logs_e = np.log(errors)
    slope = np.polyfit(logs_h, logs_e, 1)[0]
    ratio = spacing(sizes[-2]) / spacing(sizes[-1])
    fine = run(sizes[-1])
    coarse = run(sizes[-2])
    rich = fine + (fine - coarse) / (ratio**slope - 1.0)
    return ConvergenceReport(
        order=float(slope), richardson=float(rich), errors=errors, sizes=sizes
    )
