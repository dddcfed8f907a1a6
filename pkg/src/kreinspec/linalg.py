"""Dense symmetric linear algebra used by every other module.

The eigensolver is the classical pair: Householder reduction to tridiagonal
form followed by implicit-shift QL sweeps.  That route is O(order^3) with a
predictable constant, is deterministic for a fixed input (no randomized
pivoting anywhere), and is accurate enough for orders up to a few thousand,
which is all this library ever builds.

Numpy supplies storage and BLAS-level products; all factorizations are
written out here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotPositiveDefinite, NotPositiveSemidefinite
from .tolerances import DEFAULT, ToleranceProfile

_EPS = float(np.finfo(np.float64).eps)

__all__ = [
    "SymMatrix",
    "EigenDecomposition",
    "cholesky",
    "solve_cholesky",
    "sym_eigen",
    "sym_eigen_values",
    "gen_sym_eigen",
    "gen_sym_eigen_values",
    "spd_sqrt",
    "sturm_count",
    "max_norm",
]


def max_norm(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


class SymMatrix:
    """Square symmetric matrix of IEEE doubles.

    The constructor symmetrizes by averaging and records the worst asymmetry
    it saw, so downstream code can always rely on exact entrywise symmetry.
    """

    __slots__ = ("array", "order", "max_asymmetry")

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        sym = 0.5 * (a + a.T)
        sym.flags.writeable = False
        self.array = sym
        self.order = int(a.shape[0])
        self.max_asymmetry = asym

    @property
    def norm_max(self) -> float:
        return max_norm(self.array)

    def __repr__(self):
        return f"SymMatrix(order={self.order}, max_asymmetry={self.max_asymmetry:.3g})"


def _as_sym_array(s) -> np.ndarray:
    if isinstance(s, SymMatrix):
        return s.array
    return SymMatrix(s).array


@dataclass
class EigenDecomposition:
    """Full spectral decomposition A = V diag(values) V^T, values ascending."""

    values: np.ndarray
    vectors: np.ndarray  # columns orthonormal (B-orthonormal for pencils)

    def residual(self, a) -> float:
        a = _as_sym_array(a)
        return max_norm(a @ self.vectors - self.vectors * self.values)

    def orthonormality_defect(self) -> float:
        v = self.vectors
        return max_norm(v.T @ v - np.eye(v.shape[1]))


def cholesky(s, profile: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Lower-triangular L with L L^T = S, hand-rolled column by column.

    Raises NotPositiveDefinite when a pivot falls at or below
    order * cholesky_pivot_rel * max|S|: for this library that always means
    an invalid pencil or model rather than a borderline matrix.
    """
    a = _as_sym_array(s)
    n = a.shape[0]
    floor = n * profile.cholesky_pivot_rel * max_norm(a)
    low = np.zeros_like(a)
    for j in range(n):
        row = low[j, :j]
        pivot = a[j, j] - row @ row
        if pivot <= floor or not math.isfinite(pivot):
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at column {j} below floor {floor:.3e}"
            )
        ljj = math.sqrt(pivot)
        low[j, j] = ljj
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ row) / ljj
    return low


def _forward_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve low @ x = b for lower-triangular low; b may have many columns."""
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    x = np.array(b, dtype=float, copy=True).reshape(b.shape[0], -1)
    for i in range(low.shape[0]):
        if i:
            x[i] -= low[i, :i] @ x[:i]
        x[i] /= low[i, i]
    return x[:, 0] if squeeze else x


def _backward_solve_t(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve low.T @ x = b."""
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    x = np.array(b, dtype=float, copy=True).reshape(b.shape[0], -1)
    n = low.shape[0]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= low[i + 1:, i] @ x[i + 1:]
        x[i] /= low[i, i]
    return x[:, 0] if squeeze else x


def solve_cholesky(low: np.ndarray, b) -> np.ndarray:
    """Solve (L L^T) x = b given the factor from cholesky()."""
    return _backward_solve_t(low, _forward_solve(low, b))


def _householder_tridiagonalize(a: np.ndarray, want_q: bool):
    """Reduce symmetric a to tridiagonal (d, e) with accumulated transform q.

    Returns (d, e, q) with q @ T @ q.T = a when want_q, else q is None.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    q = np.eye(n) if want_q else None
    for k in range(n - 2):
        x = a[k + 1:, k]
        xnorm = math.sqrt(float(x @ x))
        if xnorm == 0.0 or float(np.abs(x[1:]).sum()) == 0.0:
            continue
        alpha = -math.copysign(xnorm, x[0]) if x[0] != 0.0 else -xnorm
        v = x.copy()
        v[0] -= alpha
        vnorm = math.sqrt(float(v @ v))
        if vnorm == 0.0:
            continue
        v /= vnorm
        # two-sided reflector on the trailing block, as one rank-2 GEMM:
        # B <- B - 2(v u^T + u v^T) with u = Bv - (v^T B v) v
        block = a[k + 1:, k + 1:]
        w = block @ v
        u = w - (v @ w) * v
        left = np.stack((v, u), axis=1)
        right = np.stack((u, v), axis=0)
        block -= 2.0 * (left @ right)
        a[k + 1, k] = alpha
        a[k + 2:, k] = 0.0
        a[k, k + 1] = alpha
        a[k, k + 2:] = 0.0
        if want_q:
            cols = q[:, k + 1:]
            cols -= np.outer(2.0 * (cols @ v), v)
    d = np.diagonal(a).copy()
    e = np.diagonal(a, offset=-1).copy()
    return d, e, q


def _ql_implicit(d: np.ndarray, e: np.ndarray, z, max_sweeps: int = 50):
    """Implicit-shift QL on a tridiagonal (d, e); rotations applied to z.

    d is modified in place into the eigenvalues (unsorted); z, when given,
    accumulates the rotations column-wise.  Raises NoConvergence after
    max_sweeps sweeps for a single eigenvalue.

    Rotations are applied to the rows of the transposed vector matrix so the
    two touched vectors are contiguous, one small product per rotation.
    """
    n = d.size
    if n == 1:
        return d
    e = np.append(e, 0.0)
    if z is not None:
        zt = np.ascontiguousarray(z.T)
        rot = np.empty((2, 2))
        buf = np.empty((2, n))
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise NoConvergence(
                    f"QL iteration for eigenvalue {l} exceeded {max_sweeps} sweeps"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    rot[0, 0] = c
                    rot[0, 1] = -s
                    rot[1, 0] = s
                    rot[1, 1] = c
                    np.matmul(rot, zt[i:i + 2], out=buf)
                    zt[i:i + 2] = buf
            if not underflow:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    if z is not None:
        z[:] = zt.T
    return d


def sym_eigen(s, profile: ToleranceProfile = DEFAULT) -> EigenDecomposition:
    """Eigenvalues and orthonormal eigenvectors of a symmetric matrix.

    Householder tridiagonalization followed by implicit-shift QL; fully
    deterministic, values returned ascending.
    """
    a = _as_sym_array(s)
    d, e, q = _householder_tridiagonalize(a, want_q=True)
    _ql_implicit(d, e, q)
    order = np.argsort(d, kind="stable")
    return EigenDecomposition(values=d[order], vectors=q[:, order])


def sym_eigen_values(s) -> np.ndarray:
    """Eigenvalues only (same method as sym_eigen, skips vector updates)."""
    a = _as_sym_array(s)
    d, e, _ = _householder_tridiagonalize(a, want_q=False)
    _ql_implicit(d, e, None)
    return np.sort(d, kind="stable")


def tridiagonal_eigen(diag, offdiag, want_vectors: bool = False):
    """QL on an explicitly tridiagonal matrix, skipping the reduction step."""
    d = np.array(diag, dtype=float, copy=True)
    e = np.array(offdiag, dtype=float, copy=True)
    z = np.eye(d.size) if want_vectors else None
    _ql_implicit(d, e, z)
    order = np.argsort(d, kind="stable")
    if want_vectors:
        return EigenDecomposition(values=d[order], vectors=z[:, order])
    return d[order]


def gen_sym_eigen(a_pen, b_pen, profile: ToleranceProfile = DEFAULT) -> EigenDecomposition:
    """Solve the symmetric-definite pencil A v = lambda B v.

    Reduction by the Cholesky factor of B: with B = L L^T the pencil becomes
    the ordinary symmetric problem L^-1 A L^-T, and eigenvectors are mapped
    back through L^-T, which makes them B-orthonormal.
    """
    a = _as_sym_array(a_pen)
    low = cholesky(b_pen, profile)
    y = _forward_solve(low, a)
    c = _forward_solve(low, y.T)
    c = 0.5 * (c + c.T)
    eig = sym_eigen(c, profile)
    vectors = _backward_solve_t(low, eig.vectors)
    return EigenDecomposition(values=eig.values, vectors=vectors)


def gen_sym_eigen_values(a_pen, b_pen, profile: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Pencil eigenvalues only; same reduction as gen_sym_eigen."""
    a = _as_sym_array(a_pen)
    low = cholesky(b_pen, profile)
    y = _forward_solve(low, a)
    c = _forward_solve(low, y.T)
    c = 0.5 * (c + c.T)
    return sym_eigen_values(c)


def spd_sqrt(s, profile: ToleranceProfile = DEFAULT) -> SymMatrix:
    """Symmetric PSD square root via the eigendecomposition.

    Eigenvalues below -psd_clamp_rel * max|S| are rejected; the roundoff
    window [-tol, 0] is clamped to zero because discretization matrices are
    PSD only up to rounding.
    """
    a = _as_sym_array(s)
    eig = sym_eigen(a, profile)
    lo = -profile.psd_clamp_rel * max(max_norm(a), 1e-300)
    if eig.values[0] < lo:
        raise NotPositiveSemidefinite(
            f"eigenvalue {eig.values[0]:.6e} below clamp window {lo:.3e}"
        )
    vals = np.clip(eig.values, 0.0, None)
    root = (eig.vectors * np.sqrt(vals)) @ eig.vectors.T
    return SymMatrix(root)


def sturm_count(diag, offdiag, lam: float) -> int:
    """Number of eigenvalues strictly below lam for a symmetric tridiagonal.

    Classic Sturm sign-change count with the standard zero-pivot
    perturbation.
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    n = d.size
    if e.size != max(n - 1, 0):
        raise ValueError(f"offdiag length {e.size} does not match order {n}")
    emax = float(np.max(np.abs(e))) if e.size else 0.0
    pivmin = max(emax * emax * _EPS, 1e-300)
    count = 0
    q = d[0] - lam
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if abs(q) < pivmin:
            q = -pivmin
        q = (d[i] - lam) - e[i - 1] * e[i - 1] / q
        if q < 0.0:
            count += 1
    return count
