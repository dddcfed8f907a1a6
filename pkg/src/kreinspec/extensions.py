"""Finite-dimensional model of nonnegative self-adjoint extension theory.

The model: a positive-definite symmetric matrix A on an N-dimensional space,
restricted to a proper subspace D of dimension d < N.  The restriction
S = A|_D plays the role of a strictly positive symmetric operator whose
deficiency is the codimension N - d; ker(S*) is represented concretely by
ran(A D)^perp.

Why the Friedrichs extension collapses to A itself.  The Friedrichs domain
decomposes as D + S_F^{-1} (A D)^perp, which by a dimension count is all of
the ambient space, and the extension acts as the ambient operator on the
complementary part, so the unique everywhere-defined operator satisfying the
decomposition while extending A|_D and staying positive definite is A: every
other candidate in the parametrized family below is strictly smaller in the
quadratic-form order, and A is their least upper bound.  The continuum
theory never needs to state this collapse because there the Friedrichs
domain is a proper subspace.

Relative primeness of the two extremal extensions (their domains meeting
only in D) is intentionally not asserted anywhere: every matrix here is
everywhere defined, so domain intersections carry no information in the
finite model.

Two independent constructions of the Krein extension are always computed and
cross-checked: the piecewise one (equal to A on D, zero on (A D)^perp) is
the canonical output because it exercises the direct-sum domain splitting
literally; the closed form A^(1/2) P A^(1/2), with P the orthogonal
projector onto A^(1/2) D, validates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstructionMismatch,
    NoDeficiency,
    NotOrthogonal,
    NotPositiveDefinite,
    NotPSD,
    RankDeficientBasis,
    SingularDecomposition,
)
from .linalg import (
    EigenDecomposition,
    SymMatrix,
    cholesky,
    gen_sym_eigen,
    gen_sym_eigen_values,
    max_norm,
    solve_cholesky,
    spd_sqrt,
    sym_eigen,
    sym_eigen_values,
)
from .tolerances import DEFAULT, ToleranceProfile

__all__ = [
    "ExtensionModel",
    "ExtensionResult",
    "ReducedKrein",
    "BucklingReport",
    "new_model",
    "friedrichs",
    "adjoint_kernel",
    "krein",
    "parametrized_extension",
    "reduced_krein",
    "buckling_analysis",
    "pencil_values",
    "direct_sum",
    "conjugate_by_unitary",
    "order_compare",
    "SplitMix64",
    "random_model",
]


@dataclass(frozen=True)
class ExtensionModel:
    """Positive-definite A together with an orthonormal basis of D."""

    A: SymMatrix
    domain_basis: np.ndarray  # N x d, orthonormal columns spanning D
    epsilon: float            # smallest eigenvalue of A

    @property
    def ambient_dim(self) -> int:
        return self.A.order

    @property
    def domain_dim(self) -> int:
        return self.domain_basis.shape[1]

    @property
    def codimension(self) -> int:
        return self.ambient_dim - self.domain_dim


@dataclass(frozen=True)
class ExtensionResult:
    """A nonnegative self-adjoint extension of A|_D with its kernel."""

    matrix: SymMatrix
    kind: str                     # "friedrichs" | "krein" | "parametrized"
    kernel_basis: np.ndarray      # N x k, orthonormal (k may be 0)
    construction_gap: float = 0.0  # krein: piecewise vs closed-form mismatch
    w_basis: np.ndarray | None = None   # parametrized: the subspace W
    b_matrix: SymMatrix | None = None   # parametrized: the parameter B

    def extends_residual(self, model: ExtensionModel) -> float:
        q = model.domain_basis
        return max_norm(self.matrix.array @ q - model.A.array @ q)

    def kernel_residual(self) -> float:
        if self.kernel_basis.shape[1] == 0:
            return 0.0
        return max_norm(self.matrix.array @ self.kernel_basis)


@dataclass(frozen=True)
class ReducedKrein:
    """Krein extension compressed to the complement of its kernel."""

    basis: np.ndarray        # N x d, orthonormal columns spanning (ker S_K)^perp
    matrix: SymMatrix        # d x d compression, positive definite
    skinv_residual: float    # inverse-formula defect against compressed A^{-1}


@dataclass(frozen=True)
class BucklingReport:
    """Pencil data for P_D A^2|_D u = lambda P_D A|_D u and its companions."""

    pencil_values: np.ndarray
    pencil_vectors: np.ndarray      # G_b-orthonormal coordinates in D
    t_matrix: SymMatrix             # d x d, bounded by 1/epsilon in norm
    polar_modulus: SymMatrix        # |S| = (Q^T A^2 Q)^(1/2)
    isometry: np.ndarray            # U_S = A Q |S|^{-1}, orthonormal columns
    residuals: dict


def _mgs_orthonormalize(columns: np.ndarray, rel_floor: float):
    """Modified Gram-Schmidt, two passes per column.

    Returns (basis, kept) where kept lists the input columns that survived;
    a column is dropped when its orthogonal part falls below rel_floor times
    the largest input column norm.
    """
    n, m = columns.shape
    scale = max(
        (math.sqrt(float(c @ c)) for c in columns.T), default=0.0
    )
    basis = np.empty((n, m))
    kept = []
    size = 0
    for j in range(m):
        v = columns[:, j].astype(float).copy()
        for _ in range(2):
            if size:
                v -= basis[:, :size] @ (basis[:, :size].T @ v)
        nv = math.sqrt(float(v @ v))
        if nv <= rel_floor * scale:
            continue
        basis[:, size] = v / nv
        kept.append(j)
        size += 1
    return basis[:, :size], kept


def _orthonormal_complement(basis: np.ndarray, profile: ToleranceProfile) -> np.ndarray:
    """Extend orthonormal columns to a full basis; return the new columns.

    Deterministic: coordinate vectors are tried in order and kept when their
    part orthogonal to everything so far is non-negligible.  Some coordinate
    vector always has orthogonal mass at least 1/sqrt(N), so the 1e-2
    acceptance floor cannot exhaust the candidates at these sizes.
    """
    n, d = basis.shape
    want = n - d
    if want == 0:
        return np.empty((n, 0))
    out = np.empty((n, want))
    size = 0
    for j in range(n):
        if size == want:
            break
        v = np.zeros(n)
        v[j] = 1.0
        for _ in range(2):
            v -= basis @ (basis.T @ v)
            if size:
                v -= out[:, :size] @ (out[:, :size].T @ v)
        nv = math.sqrt(float(v @ v))
        if nv < 1e-2:
            continue
        out[:, size] = v / nv
        size += 1
    if size != want:
        raise SingularDecomposition(
            f"complement construction found {size} of {want} directions"
        )
    return out


def new_model(a, raw_basis, profile: ToleranceProfile = DEFAULT) -> ExtensionModel:
    """Build a model from A and a spanning set of D (columns).

    The basis is orthonormalized (modified Gram-Schmidt, run twice per
    column); the bottom eigenvalue of A is computed and stored.
    """
    a = a if isinstance(a, SymMatrix) else SymMatrix(a)
    raw = np.asarray(raw_basis, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]
    n = a.order
    if raw.shape[0] != n:
        raise ValueError(f"basis rows {raw.shape[0]} != ambient dimension {n}")
    d = raw.shape[1]
    if d >= n:
        raise NoDeficiency(f"domain dimension {d} leaves no deficiency in {n}")
    if d < 1:
        raise ValueError("domain must have at least one column")
    values = sym_eigen_values(a)
    eps = float(values[0])
    if eps <= n * profile.cholesky_pivot_rel * a.norm_max:
        raise NotPositiveDefinite(f"bottom eigenvalue {eps:.3e} not positive")
    gram = raw.T @ raw
    if max_norm(gram - np.eye(d)) <= profile.orthonormal_rel:
        basis = raw.astype(float).copy()
    else:
        basis, kept = _mgs_orthonormalize(raw, n * profile.rank_rel)
        if len(kept) != d:
            raise RankDeficientBasis(
                f"only {len(kept)} of {d} basis columns are independent"
            )
    basis.flags.writeable = False
    return ExtensionModel(A=a, domain_basis=basis, epsilon=eps)


def friedrichs(model: ExtensionModel) -> ExtensionResult:
    """The largest extension; in the finite model this is A itself."""
    n = model.ambient_dim
    return ExtensionResult(
        matrix=model.A, kind="friedrichs", kernel_basis=np.empty((n, 0))
    )


def adjoint_kernel(model: ExtensionModel, profile: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Orthonormal basis of ran(A D)^perp, the model's ker(S*)."""
    aq = model.A.array @ model.domain_basis
    range_basis, kept = _mgs_orthonormalize(aq, model.ambient_dim * profile.rank_rel)
    if len(kept) != model.domain_dim:
        raise SingularDecomposition("A maps the domain to a rank-deficient set")
    return _orthonormal_complement(range_basis, profile)


def _extension_from_action(span: np.ndarray, images: np.ndarray,
                           profile: ToleranceProfile, norm_scale: float) -> np.ndarray:
    """The matrix sending span[:, j] to images[:, j], via normal equations.

    Raises SingularDecomposition when the spanning set is numerically rank
    deficient (smallest singular value below N * rank_rel * largest); the
    construction fails loudly instead of regularizing.
    """
    n = span.shape[0]
    gram = span.T @ span
    sing = sym_eigen_values(gram)
    smax = math.sqrt(max(float(sing[-1]), 0.0))
    smin = math.sqrt(max(float(sing[0]), 0.0))
    if smin <= n * profile.rank_rel * smax:
        raise SingularDecomposition(
            f"spanning set has singular values {smin:.3e} .. {smax:.3e}"
        )
    low = cholesky(gram, profile)
    # matrix = images @ span^{-1} = images @ (span^T span)^{-1} span^T
    return images @ solve_cholesky(low, span.T)


def krein(model: ExtensionModel, profile: ToleranceProfile = DEFAULT) -> ExtensionResult:
    """The smallest extension: equal to A on D and zero on (A D)^perp.

    Assembled piecewise from that definition, then cross-checked against the
    independent closed form A^(1/2) P A^(1/2) with P projecting onto
    A^(1/2) D; a mismatch beyond construction_rel * max|A| is a bug, never a
    math failure, and raises ConstructionMismatch.
    """
    a = model.A.array
    q = model.domain_basis
    kernel = adjoint_kernel(model, profile)
    span = np.concatenate((q, kernel), axis=1)
    images = np.concatenate((a @ q, np.zeros_like(kernel)), axis=1)
    piecewise = _extension_from_action(span, images, profile, model.A.norm_max)
    piecewise = 0.5 * (piecewise + piecewise.T)

    root = spd_sqrt(model.A, profile).array
    half_dom = root @ q
    gram = half_dom.T @ half_dom
    low = cholesky(gram, profile)
    projector = half_dom @ solve_cholesky(low, half_dom.T)
    closed_form = root @ projector @ root

    gap = max_norm(piecewise - closed_form)
    if gap > profile.construction_rel * model.A.norm_max:
        raise ConstructionMismatch(
            f"piecewise vs closed-form Krein matrices differ by {gap:.3e}"
        )
    return ExtensionResult(
        matrix=SymMatrix(piecewise),
        kind="krein",
        kernel_basis=kernel,
        construction_gap=gap,
    )


def parametrized_extension(model: ExtensionModel, w_basis, b,
                           profile: ToleranceProfile = DEFAULT) -> ExtensionResult:
    """Extension selected by a PSD parameter B on a subspace W of ker(S*).

    The defining action: a domain vector f + A^{-1}(B w + eta) + w, with f
    in D, w in W and eta in ker(S*) orthogonal to W, is sent to
    A f + B w + eta.  The assembled matrix is verified symmetric PSD and an
    extension of A|_D, and its kernel is W applied to ker(B).

    The choices W = ker(S*) with B = 0, and W = {0}, recover the Krein and
    Friedrichs extensions.
    """
    a = model.A.array
    n = model.ambient_dim
    q = model.domain_basis
    w = np.asarray(w_basis, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    p = w.shape[1]
    kernel = adjoint_kernel(model, profile)
    if p:
        if max_norm(w.T @ w - np.eye(p)) > 1e-10:
            raise NotOrthogonal("W basis columns are not orthonormal")
        if max_norm((a @ q).T @ w) > profile.adjoint_kernel_rel * model.A.norm_max * n:
            raise NotOrthogonal("W is not inside ker(S*) = ran(A D)^perp")
    if p:
        b = b if isinstance(b, SymMatrix) else SymMatrix(np.asarray(b, dtype=float).reshape(p, p))
        if b.order != p:
            raise ValueError(f"parameter order {b.order} != dim W = {p}")
        b_eigen = sym_eigen(b, profile)
        if b_eigen.values[0] < -profile.psd_clamp_rel * max(b.norm_max, 1e-300):
            raise NotPSD(f"parameter has eigenvalue {b_eigen.values[0]:.3e}")
    else:
        b, b_eigen = None, None

    # eta directions: ker(S*) part orthogonal to W
    if p:
        coeffs = kernel.T @ w                      # W in kernel coordinates
        eta_coeff = _orthonormal_complement(
            _mgs_orthonormalize(coeffs, profile.rank_rel)[0], profile
        )
        eta = kernel @ eta_coeff
    else:
        eta = kernel

    a_low = cholesky(model.A, profile)
    pieces_span = [q]
    pieces_img = [a @ q]
    if p:
        wb = w @ b.array
        pieces_span.append(solve_cholesky(a_low, wb) + w)
        pieces_img.append(wb)
    if eta.shape[1]:
        pieces_span.append(solve_cholesky(a_low, eta))
        pieces_img.append(eta)
    span = np.concatenate(pieces_span, axis=1)
    images = np.concatenate(pieces_img, axis=1)
    matrix = _extension_from_action(span, images, profile, model.A.norm_max)

    sym_defect = max_norm(matrix - matrix.T)
    matrix = 0.5 * (matrix + matrix.T)
    scale = model.A.norm_max
    if sym_defect > profile.construction_rel * scale:
        raise ConstructionMismatch(f"assembled matrix asymmetric by {sym_defect:.3e}")
    values = sym_eigen_values(matrix)
    if values[0] < -profile.construction_rel * scale:
        raise ConstructionMismatch(f"assembled matrix has eigenvalue {values[0]:.3e}")
    ext_resid = max_norm(matrix @ q - a @ q)
    if ext_resid > profile.extension_residual_rel * scale * n:
        raise ConstructionMismatch(f"extension residual {ext_resid:.3e}")

    if p:
        floor = profile.psd_clamp_rel * max(b.norm_max, 1.0) * p
        null_cols = b_eigen.vectors[:, np.abs(b_eigen.values) <= floor]
        kernel_basis = w @ null_cols
    else:
        kernel_basis = np.empty((n, 0))
    return ExtensionResult(
        matrix=SymMatrix(matrix),
        kind="parametrized",
        kernel_basis=kernel_basis,
        w_basis=w,
        b_matrix=b,
    )


def reduced_krein(model: ExtensionModel, profile: ToleranceProfile = DEFAULT) -> ReducedKrein:
    """Compression of the Krein extension to the complement of its kernel.

    The inverse formula is reported as a residual: the inverse of the
    compressed Krein matrix should equal the compression of A^{-1} to the
    same subspace.
    """
    kr = krein(model, profile)
    aq = model.A.array @ model.domain_basis
    basis, kept = _mgs_orthonormalize(aq, model.ambient_dim * profile.rank_rel)
    if len(kept) != model.domain_dim:
        raise SingularDecomposition("ran(A D) is rank deficient")
    compressed = basis.T @ kr.matrix.array @ basis
    compressed = 0.5 * (compressed + compressed.T)
    low = cholesky(compressed, profile)
    inv_compressed = solve_cholesky(low, np.eye(model.domain_dim))
    a_low = cholesky(model.A, profile)
    a_inv_compressed = basis.T @ solve_cholesky(a_low, basis)
    resid = max_norm(0.5 * (inv_compressed + inv_compressed.T) - a_inv_compressed)
    return ReducedKrein(
        basis=basis, matrix=SymMatrix(compressed), skinv_residual=float(resid)
    )


def _power_of_two_rescaled(model: ExtensionModel):
    """Model with A divided by a power of two near its norm, plus that scale.

    Every construction here is exactly homogeneous in A, and dividing by a
    power of two is exact in IEEE arithmetic, so working at unit scale and
    scaling results back commits no extra rounding.  This matters for the
    pencil: squaring A at physical scale (discretizations carry 1/h^2)
    otherwise buries the small eigenvalues in assembly noise.
    """
    norm = model.A.norm_max
    if norm == 0.0:
        return model, 1.0
    scale = float(2.0 ** math.frexp(norm)[1])
    if scale == 1.0:
        return model, 1.0
    tilde = ExtensionModel(
        A=SymMatrix(model.A.array / scale),
        domain_basis=model.domain_basis,
        epsilon=model.epsilon / scale,
    )
    return tilde, scale


def pencil_values(model: ExtensionModel, profile: ToleranceProfile = DEFAULT) -> np.ndarray:
    """Ascending eigenvalues of the compressed pencil Q^T A^2 Q u = l Q^T A Q u."""
    tilde, scale = _power_of_two_rescaled(model)
    q = tilde.domain_basis
    aq = tilde.A.array @ q
    g_a = aq.T @ aq
    g_b = q.T @ aq
    return scale * gen_sym_eigen_values(SymMatrix(g_a), SymMatrix(g_b), profile)


def buckling_analysis(model: ExtensionModel, profile: ToleranceProfile = DEFAULT) -> BucklingReport:
    """Pencil, polar data, and the identity residuals tying them together.

    residuals keys:
      krein_vs_pencil      nonzero Krein eigenvalues against pencil values
                           (relative, exact at matrix level up to roundoff)
      unitary_equivalence  inverse of the compressed Krein matrix against
                           the T operator expressed in the isometry basis
      reciprocal_spectrum  eigenvalues of T against reciprocal pencil values
    """
    tilde, scale = _power_of_two_rescaled(model)
    a = tilde.A.array
    q = tilde.domain_basis
    d = tilde.domain_dim
    aq = a @ q
    g_a = SymMatrix(aq.T @ aq)
    g_b = SymMatrix(q.T @ aq)
    pencil = gen_sym_eigen(g_a, g_b, profile)
    values = scale * pencil.values

    modulus = spd_sqrt(g_a, profile)
    mod_low = cholesky(modulus, profile)
    mod_inv = solve_cholesky(mod_low, np.eye(d))
    t_tilde = mod_inv @ g_b.array @ mod_inv
    t_tilde = 0.5 * (t_tilde + t_tilde.T)
    isometry = aq @ mod_inv

    kr = krein(model, profile)
    krein_vals = sym_eigen_values(kr.matrix)
    nonzero = krein_vals[model.codimension:]
    resid_a = float(np.max(np.abs(nonzero - values) / np.abs(values)))

    # compress the physical Krein matrix, compare at the rescaled scale
    compressed = (isometry.T @ kr.matrix.array @ isometry) / scale
    low = cholesky(SymMatrix(compressed), profile)
    inv_compressed = solve_cholesky(low, np.eye(d))
    resid_b = float(
        max_norm(inv_compressed - t_tilde)
        / max(max_norm(inv_compressed), 1e-300)
    )

    t_vals = sym_eigen_values(SymMatrix(t_tilde))
    recips = np.sort(1.0 / pencil.values)
    resid_c = float(np.max(np.abs(t_vals - recips) / np.abs(recips)))

    return BucklingReport(
        pencil_values=values,
        pencil_vectors=pencil.vectors,
        t_matrix=SymMatrix(t_tilde / scale),
        polar_modulus=SymMatrix(scale * modulus.array),
        isometry=isometry,
        residuals={
            "krein_vs_pencil": resid_a,
            "unitary_equivalence": resid_b,
            "reciprocal_spectrum": resid_c,
        },
    )


def direct_sum(m1: ExtensionModel, m2: ExtensionModel,
               profile: ToleranceProfile = DEFAULT) -> ExtensionModel:
    """Block model: extensions of a direct sum are direct sums of extensions."""
    n1, n2 = m1.ambient_dim, m2.ambient_dim
    a = np.zeros((n1 + n2, n1 + n2))
    a[:n1, :n1] = m1.A.array
    a[n1:, n1:] = m2.A.array
    basis = np.zeros((n1 + n2, m1.domain_dim + m2.domain_dim))
    basis[:n1, :m1.domain_dim] = m1.domain_basis
    basis[n1:, m1.domain_dim:] = m2.domain_basis
    return new_model(SymMatrix(a), basis, profile)


def conjugate_by_unitary(model: ExtensionModel, u,
                         profile: ToleranceProfile = DEFAULT) -> ExtensionModel:
    """Model with A replaced by U A U^T and the domain carried along."""
    u = np.asarray(u, dtype=float)
    n = model.ambient_dim
    if u.shape != (n, n):
        raise ValueError(f"conjugator shape {u.shape} != ({n}, {n})")
    if max_norm(u.T @ u - np.eye(n)) > profile.orthonormal_rel:
        raise NotOrthogonal("conjugator is not orthogonal within 1e-12")
    a = SymMatrix(u @ model.A.array @ u.T)
    return new_model(a, u @ model.domain_basis, profile)


def order_compare(e1: ExtensionResult, e2: ExtensionResult, a: float,
                  profile: ToleranceProfile = DEFAULT) -> float:
    """Smallest eigenvalue of (E1 + aI)^{-1} - (E2 + aI)^{-1}.

    A result down to -order_slack certifies E1 <= E2 in the extension order,
    because PSD order is equivalent to the reversed order of resolvents at
    any positive shift.
    """
    if a <= 0.0:
        raise ValueError("shift must be positive")
    n = e1.matrix.order
    eye = np.eye(n)
    r1 = solve_cholesky(cholesky(SymMatrix(e1.matrix.array + a * eye), profile), eye)
    r2 = solve_cholesky(cholesky(SymMatrix(e2.matrix.array + a * eye), profile), eye)
    diff = SymMatrix(r1 - r2)
    return float(sym_eigen_values(diff)[0])


class SplitMix64:
    """Deterministic 64-bit stream used for cross-platform random models."""

    _GAMMA = 0x9E3779B97F4A7C15
    _MIX1 = 0xBF58476D1CE4E5B9
    _MIX2 = 0x94D493DDA76E2B63
    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + self._GAMMA) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * self._MIX1) & self._MASK
        z = ((z ^ (z >> 27)) * self._MIX2) & self._MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform_matrix(self, rows: int, cols: int) -> np.ndarray:
        return np.array(
            [[self.uniform() for _ in range(cols)] for _ in range(rows)]
        )


def random_model(seed: int, n: int, d: int,
                 profile: ToleranceProfile = DEFAULT) -> ExtensionModel:
    """Seeded random model: A = M^T M + 0.1 I keeps the bottom above 0.1."""
    stream = SplitMix64(seed)
    m = stream.uniform_matrix(n, n)
    a = SymMatrix(m.T @ m + 0.1 * np.eye(n))
    raw = stream.uniform_matrix(n, d)
    return new_model(a, raw, profile)
