"""Dense numerical kernels with an explicit tolerance policy.

Every rank, definiteness and structure decision in prokit goes through this
module so that the thresholds live in one place (:class:`ToleranceConfig`).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from prokit.errors import DomainError, StructuralError

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds used for numerical decisions.

    Parameters
    ----------
    rank_rel
        Relative singular value cutoff for ranks of data matrices.
    psd_abs
        Eigenvalue floor for semidefiniteness tests, scaled by ``1 + ||S||``.
    eq_rel
        Relative threshold for matrix equalities and structure checks.
    ctrb_rel
        Relative singular value cutoff for Hautus-type rank tests
        (controllability, observability, descriptor minimality). These
        matrices are routinely badly scaled, so the default sits at the
        roundoff level rather than at ``rank_rel``.
    """

    rank_rel: float = 1e-10
    psd_abs: float = 1e-9
    eq_rel: float = 1e-9
    ctrb_rel: float = field(default=EPS)

    def __post_init__(self):
        for name in ("rank_rel", "psd_abs", "eq_rel", "ctrb_rel"):
            if not getattr(self, name) > 0:
                raise StructuralError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


def as_real_matrix(X, name="matrix", shape=None):
    """Convert ``X`` to a finite 2-D float array, checking the shape if given."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        if arr.size == 0 and shape is not None:
            arr = arr.reshape(shape)
        else:
            raise StructuralError(f"{name} must be two-dimensional, got ndim={arr.ndim}")
    if shape is not None and arr.shape != tuple(shape):
        raise StructuralError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{name} has non-finite entries")
    return arr


def _require_square(X, name):
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise StructuralError(f"{name} must be square, got shape {X.shape}")


def norm2(X):
    """Spectral norm; zero for empty matrices."""
    X = np.asarray(X)
    if X.size == 0:
        return 0.0
    return float(np.linalg.norm(X, 2))


def sym_part(X):
    return (X + X.T) / 2


def skew_part(X):
    return (X - X.T) / 2


def symmetry_residual(X):
    """Relative size of the skew part of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return 0.0
    return norm2(skew_part(X)) / (1.0 + norm2(X))


def skewness_residual(X):
    """Relative size of the symmetric part of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return 0.0
    return norm2(sym_part(X)) / (1.0 + norm2(X))


def require_symmetric(S, tol=DEFAULT_TOL, name="matrix"):
    """Return the symmetrized ``S``; raise if it is not symmetric within ``eq_rel``."""
    S = as_real_matrix(S, name)
    _require_square(S, name)
    if symmetry_residual(S) > tol.eq_rel:
        raise StructuralError(f"{name} is not symmetric (residual {symmetry_residual(S):.3e})")
    return sym_part(S)


def require_skew(A, tol=DEFAULT_TOL, name="matrix"):
    """Return the antisymmetrized ``A``; raise if it is not skew within ``eq_rel``."""
    A = as_real_matrix(A, name)
    _require_square(A, name)
    if skewness_residual(A) > tol.eq_rel:
        raise StructuralError(
            f"{name} is not skew-symmetric (residual {skewness_residual(A):.3e})"
        )
    return skew_part(A)


def sym_eig(S, tol=DEFAULT_TOL):
    """Eigendecomposition of a real symmetric matrix.

    Returns
    -------
    w : ndarray
        Eigenvalues in nondecreasing order.
    V : ndarray
        Orthogonal matrix of eigenvectors, ``S @ V == V @ diag(w)``.
    """
    S = require_symmetric(S, tol, "S")
    if S.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    return np.linalg.eigh(S)


@dataclass(frozen=True)
class SkewCanonicalForm:
    """Real orthogonal block form of a skew-symmetric matrix.

    ``U.T @ A @ U`` equals ``blockdiag(w_1 J_{k_1}, ..., w_s J_{k_s}, 0)`` where
    ``J_k = [[0, I_k], [-I_k, 0]]``, the frequencies ``w_j`` are strictly
    decreasing and the trailing zero block has size ``zero_dim``.
    """

    U: np.ndarray
    blocks: tuple  # ((omega, multiplicity), ...)
    zero_dim: int

    @property
    def n(self):
        return self.U.shape[0]

    def canonical(self):
        return canonical_skew(self.blocks, self.zero_dim)

    def block_slices(self):
        """Row index arrays of ``U.T @ B`` belonging to each block, zero block last."""
        out = []
        start = 0
        for _, k in self.blocks:
            out.append(np.arange(start, start + 2 * k))
            start += 2 * k
        out.append(np.arange(start, start + self.zero_dim))
        return out


def rotation_block(omega, k):
    """``omega * [[0, I_k], [-I_k, 0]]``."""
    I = np.eye(k)
    Z = np.zeros((k, k))
    return omega * np.block([[Z, I], [-I, Z]])


def canonical_skew(blocks, zero_dim):
    parts = [rotation_block(w, k) for w, k in blocks]
    parts.append(np.zeros((zero_dim, zero_dim)))
    return spla.block_diag(*parts) if parts else np.zeros((0, 0))


def cluster_sorted(values, gap):
    """Split a sorted 1-D array into runs whose consecutive spacing is <= gap."""
    groups = []
    current = []
    for i, v in enumerate(values):
        if current and v - values[current[-1]] > gap:
            groups.append(current)
            current = []
        current.append(i)
    if current:
        groups.append(current)
    return groups


def skew_canonical(A, tol=DEFAULT_TOL):
    """Orthogonal block diagonalization of a real skew-symmetric matrix.

    The eigenvectors of the Hermitian matrix ``iA`` for an eigenvalue ``-w < 0``
    are eigenvectors of ``A`` for ``iw``; their real and imaginary parts,
    rescaled by ``sqrt(2)``, give the ``u`` and ``w`` columns of a block
    ``w * [[0, I], [-I, 0]]``. Frequencies closer than ``rank_rel * ||A||``
    are merged. The kernel basis is taken as the real orthogonal complement of
    the rotation columns.
    """
    A = require_skew(A, tol, "A")
    n = A.shape[0]
    if n == 0:
        return SkewCanonicalForm(np.zeros((0, 0)), (), 0)
    scale = norm2(A)
    if scale == 0.0:
        return SkewCanonicalForm(np.eye(n), (), n)
    gap = tol.rank_rel * scale
    lam, X = np.linalg.eigh(1j * A)
    neg = np.flatnonzero(lam < -gap)  # ascending, so most negative (largest omega) first
    blocks = []
    cols_u = []
    cols_w = []
    for group in cluster_sorted(lam[neg], gap):
        idx = neg[group]
        omega = float(-lam[idx].mean())
        Xg = X[:, idx]
        blocks.append((omega, len(idx)))
        cols_u.append(np.sqrt(2.0) * Xg.real)
        cols_w.append(np.sqrt(2.0) * Xg.imag)
    rot_cols = []
    for u, w in zip(cols_u, cols_w):
        rot_cols.extend([u, w])
    R = np.hstack(rot_cols) if rot_cols else np.zeros((n, 0))
    zero_dim = n - R.shape[1]
    if zero_dim > 0:
        if R.shape[1]:
            # R has orthonormal columns, so every singular value of R.T is 1
            K = spla.null_space(R.T, rcond=0.5)
        else:
            K = np.eye(n)
        U = np.hstack([R, K])
    else:
        U = R
    return SkewCanonicalForm(U, tuple(blocks), zero_dim)


def singular_values(X):
    X = np.asarray(X)
    if X.size == 0:
        return np.zeros(0)
    return np.linalg.svd(X, compute_uv=False)


def rank_svd(X, tol=DEFAULT_TOL, rel=None):
    """Numerical rank: singular values above ``rel * sigma_max * max(shape)``.

    ``rel`` defaults to ``tol.rank_rel``.
    """
    X = np.asarray(X)
    s = singular_values(X)
    if s.size == 0 or s[0] == 0.0:
        return 0
    rel = tol.rank_rel if rel is None else rel
    return int(np.sum(s > rel * s[0] * max(X.shape)))


def rank_threshold(X, tol=DEFAULT_TOL, rel=None):
    s = singular_values(X)
    rel = tol.rank_rel if rel is None else rel
    return 0.0 if s.size == 0 else rel * s[0] * max(np.shape(X))


def null_space(X, tol=DEFAULT_TOL, rel=None):
    """Orthonormal basis of the numerical kernel of ``X`` (columns)."""
    X = np.asarray(X)
    ncols = X.shape[1]
    if X.size == 0:
        return np.eye(ncols)
    _, s, Vh = np.linalg.svd(X)
    r = rank_svd(X, tol, rel)
    return Vh[r:].conj().T


def range_basis(X, tol=DEFAULT_TOL, rel=None):
    """Orthonormal basis of the numerical range of ``X`` (columns)."""
    X = np.asarray(X)
    if X.size == 0:
        return np.zeros((X.shape[0], 0))
    U, s, _ = np.linalg.svd(X)
    r = rank_svd(X, tol, rel)
    return U[:, :r]


def pinv(X, tol=DEFAULT_TOL):
    """Moore-Penrose pseudoinverse using the same cutoff as :func:`rank_svd`."""
    X = as_real_matrix(X, "X")
    rows, cols = X.shape
    if X.size == 0:
        return np.zeros((cols, rows))
    U, s, Vh = np.linalg.svd(X, full_matrices=False)
    r = rank_svd(X, tol)
    return (Vh[:r].T / s[:r]) @ U[:, :r].T


def psd_floor(S, tol=DEFAULT_TOL):
    return -tol.psd_abs * (1.0 + norm2(S))


def min_eig_hermitian_pair(S, T):
    """Smallest eigenvalue of the Hermitian matrix ``S + iT`` via its real embedding."""
    if S.shape[0] == 0:
        return 0.0
    emb = np.block([[S, -T], [T, S]])
    return float(np.linalg.eigvalsh(emb)[0])


def psd_pair_check(S, T, tol=DEFAULT_TOL):
    """Decide ``S + iT >= 0`` for real symmetric ``S`` and real skew ``T``."""
    S = require_symmetric(S, tol, "S")
    T = require_skew(T, tol, "T")
    if S.shape != T.shape:
        raise StructuralError(f"shape mismatch {S.shape} vs {T.shape}")
    return min_eig_hermitian_pair(S, T) >= psd_floor(S, tol)


def is_psd(S, tol=DEFAULT_TOL):
    S = require_symmetric(S, tol, "S")
    if S.shape[0] == 0:
        return True
    return float(np.linalg.eigvalsh(S)[0]) >= psd_floor(S, tol)


def gram_factor(Q, tol=DEFAULT_TOL, rel=None):
    """Full row rank ``B0`` with ``B0.T @ B0 == Q`` for symmetric PSD ``Q``.

    ``B0 = diag(sqrt(lam)) @ V.T`` over the ``rank_svd(Q, tol, rel)`` largest
    eigenpairs.
    """
    Q = require_symmetric(Q, tol, "Q")
    m = Q.shape[0]
    if m == 0:
        return np.zeros((0, 0))
    lam, V = np.linalg.eigh(Q)
    if lam[0] < psd_floor(Q, tol):
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {lam[0]:.3e})")
    p = rank_svd(Q, tol, rel)
    if p == 0:
        return np.zeros((0, m))
    keep = np.argsort(lam)[::-1][:p]
    return np.sqrt(np.clip(lam[keep], 0.0, None))[:, None] * V[:, keep].T


def sqrtm_psd(S):
    """Principal square root of a symmetric positive semidefinite matrix."""
    lam, V = np.linalg.eigh(sym_part(S))
    return (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.T


def inv_sqrtm_pd(S):
    lam, V = np.linalg.eigh(sym_part(S))
    return (V / np.sqrt(lam)) @ V.T
