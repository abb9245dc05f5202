"""Conversions between Foster, state-space and Weierstrass descriptor forms.

Also hosts the controllability test and the five-condition minimality test
for descriptor realizations.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from prokit import matlin
from prokit.core import (
    DescriptorRealization,
    FosterForm,
    FosterTerm,
    StateSpaceRealization,
    ValidationReport,
    check_residue_dominance,
    merge_terms,
    validate_foster,
)
from prokit.errors import DomainError, StructuralError
from prokit.matlin import DEFAULT_TOL

PROBE_SEED = 1729
# Residue ranks are decided at roundoff level: Gram matrices of rank deficient
# factors show spurious eigenvalues below about eps * m * ||Q||, while genuine
# directions of badly scaled residues can sit only a few decades above that.
LIFT_RANK_SCALE = 4.0


def _lift_rel(tol):
    return LIFT_RANK_SCALE * tol.ctrb_rel


@dataclass(frozen=True)
class LiftResult:
    """Factorization ``Q = B.T B``, ``R = B.T A B`` with ``(A, B)`` controllable.

    For ``omega > 0``, ``A = omega * [[0, I_q], [-I_q, 0]]`` and ``B`` has ``2q``
    rows. For ``omega == 0`` the state matrix is the ``q x q`` zero matrix and
    ``B`` has ``q`` rows. In both cases ``q`` is the pole multiplicity.
    """

    omega: float
    q: int
    B: np.ndarray

    @property
    def A(self):
        if self.omega == 0.0:
            return np.zeros((self.q, self.q))
        return matlin.rotation_block(self.omega, self.q)

    @property
    def state_dim(self):
        return self.B.shape[0]


def _residue_pairs(omega, Q, R, tol):
    """Factor ``Q`` and split the compressed residue into 2x2 rotation pairs.

    Returns ``(B1, pairs, single)`` where ``B1`` has full row rank, ``pairs``
    lists ``(alpha, row_u, row_w)`` for blocks ``[[0, alpha], [-alpha, 0]]`` and
    ``single`` is the index of an unpaired kernel row (odd rank) or ``None``.
    """
    B0 = matlin.gram_factor(Q, tol, _lift_rel(tol))
    p = B0.shape[0]
    if p == 0:
        return B0, [], None
    P = matlin.pinv(B0, tol)
    S0 = matlin.skew_part(P.T @ R @ P)
    canon = matlin.skew_canonical(S0, tol)
    B1 = canon.U.T @ B0
    pairs = []
    start = 0
    for alpha, k in canon.blocks:
        for i in range(k):
            pairs.append((alpha, start + i, start + k + i))
        start += 2 * k
    kernel = list(range(start, p))
    for i in range(0, len(kernel) - 1, 2):
        pairs.append((0.0, kernel[i], kernel[i + 1]))
    single = kernel[-1] if len(kernel) % 2 else None
    return B1, pairs, single


def _at_bound(alpha, omega, tol):
    return abs(omega - alpha) <= tol.psd_abs * (1.0 + omega)


def _check_pair(omega, Q, R, tol):
    Q = matlin.require_symmetric(Q, tol, "Q")
    R = matlin.require_skew(R, tol, "R")
    if omega < 0:
        raise DomainError(f"omega must be nonnegative, got {omega}")
    if omega == 0.0:
        if matlin.norm2(R) > tol.psd_abs * (1.0 + matlin.norm2(Q)):
            raise DomainError("R_j must vanish at omega=0")
        if not matlin.is_psd(Q, tol):
            raise DomainError("residue pair not dominated: Q is not positive semidefinite")
        return Q, R
    if not matlin.is_psd(Q, tol):
        raise DomainError("residue pair not dominated: Q is not positive semidefinite")
    ok, res = check_residue_dominance(omega, Q, R, tol)
    if not ok:
        raise DomainError(f"residue pair not dominated (violation {res:.3e})")
    return Q, R


def lift_factorization(omega, Q, R, tol=DEFAULT_TOL):
    """Controllable factorization of a residue pair dominated by ``omega``.

    Given ``Q >= 0`` and skew ``R`` with ``-omega Q <= iR <= omega Q``, build
    ``B`` with ``Q = B.T B`` and ``R = B.T A B`` for
    ``A = omega [[0, I_q], [-I_q, 0]]``.

    ``Q = B0.T B0`` is factored with ``B0`` of full row rank and the compressed
    residue ``S0 = pinv(B0).T R pinv(B0)`` is brought to rotation pairs with
    frequencies ``alpha <= omega``. Pairs with ``alpha == omega`` map to a single
    rotation pair; a pair with ``alpha < omega`` is padded with zero rows and
    rotated by ``[[alpha, eta], [-eta, alpha]] / omega``,
    ``eta = sqrt(omega**2 - alpha**2)``, which needs two rotation pairs. An
    unpaired kernel row (odd rank) gets one pair of its own.
    """
    omega = float(omega)
    Q, R = _check_pair(omega, Q, R, tol)
    m = Q.shape[0]
    if omega == 0.0:
        B0 = matlin.gram_factor(Q, tol, _lift_rel(tol))
        return LiftResult(0.0, B0.shape[0], B0)
    B1, pairs, single = _residue_pairs(omega, Q, R, tol)
    first = []
    second = []
    for alpha, iu, iw in pairs:
        bu, bw = B1[iu], B1[iw]
        if _at_bound(alpha, omega, tol):
            first.append(bu)
            second.append(bw)
        elif alpha > omega:
            raise DomainError(f"residue pair not dominated (alpha={alpha:.6g} > omega)")
        else:
            eta = np.sqrt(max(omega**2 - alpha**2, 0.0))
            first.extend([(alpha / omega) * bu, (eta / omega) * bu])
            second.extend([bw, np.zeros(m)])
    if single is not None:
        first.append(B1[single])
        second.append(np.zeros(m))
    q = len(first)
    if q == 0:
        return LiftResult(omega, 0, np.zeros((0, m)))
    return LiftResult(omega, q, np.vstack([np.array(first), np.array(second)]))


def residue_multiplicity(omega, Q, R, tol=DEFAULT_TOL):
    """Pole multiplicity of a Foster term, by counting rotation pairs.

    With ``p = rank Q`` and ``l`` the number of compressed residue frequencies
    equal to ``omega``, the multiplicity is ``l + 2(p/2 - l)`` for even ``p`` and
    ``l + 2((p-1)/2 - l) + 1`` for odd ``p`` (the unpaired kernel row needs one
    rotation pair of its own). At ``omega == 0`` the pole is simple in each of
    the ``p`` directions, so the multiplicity is ``p``.
    """
    Q = matlin.require_symmetric(Q, tol, "Q")
    R = matlin.require_skew(R, tol, "R")
    omega = float(omega)
    if omega == 0.0:
        return matlin.rank_svd(Q, tol, _lift_rel(tol))
    B1, pairs, single = _residue_pairs(omega, Q, R, tol)
    p = B1.shape[0]
    if p == 0:
        return 0
    l = sum(1 for alpha, _, _ in pairs if _at_bound(alpha, omega, tol))
    if p % 2 == 0:
        return l + 2 * (p // 2 - l)
    return l + 2 * ((p - 1) // 2 - l) + 1


def _validated_realization_parts(r, tol):
    M = matlin.require_symmetric(r.M, tol, "M")
    D = matlin.require_skew(r.D, tol, "D")
    A = matlin.require_skew(r.A, tol, "A")
    if not matlin.is_psd(M, tol):
        raise DomainError("M is not positive semidefinite")
    return M, D, A, r.B


def foster_to_state_space(f, tol=DEFAULT_TOL):
    """Minimal realization ``zM + D + B.T (zI - A)^{-1} B`` of a Foster form.

    ``M = Q``, ``D = R`` and each resonant term contributes a diagonal block of
    ``A`` and a block of rows of ``B`` from :func:`lift_factorization`.
    """
    report = validate_foster(f, tol)
    if not report.passed:
        raise DomainError(f"invalid Foster form: {report}", report=report)
    f = merge_terms(f, tol)
    m = f.m
    A_blocks = []
    B_blocks = []
    for t in f.terms:
        lift = lift_factorization(t.omega, t.Qj, t.Rj, tol)
        if lift.state_dim == 0:
            continue
        A_blocks.append(lift.A)
        B_blocks.append(lift.B)
    A = spla.block_diag(*A_blocks) if A_blocks else np.zeros((0, 0))
    B = np.vstack(B_blocks) if B_blocks else np.zeros((0, m))
    return StateSpaceRealization(matlin.sym_part(f.Q), matlin.skew_part(f.R), A, B)


def state_space_to_foster(r, tol=DEFAULT_TOL):
    """Foster form of a state-space realization.

    The state matrix is brought to orthogonal block form ``U.T A U``; each
    block ``w [[0, I], [-I, 0]]`` with rows ``Bj`` of ``U.T B`` gives the term
    ``Qj = Bj.T Bj``, ``Rj = Bj.T Aj Bj``, and the kernel of ``A`` gives the
    ``omega = 0`` term. Odd state dimensions are first padded with a zero state.
    """
    M, D, A, B = _validated_realization_parts(r, tol)
    n, m = B.shape
    if n % 2:
        A = np.pad(A, ((0, 1), (0, 1)))
        B = np.vstack([B, np.zeros((1, m))])
    canon = matlin.skew_canonical(A, tol)
    Bt = canon.U.T @ B
    terms = []
    slices = canon.block_slices()
    for (omega, k), rows in zip(canon.blocks, slices):
        Bj = Bt[rows]
        Aj = matlin.rotation_block(omega, k)
        terms.append(FosterTerm(omega, Bj.T @ Bj, matlin.skew_part(Bj.T @ Aj @ Bj)))
    if canon.zero_dim:
        Bz = Bt[slices[-1]]
        Q0 = Bz.T @ Bz
        if matlin.norm2(Q0) > 0:
            terms.append(FosterTerm(0.0, Q0, np.zeros((m, m))))
    return FosterForm(M, D, tuple(terms))


def state_space_to_weierstrass(r, tol=DEFAULT_TOL):
    """Weierstrass descriptor realization of ``zM + D + B.T (zI - A)^{-1} B``.

    With ``M = K.T K`` (``K`` of full row rank q) the pencil is
    ``E = [[I_n, 0, 0], [0, 0, I_q], [0, 0, 0]]``, ``A = diag(A, I_q, I_q)``,
    input matrix ``[B; 0; -K]`` and output matrix ``[B; K; 0]``.
    """
    M, D, A, B = _validated_realization_parts(r, tol)
    n, m = B.shape
    K = matlin.gram_factor(M, tol)
    q = K.shape[0]
    Iq = np.eye(q)
    Zq = np.zeros((q, q))
    E = spla.block_diag(np.eye(n), np.block([[Zq, Iq], [Zq, Zq]]))
    Ad = spla.block_diag(A, Iq, Iq)
    Bd = np.vstack([B, np.zeros((q, m)), -K])
    Cd = np.vstack([B, K, np.zeros((q, m))])
    return DescriptorRealization(E, Ad, Bd, Cd, D)


# -- rank tests ---------------------------------------------------------------


def _distinct_eigenvalues(A, tol):
    if matlin.skewness_residual(A) <= tol.eq_rel:
        lam = -1j * np.linalg.eigvalsh(1j * matlin.skew_part(A))
    else:
        lam = np.linalg.eigvals(A)
    gap = tol.rank_rel * max(1.0, matlin.norm2(A))
    out = []
    for x in lam:
        if all(abs(x - y) > gap for y in out):
            out.append(x)
    return out


def controllability_hautus(A, B, tol=DEFAULT_TOL):
    """Hautus test: ``rank [A - lam I, B] == n`` at every eigenvalue of ``A``.

    Ranks use the ``ctrb_rel`` cutoff of ``tol``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    if n == 0:
        return True
    if B.shape[0] != n:
        raise StructuralError(f"B has {B.shape[0]} rows, expected {n}")
    eye = np.eye(n)
    for lam in _distinct_eigenvalues(A, tol):
        if matlin.rank_svd(np.hstack([A - lam * eye, B]), tol, tol.ctrb_rel) < n:
            return False
    return True


def controllability_matrix(A, B):
    """Krylov matrix ``[B, AB, ..., A^{n-1} B]``."""
    n = A.shape[0]
    blocks = [B]
    for _ in range(1, n):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks) if n else np.zeros((0, B.shape[1]))


def controllability_gramian(A, B):
    """``sum_{j<n} A^j B B.T (A.T)^j``; positive definite iff (A, B) is controllable."""
    K = controllability_matrix(A, B)
    return K @ K.T


@dataclass
class MinimalityReport:
    """Outcome of the five descriptor minimality conditions.

    ``conditions`` maps the condition labels ``"i"`` ... ``"v"`` to booleans;
    ``details`` carries the measured ranks and residuals.
    """

    conditions: dict
    details: dict = field(default_factory=dict)
    probes: list = field(default_factory=list)

    @property
    def minimal(self):
        return all(self.conditions.values())

    def to_dict(self):
        return {
            "minimal": self.minimal,
            "conditions": dict(self.conditions),
            "details": self.details,
            "probe_count": len(self.probes),
        }


def pencil_is_regular(E, A, tol=DEFAULT_TOL, probes=8, seed=PROBE_SEED):
    """``det(zE - A)`` not identically zero, decided at random complex points."""
    N = E.shape[0]
    if N == 0:
        return True
    rng = np.random.default_rng(seed)
    zs = rng.normal(size=probes) + 1j * rng.normal(size=probes)
    return any(matlin.rank_svd(z * E - A, tol, tol.ctrb_rel) == N for z in zs)


def finite_pencil_eigenvalues(E, A):
    """Finite generalized eigenvalues of ``zE - A``."""
    if E.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    ab = spla.eigvals(A, E, homogeneous_eigvals=True)
    alpha, beta = ab[0], ab[1]
    finite = np.abs(beta) > np.sqrt(matlin.EPS) * np.abs(alpha)
    return alpha[finite] / beta[finite]


def descriptor_minimality(d, tol=DEFAULT_TOL, n_probes=10, seed=PROBE_SEED):
    """Check the five rank conditions for minimality of ``D + C.T (zE - A)^{-1} B``.

    Conditions (i) and (iii) can only fail at generalized eigenvalues of the
    pencil; they are evaluated there and at ``n_probes`` random points.
    """
    E, A, B, C = d.E, d.A, d.B, d.C
    N = d.N
    if not pencil_is_regular(E, A, tol):
        raise DomainError("descriptor pencil (E, A) is not regular")
    rng = np.random.default_rng(seed)
    eigs = list(finite_pencil_eigenvalues(E, A))
    probes = eigs + list(rng.normal(size=n_probes) + 1j * rng.normal(size=n_probes))

    def rank(X):
        return matlin.rank_svd(X, tol, tol.ctrb_rel)

    ranks_i = [rank(np.hstack([z * E - A, B])) for z in probes]
    ranks_iii = [rank(np.hstack([z * E.T - A.T, C])) for z in probes]
    rank_ii = rank(np.hstack([E, B]))
    rank_iv = rank(np.hstack([E.T, C]))
    kerE = matlin.null_space(E, tol)
    if kerE.shape[1] and N:
        imE = matlin.range_basis(E, tol)
        AK = A @ kerE
        resid = matlin.norm2(AK - imE @ (imE.T @ AK))
    else:
        resid = 0.0
    cond_v = resid <= tol.eq_rel * (1.0 + matlin.norm2(A))
    conditions = {
        "i": min(ranks_i, default=N) == N,
        "ii": rank_ii == N,
        "iii": min(ranks_iii, default=N) == N,
        "iv": rank_iv == N,
        "v": bool(cond_v),
    }
    details = {
        "N": N,
        "min_rank_i": int(min(ranks_i, default=N)),
        "rank_ii": int(rank_ii),
        "min_rank_iii": int(min(ranks_iii, default=N)),
        "rank_iv": int(rank_iv),
        "residual_v": float(resid),
        "pencil_eigenvalues_checked": len(eigs),
    }
    return MinimalityReport(conditions, details, probes)


__all__ = [
    "LiftResult",
    "MinimalityReport",
    "ValidationReport",
    "controllability_gramian",
    "controllability_hautus",
    "controllability_matrix",
    "descriptor_minimality",
    "finite_pencil_eigenvalues",
    "foster_to_state_space",
    "lift_factorization",
    "pencil_is_regular",
    "residue_multiplicity",
    "state_space_to_foster",
    "state_space_to_weierstrass",
]
