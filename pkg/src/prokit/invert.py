"""Explicit realizations of the inverse ``F(z)^{-1}`` of a lossless PR function.

All constructions start from a realization ``zM + D + B.T (zI - A)^{-1} B``.
The input space is split as ``X1 + X2 + X3`` with ``X1 = (Ker M)^perp`` and
``X3`` the kernel of ``D`` compressed to ``Ker M``; the formulas are applied in
that basis and mapped back to the original coordinates at the end.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from prokit import matlin
from prokit.core import DescriptorRealization, StateSpaceRealization
from prokit.errors import DegeneracyError, DomainError
from prokit.matlin import DEFAULT_TOL

RANK_GAP = 10.0


def _inv(X):
    if X.size == 0:
        return np.zeros(X.shape[::-1])
    return np.linalg.inv(X)


def _split_rank(values, threshold, what):
    """Count ``values`` (descending) above ``threshold``, enforcing a clear gap."""
    r = int(np.sum(values > threshold))
    if 0 < r < len(values) and values[r - 1] < RANK_GAP * values[r]:
        raise DegeneracyError(
            f"ambiguous rank for {what}: kept {values[r - 1]:.3e} vs discarded {values[r]:.3e}"
        )
    return r


@dataclass(frozen=True)
class InputSpaceDecomposition:
    """Orthogonal split of the input space and the matching blocks.

    ``V = [V1 V2 V3]`` is orthogonal with column blocks spanning ``X1``, ``X2``,
    ``X3``. In that basis ``M = diag(M1, 0, 0)`` and
    ``D = [[D11, D12, D13], [-D12.T, D22, 0], [-D13.T, 0, 0]]``; ``B1, B2, B3``
    are the matching column blocks of ``B V``.
    """

    m1: int
    m2: int
    m3: int
    V: np.ndarray
    M1: np.ndarray
    D11: np.ndarray
    D12: np.ndarray
    D13: np.ndarray
    D22: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    B3: np.ndarray
    K1: np.ndarray
    Xi: np.ndarray
    residual: float = 0.0

    @property
    def m(self):
        return self.m1 + self.m2 + self.m3


def decompose_input_space(M, D, B, tol=DEFAULT_TOL):
    M = matlin.require_symmetric(M, tol, "M")
    D = matlin.require_skew(D, tol, "D")
    B = np.asarray(B, dtype=float)
    m = M.shape[0]
    if m == 0:
        raise DomainError("empty input space")
    lam, W = np.linalg.eigh(M)
    order = np.argsort(lam)[::-1]
    lam, W = lam[order], W[:, order]
    if lam[-1] < matlin.psd_floor(M, tol):
        raise DomainError("M is not positive semidefinite")
    scale_M = max(lam[0], 0.0)
    m1 = _split_rank(np.abs(lam), tol.rank_rel * scale_M * m, "M") if scale_M > 0 else 0
    V1, N = W[:, :m1], W[:, m1:]
    Dk = matlin.skew_part(N.T @ D @ N)
    if Dk.size:
        _, s, Wh = np.linalg.svd(Dk)
        scale_D = matlin.norm2(D)
        r2 = _split_rank(s, tol.rank_rel * scale_D * m, "D on Ker M") if scale_D > 0 else 0
        if r2 % 2:
            raise DegeneracyError(f"compressed D has odd numerical rank {r2}")
        V2, V3 = N @ Wh[:r2].T, N @ Wh[r2:].T
    else:
        V2, V3 = N[:, :0], N[:, :0]
    m2, m3 = V2.shape[1], V3.shape[1]
    V = np.hstack([V1, V2, V3])
    s1, s2, s3 = slice(0, m1), slice(m1, m1 + m2), slice(m1 + m2, m)
    Mt = matlin.sym_part(V.T @ M @ V)
    Dt = matlin.skew_part(V.T @ D @ V)
    Bt = B @ V
    residual = max(
        matlin.norm2(Mt[m1:, :]),
        matlin.norm2(Dt[s2, s3]),
        matlin.norm2(Dt[s3, s3]),
    )
    M1 = Mt[s1, s1]
    return InputSpaceDecomposition(
        m1=m1,
        m2=m2,
        m3=m3,
        V=V,
        M1=M1,
        D11=Dt[s1, s1],
        D12=Dt[s1, s2],
        D13=Dt[s1, s3],
        D22=Dt[s2, s2],
        B1=Bt[:, s1],
        B2=Bt[:, s2],
        B3=Bt[:, s3],
        K1=matlin.sqrtm_psd(M1),
        Xi=np.eye(m3),
        residual=float(residual),
    )


def _restricted_map(r, tol):
    """``[B; D]`` restricted to ``Ker M`` and the kernel basis used."""
    M = matlin.require_symmetric(r.M, tol, "M")
    lam, W = np.linalg.eigh(M)
    scale = max(float(lam.max(initial=0.0)), 0.0)
    kernel = W[:, np.abs(lam) <= tol.rank_rel * scale * max(r.m, 1)]
    return np.vstack([r.B, r.D]) @ kernel, kernel


def invertibility_witness(r, tol=DEFAULT_TOL):
    """A unit vector ``u`` with ``F(z) u == 0`` for all z, or ``None`` if F is invertible."""
    X, kernel = _restricted_map(r, tol)
    if kernel.shape[1] == 0:
        return None
    scale = max(matlin.norm2(r.B), matlin.norm2(r.D), matlin.norm2(r.M))
    _, s, Vh = np.linalg.svd(X)
    s = np.concatenate([s, np.zeros(kernel.shape[1] - s.size)])
    if scale > 0 and s[-1] > tol.rank_rel * scale * max(X.shape):
        return None
    return kernel @ Vh[-1]


def invertibility(r, tol=DEFAULT_TOL):
    """``det F(z)`` is not identically zero iff ``[B; D]`` is injective on ``Ker M``."""
    return invertibility_witness(r, tol) is None


def regular_pair_check(Ehat, Ahat, tol=DEFAULT_TOL):
    """Regularity of ``(Ehat, Ahat)`` for ``Ehat >= 0`` and skew ``Ahat``.

    The pencil is regular iff ``Ahat`` is injective on ``Ker Ehat``.
    """
    Ehat = matlin.require_symmetric(Ehat, tol, "Ehat")
    Ahat = matlin.require_skew(Ahat, tol, "Ahat")
    kernel = matlin.null_space(Ehat, tol)
    if kernel.shape[1] == 0:
        return True
    X = Ahat @ kernel
    scale = max(matlin.norm2(Ahat), matlin.norm2(Ehat))
    if scale == 0:
        return False
    s = matlin.singular_values(X)
    return s.size == kernel.shape[1] and s[-1] > tol.rank_rel * scale * max(X.shape)


def _require_invertible(r, tol):
    w = invertibility_witness(r, tol)
    if w is not None:
        raise DomainError(
            "F is not invertible: [B; D] has a kernel on Ker M", witness=w
        )


def inverse_descriptor_raw(r, tol=DEFAULT_TOL):
    """Non-minimal inverse ``[0 I] (z diag(I, M) - [[A, B], [-B.T, -D]])^{-1} [0; I]``."""
    _require_invertible(r, tol)
    n, m = r.n, r.m
    E = spla.block_diag(np.eye(n), r.M)
    A = np.block([[r.A, r.B], [-r.B.T, -r.D]])
    io = np.vstack([np.zeros((n, m)), np.eye(m)])
    return DescriptorRealization(E, A, io, io.copy(), np.zeros((m, m)))


@dataclass(frozen=True)
class IntermediateInverse:
    """Minimal (non-Weierstrass) descriptor realization of ``F^{-1}``.

    ``Ehat = diag(I, 0)``, ``Ahat = [[Atilde, Btilde], [-Btilde.T, 0]]`` and the
    realization is ``Dhat + Bhat.T (z Ehat - Ahat)^{-1} Bhat``, all expressed in
    the split input basis ``V``.
    """

    Atilde: np.ndarray
    Btilde: np.ndarray
    Ehat: np.ndarray
    Ahat: np.ndarray
    Bhat: np.ndarray
    Dhat: np.ndarray
    V: np.ndarray

    def descriptor(self):
        """The realization in the original input coordinates."""
        Bo = self.Bhat @ self.V.T
        return DescriptorRealization(
            self.Ehat, self.Ahat, Bo, Bo.copy(), self.V @ self.Dhat @ self.V.T
        )


def _decomposition(r, dec, tol):
    _require_invertible(r, tol)
    if dec is None:
        dec = decompose_input_space(r.M, r.D, r.B, tol)
    if dec.m != r.m:
        raise DomainError("decomposition does not match the realization")
    return dec


def _tilde(r, dec):
    """The compressed state matrix and input map of the inverse."""
    A = r.A
    K1i = _inv(dec.K1)
    D22i = _inv(dec.D22)
    B1, B2, D11, D12 = dec.B1, dec.B2, dec.D11, dec.D12
    top = np.hstack([A - B2 @ D22i @ B2.T, (B1 + B2 @ D22i @ D12.T) @ K1i])
    bot = np.hstack(
        [K1i.T @ (-B1.T + D12 @ D22i @ B2.T), -K1i.T @ (D11 + D12 @ D22i @ D12.T) @ K1i]
    )
    Atilde = matlin.skew_part(np.vstack([top, bot]))
    Btilde = np.vstack([dec.B3 @ dec.Xi.T, -K1i.T @ dec.D13 @ dec.Xi.T])
    return Atilde, Btilde


def inverse_descriptor_minimal(r, dec=None, tol=DEFAULT_TOL):
    dec = _decomposition(r, dec, tol)
    n = r.n
    m1, m2, m3 = dec.m1, dec.m2, dec.m3
    Atilde, Btilde = _tilde(r, dec)
    K1i = _inv(dec.K1)
    D22i = _inv(dec.D22)
    Ehat = spla.block_diag(np.eye(n + m1), np.zeros((m3, m3)))
    Ahat = np.block([[Atilde, Btilde], [-Btilde.T, np.zeros((m3, m3))]])
    Bhat = np.block(
        [
            [np.zeros((n, m1)), dec.B2 @ D22i, np.zeros((n, m3))],
            [K1i.T, -K1i.T @ dec.D12 @ D22i, np.zeros((m1, m3))],
            [np.zeros((m3, m1)), np.zeros((m3, m2)), dec.Xi],
        ]
    )
    Dhat = spla.block_diag(np.zeros((m1, m1)), D22i, np.zeros((m3, m3)))
    return IntermediateInverse(Atilde, Btilde, Ehat, Ahat, Bhat, Dhat, dec.V)


@dataclass(frozen=True)
class _InverseParts:
    A_inv: np.ndarray
    B_inv: np.ndarray
    K_inv: np.ndarray
    D_inv: np.ndarray
    V: np.ndarray


def _inverse_parts(r, dec, tol):
    dec = _decomposition(r, dec, tol)
    A = r.A
    n = r.n
    m1, m2, m3 = dec.m1, dec.m2, dec.m3
    B1, B2, B3 = dec.B1, dec.B2, dec.B3
    D11, D12, D13 = dec.D11, dec.D12, dec.D13
    K1i = _inv(dec.K1)
    M1i = _inv(dec.M1)
    D22i = _inv(dec.D22)
    Atilde, Btilde = _tilde(r, dec)

    if m3:
        U, s, _ = np.linalg.svd(Btilde)
        scale = max(matlin.norm2(r.B), matlin.norm2(r.D), matlin.norm2(r.M), 1e-300)
        rank = _split_rank(
            np.concatenate([s, np.zeros(1)]), tol.rank_rel * scale * Btilde.shape[0], "Btilde"
        )
        if rank < m3:
            raise DomainError("F is not invertible: Btilde has a kernel")
        Gamma = U[:, m3:]
    else:
        Gamma = np.eye(n + m1)

    Phi33 = matlin.sym_part(B3.T @ B3 + D13.T @ M1i @ D13)
    Phi23 = B2.T @ B3 + D12.T @ M1i @ D13
    P33i = _inv(Phi33)
    top = np.hstack(
        [
            np.zeros((n, m1)),
            B2 @ D22i,
            (A @ B3 - B1 @ M1i @ D13 - B2 @ D22i @ Phi23) @ P33i,
        ]
    )
    bot = np.hstack(
        [
            K1i.T,
            -K1i.T @ D12 @ D22i,
            -K1i.T @ (B1.T @ B3 - D11 @ M1i @ D13 - D12 @ D22i @ Phi23) @ P33i,
        ]
    )
    B_inv = Gamma.T @ np.vstack([top, bot])
    A_inv = matlin.skew_part(Gamma.T @ Atilde @ Gamma)
    K_inv = np.hstack(
        [np.zeros((m3, m1)), np.zeros((m3, m2)), -dec.Xi @ matlin.inv_sqrtm_pd(Phi33)]
        if m3
        else [np.zeros((0, m1 + m2))]
    )
    # Xi.T Btilde.T Atilde Btilde Xi written out in the original blocks
    T = (
        B3.T @ A @ B3
        - B3.T @ B1 @ M1i @ D13
        + D13.T @ M1i @ B1.T @ B3
        - D13.T @ M1i @ D11 @ M1i @ D13
        - Phi23.T @ D22i @ Phi23
    )
    D_inv = np.block(
        [
            [np.zeros((m1, m1)), np.zeros((m1, m2)), -M1i @ D13 @ P33i],
            [np.zeros((m2, m1)), D22i, -D22i @ Phi23 @ P33i],
            [P33i @ D13.T @ M1i, -P33i @ Phi23.T @ D22i, -P33i @ T @ P33i],
        ]
    )
    return _InverseParts(A_inv, B_inv, K_inv, matlin.skew_part(D_inv), dec.V)


def inverse_weierstrass(r, dec=None, tol=DEFAULT_TOL):
    """Minimal Weierstrass descriptor realization of ``F^{-1}``.

    The pencil has size ``n + m1 + m3``: the proper part lives on the
    ``k = n + m1 - m3`` dimensional orthogonal complement of ``Im Btilde``, and
    the ``m3`` dimensional linear term of the inverse is carried by a nilpotent
    block.
    """
    p = _inverse_parts(r, dec, tol)
    k = p.A_inv.shape[0]
    m3 = p.K_inv.shape[0]
    m = r.m
    Iq = np.eye(m3)
    Zq = np.zeros((m3, m3))
    E = spla.block_diag(np.eye(k), np.block([[Zq, Iq], [Zq, Zq]]))
    A = spla.block_diag(p.A_inv, Iq, Iq)
    Bw = np.vstack([p.B_inv, np.zeros((m3, m)), -p.K_inv]) @ p.V.T
    Cw = np.vstack([p.B_inv, p.K_inv, np.zeros((m3, m))]) @ p.V.T
    return DescriptorRealization(E, A, Bw, Cw, p.V @ p.D_inv @ p.V.T)


def inverse_state_space(r, tol=DEFAULT_TOL, dec=None):
    """Minimal realization ``z M_inv + D_inv + B_inv.T (zI - A_inv)^{-1} B_inv`` of ``F^{-1}``.

    The state dimension is ``n + m1 - m3``.
    """
    p = _inverse_parts(r, dec, tol)
    K = p.K_inv @ p.V.T
    return StateSpaceRealization(
        matlin.sym_part(K.T @ K),
        matlin.skew_part(p.V @ p.D_inv @ p.V.T),
        p.A_inv,
        p.B_inv @ p.V.T,
    )
