"""Random lossless PR functions for testing and for ``prokit generate``.

Residues are built as ``Qj = Bj.T Bj`` and ``Rj = Bj.T Aj Bj`` with
``Aj = omega_j [[0, I], [-I, 0]]``, so the dominance condition holds by
construction.
"""

import numpy as np

from prokit import matlin
from prokit.core import FosterForm, FosterTerm, StateSpaceRealization

DEFAULT_SEED = 0


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(DEFAULT_SEED if seed_or_rng is None else seed_or_rng)


def random_psd(m, rank, rng):
    K = rng.standard_normal((rank, m))
    return matlin.sym_part(K.T @ K)


def random_skew(m, rank, rng):
    """Random real skew matrix of rank ``2 * (rank // 2)``."""
    k = rank // 2
    Y = rng.standard_normal((m, 2 * k))
    return matlin.skew_part(Y @ matlin.rotation_block(1.0, k) @ Y.T)


def random_residue(omega, m, rng, q=None):
    """``(Qj, Rj)`` from a random ``2q x m`` factor; ``q`` defaults to a random size."""
    q = int(rng.integers(1, m + 1)) if q is None else q
    Bj = rng.standard_normal((2 * q, m))
    Aj = matlin.rotation_block(omega, q)
    return matlin.sym_part(Bj.T @ Bj), matlin.skew_part(Bj.T @ Aj @ Bj)


def random_foster(m, terms, seed=None):
    """Random Foster form with ``terms`` resonant terms at distinct frequencies in (0, 8)."""
    rng = _rng(seed)
    gaps = rng.uniform(0.3, 1.5, size=terms)
    omegas = np.cumsum(gaps)
    out = []
    for w in omegas:
        Qj, Rj = random_residue(float(w), m, rng)
        out.append(FosterTerm(float(w), Qj, Rj))
    Q = random_psd(m, int(rng.integers(0, m + 1)), rng)
    R = random_skew(m, int(rng.integers(0, m + 1)), rng)
    return FosterForm(Q, R, tuple(out))


def random_state_space(n, m, rank_M=None, rank_D=None, seed=None):
    """Random realization with skew ``A``, ``D`` and PSD ``M`` (controllable almost surely)."""
    rng = _rng(seed)
    X = rng.standard_normal((n, n))
    rank_M = int(rng.integers(0, m + 1)) if rank_M is None else rank_M
    rank_D = int(rng.integers(0, m + 1)) if rank_D is None else rank_D
    return StateSpaceRealization(
        random_psd(m, rank_M, rng),
        random_skew(m, rank_D, rng),
        matlin.skew_part(X),
        rng.standard_normal((n, m)),
    )
