"""Poles, zeros and eigenvalue interlacing for lossless PR functions.

Poles on the imaginary axis are reported by their nonnegative frequency
``omega`` (standing for the pair ``+-i omega``) or by ``math.inf``. Zeros are
the poles of the inverse.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from prokit import matlin
from prokit.invert import decompose_input_space, inverse_state_space, invertibility_witness
from prokit.errors import DomainError
from prokit.matlin import DEFAULT_TOL
from prokit.realize import residue_multiplicity

SLACK_TOL = 1e-10


def hermitian_spectrum(A):
    """Ascending eigenvalues of ``iA`` for a real skew ``A``."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(1j * matlin.skew_part(A))


def spectrum_asymmetry(eigs):
    """``max |lambda_j + lambda_{k+1-j}|``; zero for spectra mirrored in 0."""
    eigs = np.sort(np.asarray(eigs, dtype=float))
    if eigs.size == 0:
        return 0.0
    return float(np.max(np.abs(eigs + eigs[::-1])))


def _cluster_gap(eigs, tol):
    top = float(np.max(np.abs(eigs), initial=0.0))
    return tol.eq_rel * (1.0 + top)


def _locations(A, tol):
    """``[(omega, multiplicity), ...]`` for the eigenvalues of ``A``, omega ascending."""
    lam = hermitian_spectrum(A)
    if lam.size == 0:
        return []
    gap = _cluster_gap(lam, tol)
    out = []
    n_zero = int(np.sum(np.abs(lam) <= gap))
    if n_zero:
        out.append((0.0, n_zero))
    pos = lam[lam > gap]
    for group in matlin.cluster_sorted(pos, gap):
        out.append((float(pos[group].mean()), len(group)))
    return out


def pole_report(r, tol=DEFAULT_TOL):
    """Poles of a minimal realization with their multiplicities.

    A finite pole ``omega`` has multiplicity ``dim Ker(A - i omega I)``; the
    multiplicity of the pole at infinity is ``rank M``.
    """
    poles = _locations(r.A, tol)
    k = matlin.rank_svd(r.M, tol)
    if k:
        poles.append((math.inf, k))
    return poles


def zero_report(r, tol=DEFAULT_TOL):
    """Zeros of ``F``, i.e. the poles of the minimal inverse realization."""
    return pole_report(inverse_state_space(r, tol), tol)


@dataclass
class PoleZeroReport:
    """Poles and zeros as ``(omega, multiplicity)`` lists.

    ``colocated`` lists the frequencies that are both a pole and a zero (within
    the clustering tolerance); both multiplicities are kept.
    """

    poles: list
    zeros: list
    m: int
    colocated: list = field(default_factory=list)

    def to_dict(self):
        def enc(items):
            return [
                {"omega": "inf" if math.isinf(w) else w, "multiplicity": k} for w, k in items
            ]

        return {
            "m": self.m,
            "poles": enc(self.poles),
            "zeros": enc(self.zeros),
            "colocated": ["inf" if math.isinf(w) else w for w in self.colocated],
        }

    def __str__(self):
        def fmt(w):
            return "inf" if math.isinf(w) else f"{w:.6f}"

        lines = [f"ports: {self.m}", "poles (omega, multiplicity):"]
        lines += [f"  {fmt(w)}  {k}" for w, k in self.poles]
        lines.append("zeros (omega, multiplicity):")
        lines += [f"  {fmt(w)}  {k}" for w, k in self.zeros]
        if self.colocated:
            lines.append("pole/zero co-located at: " + ", ".join(fmt(w) for w in self.colocated))
        return "\n".join(lines)


def pole_zero_report(r, tol=DEFAULT_TOL):
    poles = pole_report(r, tol)
    zeros = zero_report(r, tol)
    finite = [w for w, _ in poles + zeros if not math.isinf(w)]
    gap = _cluster_gap(np.array(finite), tol)
    colocated = []
    for w, _ in poles:
        for v, _ in zeros:
            same = (math.isinf(w) and math.isinf(v)) or (
                not math.isinf(w) and not math.isinf(v) and abs(w - v) <= gap
            )
            if same:
                colocated.append(w)
                break
    return PoleZeroReport(poles, zeros, r.m, colocated)


def foster_pole_multiplicity(term, tol=DEFAULT_TOL):
    """Pole multiplicity of ``omega_j`` read off from one Foster term."""
    return residue_multiplicity(term.omega, term.Qj, term.Rj, tol)


# -- interlacing --------------------------------------------------------------


def _ev(eigs, j):
    """``lambda_j`` (1-based) with the convention -inf below 1 and +inf above k."""
    if j < 1:
        return -math.inf
    if j > len(eigs):
        return math.inf
    return float(eigs[j - 1])


def _slack(lo, hi):
    """``hi - lo`` for the claim ``lo <= hi``; +inf when the claim is vacuous."""
    if lo == -math.inf or hi == math.inf:
        return math.inf
    if lo == math.inf or hi == -math.inf:
        return -math.inf
    return hi - lo


@dataclass
class InterlaceReport:
    """Checked eigenvalue inequalities between ``iA`` and ``iA_inv``.

    ``inequality_results`` holds ``(j, family, holds, slack)`` for every
    non-vacuous instance; ``between_results`` holds
    ``(kind, lower, upper, count, holds)`` for the counting statements.
    """

    eigs_A: list
    eigs_Ainv: list
    m1: int
    m2: int
    m3: int
    inequality_results: list = field(default_factory=list)
    between_results: list = field(default_factory=list)

    @property
    def m(self):
        return self.m1 + self.m2 + self.m3

    @property
    def passed(self):
        return all(h for _, _, h, _ in self.inequality_results) and all(
            b[-1] for b in self.between_results
        )

    @property
    def min_slack(self):
        return min((s for _, _, _, s in self.inequality_results), default=math.inf)

    def to_dict(self):
        return {
            "passed": self.passed,
            "m1": self.m1,
            "m2": self.m2,
            "m3": self.m3,
            "eigs_A": list(map(float, self.eigs_A)),
            "eigs_Ainv": list(map(float, self.eigs_Ainv)),
            "inequalities": [
                {"j": j, "family": f, "holds": h, "slack": s}
                for j, f, h, s in self.inequality_results
            ],
            "between": [
                {"kind": k, "lower": lo, "upper": hi, "count": c, "holds": h}
                for k, lo, hi, c, h in self.between_results
            ],
        }

    def __str__(self):
        bad = [x for x in self.inequality_results if not x[2]]
        bad_between = [b for b in self.between_results if not b[-1]]
        lines = [
            f"split m1={self.m1} m2={self.m2} m3={self.m3}",
            "spectrum iA:     " + " ".join(f"{x:.6f}" for x in self.eigs_A),
            "spectrum iA_inv: " + " ".join(f"{x:.6f}" for x in self.eigs_Ainv),
            f"inequalities checked: {len(self.inequality_results)}, violated: {len(bad)}",
            f"interval counts checked: {len(self.between_results)}, violated: {len(bad_between)}",
        ]
        for j, fam, _, s in bad:
            lines.append(f"  violated {fam} at j={j} (slack {s:.3e})")
        for kind, lo, hi, c, _ in bad_between:
            lines.append(f"  {c} {kind} in ({lo:.6f}, {hi:.6f}) exceeds {self.m}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _distinct(eigs, gap):
    return [float(np.mean(eigs[g])) for g in matlin.cluster_sorted(eigs, gap)]


def _count_between(points, eigs, gap, m, kind):
    out = []
    for lo, hi in zip(points[:-1], points[1:]):
        c = int(np.sum((eigs > lo + gap) & (eigs < hi - gap)))
        out.append((kind, lo, hi, c, c <= m))
    return out


def interlace_check(eigs_A, eigs_Ainv, m1, m2, m3, atol):
    """Evaluate the interlacing inequalities for given spectra and split."""
    a = np.sort(np.asarray(eigs_A, dtype=float))
    b = np.sort(np.asarray(eigs_Ainv, dtype=float))
    h = m2 // 2
    results = []
    top = max(len(a), len(b)) + h + max(m1, m3) + 1
    for j in range(0, top + 1):
        claims = (
            ("inv[j-h-m3] <= A[j]", _ev(b, j - h - m3), _ev(a, j)),
            ("A[j] <= A[j+1]", _ev(a, j), _ev(a, j + 1)),
            ("A[j+1] <= inv[j+h+m1+1]", _ev(a, j + 1), _ev(b, j + h + m1 + 1)),
            ("A[j-h-m1] <= inv[j]", _ev(a, j - h - m1), _ev(b, j)),
            ("inv[j] <= inv[j+1]", _ev(b, j), _ev(b, j + 1)),
            ("inv[j+1] <= A[j+h+m3+1]", _ev(b, j + 1), _ev(a, j + h + m3 + 1)),
        )
        for fam, lo, hi in claims:
            s = _slack(lo, hi)
            if s != math.inf:
                results.append((j, fam, bool(s >= -atol), float(s)))
    m = m1 + m2 + m3
    between = _count_between(_distinct(a, atol), b, atol, m, "zeros")
    between += _count_between(_distinct(b, atol), a, atol, m, "poles")
    return results, between


def interlace_verify(r, tol=DEFAULT_TOL):
    """Compare the spectra of ``iA`` and ``iA_inv`` for a minimal realization."""
    if invertibility_witness(r, tol) is not None:
        raise DomainError("F is not invertible")
    dec = decompose_input_space(r.M, r.D, r.B, tol)
    inv = inverse_state_space(r, tol, dec=dec)
    a = hermitian_spectrum(r.A)
    b = hermitian_spectrum(inv.A)
    atol = _cluster_gap(np.concatenate([a, b]), tol)
    results, between = interlace_check(a, b, dec.m1, dec.m2, dec.m3, atol)
    return InterlaceReport(list(a), list(b), dec.m1, dec.m2, dec.m3, results, between)


# -- classical eigenvalue inequalities ---------------------------------------------


def _herm(X):
    X = np.asarray(X, dtype=complex)
    return (X + X.conj().T) / 2


def weyl_slacks(M, N):
    """Slacks of Weyl's two-sided inequality over all ``1 <= j, k <= m``."""
    M, N = _herm(M), _herm(N)
    m = M.shape[0]
    lm, ln, ls = (np.linalg.eigvalsh(X) for X in (M, N, M + N))
    out = []
    for j in range(1, m + 1):
        for k in range(1, m + 1):
            mid = lm[j - 1] + ln[k - 1]
            out.append(_slack(_ev(ls, j + k - m), mid))
            out.append(_slack(mid, _ev(ls, j + k - 1)))
    return out


def inertia_slacks(M, N, tol=SLACK_TOL):
    """Slacks of the Weyl bounds phrased through the inertia of ``N``."""
    M, N = _herm(M), _herm(N)
    m = M.shape[0]
    ln = np.linalg.eigvalsh(N)
    scale = 1.0 + float(np.max(np.abs(ln), initial=0.0))
    r_plus = int(np.sum(ln > tol * scale))
    r_minus = int(np.sum(ln < -tol * scale))
    lm, ls = np.linalg.eigvalsh(M), np.linalg.eigvalsh(M + N)
    out = []
    for j in range(0, m + 1):
        out.append(_slack(_ev(ls, j - r_plus), _ev(lm, j)))
        out.append(_slack(_ev(lm, j), _ev(ls, j + r_minus)))
        out.append(_slack(_ev(lm, j - r_minus), _ev(ls, j)))
        out.append(_slack(_ev(ls, j), _ev(lm, j + r_plus)))
    return out


def cauchy_slacks(H, k):
    """Slacks of ``lambda_j(H) <= lambda_j(M) <= lambda_{j+k}(H)`` with ``M`` the
    leading principal block of size ``len(H) - k``."""
    H = _herm(H)
    size = H.shape[0] - k
    if size < 0:
        raise DomainError("block size exceeds matrix size")
    lh = np.linalg.eigvalsh(H)
    lm = np.linalg.eigvalsh(H[:size, :size]) if size else np.zeros(0)
    out = []
    for j in range(0, size + 1):
        out.append(_slack(_ev(lh, j), _ev(lm, j)))
        out.append(_slack(_ev(lm, j), _ev(lh, j + k)))
    return out


def _holds(slacks, tol):
    return all(s >= -tol for s in slacks)


def eig_perturbation_bounds(M, N, tol=SLACK_TOL):
    """Weyl's inequality and its inertia form for Hermitian ``M`` and ``N``."""
    return _holds(weyl_slacks(M, N), tol) and _holds(inertia_slacks(M, N, tol), tol)


def cauchy_interlacing(H, k, tol=SLACK_TOL):
    """Cauchy interlacing for the leading ``len(H) - k`` principal block of ``H``."""
    return _holds(cauchy_slacks(H, k), tol)
