"""Representations of lossless positive real (PRO) matrix functions.

Three representations are supported:

* :class:`FosterForm` -- ``F(z) = zQ + R + sum_j (z Q_j + R_j) / (z**2 + w_j**2)``
* :class:`StateSpaceRealization` -- ``F(z) = zM + D + B.T (zI - A)^{-1} B``
* :class:`DescriptorRealization` -- ``F(z) = D + C.T (zE - A)^{-1} B``

together with pointwise evaluation and validators that report, rather than
raise, when a defining condition fails.
"""

from dataclasses import dataclass, field

import numpy as np

from prokit import matlin
from prokit.errors import PoleProximityError, StructuralError
from prokit.matlin import DEFAULT_TOL, as_real_matrix

POLE_REL = 1e-8


@dataclass(frozen=True)
class FosterTerm:
    """One resonant term ``(z Qj + Rj) / (z**2 + omega**2)``."""

    omega: float
    Qj: np.ndarray
    Rj: np.ndarray

    def __post_init__(self):
        Qj = as_real_matrix(self.Qj, "Qj")
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "Qj", Qj)
        object.__setattr__(self, "Rj", as_real_matrix(self.Rj, "Rj", Qj.shape))
        if Qj.shape[0] != Qj.shape[1]:
            raise StructuralError(f"Qj must be square, got {Qj.shape}")
        if not np.isfinite(self.omega):
            raise StructuralError("omega must be finite")


@dataclass(frozen=True)
class FosterForm:
    """Partial fraction data ``(Q, R, terms)``."""

    Q: np.ndarray
    R: np.ndarray
    terms: tuple = ()

    def __post_init__(self):
        Q = as_real_matrix(self.Q, "Q")
        if Q.shape[0] != Q.shape[1]:
            raise StructuralError(f"Q must be square, got {Q.shape}")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", as_real_matrix(self.R, "R", Q.shape))
        terms = tuple(self.terms)
        for j, t in enumerate(terms):
            if not isinstance(t, FosterTerm):
                raise StructuralError(f"term {j} is not a FosterTerm")
            if t.Qj.shape != Q.shape:
                raise StructuralError(f"term {j} has shape {t.Qj.shape}, expected {Q.shape}")
        object.__setattr__(self, "terms", terms)

    @property
    def m(self):
        return self.Q.shape[0]

    @property
    def omegas(self):
        return [t.omega for t in self.terms]


def merge_terms(f, tol=DEFAULT_TOL):
    """Combine terms with (numerically) equal frequencies; sort by decreasing omega.

    Frequencies within ``rank_rel * max(1, omega_max)`` are merged by summing
    their residue matrices. The merged frequency is the mean of the group.
    """
    if not f.terms:
        return f
    terms = sorted(f.terms, key=lambda t: -t.omega)
    omegas = np.array([t.omega for t in terms])
    gap = tol.rank_rel * max(1.0, float(np.abs(omegas).max()))
    merged = []
    for group in matlin.cluster_sorted(-omegas, gap):
        ts = [terms[i] for i in group]
        merged.append(
            FosterTerm(
                float(np.mean([t.omega for t in ts])),
                sum(t.Qj for t in ts),
                sum(t.Rj for t in ts),
            )
        )
    return FosterForm(f.Q, f.R, tuple(merged))


@dataclass(frozen=True)
class StateSpaceRealization:
    """``F(z) = zM + D + B.T (zI - A)^{-1} B`` with ``A`` n x n, ``B`` n x m."""

    M: np.ndarray
    D: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        M = as_real_matrix(self.M, "M")
        if M.shape[0] != M.shape[1]:
            raise StructuralError(f"M must be square, got {M.shape}")
        m = M.shape[0]
        B = np.asarray(self.B, dtype=float)
        if B.size == 0:
            B = B.reshape(0, m) if B.ndim != 2 or B.shape[1] != m else B
        B = as_real_matrix(B, "B")
        if B.shape[1] != m:
            raise StructuralError(f"B has {B.shape[1]} columns, expected {m}")
        n = B.shape[0]
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "D", as_real_matrix(self.D, "D", (m, m)))
        object.__setattr__(self, "A", as_real_matrix(self.A, "A", (n, n)))
        object.__setattr__(self, "B", B)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.M.shape[0]


@dataclass(frozen=True)
class DescriptorRealization:
    """``F(z) = D + C.T (zE - A)^{-1} B`` with an N x N pencil and m ports."""

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        D = as_real_matrix(self.D, "D")
        m = D.shape[1]
        E = np.asarray(self.E, dtype=float)
        if E.size == 0:
            E = E.reshape(0, 0)
        E = as_real_matrix(E, "E")
        N = E.shape[0]
        object.__setattr__(self, "E", as_real_matrix(E, "E", (N, N)))
        object.__setattr__(self, "A", as_real_matrix(self.A, "A", (N, N)))
        object.__setattr__(self, "B", as_real_matrix(self.B, "B", (N, m)))
        object.__setattr__(self, "C", as_real_matrix(self.C, "C", (N, D.shape[0])))
        object.__setattr__(self, "D", D)

    @property
    def N(self):
        return self.E.shape[0]

    @property
    def m(self):
        return self.D.shape[0]


@dataclass
class Violation:
    condition: str
    location: str
    residual: float


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def add(self, condition, location, residual):
        self.violations.append(Violation(condition, location, float(residual)))

    def extend(self, other):
        self.violations.extend(other.violations)

    def to_dict(self):
        return {
            "passed": self.passed,
            "violations": [
                {"condition": v.condition, "location": v.location, "residual": v.residual}
                for v in self.violations
            ],
        }

    def __str__(self):
        if self.passed:
            return "passed"
        lines = ["failed:"]
        for v in self.violations:
            lines.append(f"  {v.condition} at {v.location} (residual {v.residual:.3e})")
        return "\n".join(lines)


# -- evaluation -------------------------------------------------------------


def eval_foster(f, z):
    """Evaluate a Foster form at the complex point ``z``."""
    z = complex(z)
    out = z * f.Q + f.R + 0j
    for t in f.terms:
        den = z * z + t.omega**2
        if abs(den) <= POLE_REL * (1.0 + abs(z) ** 2):
            raise PoleProximityError(f"z={z} is at the pole pair +-i{t.omega}", omega=t.omega)
        out = out + (z * t.Qj + t.Rj) / den
    return out


def _solve_pencil(P, rhs, z, tol):
    if P.shape[0] == 0:
        return np.zeros((0, rhs.shape[1]), dtype=complex)
    s = np.linalg.svd(P, compute_uv=False)
    if s[-1] <= tol.eq_rel * max(1.0, s[0]):
        raise PoleProximityError(f"z={z} is (numerically) a pole: pencil is singular")
    return np.linalg.solve(P, rhs)


def eval_state_space(r, z, tol=DEFAULT_TOL):
    """Evaluate ``zM + D + B.T (zI - A)^{-1} B``."""
    z = complex(z)
    X = _solve_pencil(z * np.eye(r.n) - r.A, r.B.astype(complex), z, tol)
    return z * r.M + r.D + r.B.T @ X


def eval_descriptor(d, z, tol=DEFAULT_TOL):
    """Evaluate ``D + C.T (zE - A)^{-1} B``."""
    z = complex(z)
    X = _solve_pencil(z * d.E - d.A, d.B.astype(complex), z, tol)
    return d.D + d.C.T @ X


def evaluate(obj, z, tol=DEFAULT_TOL):
    """Dispatch evaluation on any of the three representations."""
    if isinstance(obj, FosterForm):
        return eval_foster(obj, z)
    if isinstance(obj, StateSpaceRealization):
        return eval_state_space(obj, z, tol)
    if isinstance(obj, DescriptorRealization):
        return eval_descriptor(obj, z, tol)
    raise StructuralError(f"cannot evaluate object of type {type(obj).__name__}")


# -- validation -------------------------------------------------------------


def _check_psd(report, S, name, location, tol):
    res = matlin.symmetry_residual(S)
    if res > tol.eq_rel:
        report.add(f"{name} symmetric", location, res)
        return
    S = matlin.sym_part(S)
    if S.shape[0]:
        lam = float(np.linalg.eigvalsh(S)[0])
        if lam < matlin.psd_floor(S, tol):
            report.add(f"{name} positive semidefinite", location, -lam)


def _check_skew(report, X, name, location, tol):
    res = matlin.skewness_residual(X)
    if res > tol.eq_rel:
        report.add(f"{name} skew-symmetric", location, res)


def check_residue_dominance(omega, Qj, Rj, tol=DEFAULT_TOL):
    """Return ``(ok, residual)`` for ``-omega Qj <= i Rj <= omega Qj``."""
    S = omega * matlin.sym_part(Qj)
    T = matlin.skew_part(Rj)
    lo = min(matlin.min_eig_hermitian_pair(S, T), matlin.min_eig_hermitian_pair(S, -T))
    return lo >= matlin.psd_floor(S, tol), max(0.0, -lo)


def validate_foster(f, tol=DEFAULT_TOL):
    """Check the coefficient conditions that make a Foster form lossless positive real."""
    report = ValidationReport()
    _check_psd(report, f.Q, "Q", "linear term", tol)
    _check_skew(report, f.R, "R", "constant term", tol)
    for j, t in enumerate(f.terms):
        loc = f"term {j} (omega={t.omega:g})"
        if t.omega < 0:
            report.add("omega nonnegative", loc, -t.omega)
        before = len(report.violations)
        _check_psd(report, t.Qj, "Qj", loc, tol)
        _check_skew(report, t.Rj, "Rj", loc, tol)
        if len(report.violations) > before or t.omega < 0:
            continue
        if t.omega == 0.0:
            size = matlin.norm2(t.Rj)
            if size > tol.psd_abs * (1.0 + matlin.norm2(t.Qj)):
                report.add("R_j must vanish at omega=0", loc, size)
            continue
        ok, res = check_residue_dominance(t.omega, t.Qj, t.Rj, tol)
        if not ok:
            report.add("residue dominance -omega Qj <= i Rj <= omega Qj", loc, res)
    return report


def validate_realization(r, tol=DEFAULT_TOL):
    """Check ``M >= 0``, ``A`` and ``D`` skew and ``(A, B)`` controllable."""
    from prokit.realize import controllability_hautus

    report = ValidationReport()
    _check_psd(report, r.M, "M", "M", tol)
    _check_skew(report, r.D, "D", "D", tol)
    _check_skew(report, r.A, "A", "A", tol)
    if r.n and not controllability_hautus(r.A, r.B, tol):
        report.add("(A, B) controllable", "A, B", controllability_margin(r.A, r.B))
    return report


def controllability_margin(A, B):
    """Smallest ``sigma_min([A - lam I, B]) / sigma_max`` over the eigenvalues of A."""
    n = A.shape[0]
    if n == 0:
        return np.inf
    worst = np.inf
    for lam in np.linalg.eigvals(A):
        s = matlin.singular_values(np.hstack([A - lam * np.eye(n), B]))
        if s[0] == 0:
            return 0.0
        ratio = s[n - 1] / s[0] if s.size >= n else 0.0
        worst = min(worst, ratio)
    return float(worst)


SAMPLE_SEED = 20200615


def default_samples(count=50, seed=SAMPLE_SEED):
    """Quasi-random points with ``Re z in (0, 10]`` and ``|Im z| <= 10``."""
    from scipy.stats import qmc

    pts = qmc.Halton(d=2, seed=seed).random(count)
    return list((1e-3 + (10 - 1e-3) * pts[:, 0]) + 1j * (20 * pts[:, 1] - 10))


def default_axis_samples(count=20, seed=SAMPLE_SEED):
    rng = np.random.default_rng(seed)
    return list(rng.uniform(-10, 10, size=count))


def check_pro_sampling(F, samples=None, axis_samples=None, tol=DEFAULT_TOL):
    """Sample the defining conditions of a lossless positive real function.

    ``F`` is a callable ``z -> m x m complex array``. This only tests necessary
    conditions: positive Hermitian part on the right half plane, realness on
    the real line and skew-Hermitian values on the imaginary axis. Sample points
    that hit a pole are skipped.
    """
    samples = default_samples() if samples is None else samples
    axis_samples = default_axis_samples() if axis_samples is None else axis_samples
    report = ValidationReport()
    for z in samples:
        try:
            Fz = np.asarray(F(z))
        except PoleProximityError:
            continue
        H = (Fz + Fz.conj().T) / 2
        lam = float(np.linalg.eigvalsh(H)[0]) if H.size else 0.0
        if lam < -tol.psd_abs * (1.0 + matlin.norm2(Fz)):
            report.add("Re F(z) >= 0 for Re z > 0", f"z={complex(z):.6g}", -lam)
    for t in axis_samples:
        t = float(t)
        try:
            Ft = np.asarray(F(t))
            imag = matlin.norm2(Ft.imag)
            if imag > tol.eq_rel * (1.0 + matlin.norm2(Ft)):
                report.add("F(t) real for real t", f"t={t:.6g}", imag)
        except PoleProximityError:
            pass
        try:
            Fi = np.asarray(F(1j * t))
            odd = matlin.norm2(Fi + Fi.conj().T)
            if odd > tol.eq_rel * (1.0 + matlin.norm2(Fi)):
                report.add("F(it) + F(it)* = 0", f"t={t:.6g}", odd)
        except PoleProximityError:
            pass
    return report
