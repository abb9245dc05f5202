import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import TWO_PORT_ZEROS, two_port, random_realization, rot, z_over_z2_plus_1, z_times_identity
from prokit.core import FosterTerm, StateSpaceRealization
from prokit.errors import DomainError
from prokit.generate import random_residue
from prokit.invert import invertibility
from prokit.realize import lift_factorization
from prokit.spectra import (
    cauchy_interlacing,
    cauchy_slacks,
    eig_perturbation_bounds,
    foster_pole_multiplicity,
    hermitian_spectrum,
    interlace_check,
    interlace_verify,
    pole_report,
    pole_zero_report,
    spectrum_asymmetry,
    weyl_slacks,
    zero_report,
)


def z_plus_resonance():
    """``z + z / (z^2 + 1)`` with zeros at 0 and +-i sqrt(2)."""
    return StateSpaceRealization([[1.0]], [[0.0]], rot(1.0), [[1.0], [0.0]])


def states_from(report):
    return sum(k * (1 if w == 0 else 2) for w, k in report if not math.isinf(w))


class TestPoles:
    def test_example(self):
        got = pole_report(two_port())
        assert [k for _, k in got] == [2, 1, 1, 1, 1]
        np.testing.assert_allclose([w for w, _ in got], [1, 2, 3, 4, 5], atol=1e-12)

    def test_differentiator(self):
        assert pole_report(z_times_identity(3)) == [(math.inf, 3)]

    def test_z_plus_inverse_z(self):
        r = StateSpaceRealization([[1.0]], [[0.0]], np.zeros((1, 1)), [[1.0]])
        assert pole_report(r) == [(0.0, 1), (math.inf, 1)]

    def test_spectrum_symmetric(self):
        eigs = hermitian_spectrum(two_port().A)
        assert spectrum_asymmetry(eigs) <= 1e-12
        np.testing.assert_allclose(eigs, [-5, -4, -3, -2, -1, -1, 1, 1, 2, 3, 4, 5], atol=1e-12)


class TestZeros:
    def test_example(self):
        got = zero_report(two_port())
        assert all(k == 1 for _, k in got[1:]) and len(got) == 6
        found = sorted(w for w, _ in got)
        np.testing.assert_allclose(found, sorted(TWO_PORT_ZEROS), atol=1e-6)
        assert abs(found[3] - 3.00000000000012) <= 1e-6

    def test_resonance(self):
        assert zero_report(z_over_z2_plus_1()) == [(0.0, 1), (math.inf, 1)]

    def test_differentiator(self):
        got = zero_report(z_times_identity(2))
        assert len(got) == 1 and got[0][1] == 2 and abs(got[0][0]) < 1e-12

    def test_colocation_flagged(self):
        rep = pole_zero_report(two_port())
        assert any(abs(w - 3) < 1e-9 for w in rep.colocated)
        assert any(abs(w - 1) < 1e-9 for w in rep.colocated)
        assert "co-located" in str(rep)
        assert rep.to_dict()["m"] == 2


class TestFosterMultiplicity:
    @pytest.mark.parametrize(
        "Qj, Rj, expected",
        [
            (np.zeros((2, 2)), np.zeros((2, 2)), 0),
            (np.eye(2), 2 * np.array([[0, 1], [-1, 0]]), 1),
            (np.eye(2), np.zeros((2, 2)), 2),
            ([[1.0]], [[0.0]], 1),
        ],
    )
    def test_cases(self, Qj, Rj, expected):
        assert foster_pole_multiplicity(FosterTerm(2.0, Qj, Rj)) == expected

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31))
    def test_matches_lift(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 5))
        w = float(rng.uniform(0.5, 3))
        Qj, Rj = random_residue(w, m, rng)
        lift = lift_factorization(w, Qj, Rj)
        assert foster_pole_multiplicity(FosterTerm(w, Qj, Rj)) == lift.q == lift.B.shape[0] // 2


class TestInterlacing:
    def test_example(self):
        rep = interlace_verify(two_port())
        assert rep.passed and (rep.m1, rep.m2, rep.m3) == (0, 2, 0)
        assert rep.min_slack >= -1e-9
        assert "PASS" in str(rep)

    def test_z_plus_resonance(self):
        rep = interlace_verify(z_plus_resonance())
        assert rep.passed
        np.testing.assert_allclose(rep.eigs_Ainv, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-12)

    def test_differentiator(self):
        rep = interlace_verify(z_times_identity(2))
        assert rep.passed and rep.eigs_A == []

    def test_detects_violation(self):
        results, between = interlace_check([-1, 1], [-3, 3], 0, 0, 0, 1e-12)
        assert not all(h for _, _, h, _ in results)

    def test_counts_between(self):
        _, between = interlace_check([-1, 1], [-0.5, 0, 0.2, 0.5], 0, 2, 0, 1e-12)
        assert not all(b[-1] for b in between)

    def test_not_invertible(self):
        r = StateSpaceRealization([[0.0]], [[0.0]], np.zeros((0, 0)), np.zeros((0, 1)))
        with pytest.raises(DomainError):
            interlace_verify(r)


class TestClassicalBounds:
    def test_weyl_example(self):
        M = np.diag([1.0, 2.0, 3.0])
        N = np.diag([0.5, -0.5, 0.0])
        assert eig_perturbation_bounds(M, N)
        assert min(weyl_slacks(M, N)) >= -1e-12

    def test_cauchy_example(self):
        H = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert cauchy_interlacing(H, 1)
        lo, hi = np.linalg.eigvalsh(H)
        assert lo <= 2 <= hi
        assert min(s for s in cauchy_slacks(H, 1)) >= 0

    def test_cauchy_too_large(self):
        with pytest.raises(DomainError):
            cauchy_slacks(np.eye(2), 3)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**31))
    def test_random(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 7))
        X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        Y = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        assert eig_perturbation_bounds(X + X.conj().T, Y + Y.conj().T)
        assert cauchy_interlacing(X + X.conj().T, int(rng.integers(0, m + 1)))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31))
def test_spectral_properties(seed):
    r = random_realization(seed)
    eigs = hermitian_spectrum(r.A)
    assert spectrum_asymmetry(eigs) <= 1e-9 * (1 + np.max(np.abs(eigs), initial=0))
    poles = pole_report(r)
    assert states_from(poles) == r.n
    assert all(k <= r.m for _, k in poles)
    if invertibility(r):
        zeros = zero_report(r)
        assert all(k <= r.m for _, k in zeros)
        assert interlace_verify(r).passed
