import numpy as np
import pytest
import scipy.linalg as spla
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import two_port, probes, rel_err, rot, z_over_z2_plus_1, z_times_identity
from prokit.core import (
    DescriptorRealization,
    FosterForm,
    FosterTerm,
    StateSpaceRealization,
    eval_descriptor,
    eval_foster,
    eval_state_space,
    validate_foster,
    validate_realization,
)
from prokit.errors import DomainError
from prokit.generate import random_residue, random_state_space
from prokit.invert import inverse_weierstrass
from prokit.realize import (
    controllability_gramian,
    controllability_hautus,
    controllability_matrix,
    descriptor_minimality,
    foster_to_state_space,
    lift_factorization,
    residue_multiplicity,
    state_space_to_foster,
    state_space_to_weierstrass,
)

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def lift_errors(omega, Q, R):
    lift = lift_factorization(omega, Q, R)
    B, A = lift.B, lift.A
    return lift, np.linalg.norm(B.T @ B - Q), np.linalg.norm(B.T @ A @ B - R)


class TestLift:
    def test_scalar(self):
        lift, eq, er = lift_errors(1.0, np.eye(1), np.zeros((1, 1)))
        assert lift.q == 1 and lift.B.shape == (2, 1)
        assert eq <= 1e-12 and er <= 1e-12

    def test_zero_residue(self):
        lift = lift_factorization(3.0, np.zeros((2, 2)), np.zeros((2, 2)))
        assert lift.q == 0 and lift.B.shape == (0, 2)

    def test_residue_at_bound(self):
        lift, eq, er = lift_errors(2.0, np.eye(2), 2 * J2)
        assert lift.q == 1 and lift.B.shape == (2, 2)
        assert eq <= 1e-12 and er <= 1e-12

    def test_residue_inside_bound(self):
        lift, eq, er = lift_errors(2.0, np.eye(2), J2)
        assert lift.q == 2 and eq <= 1e-12 and er <= 1e-12
        assert controllability_hautus(lift.A, lift.B)

    def test_odd_rank(self):
        g = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 1.0], [1.0, 1.0, 0.0]])
        lift, eq, er = lift_errors(1.5, g.T @ g, np.zeros((3, 3)))
        assert lift.q == 3 and eq <= 1e-12 and er <= 1e-12

    def test_zero_frequency(self):
        g = np.array([[1.0, 2.0]])
        lift, eq, er = lift_errors(0.0, g.T @ g, np.zeros((2, 2)))
        assert lift.q == 1 and lift.A.shape == (1, 1) and eq <= 1e-12 and er == 0.0

    def test_not_dominated(self):
        with pytest.raises(DomainError, match="residue pair not dominated"):
            lift_factorization(1.0, np.eye(2), 2 * J2)

    def test_zero_frequency_needs_zero_residue(self):
        with pytest.raises(DomainError, match="omega=0"):
            lift_factorization(0.0, np.eye(2), J2)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 2**31))
    def test_identities_random(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 5))
        omega = float(rng.uniform(0.1, 5))
        Q, R = random_residue(omega, m, rng, q=int(rng.integers(1, 4)))
        lift, eq, er = lift_errors(omega, Q, R)
        assert eq <= 1e-9 and er <= 1e-9
        assert lift.q <= m
        assert controllability_hautus(lift.A, lift.B)
        assert residue_multiplicity(omega, Q, R) == lift.q


class TestFosterToStateSpace:
    def test_pure_linear(self):
        r = foster_to_state_space(FosterForm(np.eye(3), np.zeros((3, 3))))
        assert r.n == 0
        np.testing.assert_allclose(r.M, np.eye(3))

    def test_single_resonance(self):
        f = FosterForm([[0.0]], [[0.0]], (FosterTerm(1.0, [[1.0]], [[0.0]]),))
        r = foster_to_state_space(f)
        assert r.n == 2 and validate_realization(r).passed
        np.testing.assert_allclose(np.abs(np.linalg.eigvals(r.A)), [1, 1])
        for z in probes(20, 3):
            assert rel_err(eval_foster(f, z), eval_state_space(r, z)) <= 1e-12

    def test_example_round_trip_values(self):
        r = two_port()
        r2 = foster_to_state_space(state_space_to_foster(r))
        assert validate_realization(r2).passed
        for z in probes(20, 5):
            assert rel_err(eval_state_space(r, z), eval_state_space(r2, z)) <= 1e-9

    @pytest.mark.xfail(
        strict=True,
        reason="the omega=1 residue lies 5e-13 inside the dominance bound, below what "
        "the Foster data resolve, so the lift returns one rotation pair instead of two",
    )
    def test_example_round_trip_dimension(self):
        r2 = foster_to_state_space(state_space_to_foster(two_port()))
        assert r2.n == 12

    def test_invalid_input(self):
        f = FosterForm(np.zeros((2, 2)), np.zeros((2, 2)), (FosterTerm(1.0, np.eye(2), 2 * J2),))
        with pytest.raises(DomainError) as info:
            foster_to_state_space(f)
        assert not info.value.report.passed

    def test_multiplicities_bounded(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            m = int(rng.integers(1, 5))
            terms = []
            for w in (0.7, 1.9, 3.1):
                Q, R = random_residue(w, m, rng)
                terms.append(FosterTerm(w, Q, R))
            r = foster_to_state_space(FosterForm(np.zeros((m, m)), np.zeros((m, m)), tuple(terms)))
            qs = [residue_multiplicity(t.omega, t.Qj, t.Rj) for t in terms]
            assert r.n == 2 * sum(qs) and max(qs) <= m


class TestStateSpaceToFoster:
    def test_no_states(self):
        D = np.array([[0.0, 2.0], [-2.0, 0.0]])
        f = state_space_to_foster(StateSpaceRealization(np.eye(2), D, np.zeros((0, 0)), np.zeros((0, 2))))
        assert f.terms == ()
        np.testing.assert_allclose(f.R, D)

    def test_example(self):
        f = state_space_to_foster(two_port())
        assert sorted(round(w, 9) for w in f.omegas) == [1, 2, 3, 4, 5]
        np.testing.assert_allclose(f.Q, 0)
        np.testing.assert_allclose(f.R, [[0, 50], [-50, 0]])
        assert validate_foster(f).passed

    def test_random_round_trip(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            r = random_state_space(6, 2, seed=rng)
            r2 = foster_to_state_space(state_space_to_foster(r))
            assert r2.n == 6
            for z in probes(20, 1):
                assert rel_err(eval_state_space(r, z), eval_state_space(r2, z)) <= 1e-9

    def test_odd_dimension(self):
        r = random_state_space(5, 2, seed=3)
        f = state_space_to_foster(r)
        assert 0.0 in f.omegas and validate_foster(f).passed
        for z in probes(10, 2):
            assert rel_err(eval_state_space(r, z), eval_foster(f, z)) <= 1e-9


class TestWeierstrass:
    def test_proper_case(self):
        r = two_port()
        d = state_space_to_weierstrass(r)
        np.testing.assert_allclose(d.E, np.eye(12))
        np.testing.assert_allclose(d.A, r.A)
        np.testing.assert_allclose(d.B, r.B)
        np.testing.assert_allclose(d.C, r.B)

    def test_differentiator(self):
        d = state_space_to_weierstrass(z_times_identity(1))
        assert d.N == 2
        np.testing.assert_allclose(eval_descriptor(d, 7), [[7.0]])

    def test_random_minimal(self):
        r = random_state_space(4, 2, rank_M=1, seed=21)
        d = state_space_to_weierstrass(r)
        assert d.N == 6 and descriptor_minimality(d).minimal
        for z in probes(20, 4):
            assert rel_err(eval_state_space(r, z), eval_descriptor(d, z)) <= 1e-9


class TestControllability:
    def test_example(self):
        r = two_port()
        assert controllability_hautus(r.A, r.B)

    def test_zero_input(self):
        assert not controllability_hautus(rot(1.0), np.zeros((2, 1)))

    def test_repeated_block_single_input(self):
        A = spla.block_diag(rot(1.0), rot(1.0))
        B = np.array([[1.0], [0.3], [-0.7], [2.0]])
        assert not controllability_hautus(A, B)
        lam = 1j
        assert np.linalg.svd(np.hstack([A - lam * np.eye(4), B]), compute_uv=False)[-1] < 1e-12

    def test_gramian_definite(self):
        r = z_over_z2_plus_1()
        assert np.linalg.eigvalsh(controllability_gramian(r.A, r.B))[0] > 0
        assert controllability_matrix(r.A, r.B).shape == (2, 2)


class TestMinimality:
    def test_example_weierstrass(self):
        assert descriptor_minimality(state_space_to_weierstrass(two_port())).minimal

    def test_unreachable_state(self):
        d = state_space_to_weierstrass(z_over_z2_plus_1())
        E = spla.block_diag(d.E, [[1.0]])
        A = spla.block_diag(d.A, [[0.5]])
        B = np.vstack([d.B, [[0.0]]])
        C = np.vstack([d.C, [[1.0]]])
        report = descriptor_minimality(DescriptorRealization(E, A, B, C, d.D))
        assert not report.conditions["i"] and not report.minimal

    def test_example_inverse(self):
        assert descriptor_minimality(inverse_weierstrass(two_port())).minimal

    def test_irregular_pencil(self):
        d = DescriptorRealization(np.zeros((1, 1)), np.zeros((1, 1)), [[1.0]], [[1.0]], [[0.0]])
        with pytest.raises(DomainError):
            descriptor_minimality(d)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31))
    def test_weierstrass_always_minimal(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(1, 4))
        r = random_state_space(int(rng.integers(0, 7)), m, seed=rng)
        assert descriptor_minimality(state_space_to_weierstrass(r)).minimal
