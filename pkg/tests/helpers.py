"""Shared builders for the test-suite."""

import numpy as np
import scipy.linalg as spla

from prokit import io
from prokit.cli import fixture_path
from prokit.core import FosterForm, FosterTerm, StateSpaceRealization, default_samples, evaluate
from prokit.errors import PoleProximityError
from prokit.generate import random_foster
from prokit.realize import foster_to_state_space

TWO_PORT_ZEROS = [5.000052, 4.002068, 3.00000000000012, 2.921053, 1.0, 0.682921]


def rot(w):
    return np.array([[0.0, w], [-w, 0.0]])


def two_port():
    """Hand transcription, independent of the bundled fixture file."""
    A = spla.block_diag(rot(1), rot(2), rot(3), rot(4), rot(1), rot(5))
    Bt = np.array(
        [
            [0, 1e-4, 0.1, 5e-3, 0, 0, 5e-3, 0, 0, 0, 0, 1e-3],
            [1000, 0, 1, 0, 0, 1e-4, 0, 0, 0, 1e-3, 0, 0],
        ]
    )
    D = np.array([[0.0, 50.0], [-50.0, 0.0]])
    return StateSpaceRealization(np.zeros((2, 2)), D, A, Bt.T)


def two_port_fixture():
    return io.load(fixture_path()).obj


def scalar(Q=0.0, R=0.0, terms=()):
    """Scalar Foster form ``Qz + sum (Qj z) / (z^2 + w^2)``."""
    return FosterForm([[Q]], [[R]], tuple(FosterTerm(w, [[q]], [[0.0]]) for w, q in terms))


def z_over_z2_plus_1():
    return StateSpaceRealization([[0.0]], [[0.0]], rot(1.0), [[1.0], [0.0]])


def z_times_identity(m):
    return StateSpaceRealization(np.eye(m), np.zeros((m, m)), np.zeros((0, 0)), np.zeros((0, m)))


def probes(count, seed):
    return default_samples(count, seed)


def values(obj, points, tol=None):
    """Values at ``points`` that are not numerically at a pole, keyed by point."""
    out = {}
    for z in points:
        try:
            out[z] = evaluate(obj, z) if tol is None else evaluate(obj, z, tol)
        except PoleProximityError:
            pass
    return out


def rel_err(X, Y):
    return float(np.linalg.norm(X - Y, 2) / (1.0 + np.linalg.norm(X, 2)))


def random_realization(seed, max_m=4, max_terms=5):
    """Random minimal realization built from a random Foster form."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, max_m + 1))
    terms = int(rng.integers(0, max_terms + 1))
    return foster_to_state_space(random_foster(m, terms, rng))
