"""Shared generators for the test suite; everything is seeded."""

import math

import numpy as np
import pytest

import schurkit.linalg as la
from schurkit import Contraction, discrete_system


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_contraction_matrix(rng, rows, cols, norm=0.95):
    g = random_matrix(rng, rows, cols)
    top = la.opnorm(g)
    return (norm / top) * g if top > 0 else g


def random_cnu(dim, defect, rng):
    """Corner of a Haar unitary; rejection-sampled to be c.n.u."""
    while True:
        u = la.haar_unitary(dim + defect, rng)
        a = Contraction(u[:dim, :dim])
        if a.is_cnu():
            return a


def permutation_colligation():
    """1-input/1-output conservative system whose transfer is lambda^2."""
    return discrete_system([[0]], [[0, 1]], [[1], [0]], [[0, 0], [1, 0]])


def blaschke_colligation(t=0.4):
    """1-state conservative system realizing (lambda + t)/(1 + t lambda)."""
    r = math.sqrt(1.0 - t * t)
    return discrete_system([[t]], [[r]], [[r]], [[-t]])
