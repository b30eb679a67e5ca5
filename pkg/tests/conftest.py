"""Shared builders for the test suite."""

import random

import pytest

from nilco.intmat import IntMatrix
from nilco.lattice import LatticeHomomorphism, NilpotentLattice


def heisenberg():
    """Rank-(2,1) class-2 lattice with the standard upper-triangular cocycle."""
    return NilpotentLattice(ranks=(2, 1), brackets=(IntMatrix([[0, 1], [0, 0]]),))


def torus(n):
    return NilpotentLattice(ranks=(n,))


def random_matrix(rng, rows, cols, lo=-5, hi=5):
    return IntMatrix([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


def torus_hom(lat, M):
    return LatticeHomomorphism(source=lat, target=lat, matrices=(M,))


def heisenberg_self_map(lat, M1):
    """Self-map of the Heisenberg lattice from its level-1 matrix; the
    central matrix is forced by bracket equivariance."""
    from nilco.intmat import determinant

    return LatticeHomomorphism(
        source=lat, target=lat, matrices=(M1, IntMatrix([[determinant(M1)]]))
    )


def random_element(rng, lat, lo=-4, hi=4):
    return lat.element(
        tuple(tuple(rng.randint(lo, hi) for _ in range(r)) for r in lat.ranks)
    )


@pytest.fixture
def rng():
    return random.Random(0xC01C1DE)
