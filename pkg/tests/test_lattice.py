"""Nilpotent lattice arithmetic, homomorphism validation and application."""

import pytest

from conftest import heisenberg, random_element, random_matrix, torus
from nilco.errors import (
    BoundExceededError,
    HomomorphismError,
    NilcoError,
    ShapeError,
    UnsupportedClassError,
)
from nilco.intmat import IntMatrix, determinant
from nilco.lattice import (
    LatticeHomomorphism,
    NilpotentLattice,
    apply_hom,
    identity_hom,
    require_valid_hom,
    validate_hom,
)


def as_unitriangular(e):
    """(a1, a2; c) as the 3x3 unitriangular matrix [[1,a1,c],[0,1,a2],[0,0,1]]."""
    (a1, a2), (c,) = e.coordinates
    return IntMatrix([[1, a1, c], [0, 1, a2], [0, 0, 1]])


class TestLatticeConstruction:
    def test_bad_ranks(self):
        with pytest.raises(NilcoError):
            NilpotentLattice(ranks=())
        with pytest.raises(NilcoError):
            NilpotentLattice(ranks=(0,))

    def test_class2_needs_brackets(self):
        with pytest.raises(NilcoError):
            NilpotentLattice(ranks=(2, 1))
        with pytest.raises(NilcoError):
            NilpotentLattice(ranks=(2, 1), brackets=(IntMatrix([[1]]),))

    def test_class1_rejects_brackets(self):
        with pytest.raises(NilcoError):
            NilpotentLattice(ranks=(2,), brackets=(IntMatrix([[0, 0], [0, 0]]),))

    def test_element_shape_checks(self):
        h = heisenberg()
        with pytest.raises(ShapeError):
            h.element(((1, 2),))
        with pytest.raises(ShapeError):
            h.element(((1,), (2,)))

    def test_class3_elements_unsupported(self):
        lat = NilpotentLattice(ranks=(2, 1, 1))
        e = lat.element(((0, 0), (0,), (0,)))
        with pytest.raises(UnsupportedClassError):
            lat.multiply(e, e)


class TestHeisenbergArithmetic:
    def test_matches_unitriangular_model(self, rng):
        h = heisenberg()
        for _ in range(300):
            u = random_element(rng, h)
            v = random_element(rng, h)
            n = rng.randint(-4, 4)
            assert as_unitriangular(h.multiply(u, v)) == (
                as_unitriangular(u) @ as_unitriangular(v)
            )
            assert (
                as_unitriangular(h.inverse(u)) @ as_unitriangular(u)
            ) == IntMatrix.identity(3)
            power_model = IntMatrix.identity(3)
            step = as_unitriangular(u if n >= 0 else h.inverse(u))
            for _ in range(abs(n)):
                power_model = power_model @ step
            assert as_unitriangular(h.power(u, n)) == power_model

    def test_commutator_is_central(self, rng):
        h = heisenberg()
        for _ in range(50):
            u = random_element(rng, h)
            v = random_element(rng, h)
            com = h.commutator(u, v)
            assert com.level(0) == (0, 0)
            assert com.level(1) == h.bracket(u.level(0), v.level(0))

    def test_torus_is_plain_addition(self, rng):
        t = torus(3)
        u = random_element(rng, t)
        v = random_element(rng, t)
        assert t.multiply(u, v).level(0) == tuple(
            x + y for x, y in zip(u.level(0), v.level(0))
        )
        assert t.multiply(u, t.inverse(u)) == t.identity()


class TestFiniteQuotients:
    def test_heisenberg_mod2_is_a_group_of_order_8(self):
        table = heisenberg().reduce_mod(2)
        assert table.order == 8
        table.check_group_axioms()

    def test_quotient_respects_projection(self, rng):
        h = heisenberg()
        table = h.reduce_mod(3)
        for _ in range(50):
            u = random_element(rng, h, lo=-6, hi=6)
            v = random_element(rng, h, lo=-6, hi=6)
            assert table.product(table.project(u), table.project(v)) == table.project(
                h.multiply(u, v)
            )

    def test_order_cap(self):
        with pytest.raises(BoundExceededError):
            heisenberg().reduce_mod(10, max_order=100)


class TestHomValidation:
    def test_shear_is_valid(self):
        h = heisenberg()
        shear = LatticeHomomorphism(
            source=h, target=h,
            matrices=(IntMatrix([[1, 1], [0, 1]]), IntMatrix([[1]])),
        )
        assert validate_hom(shear) is None

    def test_central_matrix_forced_to_det(self, rng):
        h = heisenberg()
        for _ in range(50):
            M1 = random_matrix(rng, 2, 2)
            d = determinant(M1)
            good = LatticeHomomorphism(h, h, (M1, IntMatrix([[d]])))
            bad = LatticeHomomorphism(h, h, (M1, IntMatrix([[d + 1]])))
            assert validate_hom(good) is None
            violation = validate_hom(bad)
            assert violation is not None
            with pytest.raises(HomomorphismError):
                require_valid_hom(bad)

    def test_shape_mismatch_rejected(self):
        h = heisenberg()
        with pytest.raises(ShapeError):
            LatticeHomomorphism(h, h, (IntMatrix([[1]]), IntMatrix([[1]])))
        with pytest.raises(ShapeError):
            LatticeHomomorphism(h, h, (IntMatrix.identity(2),))


class TestApplyHom:
    def test_identity_hom(self, rng):
        h = heisenberg()
        u = random_element(rng, h)
        assert apply_hom(identity_hom(h), u) == u

    def test_validated_maps_are_homomorphisms(self, rng):
        h = heisenberg()
        for _ in range(40):
            M1 = random_matrix(rng, 2, 2, lo=-3, hi=3)
            hom = LatticeHomomorphism(h, h, (M1, IntMatrix([[determinant(M1)]])))
            for _ in range(10):
                u = random_element(rng, h)
                v = random_element(rng, h)
                assert apply_hom(hom, h.multiply(u, v)) == h.multiply(
                    apply_hom(hom, u), apply_hom(hom, v)
                )

    def test_heisenberg_to_circle_projection(self, rng):
        h = heisenberg()
        t = torus(1)
        proj = LatticeHomomorphism(h, t, (IntMatrix([[1, 0]]), IntMatrix([], shape=(0, 1))))
        assert validate_hom(proj) is None
        u = random_element(rng, h)
        v = random_element(rng, h)
        assert apply_hom(proj, h.multiply(u, v)) == t.multiply(
            apply_hom(proj, u), apply_hom(proj, v)
        )
