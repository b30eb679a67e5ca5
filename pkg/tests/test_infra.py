"""Infra-nilmanifold pairs: holonomy validation, cover lifting, class merging."""

from math import ceil

import pytest

from conftest import torus
from nilco.errors import ShapeError
from nilco.infra import (
    CosetAction,
    InfraStructure,
    decide_infra,
    lift_pair,
    validate_infra,
)
from nilco.intmat import IntMatrix
from nilco.lattice import LatticeHomomorphism, NilpotentLattice
from nilco.oracle import UnionFind, translation_group
from nilco.reidemeister import EQ_THM, FINITE, INFINITE, INFTY_THM, NO, YES


def klein_bottle_setup(f_deg=2, g_deg=6):
    """Klein-bottle domain over a circle target: the orientation cover is
    Z^2, holonomy Z/2 acting by (x, y) -> (-x, y) with translation (0, 1)."""
    cover = torus(2)
    circle = torus(1)
    F = IntMatrix([[0, f_deg]])
    G = IntMatrix([[0, g_deg]])
    phi = LatticeHomomorphism(cover, circle, (F,))
    psi = LatticeHomomorphism(cover, circle, (G,))
    infra = InfraStructure(
        cover=cover,
        holonomy_order=2,
        coset_actions=(
            CosetAction(
                matrices=(IntMatrix([[-1, 0], [0, 1]]),),
                translation=cover.element(((0, 1),)),
            ),
        ),
        map_images=(
            (circle.element(((f_deg // 2,),)), circle.element(((g_deg // 2,),))),
        ),
    )
    return infra, phi, psi


def brute_force_klein_count(f_deg, g_deg):
    """Exhaustive twisted-orbit count for the full two-generator relation on
    a finite circle quotient, lattice and holonomy moves together."""
    diff = abs(g_deg - f_deg)
    coset_diff = abs(g_deg - f_deg) // 2
    modulus = max(2 * diff, 2)
    G = translation_group(modulus, 1)
    uf = UnionFind(G.elements)
    for (u,) in G.elements:
        uf.union((u,), ((u + diff) % modulus,))  # lattice generator move
        uf.union((u,), ((u + coset_diff) % modulus,))  # holonomy coset move
    return len({uf.find(e) for e in G.elements})


class TestValidation:
    def test_valid_fixture_has_no_violations(self):
        infra, phi, _ = klein_bottle_setup()
        assert validate_infra(infra, target=phi.target) == []

    def test_non_unimodular_action_flagged(self):
        cover = torus(1)
        infra = InfraStructure(
            cover=cover,
            holonomy_order=2,
            coset_actions=(
                CosetAction(matrices=(IntMatrix([[2]]),), translation=cover.identity()),
            ),
            map_images=((cover.identity(), cover.identity()),),
        )
        violations = validate_infra(infra)
        assert any("determinant" in v for v in violations)

    def test_wrong_coset_count_flagged(self):
        cover = torus(1)
        infra = InfraStructure(
            cover=cover, holonomy_order=3, coset_actions=(), map_images=()
        )
        violations = validate_infra(infra)
        assert any("coset actions" in v for v in violations)


class TestDecision:
    def test_klein_bottle_merges_four_to_two(self):
        infra, phi, psi = klein_bottle_setup(f_deg=2, g_deg=6)
        cover_report, report = decide_infra(infra, phi, psi)
        assert cover_report.R.count == 4
        assert report.R.status == FINITE and report.R.count == 2
        assert report.N == 2 and report.deformable == NO
        assert report.rationale == EQ_THM and report.exact
        assert {e.coordinates for e in report.R.reps} == {((0,),), ((1,),)}
        assert brute_force_klein_count(2, 6) == 2

    def test_merge_count_varies_with_degrees(self):
        for f_deg, g_deg in ((0, 8), (2, 10), (0, 4), (2, 14)):
            infra, phi, psi = klein_bottle_setup(f_deg, g_deg)
            cover_report, report = decide_infra(infra, phi, psi)
            assert report.R.count == brute_force_klein_count(f_deg, g_deg)
            h = infra.holonomy_order
            assert ceil(cover_report.R.count / h) <= report.R.count <= cover_report.R.count

    def test_infinite_cover_settles_the_question(self):
        infra, phi, _ = klein_bottle_setup(f_deg=2, g_deg=2)
        cover_report, report = decide_infra(infra, phi, phi)
        assert cover_report.R.status == INFINITE
        assert report.R.status == INFINITE
        assert report.N == 0 and report.deformable == YES
        assert report.rationale == INFTY_THM

    def test_lift_requires_cover_source(self):
        infra, phi, psi = klein_bottle_setup()
        circle = torus(1)
        wrong = LatticeHomomorphism(circle, circle, (IntMatrix([[2]]),))
        with pytest.raises(ShapeError):
            lift_pair(infra, wrong, wrong)

    def test_class3_cover_yields_bounds_only(self):
        cover = NilpotentLattice(ranks=(1, 1, 1))
        phi = LatticeHomomorphism(
            cover, cover,
            (IntMatrix([[3]]), IntMatrix([[3]]), IntMatrix([[3]])),
        )
        psi = LatticeHomomorphism(
            cover, cover,
            (IntMatrix([[0]]), IntMatrix([[0]]), IntMatrix([[0]])),
        )
        infra = InfraStructure(
            cover=cover,
            holonomy_order=2,
            coset_actions=(
                CosetAction(
                    matrices=(IntMatrix([[-1]]),) * 3,
                    translation=cover.identity(),
                ),
            ),
            map_images=((cover.identity(), cover.identity()),),
        )
        cover_report, report = decide_infra(infra, phi, psi)
        assert cover_report.R.count == 27
        assert not report.exact
        assert report.count_bounds == (14, 27)
