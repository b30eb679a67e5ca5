"""Reidemeister and Nielsen coincidence invariants for nilpotent targets.

The count is assembled level by level along the lower central series: the
level-1 classes are the cokernel of the difference matrix, and for class-2
targets each level-1 class carries a fiber of central classes whose
translation subgroup is generated by the moves that stabilize the level-1
coordinate (kernel words of the difference matrix plus commutator words).
Canonical class labels with exact witness words come out of the same
machinery.
"""

from dataclasses import dataclass
from math import prod

from .errors import (
    InfiniteResultError,
    NilcoError,
    ShapeError,
    UnsupportedClassError,
)
from .intmat import (
    IntMatrix,
    column_hermite,
    cokernel,
    coset_representatives,
    kernel_basis,
    reduce_to_canonical_rep,
    smith_normal_form,
)
from .lattice import LatticeElement, NilpotentLattice, apply_hom, require_valid_hom

FINITE = "finite"
INFINITE = "infinite"

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

# rationale tags for the deformability decision
EQ_THM = "EQ-THM"  # lattice source: N=0 <=> R=infinite <=> deformable
INFTY_THM = "INFTY-THM"  # general source, R=infinite => deformable
REMARK_GAP = "REMARK-GAP"  # general source, finite R decides nothing


@dataclass(frozen=True)
class ReidemeisterResult:
    status: str
    count: object  # positive int when finite, None when infinite
    level_counts: tuple  # per-level orders; None marks an infinite level
    infinite_level: object = None  # 1-based, set when status == INFINITE
    reps: object = None  # canonical representatives (class <= 2, finite, small)
    fiber_counts: object = None  # central-fiber breakdown per level-1 class


@dataclass(frozen=True)
class CoincidenceReport:
    R: ReidemeisterResult
    N: object
    deformable: str
    rationale: str
    exact: bool = True
    count_bounds: object = None


@dataclass(frozen=True)
class GeneratorPairSystem:
    """Images (phi(s_j), psi(s_j)) of the generators of an arbitrary
    finitely generated source."""

    target: NilpotentLattice
    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        for p, q in self.pairs:
            self.target.element(p.coordinates)
            self.target.element(q.coordinates)


@dataclass(frozen=True)
class TwistedAction:
    """The relation u ~ psi(x) * u * phi(x)^{-1}, given by mover pairs."""

    target: NilpotentLattice
    movers: tuple  # pairs (phi image, psi image)
    lattice_source: bool = False

    @classmethod
    def from_homs(cls, phi, psi):
        if phi.source != psi.source or phi.target != psi.target:
            raise ShapeError("the two homomorphisms must share source and target")
        require_valid_hom(phi)
        require_valid_hom(psi)
        movers = tuple(
            (apply_hom(phi, g), apply_hom(psi, g)) for g in phi.source.generators()
        )
        return cls(target=phi.target, movers=movers, lattice_source=True)

    @classmethod
    def from_pairs(cls, system):
        return cls(target=system.target, movers=system.pairs, lattice_source=False)


def difference_map(F, G):
    """G - F; the abelian-level reduction of the coincidence relation to a
    root/translation problem (global sign convention)."""
    return G - F


def _word_inverse(word):
    return tuple((j, -e) for j, e in reversed(word))


def _word_power(word, n):
    if n == 0:
        return ()
    base = word if n > 0 else _word_inverse(word)
    return base * abs(n)


class TwistedOrbitEngine:
    """Exact orbit bookkeeping for a twisted action on a class <= 2 lattice."""

    def __init__(self, action):
        target = action.target
        if target.class_c > 2:
            raise UnsupportedClassError(
                f"orbit engine requires class <= 2, got class {target.class_c}"
            )
        self.action = action
        self.target = target
        self.movers = tuple(action.movers)
        self.k = len(self.movers)
        self.r1 = target.ranks[0]
        self.r2 = target.rank_at(1)

        cols = [
            tuple(y - x for x, y in zip(p.level(0), q.level(0)))
            for p, q in self.movers
        ]
        self.delta1 = IntMatrix.from_columns(cols, self.r1)
        self.hermite1 = column_hermite(self.delta1)
        self.coker1 = cokernel(self.delta1)

        self._fiber_words = None
        self._fiber_level1_parts = None
        self._uniform_fiber = None
        if self.coker1.is_finite and self.r2 > 0:
            self._build_fiber_generators()

    # -- move application --------------------------------------------

    def word_images(self, word):
        """(phi(word), psi(word)) as exact target elements."""
        t = self.target
        P = t.identity()
        Q = t.identity()
        for j, e in word:
            if e == 0:
                continue
            p, q = self.movers[j]
            P = t.multiply(P, t.power(p, e))
            Q = t.multiply(Q, t.power(q, e))
        return P, Q

    def move(self, u, word):
        """psi(word) * u * phi(word)^{-1}."""
        t = self.target
        P, Q = self.word_images(word)
        return t.multiply(t.multiply(Q, u), t.inverse(P))

    # -- central fibers -----------------------------------------------

    def _build_fiber_generators(self):
        words = []
        # kernel words: products of movers whose level-1 translation cancels
        for v in kernel_basis(self.delta1):
            words.append(tuple((j, v[j]) for j in range(self.k) if v[j] != 0))
        # commutator words stabilize level 1 as well
        for i in range(self.k):
            for j in range(i + 1, self.k):
                words.append(((i, 1), (j, 1), (i, -1), (j, -1)))
        parts = []
        for w in words:
            P, Q = self.word_images(w)
            if P.level(0) != Q.level(0):
                raise NilcoError("fiber generator word fails to stabilize level 1")
            parts.append(P.level(0))
        self._fiber_words = tuple(words)
        self._fiber_level1_parts = tuple(parts)
        self._uniform_fiber = all(all(x == 0 for x in p) for p in parts)

    def _fiber_matrix(self, a):
        """Columns are the exact central translations of the fiber generator
        words over the level-1 representative a."""
        base = self.target.element((tuple(a), (0,) * self.r2))
        cols = [self.move(base, w).level(1) for w in self._fiber_words]
        return IntMatrix.from_columns(cols, self.r2)

    # -- counting ------------------------------------------------------

    def result(self, reps_limit=None):
        """ReidemeisterResult for the action (no deformability decision)."""
        c1 = self.coker1.order
        if c1 is None:
            return ReidemeisterResult(
                status=INFINITE,
                count=None,
                level_counts=(None,) if self.r2 == 0 else (None, None),
                infinite_level=1,
            )
        if self.r2 == 0:
            reps = None
            if reps_limit is not None and c1 <= reps_limit:
                reps = tuple(
                    self.target.element((a,))
                    for a in coset_representatives(self.delta1, hermite=self.hermite1)
                )
            return ReidemeisterResult(
                status=FINITE, count=c1, level_counts=(c1,), reps=reps
            )

        level1_reps = coset_representatives(self.delta1, hermite=self.hermite1)
        fiber_counts = []
        reps = []
        collect_reps = reps_limit is not None
        shared = None
        for a in level1_reps:
            if self._uniform_fiber and shared is not None:
                M, ck = shared
            else:
                M = self._fiber_matrix(a)
                ck = cokernel(M)
                if self._uniform_fiber:
                    shared = (M, ck)
            if ck.order is None:
                return ReidemeisterResult(
                    status=INFINITE,
                    count=None,
                    level_counts=(c1, None),
                    infinite_level=2,
                )
            fiber_counts.append(ck.order)
            if collect_reps:
                if len(reps) + ck.order > reps_limit:
                    collect_reps = False
                    reps = []
                else:
                    for c in coset_representatives(M):
                        reps.append(self.target.element((tuple(a), tuple(c))))
        total = sum(fiber_counts)
        uniform = len(set(fiber_counts)) <= 1
        if uniform:
            level_counts = (c1, fiber_counts[0] if fiber_counts else 1)
        else:
            # no clean per-level factorization; count is the fibered sum
            level_counts = (total,)
        out_reps = None
        if collect_reps and total <= reps_limit:
            out_reps = tuple(reps)
        return ReidemeisterResult(
            status=FINITE,
            count=total,
            level_counts=level_counts,
            reps=out_reps,
            fiber_counts=tuple(fiber_counts),
        )

    # -- labels --------------------------------------------------------

    def label(self, u):
        """Canonical class representative of u with an exact witness word.

        Raises InfiniteResultError when the class set is infinite.
        """
        t = self.target
        u = t.element(u.coordinates)
        if not self.coker1.is_finite:
            raise InfiniteResultError("infinitely many classes at level 1")
        a = u.level(0)
        a_rep, z = reduce_to_canonical_rep(a, self.delta1, hermite=self.hermite1)
        word1 = tuple((j, -z[j]) for j in range(self.k) if z[j] != 0)
        u1 = self.move(u, word1) if word1 else u
        if u1.level(0) != a_rep:
            raise NilcoError("level-1 normalization failed")
        if self.r2 == 0:
            return u1, word1

        M = self._fiber_matrix(a_rep)
        ck = cokernel(M)
        if ck.order is None:
            raise InfiniteResultError("infinitely many central classes over this level-1 class")
        c = u1.level(1)
        c_rep, z2 = reduce_to_canonical_rep(c, M)
        word2 = ()
        for g, coeff in enumerate(z2):
            word2 = word2 + _word_power(self._fiber_words[g], -coeff)
        u2 = self.move(u1, word2) if word2 else u1
        if u2.level(0) != a_rep or u2.level(1) != tuple(c_rep):
            raise NilcoError("central normalization failed")
        return u2, word2 + word1


def label_class(u, action):
    """Canonical label and witness word for u under the twisted action."""
    return TwistedOrbitEngine(action).label(u)


def _level_differences(phi, psi):
    return [psi.matrices[i] - phi.matrices[i] for i in range(phi.depth)]


def coincidence_invariants(phi, psi, reps_limit=1024):
    """R(f,g), N(f,g) and the deformability decision for a lattice pair.

    Level counts are the cokernel orders of the level differences; for
    class <= 2 targets the exact orbit engine supplies the count and the
    canonical representatives.
    """
    if phi.source != psi.source or phi.target != psi.target:
        raise ShapeError("the two homomorphisms must share source and target")
    require_valid_hom(phi)
    require_valid_hom(psi)
    diffs = _level_differences(phi, psi)
    level_counts = []
    infinite_level = None
    for i, d in enumerate(diffs):
        order = cokernel(d).order
        level_counts.append(order)
        if order is None and infinite_level is None:
            infinite_level = i + 1
    if infinite_level is not None:
        R = ReidemeisterResult(
            status=INFINITE,
            count=None,
            level_counts=tuple(level_counts),
            infinite_level=infinite_level,
        )
        return CoincidenceReport(R=R, N=0, deformable=YES, rationale=EQ_THM)

    if phi.target.class_c <= 2:
        engine = TwistedOrbitEngine(TwistedAction.from_homs(phi, psi))
        R = engine.result(reps_limit=reps_limit)
        if R.status == INFINITE:  # corrected count disagrees with plain levels
            return CoincidenceReport(R=R, N=0, deformable=YES, rationale=EQ_THM)
        R = ReidemeisterResult(
            status=FINITE,
            count=R.count,
            level_counts=tuple(level_counts),
            reps=R.reps,
            fiber_counts=R.fiber_counts,
        )
    else:
        R = ReidemeisterResult(
            status=FINITE,
            count=prod(level_counts),
            level_counts=tuple(level_counts),
        )
    return CoincidenceReport(R=R, N=R.count, deformable=NO, rationale=EQ_THM)


def coincidence_invariants_from_pairs(system, reps_limit=1024):
    """R, N and the one-directional decision for an arbitrary source given
    by generator image pairs.

    R = infinity forces deformability; a finite R decides nothing for a
    general source, so the verdict is UNKNOWN in that case.
    """
    if system.target.class_c > 2:
        raise UnsupportedClassError(
            "generator-pair input requires a target of class <= 2"
        )
    engine = TwistedOrbitEngine(TwistedAction.from_pairs(system))
    R = engine.result(reps_limit=reps_limit)
    if R.status == INFINITE:
        return CoincidenceReport(R=R, N=0, deformable=YES, rationale=INFTY_THM)
    return CoincidenceReport(R=R, N=R.count, deformable=UNKNOWN, rationale=REMARK_GAP)


def fiber_deviation_rank(phi, psi, level):
    """Rank of the translation subgroup at the given 1-based level.

    Rank r_i at a level means the level count is finite; rank 0 means the
    deviation at that level is trivial.
    """
    if level < 1 or level > phi.depth:
        raise ShapeError(f"level {level} out of range 1..{phi.depth}")
    d = _level_differences(phi, psi)[level - 1]
    return len(smith_normal_form(d).invariant_factors)


def decide_wecken(report):
    """Deterministic restatement of the deformability verdict with its
    rationale tag."""
    return report.deformable, report.rationale
