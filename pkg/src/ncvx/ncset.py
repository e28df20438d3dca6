"""Nearly convex sets as finite unions of relatively open polyhedra.

A piece is ri(base) for a canonical nonempty H-polyhedron. The class is
closed under products, intersections, linear images, preimages, and
Minkowski sums, and membership is a finite number of exact row checks.

Near convexity of a union is decided against its closed convex hull H:
the set is nearly convex iff H is covered by the piece closures (so the
closure is convex) and ri(H) is covered by the pieces themselves. Both
checks run by cell subtraction and report a witness point on failure.

Operations that are exact pointwise but whose relative-interior formula
needs an overlap qualification (intersection, preimage) return the result
together with the qualification flag instead of raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from . import linalg as la
from .errors import DimensionMismatch, EmptyPolyhedron, NotNearlyConvex
from .linalg import Mat, Vec
from .lp import MixedSystem, Row, strict_feasible
from .polyhedron import (
    HPoly,
    VPoly,
    _hpoly_sort_key,
    affine_hull,
    canonical_form,
    decompose_mixed,
    difference_witness,
    project_mixed,
    to_hrep,
    to_vrep,
)


@dataclass(frozen=True)
class ROPoly:
    """ri(base); base is canonical and nonempty."""

    base: HPoly

    @property
    def dim(self) -> int:
        return self.base.dim

    def system(self) -> MixedSystem:
        return self.base.ri_system()

    def contains(self, x: Vec) -> bool:
        return self.system().satisfies(x)


@dataclass(frozen=True)
class NCSet:
    dim: int
    pieces: tuple[ROPoly, ...]

    def contains(self, x: Vec) -> bool:
        if len(x) != self.dim:
            raise DimensionMismatch("point dim does not match set dim")
        return any(pc.contains(x) for pc in self.pieces)


def ropoly(base: HPoly) -> ROPoly:
    canon = canonical_form(base)
    if canon is None:
        raise EmptyPolyhedron("relatively open piece needs a nonempty base")
    return ROPoly(canon)


def ncset(dim: int, bases: Iterable[HPoly]) -> NCSet:
    seen = set()
    for b in bases:
        canon = canonical_form(b)
        if canon is not None:
            seen.add(canon)
    return NCSet(dim, tuple(ROPoly(c) for c in sorted(seen, key=_hpoly_sort_key)))


def from_mixed(m: MixedSystem) -> NCSet:
    """The solution set of any mixed system, as a union of ri pieces."""
    return NCSet(m.dim, tuple(ROPoly(b) for b in decompose_mixed(m)))


def from_closed_hpoly(p: HPoly) -> NCSet:
    """A closed polyhedron is the union of the ri's of its faces."""
    return from_mixed(p.closed_system())


def from_closure_and_faces(p: HPoly, active_sets: Iterable[Sequence[int]]) -> NCSet:
    bases = [p]
    for active in active_sets:
        extra = tuple(p.ineq[i] for i in active)
        bases.append(HPoly(p.dim, p.ineq, p.eq + extra))
    return ncset(p.dim, bases)


def whole_space(n: int) -> NCSet:
    return NCSet(n, (ROPoly(HPoly(n)),))


def permute_coords(s: NCSet, perm: Sequence[int]) -> NCSet:
    """Reindex coordinates: new coordinate j reads old coordinate perm[j]."""
    if sorted(perm) != list(range(s.dim)):
        raise DimensionMismatch("perm must be a permutation of all coordinates")

    def shuffle(rows):
        return tuple((tuple(a[perm[j]] for j in range(s.dim)), b) for a, b in rows)

    return ncset(
        s.dim,
        [HPoly(s.dim, shuffle(pc.base.ineq), shuffle(pc.base.eq)) for pc in s.pieces],
    )


def union(*sets: NCSet) -> NCSet:
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise DimensionMismatch("union of sets with mixed dims")
    return ncset(dims.pop(), [pc.base for s in sets for pc in s.pieces])


def membership(s: NCSet, x: Vec) -> bool:
    return s.contains(la.vec(x))


def piece_ri_point(pc: ROPoly) -> Vec:
    """A point of the piece, from its generators: the vertex barycenter
    pushed one unit along every ray."""
    v = to_vrep(pc.base)
    pt = la.scale(la.vsum(v.points), Fraction(1, len(v.points)))
    for r in v.rays:
        pt = la.add(pt, r)
    return pt


def ri_sample(s: NCSet) -> Optional[Vec]:
    """A point of the first piece, or None for the empty set."""
    return piece_ri_point(s.pieces[0]) if s.pieces else None


# ---------------------------------------------------------------------------
# closure hull and the near-convexity test


@lru_cache(maxsize=None)
def closure_hull(s: NCSet) -> Optional[HPoly]:
    """Closed convex hull of the union, via pooled generators. Equals the
    closure exactly when the set is nearly convex."""
    if not s.pieces:
        return None
    points: list[Vec] = []
    rays: list[Vec] = []
    for pc in s.pieces:
        v = to_vrep(pc.base)
        points.extend(v.points)
        rays.extend(v.rays)
    pooled = VPoly(s.dim, tuple(sorted(set(points))), tuple(sorted(set(rays))))
    return to_hrep(pooled)


@lru_cache(maxsize=None)
def is_nearly_convex(s: NCSet) -> tuple[bool, Optional[Vec]]:
    """Decide near convexity; on failure the witness point lies in the
    convex hull (or its ri) but outside the set (or its closure)."""
    if not s.pieces:
        return True, None
    hull = closure_hull(s)
    assert hull is not None
    wit = difference_witness(
        [hull.closed_system()], [pc.base.closed_system() for pc in s.pieces]
    )
    if wit is not None:
        return False, wit
    wit = difference_witness(
        [hull.ri_system()], [pc.system() for pc in s.pieces]
    )
    if wit is not None:
        return False, wit
    return True, None


def require_valid(s: NCSet) -> None:
    ok, wit = is_nearly_convex(s)
    if not ok:
        raise NotNearlyConvex(f"set is not nearly convex, witness {wit}")


def closure(s: NCSet) -> Optional[HPoly]:
    require_valid(s)
    return closure_hull(s)


def relative_interior(s: NCSet) -> Optional[ROPoly]:
    require_valid(s)
    hull = closure_hull(s)
    return None if hull is None else ROPoly(hull)


def affine_hull_of(s: NCSet) -> tuple[Row, ...]:
    require_valid(s)
    hull = closure_hull(s)
    if hull is None:
        raise EmptyPolyhedron("affine hull of the empty set")
    return affine_hull(hull)


# ---------------------------------------------------------------------------
# set comparisons


def contains_set(outer: NCSet, inner: NCSet) -> bool:
    if outer.dim != inner.dim:
        raise DimensionMismatch("comparing sets of different dims")
    wit = difference_witness(
        [pc.system() for pc in inner.pieces], [pc.system() for pc in outer.pieces]
    )
    return wit is None


def set_equal(a: NCSet, b: NCSet) -> bool:
    return contains_set(a, b) and contains_set(b, a)


# ---------------------------------------------------------------------------
# calculus


def product(s1: NCSet, s2: NCSet) -> NCSet:
    n, p = s1.dim, s2.dim
    bases = []
    for a in s1.pieces:
        for b in s2.pieces:
            ineq = [(row + la.zeros(p), rhs) for row, rhs in a.base.ineq]
            ineq += [(la.zeros(n) + row, rhs) for row, rhs in b.base.ineq]
            eq = [(row + la.zeros(p), rhs) for row, rhs in a.base.eq]
            eq += [(la.zeros(n) + row, rhs) for row, rhs in b.base.eq]
            bases.append(HPoly(n + p, tuple(ineq), tuple(eq)))
    return ncset(n + p, bases)


def intersect(s1: NCSet, s2: NCSet) -> tuple[NCSet, bool]:
    """Exact pointwise intersection; the flag reports whether the relative
    interiors of the two sets overlap (which certifies the ri formula)."""
    if s1.dim != s2.dim:
        raise DimensionMismatch("intersecting sets of different dims")
    bases = []
    for a in s1.pieces:
        for b in s2.pieces:
            joint = a.system().combine(b.system())
            if strict_feasible(joint).feasible:
                bases.append(
                    HPoly(
                        s1.dim,
                        a.base.ineq + b.base.ineq,
                        a.base.eq + b.base.eq,
                    )
                )
    result = ncset(s1.dim, bases)
    qc = False
    h1, h2 = closure_hull(s1), closure_hull(s2)
    if h1 is not None and h2 is not None:
        qc = strict_feasible(h1.ri_system().combine(h2.ri_system())).feasible
    return result, qc


def _image_base(q: HPoly, t: Mat) -> HPoly:
    """Closed image t(q) by lifting to the graph and projecting."""
    p, n = len(t), q.dim
    if any(len(r) != n for r in t):
        raise DimensionMismatch("matrix width does not match set dim")
    ineq = [(row + la.zeros(p), rhs) for row, rhs in q.ineq]
    eq = [(row + la.zeros(p), rhs) for row, rhs in q.eq]
    for i in range(p):
        eq.append((t[i] + la.neg(la.unit(p, i)), la.ZERO))
    lifted = MixedSystem(n + p, tuple(ineq), (), tuple(eq))
    shadow = project_mixed(lifted, list(range(n, n + p)))
    assert not shadow.strict
    return HPoly(p, shadow.weak, shadow.eq)


def linear_image(s: NCSet, t: Mat) -> NCSet:
    p = len(t)
    if p == 0:
        raise DimensionMismatch("image space must have positive dim")
    return ncset(p, [_image_base(pc.base, t) for pc in s.pieces])


def preimage(s: NCSet, t: Mat) -> tuple[NCSet, bool]:
    """{x : t x in s}; flag = preimage of ri(s) is nonempty, which
    certifies ri(result) = preimage of ri(s)."""
    return affine_preimage(s, t, la.zeros(s.dim))


def affine_preimage(s: NCSet, t: Mat, shift: Vec) -> tuple[NCSet, bool]:
    """{x : t x + shift in s}, same certification flag as preimage."""
    if len(t) != s.dim or len(shift) != s.dim:
        raise DimensionMismatch("matrix height does not match set dim")
    m = len(t[0]) if t else 0

    def pull(row: Row) -> Row:
        a, b = row
        return la.mat_t_vec(t, a), b - la.dot(a, shift)

    bases = []
    for pc in s.pieces:
        strict = tuple(pull(r) for r in pc.base.ineq)
        eq = tuple(pull(r) for r in pc.base.eq)
        if strict_feasible(MixedSystem(m, (), strict, eq)).feasible:
            bases.append(HPoly(m, strict, eq))
    result = ncset(m, bases)
    qc = False
    hull = closure_hull(s)
    if hull is not None:
        ri_rows = MixedSystem(
            m,
            (),
            tuple(pull(r) for r in hull.ineq),
            tuple(pull(r) for r in hull.eq),
        )
        qc = strict_feasible(ri_rows).feasible
    return result, qc


def minkowski_sum(s1: NCSet, s2: NCSet) -> NCSet:
    if s1.dim != s2.dim:
        raise DimensionMismatch("summing sets of different dims")
    n = s1.dim
    t = tuple(la.unit(n, i) + la.unit(n, i) for i in range(n))
    return linear_image(product(s1, s2), t)
