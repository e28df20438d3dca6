"""Closed convex polyhedra and relatively open cells, exactly.

The canonical form of an H-polyhedron is the backbone of the library:
implicit equalities are moved into the equality block (so the equality
block spans the affine hull), the equality block is RREF-reduced and the
inequality rows are reduced against its pivots, redundant rows are removed
by LP, and everything is scaled to primitive integers and sorted. Two
H-descriptions define the same set if and only if their canonical forms are
identical, which turns set equality into tuple comparison. The relative
interior of a canonical polyhedron is exactly "equalities hold, every
remaining inequality strict".

Projection is Fourier-Motzkin with equality pivoting; on mixed systems a
derived row is strict when either parent was, which computes exact shadows
of systems with strict rows. Vertex/ray descriptions come from the double
description method run on the homogenization, and the same cone routine
applied to the polar gives the reverse conversion.

Mixed cells (weak + strict + equality rows) are the set-algebra workhorse:
region subtraction peels one constraint at a time, and any feasible mixed
system splits into relatively open polyhedra by recursing on the facets of
its closure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from . import linalg as la
from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    EmptyPolyhedron,
    PointNotInSet,
)
from .linalg import ONE, Vec, ZERO
from .lp import LPOutcome, MixedSystem, Row, feasible_point, maximize, strict_feasible

DEFAULT_DIM_CAP = 6
MAX_CELLS = 50_000


@dataclass(frozen=True)
class HPoly:
    """{x : A x <= b, E x = d} with rational rows."""

    dim: int
    ineq: tuple[Row, ...] = ()
    eq: tuple[Row, ...] = ()

    def __post_init__(self):
        for a, _ in self.ineq + self.eq:
            if len(a) != self.dim:
                raise DimensionMismatch("row length does not match dim")

    def closed_system(self) -> MixedSystem:
        return MixedSystem(self.dim, self.ineq, (), self.eq)

    def ri_system(self) -> MixedSystem:
        """Meaningful on canonical forms: strict rows carve the ri."""
        return MixedSystem(self.dim, (), self.ineq, self.eq)

    def contains(self, x: Vec) -> bool:
        return self.closed_system().satisfies(x)


@dataclass(frozen=True)
class VPoly:
    """conv(points) + cone(rays); empty iff points is empty."""

    dim: int
    points: tuple[Vec, ...] = ()
    rays: tuple[Vec, ...] = ()


@dataclass(frozen=True)
class NormalConeRep:
    """cone(generators) + span(lineality)."""

    dim: int
    generators: tuple[Vec, ...] = ()
    lineality: tuple[Vec, ...] = ()


def hpoly(dim: int, ineq: Iterable = (), eq: Iterable = ()) -> HPoly:
    return HPoly(
        dim,
        tuple((la.vec(a), Fraction(b)) for a, b in ineq),
        tuple((la.vec(a), Fraction(b)) for a, b in eq),
    )


def empty_hpoly(dim: int) -> HPoly:
    return HPoly(dim, ((la.zeros(dim), Fraction(-1)),), ())


def full_space(dim: int) -> HPoly:
    return HPoly(dim)


def box(bounds: Sequence[tuple]) -> HPoly:
    n = len(bounds)
    rows = []
    for i, (lo, hi) in enumerate(bounds):
        rows.append((la.unit(n, i), Fraction(hi)))
        rows.append((la.neg(la.unit(n, i)), Fraction(-Fraction(lo))))
    return HPoly(n, tuple(rows))


def _norm_ineq(a: Vec, b: Fraction) -> Row:
    joint = la.primitive(a + (b,))
    return joint[:-1], joint[-1]


def _norm_eq(a: Vec, b: Fraction) -> Row:
    joint = la.primitive(a + (b,))
    lead = next((v for v in joint if v != 0), ZERO)
    if lead < 0:
        joint = la.neg(joint)
    return joint[:-1], joint[-1]


@lru_cache(maxsize=None)
def canonical_form(p: HPoly) -> Optional[HPoly]:
    """Unique facet-based representation, or None when the set is empty."""
    ineq = []
    for a, b in p.ineq:
        if la.is_zero(a):
            if b < 0:
                return None
            continue
        ineq.append(_norm_ineq(a, b))
    eq = []
    for a, b in p.eq:
        if la.is_zero(a):
            if b != 0:
                return None
            continue
        eq.append(_norm_eq(a, b))
    ineq = sorted(set(ineq))
    eq = sorted(set(eq))

    system = MixedSystem(p.dim, tuple(ineq), (), tuple(eq))
    if feasible_point(system).status == "infeasible":
        return None

    # implicit equality rows: those that cannot be strict anywhere on the set
    joint = strict_feasible(MixedSystem(p.dim, (), tuple(ineq), tuple(eq)))
    if not joint.feasible:
        implicit = []
        survivors = []
        for r in ineq:
            one = strict_feasible(
                MixedSystem(p.dim, tuple(ineq), (r,), tuple(eq))
            )
            (survivors if one.feasible else implicit).append(r)
        eq.extend(implicit)
        ineq = survivors

    reduced_eq, pivots = la.rref([a + (b,) for a, b in eq])
    assert p.dim not in pivots, "feasible system cannot have 0=1 rows"
    eq_rows = []
    for row_aug in reduced_eq:
        a, b = row_aug[:-1], row_aug[-1]
        eq_rows.append(_norm_eq(a, b))

    cleaned = []
    for a, b in ineq:
        for (ea, eb), pc in zip(eq_rows, pivots):
            coef = a[pc]
            if coef != 0:
                f = coef / ea[pc]
                a = la.sub(a, la.scale(ea, f))
                b = b - f * eb
        if la.is_zero(a):
            assert b >= 0
            continue
        cleaned.append(_norm_ineq(a, b))
    cleaned = sorted(set(cleaned))

    survivors = list(cleaned)
    i = 0
    while i < len(survivors):
        a, b = survivors[i]
        others = survivors[:i] + survivors[i + 1 :]
        out = maximize(a, MixedSystem(p.dim, tuple(others), (), tuple(eq_rows)))
        if out.status == "optimal" and out.value <= b:
            survivors.pop(i)
        else:
            i += 1

    return HPoly(p.dim, tuple(sorted(survivors)), tuple(eq_rows))


def is_empty(p: HPoly) -> bool:
    return canonical_form(p) is None


def polyhedron_equal(p: HPoly, q: HPoly) -> bool:
    if p.dim != q.dim:
        raise DimensionMismatch("comparing polyhedra of different dims")
    return canonical_form(p) == canonical_form(q)


def implicit_equalities(p: HPoly) -> tuple[tuple[int, ...], HPoly]:
    """Indices of input inequality rows forced to equality, plus the
    canonical form."""
    canon = canonical_form(p)
    if canon is None:
        raise EmptyPolyhedron("implicit equalities of an empty polyhedron")
    idxs = []
    for i, (a, b) in enumerate(p.ineq):
        got = strict_feasible(MixedSystem(p.dim, p.ineq, ((a, b),), p.eq))
        if not got.feasible:
            idxs.append(i)
    return tuple(idxs), canon


def affine_hull(p: HPoly) -> tuple[Row, ...]:
    canon = canonical_form(p)
    if canon is None:
        raise EmptyPolyhedron("affine hull of an empty polyhedron")
    return canon.eq


def ri_membership(p: HPoly, x: Vec) -> bool:
    canon = canonical_form(p)
    if canon is None:
        return False
    return canon.ri_system().satisfies(x)


# ---------------------------------------------------------------------------
# Fourier-Motzkin projection with strictness propagation


def _dedupe_mixed(m: MixedSystem) -> MixedSystem:
    weak: dict[tuple, Fraction] = {}
    strict: dict[tuple, Fraction] = {}
    false_weak = []
    false_strict = []
    for a, b in m.weak:
        if la.is_zero(a):
            if b < 0:
                false_weak.append((a, b))
            continue
        a, b = _norm_ineq(a, b)
        if a not in weak or b < weak[a]:
            weak[a] = b
    for a, b in m.strict:
        if la.is_zero(a):
            if b <= 0:
                false_strict.append((a, b))
            continue
        a, b = _norm_ineq(a, b)
        if a not in strict or b < strict[a]:
            strict[a] = b
    for a in list(weak):
        if a in strict and strict[a] <= weak[a]:
            del weak[a]
    eq = []
    for a, b in m.eq:
        if la.is_zero(a):
            if b != 0:
                false_weak.append((la.zeros(m.dim), Fraction(-1)))
            continue
        eq.append(_norm_eq(a, b))
    return MixedSystem(
        m.dim,
        tuple(sorted(weak.items())) + tuple(false_weak),
        tuple(sorted(strict.items())) + tuple(false_strict),
        tuple(sorted(set(eq))),
    )


def _prune_mixed(m: MixedSystem) -> MixedSystem:
    """Remove rows implied by the rest; empty systems collapse to a marker."""
    m = _dedupe_mixed(m)
    if not strict_feasible(m).feasible:
        return MixedSystem(m.dim, ((la.zeros(m.dim), Fraction(-1)),), (), ())
    rows = [(a, b, "w") for a, b in m.weak] + [(a, b, "s") for a, b in m.strict]
    i = 0
    while i < len(rows):
        a, b, kind = rows[i]
        others = rows[:i] + rows[i + 1 :]
        weak = tuple((x, y) for x, y, k in others if k == "w")
        strict = tuple((x, y) for x, y, k in others if k == "s")
        if kind == "w":
            # does any point of the rest violate a.x <= b?
            probe = MixedSystem(m.dim, weak, strict + ((la.neg(a), -b),), m.eq)
        else:
            probe = MixedSystem(m.dim, weak + ((la.neg(a), -b),), strict, m.eq)
        if strict_feasible(probe).feasible:
            i += 1
        else:
            rows.pop(i)
    return MixedSystem(
        m.dim,
        tuple((a, b) for a, b, k in rows if k == "w"),
        tuple((a, b) for a, b, k in rows if k == "s"),
        m.eq,
    )


def _drop_coord(v: Vec, idx: int) -> Vec:
    return v[:idx] + v[idx + 1 :]


def _eliminate(m: MixedSystem, idx: int) -> MixedSystem:
    pivot = next(((a, b) for a, b in m.eq if a[idx] != 0), None)
    if pivot is not None:
        pa, pb = pivot

        def subst(row: Row) -> Row:
            a, b = row
            if a[idx] != 0:
                f = a[idx] / pa[idx]
                a = la.sub(a, la.scale(pa, f))
                b = b - f * pb
            return _drop_coord(a, idx), b

        return MixedSystem(
            m.dim - 1,
            tuple(subst(r) for r in m.weak),
            tuple(subst(r) for r in m.strict),
            tuple(subst(r) for r in m.eq if r != pivot),
        )

    tagged = [(a, b, False) for a, b in m.weak] + [(a, b, True) for a, b in m.strict]
    stay_w, stay_s, pos, neg = [], [], [], []
    for a, b, is_strict in tagged:
        if a[idx] > 0:
            pos.append((a, b, is_strict))
        elif a[idx] < 0:
            neg.append((a, b, is_strict))
        elif is_strict:
            stay_s.append((_drop_coord(a, idx), b))
        else:
            stay_w.append((_drop_coord(a, idx), b))
    for (ap, bp, sp), (an, bn, sn) in itertools.product(pos, neg):
        coef_p = ap[idx]
        coef_n = -an[idx]
        a = la.add(la.scale(ap, coef_n), la.scale(an, coef_p))
        b = coef_n * bp + coef_p * bn
        row = (_drop_coord(a, idx), b)
        (stay_s if sp or sn else stay_w).append(row)
    return MixedSystem(
        m.dim - 1,
        tuple(stay_w),
        tuple(stay_s),
        tuple((_drop_coord(a, idx), b) for a, b in m.eq),
    )


def project_mixed(m: MixedSystem, keep: Sequence[int]) -> MixedSystem:
    """Exact shadow of the solution set onto the kept coordinates (in the
    order given), strictness propagated through every derived row."""
    keep = tuple(keep)
    if sorted(set(keep)) != sorted(keep) or any(
        i < 0 or i >= m.dim for i in keep
    ):
        raise DimensionMismatch("bad projection coordinates")
    if sorted(keep) != list(keep):
        raise DimensionMismatch("projection must keep coordinate order")
    if not keep:
        raise DimensionMismatch("cannot project onto no coordinates")
    return _project_cached(m, keep)


@lru_cache(maxsize=None)
def _project_cached(m: MixedSystem, keep: tuple[int, ...]) -> MixedSystem:
    # dedupe between eliminations; the LP-based prune only at the end
    current = _dedupe_mixed(m)
    drop = sorted(set(range(m.dim)) - set(keep), reverse=True)
    for idx in drop:
        current = _eliminate(current, idx)
        current = _dedupe_mixed(current)
    return _prune_mixed(current)


def project(p: HPoly, coords: Sequence[int]) -> HPoly:
    shadow = project_mixed(p.closed_system(), coords)
    assert not shadow.strict
    out = HPoly(len(coords), shadow.weak, shadow.eq)
    canon = canonical_form(out)
    return canon if canon is not None else empty_hpoly(len(coords))


# ---------------------------------------------------------------------------
# Double description


def _cone_generators(dim: int, rows: Sequence[Vec]) -> tuple[list[Vec], list[Vec]]:
    """Minimal (lineality, rays) generating {z : r.z >= 0 for all rows}."""
    lineality: list[Vec] = [la.unit(dim, i) for i in range(dim)]
    rays: list[Vec] = []
    processed: list[Vec] = []

    def zero_set(r: Vec) -> frozenset[int]:
        return frozenset(i for i, a in enumerate(processed) if la.dot(a, r) == 0)

    for a in rows:
        if la.is_zero(a):
            continue
        hit_at = next((j for j, l in enumerate(lineality) if la.dot(a, l) != 0), None)
        if hit_at is not None:
            hit = lineality.pop(hit_at)
            if la.dot(a, hit) < 0:
                hit = la.neg(hit)
            pv = la.dot(a, hit)
            lineality = [
                la.sub(l, la.scale(hit, la.dot(a, l) / pv)) for l in lineality
            ]
            rays = [
                la.primitive(la.sub(r, la.scale(hit, la.dot(a, r) / pv))) for r in rays
            ]
            rays.append(la.primitive(hit))
        else:
            vals = [la.dot(a, r) for r in rays]
            pos = [r for r, v in zip(rays, vals) if v > 0]
            zero = [r for r, v in zip(rays, vals) if v == 0]
            negs = [r for r, v in zip(rays, vals) if v < 0]
            if negs:
                fresh = pos + zero
                for rp, rn in itertools.product(pos, negs):
                    shared = zero_set(rp) & zero_set(rn)
                    blocked = any(
                        r3 is not rp
                        and r3 is not rn
                        and shared <= zero_set(r3)
                        for r3 in rays
                    )
                    if not blocked:
                        vp = la.dot(a, rp)
                        vn = la.dot(a, rn)
                        fresh.append(
                            la.primitive(
                                la.sub(la.scale(rn, vp), la.scale(rp, vn))
                            )
                        )
                seen = set()
                rays = []
                for r in fresh:
                    if r not in seen:
                        seen.add(r)
                        rays.append(r)
        processed.append(a)
    # canonical order for deterministic output
    lineality = [la.primitive(l) for l in la.row_space_basis(lineality)]
    return sorted(lineality), sorted(set(rays))


def to_vrep(p: HPoly, cap: int = DEFAULT_DIM_CAP) -> VPoly:
    if p.dim > cap:
        raise DimensionCapExceeded(f"dim {p.dim} exceeds cap {cap}")
    canon = canonical_form(p)
    if canon is None:
        return VPoly(p.dim)
    return _vrep_of_canonical(canon)


@lru_cache(maxsize=None)
def _vrep_of_canonical(canon: HPoly) -> VPoly:
    n = canon.dim
    rows = [la.unit(n + 1, 0)]
    for a, b in canon.ineq:
        rows.append((b,) + la.neg(a))
    for a, b in canon.eq:
        rows.append((b,) + la.neg(a))
        rows.append((-b,) + a)
    lineality, rays = _cone_generators(n + 1, rows)
    assert all(l[0] == 0 for l in lineality)
    points = []
    directions = set()
    for r in rays:
        if r[0] > 0:
            points.append(tuple(v / r[0] for v in r[1:]))
        else:
            assert r[0] == 0
            directions.add(la.primitive(r[1:]))
    for l in lineality:
        d = la.primitive(l[1:])
        directions.add(d)
        directions.add(la.neg(d))
    assert points, "canonical polyhedron must dehomogenize to a point"
    return VPoly(n, tuple(sorted(set(points))), tuple(sorted(directions)))


def to_hrep(v: VPoly) -> HPoly:
    if not v.points:
        return empty_hpoly(v.dim)
    rows = [(ONE,) + tuple(pt) for pt in v.points]
    rows += [(ZERO,) + tuple(r) for r in v.rays]
    lineality, rays = _cone_generators(v.dim + 1, rows)
    ineq = []
    eq = []
    for w in rays:
        beta, a = w[0], w[1:]
        ineq.append((la.neg(a), beta))
    for w in lineality:
        beta, a = w[0], w[1:]
        eq.append((a, -beta))
    canon = canonical_form(HPoly(v.dim, tuple(ineq), tuple(eq)))
    assert canon is not None
    return canon


def vrep_contains(v: VPoly, x: Vec) -> bool:
    """Exact membership in conv(points)+cone(rays) via one feasibility LP."""
    k, m = len(v.points), len(v.rays)
    if k == 0:
        return False
    dim = k + m
    eq_rows = []
    for j in range(v.dim):
        coeffs = [p[j] for p in v.points] + [r[j] for r in v.rays]
        eq_rows.append((la.vec(coeffs), Fraction(x[j])))
    eq_rows.append((la.vec([1] * k + [0] * m), ONE))
    nonneg = tuple((la.neg(la.unit(dim, i)), ZERO) for i in range(dim))
    system = MixedSystem(dim, nonneg, (), tuple(eq_rows))
    return feasible_point(system).status == "optimal"


# ---------------------------------------------------------------------------
# Faces and normal cones


@lru_cache(maxsize=None)
def faces(p: HPoly) -> tuple[HPoly, ...]:
    """Every nonempty face, canonical, the polyhedron itself included."""
    canon = canonical_form(p)
    if canon is None:
        return ()
    seen: set[HPoly] = set()
    stack = [canon]
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        for a, b in f.ineq:
            child = canonical_form(HPoly(f.dim, f.ineq, f.eq + ((a, b),)))
            if child is not None and child not in seen:
                stack.append(child)
    return tuple(sorted(seen, key=_hpoly_sort_key))


def _hpoly_sort_key(p: HPoly):
    return (len(p.eq), p.eq, p.ineq)


def normal_cone_at(p: HPoly, x: Vec) -> NormalConeRep:
    """Outward normals of active rows plus the equality span; generators are
    reduced to a minimal set up to positive scaling."""
    canon = canonical_form(p)
    if canon is None or not canon.contains(x):
        raise PointNotInSet("normal cone requested at a point outside the set")
    lineality = [la.primitive(a) for a in la.row_space_basis([a for a, _ in canon.eq])]
    gens = []
    for a, b in canon.ineq:
        if la.dot(a, x) == b:
            gens.append(la.primitive(a))
    gens = sorted(set(gens))
    # drop generators that already lie in the cone of the others
    i = 0
    while i < len(gens):
        g = gens[i]
        others = gens[:i] + gens[i + 1 :]
        k = len(others) + len(lineality)
        if k == 0:
            if la.is_zero(g):
                gens.pop(i)
                continue
            i += 1
            continue
        eq_rows = []
        for j in range(p.dim):
            coeffs = [o[j] for o in others] + [l[j] for l in lineality]
            eq_rows.append((la.vec(coeffs), g[j]))
        nonneg = tuple(
            (la.neg(la.unit(k, t)), ZERO) for t in range(len(others))
        )
        feas = feasible_point(MixedSystem(k, nonneg, (), tuple(eq_rows)))
        if feas.status == "optimal":
            gens.pop(i)
        else:
            i += 1
    return NormalConeRep(p.dim, tuple(gens), tuple(sorted(lineality)))


def normal_cone_hrep(v: VPoly, x: Vec) -> HPoly:
    """Normal cone at x of conv(points)+cone(rays), as an H-polyhedron in
    the normal variable: <w, p - x> <= 0 and <w, r> <= 0."""
    rows = [(la.sub(p, x), ZERO) for p in v.points] + [(r, ZERO) for r in v.rays]
    canon = canonical_form(HPoly(v.dim, tuple(rows)))
    assert canon is not None  # zero always belongs
    return canon


# ---------------------------------------------------------------------------
# Mixed cells: subtraction and decomposition into relatively open pieces


def _constraints_of(m: MixedSystem):
    return (
        [("w", a, b) for a, b in m.weak]
        + [("s", a, b) for a, b in m.strict]
        + [("e", a, b) for a, b in m.eq]
    )


def subtract_cells(
    cells: list[MixedSystem], sub: MixedSystem
) -> list[MixedSystem]:
    """Replace cells by cells covering exactly (union cells) minus sol(sub)."""
    out: list[MixedSystem] = []
    items = _constraints_of(sub)
    for cell in cells:
        if not strict_feasible(cell.combine(sub)).feasible:
            out.append(cell)  # disjoint from the subtrahend
            continue
        affirmed = cell
        for kind, a, b in items:
            if kind == "w":
                branches = [MixedSystem(cell.dim, (), ((la.neg(a), -b),), ())]
            elif kind == "s":
                branches = [MixedSystem(cell.dim, ((la.neg(a), -b),), (), ())]
            else:
                branches = [
                    MixedSystem(cell.dim, (), ((a, b),), ()),
                    MixedSystem(cell.dim, (), ((la.neg(a), -b),), ()),
                ]
            for br in branches:
                cand = affirmed.combine(br)
                if strict_feasible(cand).feasible:
                    out.append(_dedupe_mixed(cand))
                    if len(out) > MAX_CELLS:
                        raise DimensionCapExceeded("cell blowup in subtraction")
            if kind == "w":
                affirmed = affirmed.combine(MixedSystem(cell.dim, ((a, b),), (), ()))
            elif kind == "s":
                affirmed = affirmed.combine(MixedSystem(cell.dim, (), ((a, b),), ()))
            else:
                affirmed = affirmed.combine(MixedSystem(cell.dim, (), (), ((a, b),)))
            if not strict_feasible(affirmed).feasible:
                break  # later branches only add rows on top of affirmed
    return out


def difference_witness(
    start: list[MixedSystem], subtrahends: Iterable[MixedSystem]
) -> Optional[Vec]:
    """A point in (union of start cells) minus (union of subtrahends), or
    None when the difference is empty."""
    cells = [c for c in start if strict_feasible(c).feasible]
    for sub in subtrahends:
        if not cells:
            return None
        cells = subtract_cells(cells, sub)
    if not cells:
        return None
    wit = strict_feasible(cells[0]).witness
    assert wit is not None
    return wit


def cells_equal(c1: MixedSystem, c2: MixedSystem) -> bool:
    """Exact equality of two mixed-system solution sets."""
    return (
        difference_witness([c1], [c2]) is None
        and difference_witness([c2], [c1]) is None
    )


@lru_cache(maxsize=None)
def decompose_mixed(m: MixedSystem) -> tuple[HPoly, ...]:
    """Split the solution set of a mixed system into relatively open pieces,
    returned as the canonical closed bases whose ri's cover it."""
    if not strict_feasible(m).feasible:
        return ()
    base = canonical_form(HPoly(m.dim, m.weak + m.strict, m.eq))
    assert base is not None  # closure of a nonempty set
    pieces = {base}
    for a, b in base.ineq:
        deeper = decompose_mixed(
            MixedSystem(m.dim, m.weak, m.strict, m.eq + ((a, b),))
        )
        pieces.update(deeper)
    return tuple(sorted(pieces, key=_hpoly_sort_key))
