"""Normal cones, subdifferentials, coderivatives, and optimal value
functions of parametric problems min_y f(x, y) over y in F(x).

Normal cones of nearly convex sets are computed on their closures: a
linear functional has the same sup over a set and its closure, so the
defining inequalities agree.  Subdifferentials and coderivatives then
fall out of one H-representation of the cone, sliced at a fixed block.

The value function mu is assembled exactly: clip the epigraph of the
objective to the graph of the constraint map, project out the inner
variable, and close each slice from below with the envelope operator.
This pins down boundary attainment pointwise, not just up to closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from . import plfunc as pl
from . import svmap as sv
from .errors import (
    DimensionMismatch,
    EmptySolutionMap,
    ImproperObjective,
    IdentityViolated,
    PointNotInGraph,
    PointNotInSet,
    QCViolated,
    ValueNotFinite,
)
from .linalg import Vec
from .lp import MixedSystem, strict_feasible
from .ncset import (
    NCSet,
    closure_hull,
    from_mixed,
    intersect,
    linear_image,
    membership,
    ncset,
    product,
    union,
    whole_space,
)
from .plfunc import PLFunction
from .polyhedron import (
    HPoly,
    NormalConeRep,
    canonical_form,
    empty_hpoly,
    normal_cone_at,
    normal_cone_hrep,
    polyhedron_equal,
    project_mixed,
    to_vrep,
)
from .svmap import SVMap


# ---------------------------------------------------------------------------
# normal cones of nearly convex sets


def normal_cone(omega: NCSet, x: Vec) -> NormalConeRep:
    """Normals v with <v, z - x> <= 0 over all z in omega; x must belong
    to omega itself, not merely its closure."""
    x = la.vec(x)
    if not membership(omega, x):
        raise PointNotInSet("normal cone requested at a point outside the set")
    hull = closure_hull(omega)
    assert hull is not None
    return normal_cone_at(hull, x)


def _normal_hrep_of(s: NCSet, x: Vec) -> HPoly:
    """H-representation of the normal cone of cl(s) at x, via generators."""
    hull = closure_hull(s)
    assert hull is not None
    return normal_cone_hrep(to_vrep(hull), x)


# ---------------------------------------------------------------------------
# subdifferentials


@dataclass(frozen=True)
class Subdifferential:
    """All v with <v, x - base> <= f(x) - f(base) everywhere."""

    set: HPoly

    def contains(self, v: Vec) -> bool:
        return self.set.contains(la.vec(v))

    def is_empty(self) -> bool:
        return canonical_form(self.set) is None


def subdifferential(f: PLFunction, x: Vec) -> Subdifferential:
    """{v : (v, -1) lies in the normal cone of the epigraph at (x, f(x))}."""
    x = la.vec(x)
    value = pl.eval_at(f, x)
    if not isinstance(value, Fraction):
        raise ValueNotFinite("subdifferential needs a finite value")
    cone = _normal_hrep_of(f.epi, x + (value,))
    n = f.n
    rows = [(a[:n], b + a[n]) for a, b in cone.ineq]
    rows += [(a[:n], b + a[n]) for a, b in cone.eq]
    rows += [(la.neg(a[:n]), -b - a[n]) for a, b in cone.eq]
    canon = canonical_form(HPoly(n, tuple(rows)))
    return Subdifferential(canon if canon is not None else empty_hpoly(n))


def coderivative(f: SVMap, point: Vec, v: Vec) -> HPoly:
    """D*F(point)(v) = {u : (u, -v) in the normal cone of the graph}."""
    point = la.vec(point)
    v = la.vec(v)
    if len(point) != f.n + f.p or len(v) != f.p:
        raise DimensionMismatch("point or direction has the wrong length")
    if not membership(f.graph, point):
        raise PointNotInGraph("coderivative requested off the graph")
    cone = _normal_hrep_of(f.graph, point)
    n = f.n

    def cut(row, flip=False):
        a, b = row
        lhs = a[:n] if not flip else la.neg(a[:n])
        rhs = b + la.dot(a[n:], v)
        return (lhs, rhs if not flip else -rhs)

    rows = [cut(r) for r in cone.ineq]
    rows += [cut(r) for r in cone.eq] + [cut(r, flip=True) for r in cone.eq]
    canon = canonical_form(HPoly(n, tuple(rows)))
    return canon if canon is not None else empty_hpoly(n)


# ---------------------------------------------------------------------------
# optimal value functions


@dataclass(frozen=True)
class OVFInstance:
    """mu(x) = inf{f(x, y) : y in F(x)} with everything precomputed."""

    f: PLFunction
    fmap: SVMap
    mu: PLFunction
    qc: bool


def build_ovf(f: PLFunction, fmap: SVMap) -> OVFInstance:
    """Assemble mu exactly; flag records ri(dom f) meets ri(gph F)."""
    n, p = fmap.n, fmap.p
    if f.n != n + p:
        raise DimensionMismatch("objective must take (x, y) jointly")
    if not pl.assert_proper(f):
        raise ImproperObjective("objective takes -inf")
    sv.require_valid_map(fmap)

    clipped, _ = intersect(f.epi, product(fmap.graph, whole_space(1)))
    keep = [la.unit(n + p + 1, i) for i in range(n)]
    keep.append(la.unit(n + p + 1, n + p))
    shadow = linear_image(clipped, tuple(keep))
    mu = PLFunction(n, pl.envelope(shadow))

    qc = False
    hull_d = closure_hull(pl.dom(f))
    hull_g = closure_hull(fmap.graph)
    if hull_d is not None and hull_g is not None:
        joint = hull_d.ri_system().combine(hull_g.ri_system())
        qc = strict_feasible(joint).feasible
    return OVFInstance(f, fmap, mu, qc)


def solution_map(inst: OVFInstance, x: Vec) -> NCSet:
    """Argmin set S(x) = {y in F(x) : f(x, y) = mu(x)}; exact, possibly
    empty when the infimum is not attained."""
    x = la.vec(x)
    value = pl.eval_at(inst.mu, x)
    if not isinstance(value, Fraction):
        raise ValueNotFinite("solution map needs a finite value")
    n, p = inst.fmap.n, inst.fmap.p
    pieces = []
    for gp in inst.fmap.graph.pieces:
        g_rows = _fix_front(gp.base.ri_system(), x)
        for ep in inst.f.epi.pieces:
            # y as free block: fix x up front and the value at the back
            e_rows = _fix_front(ep.base.ri_system(), x)
            e_rows = _fix_back(e_rows, (value,))
            cell = g_rows.combine(e_rows)
            if strict_feasible(cell).feasible:
                pieces.append(from_mixed(cell))
    if not pieces:
        return ncset(p, [])
    return union(*pieces)


def _fix_front(m: MixedSystem, x: Vec) -> MixedSystem:
    k = len(x)

    def cut(rows):
        return tuple((a[k:], b - la.dot(a[:k], x)) for a, b in rows)

    return MixedSystem(m.dim - k, cut(m.weak), cut(m.strict), cut(m.eq))


def _fix_back(m: MixedSystem, x: Vec) -> MixedSystem:
    k = len(x)
    cutoff = m.dim - k

    def cut(rows):
        return tuple(
            (a[:cutoff], b - la.dot(a[cutoff:], x)) for a, b in rows
        )

    return MixedSystem(cutoff, cut(m.weak), cut(m.strict), cut(m.eq))


# ---------------------------------------------------------------------------
# the subdifferential formula for mu


def rhs_formula(inst: OVFInstance, x: Vec, y: Vec) -> HPoly:
    """Union over (u, v) in the objective's subdifferential at (x, y) of
    u + D*F(x, y)(v), computed in one stroke as a projection of
    {(u, v, w, s) : (u, v, -1) in N(epi f), (w, -v) in N(gph F), s = u + w}."""
    x, y = la.vec(x), la.vec(y)
    n, p = inst.fmap.n, inst.fmap.p
    value = pl.eval_at(inst.f, x + y)
    assert isinstance(value, Fraction)
    cone_f = _normal_hrep_of(inst.f.epi, x + y + (value,))
    cone_g = _normal_hrep_of(inst.fmap.graph, x + y)

    total = 3 * n + p
    z = la.zeros

    def f_row(row):
        a, b = row
        return (a[:n] + a[n : n + p] + z(2 * n), b + a[n + p])

    def g_row(row):
        a, b = row
        return (z(n) + la.neg(a[n:]) + a[:n] + z(n), b)

    weak = [f_row(r) for r in cone_f.ineq] + [g_row(r) for r in cone_g.ineq]
    eqs = [f_row(r) for r in cone_f.eq] + [g_row(r) for r in cone_g.eq]
    for i in range(n):
        lhs = la.neg(la.unit(n, i)) + z(p) + la.neg(la.unit(n, i)) + la.unit(n, i)
        eqs.append((lhs, la.ZERO))
    cell = MixedSystem(total, tuple(weak), (), tuple(eqs))
    shadow = project_mixed(cell, list(range(2 * n + p, total)))
    assert not shadow.strict
    canon = canonical_form(HPoly(n, shadow.weak, shadow.eq))
    return canon if canon is not None else empty_hpoly(n)


def ovf_subdifferential(inst: OVFInstance, x: Vec, y: Vec) -> Subdifferential:
    """Subdifferential of mu at x, with the formula through (x, y) checked
    against the direct computation; the two must agree exactly."""
    x, y = la.vec(x), la.vec(y)
    if not inst.qc:
        raise QCViolated("overlap condition fails for this instance")
    value = pl.eval_at(inst.mu, x)
    if not isinstance(value, Fraction):
        raise ValueNotFinite("mu must be finite at the base point")
    sols = solution_map(inst, x)
    if not sols.pieces:
        raise EmptySolutionMap("no minimizer at the base point")
    if not membership(sols, y):
        raise PointNotInSet("y is not a minimizer at x")
    lhs = subdifferential(inst.mu, x)
    rhs = rhs_formula(inst, x, y)
    if not polyhedron_equal(lhs.set, rhs):
        raise IdentityViolated("value function subdifferential mismatch")
    return lhs
