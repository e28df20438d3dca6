"""Set-valued mappings with nearly convex graphs.

A mapping is stored as its graph, an NCSet in the product of input and
output space. Evaluation slices the graph pieces at a point (a slice of a
relatively open piece is again relatively open, so the slice is exact with
no extra decomposition). Domains, ranges, images, inverse images,
restrictions, sums, and compositions all reduce to the set calculus on
graphs: products, intersections, coordinate permutations, and projections.

Each operation whose relative-interior formula needs an overlap
qualification returns a qc flag computed by one strict feasibility check
on the relevant relative interiors. The certify_* helpers verify the ri
formulas themselves as exact set identities: both sides are mixed cells
(or their shadows under projection), compared by two-way subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg as la
from .errors import DimensionMismatch, EmptyDomain
from .linalg import Mat, Vec
from .lp import MixedSystem, Row, strict_feasible
from .ncset import (
    NCSet,
    ROPoly,
    closure_hull,
    from_closed_hpoly,
    intersect,
    linear_image,
    ncset,
    permute_coords,
    preimage,
    product,
    relative_interior,
    require_valid,
    whole_space,
)
from .polyhedron import HPoly, cells_equal, project_mixed


@dataclass(frozen=True)
class SVMap:
    n: int
    p: int
    graph: NCSet

    def __post_init__(self):
        if self.graph.dim != self.n + self.p:
            raise DimensionMismatch("graph dim must be input dim + output dim")


def svmap(n: int, p: int, graph: NCSet) -> SVMap:
    return SVMap(n, p, graph)


def require_valid_map(f: SVMap) -> None:
    require_valid(f.graph)


def _slice_rows(rows: Sequence[Row], x: Vec, keep_from: int):
    """Substitute the first block by x, keeping the tail coordinates."""
    out = []
    for a, b in rows:
        head, tail = a[:keep_from], a[keep_from:]
        out.append((tail, b - la.dot(head, x)))
    return tuple(out)


def eval_at(f: SVMap, x: Vec) -> NCSet:
    """F(x) as an exact union of relatively open pieces."""
    if len(x) != f.n:
        raise DimensionMismatch("evaluation point dim mismatch")
    x = la.vec(x)
    bases = []
    for pc in f.graph.pieces:
        strict = _slice_rows(pc.base.ineq, x, f.n)
        eq = _slice_rows(pc.base.eq, x, f.n)
        if strict_feasible(MixedSystem(f.p, (), strict, eq)).feasible:
            bases.append(HPoly(f.p, strict, eq))
    return ncset(f.p, bases)


def _first_block(n: int, total: int) -> Mat:
    return tuple(la.unit(total, i) for i in range(n))


def _last_block(p: int, total: int) -> Mat:
    return tuple(la.unit(total, total - p + i) for i in range(p))


def dom(f: SVMap) -> NCSet:
    return linear_image(f.graph, _first_block(f.n, f.n + f.p))


def rge(f: SVMap) -> NCSet:
    return linear_image(f.graph, _last_block(f.p, f.n + f.p))


def inverse(f: SVMap) -> SVMap:
    perm = list(range(f.n, f.n + f.p)) + list(range(f.n))
    return SVMap(f.p, f.n, permute_coords(f.graph, perm))


def ri_graph(f: SVMap) -> ROPoly:
    require_valid_map(f)
    ri = relative_interior(f.graph)
    if ri is None:
        raise EmptyDomain("mapping with empty graph")
    return ri


def certify_ri_graph(f: SVMap, points: Sequence[Vec]) -> bool:
    """Fiber law spot check: (x,y) in ri(graph) iff x in ri(dom) and
    y in ri(F(x))."""
    ri = ri_graph(f)
    ri_dom = relative_interior(dom(f))
    for xy in points:
        x, y = xy[: f.n], xy[f.n :]
        lhs = ri.contains(la.vec(xy))
        rhs = False
        if ri_dom.contains(x):
            fiber = relative_interior(eval_at(f, x))
            rhs = fiber is not None and fiber.contains(y)
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# images, inverse images, restriction


def _ri_cell(s: NCSet) -> Optional[MixedSystem]:
    hull = closure_hull(s)
    return None if hull is None else hull.ri_system()


def _pad_cell(cell: MixedSystem, before: int, after: int) -> MixedSystem:
    def pad(rows):
        return tuple(
            (la.zeros(before) + a + la.zeros(after), b) for a, b in rows
        )

    return MixedSystem(
        before + cell.dim + after,
        pad(cell.weak),
        pad(cell.strict),
        pad(cell.eq),
    )


def image_of_set(f: SVMap, omega: NCSet) -> tuple[NCSet, bool, bool]:
    """F(omega), the ri-overlap qualification flag, and an exact check of
    the image ri formula (ri of the image = union of ri F(x) over
    x in ri(omega) and ri(dom F))."""
    if omega.dim != f.n:
        raise DimensionMismatch("set dim does not match input dim")
    clipped, _ = intersect(f.graph, product(omega, whole_space(f.p)))
    result = linear_image(clipped, _last_block(f.p, f.n + f.p))

    qc = False
    dom_cell = _ri_cell(dom(f))
    omega_cell = _ri_cell(omega)
    if dom_cell is not None and omega_cell is not None:
        qc = strict_feasible(dom_cell.combine(omega_cell)).feasible

    holds = _image_ri_formula_holds(f, omega, result) if qc else False
    return result, qc, holds


def _image_ri_formula_holds(f: SVMap, omega: NCSet, result: NCSet) -> bool:
    graph_cell = _ri_cell(f.graph)
    omega_cell = _ri_cell(omega)
    lhs_cell = _ri_cell(result)
    if graph_cell is None or omega_cell is None:
        return lhs_cell is None
    lifted = graph_cell.combine(_pad_cell(omega_cell, 0, f.p))
    shadow = project_mixed(lifted, list(range(f.n, f.n + f.p)))
    if lhs_cell is None:
        return not strict_feasible(shadow).feasible
    return cells_equal(lhs_cell, shadow)


def inverse_image(f: SVMap, theta: NCSet) -> tuple[NCSet, bool]:
    got, qc, _ = image_of_set(inverse(f), theta)
    return got, qc


def certify_inverse_image(f: SVMap, theta: NCSet) -> bool:
    """ri(F^{-1}(theta)) = {x in ri(dom F) : ri F(x) meets ri(theta)},
    checked exactly via the graph shadow."""
    got, _ = inverse_image(f, theta)
    lhs_cell = _ri_cell(got)
    graph_cell = _ri_cell(f.graph)
    theta_cell = _ri_cell(theta)
    if graph_cell is None or theta_cell is None:
        return lhs_cell is None
    lifted = graph_cell.combine(_pad_cell(theta_cell, f.n, 0))
    shadow = project_mixed(lifted, list(range(f.n)))
    if lhs_cell is None:
        return not strict_feasible(shadow).feasible
    return cells_equal(lhs_cell, shadow)


def restrict(f: SVMap, omega: NCSet) -> tuple[SVMap, bool]:
    if omega.dim != f.n:
        raise DimensionMismatch("set dim does not match input dim")
    clipped, _ = intersect(f.graph, product(omega, whole_space(f.p)))
    qc = False
    dom_cell = _ri_cell(dom(f))
    omega_cell = _ri_cell(omega)
    if dom_cell is not None and omega_cell is not None:
        qc = strict_feasible(dom_cell.combine(omega_cell)).feasible
    return SVMap(f.n, f.p, clipped), qc


def certify_restrict(f: SVMap, omega: NCSet) -> bool:
    """ri gph(F|omega) = ri gph F intersected with ri(omega) x R^p."""
    got, _ = restrict(f, omega)
    lhs_cell = _ri_cell(got.graph)
    graph_cell = _ri_cell(f.graph)
    omega_cell = _ri_cell(omega)
    if graph_cell is None or omega_cell is None:
        return lhs_cell is None
    rhs = graph_cell.combine(_pad_cell(omega_cell, 0, f.p))
    if lhs_cell is None:
        return not strict_feasible(rhs).feasible
    return cells_equal(lhs_cell, rhs)


# ---------------------------------------------------------------------------
# sum and composition


def map_sum(f1: SVMap, f2: SVMap) -> tuple[SVMap, bool]:
    if (f1.n, f1.p) != (f2.n, f2.p):
        raise DimensionMismatch("summed mappings must share both dims")
    n, p = f1.n, f1.p
    pairs = product(f1.graph, f2.graph)  # (x1, y1, x2, y2)
    diag = ncset(
        2 * (n + p),
        [
            HPoly(
                2 * (n + p),
                (),
                tuple(
                    (
                        la.sub(
                            la.unit(2 * (n + p), i),
                            la.unit(2 * (n + p), n + p + i),
                        ),
                        la.ZERO,
                    )
                    for i in range(n)
                ),
            )
        ],
    )
    glued, _ = intersect(pairs, diag)
    rows = [la.unit(2 * (n + p), i) for i in range(n)]
    rows += [
        la.add(
            la.unit(2 * (n + p), n + i), la.unit(2 * (n + p), 2 * n + p + i)
        )
        for i in range(p)
    ]
    graph = linear_image(glued, tuple(rows))
    qc = False
    c1, c2 = _ri_cell(dom(f1)), _ri_cell(dom(f2))
    if c1 is not None and c2 is not None:
        qc = strict_feasible(c1.combine(c2)).feasible
    return SVMap(n, p, graph), qc


def certify_sum(f1: SVMap, f2: SVMap) -> bool:
    """ri gph(F1+F2) = image of {x in both ri graphs} under (x,y1,y2) ->
    (x, y1+y2), checked exactly."""
    got, _ = map_sum(f1, f2)
    lhs_cell = _ri_cell(got.graph)
    g1, g2 = _ri_cell(f1.graph), _ri_cell(f2.graph)
    if g1 is None or g2 is None:
        return lhs_cell is None
    n, p = f1.n, f1.p
    total = n + 2 * p + p  # (x, y1, y2, s)
    lift1 = MixedSystem(
        total,
        tuple((a[:n] + a[n:] + la.zeros(2 * p), b) for a, b in g1.weak),
        tuple((a[:n] + a[n:] + la.zeros(2 * p), b) for a, b in g1.strict),
        tuple((a[:n] + a[n:] + la.zeros(2 * p), b) for a, b in g1.eq),
    )
    lift2 = MixedSystem(
        total,
        tuple((a[:n] + la.zeros(p) + a[n:] + la.zeros(p), b) for a, b in g2.weak),
        tuple((a[:n] + la.zeros(p) + a[n:] + la.zeros(p), b) for a, b in g2.strict),
        tuple((a[:n] + la.zeros(p) + a[n:] + la.zeros(p), b) for a, b in g2.eq),
    )
    addrow = tuple(
        (
            la.sub(
                la.add(la.unit(total, n + i), la.unit(total, n + p + i)),
                la.unit(total, n + 2 * p + i),
            ),
            la.ZERO,
        )
        for i in range(p)
    )
    lifted = lift1.combine(lift2).combine(MixedSystem(total, (), (), addrow))
    shadow = project_mixed(
        lifted, list(range(n)) + list(range(n + 2 * p, total))
    )
    if lhs_cell is None:
        return not strict_feasible(shadow).feasible
    return cells_equal(lhs_cell, shadow)


def compose(f: SVMap, g: SVMap) -> tuple[SVMap, bool]:
    """g after f; the qc flag reports ri(rge f) meets ri(dom g)."""
    if f.p != g.n:
        raise DimensionMismatch("inner dims do not match")
    left = product(f.graph, whole_space(g.p))  # (x, y, z)
    right = product(whole_space(f.n), g.graph)
    glued, _ = intersect(left, right)
    total = f.n + f.p + g.p
    rows = [la.unit(total, i) for i in range(f.n)]
    rows += [la.unit(total, f.n + f.p + i) for i in range(g.p)]
    graph = linear_image(glued, tuple(rows))
    qc = False
    c1, c2 = _ri_cell(rge(f)), _ri_cell(dom(g))
    if c1 is not None and c2 is not None:
        qc = strict_feasible(c1.combine(c2)).feasible
    return SVMap(f.n, g.p, graph), qc


def certify_compose(f: SVMap, g: SVMap) -> bool:
    got, _ = compose(f, g)
    lhs_cell = _ri_cell(got.graph)
    gf, gg = _ri_cell(f.graph), _ri_cell(g.graph)
    if gf is None or gg is None:
        return lhs_cell is None
    lifted = _pad_cell(gf, 0, g.p).combine(_pad_cell(gg, f.n, 0))
    shadow = project_mixed(
        lifted, list(range(f.n)) + list(range(f.n + f.p, f.n + f.p + g.p))
    )
    if lhs_cell is None:
        return not strict_feasible(shadow).feasible
    return cells_equal(lhs_cell, shadow)


# ---------------------------------------------------------------------------
# composite constructors


def _triple_qc(theta: NCSet, f: SVMap, g: SVMap) -> bool:
    cells = [_ri_cell(dom(f)), _ri_cell(dom(g)), _ri_cell(theta)]
    if any(c is None for c in cells):
        return False
    joint = cells[0]
    for c in cells[1:]:
        joint = joint.combine(c)
    return strict_feasible(joint).feasible


def build_phi(theta: NCSet, f: SVMap, g: SVMap) -> tuple[SVMap, bool]:
    """(x,y) maps to F(x) when x lies in theta and y in G(x); graph over
    (x, y, z) with x in R^n, y in R^q, z in R^p."""
    if theta.dim != f.n or g.n != f.n:
        raise DimensionMismatch("component input dims must agree")
    n, p, q = f.n, f.p, g.p
    # (x, z) + y block, permuted to (x, y, z)
    s1 = product(f.graph, whole_space(q))
    perm = list(range(n)) + list(range(n + p, n + p + q)) + list(range(n, n + p))
    s1 = permute_coords(s1, perm)
    s2 = product(theta, whole_space(q + p))
    s3 = product(g.graph, whole_space(p))
    glued, _ = intersect(s1, s2)
    glued, _ = intersect(glued, s3)
    return SVMap(n + q, p, glued), _triple_qc(theta, f, g)


def build_psi(theta: NCSet, f: SVMap, g: SVMap) -> tuple[SVMap, bool]:
    """(x,u,y) maps to F(x+u) when x lies in theta and y in G(x); graph
    over (x, u, y, z)."""
    if theta.dim != f.n or g.n != f.n:
        raise DimensionMismatch("component input dims must agree")
    n, p, q = f.n, f.p, g.p
    total = 2 * n + q + p
    # F(x+u): pull the graph of F back under (x,u,y,z) -> (x+u, z)
    t_rows = [
        la.add(la.unit(total, i), la.unit(total, n + i)) for i in range(n)
    ]
    t_rows += [la.unit(total, 2 * n + q + i) for i in range(p)]
    s1, _ = preimage(f.graph, tuple(t_rows))
    s2 = product(theta, whole_space(n + q + p))
    # (x, y) in gph G with u, z free: product gives (x, y, u, z)
    s3 = product(g.graph, whole_space(n + p))
    perm = (
        list(range(n))
        + list(range(n + q, n + q + n))
        + list(range(n, n + q))
        + list(range(2 * n + q, total))
    )
    s3 = permute_coords(s3, perm)
    glued, _ = intersect(s1, s2)
    glued, _ = intersect(glued, s3)
    return SVMap(2 * n + q, p, glued), _triple_qc(theta, f, g)


def sum_with_affine_inner(f: SVMap, g: SVMap, a: Mat) -> SVMap:
    """(x,y) maps to F(x) + G(Ax + y); nearly convex from properness alone,
    no qualification condition."""
    n, q = f.n, f.p
    p = g.n
    if g.p != q:
        raise DimensionMismatch("output dims must agree")
    if len(a) != p or (a and len(a[0]) != n):
        raise DimensionMismatch("matrix shape must be p x n")
    if not dom(f).pieces or not dom(g).pieces:
        raise EmptyDomain("both mappings must have nonempty domains")
    total = n + p + q
    # H1: (x,y) -> F(x): graph {(x,y,z) : (x,z) in gph F}
    s1 = product(f.graph, whole_space(p))  # (x, z, y)
    perm = list(range(n)) + list(range(n + q, n + q + p)) + list(range(n, n + q))
    h1 = SVMap(n + p, q, permute_coords(s1, perm))
    # H2: (x,y) -> G(Ax+y): pull gph G back under (x,y,z) -> (Ax+y, z)
    t_rows = [a[i] + la.unit(p, i) + la.zeros(q) for i in range(p)]
    t_rows += [la.zeros(n + p) + la.unit(q, i) for i in range(q)]
    s2, _ = preimage(g.graph, tuple(t_rows))
    h2 = SVMap(n + p, q, s2)
    got, _ = map_sum(h1, h2)
    return got


# ---------------------------------------------------------------------------
# concrete map builders


def affine_map(a: Mat, c: Vec) -> SVMap:
    """x -> {Ax + c} as a single-valued mapping."""
    p = len(a)
    n = len(a[0]) if a else 0
    rows = tuple(
        (a[i] + la.neg(la.unit(p, i)), -Fraction(c[i])) for i in range(p)
    )
    return SVMap(n, p, ncset(n + p, [HPoly(n + p, (), rows)]))


def const_map(n: int, s: NCSet) -> SVMap:
    return SVMap(n, s.dim, product(whole_space(n), s))


def affine_plus_cone(a: Mat, c: Vec, cone: HPoly) -> SVMap:
    """x -> Ax + c + K for a polyhedral cone K given by homogeneous rows."""
    p = len(a)
    n = len(a[0]) if a else 0
    if cone.dim != p:
        raise DimensionMismatch("cone must live in the output space")
    # k.(y - Ax - c) <= 0 becomes (-A^T k).x + k.y <= k.c
    def shift(rows):
        out = []
        for k, b in rows:
            assert b == 0, "cone rows must be homogeneous"
            out.append((la.neg(la.mat_t_vec(a, k)) + k, la.dot(k, la.vec(c))))
        return tuple(out)

    graph = from_closed_hpoly(HPoly(n + p, shift(cone.ineq), shift(cone.eq)))
    return SVMap(n, p, graph)
