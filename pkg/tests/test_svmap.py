"""Set-valued mapping tests.

The running example maps x to [x, x+1] on the domain [0,2]; every slice,
projection, and composition result below was computed by hand from that
parallelogram graph, and membership claims are re-checked pointwise
against the graph on a lattice.
"""

import itertools
import random
from fractions import Fraction as F

import pytest

from instances import interval_set, point_set, strip_map
from ncvx import linalg as la
from ncvx.errors import DimensionMismatch, EmptyDomain
from ncvx.ncset import (
    NCSet,
    from_closed_hpoly,
    is_nearly_convex,
    ncset,
    relative_interior,
    set_equal,
    whole_space,
)
from ncvx.polyhedron import HPoly, box, canonical_form, hpoly
from ncvx.svmap import (
    SVMap,
    affine_map,
    affine_plus_cone,
    build_phi,
    build_psi,
    certify_compose,
    certify_inverse_image,
    certify_restrict,
    certify_ri_graph,
    certify_sum,
    compose,
    const_map,
    dom,
    eval_at,
    image_of_set,
    inverse,
    inverse_image,
    map_sum,
    restrict,
    rge,
    ri_graph,
    sum_with_affine_inner,
)

STRIP = strip_map()


def grid(lo, hi, den, dim):
    axis = [F(k, den) for k in range(lo * den, hi * den + 1)]
    return [la.vec(p) for p in itertools.product(axis, repeat=dim)]


def identity_map(n):
    return affine_map(la.identity(n), la.zeros(n))


# ---------------------------------------------------------------------------
# evaluation, domain, range, inverse


def test_eval_slice_of_closed_graph():
    got = eval_at(STRIP, (F(1),))
    assert set_equal(got, interval_set(1, 2))


def test_eval_matches_graph_membership_on_lattice():
    for x in grid(-1, 3, 4, 1):
        got = eval_at(STRIP, x)
        for y in grid(-1, 4, 4, 1):
            assert got.contains(y) == STRIP.graph.contains(x + y), (x, y)


def test_dom_and_rge():
    assert set_equal(dom(STRIP), interval_set(0, 2))
    assert set_equal(rge(STRIP), interval_set(0, 3))


def test_inverse_eval():
    got = eval_at(inverse(STRIP), (F(2),))
    assert set_equal(got, interval_set(1, 2))


def test_inverse_involution():
    back = inverse(inverse(STRIP))
    assert set_equal(back.graph, STRIP.graph)


# ---------------------------------------------------------------------------
# ri of the graph


def test_ri_graph_of_strip():
    ri = ri_graph(STRIP)
    strict = hpoly(
        2, ineq=[((1, 0), 2), ((-1, 0), 0), ((1, -1), 0), ((-1, 1), 1)]
    )
    assert ri.base == canonical_form(strict)
    assert ri.contains(la.vec([1, F(3, 2)]))
    assert not ri.contains(la.vec([1, 1]))


def test_ri_graph_of_constant_map():
    f = const_map(1, interval_set(0, 1))
    ri = ri_graph(f)
    assert ri.contains(la.vec([5, F(1, 2)]))
    assert not ri.contains(la.vec([5, 1]))


def test_ri_graph_of_point():
    f = SVMap(1, 1, point_set(3, 4))
    assert ri_graph(f).base == canonical_form(
        hpoly(2, eq=[((1, 0), 3), ((0, 1), 4)])
    )


def test_ri_graph_fiber_law_on_lattice():
    pts = grid(0, 2, 2, 2)
    assert certify_ri_graph(STRIP, pts)


def test_eval_nearly_convex_inside_ri_dom():
    ri_dom = relative_interior(dom(STRIP))
    for x in grid(0, 2, 4, 1):
        if ri_dom.contains(x):
            fx = eval_at(STRIP, x)
            ok, _ = is_nearly_convex(fx)
            assert ok
            assert relative_interior(fx) is not None


# ---------------------------------------------------------------------------
# image / inverse image / restriction


def test_image_of_interval():
    got, qc, holds = image_of_set(STRIP, interval_set(0, 1))
    assert qc and holds
    assert set_equal(got, interval_set(0, 2))
    assert relative_interior(got).base == canonical_form(box([(0, 2)]))


def test_image_of_point():
    got, qc, holds = image_of_set(STRIP, point_set(1))
    assert qc and holds
    assert set_equal(got, interval_set(1, 2))


def test_image_qc_fails_on_boundary_overlap():
    omega = from_closed_hpoly(hpoly(1, ineq=[((1,), 0)]))  # x <= 0
    got, qc, _ = image_of_set(STRIP, omega)
    assert not qc
    assert set_equal(got, interval_set(0, 1))  # F(0) pointwise


def test_inverse_image_of_point():
    got, qc = inverse_image(STRIP, point_set(2))
    assert qc
    assert set_equal(got, interval_set(1, 2))
    assert certify_inverse_image(STRIP, point_set(2))


def test_inverse_image_of_range_is_domain():
    got, qc = inverse_image(STRIP, rge(STRIP))
    assert qc
    assert set_equal(got, dom(STRIP))


def test_inverse_image_boundary_point_flags_qc():
    got, qc = inverse_image(STRIP, point_set(3))
    assert not qc
    assert set_equal(got, point_set(2))


def test_restrict_to_subinterval():
    got, qc = restrict(STRIP, interval_set(0, 1))
    assert qc
    expected = hpoly(
        2, ineq=[((1, 0), 1), ((-1, 0), 0), ((1, -1), 0), ((-1, 1), 1)]
    )
    assert ri_graph(got).base == canonical_form(expected)
    assert certify_restrict(STRIP, interval_set(0, 1))


def test_restrict_to_superset_is_identity():
    got, qc = restrict(STRIP, interval_set(-5, 5))
    assert qc
    assert set_equal(got.graph, STRIP.graph)


def test_restict_to_boundary_point_flags_qc():
    got, qc = restrict(STRIP, point_set(2))
    assert not qc
    assert set_equal(eval_at(got, (F(2),)), interval_set(2, 3))


# ---------------------------------------------------------------------------
# sum and composition


def test_sum_constant_and_identity():
    f1 = const_map(1, interval_set(0, 1))
    f2 = identity_map(1)
    got, qc = map_sum(f1, f2)
    assert qc
    expected = from_closed_hpoly(hpoly(2, ineq=[((1, -1), 0), ((-1, 1), 1)]))
    assert set_equal(got.graph, expected)
    assert certify_sum(f1, f2)


def test_sum_with_zero_map():
    f1 = STRIP
    f2 = const_map(1, point_set(0))
    got, qc = map_sum(f1, f2)
    assert qc
    assert set_equal(got.graph, STRIP.graph)


def test_sum_disjoint_domains_flags_qc():
    f1 = restrict(identity_map(1), interval_set(0, 1))[0]
    f2 = restrict(identity_map(1), interval_set(1, 2))[0]
    got, qc = map_sum(f1, f2)
    assert not qc
    assert set_equal(got.graph, point_set(1, 2))


def test_compose_with_doubling():
    g = affine_map(la.mat([[2]]), la.vec([0]))
    got, qc = compose(STRIP, g)
    assert qc
    expected = from_closed_hpoly(
        hpoly(2, ineq=[((1, 0), 2), ((-1, 0), 0), ((2, -1), 0), ((-2, 1), 2)])
    )
    assert set_equal(got.graph, expected)
    assert certify_compose(STRIP, g)


def test_compose_with_identity():
    got, qc = compose(STRIP, identity_map(1))
    assert qc
    assert set_equal(got.graph, STRIP.graph)


def test_compose_boundary_overlap_flags_qc():
    g = restrict(identity_map(1), interval_set(3, 4))[0]
    got, qc = compose(STRIP, g)
    assert not qc
    assert set_equal(got.graph, point_set(2, 3))


# ---------------------------------------------------------------------------
# composite constructors


def test_build_phi_worked_example():
    theta = interval_set(0, 2)
    g = identity_map(1)
    phi, qc = build_phi(theta, STRIP, g)
    assert qc
    assert phi.n == 2 and phi.p == 1
    got = eval_at(phi, (F(1), F(1)))
    assert set_equal(got, interval_set(1, 2))
    # y must match G(x) = {x}
    assert not eval_at(phi, (F(1), F(0))).pieces
    ok, _ = is_nearly_convex(phi.graph)
    assert ok


def test_build_phi_with_trivial_components():
    theta = whole_space(1)
    g = const_map(1, whole_space(1))
    phi, qc = build_phi(theta, STRIP, g)
    assert qc
    for x in grid(0, 2, 2, 1):
        for y in grid(-1, 1, 1, 1):
            lhs = eval_at(phi, x + y)
            rhs = eval_at(STRIP, x)
            assert set_equal(lhs, rhs)


def test_build_phi_qc_failure():
    phi, qc = build_phi(point_set(0), STRIP, identity_map(1))
    assert not qc


def test_build_psi_worked_example():
    theta = interval_set(0, 2)
    g = identity_map(1)
    psi, qc = build_psi(theta, STRIP, g)
    assert qc
    assert psi.n == 3 and psi.p == 1
    got = eval_at(psi, (F(1), F(0), F(1)))
    assert set_equal(got, interval_set(1, 2))
    ok, _ = is_nearly_convex(psi.graph)
    assert ok


def test_build_psi_u_slice_reproduces_phi():
    theta = interval_set(0, 2)
    g = identity_map(1)
    phi, _ = build_phi(theta, STRIP, g)
    psi, _ = build_psi(theta, STRIP, g)
    for x in grid(0, 2, 2, 1):
        for y in grid(0, 2, 2, 1):
            assert set_equal(
                eval_at(psi, (x[0], F(0), y[0])), eval_at(phi, (x[0], y[0]))
            )


def test_build_psi_shift_moves_the_fiber():
    theta = interval_set(0, 2)
    g = identity_map(1)
    psi, _ = build_psi(theta, STRIP, g)
    got = eval_at(psi, (F(1), F(1), F(1)))  # F(x+u) = F(2) = [2,3]
    assert set_equal(got, interval_set(2, 3))


# ---------------------------------------------------------------------------
# sum with affine inner map


def test_sum_with_affine_inner_worked_example():
    f = const_map(1, interval_set(0, 1))
    g = identity_map(1)
    phi = sum_with_affine_inner(f, g, la.mat([[1]]))
    assert phi.n == 2 and phi.p == 1
    got = eval_at(phi, (F(1), F(2)))  # [0,1] + {1+2}
    assert set_equal(got, interval_set(3, 4))
    ok, _ = is_nearly_convex(phi.graph)
    assert ok


def test_sum_with_affine_inner_zero_outer():
    f = STRIP
    g = const_map(1, point_set(0))
    phi = sum_with_affine_inner(f, g, la.mat([[1]]))
    for x in grid(0, 2, 2, 1):
        assert set_equal(eval_at(phi, (x[0], F(0))), eval_at(STRIP, x))


def test_sum_with_affine_inner_disjoint_domains_still_nearly_convex():
    f = restrict(const_map(1, interval_set(0, 1)), interval_set(0, 1))[0]
    g = restrict(identity_map(1), interval_set(5, 6))[0]
    phi = sum_with_affine_inner(f, g, la.mat([[1]]))
    ok, _ = is_nearly_convex(phi.graph)
    assert ok
    # x in [0,1] and x + y in [5,6]: at x=0, y=5: [0,1] + {5}
    assert set_equal(eval_at(phi, (F(0), F(5))), interval_set(5, 6))
    assert not eval_at(phi, (F(0), F(8))).pieces


def test_sum_with_affine_inner_needs_nonempty_domains():
    f = SVMap(1, 1, NCSet(2, ()))
    with pytest.raises(EmptyDomain):
        sum_with_affine_inner(f, identity_map(1), la.mat([[1]]))


def test_affine_plus_cone_graph():
    # G(x) = {x} + R_+ in R^1: epigraph-like graph y >= x
    k = HPoly(1, (((F(-1),), F(0)),))
    g = affine_plus_cone(la.mat([[1]]), la.vec([0]), k)
    assert set_equal(
        g.graph, from_closed_hpoly(hpoly(2, ineq=[((1, -1), 0)]))
    )


# ---------------------------------------------------------------------------
# random cross-checks


def test_random_maps_fiber_law_and_involution():
    rng = random.Random(19)
    done = 0
    for _ in range(60):
        if done >= 20:
            break
        rows = [
            (la.vec([rng.randint(-2, 2), rng.randint(-2, 2)]), F(rng.randint(0, 3)))
            for _ in range(3)
        ]
        p = HPoly(2, tuple(rows) + box([(-2, 2)] * 2).ineq)
        if canonical_form(p) is None:
            continue
        done += 1
        f = SVMap(1, 1, from_closed_hpoly(p))
        assert set_equal(inverse(inverse(f)).graph, f.graph)
        pts = grid(-2, 2, 1, 2)
        assert certify_ri_graph(f, pts)
    assert done >= 10
