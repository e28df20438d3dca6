"""Nearly convex set calculus tests.

Membership of every constructed set is cross-checked against a lattice
scan that evaluates piece rows directly, independent of the hull and
subtraction machinery under test.
"""

import itertools
from fractions import Fraction as F

import pytest

from instances import (
    UNIT_SQUARE,
    half_open_interval,
    open_square,
    point_set,
    punctured_square,
    two_points,
)
from ncvx import linalg as la
from ncvx.errors import DimensionMismatch, NotNearlyConvex
from ncvx.lp import MixedSystem
from ncvx.ncset import (
    NCSet,
    closure,
    closure_hull,
    contains_set,
    from_closed_hpoly,
    from_closure_and_faces,
    from_mixed,
    intersect,
    is_nearly_convex,
    linear_image,
    membership,
    minkowski_sum,
    ncset,
    preimage,
    product,
    relative_interior,
    ropoly,
    set_equal,
    union,
)
from ncvx.polyhedron import box, canonical_form, faces, hpoly, polyhedron_equal

OMEGA_B = punctured_square()


def grid(lo, hi, den, dim):
    axis = [F(k, den) for k in range(lo * den, hi * den + 1)]
    return [la.vec(p) for p in itertools.product(axis, repeat=dim)]


# ---------------------------------------------------------------------------
# membership


def test_membership_punctured_square():
    assert not membership(OMEGA_B, (F(1, 2), F(0)))
    assert membership(OMEGA_B, (F(1, 2), F(1, 2)))
    assert membership(OMEGA_B, (F(1, 4), F(0)))


def test_membership_matches_grid_oracle():
    for x in grid(-1, 2, 16, 2):
        in_square = 0 <= x[0] <= 1 and 0 <= x[1] <= 1
        expected = in_square and x != (F(1, 2), F(0))
        assert membership(OMEGA_B, x) == expected, x


def test_membership_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        membership(OMEGA_B, (F(0),))


# ---------------------------------------------------------------------------
# near convexity


def test_punctured_square_is_nearly_convex():
    ok, wit = is_nearly_convex(OMEGA_B)
    assert ok and wit is None


def test_two_points_fail_with_midpoint_witness():
    ok, wit = is_nearly_convex(two_points())
    assert not ok
    assert wit == (F(1, 2),)


def test_open_square_alone_is_nearly_convex():
    ok, _ = is_nearly_convex(open_square())
    assert ok


def test_square_missing_interior_fails():
    # boundary faces without the interior: closure is convex but
    # ri(closure) is not covered
    shell = ncset(
        2, [f for f in faces(UNIT_SQUARE) if f.eq]
    )
    ok, wit = is_nearly_convex(shell)
    assert not ok
    assert wit is not None
    sq = canonical_form(UNIT_SQUARE)
    assert sq.ri_system().satisfies(wit)


def test_empty_set_is_nearly_convex():
    ok, wit = is_nearly_convex(NCSet(2, ()))
    assert ok and wit is None


# ---------------------------------------------------------------------------
# closure / relative interior / affine hull


def test_closure_and_ri_of_punctured_square():
    assert polyhedron_equal(closure(OMEGA_B), UNIT_SQUARE)
    ri = relative_interior(OMEGA_B)
    assert ri.base == canonical_form(UNIT_SQUARE)
    assert ri.contains(la.vec([F(1, 2), F(1, 2)]))
    assert not ri.contains(la.vec([0, 0]))


def test_closure_and_ri_of_half_open_interval():
    s = half_open_interval()
    assert polyhedron_equal(closure(s), box([(0, 1)]))
    ri = relative_interior(s)
    assert ri.contains(la.vec([F(1, 2)])) and not ri.contains(la.vec([1]))


def test_closure_of_single_point():
    s = point_set(3, -2)
    pt = la.vec([3, -2])
    assert closure(s).contains(pt)
    assert relative_interior(s).contains(pt)
    assert closure(s).eq and not closure(s).ineq


def test_closure_rejects_invalid_set():
    with pytest.raises(NotNearlyConvex):
        closure(two_points())


def test_prop_ri_closure_sandwich():
    for s in (OMEGA_B, half_open_interval(), open_square()):
        hull = closure(s)
        ri = relative_interior(s)
        for x in grid(-1, 2, 8, s.dim):
            if ri.contains(x):
                assert s.contains(x)
            if s.contains(x):
                assert hull.contains(x)


# ---------------------------------------------------------------------------
# product


def test_product_of_half_open_intervals():
    s = product(half_open_interval(), half_open_interval())
    assert s.dim == 2
    for x in grid(-1, 2, 4, 2):
        expected = 0 < x[0] <= 1 and 0 < x[1] <= 1
        assert s.contains(x) == expected, x
    ok, _ = is_nearly_convex(s)
    assert ok
    assert relative_interior(s).base == canonical_form(UNIT_SQUARE)


def test_product_with_point_embeds():
    s = product(OMEGA_B, point_set(5))
    assert s.contains(la.vec([F(1, 4), 0, 5]))
    assert not s.contains(la.vec([F(1, 2), 0, 5]))
    assert not s.contains(la.vec([F(1, 4), 0, 4]))


def test_product_of_relative_interiors_is_single_piece():
    s = product(open_square(), open_square())
    assert len(s.pieces) == 1
    assert s.pieces[0].base == canonical_form(box([(0, 1)] * 4))


# ---------------------------------------------------------------------------
# intersect


def test_intersect_half_open_squares():
    s1 = product(half_open_interval(), from_closed_hpoly(box([(0, 1)])))
    s2 = product(from_closed_hpoly(box([(0, 1)])), half_open_interval())
    got, qc = intersect(s1, s2)
    assert qc
    for x in grid(-1, 2, 4, 2):
        expected = 0 < x[0] <= 1 and 0 < x[1] <= 1
        assert got.contains(x) == expected, x
    ok, _ = is_nearly_convex(got)
    assert ok
    assert relative_interior(got).base == canonical_form(UNIT_SQUARE)


def test_intersect_touching_intervals_flags_qc():
    s1 = from_closed_hpoly(box([(0, 1)]))
    s2 = from_closed_hpoly(box([(1, 2)]))
    got, qc = intersect(s1, s2)
    assert not qc
    assert set_equal(got, point_set(1))


def test_intersect_idempotent():
    got, qc = intersect(OMEGA_B, OMEGA_B)
    assert qc
    assert set_equal(got, OMEGA_B)


def test_intersect_closure_identity_under_qc():
    s1 = product(half_open_interval(), from_closed_hpoly(box([(0, 1)])))
    s2 = product(from_closed_hpoly(box([(0, 1)])), half_open_interval())
    got, qc = intersect(s1, s2)
    assert qc
    lhs = closure(got)
    rhs = canonical_form(
        hpoly(
            2,
            ineq=list(closure(s1).ineq) + list(closure(s2).ineq),
            eq=list(closure(s1).eq) + list(closure(s2).eq),
        )
    )
    assert polyhedron_equal(lhs, rhs)


# ---------------------------------------------------------------------------
# linear image / preimage / minkowski


def test_image_of_punctured_square_is_whole_interval():
    t = la.mat([[1, 0]])
    got = linear_image(OMEGA_B, t)
    full = from_closed_hpoly(box([(0, 1)]))
    assert set_equal(got, full)
    assert relative_interior(got).base == canonical_form(box([(0, 1)]))


def test_identity_image_preserves_set():
    got = linear_image(OMEGA_B, la.identity(2))
    assert set_equal(got, OMEGA_B)


def test_ri_commutes_with_linear_image():
    t = la.mat([[1, 1]])
    s = OMEGA_B
    lhs = relative_interior(linear_image(s, t))
    rhs = linear_image(NCSet(2, (relative_interior(s),)), t)
    assert len(rhs.pieces) == 1
    assert lhs.base == rhs.pieces[0].base


def test_open_interval_minkowski_sum():
    s = ncset(1, [box([(0, 1)])])  # ri[0,1]
    got = minkowski_sum(s, s)
    assert len(got.pieces) == 1
    assert got.pieces[0].base == canonical_form(box([(0, 2)]))


def test_preimage_of_half_open_interval():
    t = la.mat([[1, 0]])
    got, qc = preimage(half_open_interval(), t)
    assert qc
    assert got.dim == 2
    for x in grid(-1, 2, 4, 2):
        assert got.contains(x) == (0 < x[0] <= 1), x


def test_preimage_identity_and_zero_map():
    got, qc = preimage(OMEGA_B, la.identity(2))
    assert qc and set_equal(got, OMEGA_B)
    zero = la.mat([[0], [0]])
    got, qc = preimage(ncset(2, [UNIT_SQUARE]), zero)  # open square, 0 on boundary
    assert not got.pieces and not qc
    got2, qc2 = preimage(from_closed_hpoly(UNIT_SQUARE), zero)
    assert got2.pieces and qc2 is False  # 0 is on the boundary, not the ri


# ---------------------------------------------------------------------------
# constructors and comparisons


def test_from_mixed_half_open_square():
    m = MixedSystem(
        2,
        (
            ((F(-1), F(0)), F(0)),
            ((F(0), F(1)), F(1)),
            ((F(0), F(-1)), F(0)),
        ),
        (((F(1), F(0)), F(1)),),
        (),
    )
    s = from_mixed(m)
    for x in grid(-1, 2, 8, 2):
        assert s.contains(x) == m.satisfies(x), x


def test_from_closure_and_faces_sugar():
    sq = canonical_form(UNIT_SQUARE)
    # closure plus the ri of the face where row 0 is active
    s = from_closure_and_faces(sq, [[0]])
    assert len(s.pieces) == 2
    a, b = sq.ineq[0]
    face = canonical_form(HPolyLike := hpoly(2, ineq=list(sq.ineq), eq=[(a, b)]))
    assert {pc.base for pc in s.pieces} == {sq, face}


def test_union_and_containment():
    s = union(open_square(), point_set(0, 0))
    assert contains_set(from_closed_hpoly(UNIT_SQUARE), s)
    assert not contains_set(s, from_closed_hpoly(UNIT_SQUARE))
    assert not set_equal(s, open_square())
    assert set_equal(union(OMEGA_B, open_square()), OMEGA_B)
