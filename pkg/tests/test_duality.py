"""Perturbation duality across the four schemes.

Oracles:
  - every report is re-checked by substitution: primal witnesses are
    evaluated through the perturbation, dual witnesses swept through the
    generator conjugate, and the gap recomputed from both values;
  - the scheme formulas (Lagrangian dual, split dual, conjugate pair)
    are recomputed here from their definitions rather than trusted;
  - weak duality is asserted on unfiltered random instances, including
    ones that fail every qualification.
"""

import random
from fractions import Fraction as F

import pytest

from ncvx import duality as du
from ncvx import linalg as la
from ncvx import ncset as ns
from ncvx import oracle as orc
from ncvx import plfunc as pf
from ncvx import svmap as sv
from ncvx.errors import DimensionMismatch, ImproperPerturbation, UsageError
from ncvx.plfunc import MINUS_INF, PLUS_INF

from instances import abs_fn, interval_set


def _abs_pair():
    # f(x, y) = |x| + |x + y| on R^2, the classic well behaved program
    return pf.max_affine(
        2,
        [
            ((F(2), F(1)), F(0)),
            ((F(0), F(-1)), F(0)),
            ((F(0), F(1)), F(0)),
            ((F(-2), F(-1)), F(0)),
        ],
    )


# ---------------------------------------------------------------------------
# general perturbation scheme


def test_general_duality_worked():
    rep = du.general_duality(_abs_pair(), 1)
    assert rep.scheme == "general"
    assert rep.v_primal == 0 and rep.v_dual == 0 and rep.gap == 0
    assert rep.qc("parameter_origin_interior")
    assert rep.subdiff_nonempty
    assert rep.primal_witness is not None
    f = rep.perturbation
    assert pf.eval_at(f, rep.primal_witness + (F(0),)) == 0
    y = rep.dual_witness
    assert y is not None
    assert orc.generator_conjugate_oracle(f, (F(0),) + y) == 0


def test_general_duality_pathological_gap():
    # f(x, y) = x on the half plane y <= -1: value function never sees 0
    dom = ns.from_closed_hpoly(
        orc.ph.hpoly(2, ineq=[((F(0), F(1)), F(-1))])
    )
    f = pf.max_affine(2, [((F(1), F(0)), F(0))], domain=dom)
    rep = du.general_duality(f, 1)
    assert rep.v_primal == PLUS_INF
    assert rep.v_dual == MINUS_INF
    assert rep.gap == PLUS_INF
    assert not rep.qc("parameter_origin_interior")
    assert not rep.subdiff_nonempty


def test_general_duality_rejects_bad_split():
    with pytest.raises(DimensionMismatch):
        du.general_duality(_abs_pair(), 2)
    with pytest.raises(DimensionMismatch):
        du.general_duality(_abs_pair(), 0)


def test_general_duality_rejects_improper():
    f = pf.plfunction(2, ns.ncset(3, []))
    with pytest.raises(ImproperPerturbation):
        du.general_duality(f, 1)


def test_weak_duality_on_unfiltered_randoms():
    rng = random.Random(3)
    for _ in range(15):
        f = orc._random_plf(rng, orc.ULTRA_SPEC, 2)
        rep = du.general_duality(f, 1)
        assert rep.v_primal >= rep.v_dual
        if rep.subdiff_nonempty:
            assert rep.gap == 0


# ---------------------------------------------------------------------------
# Lagrange scheme


def test_lagrange_duality_worked():
    # minimize x subject to 1 - x <= 0: value 1, multiplier 1
    phi = pf.max_affine(1, [((F(1),), F(0))])
    theta = ns.whole_space(1)
    a_mat = la.mat([[F(-1)]])
    c = (F(1),)
    k = pf.nonneg_orthant(1)
    rep = du.lagrange_cone_duality(phi, theta, a_mat, c, k)
    assert rep.scheme == "lagrange"
    assert rep.v_primal == 1 and rep.v_dual == 1 and rep.gap == 0
    assert rep.qc("cone_ri_overlap")
    assert rep.primal_witness == (F(1),)
    assert rep.dual_witness == (F(1),)  # the multiplier
    assert rep.v_dual_formula == 1


def test_lagrange_dual_value_formula():
    # L(y*) = inf{x + y* . g(x)} for the program above
    phi = pf.max_affine(1, [((F(1),), F(0))])
    theta = ns.whole_space(1)
    g = sv.affine_plus_cone(
        la.mat([[F(-1)]]), (F(1),), pf.nonneg_orthant(1).k
    )
    # y* = -1 prices the constraint: inf x - (1 - x) is attained nowhere
    assert du.lagrange_dual_value(phi, theta, g, (F(-1),)) == 1
    assert du.lagrange_dual_value(phi, theta, g, (F(1),)) == MINUS_INF
    assert du.lagrange_dual_value(phi, theta, g, (F(0),)) == MINUS_INF


def test_lagrange_duality_with_set_constraint():
    rng = random.Random(41)
    for _ in range(8):
        theta, phi, g = orc._anchored_program(rng, orc.ULTRA_SPEC, 1, 1)
        rep = du.lagrange_duality(phi, theta, g)
        assert rep.qc("triple_ri_overlap")
        assert rep.qc("origin_in_ri_image")
        assert rep.gap == 0
        assert rep.v_primal >= rep.v_dual


def test_lagrange_vacuous_constraint_set():
    phi = pf.max_affine(1, [((F(1),), F(0))])
    theta = ns.ncset(1, [])
    g = sv.affine_plus_cone(la.mat([[F(1)]]), (F(0),), pf.nonneg_orthant(1).k)
    rep = du.lagrange_duality(phi, theta, g)
    assert rep.v_primal == PLUS_INF and rep.v_dual == PLUS_INF
    assert rep.gap == 0


def test_cone_multiplier_lands_in_dual_cone():
    rng = random.Random(43)
    for _ in range(6):
        n, q = 1, rng.randint(1, 2)
        a = orc._anchor_point(rng, n, orc.DEFAULT_SPEC)
        theta = orc.random_ncset(rng, n, orc.ULTRA_SPEC, anchor=a)
        phi = orc._random_plf(rng, orc.ULTRA_SPEC, n, anchor=a)
        k = orc._random_cone(rng, orc.DEFAULT_SPEC, q)
        a_mat = orc._random_matrix(rng, q, n)
        c = la.sub(la.neg(la.mat_vec(a_mat, a)), orc._cone_interior(k))
        rep = du.lagrange_cone_duality(phi, theta, a_mat, c, k)
        assert rep.qc("cone_ri_overlap")
        assert rep.gap == 0
        if rep.dual_witness is not None:
            assert pf.dual_cone(k).k.contains(rep.dual_witness)


def test_vg_closed_form_matches_direct():
    a_mat = la.mat([[F(1)], [F(-2)]])
    c = (F(1), F(0))
    k = pf.nonneg_orthant(2)
    g = sv.affine_plus_cone(a_mat, c, k.k)
    for x in [(F(0),), (F(1),), (F(-2),)]:
        for ystar in [(F(0), F(0)), (F(-1), F(-1)), (F(1), F(0)), (F(-2), F(-3))]:
            assert du.vg_value(g, x, ystar) == du.vg_closed_form(
                a_mat, c, k, x, ystar
            )


# ---------------------------------------------------------------------------
# Fenchel-Lagrange scheme


def test_fenchel_lagrange_worked():
    phi = pf.max_affine(1, [((F(1),), F(0))])
    theta = ns.whole_space(1)
    g = sv.affine_plus_cone(
        la.mat([[F(-1)]]), (F(1),), pf.nonneg_orthant(1).k
    )
    rep = du.fenchel_lagrange_duality(phi, theta, g)
    assert rep.scheme == "fenchel-lagrange"
    assert rep.v_primal == 1 and rep.v_dual == 1 and rep.gap == 0
    assert rep.dual_witness == (F(1), F(-1))
    ustar, ystar = rep.dual_witness[:1], rep.dual_witness[1:]
    assert du.h1_value(phi, theta, g, ustar, ystar) == 1
    assert rep.v_dual_formula == rep.v_dual


def test_fenchel_lagrange_random():
    rng = random.Random(47)
    for _ in range(6):
        theta, phi, g = orc._anchored_program(rng, orc.ULTRA_SPEC, 1, 1)
        rep = du.fenchel_lagrange_duality(phi, theta, g)
        assert rep.gap == 0
        assert rep.v_dual_formula == rep.v_dual


# ---------------------------------------------------------------------------
# Fenchel scheme


def test_fenchel_duality_worked():
    g = abs_fn()
    h = pf.max_affine(1, [((F(1),), F(-1)), ((F(-1),), F(1))])  # |y - 1|
    rep = du.fenchel_duality(g, h, la.mat([[F(1)]]))
    assert rep.scheme == "fenchel"
    assert rep.v_primal == 1 and rep.v_dual == 1 and rep.gap == 0
    assert rep.qc("affine_image_ri_overlap")
    assert rep.dual_witness == (F(-1),)
    y = rep.dual_witness
    pg = orc.generator_conjugate_oracle(g, la.neg(y))
    ph = orc.generator_conjugate_oracle(h, y)
    assert -(pg + ph) == 1


def test_fenchel_duality_random():
    rng = random.Random(53)
    for _ in range(6):
        x0 = orc._anchor_point(rng, 1, orc.DEFAULT_SPEC)
        a_mat = orc._random_matrix(rng, 1, 1)
        g = orc._random_plf(rng, orc.ULTRA_SPEC, 1, anchor=x0)
        h = orc._random_plf(rng, orc.ULTRA_SPEC, 1, anchor=la.mat_vec(a_mat, x0))
        rep = du.fenchel_duality(g, h, a_mat)
        assert rep.qc("affine_image_ri_overlap")
        assert rep.gap == 0
        assert rep.v_dual_formula == rep.v_dual


# ---------------------------------------------------------------------------
# report plumbing


def test_report_qc_lookup():
    rep = du.general_duality(_abs_pair(), 1)
    assert rep.qc("parameter_origin_interior") is True
    with pytest.raises(KeyError):
        rep.qc("no_such_flag")
    assert rep.all_qc()


def test_qualification_report_dispatch():
    phi = pf.max_affine(1, [((F(1),), F(0))])
    theta = ns.whole_space(1)
    g = sv.affine_plus_cone(
        la.mat([[F(-1)]]), (F(1),), pf.nonneg_orthant(1).k
    )
    flags = du.qualification_report("lagrange", phi=phi, theta=theta, g=g)
    assert {f.name for f in flags} == {"triple_ri_overlap", "origin_in_ri_image"}
    flags2 = du.qualification_report("general", f=_abs_pair(), p=1)
    assert [f.name for f in flags2] == ["parameter_origin_interior"]
    with pytest.raises(UsageError):
        du.qualification_report("no-such-scheme")


def test_duality_reports_are_deterministic():
    rep1 = du.general_duality(_abs_pair(), 1)
    rep2 = du.general_duality(_abs_pair(), 1)
    assert rep1 == rep2
