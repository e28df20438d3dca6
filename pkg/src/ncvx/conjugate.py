"""Support functions, Fenchel conjugates, and infimal convolutions.

One device drives the whole module: the epigraph of a support function,
read off the generators of a closed convex hull by polarity.  A point
generator p contributes the row <v, p> <= t and a ray generator r
contributes <v, r> <= 0.  A conjugate is the support function of an
epigraph evaluated at (w, -1), so the same rows express every conjugate,
and each infimal convolution becomes a single LP whose optimal split is
an exact witness.  Values are compared against an independent direct LP
on the primal side; a mismatch raises instead of returning.

Support values are closure- and hull-invariant, so all LPs run over
closed piece systems without losing exactness on the relatively open
input sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import linalg as la
from . import plfunc as pf
from .errors import (
    DimensionMismatch,
    EmptyDomain,
    IdentityViolated,
    QCViolated,
)
from .linalg import Mat, Vec, ZERO, ONE
from .lp import LPOutcome, MixedSystem, maximize, solve_lp, strict_feasible
from .ncset import NCSet, affine_preimage, closure_hull, from_closed_hpoly, intersect, ncset
from .plfunc import MINUS_INF, PLUS_INF, PLFunction, Value
from .polyhedron import HPoly, Row, canonical_form, empty_hpoly, hpoly, to_vrep
from .svmap import SVMap
from .variational import OVFInstance


@dataclass(frozen=True)
class SupportEvaluation:
    """sup{<v, x> : x in s}; the maximizer lies in cl(s) when finite.

    An unbounded direction is certified by ``ray``: a recession vector of
    cl(s) with a positive pairing against the queried vector.  The empty
    set evaluates to -inf with neither witness.
    """

    value: Value
    maximizer: Optional[Vec] = None
    ray: Optional[Vec] = None


@dataclass(frozen=True)
class SplitWitness:
    """An attained infimal-convolution split: w1 + w2 is the queried
    vector and parts are the two conjugate (or support) values, summing
    to the claimed optimum.  ``v`` carries the inner dual block when the
    convolution ranges over one."""

    w1: Vec
    w2: Vec
    v: Optional[Vec]
    parts: tuple[Fraction, Fraction]


# ---------------------------------------------------------------------------
# support functions


def support(s: NCSet, v) -> SupportEvaluation:
    """One LP per piece closure; the union's sup is their max.

    A feasible mixed cell is dense in its weak relaxation, so closed-row
    LPs are exact on the relatively open pieces.
    """
    v = la.vec(v)
    if len(v) != s.dim:
        raise DimensionMismatch("support vector length does not match dim")
    best: Optional[LPOutcome] = None
    for pc in s.pieces:
        out = maximize(v, pc.base.closed_system())
        if out.status == "unbounded":
            return SupportEvaluation(PLUS_INF, None, out.certificate)
        assert out.status == "optimal"  # pieces are nonempty by construction
        if best is None or out.value > best.value:
            best = out
    if best is None:
        return SupportEvaluation(MINUS_INF, None, None)
    return SupportEvaluation(best.value, best.witness, None)


@lru_cache(maxsize=None)
def support_epigraph(s: NCSet) -> HPoly:
    """epi sigma_s in R^(dim+1) by polarity from the generators of the
    closed convex hull; the empty set yields the whole space."""
    hull = closure_hull(s)
    if hull is None:
        return HPoly(s.dim + 1)
    vv = to_vrep(hull)
    rows = [(p + (-ONE,), ZERO) for p in vv.points]
    rows += [(r + (ZERO,), ZERO) for r in vv.rays]
    canon = canonical_form(hpoly(s.dim + 1, rows))
    assert canon is not None  # the origin satisfies every generator row
    return canon


def support_of_intersection(
    s1: NCSet, s2: NCSet, v
) -> tuple[Value, Optional[SplitWitness]]:
    """Support of s1 cap s2 as the infimal convolution of the two
    supports, with an attained split when finite.

    The direct side is an LP over the computed intersection; the split
    side is the epigraph-sum LP over (v1, t1, t2).  The two must agree
    exactly or IdentityViolated is raised.
    """
    v = la.vec(v)
    if s1.dim != s2.dim or len(v) != s1.dim:
        raise DimensionMismatch("sets and vector must share one dim")
    h1, h2 = closure_hull(s1), closure_hull(s2)
    if h1 is None or h2 is None:
        raise QCViolated("an empty set has no relative interior")
    if not strict_feasible(h1.ri_system().combine(h2.ri_system())).feasible:
        raise QCViolated("relative interiors of the sets do not meet")

    inter, _ = intersect(s1, s2)
    direct = support(inter, v)

    n = s1.dim
    e1, e2 = support_epigraph(s1), support_epigraph(s2)
    # variables (v1, t1, t2)
    ineq: list[Row] = []
    eq: list[Row] = []
    for rows, sink in ((e1.ineq, ineq), (e1.eq, eq)):
        for a, b in rows:
            sink.append((a[:n] + (a[n], ZERO), b))
    for rows, sink in ((e2.ineq, ineq), (e2.eq, eq)):
        for a, b in rows:
            sink.append((la.neg(a[:n]) + (ZERO, a[n]), b - la.dot(a[:n], v)))
    cost = la.zeros(n) + (ONE, ONE)
    out = solve_lp(cost, MixedSystem(n + 2, tuple(ineq), (), tuple(eq)))

    if direct.value == PLUS_INF:
        if out.status == "optimal":
            raise IdentityViolated("split LP finite while the support is not")
        return PLUS_INF, None
    assert out.status == "optimal", "split LP is bounded below under the qc"
    if out.value != direct.value:
        raise IdentityViolated(
            f"support {direct.value} != convolution {out.value} at {v}"
        )
    w = out.witness
    v1 = w[:n]
    return direct.value, SplitWitness(v1, la.sub(v, v1), None, (w[n], w[n + 1]))


# ---------------------------------------------------------------------------
# Fenchel conjugates of functions and set-valued mappings


@lru_cache(maxsize=None)
def conjugate_epigraph(f: PLFunction) -> HPoly:
    """epi f* in R^(n+1): generator (x, t) of cl(epi f) gives the row
    <w, x> - beta <= t and a ray (r, s) gives <w, r> <= s.

    A function that takes -inf anywhere produces an empty polyhedron,
    which is exactly f* identically +inf.
    """
    hull = closure_hull(f.epi)
    if hull is None:
        raise EmptyDomain("conjugate of the function with empty epigraph")
    vv = to_vrep(hull)
    rows = [(p[:-1] + (-ONE,), p[-1]) for p in vv.points]
    rows += [(r[:-1] + (ZERO,), r[-1]) for r in vv.rays]
    canon = canonical_form(hpoly(f.n + 1, rows))
    return empty_hpoly(f.n + 1) if canon is None else canon


def fenchel(f: PLFunction) -> PLFunction:
    """f* as a closed convex function, all epigraph faces included."""
    epi = conjugate_epigraph(f)
    if not strict_feasible(epi.closed_system()).feasible:
        return PLFunction(f.n, ncset(f.n + 1, []))
    return PLFunction(f.n, from_closed_hpoly(epi))


def fenchel_value(f: PLFunction, w) -> Value:
    """sup{<w, x> - f(x)} by direct LPs over the epigraph pieces."""
    w = la.vec(w)
    if len(w) != f.n:
        raise DimensionMismatch("conjugate argument length does not match n")
    ev = support(f.epi, w + (-ONE,))
    if ev.value == MINUS_INF:
        raise EmptyDomain("conjugate of the function with empty epigraph")
    return ev.value


def biconjugate(f: PLFunction) -> PLFunction:
    return fenchel(fenchel(f))


def svm_conjugate(fm: SVMap, uv) -> SupportEvaluation:
    """Conjugate of a set-valued mapping: the support of its graph."""
    uv = la.vec(uv)
    if len(uv) != fm.n + fm.p:
        raise DimensionMismatch("conjugate argument must live in R^(n+p)")
    return support(fm.graph, uv)


# ---------------------------------------------------------------------------
# conjugate of the optimal value function and its corollaries


def _full_graph(fm: SVMap) -> bool:
    hull = closure_hull(fm.graph)
    return hull is not None and not hull.ineq and not hull.eq


def ovf_conjugate(inst: OVFInstance, w) -> tuple[Value, Optional[SplitWitness]]:
    """mu*(w) as the convolution of f* and the graph support at (w, 0).

    The direct side evaluates mu* by LP on the assembled value function;
    the split side solves the epigraph-sum LP over (w1, v, t1, t2).  When
    the constraint graph is the whole space the split collapses to
    f*(w, 0) and no qualification is needed.
    """
    n, p = inst.fmap.n, inst.fmap.p
    w = la.vec(w)
    if len(w) != n:
        raise DimensionMismatch("conjugate argument length does not match n")
    full = _full_graph(inst.fmap)
    if not full and not inst.qc:
        raise QCViolated("ri(dom f) does not meet ri(gph F)")
    lhs = fenchel_value(inst.mu, w)

    if full:
        rhs = fenchel_value(inst.f, w + la.zeros(p))
        if rhs != lhs:
            raise IdentityViolated(f"mu*({w}) = {lhs} but f*(w, 0) = {rhs}")
        if lhs == PLUS_INF:
            return PLUS_INF, None
        return lhs, SplitWitness(w, la.zeros(n), la.zeros(p), (lhs, ZERO))

    ef = conjugate_epigraph(inst.f)  # over (w-block, v-block, t)
    eg = support_epigraph(inst.fmap.graph)
    m = n + p
    # variables (w1, v, t1, t2)
    ineq: list[Row] = []
    eq: list[Row] = []
    for rows, sink in ((ef.ineq, ineq), (ef.eq, eq)):
        for a, b in rows:
            sink.append((a[:m] + (a[m], ZERO), b))
    for rows, sink in ((eg.ineq, ineq), (eg.eq, eq)):
        for a, b in rows:
            # evaluated at ((w - w1), -v, t2)
            sink.append(
                (la.neg(a[:m]) + (ZERO, a[m]), b - la.dot(a[:n], w))
            )
    cost = la.zeros(m) + (ONE, ONE)
    out = solve_lp(cost, MixedSystem(m + 2, tuple(ineq), (), tuple(eq)))

    if lhs == PLUS_INF:
        if out.status == "optimal":
            raise IdentityViolated("convolution finite while mu* is not")
        return PLUS_INF, None
    assert out.status == "optimal", "convolution LP is bounded below here"
    if out.value != lhs:
        raise IdentityViolated(f"mu*({w}) = {lhs} != convolution {out.value}")
    z = out.witness
    w1, v = z[:n], z[n:m]
    return lhs, SplitWitness(w1, la.sub(w, w1), v, (z[m], z[m + 1]))


# ---------------------------------------------------------------------------
# sum and chain rules


def conjugate_sum(
    f1: PLFunction, f2: PLFunction, w
) -> tuple[Value, Optional[SplitWitness]]:
    """(f1 + f2)* versus the convolution of the two conjugates.

    The left side is an LP over the lifted set {(x, t1, t2) : (x, t1) in
    epi f1, (x, t2) in epi f2}; the right side is the epigraph-sum LP
    with its split witness.  Exact agreement is asserted.
    """
    if f1.n != f2.n:
        raise DimensionMismatch("summands must share the argument space")
    n = f1.n
    w = la.vec(w)
    if len(w) != n:
        raise DimensionMismatch("conjugate argument length does not match n")
    d1, d2 = closure_hull(pf.dom(f1)), closure_hull(pf.dom(f2))
    if d1 is None or d2 is None:
        raise QCViolated("a summand has empty domain")
    if not strict_feasible(d1.ri_system().combine(d2.ri_system())).feasible:
        raise QCViolated("relative interiors of the domains do not meet")

    # direct side over the lifted pairs
    lhs: Value = MINUS_INF
    cost = la.neg(w) + (ONE, ONE)  # minimize -<w,x> + t1 + t2
    for c1 in f1.epi.pieces:
        lift1 = _pad_cols(c1.base, (), 1)
        for c2 in f2.epi.pieces:
            lift2 = _pad_cols(c2.base, (n,), 0)
            cell = lift1.ri_system().combine(lift2.ri_system())
            if not strict_feasible(cell).feasible:
                continue
            out = solve_lp(cost, cell.closed())
            if out.status == "unbounded":
                lhs = PLUS_INF
                break
            assert out.status == "optimal"
            cand = -out.value
            if lhs == MINUS_INF or cand > lhs:
                lhs = cand
        if lhs == PLUS_INF:
            break
    assert lhs != MINUS_INF, "qc guarantees a common finite point"

    e1, e2 = conjugate_epigraph(f1), conjugate_epigraph(f2)
    # variables (w1, t1, t2)
    ineq: list[Row] = []
    eq: list[Row] = []
    for rows, sink in ((e1.ineq, ineq), (e1.eq, eq)):
        for a, b in rows:
            sink.append((a[:n] + (a[n], ZERO), b))
    for rows, sink in ((e2.ineq, ineq), (e2.eq, eq)):
        for a, b in rows:
            sink.append((la.neg(a[:n]) + (ZERO, a[n]), b - la.dot(a[:n], w)))
    cost = la.zeros(n) + (ONE, ONE)
    out = solve_lp(cost, MixedSystem(n + 2, tuple(ineq), (), tuple(eq)))

    if lhs == PLUS_INF:
        if out.status == "optimal":
            raise IdentityViolated("convolution finite while the sum's is not")
        return PLUS_INF, None
    assert out.status == "optimal", "convolution LP is bounded below under qc"
    if out.value != lhs:
        raise IdentityViolated(f"(f1+f2)*({w}) = {lhs} != split {out.value}")
    z = out.witness
    w1 = z[:n]
    return lhs, SplitWitness(w1, la.sub(w, w1), None, (z[n], z[n + 1]))


def _pad_cols(base: HPoly, at: tuple[int, ...], after: int) -> HPoly:
    """Insert zero columns at the given positions and pad the tail."""

    def stretch(rows):
        out = []
        for a, b in rows:
            lst = list(a)
            for pos in at:
                lst.insert(pos, ZERO)
            out.append((tuple(lst) + la.zeros(after), b))
        return tuple(out)

    return HPoly(base.dim + len(at) + after, stretch(base.ineq), stretch(base.eq))


def conjugate_chain(
    g: PLFunction, a_mat: Mat, w
) -> tuple[Value, Optional[Vec]]:
    """(g o A)*(w) = inf{g*(v) : A^T v = w}, with an attaining v.

    The left side is an LP over the pulled-back epigraph of g o A; the
    right side is an LP over epi g* with the adjoint equations.
    """
    a_mat = la.mat(a_mat)
    p = g.n
    if len(a_mat) != p:
        raise DimensionMismatch("matrix must map into the function's space")
    n = len(a_mat[0]) if a_mat else 0
    w = la.vec(w)
    if len(w) != n:
        raise DimensionMismatch("conjugate argument length does not match n")
    hull_d = closure_hull(pf.dom(g))
    if hull_d is None:
        raise QCViolated("inner function has empty domain")
    pulled = MixedSystem(
        n,
        (),
        tuple((la.mat_t_vec(a_mat, a), b) for a, b in hull_d.ineq),
        tuple((la.mat_t_vec(a_mat, a), b) for a, b in hull_d.eq),
    )
    if not strict_feasible(pulled).feasible:
        raise QCViolated("the range of A misses ri(dom g)")

    # (x, t) -> (Ax, t) pulls epi g back to epi (g o A)
    t_rows = tuple(a_mat[i] + (ZERO,) for i in range(p))
    t_rows += (la.zeros(n) + (ONE,),)
    composed, _ = affine_preimage(g.epi, t_rows, la.zeros(p + 1))
    lhs = support(composed, w + (-ONE,)).value
    assert lhs != MINUS_INF, "qc guarantees the composition is somewhere finite"

    eg = conjugate_epigraph(g)
    # variables (v, beta); adjoint rows A^T v = w
    eqs = [
        (tuple(a_mat[i][j] for i in range(p)) + (ZERO,), w[j]) for j in range(n)
    ]
    out = solve_lp(
        la.zeros(p) + (ONE,),
        MixedSystem(p + 1, eg.ineq, (), eg.eq + tuple(eqs)),
    )
    if lhs == PLUS_INF:
        if out.status == "optimal":
            raise IdentityViolated("chain LP finite while (g o A)* is not")
        return PLUS_INF, None
    if out.status != "optimal" or out.value != lhs:
        got = out.value if out.status == "optimal" else out.status
        raise IdentityViolated(f"(g o A)*({w}) = {lhs} != chain value {got}")
    return lhs, out.witness[:p]


def composite_conjugate_identity(
    g: PLFunction, h: PLFunction, a_mat: Mat, ystar
) -> Value:
    """For f(x, y) = g(x) + h(Ax + y): f*(0, y*) equals
    g*(-A^T y*) + h*(y*); both sides are computed and must agree."""
    a_mat = la.mat(a_mat)
    ystar = la.vec(ystar)
    if len(a_mat) != h.n or len(ystar) != h.n:
        raise DimensionMismatch("matrix and y* must live in h's space")
    n = len(a_mat[0]) if a_mat else 0
    if n != g.n:
        raise DimensionMismatch("matrix width must match g's space")
    f = pf.add_with_affine_inner(g, h, a_mat)
    lhs = fenchel_value(f, la.zeros(n) + ystar)
    rhs_g = fenchel_value(g, la.neg(la.mat_t_vec(a_mat, ystar)))
    rhs_h = fenchel_value(h, ystar)
    rhs = rhs_g + rhs_h if PLUS_INF not in (rhs_g, rhs_h) else PLUS_INF
    if lhs != rhs:
        raise IdentityViolated(f"f*(0, y*) = {lhs} != split sum {rhs}")
    return lhs
