"""Extended-real piecewise linear functions carried by their epigraphs.

A function is stored as the set epi = {(x, lam) : f(x) <= lam} in R^{n+1},
a nearly convex set whenever the function is.  Two structural rules make
the set an honest epigraph: it absorbs upward vertical rays, and every
nonempty vertical slice attains its infimum (or is unbounded below).  The
``envelope`` operator rebuilds the epigraph induced by an arbitrary set,
so validity is the single exact equality envelope(s) = s.

Values are Fractions, with ``math.inf`` / ``-math.inf`` for the two
extended values.  Improper functions are representable; most downstream
constructions require ``assert_proper`` first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from . import linalg as la
from . import svmap as sv
from .errors import DimensionMismatch, InvalidEpigraph, UsageError
from .linalg import Mat, Vec
from .lp import MixedSystem, Row, solve_lp, strict_feasible
from .ncset import (
    NCSet,
    affine_preimage,
    closure_hull,
    contains_set,
    from_closed_hpoly,
    intersect,
    is_nearly_convex,
    minkowski_sum,
    ncset,
    product,
    require_valid,
    whole_space,
)
from .polyhedron import (
    HPoly,
    canonical_form,
    cells_equal,
    decompose_mixed,
    hpoly,
    polyhedron_equal,
    project_mixed,
    to_vrep,
)
from .svmap import SVMap

Value = Union[Fraction, float]

PLUS_INF = math.inf
MINUS_INF = -math.inf


@dataclass(frozen=True)
class PLFunction:
    """f: R^n -> [-inf, +inf] with polyhedrally representable epigraph."""

    n: int
    epi: NCSet

    def __post_init__(self):
        if self.epi.dim != self.n + 1:
            raise DimensionMismatch("epigraph must live in R^(n+1)")


def plfunction(n: int, epi: NCSet) -> PLFunction:
    return PLFunction(n, epi)


# ---------------------------------------------------------------------------
# concrete constructors


def max_affine(n: int, rows: Sequence[tuple], domain: Optional[NCSet] = None) -> PLFunction:
    """max_i(a_i.x + b_i), plus the indicator of ``domain`` when given.

    An empty ``rows`` list gives the constant -inf on the domain.
    """
    epi_rows = []
    for a, b in rows:
        a = la.vec(a)
        if len(a) != n:
            raise DimensionMismatch("affine row length does not match n")
        # lam >= a.x + b
        epi_rows.append((a + (-la.ONE,), -Fraction(b)))
    if epi_rows:
        epi = from_closed_hpoly(hpoly(n + 1, epi_rows))
    else:
        epi = whole_space(n + 1)
    if domain is not None:
        if domain.dim != n:
            raise DimensionMismatch("domain dim does not match n")
        epi, _ = intersect(epi, product(domain, whole_space(1)))
    return PLFunction(n, epi)


def indicator(s: NCSet) -> PLFunction:
    """0 on s, +inf elsewhere."""
    upward = from_closed_hpoly(hpoly(1, [((-la.ONE,), la.ZERO)]))
    return PLFunction(s.dim, product(s, upward))


def affine_function(a, b) -> PLFunction:
    a = la.vec(a)
    return max_affine(len(a), [(a, b)])


def const_function(n: int, v) -> PLFunction:
    return max_affine(n, [(la.zeros(n), v)])


# ---------------------------------------------------------------------------
# evaluation, domain, properness


def _lambda_slice(base: HPoly, x: Vec) -> tuple[tuple[Row, ...], tuple[Row, ...]]:
    """Rows over the last coordinate after fixing the first n to x."""
    n = len(x)

    def cut(row: Row) -> Row:
        a, b = row
        return (a[n:], b - la.dot(a[:n], x))

    return tuple(cut(r) for r in base.ineq), tuple(cut(r) for r in base.eq)


def eval_at(f: PLFunction, x: Vec) -> Value:
    """inf{lam : (x, lam) in epi}; +inf off the domain, -inf when the
    slice is unbounded below."""
    x = la.vec(x)
    if len(x) != f.n:
        raise DimensionMismatch("point length does not match input dim")
    best: Optional[Fraction] = None
    for pc in f.epi.pieces:
        ineq, eq = _lambda_slice(pc.base, x)
        if not strict_feasible(MixedSystem(1, (), ineq, eq)).feasible:
            continue
        out = solve_lp((la.ONE,), MixedSystem(1, ineq, (), eq))
        if out.status == "unbounded":
            return MINUS_INF
        assert out.status == "optimal"
        if best is None or out.value < best:
            best = out.value
    return PLUS_INF if best is None else best


def dom(f: PLFunction) -> NCSet:
    """Projection of the epigraph onto the argument block."""
    return sv.dom(epigraphical_map(f))


def assert_proper(f: PLFunction) -> bool:
    """True iff f never takes -inf.

    A piece produces -inf exactly when its closed base recedes straight
    down, which is a sign condition on the lam column of its rows.
    """
    for pc in f.epi.pieces:
        base = pc.base
        down_ok = all(a[f.n] >= 0 for a, _ in base.ineq) and all(
            a[f.n] == 0 for a, _ in base.eq
        )
        if down_ok:
            return False
    return True


# ---------------------------------------------------------------------------
# the epigraphical mapping E_f


def epigraphical_map(f: PLFunction) -> SVMap:
    """x => {lam : f(x) <= lam}; its graph is the epigraph itself."""
    return SVMap(f.n, 1, f.epi)


def from_epigraphical(e: SVMap) -> PLFunction:
    """Inverse of epigraphical_map; rejects maps whose graphs break the
    epigraph rules."""
    if e.p != 1:
        raise UsageError("epigraphical mappings have one output coordinate")
    f = PLFunction(e.n, e.graph)
    require_valid_function(f)
    return f


# ---------------------------------------------------------------------------
# epigraph validity via the lower envelope


def _pad_after_mixed(m: MixedSystem, extra: int) -> MixedSystem:
    pad = la.zeros(extra)

    def widen(rows):
        return tuple((a + pad, b) for a, b in rows)

    return MixedSystem(m.dim + extra, widen(m.weak), widen(m.strict), widen(m.eq))


@lru_cache(maxsize=None)
def envelope(s: NCSet) -> NCSet:
    """Epigraph of x -> inf{lam : (x, lam) in s}.

    Always contains s; equals s exactly when s is a legitimate epigraph.
    Per piece: the x-shadow of the piece (relatively open) crossed with
    the upward closure of the closed base, split into open cells.
    """
    n = s.dim - 1
    xs = list(range(n))
    bases = []
    for pc in s.pieces:
        q = pc.base
        shadow = project_mixed(q.ri_system(), xs)
        # upward closure of q, computed over (x, lam', lam) with lam' <= lam
        chain = (la.zeros(n) + (la.ONE, -la.ONE), la.ZERO)
        lifted = MixedSystem(
            n + 2,
            tuple((a + (la.ZERO,), b) for a, b in q.ineq) + (chain,),
            (),
            tuple((a + (la.ZERO,), b) for a, b in q.eq),
        )
        upward = project_mixed(lifted, xs + [n + 1])
        cell = upward.combine(_pad_after_mixed(shadow, 1))
        bases.extend(decompose_mixed(cell))
    return ncset(s.dim, bases)


def valid_epigraph(f: PLFunction) -> bool:
    """Exact check of the vertical-ray and attained-slice rules."""
    return contains_set(f.epi, envelope(f.epi))


def require_valid_function(f: PLFunction) -> None:
    if not valid_epigraph(f):
        raise InvalidEpigraph("set is not the epigraph of any function")


# ---------------------------------------------------------------------------
# strict epigraph {(x, lam) : f(x) < lam}


def epi_strict(f: PLFunction) -> NCSet:
    """Strict epigraph, computed as epi + the open upward ray."""
    n = f.n
    ray_rows = [(la.zeros(n) + (-la.ONE,), la.ZERO)]
    ray_eqs = [(la.unit(n + 1, i), la.ZERO) for i in range(n)]
    ray = ncset(n + 1, [hpoly(n + 1, ray_rows, ray_eqs)])
    return minkowski_sum(f.epi, ray)


def strict_epi_closure_holds(f: PLFunction) -> bool:
    """cl(strict epi) = cl(epi), an identity for every valid function."""
    a = closure_hull(f.epi)
    b = closure_hull(epi_strict(f))
    if a is None or b is None:
        return a is None and b is None
    return polyhedron_equal(a, b)


# ---------------------------------------------------------------------------
# restriction to a set


def restrict_function(f: PLFunction, omega: NCSet) -> tuple[PLFunction, bool]:
    """f + indicator of omega; flag is the overlap condition
    ri(dom f) meets ri(omega)."""
    g, qc = sv.restrict(epigraphical_map(f), omega)
    return PLFunction(f.n, g.graph), qc


def certify_restrict_function(f: PLFunction, omega: NCSet) -> bool:
    """Exact equality ri(epi of restriction) = ri(epi) within omega's ri."""
    return sv.certify_restrict(epigraphical_map(f), omega)


# ---------------------------------------------------------------------------
# generalized epigraphs with respect to a set of the output space


def epi_m(g_mat: Mat, g_shift: Vec, m: NCSet) -> tuple[NCSet, bool]:
    """{(x, y) : y - (Gx + c) in M} together with an exact certificate
    that its ri is the same set built from ri(M).

    The defining map (x, y) -> y - Gx - c is affine and onto, so the
    certificate holds on every valid instance; it is still computed, not
    assumed.
    """
    require_valid(m)
    p = m.dim
    g_mat = la.mat(g_mat)
    g_shift = la.vec(g_shift)
    if len(g_mat) != p or len(g_shift) != p:
        raise DimensionMismatch("affine map must have M's dim many rows")
    n = len(g_mat[0]) if g_mat else 0
    t = tuple(la.neg(g_mat[i]) + la.unit(p, i) for i in range(p))
    shift = la.neg(g_shift)
    result, _ = affine_preimage(m, t, shift)

    hull_m = closure_hull(m)
    hull_r = closure_hull(result)
    if hull_m is None or hull_r is None:
        return result, hull_m is None and hull_r is None

    def pull(row: Row) -> Row:
        a, b = row
        return la.mat_t_vec(t, a), b - la.dot(a, shift)

    pulled_ri = MixedSystem(
        n + p,
        (),
        tuple(pull(r) for r in hull_m.ineq),
        tuple(pull(r) for r in hull_m.eq),
    )
    ok, _ = is_nearly_convex(result)
    certified = ok and cells_equal(hull_r.ri_system(), pulled_ri)
    return result, certified


# ---------------------------------------------------------------------------
# composite constructors


def build_composite_phi(
    f: PLFunction, theta: NCSet, g: SVMap
) -> tuple[PLFunction, bool]:
    """(x, y) -> f(x) when x in theta and y in G(x), +inf otherwise."""
    e, qc = sv.build_phi(theta, epigraphical_map(f), g)
    return PLFunction(e.n, e.graph), qc


def build_composite_psi(
    f: PLFunction, theta: NCSet, g: SVMap
) -> tuple[PLFunction, bool]:
    """(x, u, y) -> f(x+u) when x in theta and y in G(x), +inf otherwise."""
    e, qc = sv.build_psi(theta, epigraphical_map(f), g)
    return PLFunction(e.n, e.graph), qc


def build_composite_phi_cone(
    f: PLFunction, theta: NCSet, a: Mat, c: Vec, k: "PolyCone"
) -> tuple[PLFunction, bool]:
    """Constraint given as g(x) <= y in the cone order: y in g(x) + K."""
    return build_composite_phi(f, theta, sv.affine_plus_cone(a, c, k.k))


def build_composite_psi_cone(
    f: PLFunction, theta: NCSet, a: Mat, c: Vec, k: "PolyCone"
) -> tuple[PLFunction, bool]:
    return build_composite_psi(f, theta, sv.affine_plus_cone(a, c, k.k))


def add_with_affine_inner(f: PLFunction, g: PLFunction, a: Mat) -> PLFunction:
    """(x, y) -> f(x) + g(Ax + y); needs nonempty domains, no overlap
    condition."""
    e = sv.sum_with_affine_inner(epigraphical_map(f), epigraphical_map(g), a)
    return PLFunction(e.n, e.graph)


# ---------------------------------------------------------------------------
# polyhedral cones and duality between them


@dataclass(frozen=True)
class PolyCone:
    """Closed cone {y : Ky <= 0, Ey = 0}, kept in canonical form."""

    k: HPoly

    def __post_init__(self):
        rows = self.k.ineq + self.k.eq
        if any(b != 0 for _, b in rows):
            raise UsageError("cone rows must be homogeneous")


def polycone(p: HPoly) -> PolyCone:
    rows = p.ineq + p.eq
    if any(b != 0 for _, b in rows):
        raise UsageError("cone rows must be homogeneous")
    canon = canonical_form(p)
    assert canon is not None  # 0 satisfies every homogeneous row
    return PolyCone(canon)


def nonneg_orthant(q: int) -> PolyCone:
    return polycone(hpoly(q, [(la.neg(la.unit(q, i)), la.ZERO) for i in range(q)]))


def dual_cone(k: PolyCone) -> PolyCone:
    """{y* : <y*, y> >= 0 for all y in K}, via the generators of K."""
    v = to_vrep(k.k)
    rows = [(la.neg(r), la.ZERO) for r in v.rays]
    rows += [(la.neg(p), la.ZERO) for p in v.points if not la.is_zero(p)]
    canon = canonical_form(hpoly(k.k.dim, rows))
    assert canon is not None
    return PolyCone(canon)
