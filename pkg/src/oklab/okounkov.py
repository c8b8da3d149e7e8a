"""Newton-Okounkov bodies from graded valuation families.

The body of a big divisor is the closed convex hull of the normalized
valuation vectors of all sections of all its multiples.  On the toric
testbeds the sections of m D have a monomial basis indexed by the lattice
points of m P_D, so each graded level is a finite explicit set and the
hull over levels m <= m_max is exact polyhedral data.

A computed body carries an exactness certificate: the hull must be stable
under refinement through level three AND (for nef classes) its volume must
match the top self-intersection number through the independent mixed-volume
route.  Bodies that cannot be certified are returned flagged, never
silently trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exactgeom import Polytope, scale, slice_at
from .toric import (
    AdmissibleFlag,
    Fan,
    TDivisor,
    face_lattice_tails,
    flag_valuation,
    intersection_number,
    lattice_points_of_divisor,
    mu,
    star_model,
)

__all__ = [
    "GradedValuationFamily",
    "NOBody",
    "NonBigClassError",
    "NotAmpleError",
    "toric_family",
    "no_body",
    "no_body_rational",
    "nef_body",
    "restricted_body",
    "restriction_image_body",
    "slice_formula_check",
    "mu_endpoint_check",
]


class NonBigClassError(ValueError):
    pass


class NotAmpleError(ValueError):
    pass


@dataclass(frozen=True)
class GradedValuationFamily:
    """Levels m -> finite valuation-vector sets for an integral divisor."""

    fan: Fan
    flag: AdmissibleFlag
    divisor: TDivisor

    def level(self, m: int) -> frozenset:
        if m < 1:
            raise ValueError("graded level must be >= 1")
        dm = self.divisor.scaled(m)
        return frozenset(
            tuple(int(x) for x in flag_valuation(self.flag, dm, u))
            for u in lattice_points_of_divisor(self.fan, dm))


def toric_family(fan: Fan, flag: AdmissibleFlag, divisor: TDivisor) -> GradedValuationFamily:
    if divisor.denominator_lcm() != 1:
        raise ValueError("graded families need an integral divisor; clear denominators first")
    if flag.fan is not fan:
        raise ValueError("flag lives on a different fan")
    return GradedValuationFamily(fan=fan, flag=flag, divisor=divisor)


@dataclass(frozen=True)
class NOBody:
    body: Polytope
    flag: tuple
    cls: tuple
    m_used: int
    exact: bool

    def to_json(self):
        out = self.body.to_json()
        out.update({
            "flag": list(self.flag),
            "class": [[c.numerator, c.denominator] for c in self.cls],
            "m_used": self.m_used,
            "exact": self.exact,
        })
        return out


_BODY_CACHE: dict = {}


def no_body(fam: GradedValuationFamily, m_max: int = 3) -> NOBody:
    """Hull of the normalized valuation sets up to level m_max.

    Certificate: every level hull is contained in the true body, so once
    the hull volume matches the top self-intersection number (the mixed
    volume route, available for nef classes), the level hull IS the body:
    two nested compact convex sets of equal positive volume coincide.
    That also proves stability under all further refinement, so levels
    past the certifying one are skipped.  Big classes outside the nef cone
    have no such volume oracle here and come back flagged inexact after
    m_max levels.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    fan, flag, div = fam.fan, fam.flag, fam.divisor
    cls = div.cls
    if not fan.classes.is_big(cls):
        raise NonBigClassError(f"class {cls} is not big on {fan.name}")
    key = (fan.name, flag.ray_indices, div.coeffs, m_max)
    hit = _BODY_CACHE.get(key)
    if hit is not None:
        return hit
    d = fan.dim
    top = None
    if fan.classes.is_nef(cls):
        top = intersection_number(fan, [div] * d)
    points: set = set()
    body = None
    exact = False
    m_used = m_max
    for m in range(1, m_max + 1):
        for v in fam.level(m):
            points.add(tuple(Fraction(x, m) for x in v))
        body = Polytope.hull(points, dim=d)
        if top is not None and factorial(d) * body.volume() == top:
            exact = True
            m_used = m
            break
    out = NOBody(body=body, flag=flag.ray_indices, cls=cls,
                 m_used=m_used, exact=exact)
    _BODY_CACHE[key] = out
    return out


def no_body_rational(divisor: TDivisor, flag: AdmissibleFlag, m_max: int = 3) -> NOBody:
    """Body of a rational class: clear denominators, compute, scale back."""
    p = divisor.denominator_lcm()
    fam = toric_family(flag.fan, flag, divisor.scaled(p))
    nb = no_body(fam, m_max=m_max)
    if p == 1:
        return nb
    return NOBody(body=scale(nb.body, Fraction(1, p)), flag=nb.flag,
                  cls=divisor.cls, m_used=nb.m_used, exact=nb.exact)


def nef_body(divisor: TDivisor, flag: AdmissibleFlag, m_max: int = 3) -> NOBody:
    """Body of a nef class, allowing the non-big (lower-dimensional) case.

    The graded family of a nef torus-invariant divisor is nonempty and its
    hull is the natural extension of the body to the nef boundary; for
    non-big classes it is lower-dimensional (e.g. a horizontal segment for
    a ruling class on a quadric).  Certified by level stability plus the
    volume identity d! vol = D^d, which pins 0 = 0 in the non-big case.
    """
    fan = flag.fan
    cls = divisor.cls
    if not fan.classes.is_nef(cls):
        raise ValueError(f"class {cls} is not nef on {fan.name}")
    if fan.classes.is_big(cls):
        return no_body_rational(divisor, flag, m_max=m_max)
    p = divisor.denominator_lcm()
    base = divisor.scaled(p)
    points: set = set()
    hulls = []
    for m in range(1, m_max + 1):
        dm = base.scaled(m)
        for u in lattice_points_of_divisor(fan, dm):
            v = flag_valuation(flag, dm, u)
            points.add(tuple(Fraction(x, m * p) for x in v))
        hulls.append(Polytope.hull(points, dim=fan.dim))
    body = hulls[-1]
    stable = len(hulls) >= 3 and hulls[0] == hulls[1] == hulls[2] and not body.is_empty()
    exact = False
    if stable:
        d = fan.dim
        top = intersection_number(fan, [divisor] * d)
        exact = factorial(d) * body.volume() == top
    return NOBody(body=body, flag=flag.ray_indices, cls=cls,
                  m_used=m_max, exact=exact)


def restricted_body(divisor: TDivisor, flag: AdmissibleFlag, t_shift=0,
                    m_max: int = 3) -> NOBody:
    """Body of (N - t O(Y_1)) restricted to E = Y_1, on the star model.

    Only ample arguments are accepted: ampleness makes the restriction maps
    eventually surjective, so the restricted body equals the full body of
    the restriction on Y_1.  For non-ample arguments the image can be
    strictly smaller and this routine refuses rather than substitute.
    """
    fan = flag.fan
    if fan.dim < 2:
        raise ValueError("restricted bodies need dimension >= 2")
    arg = divisor - flag.divisor_of_y1().scaled(t_shift)
    if not fan.classes.is_ample(arg.cls):
        raise NotAmpleError(
            f"restricted body needs an ample argument; got class {arg.cls}")
    sm = star_model(fan, flag)
    return no_body_rational(sm.restrict_divisor(arg), sm.star_flag, m_max=m_max)


def restriction_image_body(divisor: TDivisor, flag: AdmissibleFlag,
                           m_max: int = 3) -> tuple[Polytope, bool]:
    """Hull of valuations of restricted sections (image of H^0(mN) on E).

    A restricted monomial section is nonzero exactly when its first
    valuation coordinate vanishes, so each level is the nu_1 = 0 face of
    the full family with the first coordinate dropped (enumerated on the
    pinned hyperplane directly).  Returns the hull through m_max together
    with a stability certificate: stability holds on the shipped fans
    because their ray configurations make every section polytope a lattice
    polytope, and is reported honestly when it fails on foreign catalogs.
    """
    fan = flag.fan
    if fan.dim < 2:
        raise ValueError("restricted bodies need dimension >= 2")
    p = divisor.denominator_lcm()
    base = divisor.scaled(p)
    points: set = set()
    hulls = []
    for m in range(1, m_max + 1):
        dm = base.scaled(m)
        for tail in face_lattice_tails(fan, flag, dm):
            points.add(tuple(Fraction(x, m * p) for x in tail))
        hulls.append(Polytope.hull(points, dim=fan.dim - 1))
    stable = len(hulls) >= 3 and hulls[0] == hulls[1] == hulls[2] and not hulls[0].is_empty()
    return hulls[-1], stable


def slice_formula_check(divisor: TDivisor, flag: AdmissibleFlag, t,
                        m_max: int = 3):
    """Verify slice-at-t == {t} x restricted body of (M - t O(Y_1)).

    Returns (True, None) or (False, witness) with a witness vertex in the
    symmetric difference.  Preconditions: 0 <= t < mu(M; Y_1) and the
    shifted class ample (so the restricted body is the star-model body).
    """
    fan = flag.fan
    t = Fraction(t)
    e_cls = flag.divisor_of_y1().cls
    endpoint = mu(fan, divisor, e_cls)
    if not 0 <= t < endpoint:
        raise ValueError(f"t={t} outside [0, mu) = [0, {endpoint})")
    nb = no_body_rational(divisor, flag, m_max=m_max)
    if not nb.exact:
        raise ValueError("body of M could not be certified exact")
    lhs = slice_at(nb.body, t)
    rhs_nb = restricted_body(divisor, flag, t_shift=t, m_max=m_max)
    if not rhs_nb.exact:
        raise ValueError("restricted body could not be certified exact")
    rhs = rhs_nb.body
    if lhs == rhs:
        return True, None
    for v in lhs.vertices:
        if not rhs.contains_point(v):
            return False, v
    for v in rhs.vertices:
        if not lhs.contains_point(v):
            return False, v
    return False, None


def mu_endpoint_check(divisor: TDivisor, flag: AdmissibleFlag,
                      m_max: int = 3) -> bool:
    """mu from the cone inequalities == max first coordinate of the body."""
    fan = flag.fan
    e_cls = flag.divisor_of_y1().cls
    endpoint = mu(fan, divisor, e_cls)
    nb = no_body_rational(divisor, flag, m_max=m_max)
    if not nb.exact:
        raise ValueError("body could not be certified exact")
    _, top = nb.body.first_coordinate_range()
    return top == endpoint
