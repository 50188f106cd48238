from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import sympy

from semifree_tfd.dh_engine import CriticalProfile, fixed_component_allowed
from semifree_tfd.lattice import CohClass

SHAPES = ("sphere", "point", "torus", "surface")

# λ: equivariant parameter (−λ is the Euler class of the Hopf bundle);
# u: point class of a fixed surface, u² = 0
_lam, _u = sympy.symbols("lambda u")


class LocalizationError(ValueError):
    pass


@dataclass(frozen=True)
class FixedComponent:
    """A connected component of the fixed point set.

    Parameters
    ----------
    level: int
        Value of the balanced moment map.

    shape: str
        One of ``"sphere"``, ``"point"``, ``"torus"`` or ``"surface"``.

    genus: int
        0 for spheres and points, 1 for tori.

    pd_class: CohClass, optional
        Poincaré dual in the reduced space at this level (level-0 surfaces).

    area: int
        Symplectic area (0 for points).

    normal_chern: (int, int), optional
        ``(b⁻, b⁺)`` for a level-0 surface: Chern numbers of the normal
        line bundles with weights −1 and +1.

    b: int, optional
        First Chern number of the normal bundle of an extremal sphere.
    """

    level: int
    shape: str
    genus: int = 0
    pd_class: Optional[CohClass] = None
    area: int = 0
    normal_chern: Optional[tuple] = None
    b: Optional[int] = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"Unknown shape {self.shape!r}")
        dim = 0 if self.shape == "point" else 2
        if not fixed_component_allowed(self.level, dim):
            raise ValueError(
                f"A {dim}-dimensional fixed component cannot sit at level {self.level}"
            )
        if self.shape == "sphere" and self.genus != 0:
            raise ValueError("Spheres have genus 0")
        if self.shape == "torus" and self.genus != 1:
            raise ValueError("Tori have genus 1")
        if dim == 2 and self.area <= 0:
            raise ValueError(f"Fixed surface at level {self.level} has area {self.area}")
        if self.is_extremal and self.b is None:
            raise ValueError("Extremal spheres need the normal Chern number b")

    @property
    def is_extremal(self):
        return abs(self.level) == 2

    @property
    def is_point(self):
        return self.shape == "point"


@dataclass(frozen=True)
class EquivariantContribution:
    """Localization data of one fixed component: ``values[d]`` is the
    coefficient of λ^d. ∫1 lives in degree −3, ∫c1 in −2 and ∫c1³ in 0."""

    component: FixedComponent
    values: dict = field(compare=False)

    @property
    def int_one(self):
        return self.values[-3]

    @property
    def int_c1(self):
        return self.values[-2]

    @property
    def int_c1_cubed(self):
        return self.values[0]


def _point_weights(level):
    # three weights in {−1, +1} summing to −level
    n_neg = (3 + level) // 2
    return (-1,) * n_neg + (1,) * (3 - n_neg)


def _restrictions(f):
    """Equivariant Euler class of the normal bundle and restriction of the
    equivariant first Chern class, as sympy expressions in λ and u."""
    lam, u = _lam, _u
    if f.is_point:
        weights = _point_weights(f.level)
        euler = sympy.Integer(1)
        for w in weights:
            euler *= w * lam
        return euler, sum(weights) * lam
    if f.is_extremal:
        sign = 1 if f.level < 0 else -1
        euler = lam**2 + sign * f.b * lam * u
        c1 = (2 + f.b) * u + sign * 2 * lam
        return euler, c1
    if f.normal_chern is None:
        raise LocalizationError("Level-0 surfaces need their normal Chern numbers")
    b_minus, b_plus = f.normal_chern
    euler = sympy.expand((lam + b_plus * u) * (-lam + b_minus * u)).subs(u**2, 0)
    c1 = (2 - 2 * f.genus + b_plus + b_minus) * u
    return euler, c1


def _integrate(f, integrand, euler):
    expr = integrand / euler
    if not f.is_point:
        expr = sympy.expand(sympy.series(expr, _u, 0, 2).removeO()).coeff(_u, 1)
    return sympy.simplify(expr)


def _lambda_coefficient(expr, degree):
    coeff = sympy.simplify(expr * _lam ** (-degree))
    if coeff.free_symbols:
        raise LocalizationError(f"{expr} is not homogeneous of degree {degree}")
    return Fraction(int(coeff.p), int(coeff.q))


@lru_cache(maxsize=None)
def equivariant_contribution(f):
    """Expand ∫_F 1/e, ∫_F c1/e and ∫_F c1³/e for a fixed component.

    On surfaces the integrand is expanded to first order in the point class
    ``u`` (u² = 0) and its ``u`` coefficient is integrated.

    Parameters
    ----------
    f: FixedComponent

    Returns
    -------
    contribution: EquivariantContribution
    """
    euler, c1 = _restrictions(f)
    values = {
        -3: _lambda_coefficient(_integrate(f, sympy.Integer(1), euler), -3),
        -2: _lambda_coefficient(_integrate(f, c1, euler), -2),
        0: _lambda_coefficient(_integrate(f, c1**3, euler), 0),
    }
    return EquivariantContribution(f, values)


def contribution_c13(f):
    """Closed-form contribution of a fixed component to ∫c1³.

    24 + 4b for an extremal sphere, −1 for an isolated point, 0 for a
    level-0 surface.
    """
    if f.is_extremal:
        return 24 + 4 * f.b
    if f.is_point:
        return -1
    return 0


def chern_number(profile, b_min, b_max):
    return 48 + 4 * (b_min + b_max) - 2 * profile.m


def identity_int_one(b_min, b_max):
    """∫1 = 0 without level-0 surfaces: b_max = b_min."""
    return b_max == b_min


def identity_int_one_general(b_min, b_max, normal_cherns=()):
    """∫1 = 0 in general: b_max − b_min + Σ (b⁺ − b⁻) = 0 over level-0
    surfaces with normal Chern numbers ``(b⁻, b⁺)``."""
    return b_max - b_min + sum(bp - bm for bm, bp in normal_cherns) == 0


def identity_int_c1(profile, b_min, b_max, vol_z0):
    """∫c1 = 0: b_min + b_max + 2m + Vol(Z0) = 4."""
    return b_min + b_max + 2 * profile.m + vol_z0 == 4


def betti2(profile):
    return 1 + profile.m + profile.z0_components


def localization_sums(components):
    """Sum the equivariant contributions of all fixed components.

    Returns
    -------
    sums: dict
        ``{-3: ∫1, -2: ∫c1, 0: ∫c1³}`` with exact rational values.
    """
    sums = {-3: Fraction(0), -2: Fraction(0), 0: Fraction(0)}
    for f in components:
        contribution = equivariant_contribution(f)
        for degree in sums:
            sums[degree] += contribution.values[degree]
    return sums


def enumerate_profile_solutions(m_values=(1, 2), b_bound=8, normalized=False):
    """Solutions of b_min + b_max + 2m + Vol(Z0) = 4 with Vol(Z0) >= 1 and
    b_min, b_max >= −1.

    Parameters
    ----------
    m_values: tuple of int
        Admissible numbers of isolated points per level.

    b_bound: int
        Upper search bound for b_min and b_max.

    normalized: bool, default=False
        Keep only b_min <= b_max.

    Returns
    -------
    solutions: list of (m, vol_z0, b_min, b_max)
        Ordered by decreasing m, decreasing volume, then b_min.
    """
    solutions = []
    for m in m_values:
        for b_min in range(-1, b_bound + 1):
            for b_max in range(-1, b_bound + 1):
                vol = 4 - 2 * m - b_min - b_max
                if vol < 1:
                    continue
                if normalized and b_min > b_max:
                    continue
                solutions.append((m, vol, b_min, b_max))
    solutions.sort(key=lambda s: (-s[0], -s[1], s[2]))
    return solutions


def case_iii_solutions(b_range=(-1, 6), m_range=(1, 8)):
    """Brute-force (b_min, m) pairs for profiles with only isolated interior
    points, using both localization identities (Vol(Z0) = 0)."""
    found = []
    for m in range(m_range[0], m_range[1] + 1):
        profile = CriticalProfile.from_counts(m=m)
        for b_min in range(b_range[0], b_range[1] + 1):
            for b_max in range(b_range[0], b_range[1] + 1):
                if identity_int_one(b_min, b_max) and identity_int_c1(
                    profile, b_min, b_max, 0
                ):
                    found.append((b_min, m))
    return sorted(found, key=lambda s: s[1])
