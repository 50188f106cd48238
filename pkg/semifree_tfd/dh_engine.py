from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from textwrap import fill
from typing import Optional

from semifree_tfd.exceptional import exceptional_classes
from semifree_tfd.lattice import (
    CohClass,
    SurfaceModel,
    blow_up,
    embed,
    pair,
    square,
    symplectic_area,
    validate_class,
)

INTERIOR_LEVELS = (-1, 0, 1)

# (level, dim Z, Morse index, remark) for a semifree action on a closed
# monotone 6-manifold with the balanced moment map
CRITICAL_VALUE_TABLE = (
    (3, 0, 6, "Z = Z_max = point"),
    (2, 2, 4, "Z = Z_max = S^2"),
    (1, 4, 2, "Z = Z_max"),
    (1, 0, 4, "Z = point"),
    (0, 2, 2, ""),
    (-1, 0, 2, "Z = point"),
    (-1, 4, 0, "Z = Z_min"),
    (-2, 2, 0, "Z = Z_min = S^2"),
    (-3, 0, 0, "Z = Z_min = point"),
)


class WallCrossingError(ValueError):
    reason = "wall crossing failed"


class InconsistentExtremumError(WallCrossingError):
    reason = "inconsistent extremum"


class NotAWallError(WallCrossingError):
    reason = "vanishing cycle has positive area"


class BlowdownInconsistencyError(WallCrossingError):
    reason = "simultaneous blow-down inconsistent"


class NegativeAreaError(WallCrossingError):
    reason = "negative exceptional area"


class SecondVanishingClassError(WallCrossingError):
    reason = "second vanishing class"


class ParityError(WallCrossingError):
    reason = "lattice parity"


class CollapseError(WallCrossingError):
    reason = "no collapse at the maximum"


class EmptyWallError(WallCrossingError):
    reason = "missing level-0 surfaces"


def critical_value_table():
    """Possible fixed components as ``(level, dim, index, remark)`` rows."""
    return list(CRITICAL_VALUE_TABLE)


def fixed_component_allowed(level, dim):
    return any(row[0] == level and row[1] == dim for row in CRITICAL_VALUE_TABLE)


@dataclass(frozen=True)
class CriticalProfile:
    """Interior critical levels of the balanced moment map.

    ``m`` isolated points sit at each of the levels −1 and +1 and
    ``z0_components`` fixed surfaces at level 0. The extrema are spheres at
    levels −2 and +2.
    """

    interior_levels: frozenset
    m: int = 0
    z0_components: int = 0

    def __post_init__(self):
        levels = frozenset(self.interior_levels)
        object.__setattr__(self, "interior_levels", levels)
        if not levels <= set(INTERIOR_LEVELS):
            raise ValueError(f"Interior levels must lie in {INTERIOR_LEVELS}")
        if (-1 in levels) != (1 in levels):
            raise ValueError("Levels -1 and +1 carry the same number of points")
        if (self.m > 0) != (-1 in levels):
            raise ValueError(f"m = {self.m} does not match levels {sorted(levels)}")
        if (self.z0_components > 0) != (0 in levels):
            raise ValueError(
                f"{self.z0_components} level-0 components do not match levels {sorted(levels)}"
            )

    @classmethod
    def from_counts(cls, m=0, z0_components=0):
        levels = set()
        if m > 0:
            levels |= {-1, 1}
        if z0_components > 0:
            levels.add(0)
        return cls(frozenset(levels), m, z0_components)

    @property
    def pattern(self):
        return {
            frozenset(): "I",
            frozenset({0}): "II",
            frozenset({-1, 1}): "III",
            frozenset({-1, 0, 1}): "IV",
        }[self.interior_levels]


@dataclass(frozen=True)
class ExtremalData:
    b: int
    side: str = "min"

    def __post_init__(self):
        if self.side not in ("min", "max"):
            raise ValueError(f"side must be 'min' or 'max', got {self.side!r}")
        if self.b < -1:
            raise InconsistentExtremumError(
                fill(f"b_{self.side} = {self.b} < -1 gives a non-positive extremal area")
            )

    @property
    def area(self):
        return 2 + self.b

    @property
    def k(self):
        return self.b // 2

    @property
    def base(self):
        return "S2xS2" if self.b % 2 == 0 else "Hirzebruch"

    def model(self):
        return SurfaceModel(self.base)


@dataclass(frozen=True)
class Blowdown:
    """Standard basis of the reduced space above level 1, written in the
    level-0 lattice, and the pushforward onto it."""

    source: SurfaceModel
    target: SurfaceModel
    x: CohClass
    y: CohClass
    cycles: tuple
    b: int

    def push(self, v):
        v = validate_class(self.source, v)
        q = pair(self.source, v, self.x)
        p = pair(self.source, v, self.y) - q * square(self.source, self.y)
        return CohClass((p, q))


@dataclass(frozen=True)
class Slice:
    """Regular interval ``(lo, hi)`` with ``[ω_t] = ω_lo − (t − lo)·euler``."""

    lo: Fraction
    hi: Fraction
    model: SurfaceModel
    omega_lo: CohClass
    euler: CohClass
    blowdown: Optional[Blowdown] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        validate_class(self.model, self.omega_lo)
        validate_class(self.model, self.euler)

    @property
    def level_range(self):
        return (self.lo, self.hi)

    def omega_at(self, t):
        return self.omega_lo - (Fraction(t) - self.lo) * self.euler


def extremal_euler(d, m):
    """Euler class of the level set next to an extremal sphere.

    Parameters
    ----------
    d: ExtremalData
        ``b = 2k`` on S²×S², ``b = 2k + 1`` on E_{S²}.

    m: SurfaceModel
        The reduced space just above the minimum (below the maximum).

    Returns
    -------
    euler: CohClass
        ``kx − y`` on the minimum side, ``−kx + y`` on the maximum side.
    """
    if m.base != d.base:
        raise InconsistentExtremumError(
            fill(
                f"b = {d.b} requires a {d.base} reduced space next to the "
                f"extremum, got {m.label}"
            )
        )
    e = m.cls(*((d.k, -1) + (0,) * m.blowups))
    assert square(m, e) == -d.b
    return e if d.side == "min" else -e


def initial_slice(d, hi=2):
    m = d.model()
    e = extremal_euler(d, m)
    return Slice(-2, hi, m, m.c1 + 2 * e, e)


def cross_blowup_wall(s, m, hi=0):
    """Cross level −1 where ``m`` index-2 points blow the reduced space up."""
    if s.hi != -1:
        raise WallCrossingError(f"Blow-up wall sits at level -1, slice ends at {s.hi}")
    if m == 0:
        return Slice(-1, hi, s.model, s.omega_at(-1), s.euler)
    model = blow_up(s.model, m)
    new_E = model.exceptional_basis()[-m:]
    euler = embed(s.euler, model)
    for E in new_E:
        euler = euler + E
    return Slice(-1, hi, model, embed(s.omega_at(-1), model), euler)


def cross_surface_wall(s, z_classes, expected_components=None, hi=1):
    """Cross level 0: ``e⁺ = e⁻ + Σ PD(Z)``; model and [ω] unchanged."""
    if s.hi != 0:
        raise WallCrossingError(f"Surface wall sits at level 0, slice ends at {s.hi}")
    if expected_components and not z_classes:
        raise EmptyWallError(
            f"Profile has {expected_components} level-0 components but no classes were given"
        )
    euler = s.euler
    for z in z_classes:
        euler = euler + validate_class(s.model, z)
    return Slice(0, hi, s.model, s.omega_at(0), euler)


def vanishing_classes(model, omega):
    """Exceptional classes of ``model`` split into (zero area, negative area)."""
    zero, negative = [], []
    for E in exceptional_classes(model):
        area = symplectic_area(model, omega, E)
        if area == 0:
            zero.append(E)
        elif area < 0:
            negative.append(E)
    return zero, negative


def blowdown_basis(model, omega2, euler_plus, cycles=()):
    """Build the :py:class:`Blowdown` onto the reduced space below the
    maximum.

    Parameters
    ----------
    model: SurfaceModel
        Lattice holding all classes (the level-0 reduced space).

    omega2: CohClass
        Limit of [ω_t] at t = 2.

    euler_plus: CohClass
        e(P_2⁻), i.e. the Euler class after the last wall (e(P_1⁻) + ΣC).

    cycles: sequence of CohClass
        Vanishing cycles; the target lattice is their orthogonal complement.

    Returns
    -------
    blowdown: Blowdown
        With fibre ``x = ω_2 / (2 + b_max)`` and ``y = e + kx`` so that the
        Euler class reads ``−kx + y`` in the new basis.
    """
    c1_down = model.c1
    for C in cycles:
        c1_down = c1_down + C
    b = -square(model, euler_plus)
    if b < -1:
        raise InconsistentExtremumError(f"b_max = {b} < -1")
    even = all(int(v) % 2 == 0 for v in c1_down)
    if even != (b % 2 == 0):
        where = "the orthogonal complement of the vanishing cycles" if cycles else model.label
        raise ParityError(fill(f"b_max = {b} but {where} is {'even' if even else 'odd'}"))
    if square(model, omega2) != 0:
        raise CollapseError(f"[omega_2]^2 = {square(model, omega2)} != 0")
    x = CohClass(tuple(Fraction(v, 2 + b) for v in omega2))
    if not x.is_integral:
        raise CollapseError(f"[omega_2] is not divisible by 2 + b_max = {2 + b}")
    k = b // 2
    y = euler_plus + k * x
    target = SurfaceModel("S2xS2" if b % 2 == 0 else "Hirzebruch")
    basis_gram = ((square(model, x), pair(model, x, y)), (pair(model, y, x), square(model, y)))
    if basis_gram != tuple(tuple(int(v) for v in row) for row in target.gram):
        raise CollapseError(f"fibre/section classes have products {basis_gram}")
    return Blowdown(model, target, x, y, tuple(cycles), b)


def cross_blowdown_wall(s, cycles, hi=2):
    """Cross level +1 where the vanishing ``cycles`` are blown down.

    Every cycle must be exceptional with zero ω_1-area, the cycles must be
    pairwise orthogonal, no other exceptional class may have zero or
    negative area, and the result must be an S²-bundle over S² (rank 2).
    """
    if s.hi != 1:
        raise WallCrossingError(f"Blow-down wall sits at level +1, slice ends at {s.hi}")
    model = s.model
    omega1 = s.omega_at(1)
    cycles = [validate_class(model, C) for C in cycles]
    for C in cycles:
        if square(model, C) != -1 or pair(model, model.c1, C) != 1:
            raise BlowdownInconsistencyError(f"{C} is not an exceptional class")
        if symplectic_area(model, omega1, C) != 0:
            raise NotAWallError(
                f"cycle {C} has area {symplectic_area(model, omega1, C)} at level 1"
            )
    for C1, C2 in combinations(cycles, 2):
        if pair(model, C1, C2) != 0:
            raise BlowdownInconsistencyError(f"cycles {C1} and {C2} intersect")

    zero, negative = vanishing_classes(model, omega1)
    if negative:
        raise NegativeAreaError(f"{negative[0]} has negative area at level 1")
    extra = [E for E in zero if E not in cycles]
    if extra:
        raise SecondVanishingClassError(f"{extra[0]} also vanishes at level 1")

    if model.rank - len(cycles) != 2:
        raise BlowdownInconsistencyError(
            fill(
                f"blowing down {len(cycles)} cycles in {model.label} does not "
                "leave a sphere bundle over the maximum"
            )
        )
    euler_plus = s.euler
    for C in cycles:
        euler_plus = euler_plus + C
    down = blowdown_basis(model, omega1 - euler_plus, euler_plus, cycles)
    return Slice(1, hi, down.target, down.push(omega1), down.push(euler_plus), down)


def max_side_basis(s):
    """:py:class:`Blowdown` for the last slice of an assembled sequence.

    When the slice already lives on the maximum side (after a blow-down
    wall) its own blow-down is returned; otherwise the basis is computed in
    the slice's model with no cycles.
    """
    if s.blowdown is not None:
        return s.blowdown
    if s.model.rank != 2:
        raise BlowdownInconsistencyError(
            f"{s.model.label} is not a sphere bundle over the maximum"
        )
    return blowdown_basis(s.model, s.omega_at(2), s.euler)


def positive_on_interval(model, omega_lo, euler, lo, hi):
    """Exact test of ⟨ω_t, ω_t⟩ > 0 for lo < t < hi.

    The square is a quadratic in t; it is positive on the open interval iff
    it is nonnegative at both ends, positive at the midpoint, and positive
    at its vertex when that is an interior minimum.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    A = square(model, omega_lo)
    B = pair(model, omega_lo, euler)
    C = square(model, euler)

    def q(t):
        s = Fraction(t) - lo
        return A - 2 * B * s + C * s * s

    # half-integer grid pre-filter
    t = lo + Fraction(1, 2)
    while t < hi:
        if q(t) <= 0:
            return False
        t += Fraction(1, 2)
    if q(lo) < 0 or q(hi) < 0 or q((lo + hi) / 2) <= 0:
        return False
    if C > 0:
        vertex = lo + Fraction(B) / C
        if lo < vertex < hi and q(vertex) <= 0:
            return False
    return True


def slice_is_positive(s):
    return positive_on_interval(s.model, s.omega_lo, s.euler, s.lo, s.hi)


def check_volume_collapse(s):
    """True iff ⟨ω_t, ω_t⟩ vanishes at the top of the slice and stays
    positive on its interior."""
    if square(s.model, s.omega_at(s.hi)) != 0:
        return False
    return slice_is_positive(s)


def assemble_slices(d_min, m=0, z_classes=(), cycles=()):
    """Run the wall crossings −1, 0, +1 (absent walls skipped) from the
    minimum up to level 2.

    Returns
    -------
    slices: list of Slice
    """
    walls = []
    if m > 0:
        walls.append(-1)
    if z_classes:
        walls.append(0)
    if m > 0:
        walls.append(1)
    tops = walls + [2]
    s = initial_slice(d_min, hi=tops[0])
    slices = [s]
    for wall, hi in zip(walls, tops[1:]):
        if wall == -1:
            s = cross_blowup_wall(s, m, hi=hi)
        elif wall == 0:
            s = cross_surface_wall(s, list(z_classes), hi=hi)
        else:
            s = cross_blowdown_wall(s, list(cycles), hi=hi)
        slices.append(s)
    return slices


def mirror_slice(s):
    """The same interval for the reversed action ``H ↦ −H``."""
    return Slice(-s.hi, -s.lo, s.model, s.omega_at(s.hi), -s.euler)
