import itertools
from dataclasses import dataclass
from functools import lru_cache
from textwrap import fill

import numpy as np
import sympy

from semifree_tfd.lattice import (
    CohClass,
    SurfaceModel,
    pair,
    square,
    validate_class,
)

MAX_BLOWUPS = 8

# (degree, multiplicities in decreasing order) of the exceptional classes of
# ℙ²#kℙ²bar, k <= 8, up to permutation of the E_i. (0, (-1,)) stands for E_i.
EXCEPTIONAL_FAMILIES = (
    (0, (-1,)),
    (1, (1, 1)),
    (2, (1, 1, 1, 1, 1)),
    (3, (2, 1, 1, 1, 1, 1, 1)),
    (4, (2, 2, 2, 1, 1, 1, 1, 1)),
    (5, (2, 2, 2, 2, 2, 2, 1, 1)),
    (6, (3, 2, 2, 2, 2, 2, 2, 2)),
)


class UnsupportedRankError(ValueError):
    pass


@dataclass(frozen=True)
class BasisChange:
    """Isometry ``source -> target`` given by an integer matrix whose columns
    are the images of the source basis vectors."""

    source: SurfaceModel
    target: SurfaceModel
    matrix: tuple

    @property
    def array(self):
        return np.array(self.matrix, dtype=int)

    def apply(self, a):
        a = validate_class(self.source, a)
        image = self.array @ np.array(a.coeffs, dtype=object)
        return CohClass(tuple(image))

    def inverse(self):
        inv = sympy.Matrix(self.matrix).inv()
        assert all(entry.is_integer for entry in inv), "basis change is not unimodular"
        return BasisChange(
            self.target, self.source, tuple(tuple(int(v) for v in row) for row in inv.tolist())
        )

    def check(self):
        """Return a list of violated isometry properties (empty if none)."""
        problems = []
        M = self.array
        if M.shape != (self.target.rank, self.source.rank):
            return [f"matrix shape {M.shape} does not match the models"]
        if not np.array_equal(M.T @ self.target.gram @ M, self.source.gram):
            problems.append(
                f"{self.source.label} -> {self.target.label} does not intertwine the gram matrices"
            )
        if self.apply(self.source.c1) != self.target.c1:
            problems.append(
                f"{self.source.label} -> {self.target.label} does not map c1 to c1"
            )
        return problems


def identity_change(m):
    return BasisChange(m, m, tuple(tuple(int(v) for v in row) for row in np.eye(m.rank, dtype=int)))


def identify_ruled_basis(m):
    """Isometry from ℙ²#(k+1)ℙ²bar onto a blown-up ruled model.

    For ``m = E_{S²}#kℙ²bar`` the map is u ↦ x+y, E1 ↦ y, E_{i+1} ↦ E_i.
    For ``m = (S²×S²)#kℙ²bar`` (k >= 1) it is u ↦ x+y−E1, E1 ↦ x−E1,
    E2 ↦ y−E1, E_{i+1} ↦ E_i for i >= 2. A ℙ²-model maps to itself.

    Parameters
    ----------
    m: SurfaceModel

    Returns
    -------
    change: BasisChange
        With ``change.target == m``.
    """
    if m.base == "P2":
        return identity_change(m)
    if m.base == "S2xS2" and m.blowups == 0:
        raise UnsupportedRankError(
            fill("S2xS2 has an even intersection form and is not a blow-up of CP2")
        )

    source = SurfaceModel("P2", m.rank - 1)
    columns = []
    if m.base == "Hirzebruch":
        columns.append(m.basis_class("x") + m.basis_class("y"))
        columns.append(m.basis_class("y"))
        columns += m.exceptional_basis()
    else:
        x, y, e1 = (m.basis_class(label) for label in ("x", "y", "E1"))
        columns += [x + y - e1, x - e1, y - e1]
        columns += m.exceptional_basis()[1:]

    matrix = tuple(tuple(int(c[i]) for c in columns) for i in range(m.rank))
    change = BasisChange(source, m, matrix)
    problems = change.check()
    assert not problems, fill("; ".join(problems))
    return change


@lru_cache(maxsize=None)
def _exceptional_in_blown_up_plane(k, degree_bound, multiplicity_bound):
    # E = d u - sum m_i E_i with E^2 = -1 and c1.E = 1
    if k == 0:
        return ()
    grid = np.array(
        list(itertools.product(range(-1, multiplicity_bound + 1), repeat=k)),
        dtype=np.int64,
    )
    msum = grid.sum(axis=1)
    msq = (grid**2).sum(axis=1)
    found = []
    for d in range(degree_bound + 1):
        hits = grid[(msq == d * d + 1) & (msum == 3 * d - 1)]
        for row in hits:
            found.append((d,) + tuple(int(-v) for v in row))
    found.sort(key=lambda c: (c[0], tuple(-v for v in c[1:])))
    return tuple(found)


def exceptional_classes(m, degree_bound=6, multiplicity_bound=3):
    """Enumerate the exceptional classes of a del Pezzo model.

    Brute force over E = d·u − Σ m_i E_i with 0 <= d <= ``degree_bound`` and
    −1 <= m_i <= ``multiplicity_bound``, filtered by E² = −1 and c1·E = 1.
    Ruled models are handled through :py:func:`identify_ruled_basis`.

    Parameters
    ----------
    m: SurfaceModel
        ℙ²#kℙ²bar, E_{S²}#kℙ²bar or (S²×S²)#kℙ²bar.

    degree_bound, multiplicity_bound: int
        Search box. The defaults contain every exceptional class for k <= 8.

    Returns
    -------
    classes: list of CohClass
        In the basis of ``m``.
    """
    if m.base == "S2xS2" and m.blowups == 0:
        return []
    if m.base == "P2":
        if m.blowups > MAX_BLOWUPS:
            raise UnsupportedRankError(
                fill(
                    f"CP2 blown up at {m.blowups} points has infinitely many "
                    f"exceptional classes; at most {MAX_BLOWUPS} blow-ups are supported"
                )
            )
        classes = [
            CohClass(c)
            for c in _exceptional_in_blown_up_plane(
                m.blowups, degree_bound, multiplicity_bound
            )
        ]
    else:
        change = identify_ruled_basis(m)
        classes = [
            change.apply(E)
            for E in exceptional_classes(change.source, degree_bound, multiplicity_bound)
        ]

    for E in classes:
        assert square(m, E) == -1 and pair(m, m.c1, E) == 1, fill(
            f"{E} is not exceptional in {m.label}"
        )
    return classes


def family_of(E):
    """Return the (degree, sorted multiplicities) family of a class written
    in the {u, E_i} basis, or None if it is not one of the known families."""
    d = E[0]
    mults = tuple(sorted((-v for v in E[1:] if v != 0), reverse=True))
    for family in EXCEPTIONAL_FAMILIES:
        if family == (d, mults):
            return family
    return None
