from dataclasses import dataclass
from textwrap import fill

import numpy as np

from semifree_tfd.lattice import CohClass, pair, square, symplectic_area, validate_class


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class Splitting:
    """Decomposition of PD(Z0) into disjoint embedded surfaces.

    ``parts`` holds ``(pd_class, genus)`` pairs ordered by (area, class).
    """

    parts: tuple

    @property
    def classes(self):
        return [z for z, _ in self.parts]

    @property
    def genera(self):
        return [g for _, g in self.parts]

    def total(self):
        total = self.parts[0][0]
        for z, _ in self.parts[1:]:
            total = total + z
        return total

    def __len__(self):
        return len(self.parts)


def adjunction_genus(m, z):
    """Genus forced by the adjunction formula z² + 2 − 2g = ⟨c1, z⟩, or None
    when it is negative or not an integer."""
    twice = square(m, z) - pair(m, m.c1, z) + 2
    if twice < 0 or twice % 2:
        return None
    return twice // 2


def _grid(ranges):
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in ranges]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(ranges))


def _candidate_parts(m, omega, vol, ranges, total=None):
    """Classes with area in [1, vol] and a valid adjunction genus.

    When ``total`` is given, also require ⟨p, total⟩ = p², which every part
    of a pairwise orthogonal decomposition of ``total`` satisfies.
    """
    gram = np.asarray(m.gram, dtype=np.int64)
    grid = _grid(ranges)
    areas = grid @ (gram @ np.array(omega.coeffs, dtype=np.int64))
    squares = np.einsum("ij,jk,ik->i", grid, gram, grid)
    c1_areas = grid @ (gram @ np.array(m.c1.coeffs, dtype=np.int64))
    twice_genus = squares - c1_areas + 2
    keep = (areas >= 1) & (areas <= vol) & (twice_genus >= 0) & (twice_genus % 2 == 0)
    if total is not None:
        keep &= grid @ (gram @ np.array(total.coeffs, dtype=np.int64)) == squares
    rows = [
        (int(a), tuple(int(v) for v in row), int(tg) // 2)
        for row, a, tg in zip(grid[keep], areas[keep], twice_genus[keep])
    ]
    rows.sort()
    return [(CohClass(coeffs), area, genus) for area, coeffs, genus in rows]


def _decompose(m, total, vol, candidates):
    results = []

    def extend(prefix, rest, rest_area, start):
        if rest.is_zero:
            results.append(Splitting(tuple((z, g) for z, _, g in prefix)))
            return
        for i in range(start, len(candidates)):
            z, area, genus = candidates[i]
            if area > rest_area:
                break
            if any(pair(m, z, other) != 0 for other, _, _ in prefix):
                continue
            extend(prefix + [candidates[i]], rest - z, rest_area - area, i)

    extend([], total, vol, 0)
    return results


def enumerate_splittings(m, omega, total, vol, slack=3):
    """All decompositions of ``total`` into connected symplectic surfaces.

    Parts have area >= 1, are pairwise orthogonal and satisfy adjunction
    with a nonnegative genus. Candidate parts have coefficients within
    ``|total_i| + slack`` of zero in every coordinate.

    Parameters
    ----------
    m: SurfaceModel
        Reduced space at level 0.

    omega: CohClass
        [ω_0] (equal to c1 for monotone reductions).

    total: CohClass
        PD(Z0).

    vol: int
        ⟨ω, total⟩; must be positive.

    slack: int, default=3
        Extra room in each coordinate of the candidate box.

    Returns
    -------
    splittings: list of Splitting
        Canonically ordered, without duplicates.
    """
    total = validate_class(m, total)
    omega = validate_class(m, omega)
    if vol <= 0:
        raise EmptyInputError(f"Level-0 volume must be positive, got {vol}")
    if symplectic_area(m, omega, total) != vol:
        raise ValueError(
            fill(f"Volume {vol} does not match the area {symplectic_area(m, omega, total)} of {total}")
        )
    ranges = [(-abs(t) - slack, abs(t) + slack) for t in total.coeffs]
    candidates = _candidate_parts(m, omega, vol, ranges, total=total)
    return _decompose(m, total, vol, candidates)


def reject_if_no_splitting(m, omega, total, vol, slack=3):
    """True when ``total`` admits no splitting (the branch is pruned)."""
    return not enumerate_splittings(m, omega, total, vol, slack=slack)


def oracle_splittings(m, omega, total, vol, box=4):
    """Unpruned reference enumeration over every part with coefficients in
    ``[-box, box]``; used to validate :py:func:`enumerate_splittings`."""
    total = validate_class(m, total)
    if vol <= 0:
        raise EmptyInputError(f"Level-0 volume must be positive, got {vol}")
    candidates = _candidate_parts(m, omega, vol, [(-box, box)] * m.rank)
    return _decompose(m, total, vol, candidates)
