import math
from dataclasses import dataclass, field
from textwrap import fill
from typing import Optional

import networkx as nx
import numpy as np
import sympy
from scipy.spatial import ConvexHull

from semifree_tfd.dh_engine import CriticalProfile, fixed_component_allowed
from semifree_tfd.localization import betti2, chern_number

_TOL = 1e-7


class NotDelzantError(ValueError):
    pass


class NotBalancedError(ValueError):
    pass


class NotSemifreeError(ValueError):
    pass


class UnsupportedFixedPointsError(ValueError):
    pass


class AmbiguousMatchError(RuntimeError):
    pass


def _primitive(vec):
    vec = [int(v) for v in vec]
    g = int(np.gcd.reduce(np.abs(vec)))
    return tuple(v // g for v in vec) if g else tuple(vec)


def _exact_normal(face_points):
    diffs = sympy.Matrix((face_points[1:] - face_points[0]).tolist())
    null = diffs.nullspace()
    if len(null) != 1:
        return None
    n = null[0]
    scale = sympy.ilcm(*[sympy.Rational(v).q for v in n])
    return _primitive([int(v * scale) for v in n])


@dataclass(frozen=True)
class DelzantPolytope:
    """Simple, smooth lattice polytope.

    ``facets`` holds ``(primitive outward normal, offset)`` pairs with
    ⟨n, v⟩ <= offset on the polytope; ``incidence[i]`` is the set of facet
    indices through vertex ``i`` and ``edges`` are vertex index pairs.
    """

    vertices: tuple
    facets: tuple
    incidence: tuple
    edges: tuple

    @property
    def dim(self):
        return len(self.vertices[0])

    @property
    def b2(self):
        return len(self.facets) - self.dim

    def neighbours(self, i):
        return sorted({j for a, b in self.edges for j in (a, b) if i in (a, b) and j != i})

    def edge_vector(self, i, j):
        return tuple(b - a for a, b in zip(self.vertices[i], self.vertices[j]))

    def primitive_edge(self, i, j):
        return _primitive(self.edge_vector(i, j))

    def normalized_volume(self):
        """dim! times the Euclidean volume; equals ∫[ω]^n on the manifold."""
        hull = ConvexHull(np.array(self.vertices, dtype=float))
        return int(round(hull.volume * math.factorial(self.dim)))


def lattice_length(P, edge):
    i, j = edge
    return int(np.gcd.reduce(np.abs(np.array(P.edge_vector(i, j), dtype=np.int64))))


def polytope_from_vertices(vertices):
    """Build a :py:class:`DelzantPolytope` from its vertex list.

    Facets come from the convex hull; their normals are recomputed exactly
    from the integer vertices.

    Raises
    ------
    NotDelzantError
        If a point is not a vertex, the polytope is not simple, or the
        primitive edge vectors at a vertex are not a lattice basis.
    """
    pts = np.asarray(vertices, dtype=np.int64)
    if pts.ndim != 2 or len(pts) < pts.shape[1] + 1:
        raise NotDelzantError(f"Need at least {pts.shape[-1] + 1} vertices, got {len(pts)}")
    dim = pts.shape[1]
    try:
        hull = ConvexHull(pts.astype(float))
    except Exception as err:
        raise NotDelzantError(f"Degenerate polytope: {err}")
    # points interior to edges or faces are dropped
    pts = pts[sorted(set(hull.vertices))]

    facets = {}
    for eq in hull.equations:
        on = np.abs(pts @ eq[:-1] + eq[-1]) < _TOL
        normal = _exact_normal(pts[on])
        if normal is None:
            raise NotDelzantError("Degenerate facet")
        if np.dot(normal, eq[:-1]) < 0:
            normal = tuple(-v for v in normal)
        offset = int(np.dot(normal, pts[on][0]))
        facets[(normal, offset)] = None
    facets = tuple(sorted(facets))
    normals = np.array([n for n, _ in facets], dtype=np.int64)
    offsets = np.array([c for _, c in facets], dtype=np.int64)
    on_facet = pts @ normals.T == offsets
    incidence = tuple(frozenset(np.flatnonzero(row).tolist()) for row in on_facet)

    for i, inc in enumerate(incidence):
        if len(inc) != dim:
            raise NotDelzantError(
                f"Vertex {tuple(pts[i])} lies on {len(inc)} facets; the polytope is not simple"
            )
    edges = tuple(
        (i, j)
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
        if len(incidence[i] & incidence[j]) == dim - 1
    )
    P = DelzantPolytope(tuple(tuple(int(v) for v in p) for p in pts), facets, incidence, edges)
    for i in range(len(pts)):
        nbrs = P.neighbours(i)
        if len(nbrs) != dim:
            raise NotDelzantError(f"Vertex {P.vertices[i]} has {len(nbrs)} edges")
        det = sympy.Matrix([P.primitive_edge(i, j) for j in nbrs]).det()
        if abs(det) != 1:
            raise NotDelzantError(
                fill(f"Edges at {P.vertices[i]} span a sublattice of index {abs(det)}")
            )
    return P


@dataclass(frozen=True)
class CircleSubgroup:
    """Circle generated by a primitive integer vector ξ of the torus."""

    xi: tuple

    def __post_init__(self):
        xi = tuple(int(v) for v in self.xi)
        object.__setattr__(self, "xi", xi)
        if not any(xi):
            raise ValueError("ξ must be nonzero")
        if _primitive(xi) != xi:
            raise ValueError(f"ξ = {xi} is not primitive")

    def weight(self, vec):
        return sum(a * b for a, b in zip(self.xi, vec))


def _as_circle(xi):
    return xi if isinstance(xi, CircleSubgroup) else CircleSubgroup(tuple(xi))


def vertex_weights(P, xi, i):
    """Isotropy weights of the circle at the fixed point of vertex ``i``."""
    xi = _as_circle(xi)
    if len(xi.xi) != P.dim:
        raise ValueError(f"ξ has {len(xi.xi)} entries for a {P.dim}-dimensional polytope")
    return tuple(sorted(xi.weight(P.primitive_edge(i, j)) for j in P.neighbours(i)))


def is_semifree(P, xi):
    return all(set(vertex_weights(P, xi, i)) <= {-1, 0, 1} for i in range(len(P.vertices)))


def balanced_center(P):
    """The point v + Σ (primitive edges at v), common to every vertex of a
    monotone polytope."""
    centers = set()
    for i, v in enumerate(P.vertices):
        c = np.array(v, dtype=np.int64)
        for j in P.neighbours(i):
            c += np.array(P.primitive_edge(i, j), dtype=np.int64)
        centers.add(tuple(int(x) for x in c))
    if len(centers) != 1:
        raise NotBalancedError(
            fill(
                "No shift balances the moment map: vertices give "
                f"{len(centers)} different centres, so [ω] is not c1"
            )
        )
    return centers.pop()


def vertex_levels(P, xi):
    """Balanced moment map value ⟨ξ, v − centre⟩ = −Σ weights at each vertex."""
    xi = _as_circle(xi)
    center = balanced_center(P)
    return [int(xi.weight(np.subtract(v, center))) for v in P.vertices]


@dataclass(frozen=True)
class ToricComponent:
    vertices: tuple
    dim: int
    level: int
    area: int = 0
    weights: tuple = ()

    @property
    def shape(self):
        return {0: "point", 2: "sphere"}.get(self.dim, "surface")


def fixed_faces(P, xi):
    """Connected components of the fixed point set: components of the graph
    of zero-weight edges, each spanning a face of ``P``.

    Returns
    -------
    components: list of ToricComponent
        Sorted by level, then vertices.
    """
    xi = _as_circle(xi)
    levels = vertex_levels(P, xi)
    graph = nx.Graph()
    graph.add_nodes_from(range(len(P.vertices)))
    zero_edges = [e for e in P.edges if xi.weight(P.primitive_edge(*e)) == 0]
    graph.add_edges_from(zero_edges)
    components = []
    for nodes in nx.connected_components(graph):
        nodes = tuple(sorted(nodes))
        weights = vertex_weights(P, xi, nodes[0])
        zeros = sum(1 for w in weights if w == 0)
        area = 0
        if zeros == 1:
            edge = next(e for e in zero_edges if e[0] in nodes)
            area = lattice_length(P, edge)
        components.append(
            ToricComponent(
                nodes,
                2 * zeros,
                int(levels[nodes[0]]),
                area,
                tuple(w for w in weights if w != 0),
            )
        )
    return sorted(components, key=lambda c: (c.level, c.vertices))


@dataclass(frozen=True)
class FixedPointSummary:
    """Matching data of a circle action: critical pattern, m, level-0 areas,
    extremal normal Chern numbers, b2 and c1³."""

    pattern: str
    m: int
    z0_areas: tuple
    b_min: int
    b_max: int
    b2: int
    c1_cubed: int
    incidence: Optional[tuple] = None
    source: str = field(default="", compare=False)

    def key(self):
        return (self.pattern, self.m, tuple(sorted(self.z0_areas)), self.b_min, self.b_max, self.b2, self.c1_cubed)

    def reversed(self):
        incidence = None
        if self.incidence is not None:
            incidence = tuple(sorted((a, up, down) for a, down, up in self.incidence))
        return FixedPointSummary(
            self.pattern,
            self.m,
            self.z0_areas,
            self.b_max,
            self.b_min,
            self.b2,
            self.c1_cubed,
            incidence,
            self.source,
        )


def summary_from_counts(m, z0_areas, b_min, b_max, source=""):
    """Summary of a non-toric action given its fixed point counts; b2 and
    c1³ follow from localization."""
    profile = CriticalProfile.from_counts(m=m, z0_components=len(z0_areas))
    return FixedPointSummary(
        profile.pattern,
        m,
        tuple(sorted(z0_areas)),
        b_min,
        b_max,
        betti2(profile),
        chern_number(profile, b_min, b_max),
        source=source,
    )


@dataclass(frozen=True)
class ToricFixedReport:
    """Fixed components of a semifree circle in a monotone toric manifold.

    ``balanced_shift`` is the constant c with H = ⟨ξ, μ⟩ + c balanced.
    """

    polytope: DelzantPolytope
    circle: CircleSubgroup
    components: tuple
    balanced_shift: int
    semifree: bool = True

    def at_level(self, level):
        return [c for c in self.components if c.level == level]

    def _extremum(self, level):
        found = self.at_level(level)
        if len(found) != 1 or found[0].dim != 2:
            raise UnsupportedFixedPointsError(f"Fixed set at level {level} is not a single sphere")
        return found[0]

    @property
    def b_min(self):
        return self._extremum(-2).area - 2

    @property
    def b_max(self):
        return self._extremum(2).area - 2

    def summary(self, source=""):
        """Reduce the fixed components to a :py:class:`FixedPointSummary`.

        c1³ is taken from localization and cross-checked against the
        normalized volume of the polytope.

        Raises
        ------
        UnsupportedFixedPointsError
            If an extremum is not a sphere or a component sits at a level
            not allowed for semifree actions with sphere extrema.
        """
        for c in self.components:
            if not fixed_component_allowed(c.level, c.dim) or abs(c.level) > 2:
                raise UnsupportedFixedPointsError(
                    f"{c.shape} of dimension {c.dim} at level {c.level}"
                )
        low, high = self.at_level(-1), self.at_level(1)
        if len(low) != len(high):
            raise UnsupportedFixedPointsError(
                f"{len(low)} points at level -1 but {len(high)} at level +1"
            )
        z0 = self.at_level(0)
        profile = CriticalProfile.from_counts(m=len(low), z0_components=len(z0))
        c1_cubed = chern_number(profile, self.b_min, self.b_max)
        volume = self.polytope.normalized_volume()
        if volume != c1_cubed:
            raise UnsupportedFixedPointsError(
                fill(f"Localization gives c1^3 = {c1_cubed} but the polytope volume is {volume}")
            )
        return FixedPointSummary(
            profile.pattern,
            profile.m,
            tuple(sorted(c.area for c in z0)),
            self.b_min,
            self.b_max,
            self.polytope.b2,
            c1_cubed,
            self.incidence_signature(),
            source,
        )

    def incidence_signature(self):
        """(area, #points at −1, #points at +1) joined to each level-0 sphere
        by an edge, sorted."""
        P = self.polytope
        point_of = {c.vertices[0]: c.level for c in self.components if c.dim == 0}
        sig = []
        for c in self.at_level(0):
            down, up = set(), set()
            for i in c.vertices:
                for j in P.neighbours(i):
                    if point_of.get(j) == -1:
                        down.add(j)
                    elif point_of.get(j) == 1:
                        up.add(j)
            sig.append((c.area, len(down), len(up)))
        return tuple(sorted(sig))


def balanced_values(P, xi):
    """Fixed point report of the circle ``xi`` acting on the toric manifold
    of ``P``, with the balanced moment map.

    Raises
    ------
    NotSemifreeError
        If some isotropy weight is not in {−1, 0, 1}.

    NotBalancedError
        If no shift balances the moment map (``P`` is not monotone).
    """
    xi = _as_circle(xi)
    if not is_semifree(P, xi):
        raise NotSemifreeError(f"ξ = {xi.xi} has an isotropy weight of absolute value > 1")
    shift = -xi.weight(balanced_center(P))
    return ToricFixedReport(P, xi, tuple(fixed_faces(P, xi)), int(shift))


def record_key(record):
    return (
        record.pattern,
        record.m,
        tuple(record.z0_areas),
        record.b_min,
        record.b_max,
        record.b2,
        record.c1_cubed,
    )


def match_tfd(summary, records):
    """Find the record with the same fixed point data.

    The summary is reversed first when b_min > b_max. Records sharing the
    numerical key are separated by the incidence signature of the level-0
    spheres.

    Returns
    -------
    record: TFDRecord

    Raises
    ------
    AmbiguousMatchError
        If no record or several records remain.
    """
    if isinstance(summary, ToricFixedReport):
        summary = summary.summary()
    if summary.b_min > summary.b_max:
        summary = summary.reversed()
    candidates = [r for r in records if record_key(r) == summary.key()]
    if len(candidates) > 1 and summary.incidence is not None:
        candidates = [r for r in candidates if r.incidence_signature() == summary.incidence]
    if not candidates:
        raise AmbiguousMatchError(
            f"{summary.source or 'summary'} matches no fixed point data (key {summary.key()})"
        )
    if len(candidates) > 1:
        raise AmbiguousMatchError(
            fill(
                f"{summary.source or 'summary'} matches "
                + ", ".join(r.case_id for r in candidates)
            )
        )
    return candidates[0]
