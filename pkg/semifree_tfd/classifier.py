import itertools
import re
import warnings
from dataclasses import dataclass, field, replace
from textwrap import fill
from typing import Optional

import numpy as np
import sympy
import tqdm

from semifree_tfd.dh_engine import (
    Blowdown,
    CriticalProfile,
    ExtremalData,
    WallCrossingError,
    assemble_slices,
    check_volume_collapse,
    extremal_euler,
    max_side_basis,
    slice_is_positive,
)
from semifree_tfd.exceptional import exceptional_classes
from semifree_tfd.io import load_config
from semifree_tfd.lattice import (
    CohClass,
    SurfaceModel,
    embed,
    format_class,
    pair,
    parse_class,
    square,
)
from semifree_tfd.localization import (
    FixedComponent,
    betti2,
    case_iii_solutions,
    chern_number,
    contribution_c13,
    enumerate_profile_solutions,
    identity_int_c1,
    identity_int_one,
    identity_int_one_general,
    localization_sums,
)
from semifree_tfd.splitting import Splitting, enumerate_splittings

PATTERNS = ("I", "II", "III", "IV")

CRIT_PATTERNS = {
    "I": frozenset(),
    "II": frozenset({0}),
    "III": frozenset({-1, 1}),
    "IV": frozenset({-1, 0, 1}),
}

# Mori-Mukai number (rank-index) and a description of the Fano threefold
# realizing each case
FANO_REALIZATIONS = {
    "I-1": ("1-17", "CP3"),
    "II-1.1": ("2-32", "W, the complete flag variety of C3"),
    "II-1.2": ("2-35", "V7, blow-up of CP3 at a point"),
    "II-1.3": ("3-27", "CP1 x CP1 x CP1"),
    "II-2.1": ("3-28", "CP1 x F1"),
    "II-2.2": ("2-29", "blow-up of the quadric threefold along a conic"),
    "III.1": ("2-33", "blow-up of CP3 along a line"),
    "III.2": ("3-25", "blow-up of CP3 along two disjoint lines"),
    "III.3": ("4-6", "blow-up of CP3 along three disjoint lines"),
    "IV-1-1.1": ("5-2", "blow-up of 3-25 along two exceptional lines on one divisor"),
    "IV-1-1.2": ("5-3", "CP1 x S6, S6 the sextic del Pezzo surface"),
    "IV-1-1.3": ("4-7", "blow-up of W along two disjoint curves of bidegree (0,1), (1,0)"),
    "IV-1-2": ("4-9", "blow-up of 3-25 along an exceptional line"),
    "IV-2-1.1": ("3-20", "blow-up of the quadric threefold along two disjoint lines"),
    "IV-2-1.2": ("4-8", "blow-up of CP1 x CP1 x CP1 along a curve of tridegree (0,1,1)"),
    "IV-2-2.1": ("3-24", "blow-up of W along an invariant sphere"),
    "IV-2-2.2": ("4-10", "CP1 x S7, S7 the blow-up of CP2 at two points"),
    "IV-2-3": ("3-26", "blow-up of CP3 along a disjoint point and line"),
    "IV-2-4": ("3-29", "blow-up of V7 along a line in the exceptional divisor"),
    "IV-2-5": ("4-12", "blow-up of 2-33 along two exceptional lines"),
    "IV-2-6": ("3-30", "blow-up of V7 along a line through the blown-up point"),
}

# sub-case order within groups holding more than one record, keyed by the
# level-0 component classes
SUBCASE_ORDER = {
    "II-1": [["x + y"], ["x"], ["y", "y"]],
    "II-2": [["y", "x + y"], ["2x + 2y"]],
    "IV-1-1": [
        ["x + y - E1 - E2", "x - E1"],
        ["y", "x + y - E1 - E2"],
        ["x + y - E1"],
    ],
    "IV-2-1": [["2x + y - E1"], ["x + y - E1", "x + y - E1"]],
    "IV-2-2": [["x + y"], ["y", "x + y - E1"]],
}


class ClassificationError(RuntimeError):
    pass


class _Rejected(Exception):
    def __init__(self, reason, detail=""):
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class Rejection:
    """Provenance of a pruned branch."""

    branch: str
    reason: str
    detail: str = ""

    def __str__(self):
        text = f"{self.branch}: {self.reason}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass(frozen=True)
class CaseBranch:
    """One node of the case tree.

    ``constraints`` are sympy expressions in ``unknowns`` that must vanish,
    ``inequalities`` must be nonnegative.
    """

    crit_pattern: str
    m0_kind: str
    unknowns: tuple
    constraints: tuple = ()
    inequalities: tuple = ()
    vanishing_cycles: tuple = ()
    m: int = 0
    label: str = ""

    def __post_init__(self):
        if self.crit_pattern not in CRIT_PATTERNS:
            raise ValueError(f"Unknown critical pattern {self.crit_pattern!r}")

    @property
    def interior_levels(self):
        return CRIT_PATTERNS[self.crit_pattern]


@dataclass(frozen=True)
class TFDRecord:
    """One topological fixed point data.

    Classes at level 0 (``omega0``, ``splitting``, ``cycles``,
    ``euler0_minus``, ``euler0_plus``) live in ``model0``.
    ``euler_minus2_plus`` lives in the base surface next to the minimum and
    ``euler_max`` (e(P_2⁻)) in ``max_side.target``.
    """

    case_id: str
    profile: CriticalProfile
    model0: SurfaceModel
    omega0: CohClass
    euler_minus2_plus: CohClass
    fixed: tuple
    b_min: int
    b_max: int
    b2: int
    c1_cubed: int
    k: int
    splitting: Optional[Splitting]
    cycles: tuple
    euler0_minus: CohClass
    euler0_plus: CohClass
    euler_max: CohClass
    max_side: Blowdown = field(compare=False, repr=False)
    mori_mukai: str = ""
    fano: str = ""

    @property
    def pattern(self):
        return self.profile.pattern

    @property
    def m(self):
        return self.profile.m

    @property
    def base_model(self):
        return SurfaceModel(self.model0.base)

    @property
    def z_parts(self):
        return [] if self.splitting is None else self.splitting.classes

    @property
    def z_total(self):
        return self.model0.zero() if self.splitting is None else self.splitting.total()

    @property
    def z0_components(self):
        return [f for f in self.fixed if f.level == 0]

    @property
    def vol_z0(self):
        return sum(f.area for f in self.z0_components)

    @property
    def z0_areas(self):
        return sorted(f.area for f in self.z0_components)

    def key(self):
        return (
            self.pattern,
            self.model0,
            self.b_min,
            self.b_max,
            tuple(sorted(z.coeffs for z in self.z_parts)),
            tuple(sorted(C.coeffs for C in self.cycles)),
        )

    def incidence_signature(self):
        """(area, #E_i met, #C_j met) per level-0 component, sorted."""
        sig = []
        for f in self.z0_components:
            down = sum(1 for E in self.model0.exceptional_basis() if pair(self.model0, f.pd_class, E) != 0)
            up = sum(1 for C in self.cycles if pair(self.model0, f.pd_class, C) != 0)
            sig.append((f.area, down, up))
        return tuple(sorted(sig))


def _symbols(names):
    return sympy.symbols(names, integer=True) if names else ()


def _sym(cls_or_coeffs):
    return sympy.Matrix(list(cls_or_coeffs))


def _sym_pair(m, a, b):
    G = sympy.Matrix(np.asarray(m.gram).tolist())
    return sympy.expand((a.T * G * b)[0, 0])


def _grid(box, n):
    axis = np.arange(box[0], box[1] + 1, dtype=np.int64)
    return np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)


def solve_branch(branch, box=(-4, 6)):
    """Integer solutions of a branch's constraint system inside ``box``.

    The constraints are lambdified to numpy and evaluated on the full grid.

    Returns
    -------
    solutions: list of tuple
        Values of ``branch.unknowns`` in grid order.
    """
    syms = _symbols(branch.unknowns)
    if not syms:
        return [()]
    exprs = list(branch.constraints) + list(branch.inequalities)
    grid = _grid(box, len(syms))
    mask = np.ones(len(grid), dtype=bool)
    if exprs:
        values = sympy.lambdify(syms, exprs, "numpy")(*grid.T)
        for i, v in enumerate(values):
            v = np.broadcast_to(np.asarray(v), mask.shape)
            mask &= (v == 0) if i < len(branch.constraints) else (v >= 0)
    solutions = grid[mask]
    if len(solutions) and (np.any(solutions == box[0]) or np.any(solutions == box[1])):
        warnings.warn(
            fill(
                f"{branch.label}: a solution touches the search box {box}; "
                "enlarge `coefficient_box` in the config"
            )
        )
    return [tuple(int(v) for v in row) for row in solutions]


def _b_min(base, k):
    return 2 * k + (1 if base == "Hirzebruch" else 0)


def _replay(base, k, m, z_total, cycles):
    """Run the wall crossings for one candidate and check positivity."""
    try:
        d = ExtremalData(_b_min(base, k))
        z_classes = [] if z_total is None or z_total.is_zero else [z_total]
        slices = assemble_slices(d, m, z_classes, list(cycles))
        down = max_side_basis(slices[-1])
    except WallCrossingError as err:
        raise _Rejected(err.reason, str(err))
    for s in slices:
        if not slice_is_positive(s):
            raise _Rejected("volume not positive", f"[omega_t]^2 on ({s.lo}, {s.hi})")
    if not check_volume_collapse(slices[-1]):
        raise _Rejected("no collapse at the maximum")
    return d, slices, down


def _make_record(case_id, base, k, m, splitting, cycles, d, down):
    M0 = SurfaceModel(base, m)
    e_min = extremal_euler(d, SurfaceModel(base))
    e0_minus = embed(e_min, M0)
    for E in M0.exceptional_basis():
        e0_minus = e0_minus + E
    parts = [] if splitting is None else list(splitting.parts)
    e0_plus = e0_minus
    for z, _ in parts:
        e0_plus = e0_plus + z
    e_max = e0_plus
    for C in cycles:
        e_max = e_max + C

    fixed = [FixedComponent(-2, "sphere", area=d.area, b=d.b)]
    fixed += [FixedComponent(-1, "point")] * m
    for z, genus in parts:
        shape = {0: "sphere", 1: "torus"}.get(genus, "surface")
        fixed.append(
            FixedComponent(
                0,
                shape,
                genus,
                z,
                area=pair(M0, M0.c1, z),
                normal_chern=(-pair(M0, e0_minus, z), pair(M0, e0_plus, z)),
            )
        )
    fixed += [FixedComponent(1, "point")] * m
    fixed.append(FixedComponent(2, "sphere", area=2 + down.b, b=down.b))

    profile = CriticalProfile.from_counts(m=m, z0_components=len(parts))
    mori_mukai, fano = FANO_REALIZATIONS.get(case_id, ("", ""))
    return TFDRecord(
        case_id=case_id,
        profile=profile,
        model0=M0,
        omega0=M0.c1,
        euler_minus2_plus=e_min,
        fixed=tuple(fixed),
        b_min=d.b,
        b_max=down.b,
        b2=betti2(profile),
        c1_cubed=chern_number(profile, d.b, down.b),
        k=k,
        splitting=splitting,
        cycles=tuple(cycles),
        euler0_minus=e0_minus,
        euler0_plus=e0_plus,
        euler_max=down.push(e_max),
        max_side=down,
        mori_mukai=mori_mukai,
        fano=fano,
    )


def _candidate(label, base, k, m, z_total, cycles, config, expected_b_max=None, log=None):
    """Check one solved candidate; return its records (one per splitting)."""
    M0 = SurfaceModel(base, m)
    try:
        d, slices, down = _replay(base, k, m, z_total, cycles)
        if expected_b_max is not None and down.b != expected_b_max:
            raise _Rejected("euler square", f"b_max = {down.b}, expected {expected_b_max}")
        if z_total is not None and not z_total.is_zero:
            vol = pair(M0, M0.c1, z_total)
            splittings = enumerate_splittings(
                M0, M0.c1, z_total, vol, slack=config["splitting_slack"]
            )
            if not splittings:
                raise _Rejected("adjunction infeasible", f"PD(Z0) = {format_class(M0, z_total)}")
        else:
            splittings = [None]
        if d.b > down.b:
            raise _Rejected("orientation", f"(b_min, b_max) = ({d.b}, {down.b}) is the reversed action")
    except _Rejected as rej:
        if log is not None:
            log.append(Rejection(label, rej.reason, rej.detail))
        return []
    return [_make_record("", base, k, m, s, cycles, d, down) for s in splittings]


def _base_for(b):
    return "S2xS2" if b % 2 == 0 else "Hirzebruch"


def classify_case_I(config=None, log=None):
    """No interior critical levels: the extremal spheres are joined by a
    single regular interval and [ω_t]² must collapse at t = 2.

    Returns
    -------
    records: list of TFDRecord
    """
    config = load_config() if config is None else config
    records = []
    k = sympy.Symbol("k")
    for base in ("S2xS2", "Hirzebruch"):
        m = SurfaceModel(base)
        label = f"I {base}"
        e_min = _sym([k, -1])
        omega2 = _sym(m.c1) - 2 * e_min
        collapse = _sym_pair(m, omega2, omega2)
        for root in sympy.solve(collapse, k):
            if not root.is_integer:
                if log is not None:
                    log.append(Rejection(label, "non-integral k", f"{collapse} = 0 at k = {root}"))
                continue
            if _b_min(base, int(root)) < -1:
                if log is not None:
                    log.append(Rejection(label, "b_min < -1", f"k = {root}"))
                continue
            records += _candidate(
                f"{label} k={root}", base, int(root), 0, None, (), config, log=log
            )
    return _finalize(records, "I")


def case_ii_branch(base):
    """Constraint system for a single level-0 wall on a ruled base."""
    m = SurfaceModel(base)
    k, a, b = _symbols("k a b")
    parity = 1 if base == "Hirzebruch" else 0
    e_min = _sym([k, -1])
    z = _sym([a, b])
    c1 = _sym(m.c1)
    e0 = e_min + z
    b_min = 2 * k + parity
    b_max = -_sym_pair(m, e0, e0)
    vol = _sym_pair(m, c1, z)
    collapse = sympy.expand(_sym_pair(m, c1, e0) - (2 - b_max))
    constraints = (
        collapse,
        sympy.expand(vol - (4 - b_min - b_max)),
        sympy.expand(b_max - b_min + _sym_pair(m, e0 + e_min, z)),
    )
    inequalities = (b_min + 1, sympy.expand(b_max + 1), vol - 1)
    return CaseBranch(
        "II",
        base,
        ("k", "a", "b"),
        constraints,
        inequalities,
        label=f"II {base}",
    )


def classify_case_II(config=None, log=None):
    """One interior critical level (fixed surfaces at level 0)."""
    config = load_config() if config is None else config
    records = []
    for base in ("S2xS2", "Hirzebruch"):
        branch = case_ii_branch(base)
        model = SurfaceModel(base)
        for k, a, b in solve_branch(branch, config["coefficient_box"]):
            label = f"{branch.label} (k,a,b)=({k},{a},{b})"
            records += _candidate(label, base, k, 0, model.cls(a, b), (), config, log=log)
    return _finalize(records, "II")


def _exceptional(model, config):
    return exceptional_classes(
        model, config["exceptional_degree_bound"], config["exceptional_multiplicity_bound"]
    )


def _orthogonal_subsets(model, classes, size):
    for subset in itertools.combinations(classes, size):
        if all(pair(model, A, B) == 0 for A, B in itertools.combinations(subset, 2)):
            yield subset


def classify_case_III(config=None, log=None):
    """Isolated fixed points at levels ±1 and nothing at level 0."""
    config = load_config() if config is None else config
    records = []
    for b, m in case_iii_solutions(config["case_iii_b_range"], config["case_iii_m_range"]):
        base, k = _base_for(b), b // 2
        M0 = SurfaceModel(base, m)
        e0 = embed(extremal_euler(ExtremalData(b), SurfaceModel(base)), M0)
        for E in M0.exceptional_basis():
            e0 = e0 + E
        omega1 = M0.c1 - e0
        zero = [E for E in _exceptional(M0, config) if pair(M0, omega1, E) == 0]
        label = f"III {M0.label} b={b}"
        subsets = list(_orthogonal_subsets(M0, zero, m))
        if not subsets and log is not None:
            log.append(Rejection(label, "too few vanishing cycles", f"{len(zero)} < {m}"))
        for cycles in subsets:
            records += _candidate(
                label, base, k, m, None, cycles, config, expected_b_max=b, log=log
            )
    return _finalize(records, "III")


def case_iv_branch(profile_solution, cycles):
    """Constraint system for PD(Z0) given the profile and vanishing cycles."""
    m, vol, b_min, b_max = profile_solution
    base, k = _base_for(b_min), b_min // 2
    M0 = SurfaceModel(base, m)
    names = ("a", "b", "c", "d", "f")[: M0.rank]
    syms = _symbols(names)
    z = _sym(syms)
    e0_minus = embed(extremal_euler(ExtremalData(b_min), SurfaceModel(base)), M0)
    for E in M0.exceptional_basis():
        e0_minus = e0_minus + E
    e0m = _sym(e0_minus)
    e0 = e0m + z
    c1 = _sym(M0.c1)
    sum_c = sympy.zeros(M0.rank, 1)
    for C in cycles:
        sum_c += _sym(C)
    constraints = tuple(_sym_pair(M0, e0, _sym(C)) - 1 for C in cycles) + (
        _sym_pair(M0, c1, z) - vol,
        _sym_pair(M0, e0, e0) + m + b_max,
        _sym_pair(M0, c1 + sum_c, e0 + sum_c) - (2 - b_max),
        b_max - b_min + _sym_pair(M0, 2 * e0m + z, z),
    )
    label = (
        f"IV m={m} vol={vol} b=({b_min},{b_max}) C={{"
        + ", ".join(format_class(M0, C) for C in cycles)
        + "}"
    )
    return CaseBranch("IV", base, names, constraints, (), tuple(cycles), m, label)


def classify_case_IV(config=None, log=None):
    """Isolated points at levels ±1 and fixed surfaces at level 0."""
    config = load_config() if config is None else config
    records = []
    profiles = enumerate_profile_solutions(normalized=True)
    jobs = []
    for solution in profiles:
        m, _, b_min, _ = solution
        M0 = SurfaceModel(_base_for(b_min), m)
        for cycles in _orthogonal_subsets(M0, _exceptional(M0, config), m):
            jobs.append((solution, cycles))
    for solution, cycles in tqdm.tqdm(
        jobs, desc="Case IV branches", ncols=72, disable=not config["show_progress"]
    ):
        m, _, b_min, b_max = solution
        base, k = _base_for(b_min), b_min // 2
        branch = case_iv_branch(solution, cycles)
        M0 = SurfaceModel(base, m)
        for coeffs in solve_branch(branch, config["coefficient_box"]):
            records += _candidate(
                f"{branch.label} z={format_class(M0, CohClass(coeffs))}",
                base,
                k,
                m,
                CohClass(coeffs),
                cycles,
                config,
                expected_b_max=b_max,
                log=log,
            )
    return _finalize(records, "IV")


def _permute_e(v, base_rank, perm):
    coeffs = list(v.coeffs)
    head, tail = coeffs[:base_rank], coeffs[base_rank:]
    new_tail = [0] * len(tail)
    for i, j in enumerate(perm):
        new_tail[j] = tail[i]
    return CohClass(tuple(head + new_tail))


def _sorted_splitting(model, parts):
    ordered = sorted(parts, key=lambda p: (pair(model, model.c1, p[0]), p[0].coeffs))
    return Splitting(tuple(ordered))


def _rebuild(r, base, k, splitting, cycles):
    total = None if splitting is None else splitting.total()
    try:
        d, _, down = _replay(base, k, r.m, total, cycles)
    except _Rejected as rej:
        raise ClassificationError(f"{r.case_id}: rebuilt record rejected ({rej.reason})")
    return _make_record(r.case_id, base, k, r.m, splitting, cycles, d, down)


def reverse_record(r):
    """Fixed point data of the reversed action ``H ↦ −H``.

    The level-0 lattice is rewritten in the basis (x′, y′, C_1, …, C_m)
    adapted to the maximum, so the vanishing cycles become the exceptional
    divisors and vice versa.
    """
    M0, down = r.model0, r.max_side

    def phi(v):
        rs = [-pair(M0, v, C) for C in r.cycles]
        rest = v
        for coeff, C in zip(rs, r.cycles):
            rest = rest - coeff * C
        return CohClass(tuple(down.push(rest).coeffs) + tuple(rs))

    base = down.target.base
    new_model = SurfaceModel(base, r.m)
    splitting = None
    if r.splitting is not None:
        splitting = _sorted_splitting(
            new_model, [(phi(z), g) for z, g in r.splitting.parts]
        )
    cycles = tuple(phi(E) for E in M0.exceptional_basis())
    return _rebuild(r, base, down.b // 2, splitting, cycles)


def canonicalize(r):
    """Orientation with b_min <= b_max and the lexicographically smallest
    labelling of the exceptional classes."""
    if r.b_min > r.b_max:
        r = reverse_record(r)
    if r.m < 2:
        return r
    base_rank = r.model0.base_rank
    best = None
    for perm in itertools.permutations(range(r.m)):
        parts = [] if r.splitting is None else [
            (_permute_e(z, base_rank, perm), g) for z, g in r.splitting.parts
        ]
        cycles = tuple(sorted((_permute_e(C, base_rank, perm) for C in r.cycles), key=lambda c: c.coeffs))
        key = (tuple(sorted(z.coeffs for z, _ in parts)), tuple(C.coeffs for C in cycles))
        if best is None or key < best[0]:
            best = (key, parts, cycles)
    _, parts, cycles = best
    splitting = _sorted_splitting(r.model0, parts) if parts else None
    if splitting == r.splitting and cycles == r.cycles:
        return r
    return _rebuild(r, r.model0.base, r.k, splitting, cycles)


def _group_of(r, normalized_profiles):
    if r.pattern == "I":
        return "I-1"
    if r.pattern == "II":
        return "II-1" if r.model0.base == "S2xS2" else "II-2"
    if r.pattern == "III":
        return None
    same_m = sorted((s[2], s[3]) for s in normalized_profiles if s[0] == r.m)
    index = same_m.index((r.b_min, r.b_max)) + 1
    return f"IV-{1 if r.m == 2 else 2}-{index}"


def _order_in_group(group, records):
    catalogue = SUBCASE_ORDER.get(group, [])
    if len(records) < 2 or not catalogue:
        return sorted(records, key=lambda r: sorted(z.coeffs for z in r.z_parts))

    def position(r):
        key = sorted(z.coeffs for z in r.z_parts)
        for i, entry in enumerate(catalogue):
            if sorted(parse_class(r.model0, text).coeffs for text in entry) == key:
                return (i, key)
        warnings.warn(
            fill(
                f"{group}: level-0 classes "
                + ", ".join(format_class(r.model0, z) for z in r.z_parts)
                + " are not in the sub-case catalogue"
            )
        )
        return (len(catalogue), key)

    return sorted(records, key=position)


def _finalize(records, pattern):
    """Canonicalize, deduplicate and assign case ids."""
    unique = {}
    for r in records:
        r = canonicalize(r)
        unique.setdefault(r.key(), r)
    records = list(unique.values())

    if pattern == "III":
        records.sort(key=lambda r: r.m)
        named = [(f"III.{i}", r) for i, r in enumerate(records, 1)]
    else:
        normalized = enumerate_profile_solutions(normalized=True)
        groups = {}
        for r in records:
            groups.setdefault(_group_of(r, normalized), []).append(r)
        named = []
        for group, members in groups.items():
            members = _order_in_group(group, members)
            if len(members) == 1:
                named.append((group, members[0]))
            else:
                named += [(f"{group}.{i}", r) for i, r in enumerate(members, 1)]

    out = []
    for case_id, r in named:
        mori_mukai, fano = FANO_REALIZATIONS.get(case_id, ("", ""))
        out.append(replace(r, case_id=case_id, mori_mukai=mori_mukai, fano=fano))
    return sorted(out, key=lambda r: case_sort_key(r.case_id))


def case_sort_key(case_id):
    """Sort key putting ids in master-table order (I-1, II-1.1, ..., IV-2-6)."""
    pattern, rest = re.match(r"([IV]+)[-.](.*)", case_id).groups()
    numbers = tuple(int(n) for n in re.split(r"[-.]", rest))
    return (PATTERNS.index(pattern), numbers)


CASE_FUNCTIONS = {
    "I": classify_case_I,
    "II": classify_case_II,
    "III": classify_case_III,
    "IV": classify_case_IV,
}


def classify_all(config=None, log=None, cases=PATTERNS):
    """Run the case tree and return the canonical list of fixed point data.

    Parameters
    ----------
    config: dict, default=None
        Search bounds (see :py:func:`semifree_tfd.io.load_config`).

    log: list, default=None
        Receives a :py:class:`Rejection` for every pruned branch.

    cases: iterable of str
        Subset of ``("I", "II", "III", "IV")``.

    Returns
    -------
    records: list of TFDRecord
        Ordered by case id.
    """
    config = load_config() if config is None else config
    records = []
    for pattern in cases:
        if pattern not in CASE_FUNCTIONS:
            raise ValueError(f"Unknown case {pattern!r}; choose from {PATTERNS}")
        records += CASE_FUNCTIONS[pattern](config=config, log=log)
    return sorted(records, key=lambda r: case_sort_key(r.case_id))


def check_record(r):
    """Re-verify one record; return the list of failed properties."""
    problems = []
    M0 = r.model0
    name = r.case_id or "record"
    if r.omega0 != M0.c1:
        problems.append(f"{name}: omega0 is not c1(M0)")
    if r.b_min > r.b_max:
        problems.append(f"{name}: b_min > b_max")
    if r.b2 != betti2(r.profile):
        problems.append(f"{name}: b2 mismatch")
    closed = sum(contribution_c13(f) for f in r.fixed)
    if r.c1_cubed != chern_number(r.profile, r.b_min, r.b_max) or closed != r.c1_cubed:
        problems.append(f"{name}: c1^3 = {r.c1_cubed}, components give {closed}")
    sums = localization_sums(r.fixed)
    if sums[-3] != 0 or sums[-2] != 0 or sums[0] != r.c1_cubed:
        problems.append(f"{name}: localization sums {sums}")
    if r.pattern == "III" and not identity_int_one(r.b_min, r.b_max):
        problems.append(f"{name}: b_max != b_min")
    normals = [f.normal_chern for f in r.z0_components]
    if not identity_int_one_general(r.b_min, r.b_max, normals):
        problems.append(f"{name}: integral of 1 does not vanish")
    if not identity_int_c1(r.profile, r.b_min, r.b_max, r.vol_z0):
        problems.append(f"{name}: integral of c1 does not vanish")
    if square(r.max_side.target, r.euler_max) != -r.b_max:
        problems.append(f"{name}: e(P_2^-)^2 != -b_max")
    for f in r.z0_components:
        if f.genus != 0:
            problems.append(f"{name}: level-0 component of genus {f.genus}")
        if pair(M0, M0.c1, f.pd_class) != f.area:
            problems.append(f"{name}: area mismatch for {format_class(M0, f.pd_class)}")
    for i, f in enumerate(r.z0_components):
        for g in r.z0_components[i + 1:]:
            if pair(M0, f.pd_class, g.pd_class) != 0:
                problems.append(f"{name}: level-0 components intersect")

    try:
        d, slices, down = _replay(M0.base, r.k, r.m, r.z_total, r.cycles)
    except _Rejected as rej:
        return problems + [f"{name}: replay rejected ({rej.reason})"]
    replayed = _make_record(r.case_id, M0.base, r.k, r.m, r.splitting, r.cycles, d, down)
    for attr in ("euler_minus2_plus", "euler0_minus", "euler0_plus", "euler_max", "fixed"):
        if getattr(replayed, attr) != getattr(r, attr):
            problems.append(f"{name}: replay changes {attr}")
    if slices[0].omega_at(-2) != r.base_model.c1 + 2 * r.euler_minus2_plus:
        problems.append(f"{name}: replay changes omega at the minimum")
    at_zero = [s for s in slices if s.lo <= 0 <= s.hi and s.model == M0]
    if not at_zero or at_zero[0].omega_at(0) != r.omega0:
        problems.append(f"{name}: [omega_0] != c1(M0) after replay")
    return problems


def reduced_space_census(records):
    """Reduced spaces at level 0 must be S²×S² or ℙ²#kℙ²bar with k <= 4.

    Returns
    -------
    problems: list of str
    """
    problems = []
    for r in records:
        M0 = r.model0
        ok = (M0.base == "S2xS2" and M0.blowups == 0) or M0.rank - 1 <= 4
        if not ok:
            problems.append(f"{r.case_id}: reduced space {M0.label} is outside the rigid range")
    return problems
