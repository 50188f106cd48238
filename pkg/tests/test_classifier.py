import warnings
from collections import Counter

import pytest
import sympy

from semifree_tfd.classifier import (
    FANO_REALIZATIONS,
    CaseBranch,
    Rejection,
    _order_in_group,
    _permute_e,
    _rebuild,
    canonicalize,
    case_ii_branch,
    case_sort_key,
    check_record,
    classify_all,
    classify_case_I,
    reduced_space_census,
    reverse_record,
    solve_branch,
)
from semifree_tfd.lattice import SurfaceModel, format_class
from semifree_tfd.splitting import Splitting

CASE_IDS = [
    "I-1",
    "II-1.1",
    "II-1.2",
    "II-1.3",
    "II-2.1",
    "II-2.2",
    "III.1",
    "III.2",
    "III.3",
    "IV-1-1.1",
    "IV-1-1.2",
    "IV-1-1.3",
    "IV-1-2",
    "IV-2-1.1",
    "IV-2-1.2",
    "IV-2-2.1",
    "IV-2-2.2",
    "IV-2-3",
    "IV-2-4",
    "IV-2-5",
    "IV-2-6",
]
C1_CUBED = [64, 48, 56, 48, 48, 40, 54, 44, 34, 36, 36, 36, 40, 38, 38, 42, 42, 46, 50, 46, 50]


def test_twenty_one_records_in_table_order(records):
    assert [r.case_id for r in records] == CASE_IDS
    assert [r.c1_cubed for r in records] == C1_CUBED
    assert len({r.key() for r in records}) == 21


def test_b2_matches_mori_mukai_rank(records):
    assert Counter(r.b2 for r in records) == Counter(
        [1, 2, 2, 3, 3, 2, 2, 3, 4, 5, 5, 4, 4, 3, 4, 3, 4, 3, 3, 4, 3]
    )
    for r in records:
        assert r.mori_mukai == FANO_REALIZATIONS[r.case_id][0]
        assert int(r.mori_mukai.split("-")[0]) == r.b2


def test_every_record_passes_its_checks(records):
    for r in records:
        assert check_record(r) == [], r.case_id
    assert reduced_space_census(records) == []


def test_records_are_canonical(records):
    for r in records:
        assert r.b_min <= r.b_max
        assert canonicalize(r).key() == r.key()


def test_projective_space(by_id):
    r = by_id["I-1"]
    S = SurfaceModel("S2xS2")
    assert (r.b_min, r.b_max, r.k) == (2, 2, 1)
    assert r.model0 == S
    assert r.euler_minus2_plus == S.cls(1, -1)
    assert [f.level for f in r.fixed] == [-2, 2]


def test_case_ii_records(by_id):
    S = SurfaceModel("S2xS2")
    assert [format_class(S, z) for z in by_id["II-1.1"].z_parts] == ["x + y"]
    r = by_id["II-1.2"]
    assert [format_class(S, z) for z in r.z_parts] == ["x"]
    assert (r.b_min, r.b_max) == (0, 2)
    assert r.z0_areas == [2]
    assert [format_class(S, z) for z in by_id["II-1.3"].z_parts] == ["y", "y"]
    H = SurfaceModel("Hirzebruch")
    assert [format_class(H, z) for z in by_id["II-2.1"].z_parts] == ["y", "x + y"]
    r = by_id["II-2.2"]
    assert (r.b_min, r.b_max, r.z0_areas) == (-1, -1, [6])


def test_case_ii_branch_solutions():
    solutions = solve_branch(case_ii_branch("S2xS2"))
    assert set(solutions) == {(0, 1, 0), (0, 1, 1), (1, 0, 1), (0, 0, 2), (0, -1, 2), (1, -1, 2)}


def test_case_iii_records(by_id):
    models = [by_id[f"III.{i}"].model0 for i in (1, 2, 3)]
    assert models == [
        SurfaceModel("Hirzebruch", 1),
        SurfaceModel("S2xS2", 2),
        SurfaceModel("Hirzebruch", 3),
    ]
    r = by_id["III.1"]
    assert r.cycles == (r.model0.basis_class("y"),)
    assert (r.b_min, r.b_max) == (1, 1)
    assert format_class(by_id["III.2"].model0, by_id["III.2"].omega0) == "2x + 2y - E1 - E2"
    assert by_id["III.3"].m == 3


def test_case_iv_records(by_id):
    r = by_id["IV-1-2"]
    assert r.model0 == SurfaceModel("Hirzebruch", 2)
    assert [format_class(r.model0, z) for z in r.z_parts] == ["x - E1"]
    assert (r.b_min, r.b_max) == (-1, 0)
    r = by_id["IV-2-4"]
    assert [format_class(r.model0, z) for z in r.z_parts] == ["E1"]
    assert (r.b_min, r.b_max) == (-1, 2)
    r = by_id["IV-2-6"]
    assert r.model0 == SurfaceModel("S2xS2", 1)
    assert (r.b_min, r.b_max, r.c1_cubed, r.b2) == (0, 1, 50, 3)


def test_incidence_separates_equal_areas(by_id):
    first, second = by_id["IV-1-1.1"], by_id["IV-1-1.2"]
    assert first.z0_areas == second.z0_areas == [1, 1]
    assert first.incidence_signature() != second.incidence_signature()


def test_reversed_action_round_trip(by_id):
    r = by_id["II-1.2"]
    reversed_ = reverse_record(r)
    assert (reversed_.b_min, reversed_.b_max) == (2, 0)
    assert reversed_.c1_cubed == r.c1_cubed
    assert canonicalize(reversed_).key() == r.key()


def test_relabelled_exceptional_classes_are_canonicalized(by_id):
    r = by_id["IV-1-2"]
    swap = (1, 0)
    parts = tuple((_permute_e(z, 2, swap), g) for z, g in r.splitting.parts)
    cycles = tuple(_permute_e(C, 2, swap) for C in r.cycles)
    relabelled = _rebuild(r, r.model0.base, r.k, Splitting(parts), cycles)
    assert relabelled.key() != r.key()
    assert canonicalize(relabelled).key() == r.key()


def test_rejections_are_logged(rejections):
    reasons = {rej.reason for rej in rejections}
    assert {"non-integral k", "adjunction infeasible", "orientation", "lattice parity"} <= reasons
    assert all(isinstance(rej, Rejection) for rej in rejections)


def test_case_i_log():
    log = []
    records = classify_case_I(log=log)
    assert [r.case_id for r in records] == ["I-1"]
    assert [str(rej) for rej in log if rej.reason == "non-integral k"][0].startswith("I Hirzebruch")


def test_solutions_on_the_box_edge_warn():
    k = sympy.Symbol("k", integer=True)
    branch = CaseBranch("I", "S2xS2", ("k",), (k - 6,), label="edge")
    with pytest.warns(UserWarning):
        assert solve_branch(branch, (-4, 6)) == [(6,)]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        CaseBranch("V", "S2xS2", ())
    with pytest.raises(ValueError):
        classify_all(cases=("V",))


def test_case_sort_key():
    assert sorted(["IV-1-2", "III.1", "IV-1-1.3", "I-1"], key=case_sort_key) == [
        "I-1",
        "III.1",
        "IV-1-1.3",
        "IV-1-2",
    ]


def test_classification_is_silent():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        records = classify_all()
    assert len(records) == 21
    assert [str(w.message) for w in caught] == []


def test_single_record_groups_skip_the_catalogue(by_id):
    r = by_id["IV-2-6"]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert _order_in_group("IV-2-6", [r]) == [r]
        assert _order_in_group("I-1", [by_id["I-1"]]) == [by_id["I-1"]]
