import pytest

from semifree_tfd.lattice import SurfaceModel, hirzebruch, s2xs2
from semifree_tfd.splitting import (
    EmptyInputError,
    adjunction_genus,
    enumerate_splittings,
    oracle_splittings,
    reject_if_no_splitting,
)


def test_adjunction_genus():
    S = s2xs2()
    assert adjunction_genus(S, S.cls(1, 1)) == 0
    assert adjunction_genus(S, S.cls(2, 2)) == 1
    assert adjunction_genus(S, S.cls(2, 0)) is None


def test_two_fibres():
    S = s2xs2()
    total = S.cls(0, 2)
    found = enumerate_splittings(S, S.c1, total, 4)
    assert len(found) == 1
    assert found[0].classes == [S.cls(0, 1), S.cls(0, 1)]
    assert found[0].genera == [0, 0]
    assert found[0].total() == total


def test_section_and_fibre_on_hirzebruch():
    H = hirzebruch()
    found = enumerate_splittings(H, H.c1, H.cls(1, 2), 4)
    assert len(found) == 1
    assert found[0].classes == [H.cls(0, 1), H.cls(1, 1)]


def test_anticanonical_curve_is_a_torus():
    S = s2xs2()
    found = enumerate_splittings(S, S.c1, S.c1, 8)
    assert [s.genera for s in found] == [[1]]


@pytest.mark.parametrize(
    "model, total, vol",
    [
        (s2xs2(), (0, 2), 4),
        (hirzebruch(), (1, 2), 4),
        (s2xs2(), (1, 0), 2),
        (SurfaceModel("Hirzebruch", 1), (0, 1, 1), 2),
    ],
)
def test_pruned_enumeration_agrees_with_oracle(model, total, vol):
    total = model.cls(*total)
    pruned = enumerate_splittings(model, model.c1, total, vol)
    oracle = oracle_splittings(model, model.c1, total, vol)
    assert set(pruned) == set(oracle)


def test_branches_without_splitting():
    S, H = s2xs2(), hirzebruch()
    assert reject_if_no_splitting(S, S.c1, S.cls(-1, 2), 2)
    assert reject_if_no_splitting(H, H.c1, H.cls(0, 2), 2)
    assert not reject_if_no_splitting(S, S.c1, S.cls(1, 0), 2)


def test_bad_volumes():
    S = s2xs2()
    with pytest.raises(EmptyInputError):
        enumerate_splittings(S, S.c1, S.cls(1, -1), 0)
    with pytest.raises(ValueError):
        enumerate_splittings(S, S.c1, S.cls(1, 0), 3)


def test_oracle_agrees_on_classified_records(records):
    for r in records:
        if r.splitting is None or r.vol_z0 > 6:
            continue
        M0 = r.model0
        pruned = enumerate_splittings(M0, M0.c1, r.z_total, r.vol_z0)
        assert set(pruned) == set(oracle_splittings(M0, M0.c1, r.z_total, r.vol_z0))
        assert r.splitting in pruned
