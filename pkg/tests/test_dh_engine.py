import pytest

from semifree_tfd.dh_engine import (
    BlowdownInconsistencyError,
    CollapseError,
    CriticalProfile,
    EmptyWallError,
    ExtremalData,
    InconsistentExtremumError,
    NegativeAreaError,
    NotAWallError,
    ParityError,
    SecondVanishingClassError,
    Slice,
    WallCrossingError,
    assemble_slices,
    blowdown_basis,
    check_volume_collapse,
    critical_value_table,
    cross_blowdown_wall,
    cross_blowup_wall,
    cross_surface_wall,
    extremal_euler,
    fixed_component_allowed,
    initial_slice,
    max_side_basis,
    mirror_slice,
    positive_on_interval,
    slice_is_positive,
)
from semifree_tfd.lattice import SurfaceModel, hirzebruch, s2xs2, square


@pytest.mark.parametrize(
    "b, base, coeffs",
    [(2, "S2xS2", (1, -1)), (0, "S2xS2", (0, -1)), (1, "Hirzebruch", (0, -1)), (-1, "Hirzebruch", (-1, -1))],
)
def test_extremal_euler(b, base, coeffs):
    m = SurfaceModel(base)
    d = ExtremalData(b)
    assert d.base == base
    assert d.area == 2 + b
    e = extremal_euler(d, m)
    assert e == m.cls(*coeffs)
    assert square(m, e) == -b
    assert extremal_euler(ExtremalData(b, side="max"), m) == -e


def test_extremal_data_rejects_negative_area():
    with pytest.raises(InconsistentExtremumError):
        ExtremalData(-2)
    with pytest.raises(ValueError):
        ExtremalData(0, side="top")
    with pytest.raises(InconsistentExtremumError):
        extremal_euler(ExtremalData(1), s2xs2())


def test_initial_slice_reaches_c1_at_level_zero():
    s = initial_slice(ExtremalData(2))
    assert s.omega_at(0) == s.model.c1
    assert s.omega_at(2) == s.model.cls(0, 4)
    assert check_volume_collapse(s)
    # b = 0 without level-0 surfaces does not collapse at the maximum
    assert not check_volume_collapse(initial_slice(ExtremalData(0)))


def test_positive_on_interval():
    S = s2xs2()
    omega_lo, euler = S.cls(4, 0), S.cls(1, -1)
    assert positive_on_interval(S, omega_lo, euler, -2, 2)
    assert not positive_on_interval(S, omega_lo, euler, -2, 3)


def test_blowup_wall_adds_exceptional_classes_to_euler():
    s = initial_slice(ExtremalData(0), hi=-1)
    s1 = cross_blowup_wall(s, 1)
    M0 = SurfaceModel("S2xS2", 1)
    assert s1.model == M0
    assert s1.euler == M0.cls(0, -1, 1)
    assert s1.omega_lo == M0.cls(2, 1, 0)
    assert s1.omega_at(0) == M0.c1
    with pytest.raises(WallCrossingError):
        cross_blowup_wall(initial_slice(ExtremalData(0)), 1)


def test_surface_wall_needs_classes():
    s = initial_slice(ExtremalData(0), hi=0)
    with pytest.raises(EmptyWallError):
        cross_surface_wall(s, [], expected_components=1)
    s1 = cross_surface_wall(s, [s.model.cls(1, 0)])
    assert s1.euler == s.model.cls(1, -1)
    assert s1.omega_lo == s.model.c1


def _level_one_slice(model, omega1):
    return Slice(0, 1, model, omega1, model.zero())


def test_blowdown_wall_rejections():
    M = SurfaceModel("S2xS2", 1)
    x_minus_e = M.cls(1, 0, -1)
    with pytest.raises(SecondVanishingClassError):
        cross_blowdown_wall(_level_one_slice(M, M.cls(2, 2, -2)), [x_minus_e])
    with pytest.raises(NegativeAreaError):
        cross_blowdown_wall(_level_one_slice(M, M.cls(1, 2, -2)), [x_minus_e])
    with pytest.raises(NotAWallError):
        cross_blowdown_wall(_level_one_slice(M, M.cls(2, 2, -2)), [M.cls(0, 0, 1)])
    with pytest.raises(BlowdownInconsistencyError):
        cross_blowdown_wall(_level_one_slice(M, M.cls(2, 2, -2)), [M.cls(1, 0, 0)])


def test_blowdown_basis_checks():
    H, S = hirzebruch(), s2xs2()
    with pytest.raises(ParityError) as exc:
        blowdown_basis(H, H.c1, H.cls(1, 0))
    assert "E_S2 is odd" in str(exc.value)
    assert "vanishing" not in str(exc.value)
    with pytest.raises(CollapseError):
        blowdown_basis(S, S.c1, S.cls(0, -1))
    with pytest.raises(InconsistentExtremumError):
        blowdown_basis(S, S.c1, S.cls(1, 1))


def test_blowup_then_blowdown_of_a_line():
    M0 = SurfaceModel("Hirzebruch", 1)
    slices = assemble_slices(ExtremalData(1), m=1, cycles=[M0.basis_class("y")])
    assert [s.level_range for s in slices] == [(-2, -1), (-1, 1), (1, 2)]
    assert slices[1].model == M0
    assert slices[1].omega_at(0) == M0.c1
    assert all(slice_is_positive(s) for s in slices)
    last = slices[-1]
    assert last.model == hirzebruch()
    down = max_side_basis(last)
    assert down.b == 1
    assert down.push(M0.cls(1, 1, -1)) == last.model.cls(1, 0)
    assert check_volume_collapse(last)


def test_mirror_slice_is_an_involution():
    s = initial_slice(ExtremalData(2))
    m = mirror_slice(s)
    assert m.level_range == (-2, 2)
    assert m.omega_lo == s.omega_at(2)
    assert mirror_slice(m) == s


def test_critical_profile():
    assert CriticalProfile.from_counts().pattern == "I"
    assert CriticalProfile.from_counts(z0_components=2).pattern == "II"
    assert CriticalProfile.from_counts(m=3).pattern == "III"
    assert CriticalProfile.from_counts(m=1, z0_components=1).pattern == "IV"
    with pytest.raises(ValueError):
        CriticalProfile(frozenset({-1}), m=1)
    with pytest.raises(ValueError):
        CriticalProfile(frozenset({0}), z0_components=0)


def test_critical_value_table():
    table = critical_value_table()
    assert len(table) == 9
    assert [row[0] for row in table] == [3, 2, 1, 1, 0, -1, -1, -2, -3]
    assert fixed_component_allowed(0, 2)
    assert fixed_component_allowed(-1, 0)
    assert not fixed_component_allowed(0, 0)
    assert not fixed_component_allowed(2, 0)
