from fractions import Fraction

import numpy as np
import pytest

from semifree_tfd.lattice import (
    CohClass,
    InvalidClassError,
    SurfaceModel,
    blow_up,
    check_model,
    embed,
    format_class,
    gram_matrix,
    hirzebruch,
    is_even,
    p2,
    pair,
    parse_class,
    s2xs2,
    signature,
    square,
    symplectic_area,
)


@pytest.mark.parametrize(
    "model, expected",
    [(p2(), 9), (s2xs2(), 8), (hirzebruch(), 8)],
)
def test_c1_square_drops_by_one_per_blowup(model, expected):
    for k in range(5):
        m = blow_up(model, k)
        assert square(m, m.c1) == expected - k


def test_ruled_intersection_forms():
    S, H = s2xs2(), hirzebruch()
    x, y = S.basis_class("x"), S.basis_class("y")
    assert (square(S, x), pair(S, x, y), square(S, y)) == (0, 1, 0)
    x, y = H.basis_class("x"), H.basis_class("y")
    assert (square(H, x), pair(H, x, y), square(H, y)) == (0, 1, -1)
    assert square(p2(), p2().basis_class("u")) == 1


def test_symplectic_area():
    S, H = s2xs2(), hirzebruch()
    assert symplectic_area(S, S.cls(2, 2), S.cls(1, 1)) == 4
    assert symplectic_area(H, H.cls(3, 2), H.cls(0, 1)) == 1
    assert symplectic_area(S, S.cls(2, 2), S.zero()) == 0
    assert symplectic_area(S, S.cls(Fraction(3, 2), 2), S.cls(1, 0)) == 2


def test_blow_up_appends_exceptional_class():
    m = blow_up(s2xs2())
    assert m.basis == ("x", "y", "E1")
    assert format_class(m, m.c1) == "2x + 2y - E1"
    m = blow_up(hirzebruch())
    assert format_class(m, m.c1) == "3x + 2y - E1"
    E = m.basis_class("E1")
    assert square(m, E) == -1
    assert pair(m, E, m.basis_class("x")) == 0


@pytest.mark.parametrize("base", ["P2", "S2xS2", "Hirzebruch"])
def test_models_are_unimodular_with_signature_one(base):
    for k in range(6):
        assert check_model(SurfaceModel(base, k)) == []


def test_signature_of_hyperbolic_plane():
    assert signature(np.array([[0, 1], [1, 0]])) == (1, 1)
    assert signature(np.diag([1, -1, -1])) == (1, 2)


def test_parse_and_format_class():
    m = SurfaceModel("S2xS2", 2)
    z = parse_class(m, "2x + 2y - E1 - E2")
    assert z == m.cls(2, 2, -1, -1)
    assert format_class(m, z) == "2x + 2y - E1 - E2"
    assert format_class(m, m.zero()) == "0"
    assert parse_class(m, "-x + 3E2") == m.cls(-1, 0, 0, 3)
    with pytest.raises(InvalidClassError):
        parse_class(m, "x + E3")


def test_class_length_is_checked():
    with pytest.raises(InvalidClassError):
        pair(s2xs2(), CohClass((1, 0, 0)), CohClass((1, 0)))
    with pytest.raises(InvalidClassError):
        s2xs2().cls(1, 2, 3)


def test_coefficient_bound_and_exact_rationals():
    with pytest.raises(OverflowError):
        CohClass((10**5, 0))
    with pytest.raises(InvalidClassError):
        CohClass((0.5, 1))
    half = CohClass((Fraction(1, 2), 1))
    assert not half.is_integral
    assert (2 * half).is_integral
    assert pair(s2xs2(), half, half) == 1


def test_parity():
    assert is_even(s2xs2())
    assert not is_even(hirzebruch())
    assert not is_even(blow_up(s2xs2()))


def test_embed_pads_with_zeros():
    m = SurfaceModel("Hirzebruch", 2)
    assert embed(hirzebruch().cls(1, -1), m) == m.cls(1, -1, 0, 0)
    with pytest.raises(InvalidClassError):
        embed(m.c1, hirzebruch())


def test_gram_matrix_of_exceptional_basis():
    m = SurfaceModel("P2", 3)
    gram = gram_matrix(m, m.exceptional_basis())
    assert (gram == -np.eye(3, dtype=int)).all()
