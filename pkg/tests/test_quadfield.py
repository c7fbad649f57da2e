import pytest
from unittest.mock import patch
from pathlib import Path

# Add the parent directory to the path so we can import eisrank
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eisrank.core.exceptions import ConsistencyError, DegenerateCompositumError, InvalidInputError
from eisrank.services.dirichlet import is_fundamental
from eisrank.services.quadfield import (
    Splitting,
    analytic_class_number,
    class_number_imag,
    compose,
    heegner_hypothesis,
    quad_field,
    splitting,
    units_count,
)

KNOWN_CLASS_NUMBERS = {
    -3: 1, -4: 1, -7: 1, -8: 1, -20: 2, -23: 3, -47: 5, -56: 4, -71: 7,
    -123: 2, -168: 4, -328: 4, -1239: 32,
}


@pytest.mark.parametrize("disc,h", sorted(KNOWN_CLASS_NUMBERS.items()))
def test_class_number_by_forms(disc, h):
    assert class_number_imag(disc) == h


@pytest.mark.parametrize("disc", sorted(KNOWN_CLASS_NUMBERS))
def test_analytic_class_number_agrees(disc):
    assert analytic_class_number(disc) == class_number_imag(disc)


def test_class_number_rejects_bad_discriminants():
    for disc in (5, -12, 0):
        with pytest.raises(InvalidInputError):
            class_number_imag(disc)


def test_units_count():
    assert units_count(-3) == 6
    assert units_count(-4) == 4
    assert units_count(-7) == 2


def test_quad_field_validation():
    assert quad_field(-59).is_imaginary
    assert not quad_field(41).is_imaginary
    assert quad_field(-8).character.disc == -8
    with pytest.raises(InvalidInputError):
        quad_field(1)
    with pytest.raises(InvalidInputError):
        quad_field(-12)


def test_splitting():
    K = quad_field(-8)
    assert splitting(K, 3) is Splitting.SPLIT
    assert splitting(K, 2) is Splitting.RAMIFIED
    assert splitting(K, 5) is Splitting.INERT
    assert splitting(quad_field(41), 19) is Splitting.INERT


def test_compose():
    assert compose(quad_field(-3), quad_field(41)).disc == -123
    assert compose(quad_field(-7), quad_field(-59)).disc == 413
    with pytest.raises(DegenerateCompositumError):
        compose(quad_field(-7), quad_field(-7))


def test_heegner_hypothesis():
    assert heegner_hypothesis(quad_field(-59), 19 * 49)
    assert not heegner_hypothesis(quad_field(-8), 19 * 49)
    assert heegner_hypothesis(quad_field(-8), 19)


CLASS_NUMBER_ONE = {-3, -4, -7, -8, -11, -19, -43, -67, -163}


def test_class_number_one_list_is_complete():
    found = {d for d in range(-9999, 0) if is_fundamental(d) and class_number_imag(d) == 1}
    assert found == CLASS_NUMBER_ONE


def test_analytic_class_number_agrees_below_500():
    for d in range(-499, -4):
        if is_fundamental(d):
            assert analytic_class_number(d) == class_number_imag(d), d


def test_analytic_class_number_rejects_inconsistent_sum():
    with patch("eisrank.services.quadfield.kronecker", return_value=1):
        with pytest.raises(ConsistencyError):
            analytic_class_number(-8)


def test_compose_is_symmetric_and_involutive():
    discs = [-3, -4, -7, -8, -15, -20, 5, 8, 12, 13, 41, -123]
    for d1 in discs:
        for d2 in discs:
            if d1 == d2:
                continue
            k1, k2 = quad_field(d1), quad_field(d2)
            third = compose(k1, k2)
            assert third == compose(k2, k1)
            assert compose(third, k2) == k1
            assert (third.disc < 0) == ((d1 < 0) != (d2 < 0))
