import pytest
import random
from pathlib import Path

# Add the parent directory to the path so we can import eisrank
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eisrank.core.exceptions import InvalidInputError
from eisrank.services.dirichlet import (
    TRIVIAL,
    QuadChar,
    char_eval,
    char_product,
    fundamental_discriminant,
    is_fundamental,
    psi_zero,
    quad_char,
    teich_char_eval_mod_p,
    teich_inverse_power,
)


@pytest.mark.parametrize("d", [1, -3, -4, -7, -8, 5, 8, 12, -20, 41, -123, -328, 413])
def test_fundamental(d):
    assert is_fundamental(d)


@pytest.mark.parametrize("d", [0, 2, 3, 9, -12, 16, -36])
def test_not_fundamental(d):
    assert not is_fundamental(d)


@pytest.mark.parametrize("d,expected", [(-2, -8), (2, 8), (3, 12), (-3, -3), (-36, -4), (9, 1), (-1239, -1239)])
def test_fundamental_discriminant(d, expected):
    assert fundamental_discriminant(d) == expected


def test_quad_char_rejects_non_fundamental():
    with pytest.raises(InvalidInputError):
        quad_char(-12)
    with pytest.raises(ValueError):
        QuadChar(disc=-12)


def test_character_values():
    chi = quad_char(-4)
    assert chi.parity == -1
    assert chi.conductor == 4
    assert chi(3) == -1
    assert chi(5) == 1
    assert chi(2) == 0
    assert TRIVIAL(7) == 1
    assert str(TRIVIAL) == "1"


def test_char_product():
    assert char_product(quad_char(-3), quad_char(41)).disc == -123
    assert char_product(quad_char(-7), quad_char(-7)).is_trivial


def test_psi_zero():
    assert psi_zero(quad_char(41), quad_char(-8)).disc == 41
    assert psi_zero(quad_char(-7), quad_char(-59)).disc == 413
    assert psi_zero(TRIVIAL, quad_char(-20)).is_trivial
    with pytest.raises(InvalidInputError):
        psi_zero(quad_char(-7), quad_char(41))


def test_teichmuller_values():
    assert teich_inverse_power(7, -1, 11) == 8
    assert teich_inverse_power(7, 8, 43867) == 18224
    assert teich_char_eval_mod_p(TRIVIAL, 2, 3, 7).value == 2
    assert teich_char_eval_mod_p(quad_char(-4), 1, 3, 7).value == 4
    assert teich_char_eval_mod_p(TRIVIAL, 1, 14, 7).value == 0
    with pytest.raises(InvalidInputError):
        teich_char_eval_mod_p(quad_char(-7), 1, 2, 7)


SMALL_DISCRIMINANTS = [d for d in range(-100, 101) if d not in (0, 1) and is_fundamental(d)]


def test_char_eval_is_multiplicative():
    for d in SMALL_DISCRIMINANTS:
        chi = quad_char(d)
        values = [char_eval(chi, n) for n in range(201)]
        for m in range(1, 201):
            for n in range(m, 201):
                assert char_eval(chi, m * n) == values[m] * values[n], (d, m, n)


def test_char_product_is_commutative_and_associative():
    rng = random.Random(1729)
    for _ in range(2000):
        a, b, c = (quad_char(rng.choice(SMALL_DISCRIMINANTS)) for _ in range(3))
        assert char_product(a, b) == char_product(b, a)
        assert char_product(char_product(a, b), c) == char_product(a, char_product(b, c))


def test_char_product_values_away_from_the_conductors():
    a, b = quad_char(-4), quad_char(5)
    product = char_product(a, b)
    for n in range(1, 200):
        if n % 2 and n % 5:
            assert product(n) == a(n) * b(n)


def test_psi_zero_is_always_even():
    imaginary = [d for d in SMALL_DISCRIMINANTS if d < 0]
    for psi in [TRIVIAL] + [quad_char(d) for d in SMALL_DISCRIMINANTS]:
        for d_k in imaginary:
            assert psi_zero(psi, quad_char(d_k)).parity == 1


def test_teichmuller_power_zero_matches_the_character():
    for d_k in (-7, -8, -20, -59, -123):
        eps = quad_char(d_k)
        for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
            if eps(p) != 1:
                continue
            for n in range(1, 100):
                expected = eps(n) % p if n % p else 0
                assert teich_char_eval_mod_p(eps, 0, n, p).value == expected
