import pytest
from fractions import Fraction
from math import prod
from pathlib import Path

from sympy import primerange

# Add the parent directory to the path so we can import eisrank
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eisrank.core.exceptions import ExceptionalCharacterError, InvalidInputError
from eisrank.services.bernoulli import (
    b1_teichmuller_mod_p,
    bernoulli,
    bernoulli_poly,
    gen_bernoulli,
    kubota_leopoldt_special_mod_p,
    kummer_b1_mod_p,
)
from eisrank.services.dirichlet import TRIVIAL, is_fundamental, quad_char
from eisrank.services.quadfield import class_number_imag, units_count
from eisrank.utils.numkernel import reduce_mod


def test_classical_values():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(3) == 0
    assert bernoulli(12) == Fraction(-691, 2730)
    assert bernoulli(18) == Fraction(43867, 798)
    with pytest.raises(InvalidInputError):
        bernoulli(-1)


def test_table_grows_past_cache():
    # B_200 has denominator 2*3*5*11*101*... by von Staudt-Clausen
    assert bernoulli(200).denominator % 101 == 0


def test_bernoulli_poly():
    assert bernoulli_poly(2, Fraction(1, 2)) == Fraction(-1, 12)
    assert bernoulli_poly(3, Fraction(0)) == 0
    assert bernoulli_poly(4, Fraction(1)) == bernoulli(4)


def test_gen_bernoulli_trivial_character():
    assert gen_bernoulli(TRIVIAL, 1) == Fraction(1, 2)
    assert gen_bernoulli(TRIVIAL, 18) == bernoulli(18)
    with pytest.raises(InvalidInputError):
        gen_bernoulli(TRIVIAL, 0)


@pytest.mark.parametrize("disc", [-7, -8, -20, -23, -47, -123, -328])
def test_b1_is_a_class_number(disc):
    """B_{1,eps_D} = -2 h(D) / w(D) for imaginary fields."""
    expected = Fraction(-2 * class_number_imag(disc), units_count(disc))
    assert gen_bernoulli(quad_char(disc), 1) == expected


def test_b1_class_number_identity_over_a_range():
    for disc in range(-499, -4):
        if is_fundamental(disc):
            expected = Fraction(-2 * class_number_imag(disc), units_count(disc))
            assert gen_bernoulli(quad_char(disc), 1) == expected, disc


@pytest.mark.parametrize("n", range(2, 61, 2))
def test_von_staudt_clausen_denominators(n):
    expected = prod(p for p in primerange(2, n + 2) if n % (p - 1) == 0)
    assert bernoulli(n).denominator == expected


def test_gen_bernoulli_parity_vanishing():
    assert gen_bernoulli(quad_char(41), 1) == 0
    assert gen_bernoulli(quad_char(-4), 2) == 0
    assert gen_bernoulli(quad_char(5), 2) == Fraction(4, 5)


def test_gen_bernoulli_minus_twenty():
    value = gen_bernoulli(quad_char(-20), 9)
    assert value == -5444415378
    assert reduce_mod(value, 43867) == 5726


@pytest.mark.parametrize("j,p,expected", [(3, 7, 6), (3, 11, 1), (5, 11, 10)])
def test_kummer_values(j, p, expected):
    assert kummer_b1_mod_p(j, p).value == expected


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_teichmuller_sum_matches_kummer(p):
    for j in range(1, p - 2):
        assert b1_teichmuller_mod_p(TRIVIAL, j, p) == kummer_b1_mod_p(j, p)


def test_teichmuller_exceptional_characters():
    with pytest.raises(ExceptionalCharacterError):
        b1_teichmuller_mod_p(TRIVIAL, 0, 7)
    with pytest.raises(ExceptionalCharacterError):
        b1_teichmuller_mod_p(TRIVIAL, 5, 7)
    with pytest.raises(InvalidInputError):
        b1_teichmuller_mod_p(quad_char(-7), 1, 7)
    with pytest.raises(InvalidInputError):
        kummer_b1_mod_p(0, 7)


def test_teichmuller_at_three_is_a_class_number():
    """omega = eps_{-3} at p = 3, so B_{1, eps_41 omega^-1} = B_{1, eps_-123} mod 3."""
    assert b1_teichmuller_mod_p(quad_char(41), -1, 3).value == reduce_mod(gen_bernoulli(quad_char(-123), 1), 3)


def test_teichmuller_large_prime():
    assert b1_teichmuller_mod_p(TRIVIAL, -9, 43867).value == 11875


def test_teichmuller_even_character_vanishes():
    """eps_-20 and omega^-9 are both odd, so their product is even and B_1 = 0."""
    assert b1_teichmuller_mod_p(quad_char(-20), -9, 43867).value == 0
    assert b1_teichmuller_mod_p(quad_char(-4), 1, 7).value == 0


def test_kubota_leopoldt_trivial_log_branch():
    with pytest.raises(ExceptionalCharacterError):
        kubota_leopoldt_special_mod_p(TRIVIAL, 1, 7)


def test_kubota_leopoldt_shifted_value():
    expected = (-b1_teichmuller_mod_p(quad_char(-4), 2, 7).value) % 7
    assert kubota_leopoldt_special_mod_p(quad_char(-4), 3, 7).value == expected
