import pytest
import random
from fractions import Fraction
from pathlib import Path

# Add the parent directory to the path so we can import eisrank
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eisrank.core.exceptions import InconsistentCongruenceError, InvalidInputError, NonInvertibleError
from eisrank.services.dirichlet import is_fundamental
from eisrank.utils.numkernel import (
    RationalModel,
    Residue,
    crt,
    euler_phi,
    factorize,
    is_squarefree,
    is_squarefull,
    kronecker,
    modinv,
    modpow,
    pairwise_coprime,
    prime_divisors,
    reduce_mod,
    squarefree_part,
)


@pytest.mark.parametrize("a,n,expected", [
    (-8, 3, 1),
    (5, 2, -1),
    (7, 2, 1),
    (2, 4, 0),
    (-1, -1, -1),
    (1, -1, 1),
    (3, 0, 0),
    (-1, 0, 1),
    (-23, 691, 1),
    (-95, 691, 1),
    (-40, 691, 1),
    (-7, 19, -1),
])
def test_kronecker(a, n, expected):
    assert kronecker(a, n) == expected


def test_kronecker_agrees_with_euler_criterion():
    """For odd primes the symbol is a^((p-1)/2) mod p."""
    for p in (3, 5, 7, 11, 13, 43867):
        for a in (-7, -3, 2, 10, 41):
            euler = pow(a % p, (p - 1) // 2, p)
            assert kronecker(a, p) == (-1 if euler == p - 1 else euler)


def test_crt():
    assert crt([(2, 3), (3, 5), (2, 7)]) == Residue(value=23, modulus=105)
    assert crt([(1, 4), (3, 6)]).modulus == 12


def test_crt_errors():
    with pytest.raises(InconsistentCongruenceError):
        crt([(1, 4), (2, 6)])
    with pytest.raises(InvalidInputError):
        crt([])


def test_modpow_and_modinv():
    assert modpow(7, 8, 43867).value == 18224
    assert modinv(3, 7) == 5
    with pytest.raises(InvalidInputError):
        modpow(2, -1, 7)
    with pytest.raises(NonInvertibleError):
        modinv(2, 4)


def test_reduce_mod():
    assert reduce_mod(Fraction(1, 2), 7) == 4
    assert reduce_mod(-1, 5) == 4
    assert reduce_mod(Fraction(43867, 798), 43867) == 0
    with pytest.raises(NonInvertibleError):
        reduce_mod(Fraction(1, 3), 3)


def test_residue_validation():
    assert str(Residue.of(-1, 5)) == "4 mod 5"
    with pytest.raises(ValueError):
        Residue(value=7, modulus=5)


def test_factorization_helpers():
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(1) == []
    assert prime_divisors(-1239) == [3, 7, 59]
    assert euler_phi(171) == 108
    with pytest.raises(InvalidInputError):
        factorize(0)


def test_squarefree_helpers():
    assert squarefree_part(-12) == -3
    assert squarefree_part(72) == 2
    assert is_squarefree(30)
    assert not is_squarefree(12)
    assert is_squarefull(1)
    assert is_squarefull(1681)
    assert not is_squarefull(12)
    assert pairwise_coprime((19, 1, 1))
    assert not pairwise_coprime((6, 10))
    with pytest.raises(InvalidInputError):
        squarefree_part(0)


def test_rational_model():
    r = RationalModel.of(Fraction(19, 640))
    assert (r.num, r.den) == (19, 640)
    assert r.fraction == Fraction(19, 640)
    assert str(RationalModel.of(3)) == "3"
    assert RationalModel.model_validate_json(r.model_dump_json()) == r
    with pytest.raises(ValueError):
        RationalModel(num=2, den=4)


def test_kronecker_is_periodic_mod_a_fundamental_discriminant():
    for D in range(-200, 201):
        if D in (0, 1) or not is_fundamental(D):
            continue
        for m in range(1, 200):
            assert kronecker(D, m) == kronecker(D, m + abs(D)), (D, m)


def test_kronecker_is_multiplicative_in_the_top_argument():
    for n in (3, 8, 15, 20, 691):
        for a in range(-30, 31):
            for b in range(-30, 31):
                assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


def test_crt_reduces_back_to_every_input():
    rng = random.Random(20240611)
    for _ in range(500):
        x = rng.randrange(10 ** 6)
        moduli = [rng.randrange(2, 60) for _ in range(rng.randrange(1, 5))]
        solution = crt([(x % m, m) for m in moduli])
        for m in moduli:
            assert solution.value % m == x % m
            assert solution.modulus % m == 0


def test_factorize_multiplies_back():
    for n in range(1, 10 ** 5 + 1):
        product = 1
        for p, e in factorize(n):
            product *= p ** e
        assert product == n


def test_modpow_matches_repeated_multiplication():
    for m in range(2, 51):
        for b in range(0, 51):
            naive = 1 % m
            for e in range(0, 51):
                assert modpow(b, e, m).value == naive, (b, e, m)
                naive = naive * b % m
