"""
Exact integer arithmetic shared by every service.

Integers are plain ``int`` and rationals are ``fractions.Fraction``; factoring, totients,
Jacobi symbols and congruence solving come from sympy's ``ntheory`` package. The
Kronecker symbol uses the fully standard extension:

* ``kronecker(a, -1)`` is ``-1`` for negative ``a`` and ``1`` otherwise;
* ``kronecker(a, 2)`` is ``0`` for even ``a``, ``1`` for ``a = +-1 mod 8`` and ``-1`` for
  ``a = +-3 mod 8``;
* odd positive ``n`` is handled by the Jacobi symbol.
"""
import logging
from fractions import Fraction
from math import gcd
from typing import Iterable, List, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import factorint, jacobi_symbol, totient
from sympy.ntheory.modular import solve_congruence

from eisrank.core.exceptions import (
    InconsistentCongruenceError,
    InvalidInputError,
    NonInvertibleError,
)

logger = logging.getLogger(__name__)

Rational = Fraction


class Residue(BaseModel):
    """A class ``value mod modulus`` with ``0 <= value < modulus``."""

    model_config = ConfigDict(frozen=True)

    value: int
    modulus: int

    @model_validator(mode="after")
    def _check_range(self) -> "Residue":
        if self.modulus < 2:
            raise InvalidInputError(f"modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise InvalidInputError(f"value {self.value} is not reduced mod {self.modulus}")
        return self

    @classmethod
    def of(cls, value: Union[int, Fraction], modulus: int) -> "Residue":
        """Reduce an integer or a p-integral rational into a Residue."""
        return cls(value=reduce_mod(value, modulus), modulus=modulus)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.value} mod {self.modulus}"


def _sign_part(a: int, n: int) -> int:
    return -1 if (n < 0 and a < 0) else 1


def _two_part(a: int) -> int:
    if a % 2 == 0:
        return 0
    return 1 if a % 8 in (1, 7) else -1


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a / n) for arbitrary integers a and n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = _sign_part(a, n)
    n = abs(n)
    twos = (n & -n).bit_length() - 1
    if twos:
        t = _two_part(a)
        if t == 0:
            return 0
        if twos % 2 == 1:
            result *= t
        n >>= twos
    if n == 1:
        return result
    return result * int(jacobi_symbol(a % n, n))


def crt(congruences: Sequence[Tuple[int, int]]) -> Residue:
    """Solve a system of congruences ``x = r_i mod m_i``.

    Overlapping moduli are accepted when the residues agree on the overlap.

    Args:
        congruences: Sequence of ``(residue, modulus)`` pairs with positive moduli.

    Returns:
        The unique solution modulo the lcm of the moduli.
    """
    pairs = [(r, m) for r, m in congruences]
    if not pairs:
        raise InvalidInputError("crt needs at least one congruence")
    if any(m < 1 for _, m in pairs):
        raise InvalidInputError(f"crt moduli must be positive: {pairs}")
    solution = solve_congruence(*pairs)
    if solution is None:
        raise InconsistentCongruenceError(f"inconsistent congruences: {pairs}")
    value, modulus = (int(v) for v in solution)
    return Residue(value=value % modulus, modulus=modulus)


def modpow(base: int, exp: int, modulus: int) -> Residue:
    if exp < 0:
        raise InvalidInputError("modpow exponent must be >= 0; use modinv first")
    return Residue(value=pow(base, exp, modulus), modulus=modulus)


def modinv(a: int, modulus: int) -> int:
    try:
        return pow(a, -1, modulus)
    except ValueError as e:
        raise NonInvertibleError(f"{a} is not invertible mod {modulus}") from e


def reduce_mod(x: Union[int, Fraction], modulus: int) -> int:
    """Least nonnegative residue of an integer or of a rational with a unit denominator."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator % modulus
        return x.numerator * modinv(x.denominator, modulus) % modulus
    return x % modulus


def factorize(n: int) -> List[Tuple[int, int]]:
    """Prime factorization of ``n >= 1`` as increasing ``(prime, exponent)`` pairs."""
    if n < 1:
        raise InvalidInputError(f"factorize needs n >= 1, got {n}")
    return sorted((int(p), int(e)) for p, e in factorint(n).items())


def prime_divisors(n: int) -> List[int]:
    return [p for p, _ in factorize(abs(n))] if n not in (0, 1, -1) else []


def euler_phi(n: int) -> int:
    if n < 1:
        raise InvalidInputError(f"euler_phi needs n >= 1, got {n}")
    return int(totient(n))


def squarefree_part(n: int) -> int:
    """Sign-preserving squarefree kernel: ``n = squarefree_part(n) * s**2``."""
    if n == 0:
        raise InvalidInputError("squarefree part of 0 is undefined")
    part = 1
    for p, e in factorize(abs(n)):
        if e % 2:
            part *= p
    return part if n > 0 else -part


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(abs(n))) if n else False


def is_squarefull(n: int) -> bool:
    """True for 1 and for integers all of whose prime exponents are at least 2."""
    return all(e >= 2 for _, e in factorize(abs(n))) if n else False


def pairwise_coprime(values: Iterable[int]) -> bool:
    seen = 1
    for v in values:
        if gcd(seen, v) != 1:
            return False
        seen *= v
    return True


class RationalModel(BaseModel):
    """Wire form of an exact rational: ``{"num": int, "den": int}`` in lowest terms."""

    model_config = ConfigDict(frozen=True)

    num: int
    den: int

    @model_validator(mode="after")
    def _lowest_terms(self) -> "RationalModel":
        if self.den < 1 or gcd(self.num, self.den) != 1:
            raise ValueError(f"{self.num}/{self.den} is not in lowest terms")
        return self

    @classmethod
    def of(cls, x: Union[int, Fraction]) -> "RationalModel":
        x = Fraction(x)
        return cls(num=x.numerator, den=x.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}" if self.den != 1 else str(self.num)
