"""
Quadratic Dirichlet characters.

A character is stored as the fundamental discriminant of the quadratic field it cuts out,
with ``disc = 1`` for the trivial character. Values are Kronecker symbols. Twists by
powers of the Teichmueller character are only ever evaluated mod p, through
``omega(n) = n mod p``.
"""
import logging
from math import gcd

from pydantic import BaseModel, ConfigDict, field_validator

from eisrank.core.exceptions import InvalidInputError
from eisrank.utils.numkernel import Residue, kronecker, modinv, squarefree_part

logger = logging.getLogger(__name__)


def is_fundamental(d: int) -> bool:
    """True for 1 and for fundamental discriminants of quadratic fields."""
    if d == 1:
        return True
    if d == 0:
        return False
    if d % 4 == 1:
        return squarefree_part(d) == d
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree_part(m) == m
    return False


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt(d)), or 1 when d is a square."""
    if d == 0:
        raise InvalidInputError("fundamental discriminant of 0 is undefined")
    s = squarefree_part(d)
    if s == 1:
        return 1
    return s if s % 4 == 1 else 4 * s


class QuadChar(BaseModel):
    """Quadratic or trivial Dirichlet character, keyed by its fundamental discriminant."""

    model_config = ConfigDict(frozen=True)

    disc: int

    @field_validator("disc")
    @classmethod
    def _fundamental(cls, v: int) -> int:
        if not is_fundamental(v):
            raise ValueError(f"{v} is not a fundamental discriminant")
        return v

    @property
    def conductor(self) -> int:
        return abs(self.disc)

    @property
    def is_trivial(self) -> bool:
        return self.disc == 1

    @property
    def parity(self) -> int:
        """chi(-1): +1 for even characters, -1 for odd ones."""
        return 1 if self.disc > 0 else -1

    def __call__(self, n: int) -> int:
        return char_eval(self, n)

    def __str__(self) -> str:
        return "1" if self.is_trivial else f"eps({self.disc})"


TRIVIAL = QuadChar(disc=1)


def quad_char(disc: int) -> QuadChar:
    """Build a character, raising ``InvalidInputError`` for non-fundamental input."""
    if not is_fundamental(disc):
        raise InvalidInputError(f"{disc} is not a fundamental discriminant")
    return QuadChar(disc=disc)


def char_eval(chi: QuadChar, n: int) -> int:
    return kronecker(chi.disc, n)


def char_product(chi1: QuadChar, chi2: QuadChar) -> QuadChar:
    return QuadChar(disc=fundamental_discriminant(chi1.disc * chi2.disc))


def psi_zero(psi: QuadChar, eps_k: QuadChar) -> QuadChar:
    """The even character attached to psi: psi itself if even, psi * eps_K if odd."""
    if eps_k.disc >= 0:
        raise InvalidInputError(f"eps_K must be odd (imaginary K), got disc {eps_k.disc}")
    if psi.parity == 1:
        return psi
    return char_product(psi, eps_k)


def teich_char_eval_mod_p(psi: QuadChar, j: int, n: int, p: int) -> Residue:
    """Value of psi * omega^j at n, reduced mod p.

    Args:
        psi: Quadratic character with p not dividing its conductor.
        j: Teichmueller exponent, read mod p - 1 (negative values allowed).
        n: Argument.
        p: Odd prime.

    Returns:
        ``psi(n) * n**j mod p``, or 0 when n shares a factor with ``p * conductor``.
    """
    if p == 2 or psi.conductor % p == 0:
        raise InvalidInputError(f"need an odd prime p not dividing {psi.disc}, got {p}")
    if gcd(n, p * psi.conductor) != 1:
        return Residue(value=0, modulus=p)
    jj = j % (p - 1)
    value = char_eval(psi, n) * pow(n % p, jj, p)
    return Residue(value=value % p, modulus=p)


def teich_inverse_power(n: int, j: int, p: int) -> int:
    """n**j mod p for any integer j, inverting first when j is negative."""
    base = n % p
    if j < 0:
        base = modinv(base, p)
        j = -j
    return pow(base, j, p)
