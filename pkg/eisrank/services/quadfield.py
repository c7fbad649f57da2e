"""
Quadratic fields: splitting of primes, composita, and class numbers of imaginary fields by
counting reduced binary quadratic forms.
"""
import logging
from enum import Enum
from math import isqrt

from pydantic import BaseModel, ConfigDict, field_validator

from eisrank.core.exceptions import ConsistencyError, DegenerateCompositumError, InvalidInputError
from eisrank.services.dirichlet import QuadChar, fundamental_discriminant, is_fundamental
from eisrank.utils.numkernel import kronecker, prime_divisors

logger = logging.getLogger(__name__)

__all__ = [
    "QuadField",
    "Splitting",
    "fundamental_discriminant",
    "quad_field",
    "splitting",
    "class_number_imag",
    "analytic_class_number",
    "units_count",
    "compose",
    "heegner_hypothesis",
]


class Splitting(str, Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


class QuadField(BaseModel):
    model_config = ConfigDict(frozen=True)

    disc: int

    @field_validator("disc")
    @classmethod
    def _fundamental(cls, v: int) -> int:
        if v == 1 or not is_fundamental(v):
            raise ValueError(f"{v} is not the discriminant of a quadratic field")
        return v

    @property
    def is_imaginary(self) -> bool:
        return self.disc < 0

    @property
    def character(self) -> QuadChar:
        return QuadChar(disc=self.disc)

    def __str__(self) -> str:
        return f"Q(disc={self.disc})"


def quad_field(disc: int) -> QuadField:
    if disc == 1 or not is_fundamental(disc):
        raise InvalidInputError(f"{disc} is not the discriminant of a quadratic field")
    return QuadField(disc=disc)


def splitting(field: QuadField, ell: int) -> Splitting:
    symbol = kronecker(field.disc, ell)
    if symbol == 1:
        return Splitting.SPLIT
    if symbol == -1:
        return Splitting.INERT
    return Splitting.RAMIFIED


def units_count(disc: int) -> int:
    """Number of roots of unity w(D) in an imaginary quadratic order of discriminant D."""
    return {-3: 6, -4: 4}.get(disc, 2)


def class_number_imag(disc: int) -> int:
    """Class number of an imaginary quadratic field by counting reduced forms.

    Counts primitive forms (a, b, c) with b^2 - 4ac = D and |b| <= a <= c, taking b >= 0
    whenever |b| = a or a = c. Primitivity is automatic for fundamental D.

    Args:
        disc: Fundamental discriminant D < 0.

    Returns:
        The number of reduced forms, which is h(D); for D = -3, -4 this is 1.
    """
    if disc >= 0 or not is_fundamental(disc):
        raise InvalidInputError(f"class_number_imag needs a negative fundamental discriminant, got {disc}")
    h = 0
    bound = isqrt(-disc // 3)
    b = disc % 2
    while b <= bound:
        q = (b * b - disc) // 4
        a = max(b, 1)
        while a * a <= q:
            if q % a == 0:
                # a == b, a == c (a^2 == q) or b == 0 give the boundary cases counted once
                if a == b or a * a == q or b == 0:
                    h += 1
                else:
                    h += 2
            a += 1
        b += 2
    return h


def analytic_class_number(disc: int) -> int:
    """h(D) from the character sum -w/(2|D|) * sum_{a<=|D|} (D/a) a."""
    if disc >= 0 or not is_fundamental(disc):
        raise InvalidInputError(f"analytic_class_number needs a negative fundamental discriminant, got {disc}")
    n = -disc
    total = sum(kronecker(disc, a) * a for a in range(1, n + 1))
    value = -units_count(disc) * total
    if value % (2 * n):
        raise ConsistencyError(f"character sum for {disc} is not divisible by 2|D|")
    return value // (2 * n)


def compose(k1: QuadField, k2: QuadField) -> QuadField:
    """The third quadratic subfield Q(sqrt(D1 D2)) of the biquadratic compositum."""
    if k1.disc == k2.disc:
        raise DegenerateCompositumError(f"compositum of {k1} with itself is not quadratic")
    return QuadField(disc=fundamental_discriminant(k1.disc * k2.disc))


def heegner_hypothesis(field: QuadField, level: int) -> bool:
    return all(splitting(field, ell) is Splitting.SPLIT for ell in prime_divisors(level))
