"""
Elliptic curves over Q given by an integral Weierstrass model and a known conductor.

The conductor is data, not computed: the reduction type at l | N is read off from N
(additive iff l^2 | N) and, for l || N, from the number of smooth points of the reduced
curve. Traces a_l at good primes come from counting points over F_l.
"""
import logging
from enum import Enum
from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import Poly, isprime, primerange, symbols

from eisrank.core.exceptions import (
    ConsistencyError,
    InvalidInputError,
    ModelNotMinimalError,
    NeedsConductorError,
)
from eisrank.services.dirichlet import TRIVIAL, QuadChar, char_eval, is_fundamental
from eisrank.services.qseries import QExpansion, coefficient_source, eisenstein_constant_term
from eisrank.utils.numkernel import (
    factorize,
    is_squarefree,
    is_squarefull,
    pairwise_coprime,
    reduce_mod,
)

logger = logging.getLogger(__name__)

MAX_COUNT_PRIME = 10 ** 6


class ReductionType(str, Enum):
    SPLIT = "split-mult"
    NONSPLIT = "nonsplit-mult"
    ADDITIVE = "additive"


class CurveQ(BaseModel):
    """Integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with conductor N."""

    model_config = ConfigDict(frozen=True)

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    N: int = Field(description="Conductor, supplied with the model.")
    label: str = ""

    @model_validator(mode="after")
    def _nonsingular(self) -> "CurveQ":
        if self.N < 1:
            raise ValueError(f"conductor must be positive, got {self.N}")
        if self.discriminant == 0:
            raise ValueError(f"curve {self.label or self.ainvs} is singular")
        return self

    @property
    def ainvs(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def is_semistable(self) -> bool:
        return is_squarefree(self.N)

    def __str__(self) -> str:
        return self.label or f"[{','.join(map(str, self.ainvs))}]"


class DescentFailure(BaseModel):
    ell: int = Field(description="Prime at which the congruence fails.")
    condition: int = Field(description="Which of the descent conditions (1)-(4) failed.")
    a_ell: int = Field(description="Trace a_ell reduced mod p.")
    expected: int = Field(description="Expected Eisenstein value mod p.")


class DescentReport(BaseModel):
    psi1: int = Field(description="Discriminant of psi1 (1 = trivial).")
    psi2: int = Field(description="Discriminant of psi2 (1 = trivial).")
    n_plus: int
    n_minus: int
    n_zero: int
    p: int
    weight: int
    source: str = Field(description="Curve label or series description.")
    checked_primes: List[int] = Field(default_factory=list)
    failures: List[DescentFailure] = Field(default_factory=list)
    full: bool = Field(description="Constant-term condition (5) holds, i.e. the descent is full.")
    certification: str = Field(description="'proven' or 'checked-to-bound'.")
    verdict: bool = Field(description="True iff no congruence failed.")


# --- point counting ---------------------------------------------------------------------


def _count_points_naive(E: CurveQ, ell: int) -> int:
    a1, a2, a3, a4, a6 = (a % ell for a in E.ainvs)
    total = 1
    for x in range(ell):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % ell
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - rhs) % ell == 0:
                total += 1
    return total


def _count_points_odd(E: CurveQ, ell: int) -> int:
    squares = [-1] * ell
    squares[0] = 0
    for y in range(1, ell):
        squares[y * y % ell] = 1
    b2, b4, b6 = E.b2 % ell, (2 * E.b4) % ell, E.b6 % ell
    total = ell + 1
    for x in range(ell):
        total += squares[(((4 * x + b2) * x + b4) * x + b6) % ell]
    return total


def count_points(E: CurveQ, ell: int) -> int:
    """#E(F_ell) of the reduced model, point at infinity included (singular point too)."""
    if ell <= 3:
        return _count_points_naive(E, ell)
    return _count_points_odd(E, ell)


def _check_prime(ell: int) -> None:
    if not isprime(ell):
        raise InvalidInputError(f"{ell} is not prime")


def ap_good(E: CurveQ, ell: int) -> int:
    """a_ell = ell + 1 - #E(F_ell) at a prime of good reduction."""
    _check_prime(ell)
    if E.N % ell == 0:
        raise InvalidInputError(f"{ell} divides the conductor {E.N}; use reduction_type")
    if ell > MAX_COUNT_PRIME:
        raise InvalidInputError(f"{ell} is beyond the point-counting limit {MAX_COUNT_PRIME}")
    a = ell + 1 - count_points(E, ell)
    if a * a > 4 * ell:
        raise ConsistencyError(f"Hasse bound violated for {E} at {ell}: a = {a}")
    return a


def reduction_type(E: CurveQ, ell: int) -> ReductionType:
    _check_prime(ell)
    if E.N % ell:
        raise InvalidInputError(f"{ell} does not divide the conductor {E.N}")
    if E.N % (ell * ell) == 0:
        return ReductionType.ADDITIVE
    smooth = count_points(E, ell) - 1
    if smooth == ell - 1:
        return ReductionType.SPLIT
    if smooth == ell + 1:
        return ReductionType.NONSPLIT
    raise ModelNotMinimalError(
        f"{E} at {ell}: {smooth} smooth points, expected {ell - 1} or {ell + 1}"
    )


def ap(E: CurveQ, ell: int) -> int:
    """a_ell at any prime: the point count at good primes, +1/-1/0 at bad ones."""
    if E.N % ell:
        return ap_good(E, ell)
    return {ReductionType.SPLIT: 1, ReductionType.NONSPLIT: -1, ReductionType.ADDITIVE: 0}[
        reduction_type(E, ell)
    ]


def ap_table(E: CurveQ, bound: int) -> Dict[int, int]:
    """a_ell for all primes ell <= bound, in increasing order of ell."""
    return {ell: ap(E, ell) for ell in primerange(2, bound + 1)}


def local_root_number(E: CurveQ, ell: int) -> int:
    """w_ell = -a_ell at a prime of multiplicative reduction."""
    if E.N % ell or E.N % (ell * ell) == 0:
        raise InvalidInputError(f"{ell} is not a multiplicative prime of {E}")
    return -ap(E, ell)


def conductor_decomposition(E: CurveQ) -> Tuple[int, int, int]:
    """(N_split, N_nonsplit, N_add) with N = N_split * N_nonsplit * N_add."""
    n_split = n_nonsplit = n_add = 1
    for ell, e in factorize(E.N):
        kind = reduction_type(E, ell)
        if kind is ReductionType.SPLIT:
            n_split *= ell
        elif kind is ReductionType.NONSPLIT:
            n_nonsplit *= ell
        else:
            n_add *= ell ** e
    return n_split, n_nonsplit, n_add


# --- twists and torsion -----------------------------------------------------------------


def quadratic_twist(E: CurveQ, D: int, conductor: Optional[int] = None) -> CurveQ:
    """Twist of E by the quadratic character of fundamental discriminant D.

    The model has b2' = D b2, b4' = D^2 b4, b6' = D^3 b6. When gcd(D, N) = 1 the conductor
    is N * D^2; otherwise it must be supplied.
    """
    if not is_fundamental(D):
        raise InvalidInputError(f"{D} is not a fundamental discriminant")
    if D == 1:
        return E
    if conductor is None:
        if gcd(D, E.N) != 1:
            raise NeedsConductorError(
                f"twist of {E} by {D}: gcd(D, N) > 1, pass the conductor explicitly"
            )
        conductor = E.N * D * D
    a1 = E.a1 if D % 2 else 0
    a3 = E.a3 if D % 2 else 0
    a2 = (D * E.b2 - a1 * a1) // 4
    a4 = (D * D * E.b4 - a1 * a3) // 2
    a6 = (D ** 3 * E.b6 - a3 * a3) // 4
    return CurveQ(a1=a1, a2=a2, a3=a3, a4=a4, a6=a6, N=conductor, label=f"{E}x{D}")


def _is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def rational_3_torsion_points(E: CurveQ) -> List[Tuple[Fraction, Fraction]]:
    """Affine rational points of order 3 (one of each pair +-P)."""
    x = symbols("x")
    psi3 = Poly(3 * x ** 4 + E.b2 * x ** 3 + 3 * E.b4 * x ** 2 + 3 * E.b6 * x + E.b8, x)
    points = []
    for factor, _ in psi3.factor_list()[1]:
        if factor.degree() != 1:
            continue
        c1, c0 = (int(c) for c in factor.all_coeffs())
        x0 = Fraction(-c0, c1)
        disc = 4 * x0 ** 3 + E.b2 * x0 ** 2 + 2 * E.b4 * x0 + E.b6
        if disc and _is_rational_square(disc):
            root = Fraction(isqrt(disc.numerator), isqrt(disc.denominator))
            y0 = (-E.a1 * x0 - E.a3 + root) / 2
            points.append((x0, y0))
    return points


def has_rational_3_torsion(E: CurveQ) -> bool:
    return bool(rational_3_torsion_points(E))


# --- Eisenstein descent -----------------------------------------------------------------

CoefficientSource = Union[CurveQ, QExpansion]


def validate_decomposition(n_plus: int, n_minus: int, n_zero: int) -> None:
    if min(n_plus, n_minus, n_zero) < 1:
        raise InvalidInputError("level factors must be positive")
    if not is_squarefree(n_plus * n_minus):
        raise InvalidInputError(f"N+ N- = {n_plus * n_minus} must be squarefree")
    if not is_squarefull(n_zero):
        raise InvalidInputError(f"N0 = {n_zero} must be squarefull")
    if not pairwise_coprime((n_plus, n_minus, n_zero)):
        raise InvalidInputError(f"({n_plus}, {n_minus}, {n_zero}) are not pairwise coprime")


def _p_divides(x: Fraction, p: int) -> bool:
    x = Fraction(x)
    return x == 0 or (x.numerator % p == 0 and x.denominator % p != 0)


def descent_type(E: CurveQ, p: int, psi: QuadChar = TRIVIAL) -> Tuple[int, int, int]:
    """The (N+, N-, N0) Eisenstein type of E at p for the character pair (psi, psi).

    A multiplicative prime goes to N+ when a_ell = psi(ell) mod p and to N- when
    a_ell = psi(ell) ell mod p; N0 is the additive part of N.
    """
    n_plus = n_minus = n_zero = 1
    for ell, e in factorize(E.N):
        if e >= 2:
            n_zero *= ell ** e
            continue
        a = ap(E, ell)
        if (a - char_eval(psi, ell)) % p == 0:
            n_plus *= ell
        elif (a - char_eval(psi, ell) * ell) % p == 0:
            n_minus *= ell
        else:
            raise InvalidInputError(
                f"{E} at {ell}: a_ell = {a} matches neither Eisenstein value mod {p}"
            )
    return n_plus, n_minus, n_zero


def verify_descent(
    source: CoefficientSource,
    p: int,
    psi1: QuadChar,
    psi2: QuadChar,
    n_plus: int,
    n_minus: int,
    n_zero: int,
    prime_bound: int = 200,
) -> DescentReport:
    """Check the Eisenstein descent congruences of a curve or a q-expansion mod p.

    Conditions, all mod p, for primes ell <= prime_bound:

    1. ell prime to N+ N- N0: a_ell = psi1(ell) + psi2(ell) ell^(k-1)
    2. ell | N+: a_ell = psi1(ell)
    3. ell | N-: a_ell = psi2(ell) ell^(k-1)
    4. ell | N0: a_ell = 0

    Condition (5), the vanishing of the Eisenstein constant term mod p, decides whether the
    descent is full or only partial.

    Args:
        source: A ``CurveQ`` (weight 2) or a ``QExpansion`` with weight metadata.
        p: Prime modulus.
        psi1: First character of the type.
        psi2: Second character of the type.
        n_plus: N+ part of the level.
        n_minus: N- part of the level.
        n_zero: N0 part of the level.
        prime_bound: Largest prime checked.

    Returns:
        A ``DescentReport``; ``verdict`` is True iff no condition (1)-(4) failed.
    """
    _check_prime(p)
    validate_decomposition(n_plus, n_minus, n_zero)
    level = n_plus * n_minus * n_zero

    if isinstance(source, CurveQ):
        k = 2
        if level != source.N:
            raise InvalidInputError(f"{n_plus}*{n_minus}*{n_zero} is not the conductor {source.N}")
        coefficient = lambda ell: ap(source, ell)  # noqa: E731
        name = str(source)
    else:
        source = coefficient_source(source)
        if source.ring.kind == "Zmod" and source.ring.modulus % p:
            raise InvalidInputError(f"coefficients over {source.ring} carry no information mod {p}")
        k = source.weight
        if prime_bound > source.prec:
            raise InvalidInputError(f"prime bound {prime_bound} exceeds the precision {source.prec}")
        coefficient = lambda ell: source.coeffs[ell]  # noqa: E731
        name = f"q-expansion(weight={k}, level={source.level})"

    failures: List[DescentFailure] = []
    checked: List[int] = []
    for ell in primerange(2, prime_bound + 1):
        ell = int(ell)
        a = reduce_mod(coefficient(ell), p)
        if n_plus % ell == 0:
            condition, expected = 2, char_eval(psi1, ell)
        elif n_minus % ell == 0:
            condition, expected = 3, char_eval(psi2, ell) * pow(ell, k - 1, p)
        elif n_zero % ell == 0:
            condition, expected = 4, 0
        else:
            condition, expected = 1, char_eval(psi1, ell) + char_eval(psi2, ell) * pow(ell, k - 1, p)
        expected %= p
        checked.append(ell)
        if a != expected:
            failures.append(DescentFailure(ell=ell, condition=condition, a_ell=a, expected=expected))

    constant = eisenstein_constant_term(psi1, psi2, k, n_plus, n_minus, n_zero)
    full = _p_divides(constant, p)
    proven = (
        not failures
        and isinstance(source, CurveQ)
        and p == 3
        and psi1.is_trivial
        and psi2.is_trivial
        and has_rational_3_torsion(source)
    )
    report = DescentReport(
        psi1=psi1.disc,
        psi2=psi2.disc,
        n_plus=n_plus,
        n_minus=n_minus,
        n_zero=n_zero,
        p=p,
        weight=k,
        source=name,
        checked_primes=checked,
        failures=failures,
        full=full,
        certification="proven" if proven else "checked-to-bound",
        verdict=not failures,
    )
    if failures:
        logger.info(f"Descent check for {name} mod {p} failed at {[f.ell for f in failures]}")
    return report
