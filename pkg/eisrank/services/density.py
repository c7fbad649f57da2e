"""
Positive-proportion machinery for quadratic twists of curves with E[3] of type (1, omega).

Three layers:

* residue families (m, M) built by the Chinese remainder theorem from the local
  conditions in the twist theorems, each one checked against the counting-theorem
  hypotheses for fields of discriminant m mod M;
* the exact lower-bound formulas, returned with the list of factors that produce them;
* a concrete scan over fundamental discriminants that applies the splitting and
  class-number conditions one field at a time.

All densities are exact ``Fraction`` values. ``q`` is 4 at 2 and ``l`` at an odd prime.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from itertools import product
from math import gcd, lcm
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, model_validator

from eisrank.core.config import settings
from eisrank.core.exceptions import (
    ConsistencyError,
    HypothesisViolationError,
    InvalidInputError,
    ReducibilityNotCertifiedError,
)
from eisrank.services.dirichlet import TRIVIAL, fundamental_discriminant, is_fundamental, quad_char
from eisrank.services.ellcurve import (
    CurveQ,
    conductor_decomposition,
    has_rational_3_torsion,
    validate_decomposition,
    verify_descent,
)
from eisrank.services.heegner import VERDICT_RANK_ONE, CriterionCondition, heegner_criterion
from eisrank.services.quadfield import class_number_imag, quad_field
from eisrank.utils.numkernel import (
    RationalModel,
    crt,
    euler_phi,
    factorize,
    kronecker,
    prime_divisors,
)

logger = logging.getLogger(__name__)

LocalRule = Callable[[int], bool]


class Side(str, Enum):
    REAL = "real"
    IMAGINARY = "imaginary"


class FormulaTerm(BaseModel):
    label: str = Field(description="Which factor of the formula this is.")
    value: RationalModel


class DensityBound(BaseModel):
    value: RationalModel = Field(description="Lower bound on the proportion.")
    m_prime: int = Field(description="The modulus M' the formula is built on.")
    formula_terms: List[FormulaTerm] = Field(default_factory=list, description="Factors whose product is the value.")

    @model_validator(mode="after")
    def _audit(self) -> "DensityBound":
        total = Fraction(1)
        for term in self.formula_terms:
            total *= term.value.fraction
        if total != self.value.fraction:
            raise ValueError(f"audit trail multiplies to {total}, not {self.value}")
        if not 0 < total <= 1:
            raise ValueError(f"density {total} is outside (0, 1]")
        return self

    @property
    def fraction(self) -> Fraction:
        return self.value.fraction

    @classmethod
    def from_terms(cls, m_prime: int, terms: Sequence[Tuple[str, Fraction]]) -> "DensityBound":
        value = Fraction(1)
        for _, factor in terms:
            value *= factor
        return cls(
            value=RationalModel.of(value),
            m_prime=m_prime,
            formula_terms=[FormulaTerm(label=label, value=RationalModel.of(f)) for label, f in terms],
        )


class ResidueFamily(BaseModel):
    M: int
    classes: List[int] = Field(description="Residues m mod M, increasing.")
    side: Side
    provenance: str = Field(description="Which condition list generated the classes.")

    @model_validator(mode="after")
    def _hypotheses(self) -> "ResidueFamily":
        for m in self.classes:
            check_hn_hypotheses(m, self.M)
        return self

    @property
    def count(self) -> int:
        return len(self.classes)


class TwistScanReport(BaseModel):
    curve: str
    branch: Side
    X: int
    bound: RationalModel = Field(description="Theoretical lower bound for the branch.")
    verified: List[int] = Field(default_factory=list, description="Discriminants passing every condition, by |D|.")
    total: int = Field(0, description="Fundamental discriminants scanned.")
    empirical: RationalModel = Field(description="len(verified) / total, or 0 when nothing was scanned.")


# --- moduli and local factors -----------------------------------------------------------


def m_prime(N: int, extra: int = 1) -> int:
    """M' for L = lcm(N, extra): L if odd, lcm(L, 8) if 2 || L, lcm(L, 16) if 4 | L."""
    if N < 1 or extra < 1:
        raise InvalidInputError(f"m_prime needs positive arguments, got ({N}, {extra})")
    level = lcm(N, extra)
    if level % 2:
        return level
    if level % 4:
        return lcm(level, 8)
    return lcm(level, 16)


def _q(ell: int) -> int:
    return 4 if ell == 2 else ell


def local_density_factor(M: int) -> Fraction:
    """prod_{l | M} q / (l + 1)."""
    value = Fraction(1)
    for ell in prime_divisors(M):
        value *= Fraction(_q(ell), ell + 1)
    return value


def _local_terms(M: int) -> List[Tuple[str, Fraction]]:
    return [(f"q/(l+1) at {ell}", Fraction(_q(ell), ell + 1)) for ell in prime_divisors(M)]


def _check_level(n_split: int, n_nonsplit: int, n_add: int) -> int:
    validate_decomposition(n_split, n_nonsplit, n_add)
    level = n_split * n_nonsplit * n_add
    if level % 3 == 0:
        raise InvalidInputError(f"3 must be a prime of good reduction, N = {level}")
    return level


def _check_auxiliary_field(level: int, n_split: int, n_nonsplit: int, d_l: int) -> None:
    if d_l == 1 or not is_fundamental(d_l):
        raise InvalidInputError(f"{d_l} is not the discriminant of a quadratic field")
    if d_l % 3 == 0:
        raise InvalidInputError(f"3 ramifies in L for D_L = {d_l}")
    shared = gcd(d_l, n_split * n_nonsplit)
    if shared != 1:
        raise InvalidInputError(f"D_L = {d_l} is ramified at multiplicative primes dividing {shared}")
    if level % 4 == 0 and d_l % 16 not in (8, 12):
        raise InvalidInputError(f"4 | N = {level} needs D_L = 8 or 12 mod 16, got {d_l}")


# --- the counting theorem ---------------------------------------------------------------


def check_hn_hypotheses(m: int, M: int) -> None:
    """Reject (m, M) unless it meets the hypotheses of the field-counting theorem.

    Every odd prime l dividing (m, M) must have l^2 | M and l^2 not dividing m. For even
    M, either 4 | M with m = 1 mod 4, or 16 | M with m = 8 or 12 mod 16.

    Raises:
        HypothesisViolationError: naming the failing clause.
    """
    if M < 1:
        raise InvalidInputError(f"M must be positive, got {M}")
    for ell in prime_divisors(gcd(m, M)):
        if ell == 2:
            continue
        if M % (ell * ell):
            raise HypothesisViolationError(
                "odd-prime-modulus", f"{ell} divides (m, M) = ({m}, {M}) but {ell}^2 does not divide M"
            )
        if m % (ell * ell) == 0:
            raise HypothesisViolationError(
                "odd-prime-square", f"{ell}^2 divides m = {m}"
            )
    if M % 2 == 0:
        if not ((M % 4 == 0 and m % 4 == 1) or (M % 16 == 0 and m % 16 in (8, 12))):
            raise HypothesisViolationError(
                "two-adic", f"M = {M} is even but neither 4 | M, m = 1 mod 4 nor 16 | M, m = 8, 12 mod 16 holds"
            )


def _sign(sign: str) -> str:
    if sign not in ("+", "-"):
        raise InvalidInputError(f"sign must be '+' or '-', got {sign!r}")
    return sign


def hn_density_constant(m: int, M: int, sign: str = "+") -> Fraction:
    """Coefficient c with #{fields of discriminant m mod M, |D| <= x} ~ c x / pi^2.

    The constant is the same for real ('+') and imaginary ('-') fields.
    """
    _sign(sign)
    check_hn_hypotheses(m, M)
    return Fraction(3, euler_phi(M)) * local_density_factor(M)


def taya_lower_bound(m: int, M: int, sign: str = "+") -> Fraction:
    """Lower density of fields in the class with 3 not dividing the class number.

    5 / (6 Phi(M)) prod q/(l+1) for real fields and 1 / (2 Phi(M)) prod q/(l+1) for
    imaginary ones.
    """
    check_hn_hypotheses(m, M)
    lead = Fraction(5, 6) if _sign(sign) == "+" else Fraction(1, 2)
    return lead / euler_phi(M) * local_density_factor(M)


# --- bounds ------------------------------------------------------------------------------


def real_twist_bound(n_split: int, n_nonsplit: int, n_add: int, side: Union[Side, str]) -> DensityBound:
    """Proportion of fundamental discriminants on one side giving an auxiliary field L.

    Args:
        n_split: Product of split multiplicative primes.
        n_nonsplit: Product of nonsplit multiplicative primes.
        n_add: Additive part of the conductor.
        side: ``real`` or ``imaginary`` fields L.

    Returns:
        A ``DensityBound``; the prefactor is 1/(12 Phi(M')) on the real side and
        1/(4 Phi(M')) on the imaginary side.
    """
    side = Side(side)
    level = _check_level(n_split, n_nonsplit, n_add)
    mp = m_prime(level)
    phi = euler_phi(mp)
    if side is Side.REAL:
        terms = [("1/(12 Phi(M'))", Fraction(1, 12 * phi))]
    else:
        terms = [("1/(4 Phi(M'))", Fraction(1, 4 * phi))]
    for ell in prime_divisors(n_split * n_nonsplit):
        if ell != 2:
            terms.append((f"(l-1)/2 at multiplicative {ell}", Fraction(ell - 1, 2)))
    for ell in prime_divisors(n_add):
        if ell == 2:
            continue
        if ell % 3 == 1:
            terms.append((f"(l+2)(l-1)/2 at additive {ell}", Fraction((ell + 2) * (ell - 1), 2)))
        else:
            terms.append((f"l-1 at additive {ell}", Fraction(ell - 1)))
    if n_add % 4 == 0:
        terms.append(("2 at additive 2", Fraction(2)))
    terms.extend(_local_terms(3 * mp))
    bound = DensityBound.from_terms(mp, terms)
    logger.debug(f"real_twist_bound({n_split}, {n_nonsplit}, {n_add}, {side.value}) = {bound.value}")
    return bound


def twist_theorem_bound(n_split: int, n_nonsplit: int, n_add: int, d_l: int) -> DensityBound:
    """Proportion of twists E^D (D on the side of L) covered by one auxiliary field L."""
    level = _check_level(n_split, n_nonsplit, n_add)
    _check_auxiliary_field(level, n_split, n_nonsplit, d_l)
    mp = m_prime(level, d_l * d_l)
    phi = euler_phi(mp)
    if d_l > 0:
        terms = [("1/(4 Phi(M'))", Fraction(1, 4 * phi))]
    else:
        terms = [("1/(12 Phi(M'))", Fraction(1, 12 * phi))]
    for ell in prime_divisors(n_split * n_nonsplit):
        if ell != 2:
            terms.append((f"(l-1)/2 at multiplicative {ell}", Fraction(ell - 1, 2)))
    for ell in prime_divisors(n_add):
        if ell != 2 and d_l % ell:
            terms.append((f"l(l-1)/2 at additive {ell}", Fraction(ell * (ell - 1), 2)))
    for ell in prime_divisors(d_l):
        if ell != 2:
            terms.append((f"(l-1)/2 at {ell} | D_L", Fraction(ell - 1, 2)))
    terms.extend(_local_terms(3 * mp))
    return DensityBound.from_terms(mp, terms)


def example_totals() -> Tuple[Fraction, Fraction]:
    """Summed bounds for 19a1: real side with L = Q(sqrt -7), imaginary side with Q(sqrt 41)."""
    real = real_twist_bound(19, 1, 1, Side.REAL).fraction + twist_theorem_bound(19, 1, 1, -7).fraction
    imaginary = real_twist_bound(19, 1, 1, Side.IMAGINARY).fraction + twist_theorem_bound(19, 1, 1, 41).fraction
    return real, imaginary


# --- residue families -------------------------------------------------------------------


def _congruent(modulus: int, residues: Sequence[int]) -> LocalRule:
    allowed = frozenset(residues)
    return lambda r: r % modulus in allowed


def _symbol(ell: int, multiplier: int, target: int) -> LocalRule:
    # r in multiplier * (residues) iff (multiplier r / l) = 1, as multiplier^2 is a square
    return lambda r: kronecker(multiplier * r, ell) == target


def _exactly_divisible(ell: int) -> LocalRule:
    return lambda r: r % ell == 0 and r % (ell * ell) != 0


def _either(first: LocalRule, second: LocalRule) -> LocalRule:
    return lambda r: first(r) or second(r)


def _ramified(ell: int, d_l: int, multiplier: int) -> LocalRule:
    cofactor = d_l // ell

    def rule(r: int) -> bool:
        return _exactly_divisible(ell)(r) and kronecker(multiplier * (r // ell) * cofactor, ell) == 1

    return rule


def _assemble(M: int, rules: Dict[int, LocalRule], side: Side, provenance: str) -> ResidueFamily:
    local: List[List[Tuple[int, int]]] = []
    for ell, e in factorize(M):
        if ell not in rules:
            raise ConsistencyError(f"no local condition at {ell} for M = {M}")
        modulus = ell ** e
        allowed = [(r, modulus) for r in range(modulus) if rules[ell](r)]
        if not allowed:
            raise ConsistencyError(f"local condition at {ell} admits no class mod {modulus}")
        local.append(allowed)
    classes = sorted(crt(combo).value for combo in product(*local))
    logger.debug(f"{provenance}: {len(classes)} classes mod {M}")
    return ResidueFamily(M=M, classes=classes, side=side, provenance=provenance)


def enumerate_residue_family(
    n_split: int, n_nonsplit: int, n_add: int, side: Union[Side, str]
) -> ResidueFamily:
    """Residue classes of D_L that satisfy the auxiliary-field conditions on one side.

    Real side: M = 9 M', m = 3 mod 9, and the local classes at l | N are -3 times
    residues or nonresidues. Imaginary side: M = 3 M', m = 2 mod 3, without the -3.
    """
    side = Side(side)
    level = _check_level(n_split, n_nonsplit, n_add)
    mp = m_prime(level)
    real = side is Side.REAL
    M = (9 if real else 3) * mp
    c = -3 if real else 1

    rules: Dict[int, LocalRule] = {3: _congruent(9, (3,)) if real else _congruent(3, (2,))}
    for ell in prime_divisors(n_split):
        rules[ell] = _congruent(8, (1,) if real else (5,)) if ell == 2 else _symbol(ell, c, -1)
    for ell in prime_divisors(n_nonsplit):
        rules[ell] = _congruent(8, (5,) if real else (1,)) if ell == 2 else _symbol(ell, c, 1)
    for ell in prime_divisors(n_add):
        if ell == 2:
            rules[2] = _congruent(16, (8, 12))
        elif ell % 3 == 1:
            rules[ell] = _either(_symbol(ell, c, -1), _exactly_divisible(ell))
        else:
            rules[ell] = _exactly_divisible(ell)
    return _assemble(M, rules, side, f"auxiliary-field conditions, {side.value} side")


def enumerate_twist_family(n_split: int, n_nonsplit: int, n_add: int, d_l: int) -> ResidueFamily:
    """Residue classes of twisting discriminants D covered by one auxiliary field L.

    Real L: M = 3 M', m = 2 mod 3. Imaginary L: M = 9 M', m = 3 mod 9 with -3 factors.
    Here M' = m_prime(N, D_L^2).
    """
    level = _check_level(n_split, n_nonsplit, n_add)
    _check_auxiliary_field(level, n_split, n_nonsplit, d_l)
    mp = m_prime(level, d_l * d_l)
    real = d_l > 0
    M = (3 if real else 9) * mp
    c = 1 if real else -3

    rules: Dict[int, LocalRule] = {3: _congruent(3, (2,)) if real else _congruent(9, (3,))}
    for ell in prime_divisors(n_split):
        rules[ell] = _congruent(8, (5,) if real else (1,)) if ell == 2 else _symbol(ell, c, -1)
    for ell in prime_divisors(n_nonsplit):
        rules[ell] = _congruent(8, (1,) if real else (5,)) if ell == 2 else _symbol(ell, c, 1)
    for ell in prime_divisors(n_add):
        if ell != 2 and d_l % ell:
            rules[ell] = _symbol(ell, c, -1)
    for ell in prime_divisors(d_l):
        if ell != 2:
            rules[ell] = _ramified(ell, d_l, c)
    if level % 4 == 0:
        rules[2] = _congruent(16, (d_l % 16,))
    elif d_l % 2 == 0:
        # D_K = 1 mod 8 pins m = D_L D_K to one class mod the 2-part of M
        two_part = M & -M
        rules[2] = _congruent(two_part, (d_l % two_part,))
    side = Side.REAL if real else Side.IMAGINARY
    return _assemble(M, rules, side, f"twist conditions for D_L = {d_l}")


# --- conditions on a single auxiliary field ---------------------------------------------


def _auxiliary_class_number(d_l: int) -> Optional[Tuple[int, int]]:
    """(discriminant, class number) of the imaginary field whose 3-rank decides condition (2)."""
    target = fundamental_discriminant(-3 * d_l) if d_l > 0 else d_l
    if target == 1:
        return None
    return target, class_number_imag(target)


def twist_conditions(
    n_split: int, n_nonsplit: int, n_add: int, d_l: int, lenient: bool = False
) -> List[CriterionCondition]:
    """The six conditions on an auxiliary quadratic field L = Q(sqrt D_L).

    Args:
        n_split: Product of split multiplicative primes.
        n_nonsplit: Product of nonsplit multiplicative primes.
        n_add: Additive part of the conductor.
        d_l: Fundamental discriminant of L.
        lenient: Also accept primes of N_split and N_nonsplit that ramify in L.

    Returns:
        One ``CriterionCondition`` per condition, tagged T1..T6.
    """
    level = _check_level(n_split, n_nonsplit, n_add)
    if d_l == 1 or not is_fundamental(d_l):
        raise InvalidInputError(f"{d_l} is not the discriminant of a quadratic field")
    conditions: List[CriterionCondition] = []

    def record(name: str, description: str, bad: List[int], witness: str) -> None:
        suffix = f", failing at {bad}" if bad else ""
        conditions.append(CriterionCondition(name=name, description=description, passed=not bad, witness=witness + suffix))

    three = kronecker(d_l, 3)
    conditions.append(CriterionCondition(
        name="T1", description="3 is inert in L", passed=three == -1, witness=f"(D_L/3) = {three}",
    ))

    aux = _auxiliary_class_number(d_l)
    if aux is None:
        passed, witness = False, "no imaginary field attached"
    else:
        disc, h = aux
        passed, witness = h % 3 != 0, f"h({disc}) = {h}"
    description = "3 does not divide h(Q(sqrt(-3 D_L)))" if d_l > 0 else "3 does not divide h(L)"
    conditions.append(CriterionCondition(name="T2", description=description, passed=passed, witness=witness))

    allowed_split = (-1, 0) if lenient else (-1,)
    bad = [ell for ell in prime_divisors(n_split) if kronecker(d_l, ell) not in allowed_split]
    record("T3", "primes of N_split are inert in L", bad, f"N_split = {n_split}")

    allowed_nonsplit = (1, 0) if lenient else (1,)
    bad = [ell for ell in prime_divisors(n_nonsplit) if kronecker(d_l, ell) not in allowed_nonsplit]
    record("T4", "primes of N_nonsplit split in L", bad, f"N_nonsplit = {n_nonsplit}")

    bad = []
    for ell in prime_divisors(n_add):
        symbol = kronecker(d_l, ell)
        if not (symbol == 0 or (symbol == -1 and ell % 3 != 2)):
            bad.append(ell)
    record("T5", "primes of N_add are ramified, or inert and not 2 mod 3", bad, f"N_add = {n_add}")

    passed = level % 4 != 0 or d_l % 16 in (8, 12)
    conditions.append(CriterionCondition(
        name="T6", description="4 | N implies D_L = 8 or 12 mod 16", passed=passed,
        witness=f"N = {level}, D_L mod 16 = {d_l % 16}",
    ))
    return conditions


def fundamental_discriminants(X: int, side: Union[Side, str]) -> List[int]:
    """Fundamental discriminants D != 1 with |D| <= X on one side, by |D|."""
    side = Side(side)
    sign = 1 if side is Side.REAL else -1
    return [sign * n for n in range(3, X + 1) if is_fundamental(sign * n)]


def _scan_block(task: Tuple[int, int, int, bool, List[int]]) -> List[int]:
    n_split, n_nonsplit, n_add, lenient, discs = task
    return [
        d for d in discs
        if all(c.passed for c in twist_conditions(n_split, n_nonsplit, n_add, d, lenient))
    ]


def _certify_type(E: CurveQ, decomposition: Tuple[int, int, int], prime_bound: int) -> str:
    if has_rational_3_torsion(E):
        return "proven"
    report = verify_descent(E, 3, TRIVIAL, TRIVIAL, *decomposition, prime_bound=prime_bound)
    if not report.verdict:
        raise ReducibilityNotCertifiedError(
            f"{E} is not of type (1, 1) at 3: fails at {[f.ell for f in report.failures]}"
        )
    return "checked-to-bound"


def twist_scan(
    E: CurveQ,
    X: int,
    branch: Union[Side, str],
    workers: Optional[int] = None,
    block_size: Optional[int] = None,
    lenient: bool = False,
    prime_bound: Optional[int] = None,
) -> TwistScanReport:
    """Scan fundamental discriminants |D| <= X for auxiliary fields L = Q(sqrt D).

    Args:
        E: Curve with E[3] of type (1, omega) and good reduction at 3.
        X: Bound on |D|.
        branch: ``real`` or ``imaginary`` discriminants.
        workers: Processes; defaults to ``settings.WORKERS``. Blocks are merged in order.
        block_size: Discriminants per task; defaults to ``settings.SCAN_BLOCK_SIZE``.
        lenient: Accept ramification at multiplicative primes.
        prime_bound: Bound for the descent check when E has no rational 3-torsion.

    Returns:
        A ``TwistScanReport`` with the verified discriminants ordered by |D|.
    """
    branch = Side(branch)
    if X < 0:
        raise InvalidInputError(f"X must be nonnegative, got {X}")
    workers = workers or settings.WORKERS
    block_size = block_size or settings.SCAN_BLOCK_SIZE
    if block_size < 1:
        raise InvalidInputError(f"block size must be positive, got {block_size}")

    decomposition = conductor_decomposition(E)
    _check_level(*decomposition)
    certification = _certify_type(E, decomposition, prime_bound or settings.DESCENT_PRIME_BOUND)
    bound = real_twist_bound(*decomposition, branch)

    discs = fundamental_discriminants(X, branch)
    tasks = [(*decomposition, lenient, discs[i:i + block_size]) for i in range(0, len(discs), block_size)]
    logger.info(
        f"Scanning {len(discs)} {branch.value} discriminants for {E} "
        f"({certification}) in {len(tasks)} blocks on {workers} workers"
    )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_scan_block, tasks))
    else:
        results = [_scan_block(task) for task in tasks]
    verified = [d for block in results for d in block]

    empirical = Fraction(len(verified), len(discs)) if discs else Fraction(0)
    return TwistScanReport(
        curve=str(E),
        branch=branch,
        X=X,
        bound=bound.value,
        verified=verified,
        total=len(discs),
        empirical=RationalModel.of(empirical),
    )


def heegner_field_scan(
    base: CurveQ, d_l: int, X: int, p: int = 3, assume_reducible: bool = False
) -> List[int]:
    """Odd D_K with -X <= D_K < -4 and (D_K, D_L) = 1 for which the criterion passes for base (x) eps_L."""
    psi = quad_char(d_l)
    found = []
    for n in range(5, X + 1):
        d_k = -n
        if d_k % 4 != 1 or not is_fundamental(d_k) or gcd(d_k, d_l) != 1:
            continue
        report = heegner_criterion(base, p, psi, quad_field(d_k), assume_reducible=assume_reducible)
        if report.verdict == VERDICT_RANK_ONE:
            found.append(d_k)
    logger.info(f"heegner_field_scan({base}, {d_l}, {X}): {len(found)} fields")
    return found
