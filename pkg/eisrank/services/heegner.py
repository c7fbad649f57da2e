"""
Rank criterion for elliptic curves with reducible mod-p Galois representation.

For a base curve E' and a quadratic character psi, the curve E = E' (x) psi has mod-p
representation of type (psi, psi omega) whenever E'[p] has type (1, omega). The criterion
below checks the congruence conditions under which the Heegner point of E over an
imaginary quadratic K is non-torsion, and the root-number argument that splits the
rank between E(Q) and the twist E^K(Q).
"""
import logging
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from eisrank.core.exceptions import (
    BranchNotApplicableError,
    ConsistencyError,
    ExceptionalCharacterError,
    InvalidInputError,
    NonInvertibleError,
    ReducibilityNotCertifiedError,
)
from eisrank.services.bernoulli import b1_teichmuller_mod_p, gen_bernoulli
from eisrank.services.dirichlet import (
    QuadChar,
    char_eval,
    char_product,
    psi_zero,
    quad_char,
    teich_inverse_power,
)
from eisrank.services.ellcurve import (
    CurveQ,
    conductor_decomposition,
    descent_type,
    has_rational_3_torsion,
    quadratic_twist,
    verify_descent,
)
from eisrank.services.quadfield import (
    QuadField,
    Splitting,
    class_number_imag,
    heegner_hypothesis,
    quad_field,
    splitting,
)
from eisrank.utils.numkernel import Residue, modinv, prime_divisors, reduce_mod

logger = logging.getLogger(__name__)

VERDICT_RANK_ONE = "non-torsion-rank-1"
VERDICT_INCONCLUSIVE = "inconclusive"


class CriterionCondition(BaseModel):
    name: str = Field(description="Short condition tag, e.g. 'C4'.")
    description: str = Field(description="What the condition asks.")
    passed: bool
    witness: str = Field(description="Value or computation supporting the outcome.")


class RankConclusion(BaseModel):
    rank_EQ: int = Field(description="Rank of E over Q.")
    rank_EKQ: int = Field(description="Rank of the twist of E by K over Q.")
    branch: str = Field(description="Which root-number branch applied.")

    @property
    def ranks(self) -> Tuple[int, int]:
        return (self.rank_EQ, self.rank_EKQ)


class CriterionReport(BaseModel):
    curve: str
    p: int
    psi: int = Field(description="Discriminant of the twisting character.")
    K: int = Field(description="Discriminant of the imaginary quadratic field.")
    certification: str = Field(description="How reducibility of E[p] was established.")
    conditions: List[CriterionCondition] = Field(default_factory=list)
    bernoulli_values_mod_p: Dict[str, Optional[int]] = Field(default_factory=dict)
    class_numbers: Dict[int, int] = Field(default_factory=dict)
    xi_mod_p: Optional[int] = None
    verdict: str
    failing: List[str] = Field(default_factory=list)
    certified_scope: bool = Field(True, description="False when D_K is even.")
    rank_EQ: Optional[int] = None
    rank_EKQ: Optional[int] = None
    notes: List[str] = Field(default_factory=list)


class CycleCriterionReport(BaseModel):
    psi: int
    k: int
    K: int
    n_plus: int
    n_minus: int
    n_zero: int
    p: int
    xi: int
    euler_factors: Tuple[int, int]
    bernoulli_k_half: int = Field(description="B_{k/2, psi0 eps_K^(k/2)} mod p.")
    bernoulli_one: Optional[int] = Field(None, description="B_{1, psi0 eps_K (eps_K omega)^(-k/2)} mod p.")
    value: Optional[int] = Field(None, description="Squared special-value factor mod p.")
    assumptions: List[CriterionCondition] = Field(default_factory=list)
    certified_scope: bool = True
    verdict: str
    notes: List[str] = Field(default_factory=list)


class RamanujanRow(BaseModel):
    psi: int
    K: int
    psi0: int
    bernoulli_six: int = Field(description="B_{6, psi0} mod 691.")
    bernoulli_one: int = Field(description="B_{1, psi0 eps_K omega^-6} mod 691.")
    value: int = Field(description="Product of the two values mod 691.")
    conditions_hold: bool = Field(description="691 prime to f(psi) and every prime of 691 f(psi) splits in K.")


def xi_mod_p(psi: QuadChar, k: int, n_plus: int, n_minus: int, n_zero: int, p: int) -> Residue:
    """Euler-factor product over N+, N- and N0 for a quadratic psi, in F_p.

    ell | N+ contributes (1 - psi(ell) ell^(k/2-1)), ell | N- contributes
    (1 - psi(ell) ell^(-k/2)), and ell | N0 contributes both.
    """
    if k % 2:
        raise InvalidInputError(f"weight must be even, got {k}")
    if (n_plus * n_minus * n_zero) % p == 0:
        raise InvalidInputError(f"{p} divides the level {n_plus * n_minus * n_zero}")
    half = k // 2

    def plus(ell: int) -> int:
        return 1 - char_eval(psi, ell) * teich_inverse_power(ell, half - 1, p)

    def minus(ell: int) -> int:
        return 1 - char_eval(psi, ell) * teich_inverse_power(ell, -half, p)

    value = 1
    for ell in prime_divisors(n_plus):
        value *= plus(ell)
    for ell in prime_divisors(n_minus):
        value *= minus(ell)
    for ell in prime_divisors(n_zero):
        value *= plus(ell) * minus(ell)
    return Residue(value=value % p, modulus=p)


def _certify(base: CurveQ, p: int, assume_reducible: bool, prime_bound: int) -> str:
    if p == 3 and has_rational_3_torsion(base):
        return "proven: rational 3-torsion on the base curve"
    if not assume_reducible:
        raise ReducibilityNotCertifiedError(
            f"cannot certify that {base}[{p}] is reducible; pass assume_reducible to check it to a bound"
        )
    n_plus, n_minus, n_zero = descent_type(base, p)
    one = quad_char(1)
    report = verify_descent(base, p, one, one, n_plus, n_minus, n_zero, prime_bound)
    if not report.verdict:
        raise ReducibilityNotCertifiedError(
            f"{base} fails the Eisenstein congruences mod {p} at {[f.ell for f in report.failures]}"
        )
    return f"checked-to-bound: Eisenstein congruences mod {p} up to {prime_bound}"


def _bernoulli_mod(value: Fraction, p: int) -> Optional[int]:
    try:
        return reduce_mod(value, p)
    except NonInvertibleError:
        return None


def heegner_criterion(
    base: CurveQ,
    p: int,
    psi: QuadChar,
    K: QuadField,
    assume_reducible: bool = False,
    prime_bound: int = 200,
    twisted_conductor: Optional[int] = None,
) -> CriterionReport:
    """Evaluate the non-torsion criterion for the Heegner point of E = base (x) psi over K.

    Args:
        base: Curve whose mod-p representation has type (1, omega).
        p: Odd prime of good reduction for E.
        psi: Quadratic character twisting the base curve.
        K: Imaginary quadratic field.
        assume_reducible: Accept a finite congruence check as the reducibility certificate
            when no rational p-torsion is available.
        prime_bound: Bound for that congruence check.
        twisted_conductor: Conductor of the twist when gcd(f(psi), N) > 1.

    Returns:
        A ``CriterionReport``; its verdict is ``non-torsion-rank-1`` iff every condition holds.
    """
    if p == 2:
        raise InvalidInputError("the criterion needs an odd prime p")
    if not K.is_imaginary:
        raise InvalidInputError(f"K must be imaginary, got disc {K.disc}")
    certification = _certify(base, p, assume_reducible, prime_bound)

    curve = quadratic_twist(base, psi.disc, twisted_conductor) if not psi.is_trivial else base
    if curve.N % p == 0:
        raise InvalidInputError(f"{p} divides the conductor {curve.N}")
    n_split, n_nonsplit, n_add = conductor_decomposition(curve)
    if n_add % (psi.conductor ** 2):
        raise InvalidInputError(f"f(psi)^2 = {psi.conductor ** 2} does not divide N_add = {n_add}")

    eps_k = K.character
    psi0 = psi_zero(psi, eps_k)
    notes: List[str] = []
    conditions: List[CriterionCondition] = []

    def record(name: str, description: str, passed: bool, witness: str) -> None:
        conditions.append(CriterionCondition(name=name, description=description, passed=passed, witness=witness))

    psi_p = char_eval(psi, p)
    record("C1", "psi(p) != 1", psi_p != 1, f"psi({p}) = {psi_p}")
    record("C2", "no split multiplicative primes", n_split == 1, f"N_split = {n_split}")

    bad_additive = []
    for ell in prime_divisors(n_add):
        value = char_eval(psi, ell)
        if not ((value != 1 and (ell + 1) % p != 0) or value == 0):
            bad_additive.append(ell)
    record(
        "C3",
        "each l | N_add has psi(l) = 0, or psi(l) != 1 and l != -1 mod p",
        not bad_additive,
        f"N_add = {n_add}" + (f", failing at {bad_additive}" if bad_additive else ""),
    )

    p_split = splitting(K, p)
    record("C4", "p splits in K", p_split is Splitting.SPLIT, f"{p} is {p_split.value} in K")

    non_split = [ell for ell in prime_divisors(curve.N) if splitting(K, ell) is not Splitting.SPLIT]
    record(
        "C5",
        "Heegner hypothesis for N",
        heegner_hypothesis(K, curve.N),
        f"N = {curve.N}" + (f", not split at {non_split}" if non_split else ""),
    )
    record("C6", "D_K < -4", K.disc < -4, f"D_K = {K.disc}")
    certified_scope = K.disc % 2 != 0
    if not certified_scope:
        notes.append(f"D_K = {K.disc} is even: outside the odd-discriminant scope of the criterion")
        logger.warning(f"Heegner criterion evaluated with even D_K = {K.disc}")

    values, class_numbers = _bernoulli_condition(psi0, eps_k, p, notes)
    b_k = values.get("B_1(psi0*eps_K)")
    b_w = values.get("B_1(psi0*omega^-1)")
    passed7 = b_k not in (None, 0) and b_w not in (None, 0)
    record(
        "C7",
        "p does not divide B_{1,psi0 eps_K} B_{1,psi0 omega^-1}",
        passed7,
        ", ".join(f"{name} = {value}" for name, value in values.items()),
    )

    if psi.is_trivial and p > 3:
        notes.append("psi = 1 with p > 3: the Euler factor product vanishes and the criterion is vacuous")

    xi_value = None
    try:
        n_plus, n_minus, n_zero = descent_type(curve, p, psi)
        xi_value = xi_mod_p(psi, 2, n_plus, n_minus, n_zero, p).value
    except InvalidInputError as e:
        notes.append(f"Euler factor product not evaluated: {str(e)}")

    failing = [c.name for c in conditions if not c.passed]
    report = CriterionReport(
        curve=str(curve),
        p=p,
        psi=psi.disc,
        K=K.disc,
        certification=certification,
        conditions=conditions,
        bernoulli_values_mod_p=values,
        class_numbers=class_numbers,
        xi_mod_p=xi_value,
        verdict=VERDICT_INCONCLUSIVE if failing else VERDICT_RANK_ONE,
        failing=failing,
        certified_scope=certified_scope,
        notes=notes,
    )
    if not failing:
        try:
            ranks = root_number_ranks(base, psi, K, True, p)
            report.rank_EQ, report.rank_EKQ = ranks.rank_EQ, ranks.rank_EKQ
            report.notes.append(f"rank split from root numbers ({ranks.branch})")
        except BranchNotApplicableError as e:
            report.notes.append(f"no rank split: {str(e)}")
    logger.info(f"Heegner criterion for {curve} over K = {K.disc}: {report.verdict}")
    return report


def _bernoulli_condition(
    psi0: QuadChar, eps_k: QuadChar, p: int, notes: List[str]
) -> Tuple[Dict[str, Optional[int]], Dict[int, int]]:
    values: Dict[str, Optional[int]] = {}
    class_numbers: Dict[int, int] = {}

    twisted_k = char_product(psi0, eps_k)
    values["B_1(psi0*eps_K)"] = _bernoulli_mod(gen_bernoulli(twisted_k, 1), p)
    if twisted_k.disc < 0:
        class_numbers[twisted_k.disc] = class_number_imag(twisted_k.disc)

    if p == 3:
        # omega = eps_{-3} at p = 3, so the second value is again a class number
        twisted_w = char_product(psi0, quad_char(-3))
        if twisted_w.is_trivial:
            values["B_1(psi0*omega^-1)"] = None
            notes.append("psi0 * omega^-1 is trivial at p = 3")
        else:
            values["B_1(psi0*omega^-1)"] = _bernoulli_mod(gen_bernoulli(twisted_w, 1), p)
            if twisted_w.disc < 0:
                class_numbers[twisted_w.disc] = class_number_imag(twisted_w.disc)
        if psi0.conductor % 3 and not psi0.is_trivial:
            check = b1_teichmuller_mod_p(psi0, -1, 3).value
            if check != values["B_1(psi0*omega^-1)"]:
                raise ConsistencyError(
                    f"class-number and Teichmueller routes disagree for psi0 = {psi0.disc}: "
                    f"{values['B_1(psi0*omega^-1)']} != {check}"
                )
        elif psi0.is_trivial:
            notes.append("psi0 = 1: B_{1,omega^-1} is not p-integral")
        return values, class_numbers

    try:
        values["B_1(psi0*omega^-1)"] = b1_teichmuller_mod_p(psi0, -1, p).value
    except (ExceptionalCharacterError, InvalidInputError) as e:
        values["B_1(psi0*omega^-1)"] = None
        notes.append(f"B_1(psi0*omega^-1) not available: {str(e)}")
    return values, class_numbers


def root_number_ranks(
    base: CurveQ, psi: QuadChar, K: QuadField, criterion_passed: bool, p: int = 3
) -> RankConclusion:
    """Split the rank between E = base (x) psi and its twist by K using w(E) = -psi(-1).

    Applies when the criterion passed and either p >= 5, or the base is semistable with
    conductor prime to f(psi).
    """
    if not criterion_passed:
        raise BranchNotApplicableError("the Heegner criterion did not pass")
    if psi.is_trivial:
        raise BranchNotApplicableError("psi = 1 is excluded: the Euler factor product vanishes")
    if p >= 5:
        branch = "p >= 5"
    elif base.is_semistable and gcd(psi.conductor, base.N) == 1:
        branch = "semistable base, conductor prime to f(psi)"
    else:
        raise BranchNotApplicableError(
            f"p = {p} < 5 and {base} is not a semistable base prime to f(psi) = {psi.conductor}"
        )
    sign = psi.parity
    return RankConclusion(rank_EQ=(1 + sign) // 2, rank_EKQ=(1 - sign) // 2, branch=branch)


def cycle_criterion(
    psi: QuadChar,
    k: int,
    K: QuadField,
    n_plus: int,
    n_minus: int,
    n_zero: int,
    p: int,
) -> CycleCriterionReport:
    """Mod-p special-value factor attached to a weight-k form of type (psi, psi, N+, N-, N0).

    The value is (Xi^2 / 4) * ((1/k) * E1 * E2 * B_{k/2, psi0 eps_K^(k/2)} *
    B_{1, psi0 eps_K (eps_K omega)^(-k/2)})^2 mod p with Euler factors
    E1 = 1 - psi(p) p^(k/2-1) and E2 = 1 - (psi omega^(-k/2))(p).
    """
    if k % 2 or k < 2:
        raise InvalidInputError(f"k must be even and >= 2, got {k}")
    if (2 * k) % p == 0:
        raise InvalidInputError(f"p = {p} divides 2k")
    half = k // 2
    eps_k = K.character
    psi0 = psi_zero(psi, eps_k)
    level = n_plus * n_minus * n_zero

    assumptions = []
    p_split = splitting(K, p)
    assumptions.append(CriterionCondition(
        name="p-split", description="p splits in K", passed=p_split is Splitting.SPLIT,
        witness=f"{p} is {p_split.value}",
    ))
    bad = [ell for ell in prime_divisors(level * psi.conductor) if splitting(K, ell) is not Splitting.SPLIT]
    assumptions.append(CriterionCondition(
        name="level-split", description="every l | N f(psi) splits in K", passed=not bad,
        witness=f"N f(psi) = {level * psi.conductor}" + (f", not split at {bad}" if bad else ""),
    ))
    assumptions.append(CriterionCondition(
        name="p-coprime", description="p does not divide f(psi)", passed=psi.conductor % p != 0,
        witness=f"f(psi) = {psi.conductor}",
    ))

    xi = xi_mod_p(psi, k, n_plus, n_minus, n_zero, p).value
    e1 = (1 - char_eval(psi, p) * pow(p, half - 1, p)) % p
    e2 = (1 - char_eval(psi, p)) % p if (-half) % (p - 1) == 0 else 1

    if half % 2 == 0:
        chi_half, chi_one = psi0, char_product(psi0, eps_k)
    else:
        chi_half, chi_one = char_product(psi0, eps_k), psi0
    b_half = reduce_mod(gen_bernoulli(chi_half, half), p)

    notes: List[str] = []
    certified_scope = K.disc % 2 != 0
    if not certified_scope:
        notes.append(f"D_K = {K.disc} is even: outside the odd-discriminant scope")
    try:
        b_one: Optional[int] = b1_teichmuller_mod_p(chi_one, -half, p).value
    except ExceptionalCharacterError:
        b_one = None
        notes.append("trivial-character branch: the value is (p-1)/p log_p, with v_p = v_p(2 h_K)")
        notes.append(f"h_K = {class_number_imag(K.disc)}")

    value = None
    verdict = "log-branch"
    if b_one is not None:
        inner = modinv(k, p) * e1 * e2 * b_half * b_one % p
        value = xi * xi * modinv(4, p) * inner * inner % p
        verdict = "non-trivial" if value else "vanishes"

    return CycleCriterionReport(
        psi=psi.disc, k=k, K=K.disc, n_plus=n_plus, n_minus=n_minus, n_zero=n_zero, p=p,
        xi=xi, euler_factors=(e1, e2), bernoulli_k_half=b_half, bernoulli_one=b_one,
        value=value, assumptions=assumptions, certified_scope=certified_scope,
        verdict=verdict, notes=notes,
    )


RAMANUJAN_ROWS = ((12, -23), (12, -95), (13, -40), (-7, -40))


def ramanujan_row(psi: QuadChar, K: QuadField, p: int = 691) -> RamanujanRow:
    """B_{6,psi0} * B_{1, psi0 eps_K omega^-6} mod p for the weight-12 Eisenstein congruence."""
    eps_k = K.character
    psi0 = psi_zero(psi, eps_k)
    b_six = reduce_mod(gen_bernoulli(psi0, 6), p)
    b_one = b1_teichmuller_mod_p(char_product(psi0, eps_k), -6, p).value
    conditions = psi.conductor % p != 0 and all(
        splitting(K, ell) is Splitting.SPLIT for ell in prime_divisors(p * psi.conductor)
    )
    return RamanujanRow(
        psi=psi.disc, K=K.disc, psi0=psi0.disc, bernoulli_six=b_six,
        bernoulli_one=b_one, value=b_six * b_one % p, conditions_hold=conditions,
    )


def ramanujan_table(p: int = 691) -> List[RamanujanRow]:
    return [ramanujan_row(quad_char(d), quad_field(k), p) for d, k in RAMANUJAN_ROWS]
