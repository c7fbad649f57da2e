import pytest
from fractions import Fraction
from pathlib import Path

from sympy import primefactors

# Add the parent directory to the path so we can import eisrank
import sys
sys.path.append(str(Path(__file__).parent.parent))

from eisrank.core.exceptions import (
    HypothesisViolationError,
    InvalidInputError,
    ReducibilityNotCertifiedError,
)
from eisrank.services.density import (
    DensityBound,
    FormulaTerm,
    Side,
    TwistScanReport,
    check_hn_hypotheses,
    enumerate_residue_family,
    enumerate_twist_family,
    example_totals,
    fundamental_discriminants,
    heegner_field_scan,
    hn_density_constant,
    m_prime,
    real_twist_bound,
    taya_lower_bound,
    twist_conditions,
    twist_scan,
    twist_theorem_bound,
)
from eisrank.services.dirichlet import quad_char
from eisrank.services.ellcurve import CurveQ
from eisrank.services.heegner import VERDICT_RANK_ONE, heegner_criterion
from eisrank.services.quadfield import quad_field
from eisrank.utils.numkernel import RationalModel, euler_phi


@pytest.fixture(scope="module")
def e19():
    return CurveQ(a1=0, a2=1, a3=1, a4=-9, a6=-15, N=19, label="19a1")


@pytest.fixture(scope="module")
def real_scan(e19):
    return twist_scan(e19, 200, Side.REAL, workers=1)


@pytest.mark.parametrize("args,expected", [
    ((19,), 19),
    ((19, 1681), 31939),
    ((38,), 152),
    ((4,), 16),
    ((1,), 1),
])
def test_m_prime(args, expected):
    assert m_prime(*args) == expected


def test_real_and_imaginary_bounds():
    real = real_twist_bound(19, 1, 1, Side.REAL)
    assert real.fraction == Fraction(19, 640)
    assert real.m_prime == 19
    assert real_twist_bound(19, 1, 1, "imaginary").fraction == Fraction(57, 640)
    assert real_twist_bound(1, 1, 1, "real").fraction == Fraction(1, 16)


def test_bound_audit_trail():
    bound = real_twist_bound(19, 1, 1, Side.REAL)
    product = Fraction(1)
    for term in bound.formula_terms:
        product *= term.value.fraction
    assert product == bound.fraction
    assert DensityBound.model_validate_json(bound.model_dump_json()) == bound


def test_bound_audit_rejects_tampering():
    with pytest.raises(ValueError):
        DensityBound(
            value=RationalModel.of(Fraction(1, 2)),
            m_prime=1,
            formula_terms=[FormulaTerm(label="x", value=RationalModel.of(Fraction(1, 3)))],
        )
    with pytest.raises(ValueError):
        DensityBound.from_terms(1, [("x", Fraction(2))])


def test_auxiliary_field_bounds():
    real_l = twist_theorem_bound(19, 1, 1, 41)
    assert real_l.fraction == Fraction(19, 17920)
    assert real_l.m_prime == 31939
    assert euler_phi(real_l.m_prime) == 29520
    imaginary_l = twist_theorem_bound(19, 1, 1, -7)
    assert imaginary_l.fraction == Fraction(19, 10240)
    assert imaginary_l.m_prime == 931


def test_example_totals():
    assert example_totals() == (Fraction(323, 10240), Fraction(323, 3584))


def test_bound_input_checks():
    with pytest.raises(InvalidInputError):
        real_twist_bound(3, 1, 1, Side.REAL)
    with pytest.raises(InvalidInputError):
        real_twist_bound(4, 1, 1, Side.REAL)
    with pytest.raises(ValueError):
        real_twist_bound(19, 1, 1, "sideways")
    for d_l in (1, -3, 12, -19, -12):
        with pytest.raises(InvalidInputError):
            twist_theorem_bound(19, 1, 1, d_l)
    with pytest.raises(InvalidInputError):
        twist_theorem_bound(1, 1, 16, 5)


def test_hn_hypotheses():
    check_hn_hypotheses(3, 9)
    check_hn_hypotheses(8, 16)
    check_hn_hypotheses(1, 4)
    cases = {(3, 3): "odd-prime-modulus", (9, 9): "odd-prime-square", (2, 4): "two-adic"}
    for (m, M), clause in cases.items():
        with pytest.raises(HypothesisViolationError) as exc:
            check_hn_hypotheses(m, M)
        assert exc.value.clause == clause


def test_density_constants():
    assert hn_density_constant(1, 1) == 3
    assert hn_density_constant(3, 171) == Fraction(19, 960)
    assert hn_density_constant(3, 171, "-") == hn_density_constant(3, 171, "+")
    assert taya_lower_bound(1, 1, "+") == Fraction(5, 6)
    assert taya_lower_bound(1, 1, "-") == Fraction(1, 2)
    with pytest.raises(InvalidInputError):
        taya_lower_bound(1, 1, "x")


def test_residue_family_real_side():
    family = enumerate_residue_family(19, 1, 1, Side.REAL)
    assert family.M == 171
    assert family.count == 9
    assert all(m % 9 == 3 for m in family.classes)
    assert family.classes == sorted(family.classes)


def test_residue_family_imaginary_side():
    family = enumerate_residue_family(19, 1, 1, Side.IMAGINARY)
    assert family.M == 57
    assert family.count == 9
    assert all(m % 3 == 2 for m in family.classes)


@pytest.mark.parametrize("decomposition,M,count", [
    ((1, 5, 1), 45, 2),
    ((1, 1, 25), 225, 4),
    ((1, 1, 49), 441, 27),
    ((1, 1, 16), 144, 2),
    ((14, 1, 1), 504, 3),
])
def test_residue_family_counts(decomposition, M, count):
    family = enumerate_residue_family(*decomposition, "real")
    assert (family.M, family.count) == (M, count)


def test_twist_families():
    real_l = enumerate_twist_family(19, 1, 1, 41)
    assert real_l.count == 180
    assert real_l.side is Side.REAL
    imaginary_l = enumerate_twist_family(19, 1, 1, -7)
    assert (imaginary_l.M, imaginary_l.count) == (8379, 27)
    assert imaginary_l.side is Side.IMAGINARY


def test_twist_conditions_pass():
    for d_l, witness in ((41, "h(-123) = 2"), (-7, "h(-7) = 1")):
        conditions = twist_conditions(19, 1, 1, d_l)
        assert [c.name for c in conditions] == ["T1", "T2", "T3", "T4", "T5", "T6"]
        assert all(c.passed for c in conditions)
        assert conditions[1].witness == witness


def test_twist_conditions_failures():
    conditions = {c.name: c for c in twist_conditions(19, 1, 1, 5)}
    assert conditions["T1"].passed
    assert not conditions["T3"].passed

    strict = {c.name: c.passed for c in twist_conditions(19, 1, 1, -19)}
    lenient = {c.name: c.passed for c in twist_conditions(19, 1, 1, -19, lenient=True)}
    assert not strict["T3"]
    assert lenient["T3"]
    with pytest.raises(InvalidInputError):
        twist_conditions(19, 1, 1, -12)


def test_fundamental_discriminants():
    assert fundamental_discriminants(20, Side.IMAGINARY) == [-3, -4, -7, -8, -11, -15, -19, -20]
    assert fundamental_discriminants(20, Side.REAL) == [5, 8, 12, 13, 17]


def test_twist_scan_real(real_scan):
    assert 41 in real_scan.verified
    assert real_scan.verified == sorted(real_scan.verified)
    assert real_scan.total == len(fundamental_discriminants(200, "real"))
    assert real_scan.bound.fraction == Fraction(19, 640)
    assert real_scan.empirical.fraction == Fraction(len(real_scan.verified), real_scan.total)
    for d in real_scan.verified:
        assert all(c.passed for c in twist_conditions(19, 1, 1, d))


def test_twist_scan_prefix(e19, real_scan):
    smaller = twist_scan(e19, 100, Side.REAL, workers=1)
    assert smaller.verified == [d for d in real_scan.verified if d <= 100]


def test_twist_scan_parallel_matches_serial(e19, real_scan):
    parallel = twist_scan(e19, 200, Side.REAL, workers=2, block_size=10)
    assert parallel == real_scan


def test_twist_scan_imaginary(e19):
    report = twist_scan(e19, 200, Side.IMAGINARY, workers=1)
    assert -7 in report.verified
    assert report.verified == sorted(report.verified, reverse=True)
    assert TwistScanReport.model_validate_json(report.model_dump_json()) == report


def test_twist_scan_empty_and_invalid(e19):
    empty = twist_scan(e19, 3, Side.REAL, workers=1)
    assert empty.total == 0
    assert empty.verified == []
    assert empty.empirical.fraction == 0
    with pytest.raises(InvalidInputError):
        twist_scan(e19, -1, Side.REAL)
    with pytest.raises(InvalidInputError):
        twist_scan(e19, 10, Side.REAL, block_size=-1)


def test_twist_scan_needs_type_one_one():
    e11 = CurveQ(a1=0, a2=-1, a3=1, a4=-10, a6=-20, N=11, label="11a1")
    with pytest.raises(ReducibilityNotCertifiedError):
        twist_scan(e11, 50, Side.REAL, workers=1, prime_bound=50)


def test_heegner_field_scan(e19):
    found = heegner_field_scan(e19, -7, 200)
    assert -59 in found
    assert all(d % 2 and d < -4 and d % 7 for d in found)
    assert found == sorted(found, reverse=True)
    report = heegner_criterion(e19, 3, quad_char(-7), quad_field(found[0]))
    assert report.verdict == VERDICT_RANK_ONE


def twist_family_size(n_split, n_nonsplit, n_add, d_l):
    count = 1
    for ell in primefactors(n_split * n_nonsplit):
        if ell != 2:
            count *= (ell - 1) // 2
    for ell in primefactors(n_add):
        if ell != 2 and d_l % ell:
            count *= ell * (ell - 1) // 2
    for ell in primefactors(d_l):
        if ell != 2:
            count *= (ell - 1) // 2
    return count


@pytest.mark.parametrize("d_l,n_split,M,residue", [
    (8, 19, 3648, 8),
    (-8, 11, 6336, 56),
])
def test_twist_family_even_auxiliary_field(d_l, n_split, M, residue):
    family = enumerate_twist_family(n_split, 1, 1, d_l)
    assert family.M == M
    assert family.count == (n_split - 1) // 2
    assert all(m % 64 == residue for m in family.classes)


@pytest.mark.parametrize("decomposition", [
    (19, 1, 1, 41),
    (19, 1, 1, -7),
    (19, 1, 1, 8),
    (11, 1, 1, -8),
    (5, 7, 1, -4),
    (1, 1, 25, -4),
    (1, 1, 49, 5),
    (1, 1, 25, 5),
    (2, 1, 1, 5),
    (1, 2, 1, -7),
    (7, 1, 1, -4),
    (13, 1, 1, -4),
    (5, 1, 1, -7),
    (7, 5, 1, 13),
    (1, 11, 1, -8),
    (17, 1, 1, 8),
    (1, 1, 121, -7),
    (23, 1, 1, -20),
    (35, 1, 1, -8),
    (1, 1, 25, -8),
])
def test_twist_family_count_matches_formula(decomposition):
    family = enumerate_twist_family(*decomposition)
    assert family.count == twist_family_size(*decomposition)
    assert len(set(family.classes)) == family.count


@pytest.mark.parametrize("decomposition", [
    (19, 1, 1), (1, 5, 1), (1, 1, 25), (1, 1, 49), (1, 1, 16), (14, 1, 1), (7, 5, 1), (2, 1, 1),
])
@pytest.mark.parametrize("side", list(Side))
def test_residue_family_classes_meet_the_counting_hypotheses(decomposition, side):
    family = enumerate_residue_family(*decomposition, side)
    assert len(set(family.classes)) == family.count > 0
    for m in family.classes:
        assert 0 <= m < family.M
        check_hn_hypotheses(m, family.M)
        assert m % 9 == 3 if side is Side.REAL else m % 3 == 2
