"""
Worked-example suite: every concrete number the toolkit is expected to reproduce, run in a
fixed order so that two runs give identical output.
"""
import logging
from fractions import Fraction
from typing import Callable, List

from pydantic import BaseModel, Field

from eisrank.core.exceptions import EisrankError
from eisrank.db.curves import get_curve
from eisrank.services.bernoulli import (
    b1_teichmuller_mod_p,
    bernoulli,
    gen_bernoulli,
    kummer_b1_mod_p,
)
from eisrank.services.density import (
    Side,
    example_totals,
    real_twist_bound,
    twist_scan,
    twist_theorem_bound,
)
from eisrank.services.dirichlet import TRIVIAL, quad_char
from eisrank.services.ellcurve import descent_type, verify_descent
from eisrank.services.heegner import (
    VERDICT_RANK_ONE,
    cycle_criterion,
    heegner_criterion,
    ramanujan_table,
    xi_mod_p,
)
from eisrank.services.qseries import Zmod, level1_cuspform, sigma
from eisrank.services.quadfield import analytic_class_number, class_number_imag, quad_field
from eisrank.utils.numkernel import kronecker, reduce_mod

logger = logging.getLogger(__name__)


class ExampleCheck(BaseModel):
    name: str
    expected: str
    actual: str
    passed: bool
    informational: bool = Field(False, description="Recorded for reference; never fails the suite.")
    detail: str = ""


class ExampleSuiteReport(BaseModel):
    checks: List[ExampleCheck] = Field(default_factory=list)

    @property
    def failures(self) -> List[ExampleCheck]:
        return [c for c in self.checks if not c.passed and not c.informational]

    @property
    def passed(self) -> bool:
        return not self.failures


def _run(name: str, expected, compute: Callable[[], object]) -> ExampleCheck:
    try:
        actual = compute()
    except EisrankError as e:
        logger.error(f"Example {name} raised: {str(e)}")
        return ExampleCheck(name=name, expected=str(expected), actual="error", passed=False, detail=str(e))
    return ExampleCheck(name=name, expected=str(expected), actual=str(actual), passed=actual == expected)


def _note(name: str, stated: str, computed: str, detail: str) -> ExampleCheck:
    return ExampleCheck(
        name=name, expected=stated, actual=computed, passed=stated == computed,
        informational=True, detail=detail,
    )


def _tau_matches_sigma(prec: int) -> bool:
    tau = level1_cuspform(12, prec, Zmod(691))
    return all(tau[n] == sigma(11, n) % 691 for n in range(1, prec + 1))


def _s18_matches_sigma(prec: int) -> bool:
    f = level1_cuspform(18, prec, Zmod(43867))
    return all(f[n] == sigma(17, n) % 43867 for n in range(1, prec + 1))


def _heegner_ranks(d_l: int, d_k: int):
    report = heegner_criterion(get_curve("19a1"), 3, quad_char(d_l), quad_field(d_k))
    return (report.verdict, report.rank_EQ, report.rank_EKQ)


def run_examples(tau_prec: int = 500, scan_bound: int = 200) -> ExampleSuiteReport:
    """Run the worked examples.

    Args:
        tau_prec: Precision for the tau = sigma_11 mod 691 comparison.
        scan_bound: X for the twist scans of 19a1.

    Returns:
        An ``ExampleSuiteReport``; informational rows record known misprints in stated
        values and do not affect ``passed``.
    """
    E = get_curve("19a1")
    p = 43867
    checks = [
        _run("B_18", Fraction(43867, 798), lambda: bernoulli(18)),
        _run("B_12", Fraction(-691, 2730), lambda: bernoulli(12)),
        _run("B_{9,eps_-20}", -5444415378, lambda: gen_bernoulli(quad_char(-20), 9)),
        _run("B_{9,eps_-20} mod 43867", 5726, lambda: reduce_mod(gen_bernoulli(quad_char(-20), 9), p)),
        _run("B_{1,omega^-9} mod 43867", 11875, lambda: b1_teichmuller_mod_p(TRIVIAL, -9, p).value),
        _run("Kummer p=7 [j]=3", 6, lambda: kummer_b1_mod_p(3, 7).value),
        _run("Kummer p=11 [j]=3", 1, lambda: kummer_b1_mod_p(3, 11).value),
        _run("Kummer p=11 [j]=5", 10, lambda: kummer_b1_mod_p(5, 11).value),
        _run("Xi(1,1,7,1,1) k=18", 25644, lambda: xi_mod_p(TRIVIAL, 18, 7, 1, 1, p).value),
        _run(
            "cycle value k=18 K=-20",
            (25644, 5726, 11875),
            lambda: (lambda r: (r.xi, r.bernoulli_k_half, r.bernoulli_one))(
                cycle_criterion(TRIVIAL, 18, quad_field(-20), 7, 1, 1, p)
            ),
        ),
        _run(f"tau = sigma_11 mod 691 to {tau_prec}", True, lambda: _tau_matches_sigma(tau_prec)),
        _run("S_18 = sigma_17 mod 43867 to 200", True, lambda: _s18_matches_sigma(200)),
        _run("Ramanujan table", [583, 126, 583, 176], lambda: [row.value for row in ramanujan_table()]),
    ]
    for disc, h in ((-123, 2), (-328, 4), (-7, 1), (-168, 4), (-1239, 32)):
        checks.append(_run(f"h({disc})", h, lambda d=disc: class_number_imag(d)))
        checks.append(_run(f"h({disc}) analytic", h, lambda d=disc: analytic_class_number(d)))
    checks += [
        _run("19a1 descent type at 3", (19, 1, 1), lambda: descent_type(E, 3)),
        _run("19a1 descent verified", True, lambda: verify_descent(E, 3, TRIVIAL, TRIVIAL, 19, 1, 1).verdict),
        _run("19a1 x 41 over K=-8", (VERDICT_RANK_ONE, 1, 0), lambda: _heegner_ranks(41, -8)),
        _run("19a1 x -7 over K=-59", (VERDICT_RANK_ONE, 0, 1), lambda: _heegner_ranks(-7, -59)),
        _run("real_twist_bound real", Fraction(19, 640), lambda: real_twist_bound(19, 1, 1, Side.REAL).fraction),
        _run("real_twist_bound imaginary", Fraction(57, 640), lambda: real_twist_bound(19, 1, 1, Side.IMAGINARY).fraction),
        _run("twist_theorem_bound D_L=41", Fraction(19, 17920), lambda: twist_theorem_bound(19, 1, 1, 41).fraction),
        _run("twist_theorem_bound D_L=-7", Fraction(19, 10240), lambda: twist_theorem_bound(19, 1, 1, -7).fraction),
        _run("summed bounds", (Fraction(323, 10240), Fraction(323, 3584)), example_totals),
        _run(
            f"twist_scan real X={scan_bound} contains 41", True,
            lambda: 41 in twist_scan(E, scan_bound, Side.REAL, workers=1).verified,
        ),
        _run(
            f"twist_scan imaginary X={scan_bound} contains -7", True,
            lambda: -7 in twist_scan(E, scan_bound, Side.IMAGINARY, workers=1).verified,
        ),
    ]

    checks += [
        _note("stated B_{1,omega^-9} mod 43867", "11867", str(b1_teichmuller_mod_p(TRIVIAL, -9, p).value),
              "the Teichmueller sum and Voronoi's congruence both give 11875"),
        _note("stated kronecker(-8, 3)", "-1", str(kronecker(-8, 3)), "-8 = 1 mod 3 is a square, so 3 splits"),
        _note("stated (h(-123), h(-328))", "(4, 2)", str((class_number_imag(-123), class_number_imag(-328))),
              "values transposed; the 3-divisibility conclusions are unchanged"),
        _note(
            "19a1 x -7 over K=-8", VERDICT_RANK_ONE,
            heegner_criterion(E, 3, quad_char(-7), quad_field(-8)).verdict,
            "7 ramifies in Q(sqrt -7) and is inert in Q(sqrt -2), so the Heegner hypothesis fails; K = -59 is used",
        ),
    ]
    report = ExampleSuiteReport(checks=checks)
    logger.info(f"Examples: {len(checks)} rows, {len(report.failures)} failures")
    return report
