"""Commands for Bernoulli numbers, class numbers and q-expansions."""
import logging
from typing import List, Optional

import typer

from eisrank.cli.output import emit
from eisrank.core.config import settings
from eisrank.services.bernoulli import b1_teichmuller_mod_p, bernoulli, gen_bernoulli
from eisrank.services.dirichlet import quad_char
from eisrank.services.qseries import (
    QQ,
    ZZ,
    CoefficientRing,
    Zmod,
    eisenstein,
    level1_cuspform,
    sigma,
)
from eisrank.services.quadfield import analytic_class_number, class_number_imag
from eisrank.utils.numkernel import reduce_mod

logger = logging.getLogger(__name__)


def _ring(mod: Optional[int]) -> CoefficientRing:
    return Zmod(mod) if mod else QQ


def _series_rows(coeffs) -> List[dict]:
    return [{"n": n, "a_n": str(c)} for n, c in enumerate(coeffs)]


def register(app: typer.Typer) -> None:
    @app.command("bernoulli")
    def bernoulli_cmd(
        ctx: typer.Context,
        n: int = typer.Argument(1, help="Index n."),
        chi: int = typer.Option(1, "--chi", help="Discriminant of a quadratic character; 1 for the classical numbers."),
        mod: Optional[int] = typer.Option(None, "--mod", help="Also reduce mod this prime."),
        omega: Optional[int] = typer.Option(None, "--omega", help="Evaluate B_{1, chi omega^j} mod --mod instead."),
    ):
        """B_n, B_{n,chi}, or B_{1,chi omega^j} mod p."""
        if omega is not None:
            if mod is None:
                raise typer.BadParameter("--omega needs --mod", param_hint="--omega")
            row = {"chi": chi, "j": omega, "p": mod, "value": b1_teichmuller_mod_p(quad_char(chi), omega, mod).value}
        else:
            exact = bernoulli(n) if chi == 1 else gen_bernoulli(quad_char(chi), n)
            row = {"n": n, "chi": chi, "value": str(exact)}
            if mod:
                row["mod"] = mod
                row["residue"] = reduce_mod(exact, mod)
        emit(row, ctx.obj.format)

    @app.command("classnum")
    def classnum_cmd(
        ctx: typer.Context,
        discs: List[int] = typer.Argument(..., help="Negative fundamental discriminants."),
        analytic_check: bool = typer.Option(False, "--analytic-check", help="Cross-check with the character sum."),
    ):
        """Class numbers of imaginary quadratic fields by counting reduced forms."""
        rows = []
        mismatched = False
        for d in discs:
            row = {"disc": d, "h": class_number_imag(d)}
            if analytic_check:
                row["analytic"] = analytic_class_number(d)
                mismatched = mismatched or row["analytic"] != row["h"]
            rows.append(row)
        emit(rows, ctx.obj.format, title="Class numbers")
        if mismatched:
            logger.error("form count and character sum disagree")
            raise typer.Exit(code=1)

    @app.command("eisenstein")
    def eisenstein_cmd(
        ctx: typer.Context,
        k: int = typer.Option(..., "--k", help="Weight."),
        psi1: int = typer.Option(1, "--psi1"),
        psi2: int = typer.Option(1, "--psi2"),
        n_plus: int = typer.Option(1, "--n-plus"),
        n_minus: int = typer.Option(1, "--n-minus"),
        n_zero: int = typer.Option(1, "--n-zero"),
        prec: Optional[int] = typer.Option(None, "--prec", help="Defaults to DEFAULT_PREC."),
        mod: Optional[int] = typer.Option(None, "--mod"),
    ):
        """Coefficients of the Eisenstein series of a given type."""
        prec = ctx.obj.prec if prec is None else prec
        series = eisenstein(quad_char(psi1), quad_char(psi2), k, n_plus, n_minus, n_zero, prec, _ring(mod))
        emit(_series_rows(series.coeffs), ctx.obj.format, title=f"E_{k}({psi1}, {psi2})")

    @app.command("cuspform")
    def cuspform_cmd(
        ctx: typer.Context,
        k: int = typer.Option(12, "--k"),
        prec: Optional[int] = typer.Option(None, "--prec", help="Defaults to DEFAULT_PREC."),
        mod: Optional[int] = typer.Option(None, "--mod"),
    ):
        """The level-one cusp form of weight k, for k in 12, 16, 18, 20, 22, 26."""
        prec = ctx.obj.prec if prec is None else prec
        ring = Zmod(mod) if mod else ZZ
        emit(_series_rows(level1_cuspform(k, prec, ring).coeffs), ctx.obj.format, title=f"S_{k}")

    @app.command("tau-check")
    def tau_check_cmd(
        ctx: typer.Context,
        prec: Optional[int] = typer.Option(None, "--prec", help="Defaults to DEFAULT_PREC."),
    ):
        """Check tau(n) = sigma_11(n) mod 691 for n <= prec."""
        prec = ctx.obj.prec if prec is None else prec
        tau = level1_cuspform(12, prec, Zmod(691))
        bad = [n for n in range(1, prec + 1) if tau[n] != sigma(11, n) % 691]
        emit({"prec": prec, "passed": not bad, "first_failure": bad[0] if bad else None}, ctx.obj.format)
        if bad:
            raise typer.Exit(code=1)
