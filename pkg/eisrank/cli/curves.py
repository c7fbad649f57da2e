"""Commands for elliptic curves: descent, the Heegner criterion, densities and scans."""
import logging
from pathlib import Path
from typing import Optional

import typer
from pydantic import BaseModel

from eisrank.cli.output import emit, emit_fields
from eisrank.core.config import settings
from eisrank.db.curves import get_curve
from eisrank.services.density import (
    Side,
    heegner_field_scan,
    real_twist_bound,
    twist_scan,
    twist_theorem_bound,
)
from eisrank.services.dirichlet import quad_char
from eisrank.services.ellcurve import conductor_decomposition, descent_type, verify_descent
from eisrank.services.heegner import VERDICT_RANK_ONE, cycle_criterion, heegner_criterion
from eisrank.services.quadfield import quad_field

logger = logging.getLogger(__name__)


def _emit_checklist(report: BaseModel, conditions, fmt: str, title: str) -> None:
    if fmt == "json":
        emit(report, fmt)
        return
    emit(conditions, fmt, columns=("name", "description", "passed", "witness"), title=title)


def register(app: typer.Typer) -> None:
    @app.command("descent")
    def descent_cmd(
        ctx: typer.Context,
        curve: str = typer.Option(..., "--curve", help="Curve label."),
        p: int = typer.Option(3, "--p"),
        psi1: int = typer.Option(1, "--psi1"),
        psi2: int = typer.Option(1, "--psi2"),
        n_plus: Optional[int] = typer.Option(None, "--n-plus"),
        n_minus: Optional[int] = typer.Option(None, "--n-minus"),
        n_zero: Optional[int] = typer.Option(None, "--n-zero"),
        bound: int = typer.Option(settings.DESCENT_PRIME_BOUND, "--bound", help="Largest prime checked."),
    ):
        """Check the Eisenstein descent congruences of a curve mod p."""
        E = get_curve(curve, ctx.obj.data)
        if None in (n_plus, n_minus, n_zero):
            n_plus, n_minus, n_zero = descent_type(E, p, quad_char(psi1))
        report = verify_descent(E, p, quad_char(psi1), quad_char(psi2), n_plus, n_minus, n_zero, bound)
        emit_fields(report, ctx.obj.format, title=f"Descent for {E} mod {p}")
        if not report.verdict:
            raise typer.Exit(code=1)

    @app.command("heegner")
    def heegner_cmd(
        ctx: typer.Context,
        curve: str = typer.Option(..., "--curve", help="Label of the base curve."),
        p: int = typer.Option(3, "--p"),
        psi: int = typer.Option(1, "--psi", help="Discriminant of the twisting character."),
        K: int = typer.Option(..., "--K", help="Discriminant of the imaginary quadratic field."),
        assume_reducible: bool = typer.Option(False, "--assume-reducible"),
        bound: int = typer.Option(settings.DESCENT_PRIME_BOUND, "--bound"),
        conductor: Optional[int] = typer.Option(None, "--conductor", help="Conductor of the twist when it shares primes with N."),
    ):
        """Heegner-point non-torsion criterion for base (x) psi over K."""
        report = heegner_criterion(
            get_curve(curve, ctx.obj.data), p, quad_char(psi), quad_field(K),
            assume_reducible=assume_reducible, prime_bound=bound, twisted_conductor=conductor,
        )
        ranks = f", ranks ({report.rank_EQ}, {report.rank_EKQ})" if report.rank_EQ is not None else ""
        _emit_checklist(report, report.conditions, ctx.obj.format, f"{report.curve} over K = {K}: {report.verdict}{ranks}")
        for note in report.notes:
            logger.info(note)
        if report.verdict != VERDICT_RANK_ONE:
            raise typer.Exit(code=1)

    @app.command("cycle")
    def cycle_cmd(
        ctx: typer.Context,
        k: int = typer.Option(..., "--k"),
        K: int = typer.Option(..., "--K"),
        p: int = typer.Option(..., "--p"),
        psi: int = typer.Option(1, "--psi"),
        n_plus: int = typer.Option(1, "--n-plus"),
        n_minus: int = typer.Option(1, "--n-minus"),
        n_zero: int = typer.Option(1, "--n-zero"),
    ):
        """Mod-p special-value factor for a weight-k form of Eisenstein type."""
        report = cycle_criterion(quad_char(psi), k, quad_field(K), n_plus, n_minus, n_zero, p)
        emit_fields(report, ctx.obj.format, title=f"k = {k}, p = {p}, K = {K}")

    @app.command("density-bound")
    def density_bound_cmd(
        ctx: typer.Context,
        curve: Optional[str] = typer.Option(None, "--curve", help="Read the conductor decomposition from a curve."),
        n_split: int = typer.Option(1, "--split"),
        n_nonsplit: int = typer.Option(1, "--nonsplit"),
        n_add: int = typer.Option(1, "--add"),
        side: Side = typer.Option(Side.REAL, "--side"),
        dl: Optional[int] = typer.Option(None, "--dl", help="Fix the auxiliary field L and bound its twist family."),
    ):
        """Exact lower bound on the proportion of twists, with its factors."""
        if curve:
            n_split, n_nonsplit, n_add = conductor_decomposition(get_curve(curve, ctx.obj.data))
        if dl is None:
            bound = real_twist_bound(n_split, n_nonsplit, n_add, side)
            title = f"({n_split}, {n_nonsplit}, {n_add}), {side.value} side: {bound.value}"
        else:
            bound = twist_theorem_bound(n_split, n_nonsplit, n_add, dl)
            title = f"({n_split}, {n_nonsplit}, {n_add}), D_L = {dl}: {bound.value}"
        if ctx.obj.format == "json":
            emit(bound, "json")
        else:
            rows = [{"factor": t.label, "value": str(t.value)} for t in bound.formula_terms]
            rows.append({"factor": "total", "value": str(bound.value)})
            emit(rows, ctx.obj.format, title=title)

    @app.command("twist-scan")
    def twist_scan_cmd(
        ctx: typer.Context,
        curve: str = typer.Option(..., "--curve"),
        X: int = typer.Option(..., "--X", help="Bound on |D|."),
        branch: Side = typer.Option(Side.REAL, "--branch"),
        workers: int = typer.Option(settings.WORKERS, "--workers"),
        block_size: int = typer.Option(settings.SCAN_BLOCK_SIZE, "--block-size"),
        lenient: bool = typer.Option(False, "--lenient", help="Allow ramification at multiplicative primes."),
        out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here."),
    ):
        """Scan fundamental discriminants for auxiliary fields L."""
        report = twist_scan(get_curve(curve, ctx.obj.data), X, branch, workers, block_size, lenient)
        if out:
            out.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
            logger.info(f"Wrote twist scan report to {out}")
        if ctx.obj.format == "json":
            emit(report, "json")
            return
        emit(
            {
                "curve": report.curve, "branch": report.branch.value, "X": report.X,
                "bound": str(report.bound), "verified": len(report.verified),
                "total": report.total, "empirical": str(report.empirical),
            },
            ctx.obj.format,
            title="Twist scan",
        )

    @app.command("heegner-scan")
    def heegner_scan_cmd(
        ctx: typer.Context,
        curve: str = typer.Option(..., "--curve"),
        dl: int = typer.Option(..., "--dl", help="Discriminant of the twisting field L."),
        X: int = typer.Option(200, "--X"),
        p: int = typer.Option(3, "--p"),
    ):
        """Odd D_K for which the criterion holds for curve (x) eps_L."""
        found = heegner_field_scan(get_curve(curve, ctx.obj.data), dl, X, p)
        emit([{"D_K": d} for d in found], ctx.obj.format, columns=("D_K",), title=f"K for D_L = {dl}")
