"""Commands reproducing the worked examples."""
import typer

from eisrank.cli.output import emit
from eisrank.services.heegner import ramanujan_table
from eisrank.services.regression import run_examples


def register(app: typer.Typer) -> None:
    @app.command("ramanujan-table")
    def ramanujan_table_cmd(ctx: typer.Context):
        """B_{6,psi0} B_{1,psi0 eps_K omega^-6} mod 691 for the four built-in pairs."""
        emit(ramanujan_table(), ctx.obj.format, title="Weight 12, p = 691")

    @app.command("paper-examples")
    def worked_examples_cmd(ctx: typer.Context):
        """Run every worked example; exit 1 if any non-informational row fails."""
        report = run_examples()
        if ctx.obj.format == "json":
            emit(report, "json")
        else:
            emit(
                report.checks, ctx.obj.format,
                columns=("name", "expected", "actual", "passed", "informational"),
                title=f"{len(report.checks)} examples, {len(report.failures)} failures",
            )
        if not report.passed:
            raise typer.Exit(code=1)
