"""
Rendering of command results as a rich table, JSON or CSV on stdout.
"""
import csv
import json
import sys
from typing import Any, Dict, List, Optional, Sequence, Union

import typer
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from eisrank.core.config import settings

Payload = Union[BaseModel, Sequence[BaseModel], Dict[str, Any], Sequence[Dict[str, Any]]]


class RunConfig(BaseModel):
    """Global flags of one invocation, set by the app callback and read by every command."""

    command: Optional[str] = None
    format: str = settings.OUTPUT_FORMAT
    data: Optional[str] = None
    prec: int = settings.DEFAULT_PREC
    verbose: bool = False


def _as_dict(item: Union[BaseModel, Dict[str, Any]]) -> Dict[str, Any]:
    return item.model_dump(mode="json") if isinstance(item, BaseModel) else dict(item)


def _rows(payload: Payload) -> List[Dict[str, Any]]:
    if isinstance(payload, (BaseModel, dict)):
        return [_as_dict(payload)]
    return [_as_dict(item) for item in payload]


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, separators=(",", ":"))
    return "" if value is None else str(value)


def _to_json(payload: Payload) -> str:
    if isinstance(payload, BaseModel):
        return payload.model_dump_json(indent=2)
    if isinstance(payload, dict):
        return json.dumps(payload, indent=2, default=str)
    return json.dumps([_as_dict(item) for item in payload], indent=2, default=str)


def emit(
    payload: Payload,
    fmt: str,
    columns: Optional[Sequence[str]] = None,
    title: Optional[str] = None,
) -> None:
    """Write a result in the requested format.

    Args:
        payload: A report model, a list of models, or plain dict rows.
        fmt: ``plain``, ``json`` or ``csv``.
        columns: Fields shown in plain and CSV output; defaults to every field.
        title: Caption for the plain table.
    """
    if fmt not in settings.OUTPUT_FORMATS:
        raise typer.BadParameter(f"unknown format {fmt!r}; choose from {sorted(settings.OUTPUT_FORMATS)}")
    if fmt == "json":
        typer.echo(_to_json(payload))
        return

    rows = _rows(payload)
    fields = list(columns) if columns else list(rows[0].keys()) if rows else []
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_cell(row.get(f)) for f in fields])
        sys.stdout.flush()
        return

    table = Table(title=title)
    for f in fields:
        table.add_column(f)
    for row in rows:
        table.add_row(*(_cell(row.get(f)) for f in fields))
    Console(soft_wrap=True).print(table)


def emit_fields(payload: BaseModel, fmt: str, title: Optional[str] = None) -> None:
    """Single report: JSON as is, plain and CSV as a field/value listing."""
    if fmt == "json":
        emit(payload, fmt)
        return
    rows = [{"field": k, "value": _cell(v)} for k, v in payload.model_dump(mode="json").items()]
    emit(rows, fmt, columns=("field", "value"), title=title)
