"""
Curve dataset: CSV rows ``label,a1,a2,a3,a4,a6,N``.

The built-in table is always available; a file named by ``EISRANK_DATA`` (or passed
explicitly) is merged over it, so a user row may replace a built-in label.
"""
import csv
import io
import logging
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

from eisrank.core.config import settings
from eisrank.core.exceptions import DatasetError
from eisrank.services.ellcurve import CurveQ

logger = logging.getLogger(__name__)

BUILTIN_CSV = """\
# label,a1,a2,a3,a4,a6,N
19a1,0,1,1,-9,-15,19
11a1,0,-1,1,-10,-20,11
14a1,1,0,1,4,-6,14
37a1,0,0,1,-1,0,37
"""

FIELDS = ("label", "a1", "a2", "a3", "a4", "a6", "N")


def _parse_rows(lines: Iterable[str]) -> Dict[str, CurveQ]:
    curves: Dict[str, CurveQ] = {}
    for line_no, row in enumerate(csv.reader(lines), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != len(FIELDS):
            raise DatasetError(f"expected {len(FIELDS)} fields, got {len(row)}", line=line_no)
        label = row[0].strip()
        try:
            a1, a2, a3, a4, a6, N = (int(v) for v in row[1:])
        except ValueError as e:
            raise DatasetError(f"non-integer coefficient in {row[1:]}", line=line_no) from e
        if label in curves:
            raise DatasetError(f"duplicate label {label}", line=line_no)
        try:
            curves[label] = CurveQ(a1=a1, a2=a2, a3=a3, a4=a4, a6=a6, N=N, label=label)
        except ValueError as e:
            raise DatasetError(f"invalid curve {label}: {str(e)}", line=line_no) from e
    return curves


def ingest_curves(path: Union[str, Path]) -> Dict[str, CurveQ]:
    """Read a curve CSV file; comment lines start with ``#``."""
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"curve file {path} does not exist")
    with open(path, newline="", encoding="utf-8") as f:
        curves = _parse_rows(f)
    logger.info(f"Loaded {len(curves)} curves from {path}")
    return curves


def load_curves(path: Optional[Union[str, Path]] = None) -> Dict[str, CurveQ]:
    curves = _parse_rows(io.StringIO(BUILTIN_CSV))
    path = path or settings.EISRANK_DATA
    if path:
        curves.update(ingest_curves(path))
    return curves


def get_curve(label: str, path: Optional[Union[str, Path]] = None) -> CurveQ:
    curves = load_curves(path)
    if label not in curves:
        raise DatasetError(f"unknown curve label {label}; known: {', '.join(sorted(curves))}")
    return curves[label]
