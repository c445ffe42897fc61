import csv
import io
import math
from pathlib import Path

from .errors import MalformedRow


def _as_text(source) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        # strings containing a newline are CSV content, anything else a path
        if "\n" in source:
            return source
        return Path(source).read_text(encoding="utf-8")
    return source.read()


def read_columns(source, header: tuple[str, ...], with_lines: bool = False) -> list:
    """Parse a headered all-numeric CSV. Line numbers in errors are 1-based.

    With ``with_lines`` each row is returned as ``(lineno, values)``.
    """
    text = _as_text(source)
    reader = csv.reader(io.StringIO(text))
    rows = []
    for lineno, row in enumerate(reader, start=1):
        if lineno == 1:
            if tuple(c.strip() for c in row) != header:
                raise MalformedRow(1, f"expected header {','.join(header)!r}")
            continue
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(lineno, f"expected {len(header)} columns, got {len(row)}")
        try:
            values = tuple(float(c) for c in row)
        except ValueError:
            raise MalformedRow(lineno, f"non-numeric field in {','.join(row)!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise MalformedRow(lineno, "non-finite value")
        rows.append((lineno, values) if with_lines else values)
    if not rows and text.strip() == "":
        raise MalformedRow(1, "empty file")
    return rows


def write_columns(header: tuple[str, ...], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
