"""CSV emission with a fixed, locale-independent number format."""
from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

__all__ = ["emit_table", "format_cell"]


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    try:
        import numpy as np

        if isinstance(v, np.integer):
            return str(int(v))
        if isinstance(v, np.floating):
            return format_cell(float(v))
        if isinstance(v, np.bool_):
            return format_cell(bool(v))
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def emit_table(rows: Iterable, columns: Sequence[str], path=None) -> str:
    """Render rows (dicts or sequences) as CSV with a header row.

    Floats use 17 significant digits so values round-trip exactly; records
    end in CRLF.  Output must be ASCII.  When ``path`` is given the text is
    also written there.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(list(columns))
    for row in rows:
        if isinstance(row, dict):
            vals = [row.get(c) for c in columns]
        else:
            vals = list(row)
            if len(vals) != len(columns):
                raise ValueError(f"row has {len(vals)} fields, header has {len(columns)}")
        w.writerow([format_cell(v) for v in vals])
    text = buf.getvalue()
    try:
        text.encode("ascii")
    except UnicodeEncodeError as exc:
        raise ValueError(f"table contains non-ASCII text: {exc}") from None
    if path is not None:
        try:
            with open(path, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write table to {path}: {exc.strerror or exc}") from exc
    return text
