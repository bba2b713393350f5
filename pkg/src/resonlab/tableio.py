"""Deterministic table serialization helpers.

All CSV output funnels through these formatters so identical runs produce
byte-identical files: floats use the shortest round-trip representation,
column order is always explicit, newlines are '\n'.
"""

import os
import tempfile


def format_float(x) -> str:
    """Shortest representation that round-trips a float64."""
    return repr(float(x))


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def csv_line(cells) -> str:
    return ",".join(format_cell(c) for c in cells)


def write_atomic(path, data: str):
    """Write text via a temp file + rename so readers never see partials."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
