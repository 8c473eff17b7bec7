"""
CSV writer for command output.

One header line, `#` comment lines for provenance and warnings, floats in
shortest round-trip form unless a fixed number of significant digits is
requested. Missing values are written as empty fields.
"""

import csv
import math
from typing import IO, Iterable, Optional, Sequence

from . import __version__


def format_number(value, precision: Optional[int] = None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if precision is None or not math.isfinite(value):
        return repr(value)
    return f"{value:.{precision}g}"


class CsvReport:
    """Streams rows for one command.

    Args:
        stream: Text stream (stdout or an open file)
        precision: Significant digits, or None for full round-trip precision
    """

    def __init__(self, stream: IO[str], precision: Optional[int] = None):
        self.stream = stream
        self.precision = precision
        self._writer = csv.writer(stream, lineterminator="\n")
        self._columns: Optional[Sequence[str]] = None

    def comment(self, text: str) -> None:
        for line in str(text).splitlines() or [""]:
            self.stream.write(f"# {line}\n")

    def provenance(self, command: str, config_hash: Optional[str] = None,
                   warnings: Iterable[str] = ()) -> None:
        self.comment(f"bbfriction {__version__} {command}")
        if config_hash:
            self.comment(f"config_hash: {config_hash}")
        for message in warnings:
            self.comment(f"warning: {message}")

    def header(self, columns: Sequence[str]) -> None:
        if self._columns is not None:
            raise RuntimeError("header already written")
        self._columns = list(columns)
        self._writer.writerow(self._columns)

    def row(self, values: Sequence) -> None:
        if self._columns is None:
            raise RuntimeError("write the header first")
        if len(values) != len(self._columns):
            raise ValueError(f"expected {len(self._columns)} values, got {len(values)}")
        self._writer.writerow([format_number(v, self.precision) for v in values])
