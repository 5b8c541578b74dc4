"""CSV output of result tables."""
import csv
import dataclasses
import io
import os
import sys
from tempfile import NamedTemporaryFile
from typing import List, Optional

from src.helpers import Cell, format_number
from src.logger import init_logger

logger = init_logger()

Row = List[Cell]


@dataclasses.dataclass
class ResultTable:
    """Header and rows of a scenario result, in emission order."""

    columns: List[str]
    rows: List[Row]

    def column(self, name: str) -> List[Cell]:
        """All cells of one column."""
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def summary(self, record: str) -> Cell:
        """
        Value of a named summary row.

        :param record: Entry of the ``record`` column.
        :type record: str
        :raises KeyError: If no row carries that record.
        :return: The row's ``value`` cell.
        :rtype: Cell
        """
        records = self.column("record")
        value_index = self.columns.index("value")
        for name, row in zip(records, self.rows):
            if name == record:
                return row[value_index]
        raise KeyError(record)


def render_csv(table: ResultTable) -> str:
    """
    Render a table as CSV text.

    Cells go through ``format_number``; quoting is minimal and lines end in CRLF.

    :param table: The table.
    :type table: ResultTable
    :return: Header line followed by one line per row.
    :rtype: str
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_number(cell) for cell in row])
    return buffer.getvalue()


class CsvSink:
    """Write result tables to standard output or atomically to a file."""

    def __init__(self, out_path: Optional[str] = None):
        """
        Initialize the CsvSink instance.

        :param out_path: Target file (default is None - standard output).
        :type out_path: Optional[str]
        """
        self.out_path = out_path

    def write_table(self, table: ResultTable) -> None:
        """
        Emit a table.

        A file target is written to a temporary file in the same directory and
        renamed over the target, so readers never see a partial table.

        :param table: The table.
        :type table: ResultTable
        """
        text = render_csv(table)
        if self.out_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return

        directory = os.path.dirname(os.path.abspath(self.out_path))
        handle = NamedTemporaryFile(
            "w", encoding="utf-8", newline="", dir=directory, suffix=".tmp", delete=False
        )
        try:
            with handle:
                handle.write(text)
            os.replace(handle.name, self.out_path)
        except BaseException:
            if os.path.exists(handle.name):
                os.unlink(handle.name)
            raise
        logger.info("Wrote %d rows to %s", len(table.rows), self.out_path)
