import sys
import tempfile
import unittest
from os import path
from unittest.mock import Mock, patch

import numpy as np

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from src.output import CsvSink, ResultTable, render_csv

TABLE = ResultTable(
    columns=["record", "mu", "value"],
    rows=[
        ["curve", 0.1, None],
        ["curve", np.float64(1.0) / 3.0, None],
        ["passes", None, True],
        ["pair:s0-s2", None, "favored"],
        ["note, quoted", None, 1e-20],
        ["votes_for", None, np.int64(2)],
    ],
)


class TestResultTable(unittest.TestCase):
    def test_column(self):
        self.assertEqual(TABLE.column("record")[:2], ["curve", "curve"])

    def test_summary(self):
        self.assertIs(TABLE.summary("passes"), True)
        with self.assertRaises(KeyError):
            TABLE.summary("mu_W")


def test_render_csv():
    expected = (
        "record,mu,value\r\n"
        "curve,0.1,\r\n"
        "curve,0.333333333333,\r\n"
        "passes,,1\r\n"
        "pair:s0-s2,,favored\r\n"
        '"note, quoted",,1e-20\r\n'
        "votes_for,,2\r\n"
    )
    assert render_csv(TABLE) == expected


def test_render_csv_is_deterministic():
    assert render_csv(TABLE) == render_csv(TABLE)


def test_write_to_stdout(capsys):
    CsvSink().write_table(TABLE)
    assert capsys.readouterr().out == render_csv(TABLE)


def test_write_to_file(tmp_path):
    target = tmp_path / "table.csv"
    target.write_text("stale")
    CsvSink(str(target)).write_table(TABLE)
    with open(target, "r", encoding="utf-8", newline="") as file:
        assert file.read() == render_csv(TABLE)
    assert [p.name for p in tmp_path.iterdir()] == ["table.csv"]


def test_failed_rename_leaves_target_untouched(tmp_path):
    target = tmp_path / "table.csv"
    target.write_text("previous")
    with patch("src.output.os.replace", side_effect=OSError("disk full")):
        try:
            CsvSink(str(target)).write_table(TABLE)
        except OSError as e:
            assert str(e) == "disk full"
            assert target.read_text() == "previous"
            assert [p.name for p in tmp_path.iterdir()] == ["table.csv"]
            return

    assert False, "Expected OSError, but it was not raised"


def test_failed_write_removes_temporary_file(tmp_path):
    target = tmp_path / "table.csv"
    target.write_text("previous")
    real = tempfile.NamedTemporaryFile

    def failing_file(*args, **kwargs):
        handle = real(*args, **kwargs)
        handle.write = Mock(side_effect=OSError("no space left"))
        return handle

    with patch("src.output.NamedTemporaryFile", side_effect=failing_file):
        try:
            CsvSink(str(target)).write_table(TABLE)
        except OSError as e:
            assert str(e) == "no space left"
            assert target.read_text() == "previous"
            assert [p.name for p in tmp_path.iterdir()] == ["table.csv"]
            return

    assert False, "Expected OSError, but it was not raised"
