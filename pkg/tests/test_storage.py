"""Tests for table persistence and the table cache."""

import gzip
import tempfile
from pathlib import Path

import pytest

from qecc_workbench.core.catalog import get_code
from qecc_workbench.core.errors import CorruptTableError, TableHashError, TableVersionError
from qecc_workbench.core.models import BuildConfig
from qecc_workbench.core.storage import (
    TABLE_HEADER,
    TableStore,
    format_table,
    load_table,
    parse_table,
    save_table,
)


@pytest.mark.parametrize("filename", ["s5.table", "s5.table.gz"])
def test_save_load_round_trip(table_for, filename):
    table = table_for("S5")
    with tempfile.TemporaryDirectory() as temp_dir:
        path = save_table(table, Path(temp_dir) / filename)
        loaded = load_table(path)

    assert loaded == table
    assert loaded.code_hash == table.code_hash
    assert loaded.n_max == table.n_max


def test_gzip_is_really_compressed(table_for):
    with tempfile.TemporaryDirectory() as temp_dir:
        path = save_table(table_for("REP3"), Path(temp_dir) / "rep3.table.gz")
        with gzip.open(path, "rt") as handle:
            assert handle.readline().strip() == TABLE_HEADER


def test_truncated_table_round_trip(table_for):
    table = table_for("S9", 2)
    loaded = parse_table(list(format_table(table)))

    assert loaded == table
    assert not loaded.exact


def test_table_file_layout(table_for):
    lines = [line.rstrip("\n") for line in format_table(table_for("REP3"))]

    assert lines[0] == TABLE_HEADER
    assert lines[1].startswith("code REP3 ")
    assert lines[2] == "n_max 3"
    assert "cstar s=1 x=1 z=0" in lines
    assert "s=0 l=I nx=0 ny=0 nz=2 count=3" in lines
    assert lines[-1].startswith("end ")


def test_wrong_code_is_rejected(table_for):
    lines = list(format_table(table_for("S5")))

    with pytest.raises(TableHashError):
        parse_table(lines, get_code("S6"))


def test_version_mismatch(table_for):
    lines = list(format_table(table_for("REP3")))
    lines[0] = "qecc-table v2\n"

    with pytest.raises(TableVersionError):
        parse_table(lines)


@pytest.mark.parametrize("cut", [1, 3, -1])
def test_truncated_file_is_corrupt(table_for, cut):
    lines = list(format_table(table_for("REP3")))

    with pytest.raises(CorruptTableError):
        parse_table(lines[:cut])


def test_garbage_entry_is_corrupt(table_for):
    lines = list(format_table(table_for("REP3")))
    lines.insert(-1, "s=0 l=Q nx=0 ny=0 nz=0 count=1\n")

    with pytest.raises(CorruptTableError):
        parse_table(lines)


def test_format_errors_are_value_errors():
    with pytest.raises(ValueError):
        parse_table([])


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_table(Path("/nonexistent/table.gz"))


def test_store_builds_once(rep3):
    with tempfile.TemporaryDirectory() as temp_dir:
        store = TableStore(Path(temp_dir) / "tables")
        records = []

        first = store.get_or_build(rep3, BuildConfig(), records.append)
        assert store.path_for(rep3, 3).exists()
        built_messages = [r.message for r in records]

        records.clear()
        second = store.get_or_build(rep3, BuildConfig(), records.append)

        assert first == second
        assert any("Building" in m for m in built_messages)
        assert not any("Building" in m for m in (r.message for r in records))
        assert len(store.list_tables()) == 1
        assert store.clear() == 1
        assert store.get(rep3, 3) is None


def test_store_keys_by_truncation(rep3):
    with tempfile.TemporaryDirectory() as temp_dir:
        store = TableStore(Path(temp_dir))
        store.get_or_build(rep3, BuildConfig(n_max=1))
        store.get_or_build(rep3, BuildConfig())

        assert len(store.list_tables()) == 2
        assert store.get(rep3, 1).n_max == 1


def test_store_ignores_corrupt_cache(rep3):
    with tempfile.TemporaryDirectory() as temp_dir:
        store = TableStore(Path(temp_dir))
        path = store.path_for(rep3, 3)
        with gzip.open(path, "wt") as handle:
            handle.write(TABLE_HEADER + "\n")

        assert store.get(rep3, 3) is None
        assert store.get_or_build(rep3).exact
