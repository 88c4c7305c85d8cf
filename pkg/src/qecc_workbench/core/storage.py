"""Decoder-table persistence: text format and a content-addressed cache."""

import gzip
import os
import tempfile
from pathlib import Path
from typing import IO, Iterator, List, Optional

import numpy as np

from .catalog import StabilizerCode, get_code
from .decoder import DecoderTable, build_decoder_table, table_profiles
from .errors import CorruptTableError, TableHashError, TableVersionError
from .models import BuildConfig, LogicalClass, LogLevel, LogSink, emit
from .pauli import WeightProfile

TABLE_HEADER = "qecc-table v1"


def _open(path: Path, mode: str) -> IO[str]:
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8")  # type: ignore[return-value]
    return open(path, mode, encoding="utf-8")


def format_table(table: DecoderTable) -> Iterator[str]:
    """Lines of the table file, newline-terminated."""
    code = table.code
    yield f"{TABLE_HEADER}\n"
    yield f"code {code.name} {table.code_hash}\n"
    yield f"n_max {table.n_max}\n"
    for s, (x_mask, z_mask) in enumerate(table.cstar):
        yield f"cstar s={s:x} x={int(x_mask):x} z={int(z_mask):x}\n"
    entries = 0
    for s, l, k in zip(*np.nonzero(table.counts)):
        profile = table.profiles[k]
        yield (
            f"s={s:x} l={LogicalClass(int(l)).name} nx={profile.n_x} "
            f"ny={profile.n_y} nz={profile.n_z} count={int(table.counts[s, l, k])}\n"
        )
        entries += 1
    yield f"end {entries}\n"


def save_table(table: DecoderTable, path: Path) -> Path:
    """Write a table atomically; a ``.gz`` suffix selects gzip compression."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    os.close(fd)
    tmp_path = Path(tmp_name)
    try:
        with _open(tmp_path, "w") as handle:
            handle.writelines(format_table(table))
        os.replace(tmp_path, path)
    finally:
        if tmp_path.exists():
            tmp_path.unlink()
    return path


def _field(token: str, name: str) -> str:
    key, sep, value = token.partition("=")
    if key != name or not sep:
        raise ValueError(f"expected {name}=..., got {token!r}")
    return value


def parse_table(lines: List[str], code: Optional[StabilizerCode] = None) -> DecoderTable:
    """Rebuild a table from its text lines.

    Args:
        lines: file content split into lines
        code: the code the caller expects; looked up by name when omitted

    Raises:
        TableVersionError: unsupported header
        TableHashError: the table belongs to a different code definition
        CorruptTableError: truncated or malformed content
    """
    if not lines:
        raise CorruptTableError("Table file is empty")
    header = lines[0].strip()
    if header != TABLE_HEADER:
        if header.startswith("qecc-table"):
            raise TableVersionError(f"Unsupported table format '{header}'")
        raise CorruptTableError("Missing table header")

    try:
        _, name, code_hash = lines[1].split()
        n_max = int(lines[2].split()[1])
    except (IndexError, ValueError) as e:
        raise CorruptTableError(f"Malformed table preamble: {e}")
    if code is None:
        code = get_code(name)
    if code_hash != code.content_hash:
        raise TableHashError(
            f"Table was built for {name} ({code_hash[:12]}), not {code.name} "
            f"({code.content_hash[:12]})"
        )

    try:
        n_syndromes = 1 << code.n_stabilizers
        profiles = table_profiles(code.n_qubits, n_max)
        key_of = {profile: k for k, profile in enumerate(profiles)}
        cstar = np.full((n_syndromes, 2), -1, dtype=np.int64)
        counts = np.zeros((n_syndromes, 4, len(profiles)), dtype=np.int64)

        entries = 0
        ended = False
        for line in lines[3:]:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "cstar":
                s = int(_field(parts[1], "s"), 16)
                cstar[s] = (int(_field(parts[2], "x"), 16), int(_field(parts[3], "z"), 16))
            elif parts[0] == "end":
                if int(parts[1]) != entries:
                    raise ValueError(f"expected {parts[1]} entries, read {entries}")
                ended = True
                break
            else:
                s = int(_field(parts[0], "s"), 16)
                logical = LogicalClass.from_label(_field(parts[1], "l"))
                profile = WeightProfile(
                    int(_field(parts[2], "nx")),
                    int(_field(parts[3], "ny")),
                    int(_field(parts[4], "nz")),
                )
                k = key_of[profile]
                counts[s, int(logical), k] = int(_field(parts[5], "count"))
                entries += 1
    except (IndexError, KeyError, ValueError) as e:
        raise CorruptTableError(f"Malformed table file: {e}")

    if not ended:
        raise CorruptTableError("Table file is truncated (no end marker)")
    if (cstar < 0).any():
        raise CorruptTableError("Table file lacks reference corrections")
    return DecoderTable(
        code=code,
        n_max=n_max,
        counts=counts,
        cstar=cstar,
        code_hash=code_hash,
        profiles=profiles,
    )


def load_table(path: Path, code: Optional[StabilizerCode] = None) -> DecoderTable:
    """Load a table saved by :func:`save_table`."""
    if not path.exists():
        raise FileNotFoundError(f"Table not found: {path}")
    try:
        with _open(path, "r") as handle:
            lines = handle.read().splitlines()
    except (OSError, EOFError) as e:
        raise CorruptTableError(f"Cannot read table {path}: {e}")
    return parse_table(lines, code)


class TableStore:
    """Content-addressed cache of decoder tables keyed by code hash and n_max."""

    def __init__(self, store_path: Path):
        """Initialize table store.

        Args:
            store_path: Directory holding the cached table files
        """
        self.store_path = store_path
        self.store_path.mkdir(parents=True, exist_ok=True)

    def path_for(self, code: StabilizerCode, n_max: int) -> Path:
        return self.store_path / f"{code.content_hash}-n{n_max}.table.gz"

    def get(self, code: StabilizerCode, n_max: int) -> Optional[DecoderTable]:
        """Cached table, or None when absent or unreadable."""
        path = self.path_for(code, n_max)
        if not path.exists():
            return None
        try:
            return load_table(path, code)
        except (CorruptTableError, TableVersionError):
            return None

    def put(self, table: DecoderTable) -> Path:
        return save_table(table, self.path_for(table.code, table.n_max))

    def get_or_build(
        self,
        code: StabilizerCode,
        cfg: Optional[BuildConfig] = None,
        log: Optional[LogSink] = None,
    ) -> DecoderTable:
        """Load the cached table for ``code`` or build and cache it."""
        cfg = cfg or BuildConfig()
        n_max = code.n_qubits if cfg.n_max is None else cfg.n_max
        table = self.get(code, n_max)
        if table is not None:
            emit(log, LogLevel.DEBUG, f"Loaded cached table for {code.name}", n_max=n_max)
            return table
        table = build_decoder_table(code, cfg, log)
        path = self.put(table)
        emit(log, LogLevel.INFO, f"Cached table for {code.name}", path=str(path))
        return table

    def list_tables(self) -> List[Path]:
        return sorted(self.store_path.glob("*.table*"))

    def clear(self) -> int:
        """Delete every cached table; returns how many were removed."""
        removed = 0
        for path in self.list_tables():
            path.unlink()
            removed += 1
        return removed
