"""Error types for qecc-workbench.

Every error carries a stable ``code`` used in the CLI's machine-readable
failure line. Each class also derives from the builtin a caller would
naturally catch, so ``except ValueError`` keeps working.
"""


class QeccError(Exception):
    """Base class for all workbench errors."""

    code = "error"


class SizeMismatchError(QeccError, ValueError):
    """Two operators (or an operator and a code) disagree on qubit count."""

    code = "size-mismatch"


class UnknownCodeError(QeccError, KeyError):
    """A code name is not in the catalog."""

    code = "not-found"

    def __str__(self) -> str:
        # KeyError quotes its argument; keep the message readable
        return str(self.args[0]) if self.args else self.code


class CatalogFormatError(QeccError, ValueError):
    """The catalog text file could not be parsed."""

    code = "catalog-format"


class InvalidNoiseError(QeccError, ValueError):
    """Noise parameters are outside their valid range."""

    code = "invalid-noise"


class SyndromeMismatchError(QeccError, ValueError):
    """An error and its reference correction have different syndromes."""

    code = "syndrome-mismatch"


class MissingGaugeError(QeccError, ValueError):
    """A gauge operation was requested on a code without gauge structure."""

    code = "missing-gauge"


class CapacityError(QeccError, MemoryError):
    """A build would exceed the configured resource limit."""

    code = "capacity"


class TableFormatError(QeccError, ValueError):
    """Base class for decoder-table file problems."""

    code = "table-format"


class TableVersionError(TableFormatError):
    """The table file was written by an unsupported format version."""

    code = "version-mismatch"


class TableHashError(TableFormatError):
    """The table was built for a different code."""

    code = "hash-mismatch"


class CorruptTableError(TableFormatError):
    """The table file is truncated or malformed."""

    code = "corrupt-file"


class NoCrossingError(QeccError, ValueError):
    """Bisection bracket does not contain a sign change."""

    code = "no-sign-change"
