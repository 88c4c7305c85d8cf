"""qecc-workbench - exact decoding performance of small stabilizer codes."""

try:
    from ._version import version as __version__
except ImportError:
    __version__ = "0.1.0"

from .core.catalog import StabilizerCode, get_code, list_codes
from .core.decoder import DecoderTable, build_decoder_table, evaluate
from .core.models import NoiseKind, NoiseModel

__all__ = [
    "DecoderTable",
    "NoiseKind",
    "NoiseModel",
    "StabilizerCode",
    "build_decoder_table",
    "evaluate",
    "get_code",
    "list_codes",
]
