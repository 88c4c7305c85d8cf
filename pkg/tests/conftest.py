"""Shared fixtures: the three-qubit repetition code and cached decoder tables."""

from typing import Callable, Dict, Optional, Tuple

import pytest

from qecc_workbench.core.catalog import StabilizerCode, get_code, parse_catalog, register_code
from qecc_workbench.core.decoder import DecoderTable, build_decoder_table
from qecc_workbench.core.models import BuildConfig

REP3_CATALOG = """qecc-catalog v1
# bit-flip repetition code: Z0Z1, Z1Z2; logical X = XXX
code REP3 3
S 0 3
S 0 6
LX 7 0
LZ 0 1
"""


@pytest.fixture(scope="session")
def rep3() -> StabilizerCode:
    code = parse_catalog(REP3_CATALOG)["REP3"]
    register_code(code, replace=True)
    return code


@pytest.fixture(scope="session")
def table_for(rep3: StabilizerCode) -> Callable[..., DecoderTable]:
    """Build tables once per session, keyed by (code name, n_max)."""
    cache: Dict[Tuple[str, Optional[int]], DecoderTable] = {}

    def build(name: str, n_max: Optional[int] = None) -> DecoderTable:
        key = (name, n_max)
        if key not in cache:
            cache[key] = build_decoder_table(get_code(name), BuildConfig(n_max=n_max))
        return cache[key]

    return build
