"""Code catalog: parsing, validation and structural queries."""

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import CatalogFormatError, MissingGaugeError, SizeMismatchError, UnknownCodeError
from .models import LogicalClass, ValidationReport
from .pauli import (
    PauliOperator,
    commutation_table,
    enumerate_errors,
    symplectic_product,
    symplectic_rank,
)

CATALOG_HEADER = "qecc-catalog v1"
BUNDLED_CATALOG = Path(__file__).resolve().parent.parent / "data" / "catalog.txt"

Pair = Tuple[int, int]


@dataclass(frozen=True)
class GaugeStructure:
    """Gauge generators and, per stabilizer, the gauge pairs multiplying to it."""

    gauge_generators: Tuple[PauliOperator, ...]
    stabilizer_pairs: Tuple[Tuple[Pair, ...], ...]

    @property
    def n_gauges(self) -> int:
        return len(self.gauge_generators)


@dataclass(frozen=True)
class StabilizerCode:
    """A stabilizer (or subsystem) code encoding one logical qubit."""

    name: str
    n_qubits: int
    stabilizer_generators: Tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    gauge: Optional[GaugeStructure] = None

    @property
    def n_stabilizers(self) -> int:
        return len(self.stabilizer_generators)

    @property
    def content_hash(self) -> str:
        """SHA-256 of the code's canonical catalog text, name excluded."""
        body = "\n".join([f"n {self.n_qubits}"] + _body_lines(self))
        return hashlib.sha256(body.encode("utf-8")).hexdigest()

    def __str__(self) -> str:
        return f"{self.name} [[{self.n_qubits},1]] with {self.n_stabilizers} stabilizers"


def _hex(mask: int) -> str:
    return format(mask, "x")


def _op_line(tag: str, op: PauliOperator) -> str:
    return f"{tag} {_hex(op.x_mask)} {_hex(op.z_mask)}"


def _body_lines(code: StabilizerCode) -> List[str]:
    lines = [_op_line("S", s) for s in code.stabilizer_generators]
    lines.append(_op_line("LX", code.logical_x))
    lines.append(_op_line("LZ", code.logical_z))
    if code.gauge is not None:
        lines.extend(_op_line("G", g) for g in code.gauge.gauge_generators)
        for k, pairs in enumerate(code.gauge.stabilizer_pairs):
            lines.extend(f"PAIR {k} {i} {j}" for i, j in pairs)
    return lines


def dump_catalog(codes: Iterable[StabilizerCode]) -> str:
    """Render codes in the catalog text format."""
    lines = [CATALOG_HEADER]
    for code in codes:
        lines.append("")
        lines.append(f"code {code.name} {code.n_qubits}")
        lines.extend(_body_lines(code))
    return "\n".join(lines) + "\n"


class _CodeBuilder:
    def __init__(self, name: str, n_qubits: int, line_no: int):
        self.name = name
        self.n_qubits = n_qubits
        self.line_no = line_no
        self.stabilizers: List[PauliOperator] = []
        self.logical_x: Optional[PauliOperator] = None
        self.logical_z: Optional[PauliOperator] = None
        self.gauges: List[PauliOperator] = []
        self.pairs: Dict[int, List[Pair]] = {}

    def build(self) -> StabilizerCode:
        if self.logical_x is None or self.logical_z is None:
            raise CatalogFormatError(
                f"Code {self.name} (line {self.line_no}) lacks LX or LZ"
            )
        gauge = None
        if self.gauges or self.pairs:
            for k in self.pairs:
                if not 0 <= k < len(self.stabilizers):
                    raise CatalogFormatError(
                        f"Code {self.name}: PAIR refers to stabilizer {k}"
                    )
            for i, j in (p for pairs in self.pairs.values() for p in pairs):
                if not (0 <= i < len(self.gauges) and 0 <= j < len(self.gauges)):
                    raise CatalogFormatError(
                        f"Code {self.name}: PAIR refers to gauge ({i}, {j})"
                    )
            gauge = GaugeStructure(
                gauge_generators=tuple(self.gauges),
                stabilizer_pairs=tuple(
                    tuple(self.pairs.get(k, ())) for k in range(len(self.stabilizers))
                ),
            )
        return StabilizerCode(
            name=self.name,
            n_qubits=self.n_qubits,
            stabilizer_generators=tuple(self.stabilizers),
            logical_x=self.logical_x,
            logical_z=self.logical_z,
            gauge=gauge,
        )


def parse_catalog(text: str) -> Dict[str, StabilizerCode]:
    """Parse catalog text into codes keyed by name, in file order.

    Raises:
        CatalogFormatError: on a bad header, unknown record or malformed mask
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != CATALOG_HEADER:
        raise CatalogFormatError(f"Catalog must start with '{CATALOG_HEADER}'")

    codes: Dict[str, StabilizerCode] = {}
    current: Optional[_CodeBuilder] = None

    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "code":
                if current is not None:
                    codes[current.name] = current.build()
                name, n_qubits = parts[1], int(parts[2])
                if len(parts) != 3:
                    raise ValueError("expected 'code <name> <n_qubits>'")
                if name in codes:
                    raise ValueError(f"duplicate code {name}")
                current = _CodeBuilder(name, n_qubits, line_no)
                continue
            if current is None:
                raise ValueError(f"'{tag}' before any 'code' line")
            if tag == "PAIR":
                k, i, j = (int(v) for v in parts[1:4])
                if len(parts) != 4:
                    raise ValueError("expected 'PAIR <stab> <i> <j>'")
                current.pairs.setdefault(k, []).append((i, j))
                continue
            if tag not in ("S", "LX", "LZ", "G") or len(parts) != 3:
                raise ValueError(f"unrecognised record '{line}'")
            op = PauliOperator(current.n_qubits, int(parts[1], 16), int(parts[2], 16))
        except (IndexError, ValueError) as e:
            raise CatalogFormatError(f"Catalog line {line_no}: {e}")

        if tag == "S":
            current.stabilizers.append(op)
        elif tag == "LX":
            current.logical_x = op
        elif tag == "LZ":
            current.logical_z = op
        else:
            current.gauges.append(op)

    if current is not None:
        codes[current.name] = current.build()
    return codes


def load_catalog(path: Path) -> Dict[str, StabilizerCode]:
    """Load a catalog file."""
    if not path.exists():
        raise FileNotFoundError(f"Catalog not found: {path}")
    return parse_catalog(path.read_text(encoding="utf-8"))


_registry: Optional[Dict[str, StabilizerCode]] = None


def _codes() -> Dict[str, StabilizerCode]:
    global _registry
    if _registry is None:
        _registry = load_catalog(BUNDLED_CATALOG)
    return _registry


def register_code(code: StabilizerCode, replace: bool = False) -> None:
    """Add a custom code to the in-process catalog."""
    codes = _codes()
    if code.name in codes and not replace:
        raise ValueError(f"Code {code.name} is already registered")
    codes[code.name] = code


def list_codes() -> List[str]:
    return list(_codes())


def get_code(name: str) -> StabilizerCode:
    """Look up a code by name.

    Raises:
        UnknownCodeError: if the name is neither bundled nor registered
    """
    try:
        return _codes()[name]
    except KeyError:
        raise UnknownCodeError(f"Unknown code: {name}")


def is_css(code: StabilizerCode) -> bool:
    """True when every generator is purely X-type or purely Z-type."""
    return all(s.x_mask == 0 or s.z_mask == 0 for s in code.stabilizer_generators)


def swap_xz(code: StabilizerCode) -> StabilizerCode:
    """The code with X and Z exchanged on every qubit."""
    gauge = None
    if code.gauge is not None:
        gauge = GaugeStructure(
            gauge_generators=tuple(g.swap_xz() for g in code.gauge.gauge_generators),
            stabilizer_pairs=code.gauge.stabilizer_pairs,
        )
    return StabilizerCode(
        name=f"{code.name}-swapped",
        n_qubits=code.n_qubits,
        stabilizer_generators=tuple(s.swap_xz() for s in code.stabilizer_generators),
        logical_x=code.logical_z.swap_xz(),
        logical_z=code.logical_x.swap_xz(),
        gauge=gauge,
    )


def gauge_qubits(code: StabilizerCode) -> int:
    """Number of gauge qubits (zero for plain stabilizer codes)."""
    if code.gauge is None:
        return 0
    rank = symplectic_rank(
        list(code.gauge.gauge_generators) + list(code.stabilizer_generators)
    )
    return (rank - symplectic_rank(code.stabilizer_generators)) // 2


def code_dimension(code: StabilizerCode) -> int:
    """Number of encoded logical qubits."""
    return code.n_qubits - code.n_stabilizers - gauge_qubits(code)


def validate_code(code: StabilizerCode) -> ValidationReport:
    """Run every structural check and report the ones that fail."""
    report = ValidationReport(code=code.name)

    def check(name: str, passed: bool) -> None:
        report.checks.append(name)
        if not passed:
            report.failures.append(name)

    ops = list(code.stabilizer_generators) + [code.logical_x, code.logical_z]
    if code.gauge is not None:
        ops.extend(code.gauge.gauge_generators)
    sizes_ok = all(op.n_qubits == code.n_qubits for op in ops)
    check("operator-sizes", sizes_ok)
    if not sizes_ok:
        return report

    gens = code.stabilizer_generators
    check(
        "stabilizers-commute",
        all(
            symplectic_product(a, b) == 0
            for i, a in enumerate(gens)
            for b in gens[i + 1 :]
        ),
    )
    check("stabilizers-independent", symplectic_rank(gens) == len(gens))
    check(
        "logicals-commute-with-stabilizers",
        all(
            symplectic_product(s, code.logical_x) == 0
            and symplectic_product(s, code.logical_z) == 0
            for s in gens
        ),
    )
    check(
        "logicals-anticommute",
        symplectic_product(code.logical_x, code.logical_z) == 1,
    )
    check(
        "logicals-outside-stabilizer-group",
        symplectic_rank(list(gens) + [code.logical_x]) == len(gens) + 1
        and symplectic_rank(list(gens) + [code.logical_z]) == len(gens) + 1,
    )

    if code.gauge is not None:
        check("gauge-pairs-present", all(len(p) > 0 for p in code.gauge.stabilizer_pairs))
        pairs_ok = True
        for k, pairs in enumerate(code.gauge.stabilizer_pairs):
            for i, j in pairs:
                product = code.gauge.gauge_generators[i] * code.gauge.gauge_generators[j]
                if product != gens[k]:
                    pairs_ok = False
        check("gauge-pair-products", pairs_ok)
        check(
            "gauges-commute-with-logicals",
            all(
                symplectic_product(g, code.logical_x) == 0
                and symplectic_product(g, code.logical_z) == 0
                for g in code.gauge.gauge_generators
            ),
        )
        check(
            "gauges-commute-with-stabilizers",
            all(
                symplectic_product(g, s) == 0
                for g in code.gauge.gauge_generators
                for s in gens
            ),
        )

    check("one-logical-qubit", code_dimension(code) == 1)
    return report


def logical_rows(code: StabilizerCode) -> List[PauliOperator]:
    """Generators followed by logical Z then logical X.

    A commutation word against these rows carries the syndrome in its low
    N_S bits and the logical class index in the two bits above.
    """
    return list(code.stabilizer_generators) + [code.logical_z, code.logical_x]


def code_distance(
    code: StabilizerCode, max_weight: Optional[int] = None
) -> Tuple[Optional[int], Optional[int], Optional[int]]:
    """Minimum weights of logical X, logical Z and any nontrivial logical.

    Searches errors in increasing weight and stops as soon as all three are
    found. A distance left as None was not reached within ``max_weight``.
    """
    limit = code.n_qubits if max_weight is None else max_weight
    n_s = code.n_stabilizers
    syndrome_mask = (1 << n_s) - 1
    from_x, from_z = commutation_table(logical_rows(code), code.n_qubits)

    d_x: Optional[int] = None
    d_z: Optional[int] = None
    d_any: Optional[int] = None
    for error in enumerate_errors(code.n_qubits, limit):
        word = int(from_x[error.x_mask]) ^ int(from_z[error.z_mask])
        if word & syndrome_mask:
            continue
        logical = word >> n_s
        if logical == 0:
            continue
        if d_any is None:
            d_any = error.weight
        if logical == LogicalClass.X and d_x is None:
            d_x = error.weight
        if logical == LogicalClass.Z and d_z is None:
            d_z = error.weight
        if d_x is not None and d_z is not None:
            break
    return d_x, d_z, d_any


def _require_gauge(code: StabilizerCode) -> GaugeStructure:
    if code.gauge is None:
        raise MissingGaugeError(f"Code {code.name} has no gauge structure")
    return code.gauge


def gauge_outcomes(code: StabilizerCode, error: PauliOperator) -> int:
    """Error-free gauge measurement bits of an error; bit i is gauge i."""
    gauge = _require_gauge(code)
    if error.n_qubits != code.n_qubits:
        raise SizeMismatchError(
            f"Error acts on {error.n_qubits} qubits, code {code.name} has {code.n_qubits}"
        )
    outcomes = 0
    for i, g in enumerate(gauge.gauge_generators):
        outcomes |= symplectic_product(g, error) << i
    return outcomes


def reconstruct_stabilizers_from_gauges(
    code: StabilizerCode, outcomes: int
) -> Tuple[int, ...]:
    """Stabilizer syndromes rebuilt from gauge outcomes, one per pair copy.

    Copy j of stabilizer k is the XOR of the two gauge bits in pair j of
    stabilizer k.
    """
    gauge = _require_gauge(code)
    copies = max(len(p) for p in gauge.stabilizer_pairs)
    result = [0] * copies
    for k, pairs in enumerate(gauge.stabilizer_pairs):
        for j, (gi, gj) in enumerate(pairs):
            bit = ((outcomes >> gi) ^ (outcomes >> gj)) & 1
            result[j] |= bit << k
    return tuple(result)


def stabilizer_set(ops: Sequence[PauliOperator]) -> frozenset:
    """Mask pairs of a generator list, for order-insensitive comparison."""
    return frozenset((op.x_mask, op.z_mask) for op in ops)
