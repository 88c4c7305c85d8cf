"""Bit-parallel algebra of n-qubit Pauli operators.

A Pauli is stored as a pair of integer masks. Bit i of ``x_mask`` is set when
qubit i carries an X component, bit i of ``z_mask`` when it carries a Z
component, so (x_i, z_i) = (0,0)/(1,0)/(0,1)/(1,1) reads I/X/Z/Y. Global
phase is never tracked: syndromes and logical classes depend only on the masks.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from .errors import SizeMismatchError

MAX_QUBITS = 32

_PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_PAULI = {bits: label for label, bits in _PAULI_BITS.items()}


def popcount(value: int) -> int:
    """Number of set bits of a non-negative integer."""
    return bin(value).count("1")


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli operator with phase discarded."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(
                f"n_qubits must be between 0 and {MAX_QUBITS}, got {self.n_qubits}"
            )
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(
                f"Masks x={self.x_mask:#x} z={self.z_mask:#x} exceed {self.n_qubits} qubits"
            )

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliOperator":
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, pauli: str) -> "PauliOperator":
        """Single-qubit Pauli ``pauli`` ('X', 'Y' or 'Z') acting on ``qubit``."""
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"Qubit {qubit} out of range for {n_qubits} qubits")
        x_bit, z_bit = _PAULI_BITS[pauli.upper()]
        return cls(n_qubits, x_bit << qubit, z_bit << qubit)

    @classmethod
    def from_support(
        cls, n_qubits: int, x_qubits: Iterable[int] = (), z_qubits: Iterable[int] = ()
    ) -> "PauliOperator":
        """Build from the qubit indices carrying X and Z components."""
        x_mask = 0
        for q in x_qubits:
            x_mask |= 1 << q
        z_mask = 0
        for q in z_qubits:
            z_mask |= 1 << q
        return cls(n_qubits, x_mask, z_mask)

    @classmethod
    def from_string(cls, label: str) -> "PauliOperator":
        """Parse a string such as ``"XIZY"``; character i acts on qubit i."""
        x_mask = 0
        z_mask = 0
        for i, char in enumerate(label.upper()):
            if char not in _PAULI_BITS:
                raise ValueError(f"Invalid Pauli character {char!r} in {label!r}")
            x_bit, z_bit = _PAULI_BITS[char]
            x_mask |= x_bit << i
            z_mask |= z_bit << i
        return cls(len(label), x_mask, z_mask)

    def to_string(self) -> str:
        return "".join(
            _BITS_PAULI[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.n_qubits)
        )

    @property
    def support(self) -> int:
        """Mask of qubits acted on non-trivially."""
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return popcount(self.x_mask | self.z_mask)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def swap_xz(self) -> "PauliOperator":
        """Exchange the X and Z components on every qubit."""
        return PauliOperator(self.n_qubits, self.z_mask, self.x_mask)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __str__(self) -> str:
        return self.to_string()


class WeightProfile(NamedTuple):
    """Per-type error counts of a Pauli: pure X, Y and pure Z qubits."""

    n_x: int
    n_y: int
    n_z: int

    @property
    def total(self) -> int:
        return self.n_x + self.n_y + self.n_z


def _check_sizes(a: PauliOperator, b: PauliOperator) -> None:
    if a.n_qubits != b.n_qubits:
        raise SizeMismatchError(
            f"Operators act on {a.n_qubits} and {b.n_qubits} qubits"
        )


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """1 if ``a`` and ``b`` anticommute, else 0."""
    _check_sizes(a, b)
    return popcount((a.x_mask & b.z_mask) ^ (a.z_mask & b.x_mask)) & 1


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Product of two Paulis up to phase."""
    _check_sizes(a, b)
    return PauliOperator(a.n_qubits, a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask)


def weight_profile(a: PauliOperator) -> WeightProfile:
    n_y = popcount(a.x_mask & a.z_mask)
    return WeightProfile(
        n_x=popcount(a.x_mask) - n_y,
        n_y=n_y,
        n_z=popcount(a.z_mask) - n_y,
    )


def count_errors(n_qubits: int, max_weight: int) -> int:
    """Number of Paulis on ``n_qubits`` with support size at most ``max_weight``."""
    return sum(comb(n_qubits, i) * 3**i for i in range(max_weight + 1))


def _bit_positions(mask: int) -> List[int]:
    positions = []
    while mask:
        low = mask & -mask
        positions.append(low.bit_length() - 1)
        mask ^= low
    return positions


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _choose_bits(mask: int, count: int) -> Iterator[int]:
    for chosen in combinations(_bit_positions(mask), count):
        value = 0
        for pos in chosen:
            value |= 1 << pos
        yield value


def iter_error_masks(n_qubits: int, max_weight: int) -> Iterator[Tuple[int, int]]:
    """Mask pairs of :func:`enumerate_errors`, same order, no objects built."""
    if not 0 <= max_weight <= n_qubits:
        raise ValueError(
            f"max_weight must be between 0 and {n_qubits}, got {max_weight}"
        )
    full = (1 << n_qubits) - 1
    for weight in range(max_weight + 1):
        for x_mask in range(1 << n_qubits):
            x_weight = popcount(x_mask)
            if x_weight > weight:
                continue
            outside = full & ~x_mask
            z_masks = sorted(
                inner | extra
                for inner in _submasks(x_mask)
                for extra in _choose_bits(outside, weight - x_weight)
            )
            for z_mask in z_masks:
                yield x_mask, z_mask


def enumerate_errors(n_qubits: int, max_weight: int) -> Iterator[PauliOperator]:
    """Yield every Pauli with support size <= ``max_weight`` exactly once.

    Order is weight-major, then ascending ``x_mask``, then ascending
    ``z_mask``. Reference corrections are defined as the first error seen for
    each syndrome, so this order is part of the table format.
    """
    for x_mask, z_mask in iter_error_masks(n_qubits, max_weight):
        yield PauliOperator(n_qubits, x_mask, z_mask)


def profile_keys(n_qubits: int) -> List[WeightProfile]:
    """All weight profiles with n_x + n_y + n_z <= n_qubits, in a fixed order."""
    return [
        WeightProfile(n_x, n_y, n_z)
        for n_x in range(n_qubits + 1)
        for n_y in range(n_qubits + 1 - n_x)
        for n_z in range(n_qubits + 1 - n_x - n_y)
    ]


def multinomial(n_qubits: int, profile: WeightProfile) -> int:
    """Number of n-qubit Paulis with the given weight profile."""
    rest = n_qubits - profile.total
    if rest < 0:
        return 0
    return factorial(n_qubits) // (
        factorial(profile.n_x)
        * factorial(profile.n_y)
        * factorial(profile.n_z)
        * factorial(rest)
    )


def popcount_table(n_qubits: int) -> np.ndarray:
    """Popcount of every mask in ``range(2**n_qubits)``."""
    table = np.zeros(1 << n_qubits, dtype=np.int16)
    for i in range(n_qubits):
        half = 1 << i
        table[half : 2 * half] = table[:half] + 1
    return table


def _parity_table(masks: Sequence[int], n_qubits: int) -> np.ndarray:
    # table[m] bit k = parity(popcount(m & masks[k])), built by doubling
    table = np.zeros(1 << n_qubits, dtype=np.int64)
    for i in range(n_qubits):
        contribution = 0
        for k, mask in enumerate(masks):
            if (mask >> i) & 1:
                contribution |= 1 << k
        half = 1 << i
        table[half : 2 * half] = table[:half] ^ contribution
    return table


def commutation_table(
    rows: Sequence[PauliOperator], n_qubits: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-mask commutation bits against a list of Pauli rows.

    Returns ``(from_x, from_z)`` such that for any Pauli E, bit k of
    ``from_x[E.x_mask] ^ from_z[E.z_mask]`` equals
    ``symplectic_product(E, rows[k])``.
    """
    if len(rows) > 62:
        raise ValueError("At most 62 rows fit in one table word")
    for row in rows:
        if row.n_qubits != n_qubits:
            raise SizeMismatchError(
                f"Row acts on {row.n_qubits} qubits, expected {n_qubits}"
            )
    from_x = _parity_table([row.z_mask for row in rows], n_qubits)
    from_z = _parity_table([row.x_mask for row in rows], n_qubits)
    return from_x, from_z


def symplectic_rank(operators: Sequence[PauliOperator]) -> int:
    """Rank over GF(2) of the operators' (x | z) binary vectors."""
    pivots: List[int] = []
    for op in operators:
        vector = (op.x_mask << op.n_qubits) | op.z_mask
        for pivot in pivots:
            vector = min(vector, vector ^ pivot)
        if vector:
            pivots.append(vector)
    return len(pivots)
