"""Precomputed characteristic-polynomial decoder.

Every error with support size <= n_max is sorted into a (syndrome, logical
class) bucket and counted per weight profile. The counts do not depend on the
noise strength, so the exact success probability of the optimal decoder at
any noise point is a dot product of the counts with per-profile
probabilities followed by a max over classes.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .catalog import StabilizerCode, logical_rows
from .errors import CapacityError, SizeMismatchError, SyndromeMismatchError
from .models import (
    BuildConfig,
    EvaluationResult,
    LogicalClass,
    LogLevel,
    LogSink,
    NoiseModel,
    emit,
)
from .noise import correcting_power, error_config_probability, modified_correcting_power
from .pauli import (
    PauliOperator,
    WeightProfile,
    commutation_table,
    count_errors,
    iter_error_masks,
    multinomial,
    popcount,
    popcount_table,
    profile_keys,
    symplectic_product,
)

CHUNK_ELEMENTS = 1 << 21
MAX_TABLE_QUBITS = 24


@dataclass(frozen=True)
class Syndrome:
    """Stabilizer measurement outcomes; bit k set means generator k read -1."""

    bits: int
    n_bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < (1 << self.n_bits):
            raise ValueError(f"Syndrome {self.bits:#x} exceeds {self.n_bits} bits")

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def __int__(self) -> int:
        return self.bits

    def __xor__(self, other: "Syndrome") -> "Syndrome":
        if self.n_bits != other.n_bits:
            raise SizeMismatchError("Syndromes of different lengths")
        return Syndrome(self.bits ^ other.bits, self.n_bits)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.n_bits}b")[::-1]


@dataclass(eq=False)
class DecoderTable:
    """Coefficient tensor of a code plus its reference corrections.

    ``counts[s, l, k]`` is the number of errors with syndrome ``s``, logical
    class ``l`` relative to ``C*(s)`` and weight profile ``profiles[k]``.
    ``cstar[s]`` holds the (x_mask, z_mask) of ``C*(s)``.
    """

    code: StabilizerCode
    n_max: int
    counts: np.ndarray
    cstar: np.ndarray
    code_hash: str = ""
    profiles: List[WeightProfile] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.code_hash:
            self.code_hash = self.code.content_hash
        if not self.profiles:
            self.profiles = table_profiles(self.code.n_qubits, self.n_max)
        expected = (1 << self.code.n_stabilizers, 4, len(self.profiles))
        if self.counts.shape != expected:
            raise ValueError(f"Count tensor has shape {self.counts.shape}, expected {expected}")

    @property
    def exact(self) -> bool:
        return self.n_max == self.code.n_qubits

    @property
    def n_syndromes(self) -> int:
        return 1 << self.code.n_stabilizers

    def reference_correction(self, syndrome: int) -> PauliOperator:
        x_mask, z_mask = self.cstar[syndrome]
        return PauliOperator(self.code.n_qubits, int(x_mask), int(z_mask))

    def coefficients(self, syndrome: int, logical: LogicalClass) -> Dict[WeightProfile, int]:
        """Sparse view of one coefficient tensor."""
        row = self.counts[syndrome, int(logical)]
        return {self.profiles[k]: int(row[k]) for k in np.flatnonzero(row)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DecoderTable):
            return NotImplemented
        return (
            self.code.name == other.code.name
            and self.code_hash == other.code_hash
            and self.n_max == other.n_max
            and self.profiles == other.profiles
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.cstar, other.cstar)
        )


def table_profiles(n_qubits: int, n_max: int) -> List[WeightProfile]:
    """Profile keys stored by a table truncated at ``n_max``."""
    return [k for k in profile_keys(n_qubits) if k.total <= n_max]


def _check_error(code: StabilizerCode, e: PauliOperator) -> None:
    if e.n_qubits != code.n_qubits:
        raise SizeMismatchError(
            f"Operator acts on {e.n_qubits} qubits, code {code.name} has {code.n_qubits}"
        )


def compute_syndrome(code: StabilizerCode, e: PauliOperator) -> Syndrome:
    _check_error(code, e)
    bits = 0
    for k, generator in enumerate(code.stabilizer_generators):
        bits |= symplectic_product(generator, e) << k
    return Syndrome(bits, code.n_stabilizers)


def _raw_class(code: StabilizerCode, e: PauliOperator) -> int:
    return symplectic_product(e, code.logical_z) | (symplectic_product(e, code.logical_x) << 1)


def classify_logical(
    code: StabilizerCode, e: PauliOperator, reference: PauliOperator
) -> LogicalClass:
    """Logical class of ``reference * e``.

    Raises:
        SyndromeMismatchError: if ``e`` and ``reference`` have different syndromes
    """
    if compute_syndrome(code, e) != compute_syndrome(code, reference):
        raise SyndromeMismatchError(
            f"Error {e} and reference {reference} have different syndromes"
        )
    return LogicalClass(_raw_class(code, e * reference))


def logical_operator(code: StabilizerCode, logical: LogicalClass) -> PauliOperator:
    """Representative Pauli of a logical class."""
    if logical == LogicalClass.X:
        return code.logical_x
    if logical == LogicalClass.Z:
        return code.logical_z
    if logical == LogicalClass.Y:
        return code.logical_x * code.logical_z
    return PauliOperator.identity(code.n_qubits)


def _reference_corrections(
    code: StabilizerCode, from_x: np.ndarray, from_z: np.ndarray
) -> np.ndarray:
    # first error of each syndrome in enumeration order
    n_syndromes = 1 << code.n_stabilizers
    mask = n_syndromes - 1
    cstar = np.full((n_syndromes, 2), -1, dtype=np.int64)
    found = 0
    for x_mask, z_mask in iter_error_masks(code.n_qubits, code.n_qubits):
        s = int(from_x[x_mask] ^ from_z[z_mask]) & mask
        if cstar[s, 0] < 0:
            cstar[s] = (x_mask, z_mask)
            found += 1
            if found == n_syndromes:
                break
    if found != n_syndromes:
        raise ValueError(f"Code {code.name}: {n_syndromes - found} syndromes unreachable")
    return cstar


def _accumulate(
    xs: np.ndarray,
    zs: np.ndarray,
    from_x: np.ndarray,
    from_z: np.ndarray,
    pop: np.ndarray,
    key_index: np.ndarray,
    n_qubits: int,
    n_stabilizers: int,
    n_max: int,
    n_profiles: int,
) -> np.ndarray:
    # counts by (syndrome, raw class, profile) for every pair in xs x zs
    size = (1 << n_stabilizers) * 4 * n_profiles
    acc = np.zeros(size, dtype=np.int64)
    if len(xs) == 0 or len(zs) == 0:
        return acc
    side = n_qubits + 1
    syndrome_mask = (1 << n_stabilizers) - 1
    zs_word = from_z[zs]
    zs_pop = pop[zs].astype(np.int64)
    step = max(1, CHUNK_ELEMENTS // len(zs))

    for start in range(0, len(xs), step):
        block = xs[start : start + step]
        x = np.repeat(block, len(zs))
        z = np.tile(zs, len(block))
        n_y = pop[x & z].astype(np.int64)
        n_x = pop[x].astype(np.int64) - n_y
        n_z = np.tile(zs_pop, len(block)) - n_y
        word = np.repeat(from_x[block], len(zs)) ^ np.tile(zs_word, len(block))
        if n_max < n_qubits:
            keep = (n_x + n_y + n_z) <= n_max
            n_x, n_y, n_z, word = n_x[keep], n_y[keep], n_z[keep], word[keep]
        key = key_index[(n_x * side + n_y) * side + n_z]
        slot = ((word & syndrome_mask) * 4 + ((word >> n_stabilizers) & 3)) * n_profiles + key
        acc += np.bincount(slot, minlength=size)
    return acc


def build_decoder_table(
    code: StabilizerCode,
    cfg: Optional[BuildConfig] = None,
    log: Optional[LogSink] = None,
) -> DecoderTable:
    """Enumerate all errors up to ``cfg.n_max`` and tabulate them.

    The x-mask range is split into ``cfg.parallel_partitions`` disjoint
    partitions; each fills a private count array and the partials are summed.

    Raises:
        CapacityError: if the dense tensor would exceed ``cfg.max_table_entries``
    """
    cfg = cfg or BuildConfig()
    n = code.n_qubits
    n_s = code.n_stabilizers
    n_max = n if cfg.n_max is None else cfg.n_max
    if n_max > n:
        raise ValueError(f"n_max={n_max} exceeds {n} qubits of {code.name}")
    if n > MAX_TABLE_QUBITS:
        raise CapacityError(f"{code.name} has {n} qubits; tables support at most {MAX_TABLE_QUBITS}")

    profiles = table_profiles(n, n_max)
    entries = (1 << n_s) * 4 * len(profiles)
    if entries > cfg.max_table_entries:
        raise CapacityError(
            f"Table for {code.name} at n_max={n_max} needs {entries} entries, "
            f"limit is {cfg.max_table_entries}"
        )

    emit(
        log,
        LogLevel.INFO,
        f"Building decoder table for {code.name}",
        n_max=n_max,
        errors=count_errors(n, n_max),
        partitions=cfg.parallel_partitions,
    )

    from_x, from_z = commutation_table(logical_rows(code), n)
    pop = popcount_table(n)
    side = n + 1
    key_index = np.full(side**3, -1, dtype=np.int64)
    for k, profile in enumerate(profiles):
        key_index[(profile.n_x * side + profile.n_y) * side + profile.n_z] = k

    candidates = np.flatnonzero(pop <= n_max).astype(np.int64)
    partitions = np.array_split(candidates, cfg.parallel_partitions)

    def run(index: int) -> np.ndarray:
        partial = _accumulate(
            partitions[index], candidates, from_x, from_z, pop, key_index,
            n, n_s, n_max, len(profiles),
        )
        emit(log, LogLevel.DEBUG, f"Partition {index + 1}/{len(partitions)} done")
        return partial

    if cfg.parallel_partitions == 1:
        raw = run(0)
    else:
        with ThreadPoolExecutor(max_workers=cfg.parallel_partitions) as pool:
            raw = sum(pool.map(run, range(len(partitions))))
    raw = raw.reshape(1 << n_s, 4, len(profiles))

    cstar = _reference_corrections(code, from_x, from_z)
    cstar_class = (
        (from_x[cstar[:, 0]] ^ from_z[cstar[:, 1]]) >> n_s
    ) & 3
    relabel = np.arange(4)[None, :] ^ cstar_class[:, None]
    counts = np.zeros_like(raw)
    counts[np.arange(1 << n_s)[:, None], relabel] = raw

    table = DecoderTable(code=code, n_max=n_max, counts=counts, cstar=cstar, profiles=profiles)
    emit(
        log,
        LogLevel.INFO,
        f"Decoder table for {code.name} ready",
        total=int(counts.sum()),
        exact=table.exact,
    )
    return table


def profile_weights(table: DecoderTable, noise: NoiseModel) -> np.ndarray:
    """Probability of one error of each stored profile."""
    n = table.code.n_qubits
    return np.array(
        [error_config_probability(profile, noise, n) for profile in table.profiles],
        dtype=np.float64,
    )


def class_masses(table: DecoderTable, noise: NoiseModel) -> np.ndarray:
    """Total probability of each (syndrome, logical class) bucket."""
    return table.counts.astype(np.float64) @ profile_weights(table, noise)


def success_probability_perfect(table: DecoderTable, noise: NoiseModel) -> float:
    """Exact P_d with perfect syndrome measurement (q is ignored)."""
    return float(class_masses(table, noise).max(axis=1).sum())


def measurement_repetitions(code: StabilizerCode) -> int:
    """Independent readings per stabilizer: gauge pairs per stabilizer, else 1."""
    if code.gauge is None:
        return 1
    return max(len(pairs) for pairs in code.gauge.stabilizer_pairs)


def readout_success(repetitions: int, q: float) -> float:
    """Probability that the majority of ``repetitions`` copies reads one bit correctly."""
    return sum(
        comb(repetitions, m) * q**m * (1.0 - q) ** (repetitions - m)
        for m in range(repetitions + 1)
        if 2 * m < repetitions
    )


def _readout_kernel(repetitions: int, q: float) -> np.ndarray:
    # kernel[m, b]: probability that m of the copies read -1 when the true bit is b,
    # kept only where the majority of the copies reports b
    kernel = np.zeros((repetitions + 1, 2))
    for m in range(repetitions + 1):
        if 2 * m < repetitions:
            kernel[m, 0] = comb(repetitions, m) * q**m * (1.0 - q) ** (repetitions - m)
        else:
            kernel[m, 1] = comb(repetitions, m) * q ** (repetitions - m) * (1.0 - q) ** m
    return kernel


def acting_syndromes(n_stabilizers: int, repetitions: int) -> np.ndarray:
    """Syndrome the decoder acts on for every observed outcome index.

    One copy is taken at face value; repeated copies are decided by majority.
    """
    if repetitions == 1:
        return np.arange(1 << n_stabilizers, dtype=np.int64)
    base = repetitions + 1
    index = np.arange(base**n_stabilizers, dtype=np.int64)
    acting = np.zeros_like(index)
    for k in range(n_stabilizers):
        m = (index // base**k) % base
        acting |= (2 * m > repetitions).astype(np.int64) << k
    return acting


def observed_masses(table: DecoderTable, noise: NoiseModel) -> np.ndarray:
    """Class masses of the errors read back as each observed outcome.

    Only errors whose true syndrome is the one the decoder acts on are
    counted: a misread syndrome leaves the corrected state outside the
    codespace and the round has failed whatever class is chosen. The
    observed outcome index is ``sum_k m_k (r+1)**k`` where ``m_k`` counts
    the copies of stabilizer k that read -1 and ``r`` is the number of
    copies. For one copy this is just the observed syndrome.
    """
    n_s = table.code.n_stabilizers
    repetitions = measurement_repetitions(table.code)
    kernel = _readout_kernel(repetitions, noise.q)
    # axis 0 is the highest stabilizer bit under C ordering
    arr = class_masses(table, noise).reshape((2,) * n_s + (4,))
    for axis in range(n_s):
        arr = np.moveaxis(np.tensordot(kernel, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1, 4)


def success_probability_noisy(table: DecoderTable, noise: NoiseModel) -> float:
    """Exact P_d when each stabilizer reading flips with probability q.

    Equals the perfect-measurement P_d times the probability that every
    stabilizer is read correctly (by majority for repeated copies).
    """
    return float(observed_masses(table, noise).max(axis=1).sum())


def success_probability(table: DecoderTable, noise: NoiseModel) -> float:
    if noise.q > 0:
        return success_probability_noisy(table, noise)
    return success_probability_perfect(table, noise)


def decision_table(table: DecoderTable, noise: NoiseModel) -> np.ndarray:
    """Chosen logical class index for every observed outcome.

    The class is the most probable one at the syndrome the decoder acts on.
    Ties go to the lowest class index, i.e. the order I, X, Z, Y.
    """
    perfect = np.argmax(class_masses(table, noise), axis=1)
    repetitions = measurement_repetitions(table.code)
    if repetitions == 1:
        return perfect
    return perfect[acting_syndromes(table.code.n_stabilizers, repetitions)]


def observed_index(copies: Sequence[int], n_stabilizers: int) -> int:
    """Outcome index of repeated syndrome readings (see :func:`observed_masses`)."""
    base = len(copies) + 1
    index = 0
    for k in range(n_stabilizers):
        m = sum((c >> k) & 1 for c in copies)
        index += m * base**k
    return index


def majority_syndrome(copies: Sequence[int], n_stabilizers: int) -> int:
    bits = 0
    for k in range(n_stabilizers):
        if 2 * sum((c >> k) & 1 for c in copies) > len(copies):
            bits |= 1 << k
    return bits


def decode_lookup(
    table: DecoderTable,
    observed: Union[Syndrome, Sequence[Syndrome]],
    noise: NoiseModel,
    decisions: Optional[np.ndarray] = None,
) -> PauliOperator:
    """Correction for an observed syndrome (or its repeated copies).

    Returns ``C*(s) * L`` where ``s`` is the syndrome the readings most
    likely came from (the observed one, or the copy majority) and ``L`` the
    representative of the most probable logical class at ``s``.
    """
    code = table.code
    copies = [observed] if isinstance(observed, Syndrome) else list(observed)
    repetitions = measurement_repetitions(code)
    if len(copies) != repetitions:
        raise ValueError(f"{code.name} expects {repetitions} syndrome copies, got {len(copies)}")
    for copy in copies:
        if copy.n_bits != code.n_stabilizers:
            raise SizeMismatchError(
                f"Syndrome has {copy.n_bits} bits, {code.name} has {code.n_stabilizers} stabilizers"
            )
    bits = [c.bits for c in copies]
    if decisions is None:
        decisions = decision_table(table, noise)
    if repetitions == 1:
        index = bits[0]
        reference = bits[0]
    else:
        index = observed_index(bits, code.n_stabilizers)
        reference = majority_syndrome(bits, code.n_stabilizers)
    chosen = LogicalClass(int(decisions[index]))
    return table.reference_correction(reference) * logical_operator(code, chosen)


def shell_coefficients(table: DecoderTable, syndrome: int, logical: LogicalClass) -> List[int]:
    """Scalar coefficients d^(i) for i = 0..n_max: counts summed over each weight shell."""
    row = table.counts[syndrome, int(logical)]
    shells = [0] * (table.n_max + 1)
    for k, profile in enumerate(table.profiles):
        shells[profile.total] += int(row[k])
    return shells


def characteristic_polynomial(
    table: DecoderTable, syndrome: int, logical: LogicalClass, x: float
) -> float:
    """Evaluate sum_i d^(i) x**i for one (syndrome, class) bucket."""
    coefficients = shell_coefficients(table, syndrome, logical)
    return float(np.polynomial.polynomial.polyval(x, coefficients))


def evaluate(
    table: DecoderTable,
    noise: NoiseModel,
    gate_overhead: Optional[float] = None,
) -> EvaluationResult:
    """P_d, p_L and correcting power at one noise point."""
    p_d = min(success_probability(table, noise), 1.0)
    p_l = max(1.0 - p_d, 0.0)
    modified = None
    if gate_overhead is not None:
        modified = modified_correcting_power(noise, table, gate_overhead)
    return EvaluationResult(
        code=table.code.name,
        noise=noise,
        n_max=table.n_max,
        p_d=p_d,
        p_l=p_l,
        correcting_power=correcting_power(p_l, noise),
        modified_correcting_power=modified,
        gate_overhead=gate_overhead,
        lower_bound=not table.exact,
    )


def single_qubit_correctability(
    table: DecoderTable, noise: NoiseModel
) -> Dict[str, List[int]]:
    """Qubits whose single X, Y or Z error the decoder gets wrong.

    Uses perfect measurement at the given channel; q is ignored.
    """
    code = table.code
    decisions = decision_table(table, noise.copy(update={"q": 0.0}))
    failures: Dict[str, List[int]] = {"X": [], "Y": [], "Z": []}
    for qubit in range(code.n_qubits):
        for label in ("X", "Y", "Z"):
            error = PauliOperator.single(code.n_qubits, qubit, label)
            syndrome = compute_syndrome(code, error)
            if measurement_repetitions(code) == 1:
                index = syndrome.bits
            else:
                index = observed_index([syndrome.bits] * measurement_repetitions(code), code.n_stabilizers)
            actual = classify_logical(code, error, table.reference_correction(syndrome.bits))
            if int(decisions[index]) != actual:
                failures[label].append(qubit)
    return failures


def count_invariants(table: DecoderTable) -> Tuple[bool, bool]:
    """(total count matches, every profile shell matches its multinomial)."""
    n = table.code.n_qubits
    total_ok = int(table.counts.sum()) == count_errors(n, table.n_max)
    per_profile = table.counts.sum(axis=(0, 1))
    shells_ok = all(
        int(per_profile[k]) == multinomial(n, profile)
        for k, profile in enumerate(table.profiles)
    )
    return total_ok, shells_ok
