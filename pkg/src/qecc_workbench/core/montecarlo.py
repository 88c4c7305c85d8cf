"""Sampling estimator of logical error rates, used to cross-check the exact engine."""

from typing import Optional, Sequence, Tuple

import numpy as np

from .catalog import logical_rows
from .decoder import (
    DecoderTable,
    Syndrome,
    classify_logical,
    compute_syndrome,
    decision_table,
    decode_lookup,
    measurement_repetitions,
)
from .models import LogicalClass, LogLevel, LogSink, McEstimate, NoiseModel, emit
from .pauli import PauliOperator, commutation_table

DEFAULT_BLOCK_SIZE = 1 << 16


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent counter-based stream for one block of trials."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,)))
    )


def _bits_to_masks(bits: np.ndarray) -> np.ndarray:
    weights = np.left_shift(np.int64(1), np.arange(bits.shape[-1], dtype=np.int64))
    return (bits.astype(np.int64) * weights).sum(axis=-1)


def sample_error_masks(
    noise: NoiseModel, n_qubits: int, trials: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """(x_masks, z_masks) of ``trials`` independent errors."""
    u = rng.random((trials, n_qubits))
    is_x = u < noise.p_x
    is_y = (u >= noise.p_x) & (u < noise.p_x + noise.p_y)
    is_z = (u >= noise.p_x + noise.p_y) & (u < noise.rate_sum)
    return _bits_to_masks(is_x | is_y), _bits_to_masks(is_y | is_z)


def sample_error(noise: NoiseModel, n_qubits: int, rng: np.random.Generator) -> PauliOperator:
    """One error, each qubit independently I/X/Y/Z with the model's rates."""
    x_masks, z_masks = sample_error_masks(noise, n_qubits, 1, rng)
    return PauliOperator(n_qubits, int(x_masks[0]), int(z_masks[0]))


def sample_measurement_flips(
    n_bits: int, q: float, rng: np.random.Generator, trials: Optional[int] = None
) -> np.ndarray:
    """Flip masks with each bit set independently with probability q.

    Returns a scalar-shaped array when ``trials`` is None.
    """
    shape = (n_bits,) if trials is None else (trials, n_bits)
    if q <= 0:
        flips = np.zeros(shape, dtype=bool)
    else:
        flips = rng.random(shape) < q
    return _bits_to_masks(flips)


def trial_fails(
    table: DecoderTable,
    error: PauliOperator,
    flips: Sequence[int],
    noise: NoiseModel,
    decisions: Optional[np.ndarray] = None,
) -> bool:
    """Decode one error under the given per-copy readout flips.

    The round succeeds only when the residual ``correction * error`` is a
    stabilizer: it must return to the codespace with trivial logical class.
    """
    code = table.code
    true_syndrome = compute_syndrome(code, error)
    observed = [Syndrome(true_syndrome.bits ^ int(f), code.n_stabilizers) for f in flips]
    correction = decode_lookup(
        table, observed if len(observed) > 1 else observed[0], noise, decisions
    )
    if compute_syndrome(code, correction) != true_syndrome:
        return True
    return classify_logical(code, error, correction) != LogicalClass.I


def estimate_logical_error_rate(
    table: DecoderTable,
    noise: NoiseModel,
    trials: int,
    seed: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    log: Optional[LogSink] = None,
) -> McEstimate:
    """Monte Carlo logical error rate of the table's decoder.

    Trials run in blocks; block ``b`` draws from its own Philox stream keyed
    by ``(seed, b)``, so the estimate depends only on seed, trials and
    block size.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    code = table.code
    n = code.n_qubits
    n_s = code.n_stabilizers
    repetitions = measurement_repetitions(code)
    syndrome_mask = (1 << n_s) - 1

    decisions = decision_table(table, noise)
    from_x, from_z = commutation_table(logical_rows(code), n)
    cstar_class = ((from_x[table.cstar[:, 0]] ^ from_z[table.cstar[:, 1]]) >> n_s) & 3
    positions = np.arange(n_s, dtype=np.int64)
    place = (repetitions + 1) ** positions

    emit(log, LogLevel.INFO, f"Sampling {trials} trials on {code.name}", seed=seed)
    failures = 0
    n_blocks = (trials + block_size - 1) // block_size
    for block in range(n_blocks):
        size = min(block_size, trials - block * block_size)
        rng = block_rng(seed, block)
        x_masks, z_masks = sample_error_masks(noise, n, size, rng)
        word = from_x[x_masks] ^ from_z[z_masks]
        syndrome = word & syndrome_mask
        true_class = ((word >> n_s) & 3) ^ cstar_class[syndrome]

        if repetitions == 1:
            flips = sample_measurement_flips(n_s, noise.q, rng, trials=size)
            index = syndrome ^ flips
            acting = index
        else:
            true_bits = (syndrome[:, None] >> positions) & 1
            flips = np.stack(
                [
                    sample_measurement_flips(n_s, noise.q, rng, trials=size)
                    for _ in range(repetitions)
                ],
                axis=1,
            )
            copies = (true_bits[:, None, :] ^ ((flips[:, :, None] >> positions) & 1))
            counts = copies.sum(axis=1)
            index = (counts * place).sum(axis=1)
            acting = ((2 * counts > repetitions) * (1 << positions)).sum(axis=1)

        # a misread syndrome fails regardless of the chosen class
        failed = (acting != syndrome) | (decisions[index] != true_class)
        failures += int(np.count_nonzero(failed))
        emit(log, LogLevel.DEBUG, f"Block {block + 1}/{n_blocks}", failures=failures)

    return McEstimate(
        code=code.name,
        trials=trials,
        failures=failures,
        seed=seed,
        lower_bound=not table.exact,
    )


def binomial_band(estimate: McEstimate, exact: float, sigmas: float = 3.0) -> bool:
    """True when the estimate lies within ``sigmas`` standard errors of ``exact``.

    The error bar is floored at one failure per run so that zero-failure
    estimates of tiny rates are not rejected.
    """
    spread = max(estimate.std_err, 1.0 / estimate.trials)
    return abs(estimate.p_l_hat - exact) <= sigmas * spread
