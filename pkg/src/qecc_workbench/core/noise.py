"""Noise-model constructors and correcting-power metrics."""

import math
from typing import TYPE_CHECKING, Any, Optional

from pydantic import ValidationError

from .errors import InvalidNoiseError
from .models import NoiseKind, NoiseModel
from .pauli import WeightProfile

if TYPE_CHECKING:
    from .decoder import DecoderTable

DEFAULT_GATE_OVERHEAD = 0.003


def _model(**fields: Any) -> NoiseModel:
    try:
        return NoiseModel(**fields)
    except ValidationError as e:
        raise InvalidNoiseError(f"Invalid noise parameters: {e}")


def make_depolarizing(p: float, q: float = 0.0, alpha: float = 1.0) -> NoiseModel:
    """X, Y and Z each with probability p/3."""
    if not 0.0 <= p <= 1.0:
        raise InvalidNoiseError(f"p must be within [0, 1], got {p}")
    third = p / 3.0
    return _model(
        kind=NoiseKind.DEPOLARIZING,
        p=p,
        p_x=third,
        p_y=third,
        p_z=third,
        alpha=alpha,
        q=q,
    )


def make_independent_rates(p_prime_x: float, p_prime_z: float, q: float = 0.0) -> NoiseModel:
    """Independent X and Z flips at explicit rates p'_x and p'_z.

    A Y error is the coincidence of both flips. ``alpha`` is recorded as
    p'_z / p'_x, infinite when only Z flips occur.
    """
    if not (0.0 <= p_prime_x <= 1.0 and 0.0 <= p_prime_z <= 1.0):
        raise InvalidNoiseError(
            f"Flip rates p'_x={p_prime_x}, p'_z={p_prime_z} must lie within [0, 1]"
        )
    if p_prime_x > 0:
        alpha = p_prime_z / p_prime_x
    else:
        alpha = math.inf if p_prime_z > 0 else 1.0
    return _model(
        kind=NoiseKind.INDEPENDENT,
        p=1.0 - (1.0 - p_prime_x) * (1.0 - p_prime_z),
        p_x=p_prime_x * (1.0 - p_prime_z),
        p_y=p_prime_x * p_prime_z,
        p_z=p_prime_z * (1.0 - p_prime_x),
        p_prime_x=p_prime_x,
        p_prime_z=p_prime_z,
        alpha=alpha,
        q=q,
    )


def make_independent(p_prime_x: float, alpha: float, q: float = 0.0) -> NoiseModel:
    """Independent X and Z flips with rates p'_x and p'_z = alpha * p'_x."""
    if alpha < 0:
        raise InvalidNoiseError(f"alpha must be non-negative, got {alpha}")
    if math.isinf(alpha):
        raise InvalidNoiseError(
            "alpha=inf leaves p'_z undetermined; use make_independent_rates(0, p'_z)"
        )
    noise = make_independent_rates(p_prime_x, alpha * p_prime_x, q)
    return noise.copy(update={"alpha": alpha})


def make_independent_total(p: float, alpha: float, q: float = 0.0) -> NoiseModel:
    """Independent channel with total single-qubit error rate ``p``.

    Solves p = 1 - (1 - p'_x)(1 - alpha p'_x) for the smaller root p'_x.
    ``alpha=inf`` is the pure dephasing limit p'_x = 0, p'_z = p.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidNoiseError(f"p must be within [0, 1], got {p}")
    if alpha < 0:
        raise InvalidNoiseError(f"alpha must be non-negative, got {alpha}")
    if math.isinf(alpha):
        return make_independent_rates(0.0, p, q)
    b = 1.0 + alpha
    disc = b * b - 4.0 * alpha * p
    if disc < 0:
        raise InvalidNoiseError(f"No independent channel with p={p}, alpha={alpha}")
    # rationalised root, stable for small p and exact at alpha = 0
    p_prime_x = 2.0 * p / (b + math.sqrt(disc))
    return make_independent(min(p_prime_x, 1.0), alpha, q)


def make_noise(kind: NoiseKind, p: float, alpha: float = 1.0, q: float = 0.0) -> NoiseModel:
    """Channel of the given kind at total single-qubit error rate ``p``."""
    if NoiseKind(kind) == NoiseKind.DEPOLARIZING:
        return make_depolarizing(p, q, alpha=alpha)
    return make_independent_total(p, alpha, q)


def inflate(noise: NoiseModel, overhead: float) -> NoiseModel:
    """Same channel shape and q at physical rate p + overhead."""
    p_inflated = noise.p + overhead
    if not 0.0 <= p_inflated <= 1.0:
        raise InvalidNoiseError(
            f"Inflated rate p + {overhead} = {p_inflated} is outside [0, 1]"
        )
    return make_noise(noise.kind, p_inflated, noise.alpha, noise.q)


def with_measurement_error(noise: NoiseModel, q: float) -> NoiseModel:
    """Copy of ``noise`` with a different measurement error rate."""
    if not 0.0 <= q < 1.0:
        raise InvalidNoiseError(f"q must be within [0, 1), got {q}")
    return noise.copy(update={"q": q})


def error_config_probability(
    profile: WeightProfile, noise: NoiseModel, n_qubits: int
) -> float:
    """Probability of one specific error with the given weight profile."""
    if profile.total > n_qubits:
        raise ValueError(f"Profile {profile} exceeds {n_qubits} qubits")
    idle = 1.0 - noise.rate_sum
    return (
        idle ** (n_qubits - profile.total)
        * noise.p_x ** profile.n_x
        * noise.p_y ** profile.n_y
        * noise.p_z ** profile.n_z
    )


def unencoded_failure(noise: NoiseModel) -> float:
    """Failure probability of a bare qubit: 1 - (1 - p)(1 - q)."""
    return 1.0 - (1.0 - noise.p) * (1.0 - noise.q)


def correcting_power(p_l: float, noise: NoiseModel) -> Optional[float]:
    """C = (1 - (1 - p)(1 - q)) / p_L, or None when p_L is zero (unbounded)."""
    if p_l <= 0.0:
        return None
    return unencoded_failure(noise) / p_l


def modified_correcting_power(
    noise: NoiseModel,
    table: "DecoderTable",
    gate_overhead: float = DEFAULT_GATE_OVERHEAD,
) -> Optional[float]:
    """C' with p_L evaluated at p + gate_overhead and the numerator at p.

    Returns None when the inflated logical error rate is zero.
    """
    from .decoder import success_probability

    inflated = inflate(noise, gate_overhead)
    p_l = 1.0 - success_probability(table, inflated)
    return correcting_power(p_l, noise)
