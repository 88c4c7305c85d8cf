"""Tests for noise models and correcting power."""

import math

import pytest

from qecc_workbench.core.errors import InvalidNoiseError
from qecc_workbench.core.models import NoiseKind
from qecc_workbench.core.noise import (
    correcting_power,
    error_config_probability,
    inflate,
    make_depolarizing,
    make_independent,
    make_independent_rates,
    make_independent_total,
    make_noise,
    unencoded_failure,
    with_measurement_error,
)
from qecc_workbench.core.pauli import WeightProfile


def test_depolarizing_rates():
    noise = make_depolarizing(0.03, q=0.001)

    assert noise.kind == NoiseKind.DEPOLARIZING
    assert noise.rates == pytest.approx((0.01, 0.01, 0.01))
    assert noise.rate_sum == pytest.approx(0.03)
    assert noise.q == 0.001


def test_independent_rates():
    noise = make_independent(0.1, alpha=2.0)

    assert noise.p_prime_z == pytest.approx(0.2)
    assert noise.p_x == pytest.approx(0.08)
    assert noise.p_y == pytest.approx(0.02)
    assert noise.p_z == pytest.approx(0.18)
    assert noise.p == pytest.approx(1 - 0.9 * 0.8)
    assert noise.rate_sum == pytest.approx(noise.p)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("p", [1e-4, 0.01, 0.1, 0.3])
def test_independent_total_inverts_rate(p, alpha):
    noise = make_independent_total(p, alpha)

    assert noise.p == pytest.approx(p, rel=1e-9)
    assert noise.alpha == alpha


def test_independent_total_without_z_flips():
    noise = make_independent_total(0.1, alpha=0.0)

    assert noise.p_prime_x == pytest.approx(0.1)
    assert noise.p_z == 0.0


def test_make_noise_dispatch():
    assert make_noise(NoiseKind.DEPOLARIZING, 0.06).p_y == pytest.approx(0.02)
    assert make_noise("independent", 0.06, alpha=5.0).kind == NoiseKind.INDEPENDENT


@pytest.mark.parametrize(
    "build",
    [
        lambda: make_depolarizing(1.5),
        lambda: make_depolarizing(-0.1),
        lambda: make_depolarizing(0.1, q=1.0),
        lambda: make_independent(0.5, alpha=3.0),
        lambda: make_independent(0.1, alpha=-1.0),
        lambda: make_independent_total(0.1, alpha=-1.0),
        lambda: make_independent(0.1, alpha=math.inf),
        lambda: make_independent_rates(0.1, 1.2),
    ],
)
def test_invalid_noise(build):
    with pytest.raises(InvalidNoiseError):
        build()


def test_invalid_noise_is_value_error():
    with pytest.raises(ValueError):
        make_depolarizing(2.0)


def test_error_config_probability():
    noise = make_depolarizing(0.3)
    probability = error_config_probability(WeightProfile(1, 0, 1), noise, 3)

    assert probability == pytest.approx(0.1 * 0.1 * 0.7)
    with pytest.raises(ValueError):
        error_config_probability(WeightProfile(2, 2, 0), noise, 3)


def test_correcting_power():
    noise = make_depolarizing(0.01, q=0.01)

    assert unencoded_failure(noise) == pytest.approx(1 - 0.99 * 0.99)
    assert correcting_power(0.001, noise) == pytest.approx(19.9)
    assert correcting_power(0.0, noise) is None


def test_inflate_keeps_shape():
    noise = make_independent_total(0.05, alpha=5.0, q=0.002)
    inflated = inflate(noise, 0.003)

    assert inflated.p == pytest.approx(0.053)
    assert inflated.alpha == 5.0
    assert inflated.q == 0.002
    assert inflated.kind == NoiseKind.INDEPENDENT
    with pytest.raises(InvalidNoiseError):
        inflate(make_depolarizing(0.999), 0.01)


def test_with_measurement_error():
    noise = with_measurement_error(make_depolarizing(0.01), 0.005)

    assert noise.q == 0.005
    assert noise.p == 0.01
    with pytest.raises(InvalidNoiseError):
        with_measurement_error(noise, 1.0)


def test_independent_rates_from_explicit_pair():
    noise = make_independent_rates(0.02, 0.05, q=0.001)

    assert noise.alpha == pytest.approx(2.5)
    assert noise.p == pytest.approx(1 - 0.98 * 0.95)
    assert noise.p_y == pytest.approx(0.001)
    assert noise.q == 0.001
    assert make_independent(0.02, alpha=2.5).rates == pytest.approx(noise.rates)


def test_pure_dephasing_limit():
    noise = make_independent_total(0.04, alpha=math.inf)

    assert math.isinf(noise.alpha)
    assert noise.p_prime_x == 0.0
    assert noise.p_prime_z == pytest.approx(0.04)
    assert noise.rates == pytest.approx((0.0, 0.0, 0.04))
    assert make_independent_rates(0.0, 0.04).alpha == math.inf
    assert make_noise("independent", 0.04, alpha=math.inf) == noise


def test_pure_bit_flip_limit():
    noise = make_independent_rates(0.04, 0.0)

    assert noise.alpha == 0.0
    assert noise.rates == pytest.approx((0.04, 0.0, 0.0))


def test_inflate_dephasing_channel():
    inflated = inflate(make_independent_total(0.05, alpha=math.inf), 0.003)

    assert inflated.p_prime_z == pytest.approx(0.053)
    assert inflated.p_x == 0.0
