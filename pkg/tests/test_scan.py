"""Tests for sweeps, crossover search and region scans."""

import io
import math

import pytest

from qecc_workbench.core.errors import NoCrossingError
from qecc_workbench.core.models import NoiseKind, Spacing, SweepSpec
from qecc_workbench.core.scan import (
    CSV_COLUMNS,
    compare_codes,
    contour_segments,
    find_crossover,
    p_grid,
    q_grid,
    region_extent,
    scan_region,
    sweep_physical_rate,
    write_csv,
)


def test_log_grid():
    grid = p_grid(1e-4, 1e-1, 4)

    assert grid[0] == pytest.approx(1e-4)
    assert grid[-1] == pytest.approx(1e-1)
    assert grid[1] == pytest.approx(1e-3)


def test_linear_grid():
    assert p_grid(0.0, 0.1, 3, Spacing.LINEAR) == pytest.approx([0.0, 0.05, 0.1])
    assert p_grid(0.02, 0.2, 1) == [0.02]
    assert len(q_grid()) == 21
    assert q_grid()[-1] == pytest.approx(0.01)


def test_grid_errors():
    with pytest.raises(ValueError):
        p_grid(0.0, 0.1, 5, Spacing.LOG)
    with pytest.raises(ValueError):
        p_grid(0.01, 0.1, 0)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(code="S5", p_min=0.2, p_max=0.1)
    with pytest.raises(ValueError):
        SweepSpec(code="S5", p_min=0.0, spacing="log")
    with pytest.raises(ValueError):
        SweepSpec(code="S5", q=1.0)


async def test_sweep_rows(table_for):
    spec = SweepSpec(code="C7", p_min=0.01, p_max=0.1, p_steps=5, gate_overhead=0.003)
    rows = await sweep_physical_rate(spec, table_for("C7"))

    assert len(rows) == 5
    assert [float(r["p"]) for r in rows] == pytest.approx(p_grid(0.01, 0.1, 5))
    for row in rows:
        assert list(row) == CSV_COLUMNS
        assert row["code"] == "C7"
        assert row["lower_bound"] == "false"
        assert float(row["p_L"]) == 1.0 - float(row["P_d"])
        assert float(row["C"]) == pytest.approx(float(row["p"]) / float(row["p_L"]))
        assert float(row["C_prime"]) < float(row["C"])


async def test_sweep_without_overhead_leaves_column_empty(table_for):
    spec = SweepSpec(code="REP3", p_min=0.01, p_max=0.02, p_steps=2, noise="independent", alpha=0.0)
    rows = await sweep_physical_rate(spec, table_for("REP3"))

    assert all(row["C_prime"] == "" for row in rows)
    assert rows[0]["noise"] == "independent"


async def test_csv_output_is_deterministic(table_for):
    spec = SweepSpec(code="S5", p_min=0.001, p_max=0.1, p_steps=7, q=0.001)
    outputs = []
    for _ in range(2):
        handle = io.StringIO()
        write_csv(await sweep_physical_rate(spec, table_for("S5")), handle)
        outputs.append(handle.getvalue())

    assert outputs[0] == outputs[1]
    assert outputs[0].splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(outputs[0].splitlines()) == 8


def test_unbounded_power_is_written_as_inf():
    from qecc_workbench.core.models import EvaluationResult
    from qecc_workbench.core.noise import make_depolarizing
    from qecc_workbench.core.scan import sweep_row

    row = sweep_row(
        EvaluationResult(code="X", noise=make_depolarizing(0.0), n_max=3, p_d=1.0, p_l=0.0)
    )

    assert row["C"] == "inf"
    assert row["p_L"] == "0.0"


def test_crossover_of_repetition_code(table_for):
    # C = 1 / (3p - 2p^2) for bit flips only
    p_star = find_crossover(table_for("REP3"), NoiseKind.INDEPENDENT, alpha=0.0, target_c=2.0)

    assert p_star == pytest.approx((3 - 5 ** 0.5) / 4, abs=1e-4)


def test_crossover_needs_sign_change(table_for):
    with pytest.raises(NoCrossingError):
        find_crossover(
            table_for("REP3"), NoiseKind.INDEPENDENT, alpha=0.0, target_c=0.5, bracket=(0.01, 0.1)
        )


@pytest.mark.parametrize(
    "name,expected",
    [("S7", 0.05), ("S8", 0.08), ("C7", 0.08)],
)
def test_depolarizing_crossovers(table_for, name, expected):
    p_star = find_crossover(table_for(name), NoiseKind.DEPOLARIZING, bracket=(1e-3, 0.3))

    assert p_star == pytest.approx(expected, abs=0.015)


@pytest.mark.slow
@pytest.mark.parametrize(
    "name,kind,expected",
    [
        ("C11", NoiseKind.DEPOLARIZING, 0.11),
        ("C7", NoiseKind.INDEPENDENT, 0.125),
        ("C11", NoiseKind.INDEPENDENT, 0.15),
        ("GCC15", NoiseKind.DEPOLARIZING, 0.015),
        ("GCC15", NoiseKind.INDEPENDENT, 0.02),
    ],
)
def test_large_code_crossovers(table_for, name, kind, expected):
    p_star = find_crossover(table_for(name), kind, bracket=(1e-3, 0.3))

    assert p_star == pytest.approx(expected, abs=0.015)


def test_symmetric_independent_noise_defeats_s7(table_for):
    with pytest.raises(NoCrossingError):
        find_crossover(table_for("S7"), NoiseKind.INDEPENDENT, alpha=1.0, bracket=(1e-3, 0.3))


def test_asymmetric_noise_rescues_s7(table_for):
    p_star = find_crossover(table_for("S7"), NoiseKind.INDEPENDENT, alpha=5.0, bracket=(1e-3, 0.3))

    assert p_star > 0.10


def test_symmetric_independent_noise_defeats_s9b(table_for):
    with pytest.raises(NoCrossingError):
        find_crossover(table_for("S9b"), NoiseKind.INDEPENDENT, alpha=1.0, bracket=(1e-3, 0.3))


def test_strong_dephasing_bias_favours_s9b(table_for):
    p_star = find_crossover(table_for("S9b"), NoiseKind.INDEPENDENT, alpha=5.0, bracket=(1e-3, 0.3))

    assert p_star > 0.10


def test_surface_code_crossover_falls_with_bias(table_for):
    table = table_for("S9")
    crossovers = [
        find_crossover(table, NoiseKind.INDEPENDENT, alpha=alpha, bracket=(1e-3, 0.3))
        for alpha in (1.0, 2.0, 5.0)
    ]

    assert crossovers == sorted(crossovers, reverse=True)
    assert crossovers[0] == pytest.approx(0.145, abs=0.01)


def test_pure_dephasing_is_the_limit_of_growing_bias(table_for):
    from qecc_workbench.core.decoder import evaluate
    from qecc_workbench.core.noise import make_noise

    table = table_for("S9b")
    limit = evaluate(table, make_noise(NoiseKind.INDEPENDENT, 0.05, math.inf))
    biased = evaluate(table, make_noise(NoiseKind.INDEPENDENT, 0.05, 1e7))

    assert limit.noise.p_x == 0.0
    assert limit.noise.p_z == pytest.approx(0.05)
    assert limit.p_d == pytest.approx(biased.p_d, rel=1e-6)


def test_contour_of_a_ramp():
    segments = contour_segments([0.0, 1.0], [0.0, 1.0], [[0.0, 1.0], [0.0, 1.0]], 0.5)

    assert segments == [[(0.5, 0.0), (0.5, 1.0)]]


def test_contour_absent_when_level_not_crossed():
    assert contour_segments([0.0, 1.0, 2.0], [0.0, 1.0], [[2, 3, 4], [2, 3, 4]], 1.0) == []


def test_contour_saddle_gives_two_segments():
    segments = contour_segments([0.0, 1.0], [0.0, 1.0], [[1.0, 0.0], [0.0, 1.0]], 0.5)

    assert len(segments) == 2


async def test_region_scan(table_for):
    table = table_for("S9")
    p_values = p_grid(0.005, 0.05, 4, Spacing.LINEAR)
    q_values = q_grid(0.0, 0.01, 3)
    region = await scan_region(table, NoiseKind.DEPOLARIZING, 1.0, p_values, q_values)

    assert len(region.points) == 12
    assert len(region.evaluations) == 12
    assert region.evaluations[0].noise.q == 0.0
    assert region.point(0, 0).q == 0.0
    assert region.point(3, 2).p == pytest.approx(0.05)
    assert not region.lower_bound
    # C falls as q grows at fixed p
    assert region.point(0, 2).correcting_power < region.point(0, 0).correcting_power
    assert region.contours


async def test_region_refinement_stays_on_contour(table_for):
    table = table_for("S9")
    region = await scan_region(
        table,
        NoiseKind.DEPOLARIZING,
        1.0,
        p_grid(0.002, 0.02, 4, Spacing.LINEAR),
        q_grid(0.0, 0.01, 3),
        refine=True,
    )

    from qecc_workbench.core.decoder import evaluate
    from qecc_workbench.core.noise import make_depolarizing

    for segment in region.contours:
        for p, q in segment:
            power = evaluate(table, make_depolarizing(p, q=q)).correcting_power
            assert power == pytest.approx(1.0, abs=1e-3)


async def test_surface_code_region_extent(table_for):
    table = table_for("S9")
    region = await scan_region(
        table,
        NoiseKind.DEPOLARIZING,
        1.0,
        p_grid(1e-4, 0.1, 40, Spacing.LINEAR),
        q_grid(0.0, 0.01, 41),
    )
    extent = region_extent(region)

    # a misread stabilizer costs the whole round, so the region closes early in q
    assert 0.0015 < extent.q_max < 0.008


async def test_comparing_a_code_with_itself_is_degenerate(table_for):
    table = table_for("C7")
    result = await compare_codes(
        table, table, NoiseKind.DEPOLARIZING, 1.0, [0.01, 0.02], [0.0, 0.001]
    )

    assert result.degenerate
    assert result.contours == []
    assert result.a_wins == 0


@pytest.mark.slow
async def test_gauge_code_beats_surface_code_somewhere(table_for):
    result = await compare_codes(
        table_for("GCC15", 6),
        table_for("S9"),
        NoiseKind.DEPOLARIZING,
        1.0,
        p_grid(1e-3, 0.03, 10, Spacing.LINEAR),
        q_grid(0.0, 0.003, 7),
    )

    assert not result.degenerate
    assert result.a_wins > 0


async def test_doubling_power_needs_accurate_readout(table_for):
    region = await scan_region(
        table_for("S9"),
        NoiseKind.DEPOLARIZING,
        1.0,
        p_grid(1e-3, 0.05, 25, Spacing.LINEAR),
        [0.0, 0.0005, 0.001, 0.0015, 0.002, 0.003],
        target=2.0,
    )
    doubling = [pt for pt in region.points if pt.correcting_power is None or pt.correcting_power > 2.0]

    assert doubling
    assert max(pt.q for pt in doubling) <= 0.001
