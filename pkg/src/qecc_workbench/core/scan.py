"""Parameter sweeps, crossover search and regions of correctability."""

import asyncio
import csv
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, TextIO, Tuple

import numpy as np

from .decoder import DecoderTable, evaluate
from .errors import NoCrossingError
from .models import (
    ComparisonResult,
    EvaluationResult,
    GridPoint,
    LogLevel,
    LogSink,
    NoiseKind,
    NoiseModel,
    RegionResult,
    Spacing,
    SweepSpec,
    emit,
)
from .noise import make_noise

CSV_COLUMNS = [
    "code", "noise", "alpha", "p", "q", "n_max",
    "P_d", "p_L", "C", "C_prime", "lower_bound",
]
CROSSOVER_TOLERANCE = 1e-5
# stands in for unbounded correcting power when interpolating
UNBOUNDED = 1e12

Point = Tuple[float, float]


def p_grid(
    p_min: float, p_max: float, steps: int, spacing: Spacing = Spacing.LOG
) -> List[float]:
    """Physical error rates from ``p_min`` to ``p_max`` inclusive."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if steps == 1:
        return [float(p_min)]
    if Spacing(spacing) == Spacing.LOG:
        if p_min <= 0:
            raise ValueError("log spacing needs p_min > 0")
        return [float(v) for v in np.geomspace(p_min, p_max, steps)]
    return [float(v) for v in np.linspace(p_min, p_max, steps)]


def q_grid(
    q_min: float = 0.0, q_max: float = 0.01, steps: int = 21, spacing: Spacing = Spacing.LINEAR
) -> List[float]:
    """Measurement error rates; linear from 0 to 1% by default."""
    return p_grid(q_min, q_max, steps, spacing)


async def evaluate_grid(
    table: DecoderTable,
    noises: Sequence[NoiseModel],
    gate_overhead: Optional[float] = None,
) -> List[EvaluationResult]:
    """Evaluate noise points concurrently; results keep the input order."""
    loop = asyncio.get_running_loop()
    tasks = [
        loop.run_in_executor(None, evaluate, table, noise, gate_overhead)
        for noise in noises
    ]
    return list(await asyncio.gather(*tasks))


def _format_float(value: Optional[float]) -> str:
    if value is None:
        return "inf"
    return repr(float(value))


def sweep_row(result: EvaluationResult) -> Dict[str, str]:
    """One CSV row in the flat sweep schema."""
    noise = result.noise
    return {
        "code": result.code,
        "noise": noise.kind.value,
        "alpha": _format_float(noise.alpha),
        "p": _format_float(noise.p),
        "q": _format_float(noise.q),
        "n_max": str(result.n_max),
        "P_d": _format_float(result.p_d),
        "p_L": _format_float(result.p_l),
        "C": _format_float(result.correcting_power),
        "C_prime": (
            _format_float(result.modified_correcting_power)
            if result.gate_overhead is not None
            else ""
        ),
        "lower_bound": "true" if result.lower_bound else "false",
    }


async def sweep_physical_rate(
    spec: SweepSpec, table: DecoderTable, log: Optional[LogSink] = None
) -> List[Dict[str, str]]:
    """Evaluate the table along the sweep's p grid; rows in grid order."""
    grid = p_grid(spec.p_min, spec.p_max, spec.p_steps, spec.spacing)
    noises = [make_noise(spec.noise, p, spec.alpha, spec.q) for p in grid]
    emit(log, LogLevel.INFO, f"Sweeping {len(grid)} points on {table.code.name}")
    results = await evaluate_grid(table, noises, spec.gate_overhead)
    return [sweep_row(result) for result in results]


def write_csv(rows: Sequence[Dict[str, str]], handle: TextIO) -> None:
    writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def _power(result: EvaluationResult) -> float:
    if result.correcting_power is None:
        return UNBOUNDED
    return result.correcting_power


def find_crossover(
    table: DecoderTable,
    kind: NoiseKind,
    alpha: float = 1.0,
    q: float = 0.0,
    target_c: float = 1.0,
    bracket: Tuple[float, float] = (1e-4, 0.5),
    tolerance: float = CROSSOVER_TOLERANCE,
) -> float:
    """Physical error rate where the correcting power equals ``target_c``.

    Bisects ``bracket`` until its width is at most ``tolerance``.

    Raises:
        NoCrossingError: if C - target_c has the same sign at both ends
    """
    def excess(p: float) -> float:
        return _power(evaluate(table, make_noise(kind, p, alpha, q))) - target_c

    lo, hi = bracket
    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoCrossingError(
            f"C - {target_c} keeps sign on [{lo}, {hi}] for {table.code.name} "
            f"({f_lo:+.4g} / {f_hi:+.4g})"
        )
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        f_mid = excess(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _edge_point(a: Point, b: Point, va: float, vb: float, level: float) -> Point:
    t = 0.5 if vb == va else (level - va) / (vb - va)
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def contour_segments(
    xs: Sequence[float],
    ys: Sequence[float],
    values: Sequence[Sequence[float]],
    level: float,
) -> List[List[Point]]:
    """Marching-squares contour of ``values[iy][ix]`` at ``level``.

    Returns two-point segments with crossings placed by linear
    interpolation along cell edges.
    """
    grid = np.nan_to_num(np.asarray(values, dtype=np.float64), posinf=UNBOUNDED, neginf=-UNBOUNDED)
    segments: List[List[Point]] = []
    for iy in range(len(ys) - 1):
        for ix in range(len(xs) - 1):
            corners = [
                ((xs[ix], ys[iy]), grid[iy, ix]),
                ((xs[ix + 1], ys[iy]), grid[iy, ix + 1]),
                ((xs[ix + 1], ys[iy + 1]), grid[iy + 1, ix + 1]),
                ((xs[ix], ys[iy + 1]), grid[iy + 1, ix]),
            ]
            above = [v >= level for _, v in corners]
            # edges: bottom, right, top, left
            crossings: Dict[int, Point] = {}
            for edge in range(4):
                (pa, va), (pb, vb) = corners[edge], corners[(edge + 1) % 4]
                if above[edge] != above[(edge + 1) % 4]:
                    crossings[edge] = _edge_point(pa, pb, va, vb, level)
            if len(crossings) == 2:
                first, second = crossings.values()
                segments.append([first, second])
            elif len(crossings) == 4:
                centre_above = float(np.mean([v for _, v in corners])) >= level
                if centre_above == above[0]:
                    pairs = [(0, 1), (2, 3)]
                else:
                    pairs = [(0, 3), (1, 2)]
                segments.extend([crossings[a], crossings[b]] for a, b in pairs)
    return segments


def _refine(
    point: Point,
    cell: Tuple[Point, Point],
    measure: Callable[[float, float], float],
    level: float,
    iterations: int = 20,
) -> Point:
    # bisect along the cell edge the crossing lies on
    a, b = cell
    fa = measure(*a) - level
    for _ in range(iterations):
        mid = (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))
        fm = measure(*mid) - level
        if (fm >= 0) == (fa >= 0):
            a, fa = mid, fm
        else:
            b = mid
    return (0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))


def _enclosing_edge(point: Point, xs: Sequence[float], ys: Sequence[float]) -> Tuple[Point, Point]:
    x, y = point
    if x in xs:
        iy = int(np.clip(np.searchsorted(ys, y) - 1, 0, len(ys) - 2))
        return (x, ys[iy]), (x, ys[iy + 1])
    ix = int(np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2))
    return (xs[ix], y), (xs[ix + 1], y)


async def scan_region(
    table: DecoderTable,
    kind: NoiseKind,
    alpha: float,
    p_values: Sequence[float],
    q_values: Sequence[float],
    target: float = 1.0,
    refine: bool = False,
    log: Optional[LogSink] = None,
) -> RegionResult:
    """Correcting power over a (p, q) grid and its contour at ``target``.

    With ``refine`` each contour point is bisected along its cell edge
    against the exact engine instead of linearly interpolated.
    """
    noises = [make_noise(kind, p, alpha, q) for q in q_values for p in p_values]
    emit(log, LogLevel.INFO, f"Scanning {len(noises)} grid points on {table.code.name}")
    results = await evaluate_grid(table, noises)
    points = [
        GridPoint(
            p=p, q=q, p_d=r.p_d, p_l=r.p_l, correcting_power=r.correcting_power
        )
        for (q, p), r in zip(((q, p) for q in q_values for p in p_values), results)
    ]
    values = np.array([_power(r) for r in results]).reshape(len(q_values), len(p_values))
    segments = contour_segments(p_values, q_values, values, target)

    if refine:
        def measure(p: float, q: float) -> float:
            return _power(evaluate(table, make_noise(kind, p, alpha, q)))

        segments = [
            [_refine(pt, _enclosing_edge(pt, p_values, q_values), measure, target) for pt in seg]
            for seg in segments
        ]

    return RegionResult(
        code=table.code.name,
        noise=kind,
        alpha=alpha,
        n_max=table.n_max,
        target=target,
        p_values=list(p_values),
        q_values=list(q_values),
        points=points,
        evaluations=results,
        contours=segments,
        lower_bound=not table.exact,
    )


class RegionExtent(NamedTuple):
    """Bounds of the grid region where C exceeds the target."""

    q_max: Optional[float]
    p_min: Optional[float]
    p_max: Optional[float]


def region_extent(region: RegionResult) -> RegionExtent:
    """Widest q and the p range reached by the region C > target.

    Contour points extend the grid estimate to the interpolated boundary.
    """
    inside = [
        (pt.p, pt.q)
        for pt in region.points
        if pt.correcting_power is None or pt.correcting_power > region.target
    ]
    boundary = [pt for seg in region.contours for pt in seg]
    candidates = inside + boundary
    if not inside:
        return RegionExtent(None, None, None)
    return RegionExtent(
        q_max=max(q for _, q in candidates),
        p_min=min(p for p, _ in candidates),
        p_max=max(p for p, _ in candidates),
    )


async def compare_codes(
    table_a: DecoderTable,
    table_b: DecoderTable,
    kind: NoiseKind,
    alpha: float,
    p_values: Sequence[float],
    q_values: Sequence[float],
    tolerance: float = 1e-9,
) -> ComparisonResult:
    """Where on the (p, q) grid two codes have equal correcting power."""
    noises = [make_noise(kind, p, alpha, q) for q in q_values for p in p_values]
    results_a, results_b = await asyncio.gather(
        evaluate_grid(table_a, noises), evaluate_grid(table_b, noises)
    )
    diff = np.array(
        [_power(a) - _power(b) for a, b in zip(results_a, results_b)]
    ).reshape(len(q_values), len(p_values))
    degenerate = bool(np.all(np.abs(diff) <= tolerance))
    contours = [] if degenerate else contour_segments(p_values, q_values, diff, 0.0)
    return ComparisonResult(
        code_a=table_a.code.name,
        code_b=table_b.code.name,
        noise=kind,
        alpha=alpha,
        p_values=list(p_values),
        q_values=list(q_values),
        difference=diff.tolist(),
        contours=contours,
        degenerate=degenerate,
    )
