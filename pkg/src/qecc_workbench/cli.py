"""Command-line interface for qecc-workbench."""

import asyncio
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
from click.core import ParameterSource
from rich.console import Console
from rich.table import Table

from .core.catalog import (
    StabilizerCode,
    code_dimension,
    code_distance,
    gauge_qubits,
    get_code,
    is_css,
    list_codes,
    validate_code,
)
from .core.config import ConfigManager
from .core.decoder import (
    DecoderTable,
    count_invariants,
    evaluate,
    measurement_repetitions,
    single_qubit_correctability,
)
from .core.errors import QeccError
from .core.models import BuildConfig, LogLevel, NoiseKind, RunLog, Spacing, SweepSpec
from .core.montecarlo import binomial_band, estimate_logical_error_rate
from .core.noise import DEFAULT_GATE_OVERHEAD, make_noise
from .core.scan import (
    compare_codes,
    find_crossover,
    p_grid,
    q_grid,
    region_extent,
    scan_region,
    sweep_physical_rate,
    sweep_row,
    write_csv,
)
from .core.storage import TableStore, load_table, save_table

console = Console()
err_console = Console(stderr=True)

# codes above this size default to a truncated table unless --exact is given
EXACT_QUBIT_LIMIT = 13
DEFAULT_TRUNCATION = 6

_LEVEL_STYLE = {
    LogLevel.DEBUG: "dim",
    LogLevel.INFO: "cyan",
    LogLevel.WARNING: "yellow",
    LogLevel.ERROR: "red",
}


def handle_async(func: Callable[..., Any]) -> Callable[..., Any]:
    """Decorator to handle async functions in Click commands."""
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        return asyncio.run(func(*args, **kwargs))
    return wrapper


def _error_code(error: Exception) -> str:
    if isinstance(error, QeccError):
        return error.code
    if isinstance(error, FileNotFoundError):
        return "not-found"
    if isinstance(error, ValueError):
        return "invalid-argument"
    return "error"


def _fail(error: Exception) -> None:
    """Report an error for humans and machines, then exit non-zero."""
    err_console.print(f"[red]Error: {error}[/red]")
    message = str(error).replace("\n", " ")
    click.echo(f"error code={_error_code(error)} message={message}", err=True)
    sys.exit(1)


def _log_sink(ctx: click.Context) -> Callable[[RunLog], None]:
    quiet = ctx.obj.get('quiet', False)

    def sink(entry: RunLog) -> None:
        if quiet and entry.level in (LogLevel.DEBUG, LogLevel.INFO):
            return
        if entry.level == LogLevel.DEBUG and not ctx.obj.get('verbose', False):
            return
        style = _LEVEL_STYLE[entry.level]
        err_console.print(f"[{style}]{entry.message}[/{style}]")

    return sink


def _config(ctx: click.Context) -> ConfigManager:
    if 'config_manager' not in ctx.obj:
        manager = ConfigManager(ctx.obj.get('config_dir'))
        manager.load_user_codes()
        ctx.obj['config_manager'] = manager
    return ctx.obj['config_manager']


def _params(ctx: click.Context) -> Dict[str, Any]:
    """Command parameters, with values from --config filling anything not given on the command line."""
    params = dict(ctx.params)
    config_path = ctx.obj.get('config_path')
    if config_path is None:
        return params
    file_values = _config(ctx).load_run_config(config_path, ctx.info_name or "")
    for key, value in file_values.items():
        if key not in params:
            raise ValueError(f"Unknown option '{key}' for '{ctx.info_name}' in {config_path}")
        if ctx.get_parameter_source(key) != ParameterSource.COMMANDLINE:
            params[key] = value
    return params


def _resolve_n_max(ctx: click.Context, code: StabilizerCode, n_max: Optional[int], exact: bool) -> Optional[int]:
    if n_max is not None or exact or code.n_qubits <= EXACT_QUBIT_LIMIT:
        return n_max
    _log_sink(ctx)(
        RunLog(
            level=LogLevel.WARNING,
            message=(
                f"{code.name} has {code.n_qubits} qubits; using n_max={DEFAULT_TRUNCATION} "
                "(results are lower bounds, pass --exact for the full table)"
            ),
        )
    )
    return DEFAULT_TRUNCATION


def _table(ctx: click.Context, code: StabilizerCode, params: Dict[str, Any]) -> DecoderTable:
    n_max = _resolve_n_max(ctx, code, params.get('n_max'), params.get('exact', False))
    cfg = BuildConfig(n_max=n_max, parallel_partitions=params.get('partitions', 1))
    store = TableStore(_config(ctx).tables_path)
    return store.get_or_build(code, cfg, _log_sink(ctx))


def noise_options(func: Callable[..., Any]) -> Callable[..., Any]:
    func = click.option('--alpha', type=float, default=1.0, show_default=True,
                        help="Asymmetry p'_z / p'_x (independent noise); inf means p'_x = 0")(func)
    func = click.option('--noise', 'noise', type=click.Choice([k.value for k in NoiseKind]),
                        default=NoiseKind.DEPOLARIZING.value, show_default=True,
                        help='Single-qubit error channel')(func)
    return func


def table_options(func: Callable[..., Any]) -> Callable[..., Any]:
    func = click.option('--partitions', type=int, default=1, show_default=True,
                        help='Parallel partitions for table builds')(func)
    func = click.option('--exact', is_flag=True, help='Force the exact table for large codes')(func)
    func = click.option('--n-max', type=int, default=None, help='Truncation weight (default: exact)')(func)
    return func


@click.group()
@click.version_option()
@click.option(
    '--config-dir',
    type=click.Path(exists=False, file_okay=False, dir_okay=True, path_type=Path),
    help='Configuration directory (default: ~/.qecc-workbench)'
)
@click.option(
    '--config', 'config_path',
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help='YAML file with one mapping of options per subcommand'
)
@click.option('--quiet', is_flag=True, help='Only show warnings and errors')
@click.option('--verbose', is_flag=True, help='Show debug messages')
@click.pass_context
def main(ctx: click.Context, config_dir: Optional[Path], config_path: Optional[Path],
         quiet: bool, verbose: bool) -> None:
    """qecc-workbench - exact correcting power of small quantum codes."""
    ctx.ensure_object(dict)
    ctx.obj['config_dir'] = config_dir
    ctx.obj['config_path'] = config_path
    ctx.obj['quiet'] = quiet
    ctx.obj['verbose'] = verbose


@main.command('list-codes')
@click.pass_context
def list_codes_command(ctx: click.Context) -> None:
    """List catalog codes."""
    try:
        _config(ctx)
        table = Table(title="Codes")
        table.add_column("Name", style="cyan")
        table.add_column("Qubits", justify="right")
        table.add_column("Stabilizers", justify="right")
        table.add_column("Gauge qubits", justify="right")
        table.add_column("CSS")
        for name in list_codes():
            code = get_code(name)
            table.add_row(
                code.name,
                str(code.n_qubits),
                str(code.n_stabilizers),
                str(gauge_qubits(code)),
                "yes" if is_css(code) else "no",
            )
        console.print(table)
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@click.pass_context
def validate(ctx: click.Context, code_name: str) -> None:
    """Check the structural invariants of a code."""
    try:
        _config(ctx)
        report = validate_code(get_code(code_name))
        for check in report.checks:
            mark = "[red]✗[/red]" if check in report.failures else "[green]✓[/green]"
            console.print(f"{mark} {check}")
        if not report.ok:
            raise ValueError(f"{code_name} failed: {', '.join(report.failures)}")
        console.print(f"[green]{code_name} is valid[/green]")
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@click.option('--max-weight', type=int, default=None, help='Stop the search at this weight')
@click.pass_context
def distance(ctx: click.Context, code_name: str, max_weight: Optional[int]) -> None:
    """Minimum weight of logical X, logical Z and any logical operator."""
    try:
        _config(ctx)
        params = _params(ctx)
        d_x, d_z, d = code_distance(get_code(code_name), params['max_weight'])

        def show(value: Optional[int]) -> str:
            return "-" if value is None else str(value)

        console.print(f"{code_name}: d_x={show(d_x)} d_z={show(d_z)} d={show(d)}")
    except Exception as e:
        _fail(e)


@main.command('build-table')
@click.argument('code_name')
@table_options
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path),
              help='Write the table here instead of the cache')
@click.pass_context
def build_table(ctx: click.Context, code_name: str, n_max: Optional[int], exact: bool,
                partitions: int, out: Optional[Path]) -> None:
    """Build (or load from cache) the decoder table of a code."""
    try:
        _config(ctx)
        params = _params(ctx)
        code = get_code(code_name)
        table = _table(ctx, code, params)
        if params.get('out'):
            save_table(table, Path(params['out']))
            console.print(f"[green]Saved table to {params['out']}[/green]")
        total_ok, shells_ok = count_invariants(table)
        console.print(
            f"{code.name}: n_max={table.n_max} exact={table.exact} "
            f"total={int(table.counts.sum())} counts-ok={total_ok and shells_ok}"
        )
    except Exception as e:
        _fail(e)


@main.command('eval')
@click.argument('code_name')
@click.option('--p', 'p', type=float, required=True, help='Physical error rate')
@click.option('--q', 'q', type=float, default=0.0, show_default=True, help='Measurement error rate')
@noise_options
@table_options
@click.option('--gate-overhead', type=float, default=None,
              help=f'Also report C\' with this overhead (typical: {DEFAULT_GATE_OVERHEAD})')
@click.pass_context
def eval_command(ctx: click.Context, code_name: str, p: float, q: float, noise: str,
                 alpha: float, n_max: Optional[int], exact: bool, partitions: int,
                 gate_overhead: Optional[float]) -> None:
    """Evaluate decoding success at one noise point."""
    try:
        _config(ctx)
        params = _params(ctx)
        code = get_code(code_name)
        table = _table(ctx, code, params)
        model = make_noise(NoiseKind(params['noise']), params['p'], params['alpha'], params['q'])
        result = evaluate(table, model, params['gate_overhead'])

        out = Table(title=f"{code.name} at p={model.p:.6g}, q={model.q:.6g}")
        out.add_column("Quantity", style="cyan")
        out.add_column("Value", justify="right")
        for key, value in sweep_row(result).items():
            out.add_row(key, value)
        console.print(out)
        if result.lower_bound:
            console.print("[yellow]Truncated table: P_d is a lower bound[/yellow]")
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@noise_options
@click.option('--p-min', type=float, default=1e-4, show_default=True)
@click.option('--p-max', type=float, default=0.2, show_default=True)
@click.option('--p-steps', type=int, default=40, show_default=True)
@click.option('--spacing', type=click.Choice([s.value for s in Spacing]),
              default=Spacing.LOG.value, show_default=True)
@click.option('--q', 'q', type=float, default=0.0, show_default=True)
@click.option('--gate-overhead', type=float, default=None)
@table_options
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='CSV file (default: stdout)')
@click.pass_context
@handle_async
async def sweep(ctx: click.Context, code_name: str, **_: Any) -> None:
    """Sweep the physical error rate and emit CSV."""
    try:
        _config(ctx)
        params = _params(ctx)
        spec = SweepSpec(
            code=code_name,
            noise=params['noise'],
            alpha=params['alpha'],
            p_min=params['p_min'],
            p_max=params['p_max'],
            p_steps=params['p_steps'],
            spacing=params['spacing'],
            q=params['q'],
            n_max=params['n_max'],
            gate_overhead=params['gate_overhead'],
        )
        code = get_code(code_name)
        table = _table(ctx, code, params)
        rows = await sweep_physical_rate(spec, table, _log_sink(ctx))
        if params.get('out'):
            with open(params['out'], 'w', newline='', encoding='utf-8') as handle:
                write_csv(rows, handle)
            err_console.print(f"[green]Wrote {len(rows)} rows to {params['out']}[/green]")
        else:
            write_csv(rows, sys.stdout)
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@noise_options
@click.option('--q', 'q', type=float, default=0.0, show_default=True)
@click.option('--target', type=float, default=1.0, show_default=True, help='Correcting power level')
@click.option('--p-lo', type=float, default=1e-4, show_default=True)
@click.option('--p-hi', type=float, default=0.5, show_default=True)
@table_options
@click.pass_context
def crossover(ctx: click.Context, code_name: str, **_: Any) -> None:
    """Physical error rate where the correcting power crosses a level."""
    try:
        _config(ctx)
        params = _params(ctx)
        code = get_code(code_name)
        table = _table(ctx, code, params)
        p_star = find_crossover(
            table,
            NoiseKind(params['noise']),
            params['alpha'],
            params['q'],
            params['target'],
            (params['p_lo'], params['p_hi']),
        )
        click.echo(f"{code.name},{params['noise']},{params['alpha']!r},{params['q']!r},{p_star!r}")
    except Exception as e:
        _fail(e)


def region_options(func: Callable[..., Any]) -> Callable[..., Any]:
    for option in reversed([
        click.option('--p-min', type=float, default=1e-3, show_default=True),
        click.option('--p-max', type=float, default=0.1, show_default=True),
        click.option('--p-steps', type=int, default=25, show_default=True),
        click.option('--spacing', type=click.Choice([s.value for s in Spacing]),
                     default=Spacing.LINEAR.value, show_default=True),
        click.option('--q-min', type=float, default=0.0, show_default=True),
        click.option('--q-max', type=float, default=0.01, show_default=True),
        click.option('--q-steps', type=int, default=21, show_default=True),
    ]):
        func = option(func)
    return func


def _grids(params: Dict[str, Any]) -> Tuple[List[float], List[float]]:
    return (
        p_grid(params['p_min'], params['p_max'], params['p_steps'], Spacing(params['spacing'])),
        q_grid(params['q_min'], params['q_max'], params['q_steps']),
    )


@main.command()
@click.argument('code_name')
@noise_options
@region_options
@click.option('--target', type=float, default=1.0, show_default=True)
@click.option('--refine', is_flag=True, help='Bisect contour points against the exact engine')
@table_options
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Grid CSV (default: stdout)')
@click.option('--contour-out', type=click.Path(dir_okay=False, path_type=Path),
              help='CSV of contour segments')
@click.pass_context
@handle_async
async def region(ctx: click.Context, code_name: str, **_: Any) -> None:
    """Region of correctability over (p, q)."""
    try:
        _config(ctx)
        params = _params(ctx)
        code = get_code(code_name)
        table = _table(ctx, code, params)
        kind = NoiseKind(params['noise'])
        p_values, q_values = _grids(params)
        result = await scan_region(
            table, kind, params['alpha'], p_values, q_values,
            params['target'], params['refine'], _log_sink(ctx),
        )

        rows = [sweep_row(evaluation) for evaluation in result.evaluations]
        if params.get('out'):
            with open(params['out'], 'w', newline='', encoding='utf-8') as handle:
                write_csv(rows, handle)
        else:
            write_csv(rows, sys.stdout)

        if params.get('contour_out'):
            with open(params['contour_out'], 'w', encoding='utf-8') as handle:
                handle.write("segment,p,q\n")
                for i, segment in enumerate(result.contours):
                    for p, q in segment:
                        handle.write(f"{i},{p!r},{q!r}\n")

        extent = region_extent(result)
        if extent.q_max is None:
            err_console.print(f"[yellow]{code.name}: no grid point with C > {params['target']}[/yellow]")
        else:
            err_console.print(
                f"[green]{code.name}: C > {params['target']} up to q={extent.q_max:.4g}, "
                f"p in [{extent.p_min:.4g}, {extent.p_max:.4g}][/green]"
            )
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_a')
@click.argument('code_b')
@noise_options
@region_options
@table_options
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Contour CSV (default: stdout)')
@click.pass_context
@handle_async
async def compare(ctx: click.Context, code_a: str, code_b: str, **_: Any) -> None:
    """Contour of equal correcting power between two codes."""
    try:
        _config(ctx)
        params = _params(ctx)
        first, second = get_code(code_a), get_code(code_b)
        table_a = _table(ctx, first, params)
        table_b = _table(ctx, second, params)
        p_values, q_values = _grids(params)
        result = await compare_codes(
            table_a, table_b, NoiseKind(params['noise']), params['alpha'], p_values, q_values
        )
        if result.degenerate:
            err_console.print(f"[yellow]{code_a} and {code_b} have equal power everywhere[/yellow]")

        lines = ["segment,p,q"] + [
            f"{i},{p!r},{q!r}" for i, segment in enumerate(result.contours) for p, q in segment
        ]
        text = "\n".join(lines) + "\n"
        if params.get('out'):
            Path(params['out']).write_text(text, encoding='utf-8')
        else:
            click.echo(text, nl=False)
        total = len(p_values) * len(q_values)
        err_console.print(f"{code_a} ahead at {result.a_wins}/{total} grid points")
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@click.option('--p', 'p', type=float, required=True)
@click.option('--q', 'q', type=float, default=0.0, show_default=True)
@noise_options
@click.option('--trials', type=int, default=100_000, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@table_options
@click.pass_context
def mc(ctx: click.Context, code_name: str, **_: Any) -> None:
    """Monte Carlo estimate of the logical error rate, checked against the exact value."""
    try:
        _config(ctx)
        params = _params(ctx)
        code = get_code(code_name)
        table = _table(ctx, code, params)
        model = make_noise(NoiseKind(params['noise']), params['p'], params['alpha'], params['q'])
        estimate = estimate_logical_error_rate(
            table, model, params['trials'], params['seed'], log=_log_sink(ctx)
        )
        exact = evaluate(table, model).p_l
        agree = binomial_band(estimate, exact)
        colour = "green" if agree else "red"
        console.print(
            f"{code.name}: p_L_hat={estimate.p_l_hat:.6g} ± {estimate.std_err:.2g} "
            f"({estimate.failures}/{estimate.trials}, seed={estimate.seed}) exact={exact:.6g} "
            f"[{colour}]{'within' if agree else 'outside'} 3σ[/{colour}]"
        )
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@click.option('--p', 'p', type=float, default=1e-3, show_default=True)
@noise_options
@table_options
@click.pass_context
def correctability(ctx: click.Context, code_name: str, **_: Any) -> None:
    """Which single-qubit errors the optimal decoder corrects."""
    try:
        _config(ctx)
        params = _params(ctx)
        code = get_code(code_name)
        table = _table(ctx, code, params)
        model = make_noise(NoiseKind(params['noise']), params['p'], params['alpha'])
        failures = single_qubit_correctability(table, model)

        out = Table(title=f"Single-qubit errors on {code.name}")
        out.add_column("Pauli", style="cyan")
        out.add_column("Corrected", justify="right")
        out.add_column("Failing qubits")
        for label in ("X", "Y", "Z"):
            failing = failures[label]
            out.add_row(
                label,
                f"{code.n_qubits - len(failing)}/{code.n_qubits}",
                ", ".join(str(q) for q in failing) or "-",
            )
        console.print(out)
    except Exception as e:
        _fail(e)


@main.command()
@click.argument('code_name')
@click.pass_context
def gauge(ctx: click.Context, code_name: str) -> None:
    """Show the gauge generators and stabilizer pairs of a subsystem code."""
    try:
        _config(ctx)
        code = get_code(code_name)
        if code.gauge is None:
            console.print(f"[yellow]{code.name} has no gauge structure[/yellow]")
            return
        console.print(
            f"{code.name}: {code.gauge.n_gauges} gauge generators, "
            f"{gauge_qubits(code)} gauge qubits, {measurement_repetitions(code)} copies per stabilizer, "
            f"k={code_dimension(code)}"
        )
        out = Table(title="Stabilizer pairs")
        out.add_column("Stabilizer", style="cyan")
        out.add_column("Operator")
        out.add_column("Pairs")
        for k, pairs in enumerate(code.gauge.stabilizer_pairs):
            out.add_row(
                str(k),
                code.stabilizer_generators[k].to_string(),
                "  ".join(f"({i},{j})" for i, j in pairs),
            )
        console.print(out)
    except Exception as e:
        _fail(e)


@main.command('show-table')
@click.argument('table_file', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--code', 'code_name', default=None, help='Expected code (default: the one named in the file)')
@click.pass_context
def show_table(ctx: click.Context, table_file: Path, code_name: Optional[str]) -> None:
    """Summarise a saved decoder table."""
    try:
        _config(ctx)
        code = get_code(code_name) if code_name else None
        table = load_table(table_file, code)
        total_ok, shells_ok = count_invariants(table)
        out = Table(title=str(table_file))
        out.add_column("Field", style="cyan")
        out.add_column("Value")
        out.add_row("code", table.code.name)
        out.add_row("hash", table.code_hash[:16])
        out.add_row("n_max", str(table.n_max))
        out.add_row("exact", str(table.exact))
        out.add_row("syndromes", str(table.n_syndromes))
        out.add_row("nonzero entries", str(int((table.counts > 0).sum())))
        out.add_row("total count", str(int(table.counts.sum())))
        out.add_row("count invariants", "ok" if total_ok and shells_ok else "[red]violated[/red]")
        console.print(out)
    except Exception as e:
        _fail(e)


if __name__ == "__main__":
    main()
