"""Commands of macap-cli."""
import click
from click_repl import register_repl

from macap_cli.benchmarks import Scheme, initial_layouts, run_fpa
from macap_cli.capacity import metrics_of
from macap_cli.channel import assemble_channel
from macap_cli.decorators import format_output, print_result, with_experiment_config, with_library_errors
from macap_cli.harness import (emit_csv, emit_trace_csv, experiment_scene, format_csv, format_trace_csv,
                               run_convergence_trace, run_experiment)
from macap_cli.macap import macap
from macap_cli.param_types import FloatList, IntList, SchemeList
from macap_cli.records import (load_scene, metrics_to_json, report_to_json, save_json, scene_to_json)
from macap_cli.solver import MODES, solve_mode

_grid_options = [
    click.option('--tx-count', '-N', type=int, help='Transmit antennas'),
    click.option('--rx-count', '-M', type=int, help='Receive antennas'),
    click.option('--paths', '-L', type=IntList(), help='Paths per side, comma separated'),
    click.option('--region-sizes', '-A', type=FloatList(), help='Square region side in wavelengths, comma separated'),
    click.option('--snr-db', type=FloatList(), help='SNR P/noise in dB, comma separated'),
    click.option('--min-distance', type=float, help='Minimum antenna spacing in wavelengths'),
    click.option('--seed', type=int, help='Master seed'),
    click.option('--wavelength', type=float, help='Carrier wavelength in meters'),
]

_solver_options = [
    click.option('--eps-inner', type=float, help='Relative threshold of the per-antenna iterations'),
    click.option('--eps-outer', type=float, help='Relative threshold of the outer iterations'),
    click.option('--max-outer-iters', type=int, help='Outer iteration limit'),
    click.option('--max-inner-iters', type=int, help='Per-antenna iteration limit'),
    click.option('--search-spacing', type=float, help='Spacing of the grid seeding each antenna move, in wavelengths; 0 disables'),
]

def _apply(options):
    def decorator(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return decorator

def _scene_for(cfg, realization, scene_file):
    if scene_file:
        return load_scene(scene_file)
    return experiment_scene(cfg, cfg.paths[0], cfg.region_sizes[0], realization)

@macap.command()
@_apply(_grid_options + _solver_options)
@click.option('--mode', type=click.Choice(MODES), default='full', help='full|sepm|miso|simo')
@click.option('--realization', type=int, default=0, help='Realization index the scene is drawn for')
@click.option('--scene', 'scene_file', type=click.Path(exists=True, dir_okay=False), help='Load the scene from a file')
@click.option('--save-scene', type=click.Path(dir_okay=False), help='Write the scene to a file')
@click.option('--save-report', type=click.Path(dir_okay=False), help='Write the report to a file')
@with_library_errors
@with_experiment_config
@print_result
def solve(cfg, mode, realization, scene_file, save_scene, save_report):
    """Optimize antenna positions on one scene.

    Uses the first value of every sweep list. Starts from circle packing
    layouts; in miso/simo mode the single antenna starts at the region center.
    """
    scene = _scene_for(cfg, realization, scene_file)
    if save_scene:
        save_json(scene_to_json(scene), save_scene)
    tx_count = 1 if mode == 'simo' else cfg.tx_count
    rx_count = 1 if mode == 'miso' else cfg.rx_count
    tx, rx = initial_layouts(scene, tx_count, rx_count)
    report = solve_mode(scene, tx, rx, cfg.solver_config(cfg.snr_db[0], mode))
    result = report_to_json(report)
    if save_report:
        save_json(result, save_report)
    return result

@macap.command()
@_apply(_grid_options + _solver_options)
@click.option('--realizations', '-n', type=int, help='Scenes to average over')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='CSV file to write instead of printing')
@with_library_errors
@with_experiment_config
@print_result
def trace(cfg):
    """Mean capacity per outer iteration of the proposed scheme at one grid point."""
    result = run_convergence_trace(cfg)
    if cfg.output:
        emit_trace_csv(result, cfg.output)
        return {'output': cfg.output, 'iterations': len(result.rows), 'failures': result.failures}
    return format_trace_csv(result).rstrip('\n')

@macap.command()
@_apply(_grid_options + _solver_options)
@click.option('--realizations', '-n', type=int, help='Scenes to average over per grid point')
@click.option('--schemes', type=SchemeList(), help='Comma separated scheme tags or all')
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='CSV file to write instead of printing')
@with_library_errors
@with_experiment_config
@print_result
def sweep(cfg):
    """Compare schemes over the (L, A, SNR) grid."""
    rows = run_experiment(cfg)
    if cfg.output:
        emit_csv(rows, cfg.output)
        return {'output': cfg.output, 'rows': len(rows), 'failures': sum(r.failures for r in rows)}
    return format_csv(rows).rstrip('\n')

@macap.command()
@print_result
def schemes():
    """Show the scheme tags accepted by sweep."""
    return [s.value for s in Scheme]

@macap.group(name='scene')
def scene_group():
    """Create and inspect channel scenes."""

@scene_group.command(name='new')
@_apply(_grid_options)
@click.option('--realization', type=int, default=0, help='Realization index the scene is drawn for')
@click.argument('path', type=click.Path(dir_okay=False), required=False)
@with_library_errors
@with_experiment_config
def scene_new(cfg, realization, path):
    """Draw a random scene and write it to PATH (or print it)."""
    scene = _scene_for(cfg, realization, None)
    if path:
        save_json(scene_to_json(scene), path)
    else:
        click.echo(format_output(scene_to_json(scene)))

@scene_group.command(name='show')
@_apply(_grid_options[:2] + [_grid_options[4]])
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@with_library_errors
@with_experiment_config
@print_result
def scene_show(cfg, path):
    """Print the scene in PATH with its fixed-array and initial-layout metrics."""
    scene = load_scene(path)
    solver_cfg = cfg.solver_config(cfg.snr_db[0])
    fpa = run_fpa(scene, solver_cfg, cfg.tx_count, cfg.rx_count)
    tx, rx = initial_layouts(scene, cfg.tx_count, cfg.rx_count)
    initial = metrics_of(assemble_channel(scene, tx, rx), solver_cfg.power, solver_cfg.noise)
    return {
        'scene': scene_to_json(scene),
        'snr_db': cfg.snr_db[0],
        'fpa': metrics_to_json(fpa.metrics),
        'initial': metrics_to_json(initial),
    }

def main():
    register_repl(macap)
    macap()
