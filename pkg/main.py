#!/usr/bin/env python3
"""
Command-line entry point for the log-sum inequality verifier.

Runs property suites, the contractive counterexample search, one-shot
operation evaluation, trial replay and the JSON API server.

Exit codes: 0 success, 1 inequality violations found, 2 usage or
configuration error, 3 numeric failure.
"""

import logging
import os
import subprocess
import sys
from typing import Dict, Optional, Tuple

import click

from config import Config
from modules.errors import ConfigError, VerificationError
from modules.harness import SEARCH_MODES, SUITES, TrialConfig, counterexample_search, replay_trial, run_suite
from modules.matfun import matrix_from_exchange, to_exchange
from modules.operations import evaluate_operation, list_operations
from modules.report_storage import ReportStorage


def _fail(e: VerificationError) -> None:
    click.echo(f"❌ {type(e).__name__}: {e}", err=True)
    sys.exit(e.exit_code)


def _trial_config(suite: str, trials: int, seed: int, dim: int, m: int, tol: Optional[float],
                  spectrum: Optional[Tuple[float, float]], structure: str,
                  function: Optional[str], workers: int, config_path: Optional[str]) -> TrialConfig:
    if config_path:
        data = ReportStorage.load_document(config_path)
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path} must hold a JSON object")
        data.setdefault('suite', suite)
        return TrialConfig.from_dict(data)
    return TrialConfig(
        suite=suite, trials=trials, seed=seed, dim=dim, family_size=m, tolerance=tol,
        spectrum_range=spectrum, structure=structure, function=function, workers=workers,
    )


def _summarize(report, report_path: Optional[str], as_json: bool) -> None:
    click.echo(f"📊 {report.suite}: {report.trials} trials, {report.violations} violations")
    if report.worst_gap is not None:
        click.echo(f"   worst gap {report.worst_gap:.6e} at trial {report.worst_case_trial} "
                   f"(trial seed {report.worst_case_seed})")
    if report.generation_failures:
        click.echo(f"   {report.generation_failures} instances regenerated")
    click.echo(f"⏱️  {report.wall_time:.2f}s")
    if report_path:
        ReportStorage.write(report, report_path)
        click.echo(f"💾 Report written to {report_path}")
    if as_json:
        click.echo(ReportStorage.dumps(report), nl=False)


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Enable debug logging')
def cli(verbose):
    """Verify generalized log-sum inequalities numerically."""
    level = logging.DEBUG if verbose else getattr(logging, str(Config.LOG_LEVEL).upper(), logging.INFO)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


@cli.command()
@click.option('--suite', required=True, help='Registered suite name (see `suites`)')
@click.option('--trials', type=int, default=Config.DEFAULT_TRIALS, show_default=True)
@click.option('--seed', type=int, default=Config.DEFAULT_SEED, show_default=True)
@click.option('--dim', type=int, default=3, show_default=True, help='Matrix dimension n')
@click.option('--m', 'm', type=int, default=2, show_default=True, help='Family size')
@click.option('--tol', type=float, default=None, help='Verdict tolerance override')
@click.option('--spectrum', type=(float, float), default=None, help='Eigenvalue range LO HI')
@click.option('--structure', type=click.Choice(['general', 'commuting']), default='general')
@click.option('--function', 'function', default=None, help='Function override, e.g. power:0.5')
@click.option('--workers', type=int, default=1, show_default=True)
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
              help='TrialConfig JSON document; overrides the options above')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), help='Write the report here')
@click.option('--json', 'as_json', is_flag=True, help='Print the full report')
def check(suite, trials, seed, dim, m, tol, spectrum, structure, function, workers,
          config_path, report_path, as_json):
    """Run a property suite over random instances."""
    try:
        config = _trial_config(suite, trials, seed, dim, m, tol, spectrum, structure,
                               function, workers, config_path)
        click.echo(f"🧪 Checking {config.suite} ({config.trials} trials, seed {config.seed})")
        report = run_suite(config)
    except VerificationError as e:
        _fail(e)

    _summarize(report, report_path, as_json)
    if report.violations:
        if report.extras.get('expects_violations'):
            click.echo("⚠️  Violations found (this suite checks a form known to fail)")
        else:
            click.echo("❌ Violations found")
        sys.exit(1)
    click.echo("✅ No violations")


@cli.command()
@click.option('--mode', type=click.Choice(SEARCH_MODES), default='contractive', show_default=True)
@click.option('--trials', type=int, default=Config.DEFAULT_TRIALS, show_default=True)
@click.option('--seed', type=int, default=Config.DEFAULT_SEED, show_default=True)
@click.option('--dim', type=int, default=3, show_default=True)
@click.option('--m', 'm', type=int, default=2, show_default=True)
@click.option('--tol', type=float, default=None)
@click.option('--function', 'function', default=None, help='Operator concave function, default power:0.5')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False))
@click.option('--json', 'as_json', is_flag=True)
def search(mode, trials, seed, dim, m, tol, function, report_path, as_json):
    """Search contractive families for summed-perspective counterexamples."""
    try:
        config = TrialConfig(suite='theorem6', trials=trials, seed=seed, dim=dim,
                             family_size=m, tolerance=tol, function=function)
        click.echo(f"🔎 Searching {mode} families ({trials} trials, seed {seed})")
        report = counterexample_search(config, mode)
    except VerificationError as e:
        _fail(e)

    _summarize(report, report_path, as_json)
    click.echo(f"   {report.extras['candidates']} candidates, {report.extras['confirmed']} confirmed, "
               f"{report.extras['rejected']} rejected on recheck")


def _matrix_option(ctx, param, values) -> Dict[str, str]:
    matrices = {}
    for value in values:
        name, sep, path = value.partition('=')
        if not sep or not name or not path:
            raise click.BadParameter(f"expected NAME=PATH, got {value!r}")
        if not os.path.isfile(path):
            raise click.BadParameter(f"matrix file {path} does not exist")
        matrices[name] = path
    return matrices


@cli.command(name='eval')
@click.option('--op', 'op', required=True, help='Operation name (see `suites`)')
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='JSON argument document')
@click.option('--matrix', 'matrices', multiple=True, callback=_matrix_option,
              help='NAME=PATH; read argument NAME from an exchange-format matrix file')
@click.option('--output', 'output_path', type=click.Path(dir_okay=False), help='Write the result here')
@click.option('--matrix-output', 'matrix_output', type=click.Path(dir_okay=False),
              help='Write a matrix-valued result here in exchange format')
def eval_op(op, input_path, matrices, output_path, matrix_output):
    """Evaluate one operation on a JSON argument document."""
    try:
        args = ReportStorage.load_document(input_path)
        if matrices and not isinstance(args, dict):
            raise ConfigError(f"{input_path} must hold a JSON object")
        for name, path in matrices.items():
            args[name] = to_exchange(ReportStorage.load_matrix(path, hermitian=False))
        result = evaluate_operation(op, args)
        if matrix_output:
            value = result['result']
            if not (isinstance(value, dict) and 're' in value):
                raise ConfigError(f"{op} does not return a matrix")
            ReportStorage.save_matrix(matrix_from_exchange(value, hermitian=False), matrix_output)
    except VerificationError as e:
        _fail(e)

    text = ReportStorage.dumps(result)
    if output_path:
        ReportStorage.write(result, output_path)
    click.echo(text, nl=False)
    if result['holds'] is False:
        sys.exit(1)


@cli.command()
@click.option('--suite', required=True)
@click.option('--trial-seed', type=int, required=True, help='Trial seed from a report')
@click.option('--dim', type=int, default=3, show_default=True)
@click.option('--m', 'm', type=int, default=2, show_default=True)
@click.option('--tol', type=float, default=None)
@click.option('--spectrum', type=(float, float), default=None)
@click.option('--structure', type=click.Choice(['general', 'commuting']), default='general')
@click.option('--function', 'function', default=None)
def replay(suite, trial_seed, dim, m, tol, spectrum, structure, function):
    """Rebuild and re-evaluate the instance behind a reported trial seed."""
    try:
        config = TrialConfig(suite=suite, trials=1, dim=dim, family_size=m, tolerance=tol,
                             spectrum_range=spectrum, structure=structure, function=function)
        instance, verdicts = replay_trial(config, trial_seed)
    except VerificationError as e:
        _fail(e)

    click.echo(ReportStorage.dumps({
        'instance': instance.to_dict(),
        'verdicts': [v.to_dict() for v in verdicts],
    }), nl=False)
    if not all(v.holds for v in verdicts):
        sys.exit(1)


@cli.command()
def suites():
    """List registered suites and operations."""
    click.echo("🧪 Suites:")
    for name in sorted(SUITES):
        suite = SUITES[name]
        marker = ' (expected to fail)' if suite.expects_violations else ''
        click.echo(f"  {name:<28} {suite.description}{marker}")
    click.echo()
    click.echo("🔧 Operations:")
    for name in list_operations():
        click.echo(f"  {name}")


@cli.command()
@click.option('--host', default='localhost', show_default=True)
@click.option('--port', type=int, default=5000, show_default=True)
@click.option('--debug', is_flag=True)
def serve(host, port, debug):
    """Run the JSON API."""
    from app import create_app

    click.echo(f"🌐 Starting server on http://{host}:{port}")
    if debug:
        click.echo("🐛 Debug mode enabled")
    click.echo("⏹️  Press Ctrl+C to stop the server")
    create_app().run(host=host, port=port, debug=debug)


@cli.command(name='test')
@click.option('--marker', '-m', type=click.Choice(['unit', 'integration', 'slow', 'routes', 'cli']),
              multiple=True, help='Run only tests with these markers')
@click.option('--pattern', '-k', default=None, help='Run tests matching pattern')
def run_tests(marker, pattern):
    """Run the test suite through pytest."""
    cmd = ['pytest', 'tests/']
    if marker:
        cmd.extend(['-m', ' or '.join(marker)])
    if pattern:
        cmd.extend(['-k', pattern])
    click.echo(f"🏃 Running command: {' '.join(cmd)}")
    try:
        result = subprocess.run(cmd, check=False)
    except FileNotFoundError:
        click.echo("❌ pytest not found. Install the dev dependencies with: poetry install", err=True)
        sys.exit(2)
    click.echo("✅ All tests passed successfully!" if result.returncode == 0
               else "❌ Some tests failed. See output above for details.")
    sys.exit(result.returncode)


def main():
    cli()


if __name__ == '__main__':
    main()
