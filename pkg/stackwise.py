#!/usr/bin/env python3
"""
stackwise - Model-Based GUI Test Generation with Back-Stack-Aware Models
Main Entry Point
"""

import sys
import argparse
from pathlib import Path
from typing import Dict, List, Optional

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel

from core import __version__
from core.app_spec import load_app_spec
from core.exceptions import ModelFormatError, SpecParseError, SpecValidationError, StackwiseError, UnknownLabelError
from core.latte_model import load_model
from core.model_builder import EVENT_ORDERS, BuildConfig, brute_force_model, build_model, enumerate_runtime_states
from core.report_generator import ReportGenerator
from core.sim_runtime import format_trace, replay
from core.target_gen import Target, generate, load_suite
from modules.bench import RandomConfig, compare, random_explore, st_sweep
from utils.config_loader import ConfigLoader
from utils.logger import get_logger, setup_logger

console = Console()
err_console = Console(stderr=True)
logger = get_logger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_TRUNCATED = 2
EXIT_NOT_COVERED = 3

BANNER = f"""
╔══════════════════════════════════════════════════════╗
║   stackwise  ·  activity / back stack / events       ║
║   model-based GUI test generation  ·  v{__version__:<13}║
╚══════════════════════════════════════════════════════╝
"""


class StackwiseArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAILURE, f"{self.prog}: error: {message}\n")


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must be within [0, 1]: {text}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative: {text}")
    return value


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _non_negative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative: {text}")
    return value


def _threshold_list(text: str) -> List[float]:
    return [_unit_interval(item.strip()) for item in text.split(",") if item.strip()]


def _seed_list(text: str) -> List[int]:
    try:
        return [int(item.strip()) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers: {text!r}")


def _add_build_flags(parser: argparse.ArgumentParser, with_threshold: bool = True):
    parser.add_argument('--omega', type=_unit_interval,
                        help='Weight of view similarity against stack similarity (default: 0.5)')
    if with_threshold:
        parser.add_argument('--st', type=_unit_interval, dest='similarity_threshold',
                            help='Similarity threshold above which states merge (default: 0.8)')
    parser.add_argument('--max-events', type=_non_negative_int,
                        help='Event budget for model construction (default: unlimited)')
    parser.add_argument('--max-seconds', type=_non_negative_float, dest='max_wall_time',
                        help='Wall-clock bound for model construction in seconds (default: 10800)')
    parser.add_argument('--event-order', choices=EVENT_ORDERS,
                        help='Order in which a state\'s events are explored (default: position)')
    parser.add_argument('--no-status', action='store_true',
                        help='Ignore view statuses when comparing states (default: statuses tracked)')
    parser.add_argument('--no-stack', action='store_true',
                        help='Ignore back stacks when comparing states (default: stacks tracked)')


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    """Global options, accepted before or after the subcommand."""
    default = argparse.SUPPRESS if suppress else None
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-c', '--config', type=str, default=default,
                        help='Configuration file path (default: built-in defaults)')
    common.add_argument('-v', '--verbose', action='store_true',
                        default=argparse.SUPPRESS if suppress else False,
                        help='Enable verbose output')
    common.add_argument('--log-file', type=str, default=default,
                        help='Also write logs to this file')
    common.add_argument('--no-banner', action='store_true',
                        default=argparse.SUPPRESS if suppress else False,
                        help='Disable banner display')
    return common


def build_parser() -> argparse.ArgumentParser:
    """Build the command line parser."""
    parser = StackwiseArgumentParser(
        prog='stackwise',
        description="stackwise - model-based GUI test generation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[_common_flags(suppress=False)],
        epilog="""
Examples:
  Build a model:
    stackwise build apps/tomdroid.yaml --out model.json --dot model.dot

  Generate sequences for a target:
    stackwise target apps/tomdroid.yaml model.json --labels deleteNote,undeleteNote

  Compare against random exploration:
    stackwise compare apps/tomdroid.yaml --labels deleteNote,undeleteNote

Exit codes: 0 success, 1 invalid input, 2 build truncated, 3 target not covered
        """
    )
    parser.add_argument('--version', action='version', version=f'stackwise v{__version__}',
                        help='Show version and exit')

    sub_common = _common_flags(suppress=True)
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    validate = subparsers.add_parser('validate', parents=[sub_common], help='Check an app spec')
    validate.add_argument('spec', help='App spec file')
    validate.add_argument('--explore', action='store_true',
                          help='Also explore every reachable screen without merging and report the counts')

    build = subparsers.add_parser('build', parents=[sub_common], help='Build a model from an app spec')
    build.add_argument('spec', help='App spec file')
    _add_build_flags(build)
    build.add_argument('--out', default='model.json', help='Model JSON output (default: model.json)')
    build.add_argument('--dot', help='Also write the model as DOT to this path')
    build.add_argument('--report', help='Write the build report (JSON) to this path')
    build.add_argument('--progress', action='store_true', help='Show exploration progress')

    target = subparsers.add_parser('target', parents=[sub_common],
                                   help='Generate sequences covering target labels')
    target.add_argument('spec', help='App spec file')
    target.add_argument('model', help='Model JSON built from the app spec')
    target.add_argument('--labels', required=True, help='Comma-separated target labels')
    target.add_argument('--maxtry', type=_positive_int,
                        help='Candidate sequences per labelled transition (default: 5)')
    target.add_argument('--out', default='suite.json', help='Suite JSON output (default: suite.json)')

    replay_cmd = subparsers.add_parser('replay', parents=[sub_common], help='Replay a suite and log traces')
    replay_cmd.add_argument('spec', help='App spec file')
    replay_cmd.add_argument('suite', help='Suite JSON produced by target')
    replay_cmd.add_argument('--log', help='Trace log output (default: standard output)')

    random_cmd = subparsers.add_parser('random', parents=[sub_common], help='Random exploration baseline')
    random_cmd.add_argument('spec', help='App spec file')
    random_cmd.add_argument('--labels', required=True, help='Comma-separated target labels')
    random_cmd.add_argument('--seed', type=int, help='Random seed (default: 1)')
    random_cmd.add_argument('--batch', type=_positive_int, help='Events per batch (default: 1000)')
    random_cmd.add_argument('--max-batches', type=_non_negative_int, help='Batch cap (default: 50)')
    random_cmd.add_argument('--out', help='Write the result (JSON) to this path')

    sweep = subparsers.add_parser('sweep', parents=[sub_common], help='Model size across similarity thresholds')
    sweep.add_argument('spec', help='App spec file')
    sweep.add_argument('--thresholds', type=_threshold_list,
                       help='Comma-separated thresholds (default: 0,0.25,0.5,0.8,1.0)')
    _add_build_flags(sweep, with_threshold=False)
    sweep.add_argument('--out', help='Report output; format follows the extension (.json, .txt, .html)')
    sweep.add_argument('--timings', action='store_true', help='Include wall-clock times in the report')

    compare_cmd = subparsers.add_parser('compare', parents=[sub_common], help='Targeted vs random event counts')
    compare_cmd.add_argument('spec', help='App spec file')
    compare_cmd.add_argument('--labels', required=True, help='Comma-separated target labels')
    compare_cmd.add_argument('--seeds', type=_seed_list, help='Comma-separated random seeds (default: 1,2,3,4,5)')
    compare_cmd.add_argument('--batch', type=_positive_int, help='Events per batch (default: 1000)')
    compare_cmd.add_argument('--max-batches', type=_non_negative_int, help='Batch cap (default: 50)')
    compare_cmd.add_argument('--maxtry', type=_positive_int,
                             help='Candidate sequences per labelled transition (default: 5)')
    _add_build_flags(compare_cmd)
    compare_cmd.add_argument('--out', help='Comparison report (JSON) output')
    compare_cmd.add_argument('--text', help='Plain-text comparison table output')
    compare_cmd.add_argument('--timings', action='store_true', help='Include wall-clock times in the report')

    return parser


def display_banner():
    """Display the stackwise banner."""
    err_console.print(BANNER, style="bold cyan")


def _build_config(args: argparse.Namespace, config: Dict) -> BuildConfig:
    overrides = {
        'omega': args.omega,
        'similarity_threshold': getattr(args, 'similarity_threshold', None),
        'max_events': args.max_events,
        'max_wall_time': args.max_wall_time,
        'event_order': args.event_order,
    }
    if args.no_status:
        overrides['track_status'] = False
    if args.no_stack:
        overrides['track_stack'] = False
    return BuildConfig.from_config(config, **overrides)


def _write(path: str, content: str):
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(content, encoding='utf-8')


def cmd_validate(args: argparse.Namespace, config: Dict) -> int:
    try:
        spec = load_app_spec(args.spec)
    except SpecValidationError as e:
        for issue in e.issues:
            console.print(str(issue), style="bold red", markup=False, highlight=False)
        return EXIT_FAILURE
    console.print(f"[bold green]✓[/bold green] {spec.name}: {len(spec.activities)} activities, "
                  f"{len(spec.label_universe)} labels")

    if args.explore:
        oracle_config = config.get('oracle', {})
        state_cap = oracle_config.get('state_cap', 4096)
        model = brute_force_model(spec, oracle_config.get('depth_bound', 64), state_cap)
        console.print(Panel(
            f"""[bold]Screens:[/bold] {len(model.ordinary_states)}
[bold]Transitions:[/bold] {len(model.transitions)}
[bold]Runtime states:[/bold] {enumerate_runtime_states(spec, state_cap)}
[bold]Reachable labels:[/bold] {len(model.covered_labels())}/{len(spec.label_universe)}""",
            title="Exhaustive Exploration",
            border_style="cyan"
        ))
    return EXIT_OK


def cmd_build(args: argparse.Namespace, config: Dict) -> int:
    spec = load_app_spec(args.spec)
    cfg = _build_config(args, config)
    report = build_model(spec, cfg, show_progress=args.progress)

    _write(args.out, report.model.to_json() + "\n")
    if args.dot:
        _write(args.dot, report.model.to_dot())
    if args.report:
        ReportGenerator(config).generate(report.to_dict(), args.report, 'json')

    console.print(Panel(
        f"""[bold]App:[/bold] {spec.name}
[bold]States:[/bold] {len(report.model.ordinary_states)}
[bold]Transitions:[/bold] {len(report.model.transitions)}
[bold]Labels covered:[/bold] {len(report.model.covered_labels())}/{len(report.model.label_universe)}
[bold]Events fired:[/bold] {report.events_fired}
[bold]Merged / revisited:[/bold] {report.states_merged} / {report.states_revisited}
[bold]Truncated:[/bold] {report.truncated}""",
        title="Build Summary",
        border_style="cyan"
    ))
    return EXIT_TRUNCATED if report.truncated else EXIT_OK


def cmd_target(args: argparse.Namespace, config: Dict) -> int:
    spec = load_app_spec(args.spec)
    model = load_model(args.model)
    target = Target.parse(args.labels, spec.label_universe)
    generator_config = config.get('generator', {})
    maxtry = args.maxtry or generator_config.get('maxtry', 5)

    suite = generate(model, spec, target, maxtry=maxtry,
                     path_length_factor=generator_config.get('path_length_factor', 4))
    _write(args.out, suite.to_json() + "\n")

    missing = ", ".join(sorted(suite.missing_labels)) or "-"
    console.print(Panel(
        f"""[bold]Target:[/bold] {', '.join(sorted(target.labels))}
[bold]Sequences:[/bold] {len(suite.sequences)}
[bold]Total events:[/bold] {suite.total_events}
[bold]Rejected candidates:[/bold] {suite.rejected}
[bold]Uncovered transitions:[/bold] {len(suite.uncovered)}
[bold]Missing labels:[/bold] {missing}""",
        title="Targeted Suite",
        border_style="cyan"
    ))
    return EXIT_OK if suite.complete else EXIT_NOT_COVERED


def cmd_replay(args: argparse.Namespace, config: Dict) -> int:
    spec = load_app_spec(args.spec)
    sequences = load_suite(args.suite)
    lines = []
    infeasible = 0
    for number, sequence in enumerate(sequences):
        trace = replay(spec, sequence)
        lines.append(f"# sequence {number}")
        lines.extend(format_trace(trace))
        if not trace.feasible:
            infeasible += 1
            logger.warning(f"Sequence {number} is infeasible at event {trace.infeasible_at}")

    content = "\n".join(lines) + "\n"
    if args.log:
        _write(args.log, content)
    else:
        sys.stdout.write(content)
    return EXIT_NOT_COVERED if infeasible else EXIT_OK


def cmd_random(args: argparse.Namespace, config: Dict) -> int:
    spec = load_app_spec(args.spec)
    target = Target.parse(args.labels, spec.label_universe)
    cfg = RandomConfig.from_config(config, seed=args.seed, batch=args.batch, max_batches=args.max_batches)
    result = random_explore(spec, target, cfg)

    if args.out:
        ReportGenerator(config).generate(result.to_dict(), args.out, 'json')
    outcome = result.events_to_cover if result.covered else "not covered"
    console.print(Panel(
        f"""[bold]Seed:[/bold] {result.seed}
[bold]Events to cover:[/bold] {outcome}
[bold]Labels covered:[/bold] {len(result.coverage.labels_covered)}/{result.coverage.labels_total}
[bold]Screens visited:[/bold] {result.coverage.screens_visited}
[bold]Restarts:[/bold] {result.coverage.restarts}""",
        title="Random Exploration",
        border_style="cyan"
    ))
    return EXIT_OK if result.covered else EXIT_NOT_COVERED


def cmd_sweep(args: argparse.Namespace, config: Dict) -> int:
    spec = load_app_spec(args.spec)
    cfg = _build_config(args, config)
    thresholds = args.thresholds or config.get('sweep', {}).get('thresholds', [0, 0.25, 0.5, 0.8, 1.0])
    rows = st_sweep(spec, thresholds, cfg, workers=config.get('bench', {}).get('workers', 1))

    results = {
        'title': f"Threshold sweep: {spec.name}",
        'app': spec.name,
        'rows': [row.to_dict(include_timings=args.timings) for row in rows],
    }
    generator = ReportGenerator(config)
    if args.out:
        generator.generate(results, args.out, generator.format_for(args.out))
    sys.stdout.write(generator.render_text(results))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, config: Dict) -> int:
    spec = load_app_spec(args.spec)
    target = Target.parse(args.labels, spec.label_universe)
    build_cfg = _build_config(args, config)
    random_cfg = RandomConfig.from_config(config, batch=args.batch, max_batches=args.max_batches)
    seeds = args.seeds or config.get('random', {}).get('seeds', [1, 2, 3, 4, 5])
    generator_config = config.get('generator', {})
    maxtry = args.maxtry or generator_config.get('maxtry', 5)

    report = compare(spec, target, build_cfg, random_cfg, seeds, maxtry,
                     path_length_factor=generator_config.get('path_length_factor', 4),
                     workers=config.get('bench', {}).get('workers', 1))

    if args.out:
        _write(args.out, report.to_json(include_timings=args.timings) + "\n")
    if args.text:
        _write(args.text, report.to_text())
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.suite.complete else EXIT_NOT_COVERED


COMMANDS = {
    'validate': cmd_validate,
    'build': cmd_build,
    'target': cmd_target,
    'replay': cmd_replay,
    'random': cmd_random,
    'sweep': cmd_sweep,
    'compare': cmd_compare,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit status."""
    args = build_parser().parse_args(argv)

    config = ConfigLoader.load(args.config)
    logging_config = config.get('logging', {})
    level = 'DEBUG' if args.verbose else logging_config.get('level', 'INFO')
    setup_logger(level=level, log_file=args.log_file or logging_config.get('file'))

    if not args.no_banner:
        display_banner()

    try:
        return COMMANDS[args.command](args, config)
    except (SpecParseError, SpecValidationError) as e:
        err_console.print(f"[bold red]Invalid app spec:[/bold red] {escape(str(e))}", highlight=False)
        if isinstance(e, SpecValidationError):
            for issue in e.issues:
                err_console.print(f"  {issue}", markup=False, highlight=False)
        return EXIT_FAILURE
    except (UnknownLabelError, ModelFormatError, ValueError) as e:
        err_console.print(f"[bold red]Error:[/bold red] {escape(str(e))}", highlight=False)
        return EXIT_FAILURE
    except (OSError, StackwiseError) as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_FAILURE


def main():
    """Main execution function."""
    try:
        sys.exit(run())
    except KeyboardInterrupt:
        err_console.print("\n[bold yellow]Interrupted by user[/bold yellow]")
        sys.exit(EXIT_FAILURE)
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
