"""
Main entry point for the Bogoliubov toolkit command line.
"""

import sys
import logging
import argparse
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import List, Optional

from core.command_runner import CommandRunner, RunConfig, EXIT_USAGE
from core.errors import BogoliubovError
from core.sequence_library import SequenceLibrary
from core.settings_manager import SettingsManager

# Application version
VERSION = "0.3"

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_dir: str = "logs", verbose: bool = False):
    """Setup application logging."""
    root_logger = logging.getLogger()
    if any(getattr(h, "_toolkit_handler", False) for h in root_logger.handlers):
        return

    log_path = Path(log_dir)
    log_path.mkdir(parents=True, exist_ok=True)
    log_file = log_path / "bogoliubov_toolkit.log"

    handler = RotatingFileHandler(
        log_file, maxBytes=10*1024*1024, backupCount=5
    )
    handler.setLevel(logging.DEBUG)

    # Console goes to stderr so stdout stays machine-readable
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO if verbose else logging.WARNING)

    formatter = logging.Formatter(LOG_FORMAT)
    handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)
    handler._toolkit_handler = True
    console_handler._toolkit_handler = True

    root_logger.setLevel(logging.DEBUG)
    root_logger.addHandler(handler)
    root_logger.addHandler(console_handler)


def _key_value(text: str) -> tuple:
    if '=' not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got '{text}'")
    key, value = text.split('=', 1)
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bogoliubov-toolkit",
        description="Validate, decompose, classify and diagonalize Bogoliubov transformations.",
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {VERSION}")
    parser.add_argument('--config', help="settings file (JSON or key = value lines)")
    parser.add_argument('--db', default="bogoliubov_toolkit.db", help="settings database path")
    parser.add_argument('--log-dir', default="logs")
    parser.add_argument('--verbose', action='store_true')
    parser.add_argument('--tol', type=float)
    parser.add_argument('--cutoff', type=int)
    parser.add_argument('--sectors', type=int)
    parser.add_argument('--radius', type=int)
    parser.add_argument('--steps', type=int)
    parser.add_argument('--horizon', type=int)
    parser.add_argument('--threads', type=int)
    parser.add_argument('--out')
    parser.add_argument('--format', dest='output_format', choices=['json', 'csv'])
    parser.add_argument('--no-cache', dest='use_cache', action='store_false')

    commands = parser.add_subparsers(dest='command', required=True)

    for name, target in (('validate', "map JSON file"), ('decompose', "map JSON file"),
                         ('diagonalize', "Hamiltonian JSON file")):
        sub = commands.add_parser(name)
        sub.add_argument('inputs', nargs=1, metavar='FILE', help=target)

    classify = commands.add_parser('classify', help="implementability of a map or a model family")
    classify.add_argument('inputs', nargs='*', metavar='FILE')
    classify.add_argument('--model', help="wick or bcs instead of a map file")
    classify.add_argument('--param', dest='params', action='append', type=_key_value, default=[])

    simulate = commands.add_parser('simulate', help="truncated Fock-space checks")
    simulate.add_argument('inputs', nargs='*', metavar='FILE')
    simulate.add_argument('--xi', type=float, help="single bosonic squeeze instead of a map file")

    sweep = commands.add_parser('sweep', help="model sweeps (wick, wick-probe, bcs, qed)")
    sweep.add_argument('model')
    sweep.add_argument('--param', dest='params', action='append', type=_key_value, default=[])
    sweep.add_argument('--radii', type=int, nargs='+', default=[])
    sweep.add_argument('--momenta', type=float, nargs='+', default=[])
    sweep.add_argument('--times', type=float, nargs='+', default=[])

    itp = commands.add_parser('itp', help="formal-sum and product-vector classifiers")
    itp.add_argument('mode', choices=['ren1', 'family', 'equivalence', 'phase', 'form-factor'])
    itp.add_argument('inputs', nargs='+', metavar='TEMPLATE', help="template name and arguments")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0

    setup_logging(args.log_dir, args.verbose)
    logger = logging.getLogger(__name__)
    logger.info(f"Starting Bogoliubov toolkit {VERSION}: {args.command}")

    settings_manager = SettingsManager(args.db)
    try:
        try:
            if args.config:
                settings_manager.load_config_file(args.config)
            overrides = {
                key: getattr(args, key, None)
                for key in ('tol', 'cutoff', 'sectors', 'radius', 'steps', 'horizon', 'threads',
                            'output_format', 'out', 'model', 'radii', 'momenta', 'times', 'xi', 'mode')
            }
            overrides['inputs'] = list(getattr(args, 'inputs', []) or [])
            overrides['params'] = dict(getattr(args, 'params', []) or [])
            overrides['use_cache'] = args.use_cache
            config = RunConfig.from_settings(settings_manager, args.command, **overrides)
        except BogoliubovError as e:
            logger.error(f"Bad configuration: {e}")
            return EXIT_USAGE

        runner = CommandRunner(settings_manager, SequenceLibrary(settings_manager))
        exit_code = runner.run(config)
    finally:
        settings_manager.close()
    logger.info("Toolkit exited")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
