"""
Command line front end

Usage:
    python run_geotherm.py run fig7
    python run_geotherm.py run my_model.conf --output-dir out
    python run_geotherm.py verify pmi-4-5/2
    python run_geotherm.py presets
    python run_geotherm.py show-model fig1
"""

import argparse
import logging
from typing import List, Optional

from geotherm import __version__
from geotherm.app.config import build_model, list_presets, load_spec, preset_alias
from geotherm.app.errors import ConfigError, ExpressionBlowup
from geotherm.app.models import thermo_quantities
from geotherm.app.runner import EXIT_CONFIG, EXIT_INTERRUPTED, EXIT_NUMERIC, run
from geotherm.app.verify import BUILTIN_SUITES, verify

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geotherm",
        description="Thermodynamic geometry of black holes: heat capacity and curvature singularities",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="Run sweeps and the coincidence report")
    run_parser.add_argument("config", help="Config file or preset name")
    run_parser.add_argument("--output-dir", help="Output root (default: output.directory or GEOTHERM_OUTPUT_DIR)")

    verify_parser = sub.add_parser("verify", help="Run the verification checks")
    verify_parser.add_argument("suite", help=f"Builtin suite ({', '.join(BUILTIN_SUITES)}), config file or preset")

    sub.add_parser("presets", help="List presets")

    show_parser = sub.add_parser("show-model", help="Print M, T, Phi_e, C_Q and f")
    show_parser.add_argument("config", help="Config file or preset name")
    return parser


def cmd_run(args) -> int:
    spec = load_spec(args.config)
    result = run(spec, args.output_dir)
    if result.output_dir is not None:
        print(f"{result.output_dir}: {result.message}")
    else:
        print(result.message)
    return result.exit_code


def cmd_verify(args) -> int:
    result = verify(args.suite)
    if result.checks:
        print(result.table().to_string(index=False))
    print(f"{result.suite}: {result.message}")
    return result.exit_code


def cmd_presets(args) -> int:
    for name, description in list_presets():
        alias = preset_alias(name)
        print(f"{name:20s} {alias or '':22s} {description}")
    return 0


def cmd_show_model(args) -> int:
    spec = load_spec(args.config)
    model = build_model(spec.model)
    q = thermo_quantities(model)
    print(f"variables: {', '.join(model.vars)}")
    print(f"M     = {model.potential.display()}")
    print(f"T     = {q.T.display()}")
    if q.Phi_e is not None:
        print(f"Phi_e = {q.Phi_e.display()}")
    if q.L is not None:
        print(f"L     = {q.L.display()}")
    print(f"C_Q   = {q.C_Q.display() if q.C_Q is not None else 'undefined'}")
    print(f"f     = {q.f.display()}")
    return 0


COMMANDS = {
    "run": cmd_run,
    "verify": cmd_verify,
    "presets": cmd_presets,
    "show-model": cmd_show_model,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Config error: {e}")
        return EXIT_CONFIG
    except ExpressionBlowup as e:
        logger.error(f"Numeric failure: {e}")
        return EXIT_NUMERIC
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INTERRUPTED
