import argparse
import logging
import sys

from tandemtail.commands import (
    EXIT_INVALID_CONFIG,
    EXIT_UNSTABLE,
    run_command,
)
from tandemtail.config_controller import (
    BOUND_KINDS,
    CHECKS,
    COMMANDS,
    FIGURES,
    FORMATS,
    ConfigController,
)
from tandemtail.exceptions.common import TandemTailException, UnstableModelException

logger = logging.getLogger("tandemtail")


def _comma_list(choices):
    def parse(text: str) -> tuple:
        items = tuple(item.strip() for item in text.split(",") if item.strip())
        unknown = [item for item in items if item not in choices]
        if unknown:
            raise argparse.ArgumentTypeError(
                f"unknown value(s) {', '.join(unknown)}; choose from {', '.join(choices)}"
            )
        return items

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tandemtail",
        description="Tail bounds and simulations of end-to-end delays in tandem queues.",
    )
    parser.add_argument("command", choices=COMMANDS, help="Command to run.")
    parser.add_argument(
        "figure",
        nargs="?",
        choices=FIGURES,
        help="Figure to reproduce (figure command only).",
    )
    parser.add_argument("-c", "--config", type=str, help="Path to a JSON run configuration.")
    parser.add_argument("--seed", type=int, help="Experiment seed.")
    parser.add_argument("--runs", type=int, help="Number of simulated paths.")
    parser.add_argument("--path-len", type=int, help="Inter-arrival times per path.")
    parser.add_argument("--rho", type=float, help="Load; rescales the arrivals of the model.")
    parser.add_argument("-o", "--out", type=str, help="Output file (directory for figure).")
    parser.add_argument("--format", choices=FORMATS, help="Output format (default: csv).")
    parser.add_argument(
        "--kinds", type=_comma_list(BOUND_KINDS), help="Comma-separated bound kinds."
    )
    parser.add_argument(
        "--checks", type=_comma_list(CHECKS), help="Comma-separated verifier checks."
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs."
    )
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        if args.config:
            controller = ConfigController.load_from_file(args.config)
            controller.command = args.command
        else:
            controller = ConfigController(args.command)
        if args.figure is not None:
            controller.figure = args.figure
        controller.apply_overrides(
            seed=args.seed,
            runs=args.runs,
            path_len=args.path_len,
            rho=args.rho,
            output_path=args.out,
            format=args.format,
            bound_kinds=args.kinds,
            checks=args.checks,
        )
        return run_command(controller.build())
    except UnstableModelException as error:
        logger.error("%s", error)
        return EXIT_UNSTABLE
    except (TandemTailException, TypeError, ValueError) as error:
        logger.error("%s", error)
        return EXIT_INVALID_CONFIG


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
