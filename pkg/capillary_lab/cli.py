import argparse
import logging
from pathlib import Path
from typing import Optional, Sequence

from capillary_lab.config import ORDER_ENV_VAR, VERSION
from capillary_lab.exceptions import CapillaryLabError, HypothesisError
from capillary_lab.report import emit_csv, write_report
from capillary_lab.runner import ExperimentRunner, load_config
from capillary_lab.verdict import Verdict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESES = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capillary-lab",
        description="Stability of capillary hypersurfaces and convex-body inequalities",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    commands = parser.add_subparsers(dest="action", required=True)
    run = commands.add_parser("run", help="run one JSON experiment description")
    run.add_argument("config", type=Path, help="experiment config (JSON)")
    run.add_argument("--out", type=Path, default=None, help="report path (JSON)")
    run.add_argument("--csv", type=Path, default=None, help="table path (CSV)")
    run.add_argument(
        "--order",
        type=int,
        default=None,
        help=f"quadrature order; beats the config and {ORDER_ENV_VAR}",
    )
    run.add_argument("--seed", type=int, default=None, help="seed for random suites")
    run.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Exit status 0 on success, 2 when the classification hypotheses fail and 1
    on any other error.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config)
        with ExperimentRunner(order=args.order, seed=args.seed) as runner:
            report = runner.execute(config)
        out = args.out or config.get("output_path")
        if out:
            write_report(report, out)
            logger.info("Report written to %s", out)
        else:
            print(report.to_json(), end="")
        if args.csv:
            emit_csv(report, args.csv)
            logger.info("Table written to %s", args.csv)
    except HypothesisError as error:
        logger.error("%s", error)
        return EXIT_HYPOTHESES
    except (CapillaryLabError, OSError) as error:
        logger.error("%s", error)
        return EXIT_ERROR

    if report.verdict is not None:
        return Verdict(report.verdict).exit_code
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
