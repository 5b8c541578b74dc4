"""Main entry point for persuasion scenarios."""
import sys
from argparse import ArgumentParser, ArgumentTypeError, Namespace
from asyncio import run
from time import time
from typing import List, Optional

from src.config import SCENARIOS, ScenarioConfig, SweepSpec
from src.exceptions import NumericalException, ProblemException, ScenarioConfigException
from src.helpers import is_valid_float_list, parse_float_list
from src.logger import init_logger, set_quiet
from src.output import CsvSink
from src.presets import list_presets, preset_config
from src.runner import ScenarioRunner

logger = init_logger()

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3

# flags that set the scenario parameter of the same name
FLAG_PARAMETERS = (
    "rho",
    "mu0",
    "payoffs",
    "sigma",
    "cost",
    "alpha",
    "theta_low",
    "theta_high",
    "betas",
)


def float_list(text: str) -> List[float]:
    """Argparse type for comma separated floats."""
    if not is_valid_float_list(text):
        raise ArgumentTypeError(f"expected comma separated numbers, got {text!r}")
    return parse_float_list(text)


def build_parser() -> ArgumentParser:
    """Command-line parser of the persuade program."""
    parser = ArgumentParser(
        prog="persuade",
        description="Persuasion of wishful and Bayesian receivers; results as CSV.",
    )
    parser.add_argument("scenario", nargs="?", choices=SCENARIOS, help="scenario to run")
    parser.add_argument("--config", type=str, help="JSON scenario config file")
    parser.add_argument("--out", type=str, help="write CSV to FILE instead of standard output")
    parser.add_argument("--preset", type=str, help="named scenario config, see --list-presets")
    parser.add_argument("--list-presets", action="store_true", help="list presets and exit")
    parser.add_argument("--quiet", action="store_true", help="only log warnings and errors")

    # parameter flags, applied over preset and config file
    parser.add_argument("--rho", type=float, help="self-deception ability")
    parser.add_argument("--mu0", type=float, help="prior probability of the high state")
    parser.add_argument(
        "--payoffs", type=float_list, help="u_low_0,u_high_0,u_low_1,u_high_1 (binary)"
    )
    parser.add_argument("--sigma", type=float, help="disease severity (health)")
    parser.add_argument("--cost", type=float, help="treatment cost (health)")
    parser.add_argument("--alpha", type=float, help="treatment efficacy (health)")
    parser.add_argument("--theta-low", dest="theta_low", type=float, help="low risk (health)")
    parser.add_argument("--theta-high", dest="theta_high", type=float, help="high risk (health)")
    parser.add_argument("--betas", type=float_list, help="voter preferences (voting)")
    parser.add_argument(
        "--set",
        dest="assignments",
        action="append",
        default=[],
        metavar="KEY=JSON",
        help="set any scenario parameter, e.g. --set 'mu0=[0.3,0.3,0.4]'",
    )
    parser.add_argument("--sweep", type=str, metavar="PARAM:FROM:TO:STEPS", help="sweep a parameter")
    return parser


def load_config(args: Namespace) -> ScenarioConfig:
    """
    Assemble the config from preset, config file and flags, in that precedence order.

    :param args: Parsed command-line arguments.
    :type args: Namespace
    :raises ScenarioConfigException: If the sources disagree on the scenario or none names one.
    :return: The config.
    :rtype: ScenarioConfig
    """
    config = None
    if args.preset:
        config = preset_config(args.preset)
    if args.config:
        from_file = ScenarioConfig.from_file(args.config)
        config = from_file if config is None else config.merge(from_file)
    if config is None:
        if args.scenario is None:
            raise ScenarioConfigException("Name a scenario, a --preset or a --config file")
        config = ScenarioConfig(args.scenario)
    elif args.scenario is not None and args.scenario != config.scenario:
        raise ScenarioConfigException(
            f"Scenario {args.scenario!r} does not match configured scenario {config.scenario!r}"
        )

    for key in FLAG_PARAMETERS:
        value = getattr(args, key)
        if value is not None:
            config.override(key, value)
    for assignment in args.assignments:
        config.override_from_text(assignment)
    if args.sweep:
        config.sweep = SweepSpec.from_flag(args.sweep)
    return config


async def main(argv: Optional[List[str]] = None) -> int:
    """
    Run a persuasion scenario and write its CSV table.

    Usage:
    1. Reproduce a figure's data:
       `python run.py --preset health-fig3`

    2. Run a scenario with flag overrides:
       `python run.py binary --payoffs 3,-1,1,4 --rho 2 --mu0 0.2`

    3. Sweep a parameter into a file:
       `python run.py binary --sweep rho:0.01:5:100 --out sweep.csv`

    :param argv: Arguments (default is None - sys.argv).
    :type argv: Optional[List[str]]
    :return: 0 on success, 2 for an invalid config, 3 for a numerical failure.
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    set_quiet(args.quiet)

    if args.list_presets:
        for name, scenario, description in list_presets():
            print(f"{name}\t{scenario}\t{description}")
        return EXIT_OK

    try:
        config = load_config(args)
        table = await ScenarioRunner(config).run_scenario()
        CsvSink(args.out).write_table(table)
    except (ScenarioConfigException, ProblemException) as error:
        logger.error("Invalid configuration: %s", error)
        return EXIT_INVALID_CONFIG
    except NumericalException as error:
        logger.error("Numerical failure: %s", error, exc_info=True)
        return EXIT_NUMERICAL
    except OSError as error:
        logger.error("Cannot write output: %s", error)
        return EXIT_INVALID_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    start_time = time()

    status = run(main())

    logger.info("Execution time: %.3f seconds", time() - start_time)
    sys.exit(status)
