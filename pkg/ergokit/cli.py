import sys
from typing import List, Optional

from hermes.typeo import typeo

from ergokit import scenarios
from ergokit.dataset import Dataset
from ergokit.exceptions import ErgokitError
from ergokit.logging import configure_logging, logger
from ergokit.selftest import SelftestReport, run_checks
from ergokit.types import FORMAT_TYPE


def run(
    config: str,
    output: Optional[str] = None,
    format: Optional[FORMAT_TYPE] = None,
) -> Dataset:
    """Run a scenario described by a JSON or TOML file

    Args:
        config:
            Path to the scenario description, with
            keys `scenario`, `parameters`, `output`
            and `format`
        output:
            Overrides the output path of the description
        format:
            Overrides the format of the description
    """

    scenario = scenarios.ScenarioConfig.from_file(config)
    if output is not None:
        scenario.output = output
    if format is not None:
        scenario.format = format
    return scenario.run()


def selftest(
    perturb: Optional[str] = None,
    seed: int = 0,
    checks: Optional[List[str]] = None,
) -> SelftestReport:
    """Check every closed form against its brute-force oracle

    Args:
        perturb:
            Name of a check whose closed form gets
            shifted, which should make it fail
        seed:
            Seed for the randomized checks
        checks:
            Subset of checks to run, all of them by default
    """

    report = run_checks(checks, perturb, seed)
    sys.stdout.write(report.render())
    logger.info(f"All {len(report.deviations)} self checks passed")
    return report


@typeo(
    "ergokit",
    tls_family=scenarios.tls_family,
    tls_channel=scenarios.tls_channel,
    tls_dynamics=scenarios.tls_dynamics,
    x_state=scenarios.x_state,
    gaussian_family=scenarios.gaussian_family,
    gaussian_dynamics=scenarios.gaussian_dynamics_scenario,
    decay=scenarios.decay,
    charging=scenarios.charging,
    run=run,
    selftest=selftest,
)
def ergokit(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """Ergotropy datasets for qubit and Gaussian batteries

    Args:
        verbose:
            Log at DEBUG level
        log_file:
            Write logs to this file instead of stderr
    """

    configure_logging(log_file, verbose)


def main() -> None:
    """Console entry point mapping library errors to exit codes"""

    try:
        ergokit()
    except ErgokitError as e:
        message = str(e).splitlines()[0] if str(e) else ""
        sys.stderr.write(f"ergokit: {type(e).__name__}: {message}\n")
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()
