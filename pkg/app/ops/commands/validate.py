from rich.console import Console

from app.ops.schemas import RunConfig
from app.ops.validate.runner import ValidationRunner
from app.ops.validate.suites import select

EXIT_FAILED = 1


def run(config: RunConfig, threads: int | None = None, console: Console | None = None) -> int:
    """Run the acceptance suites; exit 0 when all pass, 1 otherwise."""
    runner = ValidationRunner(config.tolerance.to_tolerance(), console)
    results = runner.run_suites(select(config.validate_.suites))
    runner.display_results(results)
    return 0 if all(r.passed for r in results) else EXIT_FAILED
