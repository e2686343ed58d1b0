"""Runs the acceptance suites and renders the pass/fail table."""

import time
from dataclasses import dataclass

import psutil
from rich.console import Console
from rich.table import Table

from app.lib.errors import CtflowError
from app.ops.services.flow_service import Tolerance
from app.ops.validate.suites import Suite


@dataclass
class SuiteResult:
    name: str
    criterion: str
    passed: bool
    measured: float
    limit: float
    seconds: float
    cpu_percent: float
    detail: str


class ValidationRunner:
    """Runs acceptance suites one after another, timing each."""

    def __init__(self, tol: Tolerance, console: Console | None = None):
        self.tol = tol
        self.console = console or Console(stderr=True)
        self.process = psutil.Process()

    def run_suites(self, suites: list[Suite]) -> list[SuiteResult]:
        results = []
        self.console.print(
            f"[bold blue]Validation suites[/bold blue] (rtol={self.tol.rtol:g}, atol={self.tol.atol:g})\n"
        )

        for suite in suites:
            self.console.print(f"Running {suite.name}...")
            result = self._run_suite(suite)
            results.append(result)
            mark = "[green]✓[/green]" if result.passed else "[red]✗[/red]"
            self.console.print(f"  {mark} {suite.name}: {result.detail} ({result.seconds:.1f}s)")

        return results

    def _run_suite(self, suite: Suite) -> SuiteResult:
        self.process.cpu_percent(None)
        start = time.perf_counter()
        try:
            outcome = suite.check(self.tol)
            passed, measured, limit, detail = outcome.passed, outcome.measured, outcome.limit, outcome.detail
        except CtflowError as e:
            passed, measured, limit, detail = False, float("nan"), float("nan"), f"{type(e).__name__}: {e}"
        seconds = time.perf_counter() - start

        return SuiteResult(
            name=suite.name,
            criterion=suite.criterion,
            passed=passed,
            measured=measured,
            limit=limit,
            seconds=seconds,
            cpu_percent=self.process.cpu_percent(None),
            detail=detail,
        )

    def display_results(self, results: list[SuiteResult]):
        table = Table(title="Acceptance Results")

        table.add_column("Suite", style="cyan")
        table.add_column("Criterion")
        table.add_column("Status", justify="center")
        table.add_column("Measured", justify="right")
        table.add_column("Limit", justify="right")
        table.add_column("Seconds", justify="right")
        table.add_column("CPU%", justify="right")

        for r in results:
            status_style = "green" if r.passed else "red"
            time_style = "green" if r.seconds < 10 else "yellow" if r.seconds < 60 else "red"

            table.add_row(
                r.name,
                r.criterion,
                f"[{status_style}]{'PASS' if r.passed else 'FAIL'}[/{status_style}]",
                f"{r.measured:.3g}",
                f"{r.limit:.3g}",
                f"[{time_style}]{r.seconds:.1f}[/{time_style}]",
                f"{r.cpu_percent:.0f}",
            )

        self.console.print("\n")
        self.console.print(table)

        failed = [r.name for r in results if not r.passed]
        if failed:
            self.console.print(
                f"\n[bold red]{len(failed)} of {len(results)} suites failed:[/bold red] {', '.join(failed)}"
            )
        else:
            self.console.print(f"\n[bold green]All {len(results)} suites passed[/bold green]")
