import logging

import numpy as np

from app.ops.commands.output import write_csv, write_json
from app.ops.entities.detection import DetectionReport, Verdict
from app.ops.schemas import DetectionDocument, PeakDocument, RunConfig
from app.ops.services.detect_service import classify

logger = logging.getLogger(__name__)

EXIT_OFF_SIM = 4

REPORT_COLUMNS = ["high_low_ratio", "lambda_supp", "verdict", "dominant_high_xi"]


def exit_code(report: DetectionReport) -> int:
    return EXIT_OFF_SIM if report.verdict == Verdict.OFF_SIM else 0


def report_row(report: DetectionReport) -> list:
    peak = report.dominant_high_peak()
    return [report.high_low_ratio, report.lambda_supp, str(report.verdict), peak.xi if peak else "nan"]


def to_document(model_name: str, z0, report: DetectionReport, config: dict) -> DetectionDocument:
    return DetectionDocument(
        model=model_name,
        z0=[float(x) for x in np.real(z0)],
        verdict=str(report.verdict),
        high_low_ratio=report.high_low_ratio,
        lambda_supp=report.lambda_supp,
        cutoff_used=report.cutoff_used,
        low_energies=report.low_energies,
        high_energies=report.high_energies,
        peaks=[
            PeakDocument(component=p.component + 1, xi=p.xi, re_amp=p.amplitude.real, im_amp=p.amplitude.imag)
            for p in report.peaks
        ],
        config=config,
    )


def run(config: RunConfig, threads: int | None = None) -> int:
    """Classify z0; exit 0 when on-SIM consistent, 4 when off-SIM."""
    model = config.build_model()
    report = classify(model, config.z0, config.detection.to_config(config.tolerance.to_tolerance()))

    if config.format == "csv":
        write_csv(config, REPORT_COLUMNS, [report_row(report)])
    else:
        write_json(config, to_document(model.name, config.z0, report, config.echo()))
    return exit_code(report)
