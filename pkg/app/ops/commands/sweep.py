import logging

import numpy as np

from app.config import get_settings
from app.lib.concurrency import map_concurrently
from app.lib.errors import ConfigError
from app.ops.commands.detect import REPORT_COLUMNS, report_row, to_document
from app.ops.commands.output import write_csv, write_json
from app.ops.entities.detection import DetectionReport
from app.ops.models.base import ModelSpec
from app.ops.models.linear import LinearModel
from app.ops.schemas import RunConfig, StrictModel
from app.ops.services.detect_service import classify

logger = logging.getLogger(__name__)


class SweepDocument(StrictModel):
    cases: list[dict]
    config: dict


def sim_point(model: ModelSpec, z1: float, order: int = 2) -> np.ndarray:
    """SIM point with slow coordinate z1: slowest eigendirection for the linear model, the SIM graph otherwise."""
    if isinstance(model, LinearModel):
        v = model.slow_eigenvectors(1)[0]
        if v[0] == 0:
            raise ConfigError("The slowest eigenvector has no first component; choose another base point")
        return z1 * v / v[0]
    if model.dim != 2:
        raise ConfigError(f"{model.name}: sweeps need a planar model or the linear model")
    return np.array([z1, model.sim_graph(z1, order)], dtype=float)


def run(config: RunConfig, threads: int | None = None) -> int:
    """Classify SIM base points shifted along the fast coordinate, over offsets × gammas."""
    sweep = config.sweep
    model_settings = config.model
    if model_settings is None:
        raise ConfigError("A sweep needs a model")
    gammas = sweep.gammas or [model_settings.gamma]
    detection = config.detection.to_config(config.tolerance.to_tolerance())

    cases = [(offset, gamma) for gamma in gammas for offset in sweep.offsets]

    def run_case(case: tuple[float, float | None]) -> tuple[np.ndarray, DetectionReport]:
        offset, gamma = case
        model = model_settings.model_copy(update={"gamma": gamma}).build()
        z0 = sim_point(model, sweep.z1, sweep.sim_order).astype(float)
        z0[-1] += offset
        return z0, classify(model, z0, detection)

    results = map_concurrently(run_case, cases, threads or get_settings().threads)
    off = sum(1 for _, r in results if r.verdict == "off_sim")
    logger.info(f"Sweep of {len(cases)} cases: {off} off-SIM")

    if config.format == "json":
        documents = [
            {
                "offset": offset,
                "gamma": gamma,
                **to_document(model_settings.id, z0, report, {}).model_dump(exclude={"config"}),
            }
            for (offset, gamma), (z0, report) in zip(cases, results, strict=True)
        ]
        write_json(config, SweepDocument(cases=documents, config=config.echo()))
        return 0

    rows = [
        [offset, "nan" if gamma is None else gamma, *report_row(report)]
        for (offset, gamma), (_, report) in zip(cases, results, strict=True)
    ]
    write_csv(config, ["offset", "gamma", *REPORT_COLUMNS], rows)
    return 0
