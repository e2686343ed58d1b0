import logging

import numpy as np

from app.config import get_settings
from app.ops.commands.output import write_csv, write_json
from app.ops.schemas import RunConfig, SurfaceDocument
from app.ops.services.flow_service import sample_surface

logger = logging.getLogger(__name__)


def _nested(part: np.ndarray, valid: np.ndarray) -> list:
    return [
        [[float(x) for x in point] if ok else [None] * len(point) for point, ok in zip(row, row_valid, strict=True)]
        for row, row_valid in zip(part, valid, strict=True)
    ]


def run(config: RunConfig, threads: int | None = None) -> int:
    """Sample the complex-time solution on the configured rectangle; one row per grid point."""
    model = config.build_model()
    settings = config.surface
    grid = sample_surface(
        model,
        config.z0,
        settings.re,
        settings.im,
        settings.grid,
        config.tolerance.to_tolerance(),
        threads=threads or get_settings().threads,
    )
    masked = int((~grid.mask).sum())
    if masked:
        logger.warning(f"{masked} of {grid.mask.size} grid points lie beyond a singularity and are marked invalid")

    if config.format == "json":
        document = SurfaceDocument(
            model=model.name,
            z0=list(config.z0 or []),
            re_values=grid.re_values.tolist(),
            im_values=grid.im_values.tolist(),
            valid=grid.mask.tolist(),
            re_z=_nested(grid.values.real, grid.mask),
            im_z=_nested(grid.values.imag, grid.mask),
            config=config.echo(),
        )
        write_json(config, document)
        return 0

    header = ["re_t", "im_t", "valid"]
    for j in range(1, grid.dim + 1):
        header += [f"re_z{j}", f"im_z{j}"]

    def rows():
        for i, tau1 in enumerate(grid.re_values):
            for k, tau2 in enumerate(grid.im_values):
                valid = bool(grid.mask[i, k])
                row = [float(tau1), float(tau2), valid]
                for value in grid.values[i, k]:
                    row += [float(value.real), float(value.imag)] if valid else ["nan", "nan"]
                yield row

    write_csv(config, header, rows())
    return 0
