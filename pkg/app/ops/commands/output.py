"""CSV/JSON emitters shared by the commands. Floats carry 17 significant digits so files round-trip exactly."""

import csv
import json
import logging
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path

from pydantic import BaseModel

from app.ops.schemas import RunConfig

logger = logging.getLogger(__name__)


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def sidecar_path(out: str) -> Path:
    return Path(f"{out}.config.json")


def write_csv(config: RunConfig, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows to config.out (stdout when unset); file outputs get a `<out>.config.json` echo."""
    if config.out is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([fmt(v) for v in row] for row in rows)
        return

    path = Path(config.out)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([fmt(v) for v in row] for row in rows)
    sidecar_path(config.out).write_text(json.dumps(config.echo(), indent=2) + "\n")
    logger.info(f"Wrote {path} and {sidecar_path(config.out)}")


def write_json(config: RunConfig, document: BaseModel) -> None:
    text = document.model_dump_json(indent=2)
    if config.out is None:
        sys.stdout.write(text + "\n")
        return
    Path(config.out).write_text(text + "\n")
    logger.info(f"Wrote {config.out}")
