import logging
from collections.abc import Generator

import pytest

from app.config import get_settings
from app.ops.models.davis_skodje import DavisSkodjeModel, DavisSkodjeParams
from app.ops.models.linear import LinearModel
from app.ops.models.michaelis_menten import MichaelisMentenModel, MichaelisMentenParams
from app.ops.services.flow_service import Tolerance

# Reduce logging noise during tests
logging.getLogger("app.ops.services.detect_service").setLevel(logging.WARNING)
logging.getLogger("app.ops.services.flow_service").setLevel(logging.ERROR)
logging.getLogger("anyio").setLevel(logging.WARNING)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Settings are cached process-wide; each test sees the environment it sets up."""
    monkeypatch.setenv("CTFLOW_THREADS", "2")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def tol() -> Tolerance:
    return Tolerance(rtol=1e-9, atol=1e-12, h_min=1e-12)


@pytest.fixture
def ds3() -> DavisSkodjeModel:
    return DavisSkodjeModel(DavisSkodjeParams(3.0))


@pytest.fixture
def ds10() -> DavisSkodjeModel:
    return DavisSkodjeModel(DavisSkodjeParams(10.0))


@pytest.fixture
def linear12() -> LinearModel:
    """ż = diag(−1, −2) z."""
    return LinearModel.diagonal(-1.0, -2.0)


@pytest.fixture
def mm10() -> MichaelisMentenModel:
    return MichaelisMentenModel(MichaelisMentenParams(10.0))
