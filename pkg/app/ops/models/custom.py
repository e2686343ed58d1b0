from collections.abc import Callable, Mapping

import numpy as np

from app.lib.errors import ConfigError
from app.ops.models.base import ModelSpec

FieldFn = Callable[[np.ndarray], np.ndarray]


class CustomModel(ModelSpec):
    """
    User-supplied holomorphic field/Jacobian pair.

    The callables must accept complex n-vectors. No symbolic continuation is
    attempted: the caller asserts that the formulas are the holomorphic
    extension of a real-analytic field.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        field: FieldFn,
        jacobian: Callable[[np.ndarray], np.ndarray],
        singular: Callable[[np.ndarray], bool] | None = None,
        params: Mapping[str, float] | None = None,
        probe_state=None,
        jacobian_rtol: float = 1e-6,
    ):
        super().__init__(name, dim, params)
        self._field_fn = field
        self._jacobian_fn = jacobian
        self._singular_fn = singular

        if probe_state is not None:
            error = self.check_jacobian(probe_state)
            if error > jacobian_rtol:
                raise ConfigError(f"{name}: Jacobian disagrees with finite differences (relative error {error:.2e})")

    def singular_locus_test(self, z) -> bool:
        return bool(self._singular_fn(z)) if self._singular_fn else False

    def _field(self, z):
        return self._field_fn(z)

    def _jacobian(self, z):
        return self._jacobian_fn(z)
