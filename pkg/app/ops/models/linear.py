from dataclasses import dataclass

import numpy as np

from app.config import get_settings
from app.lib.errors import ConfigError, NoSimGraph
from app.ops.entities.spectrum import SpectralLine
from app.ops.entities.time import ComplexTimePoint
from app.ops.models.base import FlowCoefficients, ModelSpec


@dataclass(frozen=True)
class LinearModelParams:
    """Real diagonalizable matrix A with eigenvalues λ_k and eigenvector basis v^k (columns of `eigenvectors`)."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        lam = np.asarray(self.eigenvalues, dtype=float)
        V = np.asarray(self.eigenvectors, dtype=float)
        n = lam.shape[0]
        if A.shape != (n, n) or V.shape != (n, n):
            raise ConfigError(f"Inconsistent linear model shapes: A {A.shape}, λ {lam.shape}, V {V.shape}")

        cond = np.linalg.cond(V)
        bound = get_settings().eigvec_cond_bound
        if not np.isfinite(cond) or cond > bound:
            raise ConfigError(f"Eigenvector matrix condition number {cond:.3g} exceeds {bound:.3g}")

        residual = np.linalg.norm(A @ V - V * lam, axis=0)
        scale = np.linalg.norm(A, 2) * np.linalg.norm(V, axis=0)
        if np.any(residual > 1e-10 * np.maximum(scale, np.finfo(float).tiny)):
            raise ConfigError(f"A·v = λ·v violated: residuals {residual}")

        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", V)

    @classmethod
    def from_matrix(cls, matrix) -> "LinearModelParams":
        A = np.atleast_2d(np.asarray(matrix, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ConfigError(f"Linear model matrix must be square, got {A.shape}")
        lam, V = np.linalg.eig(A)
        if np.any(np.abs(lam.imag) > 1e-12 * max(1.0, np.max(np.abs(lam)))):
            raise ConfigError(f"Linear model matrix has non-real eigenvalues {lam}")
        # Real eigenvalues of a real matrix admit real eigenvectors.
        V = V.real if np.all(np.abs(V.imag) < 1e-12) else _real_eigenvectors(A, lam.real)
        return cls(A, lam.real, V / np.linalg.norm(V, axis=0))

    @classmethod
    def from_eigenpairs(cls, eigenvalues, eigenvectors) -> "LinearModelParams":
        lam = np.asarray(eigenvalues, dtype=float).reshape(-1)
        V = np.atleast_2d(np.asarray(eigenvectors, dtype=float))
        if V.shape[0] != lam.shape[0]:
            raise ConfigError(f"Need {lam.shape[0]} eigenvectors of length {lam.shape[0]}, got shape {V.shape}")
        try:
            A = V @ np.diag(lam) @ np.linalg.inv(V)
        except np.linalg.LinAlgError as e:
            raise ConfigError("Eigenvectors do not form a basis") from e
        return cls(A, lam, V)


def _real_eigenvectors(A: np.ndarray, lam: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    columns = []
    for value in np.unique(np.round(lam, 12)):
        _, s, vh = np.linalg.svd(A - value * np.eye(n))
        columns.extend(vh[s < 1e-9 * max(1.0, s[0])])
    V = np.array(columns).T
    if V.shape != (n, n):
        raise ConfigError("Linear model matrix is not diagonalizable")
    return V


class LinearModel(ModelSpec):
    """ż = Az with real diagonalizable A."""

    has_closed_form = True

    def __init__(self, params: LinearModelParams, amp_floor: float | None = None):
        n = params.eigenvalues.shape[0]
        super().__init__("linear", n, {f"lambda_{k + 1}": float(v) for k, v in enumerate(params.eigenvalues)})
        self.linear_params = params
        self._A = params.matrix
        self.amp_floor = amp_floor if amp_floor is not None else get_settings().amp_floor

    @classmethod
    def diagonal(cls, *eigenvalues: float) -> "LinearModel":
        return cls(LinearModelParams.from_matrix(np.diag(eigenvalues)))

    def _field(self, z):
        return self._A @ z

    def _jacobian(self, z):
        return self._A.copy()

    def closed_form_solution(self, coeffs: FlowCoefficients, t) -> np.ndarray:
        t = complex(ComplexTimePoint.of(t))
        p = self.linear_params
        return p.eigenvectors @ (coeffs.c * np.exp(p.eigenvalues * t))

    def fit_coefficients(self, z0) -> FlowCoefficients:
        z0 = self._checked(z0)
        return FlowCoefficients(np.linalg.solve(self.linear_params.eigenvectors, z0))

    def sim_graph(self, z1: float, order: int = 0) -> float:
        raise NoSimGraph("The linear model's SIMs are eigenvector spans; use slow_eigenvectors()")

    def slow_eigenvectors(self, j: int) -> list[np.ndarray]:
        """The j eigenvectors with the smallest |λ|: a basis of the dimension-j SIM."""
        if not 1 <= j <= self.dim:
            raise ConfigError(f"SIM dimension must be in 1..{self.dim}, got {j}")
        order = np.argsort(np.abs(self.linear_params.eigenvalues), kind="stable")
        return [self.linear_params.eigenvectors[:, k].copy() for k in order[:j]]

    def distance_to_slow_span(self, z, j: int) -> float:
        basis = np.array(self.slow_eigenvectors(j)).T
        z = self._as_state(z)
        coef, *_ = np.linalg.lstsq(basis.astype(complex), z, rcond=None)
        return float(np.linalg.norm(z - basis @ coef))

    def analytic_spectrum(self, coeffs: FlowCoefficients, amp_floor: float | None = None) -> list[SpectralLine]:
        """
        Comb of z(iτ) = Σ_k α_k e^{iλ_k τ} v^k: component j has a line at ξ = λ_k of amplitude Σ α_k v_j^k.

        Repeated eigenvalues are merged into one line.
        """
        floor = self.amp_floor if amp_floor is None else amp_floor
        p = self.linear_params
        lines = []
        for value in np.unique(p.eigenvalues):
            members = np.flatnonzero(p.eigenvalues == value)
            for j in range(self.dim):
                amplitude = complex(np.sum(coeffs.c[members] * p.eigenvectors[j, members]))
                if abs(amplitude) >= floor:
                    lines.append(SpectralLine(xi=float(value), amplitude=amplitude, component=j))
        return sorted(lines, key=lambda line: (line.component, line.xi))
