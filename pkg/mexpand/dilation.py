"""Matrix dilations: powers, norms and spectral metadata."""

from __future__ import annotations

from functools import cached_property

import numpy as np
from loguru import logger

from mexpand.config import get_config
from mexpand.exceptions import InvalidSpecError

_REL_TOL = 1e-9
_EXACT_POWER_LIMIT = 20


def operator_norm(A) -> float:
    """Spectral norm ‖A‖ (largest singular value)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise InvalidSpecError("matrix entries must be finite")
    return float(np.linalg.norm(A, 2))


def _integer_power(entries: np.ndarray, j: int) -> np.ndarray:
    base = entries.astype(np.int64).astype(object)
    out = np.identity(entries.shape[0], dtype=np.int64).astype(object)
    for _ in range(j):
        out = out.dot(base)
    return out.astype(float)


class Dilation:
    """An expanding d×d matrix M with cached spectral data.

    Immutable after construction.
    """

    def __init__(self, entries, theta: float | None = None, name: str | None = None):
        arr = np.atleast_2d(np.asarray(entries, dtype=float))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidSpecError(f"dilation must be a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSpecError("dilation entries must be finite")
        det = float(np.linalg.det(arr))
        if abs(det) < 1e-300:
            raise InvalidSpecError("dilation matrix is singular")
        arr.setflags(write=False)
        self._entries = arr
        self.name = name or "custom"

        mags = np.sort(np.abs(np.linalg.eigvals(arr)))
        if np.any(mags <= 1.0):
            raise InvalidSpecError(
                f"dilation is not expanding: eigenvalue magnitudes {mags.tolist()}"
            )
        self._eig_mags = tuple(float(m) for m in mags)
        self._det_mag = abs(det)
        if abs(np.prod(mags) - self._det_mag) > _REL_TOL * self._det_mag:
            raise InvalidSpecError("determinant and eigenvalues are inconsistent")

        lam_min = self._eig_mags[0]
        if theta is None:
            theta = get_config().analysis.theta_margin * lam_min
        if not 1.0 < theta <= lam_min:
            raise InvalidSpecError(
                f"theta must lie in (1, {lam_min}], got {theta}"
            )
        self._theta = float(theta)
        logger.debug(
            f"dilation {self.name}: m={self._det_mag:.6g}, eig_mags={self._eig_mags}"
        )

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def det_mag(self) -> float:
        return self._det_mag

    @property
    def eig_mags(self) -> tuple[float, ...]:
        return self._eig_mags

    @property
    def isotropic(self) -> bool:
        lo, hi = self._eig_mags[0], self._eig_mags[-1]
        return hi - lo <= _REL_TOL * hi

    @property
    def lam(self) -> float:
        """Common eigenvalue magnitude of an isotropic dilation (largest otherwise)."""
        return self._eig_mags[-1]

    @property
    def theta(self) -> float:
        return self._theta

    @cached_property
    def is_integer(self) -> bool:
        return bool(np.all(self._entries == np.round(self._entries)))

    def adjoint(self) -> Dilation:
        return Dilation(self._entries.T, theta=self._theta, name=f"{self.name}*")

    def power(self, j: int) -> np.ndarray:
        return power(self, j)

    def norm_bounds(self, js=range(-8, 9)) -> tuple[float, float]:
        """Fitted constants C₁, C₂ with C₁|λ|ʲ ≤ ‖Mʲ‖ ≤ C₂|λ|ʲ over `js`."""
        ratios = [operator_norm(power(self, j)) / self.lam**j for j in js]
        return min(ratios), max(ratios)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "entries": self._entries.tolist(),
            "det_mag": self._det_mag,
            "eig_mags": list(self._eig_mags),
            "isotropic": self.isotropic,
            "theta": self._theta,
        }

    def __repr__(self) -> str:
        return f"Dilation({self.name}, {self._entries.tolist()})"


def power(M: Dilation, j: int) -> np.ndarray:
    """Mʲ for any integer j; exact integer arithmetic for small |j|."""
    j = int(j)
    entries = M.entries
    if j == 0:
        return np.identity(M.dim)
    if M.is_integer and abs(j) <= _EXACT_POWER_LIMIT:
        positive = _integer_power(entries, abs(j))
    else:
        positive = np.linalg.matrix_power(entries, abs(j))
    if j > 0:
        return positive
    return np.linalg.inv(positive)


def dyadic(dim: int = 1) -> Dilation:
    return Dilation(2.0 * np.identity(dim), name="dyadic")


def quincunx() -> Dilation:
    return Dilation([[1.0, 1.0], [1.0, -1.0]], name="quincunx")


def scalar(factor: float, dim: int = 1) -> Dilation:
    return Dilation(float(factor) * np.identity(dim), name=f"scalar{factor:g}")


def from_spec(name: str, params: dict | None = None) -> Dilation:
    """Build a named dilation (`dyadic`, `quincunx`, `scalar`, `matrix`)."""
    params = dict(params or {})
    theta = params.pop("theta", None)
    if name == "dyadic":
        M = dyadic(int(params.get("dim", 1)))
    elif name == "quincunx":
        M = quincunx()
    elif name == "scalar":
        M = scalar(float(params["factor"]), int(params.get("dim", 1)))
    elif name == "matrix":
        M = Dilation(params["entries"])
    else:
        raise InvalidSpecError(f"unknown dilation '{name}'")
    if theta is not None:
        M = Dilation(M.entries, theta=float(theta), name=M.name)
    return M
