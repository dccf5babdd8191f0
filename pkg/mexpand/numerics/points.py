import numpy as np

from mexpand.exceptions import InvalidSpecError


def as_points(x, dim: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Flatten `x` to shape (n, dim) and return the batch shape to restore.

    In one dimension a trailing axis of length one is optional, so scalars and
    1-D arrays of abscissae are accepted.
    """
    arr = np.asarray(x, dtype=float)
    if dim == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise InvalidSpecError(f"expected points with {dim} coordinates, got shape {arr.shape}")
    batch = arr.shape[:-1]
    return arr.reshape(-1, dim), batch


def restore(values: np.ndarray, batch: tuple[int, ...]):
    out = np.asarray(values).reshape(batch)
    return out[()] if out.ndim == 0 else out


def sinc(t) -> np.ndarray:
    """sin(πt)/(πt) with a series branch near zero."""
    t = np.asarray(t, dtype=float)
    z = np.pi * t
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    z2 = z * z
    series = 1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0 * (1.0 - z2 / 110.0))))
    return np.where(small, series, np.sin(safe) / safe)
