"""
Shared numeric contract: points, output vectors, operator matrices and the
tolerances every other module compares against.

Scalars are complex throughout. Real inputs are embedded with zero imaginary
part, so a real-valued data set and its complex embedding give identical
results.
"""

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised when point, vector or matrix dimensions disagree."""


@dataclass(frozen=True)
class Tolerance:
    """Comparison tolerances.

    ``psd_eig_floor`` is the smallest eigenvalue still accepted as PSD. When
    left as ``None`` it scales with the matrix dimension, ``-1e-8 * dim``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    psd_eig_floor: float | None = None

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            value = getattr(self, name)
            if not (0.0 <= value < 1.0):
                raise ValueError(f"{name} must lie in [0, 1), got {value!r}")

    def eig_floor(self, dim):
        if self.psd_eig_floor is not None:
            return float(self.psd_eig_floor)
        return -1e-8 * dim


DEFAULT_TOL = Tolerance()


def as_points(points, dim=None):
    """Coerce a point or a list of points to a finite ``(n, d)`` float array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # a flat list is read as n scalar points
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise DimensionError(f"points must be 2-D (n, d), got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionError(f"expected points of dimension {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def as_point(x, dim=None):
    """Coerce a single point to a finite 1-D float array."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DimensionError(f"a point must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected a point of dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def as_vector(y, m=None):
    """Coerce an output vector to a finite 1-D complex array of length ``m``."""
    arr = np.atleast_1d(np.asarray(y, dtype=complex))
    if arr.ndim != 1:
        raise DimensionError(f"an output vector must be 1-D, got shape {arr.shape}")
    if m is not None and arr.shape[0] != m:
        raise DimensionError(f"expected an output vector of length {m}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("output vector entries must be finite")
    return arr


def approx_eq(a, b, tol=DEFAULT_TOL):
    """Entrywise ``|a - b| <= abs_tol + rel_tol * max(|a|, |b|)``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    bound = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(a), np.abs(b))
    return bool(np.all(np.abs(a - b) <= bound))


def hermitian_part_distance(A):
    """Largest entry of ``|A - A^H| / 2``; zero exactly when ``A`` is Hermitian."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - A.conj().T)) / 2.0)


def parse_complex(value):
    """Parse a real, a ``[re, im]`` pair or an ``"a+bi"`` string."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        if not text:
            raise ValueError("empty numeric field")
        if text.endswith("i"):
            text = text[:-1] + "j"
        return complex(text)
    return complex(value)


def complex_to_json(z):
    """Plain float when the imaginary part is zero, otherwise ``[re, im]``."""
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]
