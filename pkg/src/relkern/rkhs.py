"""
Finite-span elements of the RKHS ``H_K`` of an operator-valued kernel.

An element is ``f = sum_j K_{x_j} c_j`` and the Hilbert structure follows
from ``<K_t u, K_x v>_K = <K(x, t) u, v>_Y``. The inner product is linear in
its first argument and conjugate linear in the second, matching
``<a, b>_Y = sum_k a_k conj(b_k)``; with that convention the reproducing
identity reads ``<f, K_x y>_K = <f(x), y>_Y``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import DEFAULT_TOL, DimensionError, as_point, as_points, as_vector
from .kernels import gram

COND_LIMIT = 1e12


class KernelMismatchError(ValueError):
    """Two elements live in the RKHS of different kernels."""


class SingularSystemError(np.linalg.LinAlgError):
    """The interpolation system is singular and the data are inconsistent."""

    def __init__(self, msg, smallest_singular_value, residual):
        super().__init__(msg)
        self.smallest_singular_value = smallest_singular_value
        self.residual = residual


@dataclass(frozen=True)
class SolveInfo:
    """How a regularized Hermitian system ``(G + ridge I) c = b`` was solved.

    ``method`` is ``"cholesky"`` or ``"lstsq"`` (minimum-norm least squares,
    used when the condition estimate exceeds ``COND_LIMIT`` or the matrix is
    not positive definite). ``residual`` is the 2-norm of the distance from
    ``b`` to the numerical range of ``G`` itself, i.e. the least-squares misfit
    of the unregularized constraints; it is independent of the ridge and
    positive exactly when the data are inconsistent. ``system_residual`` is
    ``|(G + ridge I) c - b|``.
    """

    method: str
    condition: float
    smallest_singular_value: float
    residual: float
    system_residual: float

    def feasible(self, rhs_norm, tol=DEFAULT_TOL):
        bound = tol.abs_tol + tol.rel_tol * max(rhs_norm, 1.0)
        return self.residual <= bound and self.system_residual <= bound


def solve_hermitian(G, b, ridge=0.0):
    """Solve ``(G + ridge I) c = b`` for Hermitian PSD ``G``."""
    G = np.asarray(G, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ev, vecs = np.linalg.eigh(G)
    top = float(np.abs(ev).max())
    rank_mask = np.abs(ev) > G.shape[0] * np.finfo(float).eps * top
    projected = vecs[:, rank_mask] @ (vecs[:, rank_mask].conj().T @ b)
    inconsistency = float(np.linalg.norm(b - projected))

    A = G + ridge * np.eye(G.shape[0])
    sv = np.abs(ev + ridge)
    smax, smin = float(sv.max()), float(sv.min())
    cond = np.inf if smin == 0.0 else smax / smin
    c = None
    method = "lstsq"
    if (ev + ridge).min() > 0 and cond <= COND_LIMIT:
        try:
            c = scipy.linalg.cho_solve(scipy.linalg.cho_factor(A, lower=True), b)
            method = "cholesky"
        except np.linalg.LinAlgError:
            c = None
    if c is None:
        c = scipy.linalg.lstsq(A, b)[0]
    system_residual = float(np.linalg.norm(A @ c - b))
    return c, SolveInfo(method, float(cond), smin, inconsistency, system_residual)


def _check_same_kernel(a, b):
    if not a.same_as(b):
        raise KernelMismatchError("elements belong to different kernels")


@dataclass(frozen=True, eq=False)
class RkhsElement:
    """``f = sum_j K_{centers[j]} coefficients[j]``.

    ``centers`` has shape ``(s, d)`` and ``coefficients`` shape ``(s, m)``.
    ``info`` carries the solve metadata when the element came from a fit.
    """

    kernel: object
    centers: np.ndarray
    coefficients: np.ndarray
    info: SolveInfo | None = field(default=None, compare=False)

    def __post_init__(self):
        m = self.kernel.m
        C = np.asarray(self.coefficients, dtype=complex).reshape(-1, m)
        X = np.asarray(self.centers, dtype=float)
        if X.size:
            X = as_points(X)
        else:
            X = X.reshape(0, X.shape[-1] if X.ndim == 2 else 1)
        if X.shape[0] != C.shape[0]:
            raise DimensionError(f"{X.shape[0]} centers but {C.shape[0]} coefficient vectors")
        object.__setattr__(self, "centers", X)
        object.__setattr__(self, "coefficients", C)

    @classmethod
    def zero(cls, kernel, dim=1):
        return cls(kernel, np.zeros((0, dim)), np.zeros((0, kernel.m), dtype=complex))

    @classmethod
    def section(cls, kernel, x, y):
        """The single section ``K_x y``."""
        return cls(kernel, as_point(x)[None, :], as_vector(y, kernel.m)[None, :])

    def __len__(self):
        return self.centers.shape[0]

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other):
        _check_same_kernel(self.kernel, other.kernel)
        if not len(self):
            return other
        if not len(other):
            return self
        return RkhsElement(
            self.kernel,
            np.vstack([self.centers, other.centers]),
            np.vstack([self.coefficients, other.coefficients]),
        )

    def __neg__(self):
        return RkhsElement(self.kernel, self.centers, -self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, alpha):
        return RkhsElement(self.kernel, self.centers, alpha * self.coefficients)


def evaluate_many(f, points):
    """Values of ``f`` at each row of ``points``, shape ``(n, m)``."""
    P = as_points(points)
    if not len(f):
        return np.zeros((P.shape[0], f.kernel.m), dtype=complex)
    if P.shape[1] != f.centers.shape[1]:
        raise DimensionError(f"point dimension {P.shape[1]} != center dimension {f.centers.shape[1]}")
    B = f.kernel.blocks(P, f.centers)
    return np.einsum("ijab,jb->ia", B, f.coefficients)


def evaluate(f, x):
    """``f(x) = sum_j K(x, x_j) c_j``."""
    x = as_point(x)
    return evaluate_many(f, x[None, :])[0]


def inner_product(f, g):
    """``<f, g>_K = sum_ij <K(x^g_j, x^f_i) c^f_i, c^g_j>_Y``."""
    _check_same_kernel(f.kernel, g.kernel)
    if not len(f) or not len(g):
        return 0j
    if f.centers.shape[1] != g.centers.shape[1]:
        raise DimensionError("elements have centers of different dimension")
    B = f.kernel.blocks(g.centers, f.centers)
    return complex(np.einsum("jb,jiba,ia->", g.coefficients.conj(), B, f.coefficients))


def norm(f, tol=DEFAULT_TOL):
    """``sqrt(<f, f>_K)``; a non-negligible imaginary part signals a broken kernel."""
    sq = inner_product(f, f)
    if abs(sq.imag) > tol.abs_tol + tol.rel_tol * abs(sq.real):
        raise ValueError(f"<f, f> has imaginary part {sq.imag:.3g}; kernel is not Hermitian")
    return float(np.sqrt(max(sq.real, 0.0)))


def fit_values(K, points, values, ridge=0.0, tol=DEFAULT_TOL):
    """Minimum-norm (or ridge-regularized) fit of point values.

    Solves ``(G + ridge I) c = v`` with ``G`` the block Gram over ``points``
    and ``v`` the stacked values. At ``ridge = 0`` the returned element
    interpolates the data and has the smallest ``H_K`` norm among all
    interpolants in the span of the sections at ``points``.

    Raises
    ------
    SingularSystemError
        At ``ridge = 0``, when the system is singular and the values are
        inconsistent with it (for instance the same point with two values).
    """
    P = as_points(points)
    V = np.asarray(values, dtype=complex).reshape(P.shape[0], -1)
    if P.shape[0] == 0:
        raise ValueError("fit_values needs at least one constraint")
    if V.shape[1] != K.m:
        raise DimensionError(f"values have dimension {V.shape[1]}, kernel has m={K.m}")
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge!r}")
    G = gram(K, P, tol=tol)
    rhs = V.reshape(-1)
    c, info = solve_hermitian(G, rhs, ridge)
    if ridge == 0 and not info.feasible(float(np.linalg.norm(rhs)), tol):
        raise SingularSystemError(
            f"singular system (smallest singular value {info.smallest_singular_value:.3g}, "
            f"least-squares residual {info.residual:.3g}); retry with ridge > 0",
            info.smallest_singular_value,
            info.residual,
        )
    return RkhsElement(K, P, c.reshape(-1, K.m), info)
