"""
Operator-valued kernels ``K : X x X -> L(C^m)``.

A kernel is stored as a vectorized block function: given ``nt`` points ``T``
and ``nx`` points ``X`` it returns the array ``K[i, j] = K(T[i], X[j])`` of
shape ``(nt, nx, m, m)``. Every built-in construction is PSD in the sense
that block Gram matrices

.. math::
    \\sum_{i,j} \\langle K(x_i, x_j) y_j, y_i \\rangle \\geq 0

are positive semidefinite, and Hermitian, ``K(t, x) = K(x, t)^H``.

Built-in variants
-----------------
``scalar_times_identity``  k(t, x) I_m
``separable``              k(t, x) A with A Hermitian PSD
``sum``                    sum of child kernels
``scaled``                 scale * child, scale > 0
``pointwise_product_diagonal``
                           entrywise (Schur) product of child kernels; the
                           block Gram is the Hadamard product of the child
                           Grams and so stays PSD. With ``scalar_times_identity``
                           children the values are diagonal.

Scalar base kernels are ``gaussian`` exp(-gamma |t-x|^2), ``laplacian``
exp(-gamma |t-x|), ``linear`` <t, x> and ``polynomial`` (<t, x> + offset)^degree.
``negative_distance`` (-|t - x|) is a deliberately non-PSD diagnostic kernel
and is not part of the built-in family.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    DimensionError,
    as_point,
    as_points,
    as_vector,
    complex_to_json,
    hermitian_part_distance,
    parse_complex,
)

BASE_NAMES = ("gaussian", "laplacian", "linear", "polynomial", "negative_distance")
VARIANTS = ("scalar_times_identity", "separable", "sum", "scaled", "pointwise_product_diagonal")


class KernelSpecError(ValueError):
    """Invalid kernel parameters or an inconsistent kernel composition."""


class NonHermitianKernelError(ValueError):
    """A Gram matrix failed the Hermitian check; the kernel is broken."""


def _sq_dists(T, X):
    # elementwise form keeps the matrix exactly symmetric when T is X
    return ((T[:, None, :] - X[None, :, :]) ** 2).sum(axis=-1)


def _dots(T, X):
    return (T[:, None, :] * X[None, :, :]).sum(axis=-1)


@dataclass(frozen=True)
class BaseKernel:
    """A real scalar kernel on R^d."""

    name: str
    gamma: float = 1.0
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.name not in BASE_NAMES:
            raise KernelSpecError(f"unknown base kernel {self.name!r}")
        if self.name in ("gaussian", "laplacian") and not self.gamma > 0:
            raise KernelSpecError(f"gamma must be positive, got {self.gamma!r}")
        if self.name == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise KernelSpecError(f"degree must be an integer >= 1, got {self.degree!r}")
            if not self.offset >= 0:
                raise KernelSpecError(f"offset must be >= 0, got {self.offset!r}")

    def __call__(self, T, X):
        if self.name == "gaussian":
            return np.exp(-self.gamma * _sq_dists(T, X))
        if self.name == "laplacian":
            return np.exp(-self.gamma * np.sqrt(_sq_dists(T, X)))
        if self.name == "linear":
            return _dots(T, X)
        if self.name == "polynomial":
            return (_dots(T, X) + self.offset) ** int(self.degree)
        return -np.sqrt(_sq_dists(T, X))

    def to_dict(self):
        if self.name in ("gaussian", "laplacian"):
            return {"name": self.name, "gamma": self.gamma}
        if self.name == "polynomial":
            return {"name": self.name, "degree": int(self.degree), "offset": self.offset}
        return {"name": self.name}

    @classmethod
    def from_dict(cls, d):
        if "name" not in d:
            raise KernelSpecError("base kernel needs a 'name'")
        kwargs = {k: d[k] for k in ("gamma", "degree", "offset") if k in d}
        return cls(name=d["name"], **kwargs)


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of an operator-valued kernel.

    ``A`` is kept as a tuple of tuples of complex numbers so that specs are
    hashable and compare by value.
    """

    variant: str
    base: BaseKernel | None = None
    m: int | None = None
    A: tuple | None = None
    children: tuple = field(default_factory=tuple)
    scale: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise KernelSpecError(f"unknown variant {self.variant!r}")
        if self.A is not None and not isinstance(self.A, tuple):
            A = np.asarray(self.A, dtype=complex)
            object.__setattr__(self, "A", tuple(tuple(complex(v) for v in row) for row in A))
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "m", self._check())

    def _check(self):
        v = self.variant
        if v in ("scalar_times_identity", "separable") and self.base is None:
            raise KernelSpecError(f"variant {v!r} needs a base kernel")
        if v == "scalar_times_identity":
            if self.m is None or int(self.m) != self.m or self.m < 1:
                raise KernelSpecError(f"output dimension m must be an integer >= 1, got {self.m!r}")
            return int(self.m)
        if v == "separable":
            if self.A is None:
                raise KernelSpecError("separable kernel needs a mixing matrix A")
            A = np.asarray(self.A, dtype=complex)
            if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
                raise KernelSpecError(f"mixing matrix must be square, got shape {A.shape}")
            if not np.all(np.isfinite(A)):
                raise KernelSpecError("mixing matrix entries must be finite")
            scale = max(1.0, float(np.max(np.abs(A))))
            if hermitian_part_distance(A) > DEFAULT_TOL.abs_tol * scale:
                raise KernelSpecError("mixing matrix must be Hermitian")
            lo = float(np.linalg.eigvalsh(A).min())
            if lo < DEFAULT_TOL.eig_floor(A.shape[0]) * scale:
                raise KernelSpecError(f"mixing matrix must be PSD (smallest eigenvalue {lo:.3g})")
            if self.m is not None and self.m != A.shape[0]:
                raise KernelSpecError(f"m={self.m} disagrees with mixing matrix size {A.shape[0]}")
            return A.shape[0]
        if not self.children:
            raise KernelSpecError(f"variant {v!r} needs child kernels")
        if v == "scaled":
            if len(self.children) != 1:
                raise KernelSpecError("scaled kernel takes exactly one child")
            if self.scale is None or not self.scale > 0:
                raise KernelSpecError(f"scale must be positive, got {self.scale!r}")
        dims = {c.m for c in self.children}
        if len(dims) != 1:
            raise KernelSpecError(f"child output dimensions disagree: {sorted(dims)}")
        (m,) = dims
        if self.m is not None and self.m != m:
            raise KernelSpecError(f"m={self.m} disagrees with child dimension {m}")
        return m

    def to_dict(self):
        d = {"variant": self.variant, "m": self.m}
        if self.base is not None:
            d["base"] = self.base.to_dict()
        if self.A is not None:
            d["A"] = [[complex_to_json(v) for v in row] for row in self.A]
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        if self.scale is not None:
            d["scale"] = self.scale
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "variant" not in d:
            raise KernelSpecError("kernel spec must be an object with a 'variant'")
        A = d.get("A")
        if A is not None:
            A = tuple(tuple(parse_complex(v) for v in row) for row in A)
        return cls(
            variant=d["variant"],
            base=BaseKernel.from_dict(d["base"]) if d.get("base") is not None else None,
            m=d.get("m"),
            A=A,
            children=tuple(cls.from_dict(c) for c in d.get("children", ())),
            scale=d.get("scale"),
        )


class OperatorKernel:
    """Evaluator for an operator-valued kernel.

    Parameters
    ----------
    block_fn : callable
        ``block_fn(T, X)`` with ``T`` of shape ``(nt, d)`` and ``X`` of shape
        ``(nx, d)`` returning ``(nt, nx, m, m)`` complex values.
    m : int
        Output dimension.
    spec : KernelSpec, optional
        The spec the kernel was built from; ``None`` for hand-built kernels.
    """

    def __init__(self, block_fn, m, spec=None):
        self._block_fn = block_fn
        self.m = int(m)
        self.spec = spec

    def __repr__(self):
        return f"OperatorKernel(m={self.m}, spec={self.spec!r})"

    @classmethod
    def from_scalar(cls, fn, m=1):
        """Wrap a vectorized scalar kernel ``fn(T, X) -> (nt, nx)`` as ``fn * I_m``."""
        eye = np.eye(m, dtype=complex)

        def block_fn(T, X):
            return np.asarray(fn(T, X), dtype=complex)[:, :, None, None] * eye

        return cls(block_fn, m)

    def blocks(self, T, X):
        T = as_points(T)
        X = as_points(X, dim=T.shape[1])
        out = np.asarray(self._block_fn(T, X), dtype=complex)
        expected = (T.shape[0], X.shape[0], self.m, self.m)
        if out.shape != expected:
            raise DimensionError(f"kernel returned shape {out.shape}, expected {expected}")
        return out

    def __call__(self, t, x):
        t = as_point(t)
        x = as_point(x, dim=t.shape[0])
        return self.blocks(t[None, :], x[None, :])[0, 0]

    def same_as(self, other):
        return self is other or (self.spec is not None and self.spec == other.spec)


def build_kernel(spec):
    """Turn a :class:`KernelSpec` (or its dict form) into an :class:`OperatorKernel`."""
    if isinstance(spec, dict):
        spec = KernelSpec.from_dict(spec)
    v = spec.variant
    if v == "scalar_times_identity":
        base, eye = spec.base, np.eye(spec.m, dtype=complex)

        def block_fn(T, X):
            return base(T, X)[:, :, None, None] * eye

    elif v == "separable":
        base, A = spec.base, np.asarray(spec.A, dtype=complex)
        # exact Hermitian projection; the spec check already bounded the change
        A = (A + A.conj().T) / 2

        def block_fn(T, X):
            return base(T, X)[:, :, None, None] * A

    else:
        kids = [build_kernel(c) for c in spec.children]
        if v == "sum":

            def block_fn(T, X):
                out = kids[0].blocks(T, X)
                for k in kids[1:]:
                    out = out + k.blocks(T, X)
                return out

        elif v == "scaled":
            scale = float(spec.scale)

            def block_fn(T, X):
                return scale * kids[0].blocks(T, X)

        else:

            def block_fn(T, X):
                out = kids[0].blocks(T, X)
                for k in kids[1:]:
                    out = out * k.blocks(T, X)
                return out

    return OperatorKernel(block_fn, spec.m, spec)


def gram(K, points, check=True, tol=DEFAULT_TOL):
    """Block Gram matrix of shape ``(n m, n m)`` with block ``(i, j) = K(x_i, x_j)``.

    With ``check`` the result is verified to be Hermitian and a
    :class:`NonHermitianKernelError` is raised otherwise.
    """
    P = as_points(points)
    n, m = P.shape[0], K.m
    G = K.blocks(P, P).transpose(0, 2, 1, 3).reshape(n * m, n * m)
    if check:
        dist = hermitian_part_distance(G)
        scale = float(np.max(np.abs(G))) if G.size else 0.0
        if dist > tol.abs_tol + tol.rel_tol * scale:
            raise NonHermitianKernelError(f"Gram matrix is not Hermitian (defect {dist:.3g})")
    return G


@dataclass(frozen=True)
class PsdResult:
    is_psd: bool
    min_eigenvalue: float
    floor: float


def check_psd(K, points, tol=DEFAULT_TOL):
    """Smallest eigenvalue of the block Gram against ``tol.eig_floor``."""
    P = as_points(points)
    if P.shape[0] == 0:
        raise ValueError("check_psd needs at least one point")
    G = gram(K, P, check=True, tol=tol)
    lo = float(np.linalg.eigvalsh(G)[0])
    floor = tol.eig_floor(G.shape[0])
    return PsdResult(is_psd=lo >= floor, min_eigenvalue=lo, floor=floor)


def section_apply(K, x, y, t):
    """Value at ``t`` of the section ``K_x y``, i.e. ``K(t, x) y``."""
    return K(t, x) @ as_vector(y, K.m)
