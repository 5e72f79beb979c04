"""Random kernels, point sets and finite-span elements for property checks."""

import numpy as np

from .kernels import BaseKernel, KernelSpec, build_kernel
from .relative import RelativeElement
from .rkhs import RkhsElement

FAMILIES = (
    "gaussian",
    "laplacian",
    "linear",
    "polynomial",
    "separable",
    "sum",
    "scaled",
    "product",
)


def random_psd_matrix(rng, m):
    B = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    A = B @ B.conj().T / m
    return (A + A.conj().T) / 2


def random_base(rng, name):
    if name in ("gaussian", "laplacian"):
        return BaseKernel(name, gamma=float(rng.uniform(0.3, 2.0)))
    if name == "polynomial":
        return BaseKernel(name, degree=int(rng.integers(1, 4)), offset=float(rng.uniform(0.0, 1.0)))
    return BaseKernel(name)


def random_spec(rng, family, m):
    """A random :class:`KernelSpec` of the given built-in family."""
    if family in ("gaussian", "laplacian", "linear", "polynomial"):
        return KernelSpec("scalar_times_identity", base=random_base(rng, family), m=m)
    if family == "separable":
        return KernelSpec("separable", base=random_base(rng, "gaussian"), A=random_psd_matrix(rng, m))
    if family == "sum":
        return KernelSpec(
            "sum",
            children=(
                KernelSpec("scalar_times_identity", base=random_base(rng, "gaussian"), m=m),
                KernelSpec("separable", base=random_base(rng, "laplacian"), A=random_psd_matrix(rng, m)),
            ),
        )
    if family == "scaled":
        child = KernelSpec("scalar_times_identity", base=random_base(rng, "polynomial"), m=m)
        return KernelSpec("scaled", children=(child,), scale=float(rng.uniform(0.1, 3.0)))
    if family == "product":
        return KernelSpec(
            "pointwise_product_diagonal",
            children=(
                KernelSpec("scalar_times_identity", base=random_base(rng, "gaussian"), m=m),
                KernelSpec("separable", base=random_base(rng, "laplacian"), A=random_psd_matrix(rng, m)),
            ),
        )
    raise ValueError(f"unknown kernel family {family!r}")


def random_kernel(rng, family, m):
    return build_kernel(random_spec(rng, family, m))


def random_points(rng, n, d):
    return rng.standard_normal((n, d))


def random_coefficients(rng, s, m):
    return rng.standard_normal((s, m)) + 1j * rng.standard_normal((s, m))


def random_element(rng, K, s, d):
    return RkhsElement(K, random_points(rng, s, d), random_coefficients(rng, s, K.m))


def random_relative_element(rng, K, s, d):
    return RelativeElement(
        K, random_points(rng, s, d), random_points(rng, s, d), random_coefficients(rng, s, K.m)
    )
