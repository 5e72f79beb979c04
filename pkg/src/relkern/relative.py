"""
Relative reproducing sections and minimum-norm fitting from differences.

For a reproducing kernel ``K`` the relative section between ``x`` and ``y`` is
``M_{x,y} = K_y - K_x``, the map sending ``u`` to the function
``t -> (K(t, y) - K(t, x)) u``. Its adjoint recovers differences of point
values,

    M_{x,y}^* f = f(y) - f(x)        for every f in H_K,

and the sections telescope, ``M_{a,b} + M_{b,c} = M_{a,c}``. Finite spans of
relative sections form a subspace ``H_M`` of ``H_K``; :func:`expand` writes an
element of ``H_M`` explicitly as an element of ``H_K``.

Difference data never fix the absolute level of a function. A fitted
:class:`RelativeElement` is the representative inside ``H_M`` unless an
anchor ``(x0, v0)`` is given, in which case a constant offset is added so
that the model takes the value ``v0`` at ``x0``.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_TOL, DimensionError, as_point, as_points, as_vector, hermitian_part_distance
from .kernels import NonHermitianKernelError
from .rkhs import RkhsElement, SolveInfo, _check_same_kernel, evaluate_many, solve_hermitian


@dataclass(frozen=True, eq=False)
class RelativeSection:
    """The section ``M_{x,y} = K_y - K_x``."""

    kernel: object
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = as_point(self.x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", as_point(self.y, dim=x.shape[0]))

    def apply(self, u):
        """The element ``M_{x,y} u`` of ``H_K``."""
        u = as_vector(u, self.kernel.m)
        return RkhsElement(self.kernel, np.vstack([self.y, self.x]), np.vstack([u, -u]))


@dataclass(frozen=True)
class DifferenceConstraint:
    """Observation ``f(y) - f(x) = delta``."""

    x: tuple
    y: tuple
    delta: tuple


def relative_apply_many(Mxy, u, points):
    """``(K(t, y) - K(t, x)) u`` for each row ``t`` of ``points``."""
    K = Mxy.kernel
    u = as_vector(u, K.m)
    P = as_points(points, dim=Mxy.x.shape[0])
    B = K.blocks(P, np.vstack([Mxy.y, Mxy.x]))
    return (B[:, 0] - B[:, 1]) @ u


def relative_apply(Mxy, u, t):
    t = as_point(t, dim=Mxy.x.shape[0])
    return relative_apply_many(Mxy, u, t[None, :])[0]


def relative_adjoint(Mxy, f):
    """``M_{x,y}^* f = f(y) - f(x)``."""
    _check_same_kernel(Mxy.kernel, f.kernel)
    vals = evaluate_many(f, np.vstack([Mxy.y, Mxy.x]))
    return vals[0] - vals[1]


def cocycle_defect(K, x1, x2, x3, u, probe_points=None, seed=0):
    """Largest ``|M_{x1,x2} u + M_{x2,x3} u - M_{x1,x3} u|`` over probe points.

    Without explicit ``probe_points`` the probes are ``x1, x2, x3`` plus ten
    standard normal points drawn with ``seed``.
    """
    x1 = as_point(x1)
    x2 = as_point(x2, dim=x1.shape[0])
    x3 = as_point(x3, dim=x1.shape[0])
    if probe_points is None:
        rng = np.random.default_rng(seed)
        probe_points = np.vstack([x1, x2, x3, rng.standard_normal((10, x1.shape[0]))])
    P = as_points(probe_points, dim=x1.shape[0])
    a = relative_apply_many(RelativeSection(K, x1, x2), u, P)
    b = relative_apply_many(RelativeSection(K, x2, x3), u, P)
    c = relative_apply_many(RelativeSection(K, x1, x3), u, P)
    return float(np.max(np.linalg.norm(a + b - c, axis=1)))


def relative_gram(K, xs, ys, tol=DEFAULT_TOL):
    """Block Gram of the relative sections ``M_{x_i, y_i}``.

    Block ``(i, j)`` is ``K(y_i, y_j) - K(y_i, x_j) - K(x_i, y_j) + K(x_i, x_j)``
    so that ``<M_j c_j, M_i c_i>_K = c_i^H G_ij c_j``.
    """
    X = as_points(xs)
    Y = as_points(ys, dim=X.shape[1])
    if X.shape[0] != Y.shape[0]:
        raise DimensionError(f"{X.shape[0]} left points but {Y.shape[0]} right points")
    s, m = X.shape[0], K.m
    cross = K.blocks(Y, X) + K.blocks(X, Y)
    B = K.blocks(Y, Y) - cross + K.blocks(X, X)
    G = B.transpose(0, 2, 1, 3).reshape(s * m, s * m)
    dist = hermitian_part_distance(G)
    if dist > tol.abs_tol + tol.rel_tol * float(np.max(np.abs(G), initial=0.0)):
        raise NonHermitianKernelError(f"relative Gram is not Hermitian (defect {dist:.3g})")
    return G


@dataclass(frozen=True, eq=False)
class RelativeElement:
    """``g = sum_j M_{xs[j], ys[j]} coefficients[j] (+ offset)``.

    ``offset`` is zero in the ``H_M`` gauge and set by an anchor otherwise;
    it only enters point evaluation, never norms or containment.
    """

    kernel: object
    xs: np.ndarray
    ys: np.ndarray
    coefficients: np.ndarray
    offset: np.ndarray | None = None
    info: SolveInfo | None = field(default=None, compare=False)

    def __post_init__(self):
        m = self.kernel.m
        C = np.asarray(self.coefficients, dtype=complex).reshape(-1, m)
        X = np.asarray(self.xs, dtype=float)
        Y = np.asarray(self.ys, dtype=float)
        if C.shape[0]:
            X = as_points(X)
            Y = as_points(Y, dim=X.shape[1])
        else:
            d = X.shape[-1] if X.ndim == 2 else 1
            X, Y = X.reshape(0, d), Y.reshape(0, d)
        if not (X.shape[0] == Y.shape[0] == C.shape[0]):
            raise DimensionError("xs, ys and coefficients must have equal length")
        off = np.zeros(m, dtype=complex) if self.offset is None else as_vector(self.offset, m)
        object.__setattr__(self, "xs", X)
        object.__setattr__(self, "ys", Y)
        object.__setattr__(self, "coefficients", C)
        object.__setattr__(self, "offset", off)

    @property
    def gauge(self):
        return "anchored" if np.any(self.offset != 0) else "H_M"

    @property
    def sections(self):
        return [RelativeSection(self.kernel, x, y) for x, y in zip(self.xs, self.ys)]

    def __len__(self):
        return self.coefficients.shape[0]

    def __call__(self, t):
        return self.evaluate_many(as_point(t)[None, :])[0]

    def evaluate_many(self, points):
        return evaluate_many(expand(self), points) + self.offset

    def norm(self, tol=DEFAULT_TOL):
        """``H_M`` norm from the relative Gram, ``sqrt(c^H G_M c)``."""
        if not len(self):
            return 0.0
        G = relative_gram(self.kernel, self.xs, self.ys, tol=tol)
        c = self.coefficients.reshape(-1)
        return float(np.sqrt(max((c.conj() @ G @ c).real, 0.0)))


def expand(g):
    """Rewrite ``g`` as an element of ``H_K``: ``M_{x,y} c = K_y c + K_x (-c)``."""
    if not len(g):
        return RkhsElement.zero(g.kernel, g.xs.shape[1])
    return RkhsElement(
        g.kernel,
        np.vstack([g.ys, g.xs]),
        np.vstack([g.coefficients, -g.coefficients]),
    )


def _merge_by_center(pieces, m):
    table = {}
    for center, coef in pieces:
        key = tuple(center.tolist())
        table[key] = table.get(key, np.zeros(m, dtype=complex)) + coef
    return table


def containment_residual(g, expansion=None):
    """``|| g - expansion ||_K`` with ``g`` read through its relative sections.

    Coefficients of both sides are collected per distinct center (exact
    coordinate equality) and the difference is measured in the ``H_K`` norm.
    ``expansion`` defaults to :func:`expand` ``(g)``.
    """
    if expansion is None:
        expansion = expand(g)
    _check_same_kernel(g.kernel, expansion.kernel)
    m = g.kernel.m
    pieces = []
    for section, c in zip(g.sections, g.coefficients):
        image = section.apply(c)
        pieces.extend(zip(image.centers, image.coefficients))
    lhs = _merge_by_center(pieces, m)
    rhs = _merge_by_center(zip(expansion.centers, expansion.coefficients), m)
    keys = sorted(set(lhs) | set(rhs))
    if not keys:
        return 0.0
    zero = np.zeros(m, dtype=complex)
    diff = RkhsElement(
        g.kernel,
        np.array(keys, dtype=float),
        np.array([lhs.get(k, zero) - rhs.get(k, zero) for k in keys]),
    )
    if not np.any(diff.coefficients):
        return 0.0
    C = diff.coefficients.reshape(-1)
    Gd = g.kernel.blocks(diff.centers, diff.centers).transpose(0, 2, 1, 3)
    Gd = Gd.reshape(C.shape[0], C.shape[0])
    return float(np.sqrt(max((C.conj() @ Gd @ C).real, 0.0)))


def stack_differences(constraints):
    """Arrays ``(xs, ys, deltas)`` from a list of :class:`DifferenceConstraint`."""
    if not constraints:
        raise ValueError("no difference constraints given")
    xs = as_points([c.x for c in constraints])
    ys = as_points([c.y for c in constraints], dim=xs.shape[1])
    deltas = np.array([as_vector(c.delta) for c in constraints])
    return xs, ys, deltas


def fit_differences(K, xs, ys, deltas, ridge=0.0, anchor=None, tol=DEFAULT_TOL):
    """Minimum-norm element of ``H_M`` matching ``g(y_i) - g(x_i) = delta_i``.

    Solves ``(G_M + ridge I) c = delta`` where ``G_M`` is :func:`relative_gram`.
    Rank-deficient systems (redundant constraint chains) and inconsistent
    ones (cycles whose differences do not telescope to zero) are solved in
    the least-squares sense; ``result.info.residual`` reports the misfit and
    :func:`is_feasible` tells whether it is within tolerance.

    ``anchor = (x0, v0)`` adds a constant offset so that the returned model
    evaluates to ``v0`` at ``x0``.
    """
    X = as_points(xs)
    Y = as_points(ys, dim=X.shape[1])
    if X.shape[0] == 0:
        raise ValueError("fit_differences needs at least one constraint")
    D = np.asarray(deltas, dtype=complex).reshape(X.shape[0], -1)
    if D.shape[1] != K.m:
        raise DimensionError(f"deltas have dimension {D.shape[1]}, kernel has m={K.m}")
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge!r}")
    G = relative_gram(K, X, Y, tol=tol)
    rhs = D.reshape(-1)
    c, info = solve_hermitian(G, rhs, ridge)
    g = RelativeElement(K, X, Y, c.reshape(-1, K.m), info=info)
    if anchor is not None:
        x0, v0 = anchor
        x0 = as_point(x0, dim=X.shape[1])
        offset = as_vector(v0, K.m) - g(x0)
        g = RelativeElement(K, X, Y, g.coefficients, offset=offset, info=info)
    return g


def is_feasible(g, deltas, tol=DEFAULT_TOL):
    """Whether the fit of ``g`` to ``deltas`` met its linear system within tolerance."""
    rhs_norm = float(np.linalg.norm(np.asarray(deltas, dtype=complex)))
    return g.info.feasible(rhs_norm, tol)
