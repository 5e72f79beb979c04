"""
Semi-inner products on finite-dimensional l^p spaces and point-evaluation
functionals on a discrete Banach space of vector-valued functions.

For ``1 < p < inf`` the unique semi-inner product compatible with the l^p
norm is

.. math::
    [f, g] = \\sum_i f_i \\overline{g_i} |g_i|^{p-2} / \\|g\\|_p^{p-2},

with ``[f, 0] = 0``. It is linear in ``f``, satisfies ``[f, f] = ||f||_p^2``
and ``|[f, g]| <= ||f|| ||g||``, and in the second argument
``[f, a g] = conj(a) [f, g]``; for real ``a`` that agrees with
``[f, a g] = a [f, g]``.

The duality map sends ``f`` to the functional ``g -> [g, f]``, stored as a
coefficient vector ``w`` acting through the bilinear pairing
``g -> sum_i g_i w_i``. Its l^q norm, ``q = p / (p - 1)``, is the dual norm.

All vector functions broadcast over leading axes; the last axis is the
coordinate axis.
"""

from dataclasses import asdict, dataclass

import numpy as np
import scipy.optimize

from .core import DEFAULT_TOL, DimensionError, approx_eq, as_point, as_points


def _check_p(p):
    if not (1.0 < p < np.inf):
        raise ValueError(f"p must lie in (1, inf), got {p!r}")
    return float(p)


def conjugate_exponent(p):
    p = _check_p(p)
    return p / (p - 1.0)


@dataclass(frozen=True)
class SipSpace:
    """``C^n`` with the l^p norm, ``1 < p < inf``."""

    p: float
    n: int

    def __post_init__(self):
        _check_p(self.p)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.n!r}")

    @property
    def q(self):
        return conjugate_exponent(self.p)

    def vector(self, entries):
        v = np.asarray(entries, dtype=complex)
        if v.shape[-1:] != (self.n,):
            raise DimensionError(f"expected vectors of length {self.n}, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector entries must be finite")
        return v

    def random(self, rng, size=None):
        shape = (self.n,) if size is None else tuple(np.atleast_1d(size)) + (self.n,)
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    def norm(self, f):
        return lp_norm(f, self.p)

    def sip(self, f, g):
        return sip(f, g, self.p)

    def duality_map(self, f):
        return duality_map(f, self.p)


def lp_norm(f, p):
    """``(sum |f_i|^p)^(1/p)`` over the last axis."""
    p = float(p)
    a = np.abs(np.asarray(f, dtype=complex))
    top = a.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return (top[..., 0] * ((a / safe) ** p).sum(axis=-1) ** (1.0 / p))


def _weights(g, p):
    # |g_i|^(p-2) / ||g||^(p-2), zero where g_i = 0 (needed when p < 2)
    a = np.abs(g)
    ng = lp_norm(g, p)[..., None]
    ratio = np.divide(a, ng, out=np.zeros_like(a), where=ng > 0)
    return np.where(a > 0, np.where(ratio > 0, ratio, 1.0) ** (p - 2.0), 0.0)


def sip(f, g, p):
    """Compatible semi-inner product ``[f, g]`` on l^p."""
    p = _check_p(p)
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape[-1] != g.shape[-1]:
        raise DimensionError(f"vectors of length {f.shape[-1]} and {g.shape[-1]}")
    return (f * g.conj() * _weights(g, p)).sum(axis=-1)


def duality_map(f, p):
    """Coefficients ``w`` of ``f* = [., f]`` under ``g -> sum g_i w_i``."""
    p = _check_p(p)
    f = np.asarray(f, dtype=complex)
    return f.conj() * _weights(f, p)


@dataclass(frozen=True)
class DualNormCheck:
    primal: float
    dual: float
    equal: bool


def dual_norm_check(f, p, tol=DEFAULT_TOL):
    """Compare ``||f||_p`` with the Holder dual norm ``||f*||_q``."""
    primal = float(lp_norm(f, p))
    dual = float(lp_norm(duality_map(f, p), conjugate_exponent(p)))
    return DualNormCheck(primal, dual, approx_eq(primal, dual, tol))


def dual_norm_by_search(w, p, rng, starts=8):
    """Lower bound on ``sup |sum g_i w_i| / ||g||_p`` by direct maximization.

    Independent of the Holder formula: random complex directions are polished
    with a quasi-Newton search on the ratio itself.
    """
    p = _check_p(p)
    w = np.asarray(w, dtype=complex)
    n = w.shape[-1]
    if not np.any(w):
        return 0.0

    def neg_ratio(z):
        g = z[:n] + 1j * z[n:]
        ng = lp_norm(g, p)
        if ng == 0:
            return 0.0
        return -abs(np.sum(g * w)) / ng

    best = 0.0
    for _ in range(starts):
        z0 = rng.standard_normal(2 * n)
        res = scipy.optimize.minimize(neg_ratio, z0, method="BFGS", options={"gtol": 1e-12})
        best = max(best, -float(res.fun), -neg_ratio(z0))
    return best


@dataclass(frozen=True)
class SipAxiomReport:
    """Outcome of randomized checks of the semi-inner product axioms.

    ``conj_homogeneity_defect`` tests the second-argument homogeneity in the
    chosen ``form`` over real scalars. The two ``complex_*`` fields report
    both forms over complex scalars; they are informational.
    """

    p: float
    n: int
    trials: int
    seed: int
    form: str
    linearity_defect: float
    positivity_ok: bool
    conj_homogeneity_defect: float
    complex_homogeneity_defect_literal: float
    complex_homogeneity_defect_conjugate: float
    cauchy_schwarz_violations: int
    compatibility_defect: float
    dual_norm_defect: float

    def to_dict(self):
        return asdict(self)


def sip_axiom_report(space, trials=1000, seed=0, form="literal", tol=DEFAULT_TOL):
    """Randomized check of linearity, positivity, homogeneity, Cauchy-Schwarz.

    ``form="literal"`` checks ``[f, a g] = a [f, g]``, ``form="conjugate"``
    checks ``[f, a g] = conj(a) [f, g]``; both are tested with real ``a``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if form not in ("literal", "conjugate"):
        raise ValueError(f"unknown homogeneity form {form!r}")
    p = space.p
    rng = np.random.default_rng(seed)
    f, g, h = (space.random(rng, trials) for _ in range(3))
    alpha = rng.standard_normal(trials) + 1j * rng.standard_normal(trials)
    beta = rng.standard_normal(trials) + 1j * rng.standard_normal(trials)
    a_real = rng.standard_normal(trials)

    lhs = sip(alpha[:, None] * f + beta[:, None] * g, h, p)
    linearity = np.abs(lhs - alpha * sip(f, h, p) - beta * sip(g, h, p))

    ff = sip(f, f, p)
    positivity_ok = bool(np.all(ff.real > 0) and np.all(np.abs(ff.imag) <= tol.abs_tol))

    fg = sip(f, g, p)
    scaled = a_real if form == "literal" else np.conj(a_real)
    homog = np.abs(sip(f, a_real[:, None] * g, p) - scaled * fg)
    fag = sip(f, alpha[:, None] * g, p)
    literal_c = np.abs(fag - alpha * fg)
    conj_c = np.abs(fag - alpha.conj() * fg)

    gg = sip(g, g, p)
    bound = np.sqrt(ff.real.clip(0)) * np.sqrt(gg.real.clip(0))
    violations = int(np.count_nonzero(np.abs(fg) - bound > tol.abs_tol))

    nf = lp_norm(f, p)
    compat = np.abs(np.sqrt(ff.real.clip(0)) - nf) / nf
    dual = lp_norm(duality_map(f, p), space.q)
    dual_defect = np.abs(dual - nf) / nf

    return SipAxiomReport(
        p=float(p),
        n=int(space.n),
        trials=int(trials),
        seed=int(seed),
        form=form,
        linearity_defect=float(linearity.max()),
        positivity_ok=positivity_ok,
        conj_homogeneity_defect=float(homog.max()),
        complex_homogeneity_defect_literal=float(literal_c.max()),
        complex_homogeneity_defect_conjugate=float(conj_c.max()),
        cauchy_schwarz_violations=violations,
        compatibility_defect=float(compat.max()),
        dual_norm_defect=float(dual_defect.max()),
    )


@dataclass(frozen=True)
class BanachFunctionSpace:
    """Functions from a finite domain into ``value_space`` with the norm

        ||f||_B = ( sum_x ||f(x)||_value^p_B )^(1/p_B).

    Uniformly convex and smooth for ``1 < p_B, p_value < inf``, and
    ``||f||_B = 0`` exactly when every value vanishes.
    """

    domain_points: np.ndarray
    value_space: SipSpace
    p_B: float

    def __post_init__(self):
        object.__setattr__(self, "domain_points", as_points(self.domain_points))
        _check_p(self.p_B)
        keys = {tuple(x) for x in self.domain_points.tolist()}
        if len(keys) != self.domain_points.shape[0]:
            raise ValueError("domain points must be distinct")

    @property
    def size(self):
        return self.domain_points.shape[0]

    def index(self, x):
        x = as_point(x, dim=self.domain_points.shape[1])
        hits = np.flatnonzero(np.all(self.domain_points == x, axis=1))
        if hits.size == 0:
            raise KeyError(f"{x.tolist()} is not a domain point")
        return int(hits[0])

    def norm(self, values):
        """``||f||_B`` for values of shape ``(..., N, k)``."""
        return lp_norm(lp_norm(values, self.value_space.p), self.p_B)

    def sample(self, values):
        return BanachFunctionSample(self, values)

    def random(self, rng, size=None):
        shape = (self.size,) if size is None else (size, self.size)
        return self.value_space.random(rng, shape)


@dataclass(frozen=True, eq=False)
class BanachFunctionSample:
    """One function in a :class:`BanachFunctionSpace`, values of shape ``(N, k)``."""

    space: BanachFunctionSpace
    values: np.ndarray

    def __post_init__(self):
        v = self.space.value_space.vector(self.values)
        if v.shape != (self.space.size, self.space.value_space.n):
            raise DimensionError(f"expected values of shape {(self.space.size, self.space.value_space.n)}, got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def domain_points(self):
        return self.space.domain_points

    @property
    def p_B(self):
        return self.space.p_B

    def norm(self):
        return float(self.space.norm(self.values))

    def __call__(self, x):
        return self.values[self.space.index(x)]


def point_evaluation(f, x):
    """``delta_x(f) = f(x)``."""
    return f(x)


def relative_evaluation(f, x, y):
    """``zeta_{x,y}(f) = f(y) - f(x)``."""
    return f(y) - f(x)


def relative_evaluation_bound(space):
    """Operator norm bound ``2^(1/q_B)`` of ``zeta_{x,y}`` for ``x != y``."""
    return 2.0 ** (1.0 / conjugate_exponent(space.p_B))


def point_evaluation_norm(space, x, trials=1000, seed=0):
    """Best lower bound found for the operator norm of ``delta_x``.

    Random samples are complemented by samples concentrated at ``x``, which
    attain the exact value 1 of this model.
    """
    i = space.index(x)
    rng = np.random.default_rng(seed)
    F = space.random(rng, trials)
    best = float(np.max(lp_norm(F[:, i], space.value_space.p) / space.norm(F)))
    concentrated = np.zeros_like(F)
    concentrated[:, i] = F[:, i]
    ratios = lp_norm(concentrated[:, i], space.value_space.p) / space.norm(concentrated)
    return max(best, float(np.max(ratios)))
