import math

import numpy as np
import pytest
import scipy.optimize

from relkern import (
    DifferenceConstraint,
    RelativeElement,
    RelativeSection,
    RkhsElement,
    cocycle_defect,
    containment_residual,
    expand,
    fit_differences,
    inner_product,
    is_feasible,
    norm,
    relative_adjoint,
    relative_apply,
    relative_gram,
)
from relkern.core import DEFAULT_TOL
from relkern.relative import stack_differences
from relkern.rkhs import evaluate_many
from relkern.sampling import FAMILIES, random_element, random_kernel, random_relative_element

E = math.exp(-1.0)


def test_relative_apply_examples(gauss, rng):
    M = RelativeSection(gauss, 0.0, 1.0)
    assert relative_apply(M, [1.0], 0.0)[0].real == pytest.approx(E - 1, abs=1e-15)
    assert relative_apply(M, [1.0], 0.0)[0].real == pytest.approx(-0.632121, abs=1e-6)
    np.testing.assert_array_equal(relative_apply(M, [0.0], 0.5), [0.0])
    same = RelativeSection(gauss, 0.3, 0.3)
    for t in rng.standard_normal(5):
        np.testing.assert_array_equal(relative_apply(same, [2.0], t), [0.0])


def test_relative_adjoint_examples(gauss, rng):
    f = RkhsElement.section(gauss, 0.0, [1.0])
    assert relative_adjoint(RelativeSection(gauss, 0.0, 1.0), f)[0].real == pytest.approx(-0.632121, abs=1e-6)
    np.testing.assert_array_equal(relative_adjoint(RelativeSection(gauss, 0.4, 0.4), f), [0.0])
    np.testing.assert_array_equal(relative_adjoint(RelativeSection(gauss, 0.0, 1.0), RkhsElement.zero(gauss)), [0.0])


def test_adjoint_identity_random(rng):
    for trial in range(100):
        m, d, s = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(0, 7))
        K = random_kernel(rng, FAMILIES[trial % len(FAMILIES)], m)
        f = random_element(rng, K, s, d)
        x, y = rng.standard_normal((2, d))
        M = RelativeSection(K, x, y)
        paired = [inner_product(f, M.apply(e)) for e in np.eye(m)]
        np.testing.assert_allclose(paired, relative_adjoint(M, f), rtol=0, atol=1e-9)


@pytest.mark.parametrize("family", FAMILIES)
def test_cocycle(rng, family):
    for _ in range(20):
        m, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        K = random_kernel(rng, family, m)
        x1, x2, x3 = rng.standard_normal((3, d))
        u = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        assert cocycle_defect(K, x1, x2, x3, u, seed=int(rng.integers(1000))) <= 1e-10
        assert cocycle_defect(K, x1, x1, x1, u) == 0.0
        # cycle x1 -> x2 -> x1 means M_{x1,x2} + M_{x2,x1} = 0
        assert cocycle_defect(K, x1, x2, x1, u) <= 1e-12


def test_antisymmetry(rng):
    K = random_kernel(rng, "sum", 2)
    x, y = rng.standard_normal((2, 3))
    u = rng.standard_normal(2)
    P = rng.standard_normal((6, 3))
    a = np.array([relative_apply(RelativeSection(K, x, y), u, t) for t in P])
    b = np.array([relative_apply(RelativeSection(K, y, x), u, t) for t in P])
    np.testing.assert_allclose(a, -b, atol=1e-14)


def test_relative_gram_examples(gauss):
    np.testing.assert_allclose(relative_gram(gauss, [0.0], [1.0]), [[2 - 2 * E]], rtol=1e-15)
    assert relative_gram(gauss, [0.0], [1.0])[0, 0].real == pytest.approx(1.264241, abs=1e-6)
    G = relative_gram(gauss, [0.0, 0.5], [1.0, 0.5])
    np.testing.assert_array_equal(G[1], [0, 0])
    np.testing.assert_array_equal(G[:, 1], [0, 0])
    G = relative_gram(gauss, [0.0, 0.0], [1.0, 1.0])
    assert np.linalg.det(G) == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(G, (2 - 2 * E) * np.ones((2, 2)))


def test_relative_gram_psd(rng):
    for fam in FAMILIES:
        K = random_kernel(rng, fam, 2)
        G = relative_gram(K, rng.standard_normal((6, 2)), rng.standard_normal((6, 2)))
        assert np.linalg.eigvalsh(G)[0] >= DEFAULT_TOL.eig_floor(G.shape[0])


def test_relative_gram_matches_pairings(rng):
    K = random_kernel(rng, "separable", 2)
    xs, ys = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
    G = relative_gram(K, xs, ys)
    secs = [RelativeSection(K, x, y) for x, y in zip(xs, ys)]
    E2 = np.eye(2)
    for i in range(3):
        for j in range(3):
            for a in range(2):
                for b in range(2):
                    # <M_j e_b, M_i e_a>_K
                    val = inner_product(secs[j].apply(E2[b]), secs[i].apply(E2[a]))
                    assert G[2 * i + a, 2 * j + b] == pytest.approx(val, abs=1e-12)


def test_fit_differences_single(gauss):
    g = fit_differences(gauss, [0.0], [1.0], [[1.0]])
    assert g.coefficients[0, 0].real == pytest.approx(1 / (2 - 2 * E), abs=1e-12)
    assert g.coefficients[0, 0].real == pytest.approx(0.790988, abs=1e-6)
    assert g.gauge == "H_M"
    assert is_feasible(g, [[1.0]])


def test_fit_differences_consistent_chain(gauss):
    xs, ys, d = [0.0, 1.0, 0.0], [1.0, 2.0, 2.0], [[1.0], [1.0], [2.0]]
    g = fit_differences(gauss, xs, ys, d)
    got = [relative_adjoint(s, expand(g)) for s in g.sections]
    assert np.max(np.abs(np.array(got) - d)) <= 1e-8
    assert is_feasible(g, d)


def _lstsq_oracle(G, rhs, rng):
    def obj(c):
        return float(np.sum((G @ c - rhs) ** 2))

    return min(
        scipy.optimize.minimize(obj, rng.standard_normal(len(rhs)), method="BFGS").fun for _ in range(5)
    )


def test_fit_differences_inconsistent_cycle(gauss, rng):
    g = fit_differences(gauss, [0.0, 1.0], [1.0, 0.0], [[1.0], [1.0]])
    G = relative_gram(gauss, [0.0, 1.0], [1.0, 0.0]).real
    oracle = math.sqrt(_lstsq_oracle(G, np.array([1.0, 1.0]), rng))
    assert oracle == pytest.approx(math.sqrt(2), abs=1e-6)
    assert g.info.residual == pytest.approx(oracle, abs=1e-6)
    assert not is_feasible(g, [[1.0], [1.0]])
    # the ridge does not hide the inconsistency
    g = fit_differences(gauss, [0.0, 1.0], [1.0, 0.0], [[1.0], [1.0]], ridge=1e-10)
    assert g.info.residual == pytest.approx(math.sqrt(2), abs=1e-9)


def test_fit_differences_random_consistent(rng):
    for trial in range(60):
        m, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        K = random_kernel(rng, FAMILIES[trial % len(FAMILIES)], m)
        f = random_element(rng, K, int(rng.integers(1, 9)), d)
        s = int(rng.integers(1, 9))
        xs, ys = rng.standard_normal((s, d)), rng.standard_normal((s, d))
        deltas = evaluate_many(f, ys) - evaluate_many(f, xs)
        g = fit_differences(K, xs, ys, deltas)
        got = np.array([relative_adjoint(sec, expand(g)) for sec in g.sections])
        assert np.max(np.abs(got - deltas)) <= 1e-8


def test_fit_differences_minimum_norm(rng):
    K = random_kernel(rng, "gaussian", 1)
    xs, ys = rng.standard_normal((3, 1)), rng.standard_normal((3, 1))
    deltas = rng.standard_normal((3, 1))
    g = fit_differences(K, xs, ys, deltas)
    base = g.norm()
    # any other element of the relative span built on extra pairs that meets the data is no smaller
    ex, ey = rng.standard_normal((3, 1)), rng.standard_normal((3, 1))
    allx, ally = np.vstack([xs, ex]), np.vstack([ys, ey])
    A = np.array([[relative_adjoint(RelativeSection(K, x, y), RelativeSection(K, a, b).apply([1.0]))[0]
                   for a, b in zip(allx, ally)] for x, y in zip(xs, ys)])
    _, _, vh = np.linalg.svd(A)
    null = vh[3:].conj().T
    for _ in range(50):
        coeffs = np.concatenate([g.coefficients.ravel(), np.zeros(3)]) + null @ rng.standard_normal(3)
        h = RelativeElement(K, allx, ally, coeffs[:, None])
        assert h.norm() >= base - 1e-10


def test_translation_invisibility(rng):
    K = random_kernel(rng, "separable", 2)
    f = random_element(rng, K, 4, 2)
    xs, ys = rng.standard_normal((5, 2)), rng.standard_normal((5, 2))
    const = np.array([3.0 - 1j, -2.5])
    d1 = evaluate_many(f, ys) - evaluate_many(f, xs)
    d2 = (evaluate_many(f, ys) + const) - (evaluate_many(f, xs) + const)
    g1, g2 = fit_differences(K, xs, ys, d1), fit_differences(K, xs, ys, d2)
    np.testing.assert_array_equal(np.round(d1 - d2, 12), 0)
    np.testing.assert_allclose(g1.coefficients, g2.coefficients, rtol=0, atol=1e-9)


def test_anchor_sets_level(gauss):
    g = fit_differences(gauss, [0.0], [1.0], [[1.0]], anchor=([0.0], [5.0]))
    assert g.gauge == "anchored"
    assert g([0.0])[0] == pytest.approx(5.0)
    assert (g([1.0]) - g([0.0]))[0] == pytest.approx(1.0)
    # norms ignore the offset
    assert g.norm() == pytest.approx(fit_differences(gauss, [0.0], [1.0], [[1.0]]).norm())


def test_containment(rng):
    for trial in range(50):
        m, d, s = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(0, 7))
        K = random_kernel(rng, FAMILIES[trial % len(FAMILIES)], m)
        g = random_relative_element(rng, K, s, d)
        assert containment_residual(g) <= 1e-10
        a, b = g.norm(), norm(expand(g))
        assert a == pytest.approx(b, rel=1e-8, abs=1e-12)


def test_containment_examples(gauss):
    empty = RelativeElement(gauss, np.zeros((0, 1)), np.zeros((0, 1)), np.zeros((0, 1)))
    assert containment_residual(empty) == 0.0
    g = RelativeElement(gauss, [0.0], [1.0], [[2.0]])
    assert len(expand(g)) == 2
    assert containment_residual(g) == 0.0


def test_containment_detects_wrong_expansion(gauss):
    g = RelativeElement(gauss, [0.0], [1.0], [[1.0]])
    wrong = RkhsElement(gauss, [0.0, 1.0], [[1.0], [-1.0]])  # K_x - K_y instead of K_y - K_x
    assert containment_residual(g, wrong) == pytest.approx(2 * math.sqrt(2 - 2 * E), rel=1e-12)


def test_stack_differences():
    cons = [DifferenceConstraint((0.0,), (1.0,), (1.0,)), DifferenceConstraint((1.0,), (2.0,), (0.5,))]
    xs, ys, ds = stack_differences(cons)
    assert xs.shape == ys.shape == (2, 1)
    np.testing.assert_array_equal(ds.ravel(), [1.0, 0.5])
    with pytest.raises(ValueError):
        stack_differences([])
