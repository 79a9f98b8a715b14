import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agmon._eigh import eigh, tridiagonalize
from agmon.errors import SizeCapExceeded, SizeMismatch, ZeroVector
from agmon.graph import gen_cycle, gen_grid, gen_path, gen_random_connected, gen_tree_hub
from agmon.spectral import assemble, eig_all, eig_smallest, quadratic_form, rayleigh_quotient, refine_forbidden

from corpus import corpus


def test_assemble_examples():
    np.testing.assert_array_equal(assemble(gen_path(2), [0, 0]).matrix, [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(assemble(gen_path(2), [0, 3]).matrix, [[1, -1], [-1, 4]])
    np.testing.assert_array_equal(
        assemble(gen_cycle(3), [0, 0, 0]).matrix, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    )


def test_assemble_size_mismatch():
    with pytest.raises(SizeMismatch):
        assemble(gen_path(3), [0, 0])


def test_p2_ground_state():
    pairs = eig_all(assemble(gen_path(2), [0, 0]))
    assert [p.eigenvalue for p in pairs] == pytest.approx([0, 2], abs=1e-14)
    np.testing.assert_allclose(pairs[0].eigenvector, [1 / math.sqrt(2)] * 2, atol=1e-14)


@pytest.mark.parametrize("w0", [0.0, 0.5, 3.0, 17.25, 1e3])
def test_p2_closed_form(w0):
    # roots of x^2 - (2 + w0) x + w0 = 0
    disc = math.sqrt(w0 * w0 + 4.0)
    expected = [((2 + w0) - disc) / 2, ((2 + w0) + disc) / 2]
    got = [p.eigenvalue for p in eig_all(assemble(gen_path(2), [0.0, w0]))]
    assert got == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [4, 5, 8, 11])
def test_cycle_circulant(n):
    expected = sorted(2 - 2 * math.cos(2 * math.pi * j / n) for j in range(n))
    got = [p.eigenvalue for p in eig_all(assemble(gen_cycle(n), np.zeros(n)))]
    assert got == pytest.approx(expected, abs=1e-12)


def test_constant_kernel():
    g = gen_grid(3, 4)
    p = eig_all(assemble(g, np.zeros(g.n)))[0]
    assert p.eigenvalue == pytest.approx(0, abs=1e-13)
    np.testing.assert_allclose(p.eigenvector, np.full(g.n, 1 / math.sqrt(g.n)), atol=1e-12)


@pytest.mark.parametrize("g,w", corpus()[::6])
def test_eig_all_against_lapack(g, w):
    h = assemble(g, w)
    pairs = eig_all(h)
    values = np.array([p.eigenvalue for p in pairs])
    np.testing.assert_allclose(values, np.linalg.eigvalsh(h.matrix), atol=1e-10)
    assert np.all(np.diff(values) >= 0)
    vecs = np.column_stack([p.eigenvector for p in pairs])
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(g.n), atol=1e-8)
    tol = h.default_tol()
    for p in pairs:
        assert p.residual <= tol
        assert p.eigenvalue >= w.min()
        i = int(np.argmax(np.abs(p.eigenvector)))
        assert p.eigenvector[i] > 0


def test_tridiagonalize_similarity():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(9, 9))
    a = a + a.T
    d, e, q = tridiagonalize(a)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(q @ t @ q.T, a, atol=1e-12)
    np.testing.assert_allclose(q.T @ q, np.eye(9), atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 25), seed=st.integers(0, 2**32 - 1))
def test_eigh_random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    a = a + a.T
    vals, vecs = eigh(a)
    np.testing.assert_allclose(a @ vecs, vecs * vals, atol=1e-11 * max(1, np.abs(a).sum(1).max()))
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(n), atol=1e-12)


def test_size_cap():
    g = gen_path(30)
    with pytest.raises(SizeCapExceeded):
        eig_all(assemble(g, np.zeros(30)), size_cap=20)


@pytest.mark.parametrize("g,w", corpus()[::5])
def test_integration_by_parts(g, w):
    h = assemble(g, w)
    rng = np.random.default_rng(g.n)
    for _ in range(100):
        f = rng.normal(size=g.n)
        lhs = float(f @ h.matrix @ f)
        assert quadratic_form(h, f) == pytest.approx(lhs, rel=1e-10)


def _smallest_matches(g, w, count):
    h = assemble(g, w)
    small = eig_smallest(h, count)
    full = eig_all(h)[:count]
    for s, f in zip(small, full):
        assert s.eigenvalue == pytest.approx(f.eigenvalue, abs=1e-8)
        assert s.residual <= h.default_tol()


@pytest.mark.parametrize("g,w", corpus()[::7])
def test_eig_smallest_matches_eig_all(g, w):
    _smallest_matches(g, w, min(4, g.n))


@pytest.mark.parametrize(
    "g", [gen_cycle(8), gen_cycle(12), gen_grid(4, 4), gen_path(9), gen_tree_hub(2, 3)[0]]
)
def test_eig_smallest_degenerate_spectra(g):
    _smallest_matches(g, np.zeros(g.n), min(5, g.n - 1))


def test_eig_smallest_n200():
    g = gen_random_connected(200, 0.05, seed=11)
    w = np.random.default_rng(11).uniform(0, 20, 200)
    _smallest_matches(g, w, 3)


def test_eig_smallest_p2():
    assert eig_smallest(assemble(gen_path(2), [0, 0]), 1)[0].eigenvalue == pytest.approx(0, abs=1e-14)


def test_tree_hub_lambda1_below_q_pow_k():
    g, hub = gen_tree_hub(3, 2)
    w = np.full(g.n, 1e4)
    w[hub] = 0.0
    assert eig_smallest(assemble(g, w), 1)[0].eigenvalue <= 9


def test_rayleigh_quotient_examples():
    g, hub = gen_tree_hub(3, 2)
    w = np.full(g.n, 1e4)
    w[hub] = 0.0
    h = assemble(g, w)
    f = np.zeros(g.n)
    f[hub] = 1.0
    assert rayleigh_quotient(h, f) == 9.0
    h0 = assemble(gen_grid(2, 3), np.zeros(6))
    assert rayleigh_quotient(h0, np.ones(6)) == 0.0
    with pytest.raises(ZeroVector):
        rayleigh_quotient(h0, np.zeros(6))


@pytest.mark.parametrize("g,w", corpus()[:4])
def test_rayleigh_quotient_of_eigenvectors(g, w):
    h = assemble(g, w)
    for p in eig_all(h):
        assert rayleigh_quotient(h, p.eigenvector) == pytest.approx(p.eigenvalue, abs=1e-10)


def test_refine_forbidden_keeps_eigen_equation():
    g, hub = gen_tree_hub(3, 3)
    w = np.full(g.n, 1e8)
    w[hub] = 0.0
    h = assemble(g, w)
    raw = eig_all(h)[0]
    fine = refine_forbidden(h, raw)
    assert fine.residual <= h.default_tol()
    phi = fine.eigenvector
    assert np.all(phi > 0)
    forb = np.flatnonzero(w > fine.eigenvalue)
    lhs = (g.degree_array[forb] + w[forb] - fine.eigenvalue) * phi[forb]
    rhs = np.array([phi[list(g.adjacency[u])].sum() for u in forb])
    np.testing.assert_allclose(lhs, rhs, rtol=1e-13)
