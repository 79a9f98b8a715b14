import numpy as np
import pytest

from agmon.errors import EmptyAllowedRegion, EnergyMismatch, NoForbiddenRegion, StepCapExceeded
from agmon.graph import Graph, gen_path, gen_tree_hub
from agmon.metric import agmon_distance
from agmon.spectral import assemble, eig_all, eig_smallest
from agmon.stochastic import (
    compute_delta,
    exact_moment,
    mc_moment,
    moment_residual,
    vacuous_walk_report,
    verify_walk_bound,
    walk_bound,
)

from corpus import corpus
from oracles import walk_series

P3 = gen_path(3)
W_P3 = [0.0, 10.0, 0.0]


def test_delta_p3():
    assert compute_delta(P3, W_P3, 1.0) == 4.5


def test_delta_no_forbidden():
    with pytest.raises(NoForbiddenRegion):
        compute_delta(P3, [0.0, 0.0, 0.0], 0.0)


def test_delta_tree_hub_attained_at_degree_four():
    g, hub = gen_tree_hub(3, 2)
    w = np.full(g.n, 1e4)
    w[hub] = 0.0
    lam = eig_smallest(assemble(g, w), 1)[0].eigenvalue
    # forbidden degrees: root 3, level one 4, leaves 2
    assert compute_delta(g, w, lam) == pytest.approx((1e4 - lam) / 4, rel=1e-15)


def test_exact_moment_p3():
    f, res = exact_moment(P3, W_P3, 1.0, 4.5)
    assert f[0] == 1.0 and f[2] == 1.0
    assert f[1] == pytest.approx(2 / 11, rel=1e-15)
    assert res <= 1e-12


def test_exact_moment_neighbours_all_allowed():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    w = [5.0, 0.0, 0.0, 0.0]
    d = compute_delta(g, w, 0.0)
    f, _ = exact_moment(g, w, 0.0, d)
    assert f[0] == pytest.approx(1 / (1 + d), rel=1e-15)


def test_exact_moment_empty_allowed():
    with pytest.raises(EmptyAllowedRegion):
        exact_moment(P3, W_P3, -1.0, 0.5)


@pytest.mark.parametrize("idx", range(0, len(corpus()), 9))
def test_exact_moment_matches_series(idx):
    g, w = corpus()[idx]
    e = eig_all(assemble(g, w))[0].eigenvalue
    d = compute_delta(g, w, e)
    f, res = exact_moment(g, w, e, d)
    assert res <= 1e-12
    assert np.all((f > 0) & (f <= 1))
    assert np.all(f[w <= e] == 1.0)
    # series oracle truncated where (1+delta)^-terms is negligible
    terms = int(np.ceil(40 / np.log1p(d)))
    for v in range(0, g.n, max(1, g.n // 6)):
        assert walk_series(g, w, e, d, v, terms=terms) == pytest.approx(f[v], abs=1e-12)


def test_moment_residual_detects_error():
    f, _ = exact_moment(P3, W_P3, 1.0, 4.5)
    bad = f.copy()
    bad[1] *= 1.01
    assert moment_residual(P3, W_P3, 1.0, 4.5, bad) > 1e-4


def test_mc_allowed_start_exact():
    est, err = mc_moment(P3, W_P3, 1.0, 4.5, samples=50, seed=3)
    assert est[0] == 1.0 and err[0] == 0.0


def test_mc_p3_middle():
    est, err = mc_moment(P3, W_P3, 1.0, 4.5, samples=10**5, seed=1)
    assert abs(est[1] - 2 / 11) <= 3 * err[1] + 1e-15


def test_mc_deterministic():
    g, w = corpus()[5]
    e = float(np.median(w))
    d = compute_delta(g, w, e)
    a = mc_moment(g, w, e, d, samples=500, seed=42)
    b = mc_moment(g, w, e, d, samples=500, seed=42)
    np.testing.assert_array_equal(a[0], b[0])
    c = mc_moment(g, w, e, d, samples=500, seed=43)
    assert not np.array_equal(a[0], c[0])


@pytest.mark.parametrize("idx", [0, 7, 14, 30])
def test_mc_consistent_with_exact(idx):
    g, w = corpus()[idx]
    e = eig_all(assemble(g, w))[0].eigenvalue
    d = compute_delta(g, w, e)
    f, _ = exact_moment(g, w, e, d)
    est, err = mc_moment(g, w, e, d, samples=20000, seed=idx)
    inside = np.abs(est - f) <= 4 * err + 8 * np.finfo(float).eps * f
    assert inside.mean() >= 0.99


def test_step_cap():
    g = gen_path(40)
    w = np.full(40, 5.0)
    w[0] = 0.0
    with pytest.raises(StepCapExceeded) as exc:
        mc_moment(g, w, 0.0, 0.1, samples=100, seed=0, step_cap=3)
    assert 39 in exc.value.vertices


@pytest.mark.parametrize("idx", range(0, len(corpus()), 5))
def test_walk_bound_holds(idx):
    g, w = corpus()[idx]
    pair = eig_all(assemble(g, w))[0]
    wb = walk_bound(g, w, pair.eigenvalue)
    rep = verify_walk_bound(pair, wb, rho=agmon_distance(g, w, pair.eigenvalue).rho)
    assert rep.passed
    assert rep.kind == "walk"


def test_walk_energy_mismatch():
    g, w = corpus()[1]
    pair = eig_all(assemble(g, w))[0]
    wb = walk_bound(g, w, pair.eigenvalue + 0.5)
    with pytest.raises(EnergyMismatch):
        verify_walk_bound(pair, wb)


def test_vacuous_zero_potential():
    g = gen_path(4)
    w = np.zeros(4)
    pair = eig_all(assemble(g, w))[0]
    with pytest.raises(NoForbiddenRegion):
        walk_bound(g, w, pair.eigenvalue)
    rep = vacuous_walk_report(pair, w <= pair.eigenvalue)
    assert rep.vacuous and rep.passed


def test_long_corridor_comparison():
    # 20 forbidden vertices between two allowed ends
    n = 22
    g = gen_path(n)
    w = np.full(n, 3.0)
    w[0] = w[-1] = 0.0
    pair = eig_all(assemble(g, w))[0]
    e = pair.eigenvalue
    wb = walk_bound(g, w, e)
    rho = agmon_distance(g, w, e).rho
    rep = verify_walk_bound(pair, wb, rho=rho)
    assert rep.passed
    # every interior vertex: the walk bound is the tighter one
    interior = slice(1, n - 1)
    assert np.all(rep.tighter_than_theorem[interior])
    mid = n // 2
    assert rep.bound[mid] < 0.01 * rep.theorem_bound[mid]
