"""Stopping-time form of the decay bound.

Let ``tau`` be the number of steps a simple random walk (uniform over all
neighbours) started at ``u`` needs to first arrive in the allowed region
``{W <= E}``, and let ``delta`` be the smallest ``(W(v) - E)/deg(v)`` over
the forbidden region. Then ``|phi(u)| <= f(u) * max|phi|`` with
``f(u) = E[(1 + delta)^(-tau)] = sum_l P(tau = l) (1 + delta)^(-l)``.

``f`` is computed exactly from the first-step equations of the absorbing
chain and, independently, by Monte Carlo.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundReport, default_tol_verify
from .errors import EmptyAllowedRegion, EnergyMismatch, NoForbiddenRegion, NumericalError, StepCapExceeded
from .graph import Graph, as_potential
from .spectral import EigenPair

__all__ = [
    "WalkBound",
    "compute_delta",
    "exact_moment",
    "moment_residual",
    "mc_moment",
    "walk_bound",
    "verify_walk_bound",
    "vacuous_walk_report",
    "DEFAULT_STEP_CAP",
]

DEFAULT_STEP_CAP = 10**6
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class WalkBound:
    energy: float
    delta: float
    allowed: np.ndarray = field(repr=False)
    exact_moment: np.ndarray = field(repr=False)
    residual: float = 0.0
    mc_moment: np.ndarray | None = field(default=None, repr=False)
    mc_stderr: np.ndarray | None = field(default=None, repr=False)
    sample_count: int = 0
    seed: int | None = None


def compute_delta(graph: Graph, potential, energy: float) -> float:
    w = as_potential(potential, graph.n)
    forbidden = w > energy
    if not forbidden.any():
        raise NoForbiddenRegion(f"every vertex has W(v) <= {energy!r}; the walk bound is vacuous")
    return float(np.min((w[forbidden] - energy) / graph.degree_array[forbidden]))


def moment_residual(graph: Graph, potential, energy: float, delta: float, f: np.ndarray) -> float:
    """Max violation of ``f(u) = (1+delta)^-1 mean_{w~u} f(w)`` (forbidden u)
    and ``f(u) = 1`` (allowed u)."""
    w = as_potential(potential, graph.n)
    offsets, targets = graph.csr
    sums = np.add.reduceat(f[targets], offsets[:-1])
    rhs = sums / graph.degree_array / (1.0 + delta)
    res = np.where(w > energy, f - rhs, f - 1.0)
    return float(np.max(np.abs(res)))


def exact_moment(graph: Graph, potential, energy: float, delta: float) -> tuple[np.ndarray, float]:
    """Solve the absorbing-chain system for ``f(u) = E[(1 + delta)^(-tau)]``.

    On the forbidden block the system ``(1 + delta) deg(u) f(u) - sum_{w~u, w
    forbidden} f(w) = #allowed neighbours`` is strictly diagonally dominant,
    so the solution is unique. One step of iterative refinement follows the
    direct solve. Returns ``(f, residual)``.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    w = as_potential(potential, graph.n)
    allowed = w <= energy
    if not allowed.any():
        raise EmptyAllowedRegion(f"no vertex has W(v) <= {energy!r}")
    f = np.ones(graph.n)
    forb = np.flatnonzero(~allowed)
    if forb.size:
        a = graph.adjacency_matrix()
        m = np.diag((1.0 + delta) * graph.degree_array[forb]) - a[np.ix_(forb, forb)]
        rhs = a[np.ix_(forb, np.flatnonzero(allowed))].sum(axis=1)
        x = np.linalg.solve(m, rhs)
        x += np.linalg.solve(m, rhs - m @ x)
        f[forb] = x
    residual = moment_residual(graph, w, energy, delta, f)
    if residual > RESIDUAL_TOL:
        raise NumericalError(f"absorbing-chain residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}")
    return f, residual


def _walk_lengths(
    offsets: np.ndarray,
    targets: np.ndarray,
    degrees: np.ndarray,
    allowed: np.ndarray,
    start: int,
    samples: int,
    rng: np.random.Generator,
    step_cap: int,
) -> np.ndarray | None:
    """Hitting times of ``samples`` independent walks; ``None`` if any walk
    exceeds ``step_cap``."""
    tau = np.zeros(samples, dtype=np.int64)
    pos = np.full(samples, start, dtype=np.int64)
    live = np.arange(samples)
    steps = 0
    while live.size:
        if steps >= step_cap:
            return None
        steps += 1
        deg = degrees[pos]
        pick = (rng.random(pos.size) * deg).astype(np.int64)
        pos = targets[offsets[pos] + pick]
        stopped = allowed[pos]
        tau[live[stopped]] = steps
        keep = ~stopped
        live = live[keep]
        pos = pos[keep]
    return tau


def mc_moment(
    graph: Graph,
    potential,
    energy: float,
    delta: float,
    samples: int,
    seed: int,
    step_cap: int = DEFAULT_STEP_CAP,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of ``E[(1 + delta)^(-tau)]`` at every start vertex.

    Start vertex ``v`` draws from its own PCG64 stream seeded by
    ``SeedSequence(seed, spawn_key=(v,))``, so each estimate is reproducible
    and independent of the others. Returns ``(estimate, standard_error)``.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    w = as_potential(potential, graph.n)
    allowed = w <= energy
    if not allowed.any():
        raise EmptyAllowedRegion(f"no vertex has W(v) <= {energy!r}")
    offsets, targets = graph.csr
    degrees = graph.degree_array
    est = np.ones(graph.n)
    err = np.zeros(graph.n)
    capped = []
    base = 1.0 + delta
    for v in np.flatnonzero(~allowed):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(int(v),))))
        tau = _walk_lengths(offsets, targets, degrees, allowed, int(v), samples, rng, step_cap)
        if tau is None:
            capped.append(int(v))
            continue
        lengths, counts = np.unique(tau, return_counts=True)
        weights = base ** (-lengths.astype(np.float64))
        mean = float(np.dot(counts, weights)) / samples
        est[v] = mean
        if samples > 1:
            var = float(np.dot(counts, (weights - mean) ** 2)) / (samples - 1)
            err[v] = np.sqrt(var / samples)
        else:
            err[v] = np.nan
    if capped:
        raise StepCapExceeded(f"walks from {len(capped)} vertices exceeded {step_cap} steps", vertices=capped)
    return est, err


def walk_bound(
    graph: Graph,
    potential,
    energy: float,
    samples: int = 0,
    seed: int = 0,
    step_cap: int = DEFAULT_STEP_CAP,
) -> WalkBound:
    """Exact moment, plus a Monte Carlo estimate when ``samples > 0``."""
    w = as_potential(potential, graph.n)
    delta = compute_delta(graph, w, energy)
    f, residual = exact_moment(graph, w, energy, delta)
    mc = se = None
    if samples > 0:
        mc, se = mc_moment(graph, w, energy, delta, samples, seed, step_cap)
    return WalkBound(
        energy=energy,
        delta=delta,
        allowed=w <= energy,
        exact_moment=f,
        residual=residual,
        mc_moment=mc,
        mc_stderr=se,
        sample_count=samples,
        seed=seed if samples > 0 else None,
    )


def verify_walk_bound(
    pair: EigenPair,
    walk: WalkBound,
    rho: np.ndarray | None = None,
    tol: float | None = None,
) -> BoundReport:
    """Check ``|phi(u)| <= f(u) * max|phi|``; ``rho`` (Agmon distance at the
    same energy) adds the plain bound for comparison."""
    if walk.energy != pair.eigenvalue:
        raise EnergyMismatch(f"walk computed at E = {walk.energy!r}, eigenvalue is {pair.eigenvalue!r}")
    abs_phi = np.abs(pair.eigenvector)
    sup = float(abs_phi.max())
    if rho is None:
        rho = np.full_like(abs_phi, np.nan)
        theorem = np.full_like(abs_phi, np.nan)
    else:
        rho = np.asarray(rho)
        theorem = np.exp(-rho) * sup
    return BoundReport(
        kind="walk",
        energy=pair.eigenvalue,
        abs_phi=abs_phi,
        rho=rho,
        theorem_bound=theorem,
        bound=walk.exact_moment * sup,
        allowed=walk.allowed,
        tol=default_tol_verify(pair) if tol is None else tol,
    )


def vacuous_walk_report(pair: EigenPair, allowed: np.ndarray, rho: np.ndarray | None = None) -> BoundReport:
    """Report for an energy with empty forbidden region: nothing to check."""
    abs_phi = np.abs(pair.eigenvector)
    sup = float(abs_phi.max())
    rho = np.zeros_like(abs_phi) if rho is None else np.asarray(rho)
    return BoundReport(
        kind="walk",
        energy=pair.eigenvalue,
        abs_phi=abs_phi,
        rho=rho,
        theorem_bound=np.exp(-rho) * sup,
        bound=np.full_like(abs_phi, sup),
        allowed=np.asarray(allowed),
        tol=default_tol_verify(pair),
        vacuous=True,
    )
