"""The q-ary tree with a hub: an instance where the decay bound is nearly sharp.

A complete q-ary tree of depth ``k`` has all leaves joined to one extra
vertex ``v*``. With ``W(v*) = 0`` and ``W = W_mag`` elsewhere the ground
state concentrates on ``v*`` and decays by a factor of about ``q / W_mag``
per level towards the root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EnergyMismatch, InputError
from .graph import Graph, gen_tree_hub, tree_hub_levels
from .metric import AgmonField
from .spectral import EigenPair, assemble, eig_smallest, refine_forbidden

__all__ = [
    "TreeExperiment",
    "DecayComparison",
    "tree_potential",
    "run_tree_experiment",
    "check_level_recurrence",
    "compare_decay_rates",
]


@dataclass(frozen=True)
class TreeExperiment:
    q: int
    k: int
    w_mag: float
    hub: int
    lambda1: float
    level_profile: np.ndarray  # mean |phi| on levels 0..k
    hub_value: float
    level_spread: np.ndarray  # (max - min) / mean of |phi| on each level
    ratios: np.ndarray  # phi_i / phi_{i+1}, i = 1..k-2
    graph: Graph = field(repr=False)
    potential: np.ndarray = field(repr=False)
    levels: np.ndarray = field(repr=False)
    pair: EigenPair = field(repr=False)

    @property
    def lambda_bound(self) -> float:
        return float(self.q**self.k)

    @property
    def lambda_bound_ok(self) -> bool:
        return self.lambda1 <= self.lambda_bound

    @property
    def predicted_ratio(self) -> float:
        return self.q / self.w_mag


@dataclass(frozen=True)
class DecayComparison:
    levels: np.ndarray  # interior levels i with a ratio phi_i / phi_{i+1}
    node_cost: np.ndarray  # Agmon node cost on each of those levels
    empirical_rate: np.ndarray  # -log(phi_i / phi_{i+1})
    rate_ratio: np.ndarray  # node_cost / empirical_rate
    root_rho: float
    root_log_decay: float  # log(|phi(root)| / max|phi|)

    @property
    def sharpness(self) -> float:
        """``log(|phi(root)|/max|phi|) / -rho(root)``; 1 means the bound is exact."""
        return self.root_log_decay / -self.root_rho


def tree_potential(n: int, hub: int, w_mag: float) -> np.ndarray:
    w = np.full(n, float(w_mag))
    w[hub] = 0.0
    return w


def run_tree_experiment(q: int, k: int, w_mag: float, seed: int = 0) -> TreeExperiment:
    """Ground state of the hub tree and its per-level profile.

    The eigenpair comes from :func:`eig_smallest`; its forbidden-region
    entries (all but ``v*``) are then recomputed by
    :func:`refine_forbidden`, since they shrink like ``(q/W)^level`` and
    fall below double-precision resolution of a direct solve.
    """
    if q < 2 or k < 2:
        raise InputError(f"need q >= 2 and k >= 2 for interior levels, got q={q}, k={k}")
    if not w_mag > q**k:
        raise InputError(f"W_mag must exceed q^k = {q**k}, got {w_mag}")
    graph, hub = gen_tree_hub(q, k)
    w = tree_potential(graph.n, hub, w_mag)
    h = assemble(graph, w)
    pair = refine_forbidden(h, eig_smallest(h, 1, seed=seed)[0])
    levels = tree_hub_levels(q, k)
    phi = np.abs(pair.eigenvector)
    profile = np.array([phi[levels == i].mean() for i in range(k + 1)])
    spread = np.array([np.ptp(phi[levels == i]) / profile[i] for i in range(k + 1)])
    ratios = profile[1 : k - 1] / profile[2:k]
    return TreeExperiment(
        q=q,
        k=k,
        w_mag=float(w_mag),
        hub=hub,
        lambda1=pair.eigenvalue,
        level_profile=profile,
        hub_value=float(phi[hub]),
        level_spread=spread,
        ratios=ratios,
        graph=graph,
        potential=w,
        levels=levels,
        pair=pair,
    )


def check_level_recurrence(exp: TreeExperiment, lambda_shift: float = 0.0) -> float:
    """Max over interior levels of
    ``|(W - lambda1 + q + 1) phi_i - q phi_{i+1} - phi_{i-1}|``, divided by
    ``W_mag * max_i phi_i``.

    ``lambda_shift`` perturbs ``lambda1`` (negative controls).
    """
    lam = exp.lambda1 + lambda_shift
    p = exp.level_profile
    q = exp.q
    res = [
        abs((exp.w_mag - lam + q + 1) * p[i] - q * p[i + 1] - p[i - 1])
        for i in range(1, exp.k)
    ]
    scale = exp.w_mag * p[1 : exp.k].max()
    return max(res) / scale


def compare_decay_rates(exp: TreeExperiment, agmon: AgmonField) -> DecayComparison:
    if agmon.energy != exp.lambda1:
        raise EnergyMismatch(f"field at E = {agmon.energy!r}, experiment has lambda1 = {exp.lambda1!r}")
    interior = np.arange(1, exp.k - 1)
    cost = np.array([agmon.node_cost[exp.levels == i].mean() for i in interior])
    rate = -np.log(exp.ratios)
    phi = np.abs(exp.pair.eigenvector)
    return DecayComparison(
        levels=interior,
        node_cost=cost,
        empirical_rate=rate,
        rate_ratio=cost / rate,
        root_rho=float(agmon.rho[0]),
        root_log_decay=math.log(phi[0] / phi.max()),
    )
