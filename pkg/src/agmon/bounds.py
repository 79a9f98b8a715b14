"""Pointwise decay bounds for eigenvectors and the greedy path behind them.

For an eigenpair ``(E, phi)`` of ``L + W`` and every vertex ``v``::

    |phi(v)| <= exp(-rho_E(v)) * max|phi|

where ``rho_E`` is the Agmon distance of :mod:`agmon.metric`. The refined
form replaces ``max|phi|`` by the amplitude at the allowed endpoint of the
path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EnergyMismatch, NumericalError, StartNotForbidden, ZeroAmplitudeStart
from .graph import Graph, as_potential
from .metric import AgmonField, agmon_distance_to
from .spectral import EigenPair

__all__ = [
    "BoundReport",
    "GreedyPath",
    "ProofInvariantViolated",
    "default_tol_verify",
    "verify_theorem",
    "refined_bound",
    "verify_refined",
    "greedy_path",
    "local_identity_residual",
]

TOL_VERIFY_REL = 1e-9


class ProofInvariantViolated(NumericalError):
    """A step of the greedy-path argument failed on concrete numbers."""


def default_tol_verify(pair: EigenPair) -> float:
    return TOL_VERIFY_REL * pair.sup_norm


@dataclass(frozen=True)
class BoundReport:
    """Per-vertex comparison of ``|phi|`` against one bound.

    ``kind`` names the verified bound (``"theorem"``, ``"refined"`` or
    ``"walk"``); ``bound`` holds its values and ``theorem_bound`` is always
    included for side-by-side comparison. A vacuous report (walk bound
    without forbidden region) passes trivially and carries ``bound = max|phi|``.
    """

    kind: str
    energy: float
    abs_phi: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    theorem_bound: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)
    allowed: np.ndarray = field(repr=False)
    tol: float = 0.0
    vacuous: bool = False
    extra_ok: bool = True

    @property
    def n(self) -> int:
        return self.abs_phi.shape[0]

    @property
    def slack(self) -> np.ndarray:
        return self.bound - self.abs_phi

    @property
    def min_slack(self) -> float:
        return float(self.slack.min())

    @property
    def max_violation(self) -> float:
        return max(0.0, -self.min_slack)

    @property
    def worst_vertex(self) -> int:
        return int(np.argmin(self.slack))

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.abs_phi))

    @property
    def argmax_allowed(self) -> bool:
        return bool(self.allowed[self.argmax])

    @property
    def passed(self) -> bool:
        return self.vacuous or (self.min_slack >= -self.tol and self.extra_ok)

    @property
    def tighter_than_theorem(self) -> np.ndarray:
        return self.bound < self.theorem_bound


def _check_energy(field_energy: float, pair: EigenPair) -> None:
    if field_energy != pair.eigenvalue:
        raise EnergyMismatch(
            f"distances computed at E = {field_energy!r}, eigenvalue is {pair.eigenvalue!r}"
        )


def _theorem_bound(rho: np.ndarray, sup: float) -> np.ndarray:
    return np.exp(-rho) * sup


def verify_theorem(graph: Graph, potential, pair: EigenPair, agmon: AgmonField, tol: float | None = None) -> BoundReport:
    """Check ``|phi(v)| <= exp(-rho_E(v)) * max|phi|`` at every vertex."""
    _check_energy(agmon.energy, pair)
    w = as_potential(potential, graph.n)
    abs_phi = np.abs(pair.eigenvector)
    sup = float(abs_phi.max())
    bound = _theorem_bound(agmon.rho, sup)
    return BoundReport(
        kind="theorem",
        energy=pair.eigenvalue,
        abs_phi=abs_phi,
        rho=np.asarray(agmon.rho),
        theorem_bound=bound,
        bound=bound,
        allowed=w <= pair.eigenvalue,
        tol=default_tol_verify(pair) if tol is None else tol,
    )


def refined_bound(abs_phi: np.ndarray, target_distances: dict[int, np.ndarray]) -> np.ndarray:
    """``max over allowed w of exp(-d(u -> w)) * |phi(w)|`` for every ``u``."""
    out = np.zeros_like(abs_phi)
    for w, dist in target_distances.items():
        np.maximum(out, np.exp(-dist) * abs_phi[w], out=out)
    return out


def verify_refined(
    graph: Graph,
    potential,
    pair: EigenPair,
    target_distances: dict[int, np.ndarray] | None = None,
    agmon: AgmonField | None = None,
    tol: float | None = None,
) -> BoundReport:
    """Check the endpoint-weighted bound.

    ``target_distances`` maps each allowed vertex ``w`` to the output of
    :func:`agmon_distance_to` for ``w``; it is computed when omitted. The
    report also requires the refined bound not to exceed the plain bound.
    """
    w = as_potential(potential, graph.n)
    e = pair.eigenvalue
    if agmon is not None:
        _check_energy(agmon.energy, pair)
    allowed = w <= e
    if target_distances is None:
        target_distances = {int(t): agmon_distance_to(graph, w, e, int(t)) for t in np.flatnonzero(allowed)}
    abs_phi = np.abs(pair.eigenvector)
    sup = float(abs_phi.max())
    stacked = np.array(list(target_distances.values())).reshape(-1, graph.n)
    rho = stacked.min(axis=0) if agmon is None else np.asarray(agmon.rho)
    theorem = _theorem_bound(rho, sup)
    refined = refined_bound(abs_phi, target_distances)
    tol = default_tol_verify(pair) if tol is None else tol
    return BoundReport(
        kind="refined",
        energy=e,
        abs_phi=abs_phi,
        rho=rho,
        theorem_bound=theorem,
        bound=refined,
        allowed=allowed,
        tol=tol,
        extra_ok=bool(np.all(refined <= theorem + tol)),
    )


@dataclass(frozen=True)
class GreedyPath:
    """Path of steps to the neighbour with largest ``|phi|``."""

    vertices: tuple[int, ...]
    abs_phi: tuple[float, ...]
    terminal_allowed: bool
    factors: tuple[float, ...] = ()

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def terminal(self) -> int:
        return self.vertices[-1]

    @property
    def collected_factor(self) -> float:
        """Product of ``[1 + (W(v_i) - E)/deg(v_i)]^-1`` over the forbidden steps."""
        return float(np.prod(self.factors)) if self.factors else 1.0

    def collected_bound(self) -> float:
        return self.collected_factor * self.abs_phi[-1]


def greedy_path(graph: Graph, potential, pair: EigenPair, start: int) -> GreedyPath:
    """Walk from a forbidden ``start`` to the allowed region, each time moving
    to the neighbour of largest ``|phi|`` (lowest index on ties).

    Raises :class:`ProofInvariantViolated` if ``|phi|`` fails to increase
    strictly, a vertex repeats, or the walk does not end in ``{W <= E}``.
    """
    w = as_potential(potential, graph.n)
    e = pair.eigenvalue
    phi = np.abs(pair.eigenvector)
    if not w[start] > e:
        raise StartNotForbidden(f"vertex {start} is allowed (W = {w[start]!r} <= E = {e!r})")
    if phi[start] == 0.0:
        raise ZeroAmplitudeStart(f"phi({start}) = 0; the bound holds trivially there")
    deg = graph.degrees
    path = [int(start)]
    factors = []
    seen = {int(start)}
    u = int(start)
    while w[u] > e:
        factors.append(1.0 / (1.0 + (w[u] - e) / deg[u]))
        nbrs = graph.adjacency[u]
        vals = phi[list(nbrs)]
        nxt = int(nbrs[int(np.argmax(vals))])
        if not phi[nxt] > phi[u]:
            raise ProofInvariantViolated(
                f"|phi| does not increase from {u} ({phi[u]:.6e}) to {nxt} ({phi[nxt]:.6e})"
            )
        if nxt in seen:
            raise ProofInvariantViolated(f"greedy path revisits vertex {nxt}")
        seen.add(nxt)
        path.append(nxt)
        u = nxt
    return GreedyPath(
        vertices=tuple(path),
        abs_phi=tuple(float(phi[v]) for v in path),
        terminal_allowed=bool(w[u] <= e),
        factors=tuple(factors),
    )


def local_identity_residual(graph: Graph, potential, pair: EigenPair) -> float:
    """Largest ``|[1 + (W(u)-E)/deg(u)] phi(u) - mean_{w~u} phi(w)|`` over
    forbidden ``u``; zero for an exact eigenpair."""
    w = as_potential(potential, graph.n)
    e = pair.eigenvalue
    phi = np.asarray(pair.eigenvector)
    deg = graph.degree_array
    worst = 0.0
    for u in np.flatnonzero(w > e):
        lhs = (1.0 + (w[u] - e) / deg[u]) * phi[u]
        rhs = phi[list(graph.adjacency[u])].sum() / deg[u]
        worst = max(worst, abs(lhs - rhs))
    return worst
