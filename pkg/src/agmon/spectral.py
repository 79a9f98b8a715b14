"""Schrodinger operators ``H = L + diag(W)`` on graphs and their eigenpairs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _eigh
from .errors import ConvergenceFailure, SizeCapExceeded, SizeMismatch, ZeroVector
from .graph import Graph, as_potential

__all__ = [
    "Hamiltonian",
    "EigenPair",
    "assemble",
    "eig_all",
    "eig_smallest",
    "rayleigh_quotient",
    "quadratic_form",
    "refine_forbidden",
    "fix_sign",
    "DEFAULT_SIZE_CAP",
    "DEFAULT_REL_TOL",
]

DEFAULT_SIZE_CAP = 2000
DEFAULT_REL_TOL = 1e-10


@dataclass(frozen=True)
class Hamiltonian:
    graph: Graph
    potential: np.ndarray
    matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def norm(self) -> float:
        """Maximum absolute row sum; an upper bound for the spectral norm."""
        return float(np.abs(self.matrix).sum(axis=1).max())

    def default_tol(self) -> float:
        return DEFAULT_REL_TOL * max(self.norm, 1.0)

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    eigenvector: np.ndarray = field(repr=False)
    residual: float

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.eigenvector)))


def assemble(graph: Graph, potential) -> Hamiltonian:
    if len(potential) != graph.n:
        raise SizeMismatch(f"potential has {len(potential)} entries, graph has {graph.n} vertices")
    w = as_potential(potential, graph.n)
    h = -graph.adjacency_matrix()
    h[np.diag_indices(graph.n)] = graph.degree_array + w
    h.flags.writeable = False
    return Hamiltonian(graph=graph, potential=w, matrix=h)


def fix_sign(v: np.ndarray) -> np.ndarray:
    """Flip ``v`` so its largest-magnitude entry (lowest index on ties) is positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _residual(h: Hamiltonian, value: float, vec: np.ndarray) -> float:
    return float(np.linalg.norm(h.matrix @ vec - value * vec))


def _make_pair(h: Hamiltonian, value: float, vec: np.ndarray) -> EigenPair:
    # L is positive semi-definite, so every eigenvalue is >= min W; a value
    # below that is rounding and would empty the allowed region
    value = max(float(value), float(h.potential.min()))
    vec = fix_sign(vec / np.linalg.norm(vec))
    vec.flags.writeable = False
    return EigenPair(float(value), vec, _residual(h, value, vec))


def eig_all(
    h: Hamiltonian,
    tol: float | None = None,
    size_cap: int = DEFAULT_SIZE_CAP,
    method: str = "ql",
) -> list[EigenPair]:
    """Full spectrum of ``h`` in ascending order.

    ``method="ql"`` uses the in-package Householder + implicit QL solver;
    ``method="lapack"`` delegates to :func:`numpy.linalg.eigh` for large
    problems. Every returned pair is checked against ``tol`` (default
    ``1e-10 * ||H||``).
    """
    if h.n > size_cap:
        raise SizeCapExceeded(f"n = {h.n} exceeds dense size cap {size_cap}")
    tol = h.default_tol() if tol is None else tol
    if method == "ql":
        values, vectors = _eigh.eigh(h.matrix)
    elif method == "lapack":
        values, vectors = np.linalg.eigh(h.matrix)
    else:
        raise ValueError(f"unknown method {method!r}")
    pairs = [_make_pair(h, values[j], vectors[:, j]) for j in range(h.n)]
    worst = max(pairs, key=lambda p: p.residual)
    if worst.residual > tol:
        raise ConvergenceFailure(
            f"eigenpair residual {worst.residual:.3e} exceeds tolerance {tol:.3e}",
            residual=worst.residual,
        )
    return pairs


def _orthonormal_block(q: np.ndarray, block: np.ndarray, rng, drop: float = 1e-8) -> np.ndarray:
    """Orthonormalise ``block`` against the columns of ``q`` and itself.

    Columns that collapse (relative norm below ``drop``) are replaced by
    fresh random directions, so Krylov breakdown restarts rather than stalls.
    """
    n = block.shape[0]
    out = []
    basis = q
    for j in range(block.shape[1]):
        x = block[:, j].copy()
        for _attempt in range(4):
            scale = np.linalg.norm(x)
            for _ in range(2):
                if basis.shape[1]:
                    x -= basis @ (basis.T @ x)
            norm = np.linalg.norm(x)
            if scale > 0 and norm > drop * scale:
                break
            x = rng.standard_normal(n)
        else:
            continue
        x /= norm
        out.append(x)
        basis = np.column_stack([basis, x])
    return np.array(out).T.reshape(n, len(out))


def eig_smallest(
    h: Hamiltonian,
    count: int,
    tol: float | None = None,
    seed: int = 0,
    block_size: int | None = None,
) -> list[EigenPair]:
    """Lowest ``count`` eigenpairs by block Lanczos with full reorthogonalisation.

    The Krylov basis grows one block at a time; after each block the
    Rayleigh-Ritz problem on the whole basis is solved and the loop stops
    once every wanted Ritz pair has true residual ``||H x - theta x|| <= tol``.
    A block of at least ``count + 1`` random vectors resolves eigenvalue
    multiplicities up to the block size.
    """
    n = h.n
    if not 1 <= count <= n:
        raise ValueError(f"count must lie in 1..{n}, got {count}")
    tol = h.default_tol() if tol is None else tol
    b = min(n, block_size or count + 1)
    rng = np.random.Generator(np.random.PCG64(seed))
    q = np.zeros((n, 0))
    hq = np.zeros((n, 0))
    block = _orthonormal_block(q, rng.standard_normal((n, b)), rng)
    best = np.inf
    check_at = 0
    while True:
        hb = h.matrix @ block
        q = np.column_stack([q, block])
        hq = np.column_stack([hq, hb])
        m = q.shape[1]
        if m >= check_at or m == n:
            t = q.T @ hq
            t = 0.5 * (t + t.T)
            theta, y = _eigh.eigh(t)
            x = q @ y[:, :count]
            r = hq @ y[:, :count] - x * theta[:count]
            res = np.linalg.norm(r, axis=0)
            best = float(res.max())
            if best <= tol:
                return [_make_pair(h, theta[j], x[:, j]) for j in range(count)]
            check_at = m + max(b, m // 4)
        if m == n:
            raise ConvergenceFailure(
                f"Krylov space exhausted with residual {best:.3e} > {tol:.3e}", residual=best
            )
        nxt = hb - q @ (q.T @ hb)
        block = _orthonormal_block(q, nxt[:, : min(b, n - m)], rng)
        if block.shape[1] == 0:
            block = _orthonormal_block(q, rng.standard_normal((n, min(b, n - m))), rng)


def quadratic_form(h: Hamiltonian, f) -> float:
    """``sum over edges (f(u)-f(v))^2 + sum_v W(v) f(v)^2``."""
    f = np.asarray(f, dtype=np.float64)
    u, v = h.graph.edges.T
    return float(np.sum((f[u] - f[v]) ** 2) + np.sum(h.potential * f**2))


def rayleigh_quotient(h: Hamiltonian, f) -> float:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (h.n,):
        raise SizeMismatch(f"vector has shape {f.shape}, expected ({h.n},)")
    denom = float(f @ f)
    if denom == 0.0:
        raise ZeroVector("Rayleigh quotient of the zero vector")
    return quadratic_form(h, f) / denom


def refine_forbidden(h: Hamiltonian, pair: EigenPair, max_sweeps: int = 100) -> EigenPair:
    """Recompute the eigenvector on the forbidden region ``W > E``.

    There the eigen-equation reads
    ``phi(u) = sum_{w~u} phi(w) / (deg(u) + W(u) - E)``, a contraction with
    factor ``deg/(deg + W - E)``. Starting from a direct solve of the
    forbidden block, Jacobi sweeps of this map recover entries far below
    ``eps * ||phi||``, which a dense eigensolver cannot resolve. Entries in
    the allowed region and the eigenvalue are kept.
    """
    e = pair.eigenvalue
    w = h.potential
    forbidden = np.flatnonzero(w > e)
    if forbidden.size == 0:
        return pair
    allowed = np.flatnonzero(w <= e)
    phi = np.array(pair.eigenvector, dtype=np.float64)
    a = -h.matrix.copy()
    np.fill_diagonal(a, 0.0)
    denom = h.graph.degree_array[forbidden] + w[forbidden] - e
    block = np.diag(denom) - a[np.ix_(forbidden, forbidden)]
    rhs = a[np.ix_(forbidden, allowed)] @ phi[allowed]
    phi[forbidden] = np.linalg.solve(block, rhs)
    a_f = a[forbidden]
    for _ in range(max_sweeps):
        new = (a_f @ phi) / denom
        old = phi[forbidden]
        phi[forbidden] = new
        scale = np.maximum(np.abs(new), np.finfo(float).tiny)
        if np.all(np.abs(new - old) <= 4 * np.finfo(float).eps * scale):
            break
    return _make_pair(h, e, phi)
