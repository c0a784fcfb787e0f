"""Cluster-state construction and entanglement criteria for graph states.

A cluster topology is a simple graph with adjacency matrix A.  The
entangling unitary U = (I + iA)(I + A^2)^(-1/2) Q maps a vector of
squeezed-mode amplitudes x_j + i*y_j onto cluster-mode amplitudes
X_j + i*Y_j; Q is an arbitrary orthogonal matrix that changes the
preparation circuit but not the nullifier statistics when the sources are
squeezed equally.  Cluster quality is measured through the nullifiers
N_j = Y_j - sum_i A_ji X_i, and two-node inseparability through the
criterion  var(N_1) + var(N_2) < 1/2  (strict).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .quadrature import (
    GaussianState,
    expr_covariance,
    x_quad,
    y_quad,
)

#: Two-node inseparability bound: the nullifier-variance sum must be below 1/2.
VLF_BOUND = 0.5

#: Classification guard absorbing matrix-product rounding (~1 ulp of the sum):
#: sums within this distance below the bound classify as boundary cases, i.e.
#: not entangled, keeping the inequality strict for states generated exactly
#: on the threshold.
VLF_GUARD = 1e-12

_UNITARY_TOL = 1e-12
_ORTHOGONAL_TOL = 1e-12


@dataclass(frozen=True)
class ClusterGraph:
    """Simple graph given by a symmetric 0/1 adjacency matrix, zero diagonal."""

    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ValueError("adjacency must be a square matrix with n >= 1")
        if not np.array_equal(adj, adj.astype(bool).astype(adj.dtype)):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diag(adj) != 0):
            raise ValueError("adjacency diagonal must be zero")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", adj.astype(int))

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    def degree(self, node: int) -> int:
        return int(self.adjacency[node].sum())

    def edges(self):
        adj = self.adjacency
        return [(i, j) for i in range(self.n_nodes) for j in range(i + 1, self.n_nodes) if adj[i, j]]

    @classmethod
    def from_text(cls, text: str) -> "ClusterGraph":
        """Parse a dense adjacency matrix: rows of whitespace-separated 0/1.

        Rows are separated by newlines or semicolons.
        """
        rows = [r.strip() for r in text.replace(";", "\n").splitlines() if r.strip()]
        if not rows:
            raise ValueError("empty adjacency text")
        adj = np.array([[int(tok) for tok in row.split()] for row in rows])
        return cls(adj)

    @classmethod
    def two_node(cls) -> "ClusterGraph":
        return cls(np.array([[0, 1], [1, 0]]))

    @classmethod
    def chain(cls, n: int) -> "ClusterGraph":
        adj = np.zeros((n, n), dtype=int)
        for i in range(n - 1):
            adj[i, i + 1] = adj[i + 1, i] = 1
        return cls(adj)

    @classmethod
    def star(cls, n: int) -> "ClusterGraph":
        adj = np.zeros((n, n), dtype=int)
        adj[0, 1:] = adj[1:, 0] = 1
        return cls(adj)


def _check_orthogonal(q: np.ndarray, n: int) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (n, n):
        raise ValueError("orthogonal matrix dimension does not match the graph")
    if np.max(np.abs(q.T @ q - np.eye(n))) > _ORTHOGONAL_TOL:
        raise ValueError("Q is not orthogonal within tolerance")
    return q


def default_two_node_q() -> np.ndarray:
    """Orthogonal freedom matching the two-source experimental layout."""
    return np.diag([1.0, -1.0])


def cluster_unitary(graph: ClusterGraph, q: np.ndarray | None = None) -> np.ndarray:
    """Entangling unitary U = (I + iA)(I + A^2)^(-1/2) Q.

    The inverse square root is taken by eigendecomposition of the symmetric
    positive-definite matrix I + A^2 (its spectrum is bounded below by 1,
    so the construction is always well conditioned).
    """
    n = graph.n_nodes
    q = np.eye(n) if q is None else _check_orthogonal(q, n)
    adj = graph.adjacency.astype(float)
    w, V = np.linalg.eigh(np.eye(n) + adj @ adj)
    inv_sqrt = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    U = (np.eye(n) + 1j * adj) @ inv_sqrt @ q
    if np.max(np.abs(U @ U.conj().T - np.eye(n))) > _UNITARY_TOL:
        raise ValueError("constructed matrix failed the unitarity check")
    return U


def unitary_to_symplectic(U: np.ndarray) -> np.ndarray:
    """Real 2n x 2n form of a mode unitary acting on x_j + i*y_j.

    X' = Re(U) X - Im(U) Y and Y' = Im(U) X + Re(U) Y; the result is both
    symplectic and orthogonal.
    """
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    if U.shape != (n, n) or np.max(np.abs(U @ U.conj().T - np.eye(n))) > 1e-10:
        raise ValueError("input is not unitary")
    S = np.zeros((2 * n, 2 * n))
    re, im = U.real, U.imag
    for j in range(n):
        for k in range(n):
            S[2 * j, 2 * k] = re[j, k]
            S[2 * j, 2 * k + 1] = -im[j, k]
            S[2 * j + 1, 2 * k] = im[j, k]
            S[2 * j + 1, 2 * k + 1] = re[j, k]
    return S


def nullifiers(graph: ClusterGraph) -> tuple:
    """Nullifier expressions N_j = Y_j - sum_i A_ji X_i over cluster modes."""
    adj = graph.adjacency
    out = []
    for j in range(graph.n_nodes):
        expr = y_quad(j)
        for i in range(graph.n_nodes):
            if adj[j, i]:
                expr = expr - x_quad(i)
        out.append(expr)
    return tuple(out)


def min_squeezing_threshold(graph: ClusterGraph) -> float:
    """Largest admissible source y variance: min over edges of 1/(2 + deg_i + deg_j)."""
    edges = graph.edges()
    if not edges:
        raise ValueError("threshold undefined: the graph has no edges")
    return min(1.0 / (2 + graph.degree(i) + graph.degree(j)) for i, j in edges)


def generate_cluster(source_y_variances: Sequence[float],
                     graph: ClusterGraph,
                     q: np.ndarray | None = None,
                     source_x_variances: Sequence[float] | None = None) -> GaussianState:
    """Cluster state from independently squeezed sources.

    One y variance per node; x variances default to the minimum-uncertainty
    partner 1/(16 * v_y).  For the two-node graph Q defaults to diag(1, -1),
    matching the beam-splitter-and-phase-shifter preparation; otherwise Q
    defaults to the identity.
    """
    n = graph.n_nodes
    vy = [float(v) for v in source_y_variances]
    if len(vy) != n:
        raise ValueError("need one source y variance per node")
    if any(v <= 0 for v in vy):
        raise ValueError("source variances must be positive")
    if source_x_variances is None:
        vx = [1.0 / (16.0 * v) for v in vy]
    else:
        vx = [float(v) for v in source_x_variances]
        if len(vx) != n or any(v <= 0 for v in vx):
            raise ValueError("invalid source x variances")
    if q is None:
        q = default_two_node_q() if n == 2 else np.eye(n)
    sources = GaussianState.squeezed_vacuum(zip(vx, vy))
    S = unitary_to_symplectic(cluster_unitary(graph, q))
    return GaussianState(S @ sources.mean, S @ sources.cov @ S.T)


@dataclass(frozen=True)
class VlfResult:
    """Two-node inseparability check: nullifier-variance sum and verdict."""

    nullifier_sum: float
    entangled: bool


def vlf_two_node_check(state: GaussianState, node_pair=(0, 1)) -> VlfResult:
    """Pairwise inseparability: var(Y_i - X_j) + var(Y_j - X_i) < 1/2, strict.

    Boundary values classify as not entangled; sums within VLF_GUARD of the
    bound count as boundary so that rounding in the state construction cannot
    flip the strict verdict.
    """
    i, j = node_pair
    if not (0 <= i < state.n_modes and 0 <= j < state.n_modes) or i == j:
        raise ValueError("invalid node pair")
    exprs = [y_quad(i) - x_quad(j), y_quad(j) - x_quad(i)]
    cov = expr_covariance(exprs, state.cov)
    total = float(cov[0, 0] + cov[1, 1])
    return VlfResult(total, total < VLF_BOUND - VLF_GUARD)
