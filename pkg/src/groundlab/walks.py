"""Graph walks: stochastic vs quantum generators, long-time averages,
spectral entropy of Gibbs states, PageRank as a ground-state problem, and
single-ancilla phase estimation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (
    AliasRisk,
    DisconnectedGraph,
    NotEigenvector,
    NotLaplacian,
    NotStochastic,
    ZeroDegreeNode,
)
from .paulis import OperatorSum, as_amplitudes, realize_dense


@dataclass
class Graph:
    """Weighted symmetric adjacency matrix with zero diagonal."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.allclose(a, a.T, atol=1e-12):
            raise ValueError("adjacency must be symmetric")
        if np.abs(np.diag(a)).max(initial=0.0) > 0:
            raise ValueError("no self-loops allowed")
        self.adjacency = a

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def is_connected(self) -> bool:
        n = self.n
        seen = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in np.nonzero(self.adjacency[i])[0]:
                if j not in seen:
                    seen.add(int(j))
                    frontier.append(int(j))
        return len(seen) == n

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        a = np.zeros((n, n))
        for e in edges:
            if len(e) == 2:
                i, j, w = e[0], e[1], 1.0
            else:
                i, j, w = e
            a[i, j] = a[j, i] = w
        return cls(a)

    @classmethod
    def from_json_dict(cls, d: dict) -> "Graph":
        return cls.from_edges(d["n"], [(e["i"], e["j"], e.get("w", 1.0)) for e in d["edges"]])

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        """Plain 'i j w' lines; node count inferred."""
        edges = []
        top = -1
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) > 2 else 1.0
            edges.append((i, j, w))
            top = max(top, i, j)
        return cls.from_edges(top + 1, edges)

    def to_json_dict(self) -> dict:
        edges = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.adjacency[i, j]:
                    edges.append({"i": i, "j": j, "w": float(self.adjacency[i, j])})
        return {"n": self.n, "edges": edges}


def figure_walk_graph() -> Graph:
    """The worked five-node comparison graph (degrees 2,2,3,3,2)."""
    return Graph.from_edges(5, [(0, 1), (0, 3), (1, 2), (2, 3), (2, 4), (3, 4)])


@dataclass
class WalkGenerators:
    """A, D, L = D - A, S = L D^{-1}, Q = D^{-1/2} L D^{-1/2}."""

    adjacency: np.ndarray
    degree: np.ndarray
    laplacian: np.ndarray
    stochastic: np.ndarray   # uniform escape generator, column-sum-zero
    quantum: np.ndarray      # symmetric normalized Laplacian

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def build_generators(g: Graph) -> WalkGenerators:
    if not g.is_connected():
        raise DisconnectedGraph("walk generators need a connected graph")
    deg = g.degrees()
    if np.any(deg <= 0):
        raise ZeroDegreeNode("every node needs positive degree")
    a = g.adjacency
    lap = np.diag(deg) - a
    d_inv = np.diag(1.0 / deg)
    d_half = np.diag(np.sqrt(deg))
    d_half_inv = np.diag(1.0 / np.sqrt(deg))
    s = lap @ d_inv
    q = d_half_inv @ lap @ d_half_inv
    sim = d_half @ q @ d_half_inv
    if not np.allclose(sim, s, atol=1e-10):
        raise AssertionError("similarity S = D^{1/2} Q D^{-1/2} failed")
    return WalkGenerators(a, deg, lap, s, q)


def stationary_state(gen: WalkGenerators) -> np.ndarray:
    """π_i = D_ii / ΣD: the degree-proportional stationary distribution."""
    return gen.degree / gen.degree.sum()


def stochastic_evolve(gen: WalkGenerators, p0: np.ndarray, t: float) -> np.ndarray:
    return scipy.linalg.expm(-t * gen.stochastic) @ np.asarray(p0, dtype=float)


def quantum_evolve(gen: WalkGenerators, psi0: np.ndarray, t: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(gen.quantum)
    amps = np.asarray(psi0, dtype=complex)
    return vecs @ (np.exp(-1j * t * vals) * (vecs.conj().T @ amps))


@dataclass
class LongTimeAverage:
    probabilities: np.ndarray
    eta: float
    omega: np.ndarray | None
    stationary: np.ndarray


def long_time_average(gen: WalkGenerators, psi0) -> LongTimeAverage:
    """P_j = Σ_k |<j|Φ_k|ψ0>|² with degenerate eigenvalues merged into one
    projector; decomposes as (1-η)π + ηΩ with η = 1 - |<φ0|ψ0>|²."""
    amps = np.asarray(as_amplitudes(psi0), dtype=complex)
    vals, vecs = np.linalg.eigh(gen.quantum)
    groups = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[start] > 1e-9:
            groups.append(list(range(start, i)))
            start = i
    p = np.zeros(gen.n)
    for grp in groups:
        block = vecs[:, grp]
        projected = block @ (block.conj().T @ amps)
        p += np.abs(projected) ** 2
    pi = stationary_state(gen)
    phi0 = vecs[:, 0]
    weight0 = abs(np.vdot(phi0, amps)) ** 2
    eta = 1.0 - weight0
    omega = None
    if eta > 1e-12:
        omega = (p - (1.0 - eta) * pi) / eta
    return LongTimeAverage(p, float(eta), omega, pi)


def time_averaged_probabilities(gen: WalkGenerators, psi0, total_time: float = 1e4,
                                dt: float = 0.05) -> np.ndarray:
    """Direct Monte-Carlo-style time integral of |ψ_j(t)|²; oracle for tests."""
    vals, vecs = np.linalg.eigh(gen.quantum)
    amps = vecs.conj().T @ np.asarray(as_amplitudes(psi0), dtype=complex)
    steps = int(total_time / dt)
    times = (np.arange(steps) + 0.5) * dt
    acc = np.zeros(gen.n)
    # vectorized over time in chunks
    chunk = 4096
    for lo in range(0, steps, chunk):
        ts = times[lo:lo + chunk]
        phases = np.exp(-1j * np.outer(ts, vals)) * amps
        waves = phases @ vecs.T  # (chunk, n) site-basis amplitudes
        acc += (np.abs(waves) ** 2).sum(axis=0)
    return acc / steps


# ---------------------------------------------------------------------------
# Spectral entropy of stochastic generators
# ---------------------------------------------------------------------------

def is_generalized_laplacian(mat: np.ndarray, tol: float = 1e-9) -> bool:
    mat = np.asarray(mat, dtype=float)
    if not np.allclose(mat, mat.T, atol=tol):
        return False
    off = mat - np.diag(np.diag(mat))
    if off.max(initial=0.0) > tol:
        return False
    return bool(np.abs(mat.sum(axis=1)).max() <= 1e-8)


def gibbs_density(lap: np.ndarray, beta: float) -> np.ndarray:
    """ρ = e^{-βL} / Tr e^{-βL} (standard sign conventions)."""
    vals, vecs = np.linalg.eigh(lap)
    w = np.exp(-beta * (vals - vals.min()))
    w /= w.sum()
    return (vecs * w) @ vecs.T


def spectral_entropy(lap: np.ndarray, beta: float) -> float:
    """S(ρ) = -Tr ρ log2 ρ for the Gibbs state of a generalized Laplacian."""
    if not is_generalized_laplacian(lap):
        raise NotLaplacian("input is not a generalized Laplacian")
    vals = np.linalg.eigvalsh(lap)
    w = np.exp(-beta * (vals - vals.min()))
    w /= w.sum()
    w = w[w > 1e-300]
    return float(-(w * np.log2(w)).sum())


def log_partition(lap: np.ndarray, beta: float) -> float:
    """ln2 Z for the unshifted spectrum (λ0 = 0 on a generalized Laplacian)."""
    vals = np.linalg.eigvalsh(lap)
    return float(np.log2(np.exp(-beta * vals).sum()))


# ---------------------------------------------------------------------------
# PageRank
# ---------------------------------------------------------------------------

def google_matrix(link: np.ndarray, damping: float = 0.85) -> np.ndarray:
    """Column-stochastic damped matrix d·A_norm + (1-d)/n."""
    a = np.asarray(link, dtype=float)
    n = a.shape[0]
    sums = a.sum(axis=0)
    if np.any(sums <= 0):
        if damping >= 1.0:
            raise NotStochastic("dangling node and no damping")
        norm = np.zeros_like(a)
        nonzero = sums > 0
        norm[:, nonzero] = a[:, nonzero] / sums[nonzero]
        norm[:, ~nonzero] = 1.0 / n
    else:
        norm = a / sums
    return damping * norm + (1.0 - damping) / n


def pagerank_hamiltonian(g_matrix: np.ndarray) -> np.ndarray:
    """H = (1 - G)†(1 - G): PSD with the PageRank as its kernel vector."""
    g = np.asarray(g_matrix, dtype=float)
    if np.abs(g.sum(axis=0) - 1.0).max() > 1e-8 or g.min() < -1e-12:
        raise NotStochastic("matrix is not column-stochastic")
    m = np.eye(g.shape[0]) - g
    return m.T @ m


def pagerank_ground(g_matrix: np.ndarray) -> np.ndarray:
    """Ground eigenvector of (1-G)†(1-G), normalized to unit entry sum."""
    h = pagerank_hamiltonian(g_matrix)
    vals, vecs = np.linalg.eigh(h)
    v = vecs[:, 0]
    if v.sum() < 0:
        v = -v
    return v / v.sum()


def pagerank_power_iteration(g_matrix: np.ndarray, tol: float = 1e-14,
                             max_iter: int = 100000) -> np.ndarray:
    g = np.asarray(g_matrix, dtype=float)
    n = g.shape[0]
    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = g @ p
        new /= new.sum()
        if np.abs(new - p).max() < tol:
            return new
        p = new
    return p


# ---------------------------------------------------------------------------
# Phase estimation
# ---------------------------------------------------------------------------

def phase_readout(h: OperatorSum, phi, times) -> np.ndarray:
    """Exact ancilla-|0> probabilities of the control-qubit protocol.

    Ancilla starts in |+>, controlled e^{-it(|1><1|⊗H)} runs, a Hadamard
    precedes the Z readout; for an eigenvector the curve is (1 + cos λt)/2.
    """
    amps = np.asarray(as_amplitudes(phi), dtype=complex)
    mat = realize_dense(h)
    vals, vecs = np.linalg.eigh(mat)
    coeffs = vecs.conj().T @ amps
    probs = []
    for t in times:
        evolved = vecs @ (np.exp(-1j * vals * t) * coeffs)
        # branch amplitudes (|0> ± e^{-iHt})|φ>/2 after the final Hadamard
        plus = (amps + evolved) / 2.0
        probs.append(float(np.vdot(plus, plus).real))
    return np.asarray(probs)


def phase_estimate(h: OperatorSum, phi, times=None, residual_tol: float = 1e-6):
    """Recover the eigenvalue of an eigenvector from the cosine readout.

    The evolution is run with H shifted by its norm bound so the estimated
    frequency is single-signed; the shift is subtracted at the end.  An
    aliasing guard requires the cosine fit to reproduce the curve.
    """
    amps = np.asarray(as_amplitudes(phi), dtype=complex)
    mat = realize_dense(h)
    residual = np.linalg.norm(mat @ amps - (np.vdot(amps, mat @ amps)) * amps)
    if residual > 1e-8:
        raise NotEigenvector(f"residual {residual:.3g} exceeds 1e-8")
    shift = h.norm_bound() + 1.0
    shifted = h.copy()
    shifted.add(shift, "I" * h.n)
    mu_max = 2.0 * shift
    if times is None:
        t_max = 2.0 * math.pi / mu_max
        times = np.linspace(t_max / 32.0, t_max, 32)
    times = np.asarray(times, dtype=float)
    probs = phase_readout(shifted, amps, times)

    def residual_for(mu):
        return float(np.sum((probs - 0.5 * (1.0 + np.cos(mu * times))) ** 2))

    grid = np.linspace(0.0, mu_max, 4096)
    best = grid[int(np.argmin([residual_for(m) for m in grid]))]
    span = mu_max / 4095.0
    res = scipy.optimize.minimize_scalar(
        residual_for, bounds=(max(0.0, best - span), min(mu_max, best + span)),
        method="bounded", options={"xatol": 1e-12})
    mu = float(res.x)
    if residual_for(mu) > residual_tol:
        raise AliasRisk("cosine fit residual too large; time grid may alias")
    return mu - shift
