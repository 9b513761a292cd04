"""Thermal statistics of SAT Hamiltonians across the clause-density transition.

Energies are violation counts enumerated over all 2^n assignments and
streamed into a histogram; the enumeration kernel is compiled when the
extension built, with a numpy fallback selected at import.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import TooManyVariables
from .pseudobool import CnfInstance, random_ksat

try:
    from . import _satcore as _kernel

    KERNEL_BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on the build
    from . import _satcore_py as _kernel

    KERNEL_BACKEND = "python"

from . import _satcore_py as _kernel_py

ENUMERATION_LIMIT = 24


def _clause_patterns(inst: CnfInstance):
    """(mask, target) per clause: violated iff assignment & mask == target.

    Variable i maps to bit n-1-i so integer assignments match the bit-tuple
    ordering used elsewhere.
    """
    masks = np.zeros(inst.m, dtype=np.uint64)
    targets = np.zeros(inst.m, dtype=np.uint64)
    for c, clause in enumerate(inst.clauses):
        mask = target = 0
        for index, pol in clause:
            bit = 1 << (inst.n - 1 - index)
            mask |= bit
            if pol == 0:   # negated literal is false when the variable is 1
                target |= bit
        masks[c] = mask
        targets[c] = target
    return masks, targets


def energy_histogram(inst: CnfInstance, backend: str | None = None) -> np.ndarray:
    """hist[e] = number of assignments violating exactly e clauses."""
    if inst.n > ENUMERATION_LIMIT:
        raise TooManyVariables(f"n = {inst.n} exceeds the enumeration limit")
    masks, targets = _clause_patterns(inst)
    mod = _kernel_py if backend == "python" else _kernel
    return np.asarray(mod.violation_histogram(inst.n, masks, targets), dtype=np.int64)


@dataclass
class GibbsState:
    """Thermal weights over the exact energy histogram of a diagonal H."""

    beta: float
    histogram: np.ndarray

    def __post_init__(self):
        self.histogram = np.asarray(self.histogram, dtype=np.int64)

    @property
    def energies(self) -> np.ndarray:
        return np.nonzero(self.histogram)[0]

    def partition(self) -> float:
        e = np.arange(len(self.histogram))
        return float(np.sum(self.histogram * np.exp(-self.beta * e)))

    def probabilities(self) -> np.ndarray:
        e = np.arange(len(self.histogram))
        w = self.histogram * np.exp(-self.beta * e)
        return w / w.sum()

    def ground_energy(self) -> int:
        return int(self.energies.min())

    def ground_degeneracy(self) -> int:
        return int(self.histogram[self.ground_energy()])

    def ground_occupancy(self) -> float:
        """p(λ_min, β) = d e^{-βλ_min} / Σ_x e^{-βf(x)}."""
        e0 = self.ground_energy()
        return float(self.ground_degeneracy() * math.exp(-self.beta * e0) / self.partition())


def gibbs_occupancy(inst: CnfInstance, beta: float, backend: str | None = None) -> float:
    return GibbsState(beta, energy_histogram(inst, backend)).ground_occupancy()


def single_spin_thermal_probability(bits, beta: float) -> float:
    """Closed form Π_j (1 - (-1)^{x_j} tanh β)/2 for H = Σ_j Z_j."""
    p = 1.0
    t = math.tanh(beta)
    for b in bits:
        p *= 0.5 * (1.0 - t if not b else 1.0 + t)
    return p


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    alpha: float
    beta: float
    frac_sat: float
    mean_p: float
    stderr_p: float
    mean_lambda_min: float
    instances: int

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha, "beta": self.beta, "frac_sat": self.frac_sat,
            "mean_p": self.mean_p, "stderr_p": self.stderr_p,
            "mean_lambda_min": self.mean_lambda_min, "instances": self.instances,
        }


def default_threads() -> int:
    env = os.environ.get("GROUNDLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sat_sweep(n: int, alpha_grid, instances_per_point: int, beta_list, seed: int,
              k: int = 3, threads: int | None = None) -> list[SweepRow]:
    """Satisfiable fraction and Gibbs ground occupancy over a clause-density grid.

    Deterministic by seed: cell (alpha index, instance index) draws its own
    substream, so thread count never changes the numbers.
    """
    if n > ENUMERATION_LIMIT:
        raise TooManyVariables(f"n = {n} exceeds the enumeration limit")
    alpha_grid = list(alpha_grid)
    beta_list = list(beta_list)
    threads = threads or default_threads()

    def run_cell(cell):
        a_idx, inst_idx = cell
        alpha = alpha_grid[a_idx]
        m = int(round(alpha * n))
        rng = np.random.default_rng([seed, a_idx, inst_idx])
        inst = random_ksat(n, m, k, rng)
        hist = energy_histogram(inst)
        e0 = int(np.nonzero(hist)[0].min())
        occ = [GibbsState(beta, hist).ground_occupancy() for beta in beta_list]
        return a_idx, e0, occ

    cells = [(a, i) for a in range(len(alpha_grid)) for i in range(instances_per_point)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]

    rows: list[SweepRow] = []
    for a_idx, alpha in enumerate(alpha_grid):
        sub = [r for r in results if r[0] == a_idx]
        e0s = np.array([r[1] for r in sub], dtype=float)
        frac_sat = float(np.mean(e0s == 0))
        for b_idx, beta in enumerate(beta_list):
            ps = np.array([r[2][b_idx] for r in sub])
            stderr = float(ps.std(ddof=1) / math.sqrt(len(ps))) if len(ps) > 1 else 0.0
            rows.append(SweepRow(float(alpha), float(beta), frac_sat,
                                 float(ps.mean()), stderr, float(e0s.mean()), len(sub)))
    return rows


def satisfiable_crossing(rows: list[SweepRow]) -> float | None:
    """Linear interpolation of the 50%-satisfiable clause density."""
    seen = {}
    for row in rows:
        seen[row.alpha] = row.frac_sat
    alphas = sorted(seen)
    for lo, hi in zip(alphas, alphas[1:]):
        f_lo, f_hi = seen[lo], seen[hi]
        if f_lo >= 0.5 >= f_hi:
            if f_lo == f_hi:
                return (lo + hi) / 2.0
            return lo + (f_lo - 0.5) * (hi - lo) / (f_lo - f_hi)
    return None


def enumeration_rate(n: int = 18, m: int = 72, seed: int = 0,
                     backend: str | None = None) -> float:
    """Assignments per second pushed through the histogram kernel."""
    import time

    inst = random_ksat(n, m, 3, np.random.default_rng(seed))
    start = time.perf_counter()
    energy_histogram(inst, backend)
    elapsed = time.perf_counter() - start
    return (1 << n) / elapsed
