"""Exact k-body to 2-body reductions with slack spins.

Closed-form gadgets (AND, COPY, cubic products), a parity chain that encodes
k-spin XOR through mediated 3-variable blocks, and a linear-feasibility
synthesizer that finds or refutes 2-body penalties for small target kernels
using exact rational arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import KTooSmall, NonpositiveDelta, TooLarge

SYNTH_LIMIT = 5  # n_logical + n_slack; exhaustive regime


@dataclass
class QuadraticPenalty:
    """Degree-≤2 penalty over 0/1 variables: logical block first, slack after.

    ``energy`` evaluates k0 + Σ l_i v_i + Σ q_{ij} v_i v_j; coefficients may be
    exact Fractions (synthesis output) or floats (closed-form gadgets).
    """

    n_logical: int
    n_slack: int
    k0: object = 0
    linear: dict = field(default_factory=dict)     # index -> coeff
    quadratic: dict = field(default_factory=dict)  # (i, j) i<j -> coeff
    delta: object = 1

    @property
    def n(self) -> int:
        return self.n_logical + self.n_slack

    def add_linear(self, i: int, coeff) -> "QuadraticPenalty":
        self.linear[i] = self.linear.get(i, 0) + coeff
        return self

    def add_quadratic(self, i: int, j: int, coeff) -> "QuadraticPenalty":
        key = (min(i, j), max(i, j))
        self.quadratic[key] = self.quadratic.get(key, 0) + coeff
        return self

    def energy(self, bits) -> object:
        total = self.k0
        for i, c in self.linear.items():
            if bits[i]:
                total += c
        for (i, j), c in self.quadratic.items():
            if bits[i] and bits[j]:
                total += c
        return total

    def min_over_slack(self, logical_bits):
        """(min energy, argmin slack assignment) for fixed logical bits."""
        best = None
        best_slack = None
        for slack in itertools.product((0, 1), repeat=self.n_slack):
            value = self.energy(tuple(logical_bits) + slack)
            if best is None or value < best:
                best, best_slack = value, slack
        return best, best_slack

    def kernel(self, tol=0) -> set:
        """Logical strings whose min-over-slack energy is minimal (= the floor)."""
        table = {bits: self.min_over_slack(bits)[0]
                 for bits in itertools.product((0, 1), repeat=self.n_logical)}
        floor = min(table.values())
        return {bits for bits, v in table.items() if v - floor <= tol}

    def merged(self, other: "QuadraticPenalty", index_map) -> "QuadraticPenalty":
        """Accumulate ``other`` with its variables renamed through index_map."""
        self.k0 += other.k0
        for i, c in other.linear.items():
            self.add_linear(index_map[i], c)
        for (i, j), c in other.quadratic.items():
            self.add_quadratic(index_map[i], index_map[j], c)
        return self

    def as_pseudobool(self):
        from .pseudobool import PseudoBooleanPoly

        poly = PseudoBooleanPoly(self.n)
        if self.k0:
            poly.add_term((), float(self.k0))
        for i, c in self.linear.items():
            poly.add_term((i,), float(c))
        for key, c in self.quadratic.items():
            poly.add_term(key, float(c))
        return poly

    def to_json_dict(self) -> dict:
        return {
            "n_logical": self.n_logical,
            "n_slack": self.n_slack,
            "k0": float(self.k0),
            "linear": {str(i): float(c) for i, c in sorted(self.linear.items())},
            "quadratic": {f"{i},{j}": float(c) for (i, j), c in sorted(self.quadratic.items())},
            "delta": float(self.delta),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "QuadraticPenalty":
        out = cls(d["n_logical"], d["n_slack"], d["k0"], delta=d["delta"])
        for i, c in d["linear"].items():
            out.add_linear(int(i), c)
        for key, c in d["quadratic"].items():
            i, j = key.split(",")
            out.add_quadratic(int(i), int(j), c)
        return out


@dataclass
class TargetKernel:
    """Accepted logical strings to pin at energy 0; the rest must sit ≥ delta."""

    n_logical: int
    accepted: set
    delta: object = 1

    def __post_init__(self):
        self.accepted = {tuple(int(b) for b in bits) for bits in self.accepted}
        full = 1 << self.n_logical
        if not self.accepted or len(self.accepted) >= full:
            raise ValueError("accepted set must be nonempty and proper")

    def rejected(self):
        return [bits for bits in itertools.product((0, 1), repeat=self.n_logical)
                if bits not in self.accepted]

    def to_json_dict(self) -> dict:
        return {"n": self.n_logical,
                "accepted": ["".join(map(str, bits)) for bits in sorted(self.accepted)]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "TargetKernel":
        return cls(d["n"], {tuple(int(ch) for ch in s) for s in d["accepted"]})


@dataclass
class Infeasible:
    """Refutation: every slack-argmin pattern induces an infeasible rational LP."""

    n_logical: int
    n_slack: int
    patterns_tried: int
    detail: str = ""

    def __bool__(self) -> bool:
        return False


# ---------------------------------------------------------------------------
# Closed-form gadgets
# ---------------------------------------------------------------------------

def and_gadget(delta: float = 1.0) -> QuadraticPenalty:
    """δ(3z + x1x2 - 2zx1 - 2zx2): kernel z = x1∧x2, violations per Table rows
    (0, 3δ, 0, δ, 0, δ, δ, 0)."""
    if delta <= 0:
        raise NonpositiveDelta("delta must be positive")
    g = QuadraticPenalty(n_logical=2, n_slack=1, delta=delta)
    g.add_linear(2, 3 * delta)
    g.add_quadratic(0, 1, delta)
    g.add_quadratic(0, 2, -2 * delta)
    g.add_quadratic(1, 2, -2 * delta)
    return g


def copy_gadget() -> QuadraticPenalty:
    """Triangular pairwise-equality penalty; kernel span{000, 111}."""
    g = QuadraticPenalty(n_logical=3, n_slack=0)
    for i in range(3):
        g.add_linear(i, 2)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        g.add_quadratic(i, j, -2)
    return g


def cubic_product_gadget(variant: str = "A") -> QuadraticPenalty:
    """Quadratic penalty whose min over one slack z equals -x1 x2 x3.

    Variant A: z(2 - x1 - x2 - x3).
    Variant B: z(-x1 + x2 + x3) - x1x2 - x1x3 + x1.
    """
    g = QuadraticPenalty(n_logical=3, n_slack=1)
    z = 3
    if variant == "A":
        g.add_linear(z, 2)
        for i in range(3):
            g.add_quadratic(i, z, -1)
    elif variant == "B":
        g.add_quadratic(0, z, -1)
        g.add_quadratic(1, z, 1)
        g.add_quadratic(2, z, 1)
        g.add_quadratic(0, 1, -1)
        g.add_quadratic(0, 2, -1)
        g.add_linear(0, 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return g


# ---------------------------------------------------------------------------
# Exact rational LP feasibility (phase-1 simplex, Bland's rule)
# ---------------------------------------------------------------------------

def _phase1_simplex(eq_rows, ge_rows, nvars):
    """Feasibility of {C x = d, A x >= b} over free rationals x.

    Returns the solution list or None.  Free variables are split x = u - v;
    slack columns turn inequalities into equalities; artificials seed the basis.
    """
    rows = []
    n_ge = len(ge_rows)
    width = 2 * nvars + n_ge
    for coeffs, rhs in eq_rows:
        row = [Fraction(c) for c in coeffs] + [-Fraction(c) for c in coeffs] + [Fraction(0)] * n_ge
        rows.append((row, Fraction(rhs)))
    for k, (coeffs, rhs) in enumerate(ge_rows):
        row = [Fraction(c) for c in coeffs] + [-Fraction(c) for c in coeffs] + [Fraction(0)] * n_ge
        row[2 * nvars + k] = Fraction(-1)
        rows.append((row, Fraction(rhs)))
    # normalize to rhs >= 0
    tableau = []
    for row, rhs in rows:
        if rhs < 0:
            row = [-c for c in row]
            rhs = -rhs
        tableau.append(row + [rhs])
    m = len(tableau)
    ncols = width + m
    for i, row in enumerate(tableau):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tableau[i] = row[:-1] + art + [row[-1]]
    basis = list(range(width, width + m))
    cost = [Fraction(0)] * (ncols + 1)
    for row in tableau:
        for j in range(ncols + 1):
            cost[j] -= row[j]
    for j in range(width, ncols):
        cost[j] = Fraction(0)
    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best_ratio = None
        for i in range(m):
            a = tableau[i][enter]
            if a > 0:
                ratio = tableau[i][ncols] / a
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])):
                    best_ratio, leave = ratio, i
        if leave is None:
            return None  # cannot happen for phase 1; defensive
        piv = tableau[leave][enter]
        tableau[leave] = [c / piv for c in tableau[leave]]
        for i in range(m):
            if i != leave and tableau[i][enter] != 0:
                f = tableau[i][enter]
                tableau[i] = [a - f * b for a, b in zip(tableau[i], tableau[leave])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * b for a, b in zip(cost, tableau[leave])]
        basis[leave] = enter
    if -cost[ncols] != 0:
        return None  # positive artificial optimum: infeasible
    solution = [Fraction(0)] * width
    for i, b in enumerate(basis):
        if b < width:
            solution[b] = tableau[i][ncols]
    return [solution[j] - solution[nvars + j] for j in range(nvars)]


def _coefficient_row(bits, n):
    """LP row for energy(bits): [1, v_0..v_{n-1}, v_i v_j ...]."""
    row = [Fraction(1)]
    row += [Fraction(bits[i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            row.append(Fraction(bits[i] * bits[j]))
    return row


def synthesize_penalty(target: TargetKernel, n_slack: int):
    """Search for a 2-body penalty realizing the target kernel with n_slack spins.

    For each assignment of which slack string attains the minimum on each
    accepted logical string, solve the induced exact-rational LP: energy = 0
    at the chosen points, ≥ 0 everywhere on accepted strings, ≥ δ on rejected
    strings.  Any feasible pattern yields a penalty; exhaustion refutes.
    """
    n = target.n_logical + n_slack
    if n > SYNTH_LIMIT:
        raise TooLarge(f"n_logical + n_slack = {n} exceeds {SYNTH_LIMIT}")
    delta = Fraction(target.delta)
    accepted = sorted(target.accepted)
    rejected = target.rejected()
    slack_strings = list(itertools.product((0, 1), repeat=n_slack))
    nvars = 1 + n + n * (n - 1) // 2

    ge_rows = []
    for a in accepted:
        for z in slack_strings:
            ge_rows.append((_coefficient_row(a + z, n), Fraction(0)))
    for r in rejected:
        for z in slack_strings:
            ge_rows.append((_coefficient_row(r + z, n), delta))

    tried = 0
    for pattern in itertools.product(range(len(slack_strings)), repeat=len(accepted)):
        tried += 1
        eq_rows = [(_coefficient_row(a + slack_strings[choice], n), Fraction(0))
                   for a, choice in zip(accepted, pattern)]
        solution = _phase1_simplex(eq_rows, ge_rows, nvars)
        if solution is None:
            continue
        g = QuadraticPenalty(target.n_logical, n_slack, k0=solution[0], delta=delta)
        pos = 1
        for i in range(n):
            if solution[pos]:
                g.add_linear(i, solution[pos])
            pos += 1
        for i in range(n):
            for j in range(i + 1, n):
                if solution[pos]:
                    g.add_quadratic(i, j, solution[pos])
                pos += 1
        return g
    return Infeasible(target.n_logical, n_slack, tried,
                      detail=f"all {tried} slack-argmin patterns give infeasible rational LPs")


# ---------------------------------------------------------------------------
# Parity chain
# ---------------------------------------------------------------------------

_XOR_BLOCK_CACHE: dict = {}


def xor_block() -> QuadraticPenalty:
    """2-body penalty on (a, b, c, mediator) whose min over the mediator is 0
    iff a ⊕ b ⊕ c = 0, else ≥ 1; synthesized once and cached."""
    if "block" not in _XOR_BLOCK_CACHE:
        even = {bits for bits in itertools.product((0, 1), repeat=3) if sum(bits) % 2 == 0}
        block = synthesize_penalty(TargetKernel(3, even), n_slack=1)
        if isinstance(block, Infeasible):  # contradicts the mediator theorem
            raise RuntimeError("single-mediator XOR synthesis unexpectedly failed")
        _XOR_BLOCK_CACHE["block"] = block
    return _XOR_BLOCK_CACHE["block"]


def xor_chain(k: int) -> QuadraticPenalty:
    """Assembled 2-body penalty whose ground space encodes k-bit parity.

    Logical bits 0..k-1; auxiliaries y_j = s_1 ⊕ ... ⊕ s_{j+1} occupy the next
    k-3 slots; each 3-variable block adds one mediator.  Min-over-slack energy
    is 0 exactly when bit k-1 equals the parity of bits 0..k-2 (even total
    parity), and ≥ 1 otherwise.
    """
    if k < 3:
        raise KTooSmall("parity chain needs k >= 3")
    blocks = []
    if k == 3:
        blocks.append((0, 1, 2))
        n_aux = 0
    else:
        n_aux = k - 3
        aux = list(range(k, k + n_aux))
        blocks.append((0, 1, aux[0]))
        for j in range(1, n_aux):
            blocks.append((aux[j - 1], j + 1, aux[j]))
        blocks.append((aux[-1], k - 2, k - 1))
    n_mediators = len(blocks)
    total = QuadraticPenalty(n_logical=k, n_slack=n_aux + n_mediators)
    block = xor_block()
    mediator = k + n_aux
    for a, b, c in blocks:
        total.merged(block, {0: a, 1: b, 2: c, 3: mediator})
        mediator += 1
    return total
