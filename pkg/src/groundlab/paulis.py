"""Weighted Pauli-string operator algebra and exact dense numerics.

Operators are stored as real combinations of Hermitian Pauli words (phase +1),
the universal representation every other module builds on.  Words are
bit-packed: qubit ``j`` is the j-th letter of the word and maps to bit
``n-1-j`` of a basis-state index, so qubit 0 is the leftmost tensor factor.
Internally a word is a pair of masks ``(x, z)`` meaning
``i**popcount(x & z) * X^x Z^z``, which makes every stored word Hermitian.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    IndexOutOfRange,
    InvalidSteps,
    NotStochasticGenerator,
)

DENSE_LIMIT = 14        # qubits; 2^14 x 2^14 complex is the largest matrix we build
STATEVECTOR_LIMIT = 20  # qubits; pure statevector paths, no matrix materialized

_PHASES = {1: 0, 1j: 1, -1: 2, -1j: 3}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _bit(n: int, qubit: int) -> int:
    """Mask bit for a qubit index (qubit 0 = most significant)."""
    return 1 << (n - 1 - qubit)


@dataclass(frozen=True)
class PauliString:
    """A phased Pauli word ``phase * letter_0 ⊗ ... ⊗ letter_{n-1}``.

    ``phase_exp`` is the power of i in ``i**phase_exp * X^x Z^z``; the
    letter-level phase (one of +1, -1, +i, -i) is ``phase``.
    """

    n: int
    x: int
    z: int
    phase_exp: int = 0

    @classmethod
    def from_word(cls, word: str, phase: complex = 1) -> "PauliString":
        n = len(word)
        x = z = 0
        e = _PHASES[phase]
        for j, letter in enumerate(word.upper()):
            b = _bit(n, j)
            if letter == "X":
                x |= b
            elif letter == "Z":
                z |= b
            elif letter == "Y":
                x |= b
                z |= b
                e += 1
            elif letter != "I":
                raise ValueError(f"unknown Pauli letter {letter!r}")
        return cls(n, x, z, e % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @property
    def word(self) -> str:
        return _word_from_masks(self.n, self.x, self.z)

    @property
    def phase(self) -> complex:
        """Letter-level phase: i**(phase_exp - #Y letters)."""
        return 1j ** ((self.phase_exp - _popcount(self.x & self.z)) % 4)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise DimensionMismatch("qubit counts differ")
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        e = self.phase_exp + other.phase_exp + 2 * _popcount(self.z & other.x)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, e % 4)

    def weight(self) -> int:
        """Number of non-identity letters."""
        return _popcount(self.x | self.z)

    def dense(self) -> np.ndarray:
        dim = 1 << self.n
        mat = np.zeros((dim, dim), dtype=complex)
        rows, values = self._action(dim)
        mat[rows, np.arange(dim)] = values
        return mat

    def _action(self, dim: int):
        """Column action: word|b> = values[b] |rows[b]>."""
        cols = np.arange(dim)
        rows = cols ^ self.x
        signs = 1 - 2 * (_popcount_array(cols & self.z) & 1)
        values = (1j ** (self.phase_exp % 4)) * signs
        return rows, values

    def __str__(self) -> str:
        pre = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return pre + _word_from_masks(self.n, self.x, self.z)


def _word_from_masks(n: int, x: int, z: int) -> str:
    out = []
    for j in range(n):
        b = 1 << (n - 1 - j)
        xb, zb = bool(x & b), bool(z & b)
        out.append("Y" if (xb and zb) else "X" if xb else "Z" if zb else "I")
    return "".join(out)


def _popcount_array(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    count = np.zeros_like(a)
    while a.any():
        count += a & 1
        a >>= np.uint64(1)
    return count.astype(np.int64)


class OperatorSum:
    """Hermitian operator: real coefficients on phase-+1 Pauli words."""

    def __init__(self, n: int, terms=None):
        self.n = n
        self._terms: dict[tuple[int, int], float] = {}
        if terms:
            for coeff, word in terms:
                self.add(coeff, word)

    # -- construction ------------------------------------------------------
    def add(self, coeff: float, word) -> "OperatorSum":
        """Accumulate ``coeff * word``; equal words merge."""
        if isinstance(word, str):
            key = self._key_from_word(word)
        elif isinstance(word, PauliString):
            if word.n != self.n:
                raise DimensionMismatch("qubit counts differ")
            phase = word.phase
            if abs(phase.imag) > 1e-14:
                raise ValueError("OperatorSum words must carry phase ±1")
            coeff = coeff * phase.real
            key = (word.x, word.z)
        else:
            key = word
        self._terms[key] = self._terms.get(key, 0.0) + float(coeff)
        if abs(self._terms[key]) < 1e-300:
            del self._terms[key]
        return self

    def _key_from_word(self, word: str) -> tuple[int, int]:
        if len(word) != self.n:
            raise DimensionMismatch(f"word length {len(word)} != n = {self.n}")
        p = PauliString.from_word(word)
        return (p.x, p.z)

    @classmethod
    def from_terms(cls, n: int, terms) -> "OperatorSum":
        return cls(n, terms)

    @classmethod
    def zero(cls, n: int) -> "OperatorSum":
        return cls(n)

    def copy(self) -> "OperatorSum":
        out = OperatorSum(self.n)
        out._terms = dict(self._terms)
        return out

    # -- views -------------------------------------------------------------
    def terms(self):
        """Yield (coeff, PauliString) with phase +1 words."""
        for (x, z), c in sorted(self._terms.items()):
            yield c, PauliString(self.n, x, z, _popcount(x & z) % 4)

    def coefficient(self, word: str) -> float:
        return self._terms.get(self._key_from_word(word), 0.0)

    def cardinality(self, tol: float = 0.0) -> int:
        """Number of nonzero Pauli-basis terms after merging."""
        return sum(1 for c in self._terms.values() if abs(c) > tol)

    def prune(self, tol: float = 1e-12) -> "OperatorSum":
        self._terms = {k: c for k, c in self._terms.items() if abs(c) > tol}
        return self

    def is_diagonal(self) -> bool:
        return all(x == 0 for (x, _z) in self._terms)

    def norm_bound(self) -> float:
        """Triangle-inequality bound on the operator norm."""
        return sum(abs(c) for c in self._terms.values())

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if self.n != other.n:
            raise DimensionMismatch("qubit counts differ")
        out = self.copy()
        for k, c in other._terms.items():
            out._terms[k] = out._terms.get(k, 0.0) + c
        return out.prune(0.0)

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "OperatorSum":
        out = OperatorSum(self.n)
        out._terms = {k: scalar * c for k, c in self._terms.items()}
        return out

    def __matmul__(self, other: "OperatorSum") -> "OperatorSum":
        """Operator product; valid when the result is Hermitian (imaginary
        parts of same-word contributions must cancel, e.g. A @ A)."""
        if self.n != other.n:
            raise DimensionMismatch("qubit counts differ")
        acc: dict[tuple[int, int], complex] = {}
        for ca, pa in self.terms():
            for cb, pb in other.terms():
                prod = pa * pb
                key = (prod.x, prod.z)
                acc[key] = acc.get(key, 0j) + ca * cb * prod.phase
        out = OperatorSum(self.n)
        for key, c in acc.items():
            if abs(c.imag) > 1e-10 * max(1.0, abs(c.real)):
                raise ValueError("product left the real span; not representable")
            if c.real:
                out.add(c.real, key)
        return out

    def embed(self, n_total: int, offset: int = 0) -> "OperatorSum":
        """Same operator on a larger register, qubits shifted by ``offset``."""
        out = OperatorSum(n_total)
        shift = n_total - self.n - offset
        for (x, z), c in self._terms.items():
            out._terms[(x << shift, z << shift)] = out._terms.get((x << shift, z << shift), 0.0) + c
        return out

    # -- serialization -------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{c!r} {p.word}" for c, p in self.terms()]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "OperatorSum":
        terms = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coeff, word = line.split()
            terms.append((float(coeff), word))
        if n is None:
            if not terms:
                raise ValueError("cannot infer qubit count from empty text")
            n = len(terms[0][1])
        return cls(n, terms)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "terms": [{"c": c, "word": p.word} for c, p in self.terms()]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "OperatorSum":
        return cls(d["n"], [(t["c"], t["word"]) for t in d["terms"]])

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, s: str) -> "OperatorSum":
        return cls.from_json_dict(json.loads(s))

    def __repr__(self) -> str:
        return f"OperatorSum(n={self.n}, terms={self.cardinality()})"


@dataclass
class StateVector:
    """Unit ℓ2 vector of 2^n complex amplitudes."""

    n: int
    amplitudes: np.ndarray

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def from_bits(cls, bits) -> "StateVector":
        n = len(bits)
        index = 0
        for b in bits:
            index = (index << 1) | int(b)
        return cls.basis(n, index)

    @classmethod
    def uniform(cls, n: int) -> "StateVector":
        dim = 1 << n
        return cls(n, np.full(dim, 1.0 / math.sqrt(dim), dtype=complex))

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes / self.norm())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2


def as_amplitudes(psi) -> np.ndarray:
    return psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)


# ---------------------------------------------------------------------------
# Dense realization and exact numerics
# ---------------------------------------------------------------------------

def realize_dense(op: OperatorSum, limit: int = DENSE_LIMIT) -> np.ndarray:
    """2^n x 2^n complex matrix Σ_k h_k (⊗_j σ^{α_j(k)}); Hermitian."""
    if op.n > limit:
        raise DimensionTooLarge(f"n = {op.n} exceeds dense limit {limit}")
    dim = 1 << op.n
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for c, p in op.terms():
        rows, values = p._action(dim)
        mat[rows, cols] += c * values
    return mat


def diagonal_of(op: OperatorSum) -> np.ndarray:
    """Diagonal of a diagonal OperatorSum without materializing the matrix."""
    dim = 1 << op.n
    diag = np.zeros(dim, dtype=float)
    cols = np.arange(dim)
    for c, p in op.terms():
        if p.x:
            raise ValueError("operator is not diagonal")
        diag += c * (1 - 2 * (_popcount_array(cols & p.z) & 1))
    return diag


def apply_operator(op: OperatorSum, psi) -> np.ndarray:
    """Matrix-free op @ psi."""
    amps = as_amplitudes(psi)
    out = np.zeros_like(amps)
    dim = amps.shape[0]
    for c, p in op.terms():
        rows, values = p._action(dim)
        out[rows] += (c * values) * amps
    return out


def expectation(op: OperatorSum, psi) -> float:
    """⟨ψ|H|ψ⟩ as a sum of per-word expected values; real for Hermitian input."""
    amps = as_amplitudes(psi)
    if amps.shape[0] != (1 << op.n):
        raise DimensionMismatch("state dimension does not match operator")
    val = np.vdot(amps, apply_operator(op, amps))
    return float(val.real)


@dataclass
class GroundResult:
    energy: float
    state: StateVector
    gap: float            # λ1 - λ0, reported 0.0 when the ground space is degenerate
    degeneracy: int
    distinct_gap: float   # first eigenvalue strictly above λ0 + tol, minus λ0

    def __iter__(self):
        yield self.energy
        yield self.state
        yield self.gap


def ground(op: OperatorSum, limit: int = DENSE_LIMIT, degeneracy_tol: float = 1e-10) -> GroundResult:
    """Full Hermitian diagonalization; smallest eigenvalue, eigenvector, gap."""
    mat = realize_dense(op, limit=limit)
    vals, vecs = np.linalg.eigh(mat)
    lam0 = float(vals[0])
    degenerate = vals <= lam0 + degeneracy_tol
    degeneracy = int(np.count_nonzero(degenerate))
    above = vals[~degenerate]
    distinct_gap = float(above[0] - lam0) if above.size else 0.0
    gap = float(vals[1] - lam0) if len(vals) > 1 and degeneracy == 1 else 0.0
    state = StateVector(op.n, vecs[:, 0].astype(complex))
    return GroundResult(lam0, state, gap, degeneracy, distinct_gap)


def spectrum(op: OperatorSum, limit: int = DENSE_LIMIT) -> np.ndarray:
    return np.linalg.eigvalsh(realize_dense(op, limit=limit))


def operator_norm(op: OperatorSum, limit: int = DENSE_LIMIT) -> float:
    """Largest singular value of the dense realization."""
    if op.cardinality() == 0:
        return 0.0
    return float(np.max(np.abs(spectrum(op, limit=limit))))


def is_stoquastic(op: OperatorSum, tol: float = 1e-12, limit: int = DENSE_LIMIT) -> bool:
    """True iff all off-diagonal dense entries are real and ≤ tol."""
    mat = realize_dense(op, limit=limit)
    off = mat - np.diag(np.diag(mat))
    return bool(np.all(np.abs(off.imag) <= tol) and np.all(off.real <= tol))


# ---------------------------------------------------------------------------
# Time evolution
# ---------------------------------------------------------------------------

def _check_infinitesimal_stochastic(mat: np.ndarray, tol: float = 1e-10) -> None:
    if np.abs(mat.imag).max(initial=0.0) > tol:
        raise NotStochasticGenerator("generator has imaginary entries")
    real = mat.real
    off = real - np.diag(np.diag(real))
    if off.max(initial=0.0) > tol:
        raise NotStochasticGenerator("positive off-diagonal entries")
    col_sums = real.sum(axis=0)
    if np.abs(col_sums).max() > 1e-8:
        raise NotStochasticGenerator("column sums do not vanish")


def evolve(op: OperatorSum, t: float, psi, mode: str = "quantum",
           limit: int = DENSE_LIMIT):
    """exp(-itH)ψ (quantum) or exp(-tH)ψ (stochastic, column convention).

    Stochastic generators act on column probability vectors with columns
    summing to zero; use ``transpose_generator`` to adapt row-convention input.
    """
    amps = as_amplitudes(psi)
    mat = realize_dense(op, limit=limit)
    if mode == "quantum":
        vals, vecs = np.linalg.eigh(mat)
        out = vecs @ (np.exp(-1j * t * vals) * (vecs.conj().T @ amps))
        out = out / np.linalg.norm(out)
        return StateVector(op.n, out) if isinstance(psi, StateVector) else out
    if mode == "stochastic":
        _check_infinitesimal_stochastic(mat)
        if np.any(amps.real < -1e-12) or np.abs(amps.imag).max(initial=0.0) > 1e-12:
            raise NotStochasticGenerator("stochastic mode needs a nonnegative real vector")
        out = scipy.linalg.expm(-t * mat.real) @ amps.real
        return StateVector(op.n, out.astype(complex)) if isinstance(psi, StateVector) else out
    raise ValueError(f"unknown mode {mode!r}")


def transpose_generator(mat: np.ndarray) -> np.ndarray:
    """Adapter between row-sum-zero and column-sum-zero conventions."""
    return np.asarray(mat).T.copy()


def trotter_evolve(a: OperatorSum, b: OperatorSum, t: float, steps: int, psi,
                   limit: int = DENSE_LIMIT):
    """(e^{-i(t/steps)A} e^{-i(t/steps)B})^steps ψ; B acts first in each step."""
    if a.n != b.n:
        raise DimensionMismatch("qubit counts differ")
    if steps <= 0:
        raise InvalidSteps("steps must be a positive integer")
    amps = as_amplitudes(psi).copy()
    dt = t / steps
    ua = _expm_factor(a, dt, limit)
    ub = _expm_factor(b, dt, limit)
    for _ in range(steps):
        amps = ua @ (ub @ amps)
    amps = amps / np.linalg.norm(amps)
    return StateVector(a.n, amps) if isinstance(psi, StateVector) else amps


def _expm_factor(op: OperatorSum, dt: float, limit: int) -> np.ndarray:
    vals, vecs = np.linalg.eigh(realize_dense(op, limit=limit))
    return (vecs * np.exp(-1j * dt * vals)) @ vecs.conj().T


# ---------------------------------------------------------------------------
# Clifford conjugation (tableau rules, no matrices)
# ---------------------------------------------------------------------------

@dataclass
class CliffordCircuit:
    """Word over the Clifford generators H(q), P(q), CN(control, target)."""

    n: int
    gates: list = field(default_factory=list)

    def h(self, q: int) -> "CliffordCircuit":
        self.gates.append(("H", q))
        return self

    def p(self, q: int) -> "CliffordCircuit":
        self.gates.append(("P", q))
        return self

    def cn(self, control: int, target: int) -> "CliffordCircuit":
        self.gates.append(("CN", control, target))
        return self

    def dense(self) -> np.ndarray:
        from .circuits import Circuit  # local import to avoid a cycle

        c = Circuit(self.n)
        for g in self.gates:
            if g[0] == "H":
                c.h(g[1])
            elif g[0] == "P":
                c.p(g[1])
            else:
                c.cn(g[1], g[2])
        return c.dense()


def _conjugate_string(p: PauliString, gate) -> PauliString:
    n, x, z, e = p.n, p.x, p.z, p.phase_exp
    kind = gate[0]
    if kind == "H":
        b = _bit(n, gate[1])
        if x & b and z & b:
            e += 2
        xb, zb = x & b, z & b
        x = (x & ~b) | (b if zb else 0)
        z = (z & ~b) | (b if xb else 0)
    elif kind == "P":
        b = _bit(n, gate[1])
        if x & b:
            e += 1
            z ^= b
    elif kind == "CN":
        # In the i^e X^x Z^z convention conjugation by CN is phase-free:
        # (X_c X_t)^{xc} X_t^{xt} Z_c^{zc} (Z_c Z_t)^{zt} is already ordered.
        bc, bt = _bit(n, gate[1]), _bit(n, gate[2])
        if x & bc:
            x ^= bt
        if z & bt:
            z ^= bc
    else:
        raise ValueError(f"unknown Clifford gate {kind!r}")
    return PauliString(n, x, z, e % 4)


def clifford_conjugate(op: OperatorSum, circuit: CliffordCircuit) -> OperatorSum:
    """Map Σ h_k P_k to Σ h_k (C P_k C†) by tableau rules; cardinality invariant."""
    for g in circuit.gates:
        qubits = g[1:] if g[0] != "CN" else (g[1], g[2])
        for q in qubits:
            if not (0 <= q < op.n):
                raise IndexOutOfRange(f"qubit {q} out of range for n = {op.n}")
    out = OperatorSum(op.n)
    for c, p in op.terms():
        for g in circuit.gates:
            p = _conjugate_string(p, g)
        phase = p.phase
        out.add(c * phase.real, PauliString(p.n, p.x, p.z, (_popcount(p.x & p.z)) % 4))
    return out


def conjugate_string_by_circuit(p: PauliString, circuit: CliffordCircuit) -> PauliString:
    for g in circuit.gates:
        p = _conjugate_string(p, g)
    return p
