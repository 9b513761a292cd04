"""Universality constructions: telescoping objectives and clock Hamiltonians.

A circuit prefix conjugates an initial projector Hamiltonian, preserving its
spectrum while moving the ground state to the prefix output; the clock
construction spreads the whole circuit over a time register whose unique
ground state is the history state.  Both unary (domain-wall) and binary clock
encodings are built as explicit Pauli operator sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, Gate, rotation_matrix
from .errors import (
    CardinalityBlowup,
    DenseLimit,
    InvalidWeights,
    NotUnitary,
    UnsupportedGate,
)
from .paulis import (
    DENSE_LIMIT,
    OperatorSum,
    PauliString,
    StateVector,
    _popcount,
    as_amplitudes,
    realize_dense,
)

NON_CLIFFORD_BOUND = 8  # telescope cardinality guard


# ---------------------------------------------------------------------------
# Telescoping
# ---------------------------------------------------------------------------

def initial_projector(n: int) -> OperatorSum:
    """P_φ = Σ_i |1><1|^(i) = (n/2)(1 - (1/n) Σ_i Z_i); ground state |0...0>."""
    op = OperatorSum(n)
    op.add(n / 2.0, "I" * n)
    for i in range(n):
        word = ["I"] * n
        word[i] = "Z"
        op.add(-0.5, "".join(word))
    return op


_CLIFFORD_FIXED = {"H", "P", "X", "Y", "Z"}


def _conjugate_by_pauli(op: OperatorSum, name: str, qubit: int) -> OperatorSum:
    """G P G for Pauli G: sign flips exactly when the letters anticommute."""
    out = OperatorSum(op.n)
    b = 1 << (op.n - 1 - qubit)
    for c, p in op.terms():
        xb, zb = bool(p.x & b), bool(p.z & b)
        if name == "X":
            flip = zb
        elif name == "Z":
            flip = xb
        else:  # Y
            flip = xb != zb
        out.add(-c if flip else c, (p.x, p.z))
    return out


def _conjugate_by_unitary_1q(op: OperatorSum, u: np.ndarray, qubit: int,
                             tol: float = 1e-14) -> OperatorSum:
    """Conjugate each term's letter at `qubit` by a 2x2 unitary.

    Uses the adjoint rotation M[b][a] = Tr(σ_b u σ_a u†)/2, so one input term
    fans out into at most three.
    """
    sigma = [np.array([[0, 1], [1, 0]], dtype=complex),
             np.array([[0, -1j], [1j, 0]]),
             np.array([[1, 0], [0, -1]], dtype=complex)]
    m = np.zeros((3, 3))
    for a in range(3):
        rotated = u @ sigma[a] @ u.conj().T
        for b in range(3):
            m[b, a] = float(np.real(np.trace(sigma[b] @ rotated))) / 2.0
    out = OperatorSum(op.n)
    b_mask = 1 << (op.n - 1 - qubit)
    letter_masks = [(b_mask, 0), (b_mask, b_mask), (0, b_mask)]  # X, Y, Z
    for c, p in op.terms():
        xb, zb = bool(p.x & b_mask), bool(p.z & b_mask)
        if not xb and not zb:
            out.add(c, (p.x, p.z))
            continue
        a = 0 if (xb and not zb) else 1 if (xb and zb) else 2
        base_x, base_z = p.x & ~b_mask, p.z & ~b_mask
        for b in range(3):
            if abs(m[b, a]) > tol:
                out.add(c * m[b, a], (base_x | letter_masks[b][0], base_z | letter_masks[b][1]))
    return out.prune(0.0)


def conjugate_by_gate(op: OperatorSum, gate: Gate) -> OperatorSum:
    """U op U† for one circuit gate, staying in the Pauli representation."""
    from .paulis import _conjugate_string

    if gate.kind == "cn":
        out = OperatorSum(op.n)
        for c, p in op.terms():
            q = _conjugate_string(p, ("CN", gate.qubits[0], gate.qubits[1]))
            out.add(c * q.phase.real, (q.x, q.z))
        return out
    if gate.kind == "fixed":
        name = gate.params[0]
        if name in ("X", "Y", "Z"):
            return _conjugate_by_pauli(op, name, gate.qubits[0])
        out = OperatorSum(op.n)
        for c, p in op.terms():
            q = _conjugate_string(p, (name, gate.qubits[0]))
            out.add(c * q.phase.real, (q.x, q.z))
        return out
    if gate.kind in ("rot", "refl"):
        if gate.kind == "rot":
            u = rotation_matrix(gate.params[:3], gate.params[3])
        else:
            nx, ny, nz = gate.params
            u = (nx * np.array([[0, 1], [1, 0]], dtype=complex)
                 + ny * np.array([[0, -1j], [1j, 0]])
                 + nz * np.array([[1, 0], [0, -1]], dtype=complex))
        return _conjugate_by_unitary_1q(op, u, gate.qubits[0])
    raise UnsupportedGate(f"telescope cannot conjugate gate kind {gate.kind!r}")


def _is_clifford_gate(gate: Gate) -> bool:
    if gate.kind in ("cn",):
        return True
    if gate.kind == "fixed":
        return gate.params[0] in _CLIFFORD_FIXED
    return False


@dataclass
class TelescopeResult:
    operator: OperatorSum
    cardinality: int
    non_clifford: int

    def __iter__(self):
        yield self.operator
        yield self.cardinality


def telescope(circuit: Circuit, k: int | None = None,
              non_clifford_bound: int = NON_CLIFFORD_BOUND) -> TelescopeResult:
    """h(k) = (Π_1^k U_l) P_φ (Π_1^k U_l)†, expanded in the Pauli basis.

    Clifford gates conjugate term-by-term without changing cardinality;
    general rotations fan letters out and are counted against the bound.
    """
    if k is None:
        k = len(circuit.gates)
    op = initial_projector(circuit.n)
    non_clifford = 0
    for gate in circuit.gates[:k]:
        if not _is_clifford_gate(gate):
            non_clifford += 1
            if non_clifford > non_clifford_bound:
                raise CardinalityBlowup(
                    f"more than {non_clifford_bound} non-Clifford gates in the prefix")
        op = conjugate_by_gate(op, gate)
    return TelescopeResult(op.prune(1e-14), op.cardinality(1e-14), non_clifford)


# ---------------------------------------------------------------------------
# Self-inverse compilation
# ---------------------------------------------------------------------------

def _reflection_pair(axis, theta: float):
    """Unit vectors m1, m2 with (m1·σ)(m2·σ) = e^{-iθ(axis·σ)}.

    m2 is any unit vector orthogonal to the axis and m1 = cosθ m2 + sinθ (axis × m2).
    """
    n = np.asarray(axis, dtype=float)
    pick = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(n, pick)
    u /= np.linalg.norm(u)
    m2 = u
    m1 = math.cos(theta) * u + math.sin(theta) * np.cross(n, u)
    return m1, m2


def self_inverse_compile(circuit: Circuit) -> Circuit:
    """Rewrite into Hermitian unitary gates (G = G†, G² = 1), same unitary
    up to global phase; every rotation costs two reflections.
    """
    out = Circuit(circuit.n)
    for gate in circuit.gates:
        if gate.kind == "cn" or gate.kind in ("refl", "refl2"):
            out.gates.append(gate)
        elif gate.kind == "fixed":
            name = gate.params[0]
            if name in ("H", "X", "Y", "Z"):
                out.gates.append(gate)
            elif name == "P":
                _compile_rotation(out, gate.qubits[0], (0.0, 0.0, 1.0), math.pi / 4.0)
            else:
                raise UnsupportedGate(name)
        elif gate.kind == "rot":
            _compile_rotation(out, gate.qubits[0], gate.params[:3], gate.params[3])
        elif gate.kind == "cphase" and len(gate.qubits) == 1:
            # diag(1, e^{iχ}) ~ e^{-i(χ/2)(-Z)} up to global phase
            _compile_rotation(out, gate.qubits[0], (0.0, 0.0, -1.0), gate.params[0] / 2.0)
        else:
            raise UnsupportedGate(
                f"self-inverse compile handles local rotations and CN, not {gate.kind!r}")
    return out


def _compile_rotation(out: Circuit, qubit: int, axis, theta: float) -> None:
    if abs(math.fmod(theta, math.pi)) < 1e-15:
        return  # identity up to global phase
    m1, m2 = _reflection_pair(axis, theta)
    out.hermitian_reflection(qubit, tuple(m2))
    out.hermitian_reflection(qubit, tuple(m1))


def gate_operator_sum(gate: Gate, n: int) -> OperatorSum:
    """Pauli expansion of a self-inverse gate (used for clock propagation terms)."""
    if gate.kind == "cn":
        c, t = gate.qubits
        op = OperatorSum(n)
        op.add(0.5, "I" * n)
        op.add(0.5, _word(n, {c: "Z"}))
        op.add(0.5, _word(n, {t: "X"}))
        op.add(-0.5, _word(n, {c: "Z", t: "X"}))
        return op
    if gate.kind == "refl":
        nx, ny, nz = gate.params
        q = gate.qubits[0]
        op = OperatorSum(n)
        for coeff, letter in ((nx, "X"), (ny, "Y"), (nz, "Z")):
            if abs(coeff) > 1e-15:
                op.add(coeff, _word(n, {q: letter}))
        return op
    if gate.kind == "refl2":
        c, t = gate.qubits
        phi = gate.params[0]
        op = OperatorSum(n)
        op.add(0.5, "I" * n)
        op.add(0.5, _word(n, {c: "Z"}))
        op.add(0.5 * math.sin(phi), _word(n, {t: "X"}))
        op.add(0.5 * math.cos(phi), _word(n, {t: "Z"}))
        op.add(-0.5 * math.sin(phi), _word(n, {c: "Z", t: "X"}))
        op.add(-0.5 * math.cos(phi), _word(n, {c: "Z", t: "Z"}))
        return op
    if gate.kind == "fixed":
        name = gate.params[0]
        q = gate.qubits[0]
        op = OperatorSum(n)
        if name == "H":
            r = 1.0 / math.sqrt(2.0)
            op.add(r, _word(n, {q: "X"}))
            op.add(r, _word(n, {q: "Z"}))
        elif name in ("X", "Y", "Z"):
            op.add(1.0, _word(n, {q: name}))
        else:
            raise UnsupportedGate(f"{name} is not self-inverse")
        return op
    raise UnsupportedGate(f"no Hermitian expansion for gate kind {gate.kind!r}")


def _word(n: int, letters: dict) -> str:
    word = ["I"] * n
    for q, letter in letters.items():
        word[q] = letter
    return "".join(word)


# ---------------------------------------------------------------------------
# Clock register helpers
# ---------------------------------------------------------------------------

def _ketbra_paulis(n_clock: int, t: int, tp: int) -> dict:
    """|t><tp| on the clock register as complex coefficients over (x, z) masks."""
    acc = {(0, 0): 1.0 + 0j}
    for j in range(n_clock):
        a = (t >> (n_clock - 1 - j)) & 1
        b = (tp >> (n_clock - 1 - j)) & 1
        bit = 1 << (n_clock - 1 - j)
        if a == b:
            # |a><a| = (1 + (-1)^a Z)/2
            parts = [((0, 0), 0.5 + 0j), ((0, bit), (0.5 if a == 0 else -0.5) + 0j)]
        else:
            # |0><1| = (X + iY)/2, |1><0| = (X - iY)/2; mask (1,1) is the Y word
            parts = [((bit, 0), 0.5 + 0j), ((bit, bit), 0.5j if a == 0 else -0.5j)]
        new = {}
        for (x0, z0), c0 in acc.items():
            for (x1, z1), c1 in parts:
                key = (x0 | x1, z0 | z1)
                new[key] = new.get(key, 0j) + c0 * c1
        acc = new
    return acc


def clock_projector(n_clock: int, t: int, n_total: int, offset: int) -> OperatorSum:
    """|t><t| on clock qubits placed at `offset` within an n_total register."""
    op = OperatorSum(n_total)
    shift = n_total - offset - n_clock
    for (x, z), c in _ketbra_paulis(n_clock, t, t).items():
        op.add(c.real, (x << shift, z << shift))
    return op


def _tensor_system_clock(system_op: OperatorSum, clock_terms: dict,
                         n_system: int, n_clock: int) -> dict:
    """system_op ⊗ clock_terms as Hermitian-word coefficients on the full register.

    Both inputs carry coefficients of Hermitian Pauli words (letters include
    Y); disjoint supports mean the combined word's phase composes on its own.
    """
    out = {}
    for c_sys, p in system_op.terms():
        for (xc, zc), c_clk in clock_terms.items():
            key = ((p.x << n_clock) | xc, (p.z << n_clock) | zc)
            out[key] = out.get(key, 0j) + c_sys * c_clk
    return out


def _fold_real(n_total: int, acc: dict) -> OperatorSum:
    """Hermitian-word accumulation folded into an OperatorSum; imaginary parts
    must cancel for a Hermitian total."""
    op = OperatorSum(n_total)
    for (x, z), weight in acc.items():
        if abs(weight.imag) > 1e-9 * max(1.0, abs(weight.real)):
            raise ValueError("clock term accumulation is not Hermitian")
        if abs(weight.real) > 1e-15:
            op.add(weight.real, (x, z))
    return op


# ---------------------------------------------------------------------------
# Clock Hamiltonian
# ---------------------------------------------------------------------------

@dataclass
class ClockHamiltonian:
    """J·H_in + K·H_prop (+ validity terms) for a self-inverse-compiled circuit."""

    n_system: int
    length: int                       # L after padding
    encoding: str
    j_weight: float
    k_weight: float
    h_in: OperatorSum
    h_prop: OperatorSum
    h_clock: OperatorSum              # validity penalty (unary chain / binary range)
    h_clockinit: OperatorSum          # unary |1><1| on the first clock qubit
    gates: list = field(default_factory=list)
    n_clock: int = 0

    @property
    def n_total(self) -> int:
        return self.n_system + self.n_clock

    def total(self) -> OperatorSum:
        """Operator whose unique ground state is the padded history state.

        The clock-init penalty is not part of this sum: it pins t = 0 and
        belongs to the preparation-stage Hamiltonian (see initial_hamiltonian).
        """
        op = self.j_weight * self.h_in + self.k_weight * self.h_prop
        if self.h_clock.cardinality():
            op = op + (self.j_weight + self.k_weight) * self.h_clock
        return op

    def initial_hamiltonian(self) -> OperatorSum:
        """Kernel = designated input at clock 0 (adds the clock-init penalty)."""
        op = self.j_weight * (self.h_in + self.h_clockinit)
        if self.h_clock.cardinality():
            op = op + (self.j_weight + self.k_weight) * self.h_clock
        return op

    def cardinality(self) -> int:
        return self.total().cardinality(1e-14)

    def history_state(self) -> StateVector:
        return history_state_from_gates(self.gates, self.n_system, self.n_clock,
                                        self.length, self.encoding)

    def report(self) -> dict:
        gap = self.gap_bound()
        return {
            "L": self.length,
            "encoding": self.encoding,
            "n_system": self.n_system,
            "n_clock": self.n_clock,
            "cardinality": self.cardinality(),
            "gap_bound": gap,
        }

    def gap_bound(self) -> float:
        return max(self.j_weight,
                   self.k_weight * math.pi ** 2 / (2.0 * (self.length + 1) ** 2))


def _clock_qubits(length: int, encoding: str) -> int:
    if encoding == "unary":
        return max(length, 1)
    return max(1, math.ceil(math.log2(length + 1)))


def _unary_index(t: int, n_clock: int) -> int:
    """Domain-wall basis index for time t: t ones then zeros."""
    idx = 0
    for j in range(t):
        idx |= 1 << (n_clock - 1 - j)
    return idx


def clock_hamiltonian(circuit: Circuit, j_weight: float = 1.0, k_weight: float = 1.0,
                      padding: int = 0, encoding: str = "binary",
                      input_bits=None) -> ClockHamiltonian:
    """Build the clock Hamiltonian for a circuit plus `padding` identity gates.

    Gates are compiled self-inverse first; each propagation block H_t is a
    projector (2H_t ≥ 0 and H_t² = H_t).
    """
    if j_weight <= 0 or k_weight <= 0:
        raise InvalidWeights("J and K must be positive")
    if encoding not in ("unary", "binary"):
        raise ValueError(f"unknown encoding {encoding!r}")
    compiled = self_inverse_compile(circuit)
    n_sys = circuit.n
    gates = list(compiled.gates) + [None] * padding  # None = identity padding
    length = len(gates)
    n_clock = _clock_qubits(length, encoding)
    n_total = n_sys + n_clock
    if n_total > DENSE_LIMIT + 4:
        raise DenseLimit(f"register of {n_total} qubits is beyond the supported range")

    if encoding == "binary":
        time_index = list(range(length + 1))
    else:
        time_index = [_unary_index(t, n_clock) for t in range(length + 1)]

    identity_sys = OperatorSum(n_sys, [(1.0, "I" * n_sys)])
    h_prop = OperatorSum(n_total)
    for t in range(1, length + 1):
        gate = gates[t - 1]
        u_op = identity_sys if gate is None else gate_operator_sum(gate, n_sys)
        if encoding == "binary":
            acc = _tensor_system_clock(identity_sys, _ketbra_paulis(n_clock, time_index[t], time_index[t]), n_sys, n_clock)
            for key, val in _tensor_system_clock(identity_sys, _ketbra_paulis(n_clock, time_index[t - 1], time_index[t - 1]), n_sys, n_clock).items():
                acc[key] = acc.get(key, 0j) + val
            hop = _ketbra_paulis(n_clock, time_index[t], time_index[t - 1])
            hop_dag = _ketbra_paulis(n_clock, time_index[t - 1], time_index[t])
            for key, val in _tensor_system_clock(u_op, hop, n_sys, n_clock).items():
                acc[key] = acc.get(key, 0j) - val
            for key, val in _tensor_system_clock(u_op, hop_dag, n_sys, n_clock).items():
                acc[key] = acc.get(key, 0j) - val
            h_t = 0.5 * _fold_real(n_total, acc)
        else:
            h_t = _unary_prop_term(u_op, t, length, n_sys, n_clock)
        h_prop = h_prop + h_t
    h_prop = h_prop.prune(1e-14)

    # input term: (1 - |x_i><x_i|) ⊗ |t=0 marker|
    bits = [0] * n_sys if input_bits is None else list(input_bits)
    h_in = OperatorSum(n_total)
    for i in range(n_sys):
        proj = OperatorSum(n_sys)
        proj.add(0.5, "I" * n_sys)
        proj.add(0.5 if bits[i] else -0.5, _word(n_sys, {i: "Z"}))
        if encoding == "binary":
            marker = _ketbra_paulis(n_clock, time_index[0], time_index[0])
        else:
            # unary: first clock qubit in |0> marks t = 0
            marker = {(0, 0): 0.5 + 0j, (0, 1 << (n_clock - 1)): 0.5 + 0j}
        h_in = h_in + _fold_real(n_total, _tensor_system_clock(proj, marker, n_sys, n_clock))
    h_in = h_in.prune(1e-14)

    h_clock = OperatorSum(n_total)
    h_clockinit = OperatorSum(n_total)
    if encoding == "unary":
        for t in range(1, n_clock):
            # penalize |01| on adjacent clock qubits (t-1, t), 0-based c_{t-1}, c_t
            acc = {}
            marker = {}
            ca, cb = n_clock - 1 - (t - 1), n_clock - 1 - t
            for (xa, za), va in (((0, 0), 0.5), ((0, 1 << ca), 0.5)):
                for (xb, zb), vb in (((0, 0), 0.5), ((0, 1 << cb), -0.5)):
                    key = (xa | xb, za | zb)
                    marker[key] = marker.get(key, 0j) + va * vb
            h_clock = h_clock + _fold_real(n_total, _tensor_system_clock(identity_sys, marker, n_sys, n_clock))
        first = {(0, 0): 0.5 + 0j, (0, 1 << (n_clock - 1)): -0.5 + 0j}
        h_clockinit = _fold_real(n_total, _tensor_system_clock(identity_sys, first, n_sys, n_clock))
    else:
        for t in range(length + 1, 1 << n_clock):
            h_clock = h_clock + _fold_real(
                n_total, _tensor_system_clock(identity_sys, _ketbra_paulis(n_clock, t, t), n_sys, n_clock))
    h_clock = h_clock.prune(1e-14)

    return ClockHamiltonian(n_sys, length, encoding, j_weight, k_weight,
                            h_in, h_prop, h_clock, h_clockinit, gates, n_clock)


def _unary_prop_term(u_op: OperatorSum, t: int, length: int,
                     n_sys: int, n_clock: int) -> OperatorSum:
    """Projector block ½ P_pre (1 - U⊗X_t) P_post on the domain-wall register."""
    n_total = n_sys + n_clock
    identity_sys = OperatorSum(n_sys, [(1.0, "I" * n_sys)])
    flip_bit = 1 << (n_clock - t)  # clock qubit index t-1 (0-based c_{t-1})

    def proj(clock_qubit: int, value: int) -> dict:
        bit = 1 << (n_clock - 1 - clock_qubit)
        return {(0, 0): 0.5 + 0j, (0, bit): (0.5 if value == 0 else -0.5) + 0j}

    terms = {(0, 0): 1.0 + 0j}
    if t >= 2:
        terms = _dict_mul(terms, proj(t - 2, 1))
    if t <= length - 1:
        terms = _dict_mul(terms, proj(t, 0))
    acc = _tensor_system_clock(identity_sys, terms, n_sys, n_clock)
    hop = _dict_mul(terms, {(flip_bit, 0): 1.0 + 0j})
    for key, val in _tensor_system_clock(u_op, hop, n_sys, n_clock).items():
        acc[key] = acc.get(key, 0j) - val
    return 0.5 * _fold_real(n_total, acc)


def _dict_mul(a: dict, b: dict) -> dict:
    """Product of commuting disjoint-support clock Pauli accumulations."""
    out = {}
    for (xa, za), va in a.items():
        for (xb, zb), vb in b.items():
            key = (xa | xb, za | zb)
            out[key] = out.get(key, 0j) + va * vb
    return out


# ---------------------------------------------------------------------------
# History state and acceptance overlap
# ---------------------------------------------------------------------------

def history_state_from_gates(gates, n_system: int, n_clock: int, length: int,
                             encoding: str, input_bits=None) -> StateVector:
    dim_sys = 1 << n_system
    dim_clock = 1 << n_clock
    if input_bits is None:
        sector = np.zeros(dim_sys, dtype=complex)
        sector[0] = 1.0
    else:
        idx = 0
        for b in input_bits:
            idx = (idx << 1) | int(b)
        sector = np.zeros(dim_sys, dtype=complex)
        sector[idx] = 1.0
    amps = np.zeros(dim_sys * dim_clock, dtype=complex)
    current = sector
    for t in range(length + 1):
        clock_idx = t if encoding == "binary" else _unary_index(t, n_clock)
        block = current / math.sqrt(length + 1)
        amps[np.arange(dim_sys) * dim_clock + clock_idx] += block
        if t < length:
            gate = gates[t]
            if gate is not None:
                stage = Circuit(n_system)
                stage.gates.append(gate)
                current = stage.apply(current)
    return StateVector(n_system + n_clock, amps)


def history_state(circuit: Circuit, padding: int = 0, encoding: str = "binary") -> StateVector:
    """Equal-weight superposition of compiled-circuit prefixes tagged by clock."""
    compiled = self_inverse_compile(circuit)
    gates = list(compiled.gates) + [None] * padding
    length = len(gates)
    n_clock = _clock_qubits(length, encoding)
    return history_state_from_gates(gates, circuit.n, n_clock, length, encoding)


def acceptance_overlap(circuit: Circuit, padding: int) -> dict:
    """|<φ ⊗ uniform-late-clock | ψ_hist>|² against the closed form M/(L+M+1).

    φ is the circuit output; the late-clock window is the uniform state over
    the M padded times t = L+1 .. L+M.  For M = 0 the overlap is 0 by the
    formula's limit.
    """
    compiled = self_inverse_compile(circuit)
    base_len = len(compiled.gates)
    gates = list(compiled.gates) + [None] * padding
    length = len(gates)
    n_clock = _clock_qubits(length, "binary")
    psi_hist = history_state_from_gates(gates, circuit.n, n_clock, length, "binary")
    closed_form = 0.0 if padding == 0 else 1.0 / (1.0 + (base_len + 1) / padding)
    if padding == 0:
        return {"overlap": 0.0, "closed_form": 0.0, "L": base_len, "M": 0}
    phi = compiled.simulate()
    dim_clock = 1 << n_clock
    comparison = np.zeros((1 << circuit.n) * dim_clock, dtype=complex)
    for t in range(base_len + 1, base_len + padding + 1):
        comparison[np.arange(1 << circuit.n) * dim_clock + t] += phi.amplitudes / math.sqrt(padding)
    overlap = float(abs(np.vdot(comparison, psi_hist.amplitudes)) ** 2)
    return {"overlap": overlap, "closed_form": closed_form, "L": base_len, "M": padding}


# ---------------------------------------------------------------------------
# Gap analysis
# ---------------------------------------------------------------------------

def chain_eigenvalues(length: int) -> np.ndarray:
    """Exact spectrum of the W-rotated propagation operator: the ½-Laplacian
    of an open (L+1)-site chain; closed form 1 - cos(πk/(L+1))."""
    size = length + 1
    mat = np.zeros((size, size))
    for t in range(1, size):
        mat[t - 1, t - 1] += 0.5
        mat[t, t] += 0.5
        mat[t - 1, t] -= 0.5
        mat[t, t - 1] -= 0.5
    return np.linalg.eigvalsh(mat)


def gap_analysis(length: int, j_weight: float = 1.0, k_weight: float = 1.0,
                 n_system: int = 1) -> dict:
    """Exact chain spectrum, the closed form, and the combined-operator gap.

    The combined gap uses the exact (L+1)-dimensional clock model (gate
    content does not matter: the W rotation removes it), with the input term
    J Σ_i P1^(i) ⊗ |0><0|_clock.
    """
    size = length + 1
    exact = chain_eigenvalues(length)
    formula = np.array([1.0 - math.cos(math.pi * k / size) for k in range(size)])
    dim_sys = 1 << n_system
    chain = np.zeros((size, size))
    for t in range(1, size):
        chain[t - 1, t - 1] += 0.5
        chain[t, t] += 0.5
        chain[t - 1, t] -= 0.5
        chain[t, t - 1] -= 0.5
    p1_total = np.diag([bin(i).count("1") for i in range(dim_sys)]).astype(float)
    p_t0 = np.zeros((size, size))
    p_t0[0, 0] = 1.0
    combined = (j_weight * np.kron(p1_total, p_t0)
                + k_weight * np.kron(np.eye(dim_sys), chain))
    vals = np.linalg.eigvalsh(combined)
    bound = max(j_weight, k_weight * math.pi ** 2 / (2.0 * size ** 2))
    return {
        "chain_eigenvalues": exact,
        "formula": formula,
        "combined_gap": float(vals[1] - vals[0]),
        "bound": bound,
        "ground_energy": float(vals[0]),
    }


# ---------------------------------------------------------------------------
# Real-gate mapping
# ---------------------------------------------------------------------------

def realify_gate(u: np.ndarray) -> np.ndarray:
    """Ũ = Re{U} ⊗ 1 + Im{U} ⊗ (|1><0| - |0><1|): real orthogonal on one more qubit."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    if not np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-10):
        raise NotUnitary("input gate is not unitary")
    j2 = np.array([[0.0, -1.0], [1.0, 0.0]])
    return np.kron(u.real, np.eye(2)) + np.kron(u.imag, j2)


def encode_real(psi) -> np.ndarray:
    """|ψ̃> = Σ Re(a_x)|x>|0> + Im(a_x)|x>|1> (ancilla is the last qubit)."""
    amps = as_amplitudes(psi)
    out = np.zeros(2 * amps.size)
    out[0::2] = amps.real
    out[1::2] = amps.imag
    return out


def decode_real(real_amps: np.ndarray) -> np.ndarray:
    return real_amps[0::2] + 1j * real_amps[1::2]
